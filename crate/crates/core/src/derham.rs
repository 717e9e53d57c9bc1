//! Harmonic functions restricted to an edge: shape classification, dyadic
//! values, and the location of the maximum through the profile `L`.
//!
//! `L` solves `L = f_1∘L∘g_1` on `[0, 1/2]` and `L = f_2∘L∘g_2` on `[1/2, 1]`
//! with `f_1(y) = 1 - y/2`, `f_2(y) = (1 + y)/2`,
//! `g_1(t) = (1-2t)/((N-1)t+1)`, `g_2(t) = (2t-1)/((N-1)(1-t)+1)`.

use std::fmt;

use num_traits::Signed;

use crate::address::Dim;
use crate::error::{Error, Result};
use crate::report::Report;
use crate::scalar::{Rational, Scalar};

/// Default number of contraction steps for `L` (error below `2^-41`).
pub const DEFAULT_ITERATIONS: u32 = 40;

/// Default stopping width of the `M`-bracket in [`DeRham::m_inverse`].
pub const DEFAULT_BRACKET_WIDTH: f64 = 1.0 / (1u64 << 24) as f64;

/// Shape of `t ↦ h(Φ(t))` on an edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeShape {
    StrictlyIncreasing,
    StrictlyDecreasing,
    /// Unique interior maximum at `at`.
    InteriorMax {
        at: f64,
    },
    /// Unique interior minimum at `at`.
    InteriorMin {
        at: f64,
    },
    Constant,
}

impl fmt::Display for EdgeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeShape::StrictlyIncreasing => write!(f, "strictly-increasing"),
            EdgeShape::StrictlyDecreasing => write!(f, "strictly-decreasing"),
            EdgeShape::InteriorMax { at } => write!(f, "interior-max at {at}"),
            EdgeShape::InteriorMin { at } => write!(f, "interior-min at {at}"),
            EdgeShape::Constant => write!(f, "constant"),
        }
    }
}

/// `L`, `M` and their inverses for a fixed dimension.
#[derive(Clone, Copy, Debug)]
pub struct DeRham {
    n: usize,
    iterations: u32,
    bracket_width: f64,
}

impl DeRham {
    pub fn new(dim: Dim) -> Self {
        Self { n: dim.get(), iterations: DEFAULT_ITERATIONS, bracket_width: DEFAULT_BRACKET_WIDTH }
    }

    pub fn with_iterations(mut self, iterations: u32) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_bracket_width(mut self, width: f64) -> Self {
        self.bracket_width = width;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn iterations(&self) -> u32 {
        self.iterations
    }

    /// `G` together with the branch symbol (1 on `[0, 1/2]`, 2 above).
    pub fn step<T: Scalar>(&self, t: &T) -> (u8, T) {
        let n1 = T::from_i64(self.n as i64 - 1);
        let one = T::one();
        let two = T::from_i64(2);
        if *t <= T::ratio(1, 2) {
            let g = (one.clone() - two * t.clone()) / (n1 * t.clone() + one);
            (1, clamp_unit(g))
        } else {
            let g = (two * t.clone() - one.clone()) / (n1 * (one.clone() - t.clone()) + one);
            (2, clamp_unit(g))
        }
    }

    /// `Ξ^n F_0 (t)` with `F_0(t) = (1 + t)/2`; uniform error below `2^{-n-1}`.
    pub fn l_iterate<T: Scalar>(&self, t: &T, n: u32) -> T {
        let mut symbols = Vec::with_capacity(n as usize);
        let mut x = clamp_unit(t.clone());
        for _ in 0..n {
            let (k, next) = self.step(&x);
            symbols.push(k);
            x = next;
        }
        let mut y = (T::one() + x) / T::from_i64(2);
        for &k in symbols.iter().rev() {
            y = apply_f(k, y);
        }
        y
    }

    /// `L(t)` at the configured budget.
    pub fn l_eval(&self, t: f64) -> f64 {
        self.l_iterate(&t, self.iterations)
    }

    /// Right-hand side of the functional equation evaluated with the same iterate.
    pub fn l_rhs(&self, t: f64) -> f64 {
        let (k, g) = self.step(&t);
        apply_f(k, self.l_eval(g))
    }

    /// `M(s)`: `1` for `s <= 0`, else `L(1/((N+1)s + 1))`.
    pub fn m_eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 1.0;
        }
        self.l_eval(1.0 / ((self.n as f64 + 1.0) * s + 1.0))
    }

    /// Maximum location on an edge with endpoint values `α_i ≠ α_j` and cell mean `s`.
    pub fn m_general(&self, s: f64, alpha_i: f64, alpha_j: f64) -> Result<f64> {
        if alpha_i == alpha_j {
            return Err(Error::Precondition("endpoint values must differ".into()));
        }
        Ok(if alpha_i < alpha_j {
            self.m_eval((s - alpha_j) / (alpha_j - alpha_i))
        } else {
            1.0 - self.m_eval((s - alpha_i) / (alpha_i - alpha_j))
        })
    }

    /// The unique `s > 0` with `M(s) = target`, by bisection.
    pub fn m_inverse(&self, target: f64) -> Result<f64> {
        if !(target > 0.5 && target < 1.0) {
            return Err(Error::Precondition(format!("target {target} is outside (1/2, 1)")));
        }
        let pivot = 1.0 / (self.n as f64 + 1.0);
        // M decreases: lo has M(lo) >= target, hi has M(hi) <= target
        let (mut lo, mut hi) = if target >= 0.75 {
            let mut lo = pivot / 2.0;
            while self.m_eval(lo) < target && lo > f64::MIN_POSITIVE {
                lo /= 2.0;
            }
            (lo, pivot)
        } else {
            let mut hi = pivot * 2.0;
            while self.m_eval(hi) > target && hi < f64::MAX / 4.0 {
                hi *= 2.0;
            }
            (pivot, hi)
        };
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let (m_lo, m_hi) = (self.m_eval(lo), self.m_eval(hi));
            if m_lo - m_hi < self.bracket_width && (hi - lo) <= 1e-15 * hi.max(1e-300) {
                break;
            }
            if self.m_eval(mid) >= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Exact itinerary and coding value of a rational `t`.
    pub fn itinerary_eval(&self, t: &Rational, max_steps: usize) -> Result<ItineraryValue> {
        let zero = Rational::from_i64(0);
        let one = Rational::from_i64(1);
        if *t < zero || *t > one {
            return Err(Error::Precondition(format!("{} is outside [0, 1]", t.to_text())));
        }
        let half = Rational::ratio(1, 2);
        let mut x = t.clone();
        let mut symbols = Vec::new();
        let mut hit_half = false;
        // χ of the remaining itinerary once the orbit reaches 1/2, 0 or 1
        let mut closed = None;
        for _ in 0..max_steps {
            if x == half {
                hit_half = true;
                closed = Some((Rational::ratio(3, 4), [1u8, 1].as_slice()));
            } else if x == zero {
                closed = Some((half.clone(), [1u8].as_slice()));
            } else if x == one {
                closed = Some((one.clone(), [].as_slice()));
            }
            if closed.is_some() {
                break;
            }
            let (k, next) = self.step(&x);
            symbols.push(k);
            x = next;
        }
        let prefix_len = symbols.len();
        let (mut value, error, tail) = match closed {
            Some((v, forced)) => {
                symbols.extend_from_slice(forced);
                (v, 0.0, Some(2))
            }
            // anything in [1/2, 1] is within 1/4 of the midpoint
            None => (Rational::ratio(3, 4), 0.25 * 0.5f64.powi(prefix_len as i32), None),
        };
        for &k in symbols[..prefix_len].iter().rev() {
            value = apply_f(k, value);
        }
        Ok(ItineraryValue { itinerary: Itinerary { symbols, tail, hit_half }, value, error })
    }

    /// Checks the closed-form derivative bounds of the two-fold inverse branches.
    pub fn inverse_branch_contraction_check(&self) -> Report {
        let n = self.n as i64;
        let detail = format!("N={}", self.n);
        let mut report = Report::new();
        let bound = Rational::ratio(n + 1, n + 3).powi(2);
        let q = |a: i64, b: i64| Rational::ratio(a, b);

        report.push(
            "inverse branch endpoints",
            &detail,
            inv_branch(n, 1, &q(0, 1)) == q(1, 2)
                && inv_branch(n, 1, &q(1, 1)) == q(0, 1)
                && inv_branch(n, 2, &q(0, 1)) == q(1, 2)
                && inv_branch(n, 2, &q(1, 1)) == q(1, 1),
        );

        let mut closed_ok = true;
        let mut bound_ok = true;
        for step in 0..=64 {
            let s = q(step, 64);
            for inner in 1..=2u8 {
                let y = inv_branch(n, inner, &s);
                let d_inner = inv_branch_derivative(n, inner, &s);
                let closed = match inner {
                    1 => {
                        q((n + 1) * (n + 1), 1)
                            / (Rational::from_i64(n + 3) + Rational::from_i64(n - 1) * s.clone()).powi(2)
                    }
                    _ => {
                        q((n + 1) * (n + 1), 1)
                            / (Rational::from_i64(n + 3) + Rational::from_i64(n * n + n - 2) * s.clone()).powi(2)
                    }
                };
                for outer in 1..=2u8 {
                    let d = (inv_branch_derivative(n, outer, &y) * d_inner.clone()).abs();
                    closed_ok &= d == closed;
                    bound_ok &= d <= bound;
                }
            }
        }
        report.push("two-fold derivative closed form", &detail, closed_ok);
        report.push("two-fold derivative bound ((N+1)/(N+3))^2", &detail, bound_ok);

        let mut fd_ok = true;
        let h = 1e-6;
        for step in 1..64 {
            let s = step as f64 / 64.0;
            for k in 1..=2u8 {
                let fd = (inv_branch_f64(n, k, s + h) - inv_branch_f64(n, k, s - h)) / (2.0 * h);
                let exact = inv_branch_derivative(n, k, &Rational::ratio(step, 64)).to_f64();
                fd_ok &= (fd - exact).abs() < 1e-8;
            }
        }
        report.push("inverse branch derivative vs finite differences", &detail, fd_ok);
        report
    }
}

fn clamp_unit<T: Scalar>(x: T) -> T {
    if x < T::zero() {
        T::zero()
    } else if x > T::one() {
        T::one()
    } else {
        x
    }
}

fn apply_f<T: Scalar>(k: u8, y: T) -> T {
    let half = T::ratio(1, 2);
    match k {
        1 => T::one() - half * y,
        _ => half.clone() + half * y,
    }
}

/// `g_k^{-1}(s)`
pub fn inv_branch(n: i64, k: u8, s: &Rational) -> Rational {
    let den = Rational::from_i64(n - 1) * s.clone() + Rational::from_i64(2);
    match k {
        1 => (Rational::from_i64(1) - s.clone()) / den,
        _ => (Rational::from_i64(n) * s.clone() + Rational::from_i64(1)) / den,
    }
}

fn inv_branch_f64(n: i64, k: u8, s: f64) -> f64 {
    let den = (n - 1) as f64 * s + 2.0;
    match k {
        1 => (1.0 - s) / den,
        _ => (n as f64 * s + 1.0) / den,
    }
}

/// `(g_k^{-1})'(s) = ∓(N+1)/((N-1)s + 2)^2`
pub fn inv_branch_derivative(n: i64, k: u8, s: &Rational) -> Rational {
    let den = (Rational::from_i64(n - 1) * s.clone() + Rational::from_i64(2)).powi(2);
    let mag = Rational::from_i64(n + 1) / den;
    if k == 1 {
        -mag
    } else {
        mag
    }
}

/// Symbol sequence of a `G`-orbit; `tail` repeats forever after `symbols`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Itinerary {
    pub symbols: Vec<u8>,
    pub tail: Option<u8>,
    /// Some iterate landed exactly on `1/2`.
    pub hit_half: bool,
}

impl fmt::Display for Itinerary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        match self.tail {
            Some(k) => write!(f, "({k})^∞"),
            None => write!(f, "…"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ItineraryValue {
    pub itinerary: Itinerary,
    pub value: Rational,
    /// Zero for eventually-constant itineraries.
    pub error: f64,
}

/// Grid of `Ξ^n F_0` on the dyadics of depth `depth`.
#[derive(Clone, Debug)]
pub struct DeRhamState<T> {
    pub depth: u32,
    pub iterations: u32,
    pub values: Vec<T>,
}

impl<T: Scalar> DeRhamState<T> {
    pub fn compute(derham: &DeRham, depth: u32, iterations: u32) -> Self {
        let size = 1usize << depth;
        let values = (0..=size).map(|m| derham.l_iterate(&T::ratio(m as i64, size as i64), iterations)).collect();
        Self { depth, iterations, values }
    }

    /// `2^{-n}·‖F_0 - ΞF_0‖_∞`, using `‖F_0 - ΞF_0‖_∞ <= 1/2`.
    pub fn error_bound(&self) -> f64 {
        0.5f64.powi(self.iterations as i32 + 1)
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn in_range(&self) -> bool {
        let half = T::ratio(1, 2);
        self.values.iter().all(|v| *v >= half && *v <= T::one())
    }
}

/// Values of the harmonic function on the dyadics `m/2^depth` of an edge with
/// endpoint values `α_i`, `α_j` and cell mean `s`.
pub fn edge_values<T: Scalar>(dim: Dim, alpha_i: &T, alpha_j: &T, s: &T, depth: u32) -> Vec<T> {
    let n1 = T::from_i64(dim.get() as i64 + 1);
    let n3 = T::from_i64(dim.get() as i64 + 3);
    let two = T::from_i64(2);
    let size = 1usize << depth;
    let mut out = vec![T::zero(); size + 1];
    out[0] = alpha_i.clone();
    out[size] = alpha_j.clone();
    let mut stack = vec![(0usize, size, alpha_i.clone(), alpha_j.clone(), s.clone())];
    while let Some((lo, hi, a, b, mean)) = stack.pop() {
        if hi - lo < 2 {
            continue;
        }
        let mid_idx = (lo + hi) / 2;
        let base = n1.clone() * mean;
        let mid = (base.clone() + a.clone() + b.clone()) / n3.clone();
        let s_left = (base.clone() + two.clone() * a.clone()) / n3.clone();
        let s_right = (base + two.clone() * b.clone()) / n3.clone();
        out[mid_idx] = mid.clone();
        stack.push((lo, mid_idx, a, mid.clone(), s_left));
        stack.push((mid_idx, hi, mid, b, s_right));
    }
    out
}

/// Argmax of [`edge_values`] on the depth-`depth` grid, ties toward smaller `t`.
pub fn brute_max_location<T: Scalar>(dim: Dim, alpha_i: &T, alpha_j: &T, s: &T, depth: u32) -> Result<(usize, f64)> {
    if alpha_i == alpha_j {
        return Err(Error::Precondition("endpoint values must differ".into()));
    }
    let vals = edge_values(dim, alpha_i, alpha_j, s, depth);
    let mut best = 0;
    for (m, v) in vals.iter().enumerate() {
        if *v > vals[best] {
            best = m;
        }
    }
    Ok((best, best as f64 / (1u64 << depth) as f64))
}

/// Shape of the edge restriction from `(α_i, α_j, s)`.
pub fn classify_edge<T: Scalar>(derham: &DeRham, alpha_i: &T, alpha_j: &T, s: &T) -> EdgeShape {
    let (a, b) = (alpha_i, alpha_j);
    if a == b {
        return match s.partial_cmp(a) {
            Some(std::cmp::Ordering::Greater) => EdgeShape::InteriorMax { at: 0.5 },
            Some(std::cmp::Ordering::Less) => EdgeShape::InteriorMin { at: 0.5 },
            _ => EdgeShape::Constant,
        };
    }
    let (af, bf, sf) = (a.to_f64(), b.to_f64(), s.to_f64());
    let max_at = || derham.m_general(sf, af, bf).expect("distinct endpoints");
    let min_at = || derham.m_general(-sf, -af, -bf).expect("distinct endpoints");
    if a < b {
        if s < a {
            EdgeShape::InteriorMin { at: min_at() }
        } else if s <= b {
            EdgeShape::StrictlyIncreasing
        } else {
            EdgeShape::InteriorMax { at: max_at() }
        }
    } else if s < b {
        EdgeShape::InteriorMin { at: min_at() }
    } else if s <= a {
        EdgeShape::StrictlyDecreasing
    } else {
        EdgeShape::InteriorMax { at: max_at() }
    }
}

/// `count` values of `s` spaced logarithmically on both sides of `1/(N+1)`,
/// always including `1/(N+1)` itself; `count` is rounded up to an odd number.
pub fn log_grid(dim: Dim, count: usize, decades: f64) -> Vec<f64> {
    let pivot = 1.0 / (dim.get() as f64 + 1.0);
    let half = count.max(1) / 2;
    let mut out = Vec::with_capacity(2 * half + 1);
    for k in (1..=half).rev() {
        out.push(pivot * 10f64.powf(-decades * k as f64 / half as f64));
    }
    out.push(pivot);
    for k in 1..=half {
        out.push(pivot * 10f64.powf(decades * k as f64 / half as f64));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dim(n: usize) -> Dim {
        Dim::new(n).unwrap()
    }

    fn q(a: i64, b: i64) -> Rational {
        Rational::ratio(a, b)
    }

    const TOL30: f64 = 1.0 / (1u64 << 30) as f64;

    #[test]
    fn l_anchor_values() {
        for n in [2, 3, 5] {
            let d = DeRham::new(dim(n));
            assert!((d.l_eval(0.0) - 0.5).abs() < TOL30);
            assert!((d.l_eval(0.5) - 0.75).abs() < TOL30);
            assert!((d.l_eval(1.0) - 1.0).abs() < TOL30);
        }
    }

    #[test]
    fn l_residual_small() {
        for n in [2, 3] {
            let d = DeRham::new(dim(n));
            for m in 0..=1024 {
                let t = m as f64 / 1024.0;
                assert!((d.l_eval(t) - d.l_rhs(t)).abs() < TOL30, "N={n} t={t}");
            }
        }
    }

    #[test]
    fn itinerary_examples() {
        let d = DeRham::new(dim(2));
        let half = d.itinerary_eval(&q(1, 2), 50).unwrap();
        assert_eq!(half.itinerary.symbols, vec![1, 1]);
        assert_eq!(half.itinerary.tail, Some(2));
        assert!(half.itinerary.hit_half);
        assert_eq!(half.value, q(3, 4));
        let zero = d.itinerary_eval(&q(0, 1), 50).unwrap();
        assert_eq!(zero.itinerary.symbols, vec![1]);
        assert_eq!(zero.value, q(1, 2));
        let one = d.itinerary_eval(&q(1, 1), 50).unwrap();
        assert!(one.itinerary.symbols.is_empty());
        assert_eq!(one.value, q(1, 1));
        assert!(d.itinerary_eval(&q(3, 2), 10).is_err());
    }

    #[test]
    fn itinerary_matches_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 3] {
            let d = DeRham::new(dim(n));
            for _ in 0..50 {
                let den: i64 = rng.gen_range(2..2000);
                let num: i64 = rng.gen_range(0..=den);
                let t = q(num, den);
                let it = d.itinerary_eval(&t, 40).unwrap();
                assert!((it.value.to_f64() - d.l_eval(t.to_f64())).abs() < TOL30);
            }
        }
    }

    #[test]
    fn grid_state_monotone() {
        let d = DeRham::new(dim(2));
        let st = DeRhamState::<Rational>::compute(&d, 6, 12);
        assert!(st.is_nondecreasing());
        assert!(st.in_range());
        assert!(st.error_bound() < 1e-3);
        let sf = DeRhamState::<f64>::compute(&d, 10, 40);
        assert!(sf.is_nondecreasing() && sf.in_range());
    }

    #[test]
    fn m_examples() {
        for n in [2, 3] {
            let d = DeRham::new(dim(n));
            let pivot = 1.0 / (n as f64 + 1.0);
            assert_eq!(d.m_eval(-1.0), 1.0);
            assert_eq!(d.m_eval(0.0), 1.0);
            assert!((d.m_eval(pivot) - 0.75).abs() < 1e-9);
            let lo = d.m_eval(pivot / 3.0);
            assert!(lo > 0.75 && lo < 1.0);
            let hi = d.m_eval(pivot * 3.0);
            assert!(hi > 0.5 && hi < 0.75);
            assert_eq!(d.m_general(0.3, -1.0, 0.0).unwrap(), d.m_eval(0.3));
            assert!((d.m_general(0.3, 0.0, -1.0).unwrap() - (1.0 - d.m_eval(0.3))).abs() < 1e-15);
            assert!(d.m_general(0.3, 1.0, 1.0).is_err());
            assert!((d.m_inverse(0.75).unwrap() - pivot).abs() < 1e-6);
            assert!(d.m_inverse(1.0).is_err());
            assert!(d.m_inverse(0.5).is_err());
        }
    }

    #[test]
    fn classification_examples() {
        let d = DeRham::new(dim(2));
        assert_eq!(classify_edge(&d, &q(-1, 1), &q(0, 1), &q(0, 1)), EdgeShape::StrictlyIncreasing);
        assert_eq!(classify_edge(&d, &q(0, 1), &q(0, 1), &q(1, 1)), EdgeShape::InteriorMax { at: 0.5 });
        match classify_edge(&d, &q(-1, 1), &q(0, 1), &q(1, 3)) {
            EdgeShape::InteriorMax { at } => assert!((at - 0.75).abs() < 1e-9),
            other => panic!("{other}"),
        }
        assert_eq!(classify_edge(&d, &q(2, 1), &q(2, 1), &q(2, 1)), EdgeShape::Constant);
        assert_eq!(classify_edge(&d, &q(0, 1), &q(-1, 1), &q(0, 1)), EdgeShape::StrictlyDecreasing);
    }

    #[test]
    fn edge_values_examples() {
        let dm = dim(2);
        let (a, b, s) = (q(-1, 1), q(2, 1), q(1, 3));
        let v = edge_values(dm, &a, &b, &s, 1);
        assert_eq!(v[1], (q(3, 1) * s.clone() + a.clone() + b.clone()) / q(5, 1));
        let c = edge_values(dm, &q(4, 1), &q(4, 1), &q(4, 1), 5);
        assert!(c.iter().all(|x| *x == q(4, 1)));
        let (m, t) = brute_max_location(dm, &q(-1, 1), &q(0, 1), &q(1, 3), 12).unwrap();
        assert_eq!((m, t), (3 << 10, 0.75));
        let (_, t) = brute_max_location(dm, &q(-1, 1), &q(0, 1), &q(-1, 5), 8).unwrap();
        assert_eq!(t, 1.0);
        assert!(brute_max_location(dm, &q(1, 1), &q(1, 1), &q(0, 1), 4).is_err());
    }

    #[test]
    fn edge_values_match_cell_extension() {
        use crate::address::{dyadic_to_path, DyadicPoint, EdgeAddress, Word};
        use crate::harmonic::HarmonicContext;
        let ctx = HarmonicContext::<Rational>::build(3).unwrap();
        let u = crate::linalg::Vector::new(vec![q(1, 1), q(-2, 3), q(5, 1), q(0, 1)]);
        let (i, j) = (2, 4);
        let vals = edge_values(ctx.dim(), &u[i - 1], &u[j - 1], &u.mean(), 6);
        let hv = ctx.harmonic_values(&u, 6).unwrap();
        let edge = EdgeAddress::new(Word::empty(ctx.dim()), i, j).unwrap();
        for (m, v) in vals.iter().enumerate() {
            let p = DyadicPoint::new(m as u64, 6, edge.clone()).unwrap();
            let (w, c) = dyadic_to_path(&p);
            assert_eq!(hv.at(&w, c).unwrap(), v);
        }
    }

    #[test]
    fn inverse_branches() {
        for n in 2..=6 {
            let r = DeRham::new(dim(n)).inverse_branch_contraction_check();
            assert!(r.passed(), "{r}");
        }
        assert_eq!(Rational::ratio(3, 5).powi(2), q(9, 25));
    }

    #[test]
    fn log_grid_contains_pivot() {
        let g = log_grid(dim(2), 10, 2.0);
        assert_eq!(g.len(), 11);
        assert_eq!(g[5], 1.0 / 3.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn single_peak_matches_classification(a in -50i64..50, b in -50i64..50, s in -50i64..50, n in 2usize..4) {
            let (a, b, s) = (q(a, 10), q(b, 10), q(s, 10));
            let d = DeRham::new(dim(n));
            let vals: Vec<f64> = edge_values(dim(n), &a, &b, &s, 10).iter().map(|x| x.to_f64()).collect();
            let shape = classify_edge(&d, &a, &b, &s);
            let up = vals.windows(2).filter(|w| w[1] > w[0]).count();
            let down = vals.windows(2).filter(|w| w[1] < w[0]).count();
            // number of sign changes of consecutive differences
            let diffs: Vec<f64> = vals.windows(2).map(|w| w[1] - w[0]).filter(|d| *d != 0.0).collect();
            let changes = diffs.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count();
            match shape {
                EdgeShape::StrictlyIncreasing => { prop_assert_eq!(down, 0); prop_assert!(s <= b); }
                EdgeShape::StrictlyDecreasing => prop_assert_eq!(up, 0),
                EdgeShape::Constant => prop_assert!(up == 0 && down == 0),
                EdgeShape::InteriorMax { .. } | EdgeShape::InteriorMin { .. } => prop_assert!(changes <= 1),
            }
            let peak_half = matches!(shape, EdgeShape::InteriorMax { at } | EdgeShape::InteriorMin { at } if at == 0.5);
            prop_assert_eq!(peak_half, a == b && s != a);
        }

        #[test]
        fn m_inverse_round_trip(x in 0.51f64..0.99) {
            let d = DeRham::new(dim(2));
            let s = d.m_inverse(x).unwrap();
            prop_assert!((d.m_eval(s) - x).abs() < 1.0 / (1u64 << 20) as f64);
        }
    }
}
