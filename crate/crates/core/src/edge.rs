//! Densities at dyadic points of an edge, the corner gap `Δ_h(w)` and the
//! quantitative estimates that make the edge profile Hölder continuous.

use rayon::prelude::*;

use crate::address::{dyadic_to_path, DyadicPoint, EdgeAddress, Word};
use crate::error::{Error, Result};
use crate::harmonic::HarmonicContext;
use crate::linalg::{Matrix, Vector};
use crate::report::Report;
use crate::scalar::{format_sig17, Scalar};

/// `ᵗA d_l` for a word matrix `A`; `(d_l, A x) = (g, x)` and `|ᵗA d_l|² = |g|²`.
/// `A` may be `A_w` or `P A_w P`: both give the same `g`.
fn dual<T: Scalar>(ctx: &HarmonicContext<T>, a: &Matrix<T>, l: usize) -> Result<Vector<T>> {
    a.tmul_vec(&ctx.d(l)?)
}

fn corner_from_matrix<T: Scalar>(ctx: &HarmonicContext<T>, a: &Matrix<T>, u: &Vector<T>, l: usize) -> Result<(T, T)> {
    let g = dual(ctx, a, l)?;
    let p = g.dot_unchecked(u);
    Ok((p.clone() * p, g.norm_sq()))
}

/// Density at `ψ_{wi}(p_j)`: `(d_j, A_{wi} u)² / |ᵗA_{wi} d_j|²`; for `i = j`
/// the corner value at `ψ_w(p_i)` from `A_w`.
pub fn delta_at_vertex<T: Scalar>(ctx: &HarmonicContext<T>, u: &Vector<T>, w: &Word, i: usize, j: usize) -> Result<T> {
    ctx.check_vector(u)?;
    let word = if i == j { w.clone() } else { w.push(i)? };
    ctx.dim().check_symbol(j)?;
    let (num, den) = corner_from_matrix(ctx, &ctx.projected_word(&word)?, u, j)?;
    Ok(num / den)
}

fn check_pair<T: Scalar>(ctx: &HarmonicContext<T>, i: usize, j: usize) -> Result<()> {
    ctx.dim().check_symbol(i)?;
    ctx.dim().check_symbol(j)?;
    if i == j {
        return Err(Error::DegenerateEdge(i));
    }
    Ok(())
}

/// Pieces of `Δ_h` at a word matrix `A`: `g_i = ᵗA d_i`, `g_j = ᵗA d_j`.
struct GapTerms<T> {
    gi: Vector<T>,
    gj: Vector<T>,
    pi: T,
    pj: T,
}

impl<T: Scalar> GapTerms<T> {
    fn new(ctx: &HarmonicContext<T>, a: &Matrix<T>, u: &Vector<T>, i: usize, j: usize) -> Result<Self> {
        let gi = dual(ctx, a, i)?;
        let gj = dual(ctx, a, j)?;
        let (pi, pj) = (gi.dot_unchecked(u), gj.dot_unchecked(u));
        Ok(Self { gi, gj, pi, pj })
    }

    /// `(d_i,Au)(d_j,Ae_k) - (d_i,Ae_k)(d_j,Au)`
    fn det(&self, k: usize) -> T {
        self.pi.clone() * self.gj[k].clone() - self.gi[k].clone() * self.pj.clone()
    }

    fn factored(&self) -> T {
        let sum = (0..self.gi.len()).fold(T::zero(), |acc, k| {
            let plus = self.pi.clone() * self.gj[k].clone() + self.gi[k].clone() * self.pj.clone();
            acc + plus * self.det(k)
        });
        sum / (self.gi.norm_sq() * self.gj.norm_sq())
    }

    fn direct(&self) -> T {
        self.pi.clone() * self.pi.clone() / self.gi.norm_sq() - self.pj.clone() * self.pj.clone() / self.gj.norm_sq()
    }
}

/// `Δ_h(w)`: corner density at `ψ_w(p_i)` minus that at `ψ_w(p_j)`, via the
/// factored sum over `k`.
pub fn delta_gap<T: Scalar>(ctx: &HarmonicContext<T>, u: &Vector<T>, w: &Word, i: usize, j: usize) -> Result<T> {
    check_pair(ctx, i, j)?;
    ctx.check_vector(u)?;
    Ok(GapTerms::new(ctx, &ctx.word_matrix(w)?, u, i, j)?.factored())
}

/// Same gap as a plain difference of the two corner values.
pub fn delta_gap_direct<T: Scalar>(ctx: &HarmonicContext<T>, u: &Vector<T>, w: &Word, i: usize, j: usize) -> Result<T> {
    check_pair(ctx, i, j)?;
    ctx.check_vector(u)?;
    Ok(GapTerms::new(ctx, &ctx.word_matrix(w)?, u, i, j)?.direct())
}

/// Symbols `i, j` of `w'` restricted to the edge letters.
fn edge_letters(w2: &Word, i: usize, j: usize) -> Result<()> {
    match w2.symbols().iter().find(|&&s| s != i && s != j) {
        Some(&s) => Err(Error::Precondition(format!("symbol {s} is not one of {i}, {j}"))),
        None => Ok(()),
    }
}

/// `(N+1)/(N+3)²`
pub fn det_factor<T: Scalar>(ctx: &HarmonicContext<T>) -> T {
    let n = ctx.n() as i64;
    T::ratio(n + 1, (n + 3) * (n + 3))
}

/// Checks that the `k`-determinant at `ww'` equals `((N+1)/(N+3)²)^{|w'|}` times
/// the one at `w`.
pub fn det_identity_check<T: Scalar>(
    ctx: &HarmonicContext<T>,
    u: &Vector<T>,
    w: &Word,
    w2: &Word,
    i: usize,
    j: usize,
    k: usize,
) -> Result<bool> {
    check_pair(ctx, i, j)?;
    ctx.dim().check_symbol(k)?;
    edge_letters(w2, i, j)?;
    ctx.check_vector(u)?;
    let base = GapTerms::new(ctx, &ctx.word_matrix(w)?, u, i, j)?.det(k - 1);
    let top = GapTerms::new(ctx, &ctx.word_matrix(&w.concat(w2)?)?, u, i, j)?.det(k - 1);
    let want = det_factor(ctx).powi(w2.len() as u32) * base;
    Ok(top.approx_eq(&want, 1e-12))
}

/// Visits every `w' ∈ {i,j}^n`, `n <= depth`, with the matrix `A_{w w'}`.
fn for_each_edge_word<T: Scalar>(
    ctx: &HarmonicContext<T>,
    start: Matrix<T>,
    i: usize,
    j: usize,
    depth: usize,
    mut f: impl FnMut(&[usize], &Matrix<T>) -> Result<()>,
) -> Result<()> {
    let (ai, aj) = (ctx.extension(i)?.clone(), ctx.extension(j)?.clone());
    let mut stack = vec![(Vec::<usize>::new(), start)];
    while let Some((path, a)) = stack.pop() {
        f(&path, &a)?;
        if path.len() < depth {
            for (sym, m) in [(j, &aj), (i, &ai)] {
                let mut next = path.clone();
                next.push(sym);
                stack.push((next, m.mul_unchecked(&a)));
            }
        }
    }
    Ok(())
}

/// Determinant identity for every `w' ∈ {i,j}^n`, `n <= depth`, and every `k`.
pub fn det_identity_exhaustive<T: Scalar>(
    ctx: &HarmonicContext<T>,
    u: &Vector<T>,
    w: &Word,
    i: usize,
    j: usize,
    depth: usize,
) -> Result<Report> {
    check_pair(ctx, i, j)?;
    ctx.check_vector(u)?;
    let start = ctx.word_matrix(w)?;
    let base = GapTerms::new(ctx, &start, u, i, j)?;
    let factor = det_factor(ctx);
    let mut failures = vec![0usize; depth + 1];
    let mut counts = vec![0usize; depth + 1];
    for_each_edge_word(ctx, start, i, j, depth, |path, a| {
        let terms = GapTerms::new(ctx, a, u, i, j)?;
        let scale = factor.powi(path.len() as u32);
        counts[path.len()] += 1;
        if (0..ctx.size()).any(|k| !terms.det(k).approx_eq(&(scale.clone() * base.det(k)), 1e-12)) {
            failures[path.len()] += 1;
        }
        Ok(())
    })?;
    let mut report = Report::new();
    for n in 0..=depth {
        report.push(
            "determinant identity",
            format!("N={}, w={}, ({i},{j}), n={n}, {} words", ctx.n(), w, counts[n]),
            failures[n] == 0,
        );
    }
    Ok(report)
}

/// `(N+1)·((N+1)/(N+3))^{2n}·N^{-n}`, the squared lower bound for `|ᵗA_{w'} d_l|`.
pub fn dual_norm_floor<T: Scalar>(ctx: &HarmonicContext<T>, n: usize) -> T {
    let big_n = ctx.n() as i64;
    T::from_i64(big_n + 1) * T::ratio((big_n + 1) * (big_n + 1), (big_n + 3) * (big_n + 3) * big_n).powi(n as u32)
}

/// `|ᵗA_{w'} d_l|² >= dual_norm_floor(|w'|)` for `w'` over two letters containing `l`.
pub fn dual_norm_lower_bound_check<T: Scalar>(
    ctx: &HarmonicContext<T>,
    w2: &Word,
    i: usize,
    j: usize,
    l: usize,
) -> Result<bool> {
    check_pair(ctx, i, j)?;
    edge_letters(w2, i, j)?;
    if l != i && l != j {
        return Err(Error::Precondition(format!("l = {l} is not an edge letter")));
    }
    let g = dual(ctx, &ctx.word_matrix(w2)?, l)?;
    Ok(g.norm_sq() >= dual_norm_floor(ctx, w2.len()))
}

/// Lower bound for every `w' ∈ {i,j}^n`, `n <= depth`, and both letters.
pub fn dual_norm_exhaustive<T: Scalar>(ctx: &HarmonicContext<T>, i: usize, j: usize, depth: usize) -> Result<Report> {
    check_pair(ctx, i, j)?;
    let floors: Vec<T> = (0..=depth).map(|n| dual_norm_floor(ctx, n)).collect();
    let mut worst: Vec<Option<T>> = vec![None; depth + 1];
    let (di, dj) = (ctx.d(i)?, ctx.d(j)?);
    for_each_edge_word(ctx, Matrix::identity(ctx.size()), i, j, depth, |path, a| {
        for d in [&di, &dj] {
            let slack = a.tmul_vec(d)?.norm_sq() / floors[path.len()].clone();
            let entry = &mut worst[path.len()];
            if entry.as_ref().is_none_or(|w| slack < *w) {
                *entry = Some(slack);
            }
        }
        Ok(())
    })?;
    let mut report = Report::new();
    for (n, slack) in worst.into_iter().enumerate() {
        let slack = slack.expect("every level visited");
        report.push(
            "dual norm lower bound",
            format!("N={}, ({i},{j}), n={n}, min ratio {:.6}", ctx.n(), slack.to_f64()),
            slack >= T::one(),
        );
    }
    Ok(report)
}

/// Leading principal minors of `(N+3)² A_k ᵗA_k - I` with row `k` moved first.
pub fn psd_minors<T: Scalar>(ctx: &HarmonicContext<T>, k: usize) -> Result<Vec<T>> {
    let a = ctx.extension(k)?;
    let n3 = T::from_i64(ctx.n() as i64 + 3);
    let b = a.mul(&a.transpose())?.scale(&(n3.clone() * n3)).sub(&Matrix::identity(ctx.size()))?;
    let mut perm: Vec<usize> = (0..ctx.size()).collect();
    perm.swap(0, k - 1);
    let b = b.permuted(&perm);
    (1..=ctx.size()).map(|m| b.leading_minor(m)).collect()
}

/// Closed forms `N²+6N+8` and `N³+8N²+20N+12` of the two nonzero minors.
pub fn psd_minor_formulas(n: usize) -> (i64, i64) {
    let n = n as i64;
    (n * n + 6 * n + 8, n * n * n + 8 * n * n + 20 * n + 12)
}

/// `|ᵗA_{ww'} d_l|² >= (N+3)^{-2|w|} |ᵗA_{w'} d_l|²`.
pub fn dual_norm_floor_check<T: Scalar>(ctx: &HarmonicContext<T>, w: &Word, w2: &Word, l: usize) -> Result<bool> {
    let lhs = dual(ctx, &ctx.word_matrix(&w.concat(w2)?)?, l)?.norm_sq();
    let rhs = dual(ctx, &ctx.word_matrix(w2)?, l)?.norm_sq();
    let shrink = T::ratio(1, (ctx.n() as i64 + 3).pow(2)).powi(w.len() as u32);
    Ok(lhs >= shrink * rhs)
}

/// Minor signs of the shifted Gram matrix for `A_k`, plus the induced norm
/// floor on the sample triples `(w, w', l)`.
pub fn psd_floor_check<T: Scalar>(
    ctx: &HarmonicContext<T>,
    k: usize,
    samples: &[(Word, Word, usize)],
) -> Result<Report> {
    let minors = psd_minors(ctx, k)?;
    let (m1, m2) = psd_minor_formulas(ctx.n());
    let mut report = Report::new();
    let tag = format!("N={}, k={k}", ctx.n());
    report.push("first minor", format!("{tag}, {}", minors[0]), minors[0] == T::from_i64(m1) && m1 > 0);
    report.push("second minor", format!("{tag}, {}", minors[1]), minors[1] == T::from_i64(m2) && m2 > 0);
    report.push("remaining minors vanish", tag.clone(), minors[2..].iter().all(|m| m.is_zero()));
    for (w, w2, l) in samples {
        report.push("norm floor", format!("{tag}, w={w}, w'={w2}, l={l}"), dual_norm_floor_check(ctx, w, w2, *l)?);
    }
    Ok(report)
}

/// Constant of the geometric bound on `|Δ_h(ww')|`, with square roots replaced
/// by lower bounds so that any bound it certifies holds for the true constant.
#[derive(Clone, Debug)]
pub struct HolderConstant<T> {
    /// `2(N+3)^{4|w|}·|A_w u|·Σ_k terms[k]`
    pub c: T,
    /// `|A_w e_k|·|(d_i,A_w u)(d_j,A_w e_k) - (d_i,A_w e_k)(d_j,A_w u)|`
    pub terms: Vec<T>,
    pub norm_u: T,
}

impl<T: Scalar> HolderConstant<T> {
    /// `(c/(N+1))·(N/(N+1))^n`
    pub fn bound(&self, n_dim: usize, n: usize) -> T {
        let big_n = n_dim as i64;
        self.c.clone() / T::from_i64(big_n + 1) * T::ratio(big_n, big_n + 1).powi(n as u32)
    }
}

pub fn holder_constant<T: Scalar>(
    ctx: &HarmonicContext<T>,
    u: &Vector<T>,
    w: &Word,
    i: usize,
    j: usize,
) -> Result<HolderConstant<T>> {
    check_pair(ctx, i, j)?;
    ctx.check_vector(u)?;
    let a = ctx.word_matrix(w)?;
    let terms_src = GapTerms::new(ctx, &a, u, i, j)?;
    let au = a.mul_vec_unchecked(u);
    let norm_u = au.norm_sq().sqrt_floor();
    let terms: Vec<T> = (0..ctx.size())
        .map(|k| {
            let det = terms_src.det(k).abs();
            if det.is_zero() {
                return T::zero();
            }
            a.column(k).norm_sq().sqrt_floor() * det
        })
        .collect();
    let sum = terms.iter().cloned().fold(T::zero(), |x, y| x + y);
    let growth = T::from_i64(ctx.n() as i64 + 3).powi(4 * w.len() as u32);
    Ok(HolderConstant { c: T::from_i64(2) * growth * norm_u.clone() * sum, terms, norm_u })
}

/// Largest `|Δ_h(ww')|` over `w' ∈ {i,j}^n`, for each `n <= n_max`.
pub fn worst_gaps<T: Scalar>(
    ctx: &HarmonicContext<T>,
    u: &Vector<T>,
    w: &Word,
    i: usize,
    j: usize,
    n_max: usize,
) -> Result<Vec<T>> {
    if n_max > 20 {
        return Err(Error::Precondition(format!("exhaustive depth {n_max} exceeds 20")));
    }
    let mut worst = vec![T::zero(); n_max + 1];
    for_each_edge_word(ctx, ctx.word_matrix(w)?, i, j, n_max, |path, a| {
        let gap = GapTerms::new(ctx, a, u, i, j)?.factored().abs();
        let n = path.len();
        if gap > worst[n] {
            worst[n] = gap;
        }
        Ok(())
    })?;
    Ok(worst)
}

/// `|Δ_h(ww')| <= (c/(N+1))(N/(N+1))^n` for every `w' ∈ {i,j}^n`, `n <= n_max`.
pub fn holder_bound_check<T: Scalar>(
    ctx: &HarmonicContext<T>,
    u: &Vector<T>,
    w: &Word,
    i: usize,
    j: usize,
    n_max: usize,
) -> Result<(HolderConstant<T>, Report)> {
    if n_max > 12 {
        return Err(Error::Precondition(format!("exhaustive depth {n_max} exceeds 12")));
    }
    let constant = holder_constant(ctx, u, w, i, j)?;
    let worst = worst_gaps(ctx, u, w, i, j, n_max)?;
    let mut report = Report::new();
    for (n, gap) in worst.iter().enumerate() {
        let bound = constant.bound(ctx.n(), n);
        report.push(
            "gap bound",
            format!("N={}, w={}, ({i},{j}), n={n}, max {:.3e} <= {:.3e}", ctx.n(), w, gap.to_f64(), bound.to_f64()),
            *gap <= bound,
        );
    }
    Ok((constant, report))
}

/// One profile sample at `t = t_num / t_den`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeDensitySample<T> {
    pub t_num: u64,
    pub t_den: u64,
    pub density: T,
    /// `(d_c, A u)²`
    pub numerator: T,
    /// `|ᵗA d_c|²`
    pub denominator: T,
}

impl<T: Scalar> EdgeDensitySample<T> {
    pub fn t(&self) -> f64 {
        self.t_num as f64 / self.t_den as f64
    }
}

/// Density at the dyadic point `p` through its path.
pub fn density_at<T: Scalar>(ctx: &HarmonicContext<T>, u: &Vector<T>, p: &DyadicPoint) -> Result<EdgeDensitySample<T>> {
    let (path, corner) = dyadic_to_path(p);
    let word = p.edge().prefix().concat(&path)?;
    let (num, den) = corner_from_matrix(ctx, &ctx.projected_word(&word)?, u, corner)?;
    Ok(EdgeDensitySample {
        t_num: p.numer(),
        t_den: 1u64 << p.exponent(),
        density: num.clone() / den.clone(),
        numerator: num,
        denominator: den,
    })
}

/// Densities at all `m/2^depth` on `edge`, sorted by `t`.
pub fn edge_profile<T: Scalar>(
    ctx: &HarmonicContext<T>,
    u: &Vector<T>,
    edge: &EdgeAddress,
    depth: u32,
) -> Result<Vec<EdgeDensitySample<T>>> {
    let limit = if T::EXACT { 12 } else { 20 };
    if depth > limit {
        return Err(Error::Precondition(format!("profile depth {depth} exceeds {limit}")));
    }
    ctx.check_vector(u)?;
    if edge.dim() != ctx.dim() {
        return Err(Error::DimensionMismatch { expected: ctx.n(), found: edge.dim().get() });
    }
    let (i, j) = (edge.i(), edge.j());
    let den = 1u64 << depth;
    let root = ctx.projected_word(edge.prefix())?;
    let sample = |t_num: u64, a: &Matrix<T>, c: usize| -> Result<EdgeDensitySample<T>> {
        let (num, d) = corner_from_matrix(ctx, a, u, c)?;
        Ok(EdgeDensitySample { t_num, t_den: den, density: num.clone() / d.clone(), numerator: num, denominator: d })
    };
    let mut out = vec![sample(0, &root, i)?, sample(den, &root, j)?];
    if depth > 0 {
        // subedge `[k, k+1]·2^{level-depth}` carries T_{w·path}; its midpoint is ψ_{path i}(p_j)
        let ai = ctx.projected(i)?;
        let aj = ctx.projected(j)?;
        let roots: Vec<(u64, u32, Matrix<T>)> = vec![(0, 0, root)];
        let mut frontier = roots;
        let split = if depth > 6 { 4.min(depth - 1) } else { 0 };
        for _ in 0..split {
            let mut next = Vec::with_capacity(frontier.len() * 2);
            for (k, level, a) in frontier {
                let left = ai.mul_unchecked(&a);
                out.push(sample((2 * k + 1) << (depth - level - 1), &left, j)?);
                next.push((2 * k, level + 1, left));
                next.push((2 * k + 1, level + 1, aj.mul_unchecked(&a)));
            }
            frontier = next;
        }
        let rest: Vec<Vec<EdgeDensitySample<T>>> = frontier
            .into_par_iter()
            .map(|(k, level, a)| {
                let mut acc = Vec::new();
                let mut stack = vec![(k, level, a)];
                while let Some((k, level, a)) = stack.pop() {
                    let left = ai.mul_unchecked(&a);
                    acc.push(sample((2 * k + 1) << (depth - level - 1), &left, j)?);
                    if level + 1 < depth {
                        stack.push((2 * k + 1, level + 1, aj.mul_unchecked(&a)));
                        stack.push((2 * k, level + 1, left));
                    }
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        out.extend(rest.into_iter().flatten());
    }
    out.sort_by_key(|s| s.t_num);
    Ok(out)
}

/// Profile as CSV; exact scalars add a `density_exact` column.
pub fn profile_csv<T: Scalar>(samples: &[EdgeDensitySample<T>]) -> String {
    let mut out =
        String::from(if T::EXACT { "t_num,t_den,t,density,density_exact\n" } else { "t_num,t_den,t,density\n" });
    for s in samples {
        let (num, den) = reduce(s.t_num, s.t_den);
        out.push_str(&format!("{num},{den},{},{}", format_sig17(s.t()), format_sig17(s.density.to_f64())));
        if T::EXACT {
            out.push(',');
            out.push_str(&s.density.to_text());
        }
        out.push('\n');
    }
    out
}

fn reduce(mut num: u64, mut den: u64) -> (u64, u64) {
    if num == 0 {
        return (0, 1);
    }
    while num.is_multiple_of(2) && den > 1 {
        num /= 2;
        den /= 2;
    }
    (num, den)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolderReport {
    pub exponent: f64,
    /// `sup |f(t) - f(t')| / |t - t'|^θ` over all sample pairs.
    pub sup_quotient: f64,
    /// `(t, t')` attaining the sup.
    pub worst_pair: (f64, f64),
    pub points: usize,
}

/// `log₂(1 + 1/N)`
pub fn holder_exponent(n: usize) -> f64 {
    (1.0 + 1.0 / n as f64).log2()
}

/// Exhaustive pair scan of the sup quotient.
pub fn empirical_holder<T: Scalar>(profile: &[EdgeDensitySample<T>], exponent: f64) -> HolderReport {
    let pts: Vec<(f64, f64)> = profile.iter().map(|s| (s.t(), s.density.to_f64())).collect();
    let (sup, pair) = (0..pts.len())
        .into_par_iter()
        .map(|a| {
            let (ta, fa) = pts[a];
            let mut best = (0.0f64, (ta, ta));
            for &(tb, fb) in &pts[a + 1..] {
                let q = (fa - fb).abs() / (tb - ta).abs().powf(exponent);
                if q > best.0 {
                    best = (q, (ta, tb));
                }
            }
            best
        })
        .reduce(|| (0.0, (0.0, 0.0)), |x, y| if y.0 > x.0 { y } else { x });
    HolderReport { exponent, sup_quotient: sup, worst_pair: pair, points: pts.len() }
}

/// Neighbouring dyadics at every depth `<= depth` differ by exactly the gap
/// of the subedge between them, which stays under the geometric bound.
pub fn chain_check<T: Scalar>(
    ctx: &HarmonicContext<T>,
    u: &Vector<T>,
    edge: &EdgeAddress,
    depth: u32,
) -> Result<Report> {
    let (i, j) = (edge.i(), edge.j());
    let constant = holder_constant(ctx, u, edge.prefix(), i, j)?;
    let mut report = Report::new();
    let profile = edge_profile(ctx, u, edge, depth)?;
    let tol = 1e-12;
    for level in 0..=depth {
        let stride = 1usize << (depth - level);
        let mut equal = true;
        let mut bounded = true;
        let bound = constant.bound(ctx.n(), level as usize);
        for k in 0..(1u64 << level) {
            let lo = &profile[k as usize * stride].density;
            let hi = &profile[(k as usize + 1) * stride].density;
            let symbols: Vec<usize> = (0..level).rev().map(|b| if (k >> b) & 1 == 0 { i } else { j }).collect();
            let sub = edge.prefix().extend(&symbols)?;
            let gap = delta_gap(ctx, u, &sub, i, j)?;
            equal &= (lo.clone() - hi.clone()).approx_eq(&gap, tol);
            bounded &= gap.abs() <= bound;
        }
        let tag = format!("N={}, edge {edge}, level {level}", ctx.n());
        report.push("neighbour difference is the subedge gap", tag.clone(), equal);
        report.push("subedge gap under bound", tag, bounded);
    }
    Ok(report)
}
