//! Energy measures of harmonic functions on cells, the Kusuoka measure, their
//! ratios, corner limits and the search for cells where the ratio vanishes.
//!
//! For `B = P A_w` and zero-mean `x`, `Q_0(x, x) = (N+1)|x|²`, so
//! `ν_h(K_w) = 2·scale^{|w|}·(N+1)|B u|²` and `ν(K_w) = 2·scale^{|w|}·(N+1)‖B‖_F²`.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::address::Word;
use crate::derham::DeRham;
use crate::error::{Error, Result};
use crate::fit::{log_slope, LineFit};
use crate::harmonic::HarmonicContext;
use crate::linalg::{Matrix, Vector};
use crate::report::Report;
use crate::scalar::Scalar;

/// Standard normal sample by Box-Muller.
fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureKind {
    Energy,
    Kusuoka,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellMeasureValue<T> {
    pub word: Word,
    pub value: T,
    pub kind: MeasureKind,
}

fn cell_prefactor<T: Scalar>(ctx: &HarmonicContext<T>, len: usize) -> T {
    T::from_i64(2 * ctx.size() as i64) * ctx.scale().powi(len as u32)
}

/// `ν_h(K_w) = 2·scale^{|w|}·Q_0(A_w u, A_w u)`.
pub fn cell_energy<T: Scalar>(ctx: &HarmonicContext<T>, u: &Vector<T>, w: &Word) -> Result<T> {
    let x = ctx.apply_projected_word(w, u)?;
    Ok(cell_prefactor(ctx, w.len()) * x.norm_sq())
}

/// Same value through the full product `A_w` and `Q_0`.
pub fn cell_energy_direct<T: Scalar>(ctx: &HarmonicContext<T>, u: &Vector<T>, w: &Word) -> Result<T> {
    let x = ctx.apply_word(w, u)?;
    Ok(T::from_i64(2) * ctx.scale().powi(w.len() as u32) * ctx.q0(&x, &x)?)
}

/// `ν(K_w) = Σ_k ν_{h_k}(K_w)`.
pub fn kusuoka_cell<T: Scalar>(ctx: &HarmonicContext<T>, w: &Word) -> Result<T> {
    let b = ctx.projected_word(w)?;
    Ok(cell_prefactor(ctx, w.len()) * b.frobenius_sq())
}

pub fn energy_value<T: Scalar>(ctx: &HarmonicContext<T>, u: &Vector<T>, w: &Word) -> Result<CellMeasureValue<T>> {
    Ok(CellMeasureValue { word: w.clone(), value: cell_energy(ctx, u, w)?, kind: MeasureKind::Energy })
}

pub fn kusuoka_value<T: Scalar>(ctx: &HarmonicContext<T>, w: &Word) -> Result<CellMeasureValue<T>> {
    Ok(CellMeasureValue { word: w.clone(), value: kusuoka_cell(ctx, w)?, kind: MeasureKind::Kusuoka })
}

/// `ν_h(K_w) / ν(K_w)`.
pub fn cell_ratio<T: Scalar>(ctx: &HarmonicContext<T>, u: &Vector<T>, w: &Word) -> Result<T> {
    ctx.check_vector(u)?;
    let b = ctx.projected_word(w)?;
    Ok(ratio_from_projected(&b, u))
}

fn ratio_from_projected<T: Scalar>(b: &Matrix<T>, u: &Vector<T>) -> T {
    b.mul_vec_unchecked(u).norm_sq() / b.frobenius_sq()
}

/// One row of the per-cell table.
#[derive(Clone, Debug)]
pub struct CellRow<T> {
    pub word: Word,
    pub nu_h: T,
    pub nu: T,
    pub ratio: T,
}

/// Energy, Kusuoka measure and ratio on every cell of level `m`, in word order.
pub fn cell_rows<T: Scalar>(ctx: &HarmonicContext<T>, u: &Vector<T>, m: usize) -> Result<Vec<CellRow<T>>> {
    ctx.check_vector(u)?;
    let pre = cell_prefactor(ctx, m);
    Word::all_of_length(ctx.dim(), m)
        .into_par_iter()
        .map(|w| {
            let b = ctx.projected_word(&w)?;
            let num = b.mul_vec_unchecked(u).norm_sq();
            let den = b.frobenius_sq();
            Ok(CellRow { nu_h: pre.clone() * num.clone(), nu: pre.clone() * den.clone(), ratio: num / den, word: w })
        })
        .collect()
}

/// Closed-form limit along `w i^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioLimit<T> {
    /// `(d_i, A_w u)² / |ᵗA_w d_i|²`
    pub value: T,
    /// `(d_i, A_w u)`
    pub pairing: T,
    /// `|ᵗA_w d_i|²`
    pub dual_norm_sq: T,
    /// `lim scale^n ν_h(K_{w i^n}) = (2/N)·scale^{|w|}·(d_i, A_w u)²`
    pub energy_limit: T,
}

pub fn corner_limit<T: Scalar>(ctx: &HarmonicContext<T>, u: &Vector<T>, w: &Word, i: usize) -> Result<RatioLimit<T>> {
    ctx.check_vector(u)?;
    let di = ctx.d(i)?;
    let b = ctx.projected_word(w)?;
    let pairing = di.dot_unchecked(&b.mul_vec_unchecked(u));
    let dual_norm_sq = b.tmul_vec(&di)?.norm_sq();
    let energy_limit = T::from_i64(2) / T::from_i64(ctx.n() as i64)
        * ctx.scale().powi(w.len() as u32)
        * pairing.clone()
        * pairing.clone();
    Ok(RatioLimit {
        value: pairing.clone() * pairing.clone() / dual_norm_sq.clone(),
        pairing,
        dual_norm_sq,
        energy_limit,
    })
}

#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub n: usize,
    /// `scale^n·ν_h(K_{w i^n})`
    pub scaled_energy: f64,
    pub energy_error: f64,
    /// `|scale^n P A_i^n A_w u - (d_i, A_w u) P v_i|`
    pub vector_error: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub energy_limit: f64,
    pub ratio_limit: f64,
    /// Fitted per-step factor of `vector_error`.
    pub vector_error_ratio: Option<f64>,
    /// Fitted per-step factor of `energy_error`.
    pub energy_error_ratio: Option<f64>,
    pub scaled_inf: f64,
    pub scaled_sup: f64,
}

impl ConvergenceReport {
    pub fn final_energy_gap(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.energy_error)
    }

    pub fn final_ratio_gap(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| (r.ratio - self.ratio_limit).abs())
    }
}

fn fitted_factor(points: &[(f64, f64)], floor: f64) -> Option<f64> {
    let usable: Vec<(f64, f64)> = points.iter().copied().skip(1).take_while(|p| p.1 > floor).collect();
    log_slope(&usable).map(|f: LineFit| f.slope.exp())
}

/// Float iteration along `w i^n` for `n <= n_max`, compared with the closed forms.
pub fn convergence_rate_check<T: Scalar>(
    ctx: &HarmonicContext<T>,
    u: &Vector<T>,
    w: &Word,
    i: usize,
    n_max: usize,
) -> Result<ConvergenceReport> {
    if n_max > 60 {
        return Err(Error::Precondition(format!("n_max {n_max} exceeds 60")));
    }
    let limit = corner_limit(ctx, u, w, i)?;
    let fctx = HarmonicContext::<f64>::for_dim(ctx.dim());
    let scale = fctx.scale().to_owned();
    let size = fctx.size() as f64;
    let ti = fctx.projected(i)?.clone();
    let mut b = ctx.projected_word(w)?.to_f64();
    let mut y = b.mul_vec_unchecked(&u.to_f64());
    let pairing = limit.pairing.to_f64();
    let vec_limit = fctx.project(&fctx.v(i)?)?.scale(&pairing);
    let energy_limit = limit.energy_limit.to_f64();
    let base = 2.0 * size * scale.powi(w.len() as i32);

    let mut rows = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let sn = scale.powi(n as i32);
        let energy = base * scale.powi(n as i32) * y.norm_sq();
        let scaled_energy = sn * energy;
        let vector_error = y.scale(&sn).sub(&vec_limit)?.norm_sq().sqrt();
        let ratio = y.norm_sq() / b.frobenius_sq();
        rows.push(ConvergenceRow {
            n,
            scaled_energy,
            energy_error: (scaled_energy - energy_limit).abs(),
            vector_error,
            ratio,
        });
        y = ti.mul_vec_unchecked(&y);
        b = ti.mul_unchecked(&b);
    }
    let scale0 = rows[0].scaled_energy.max(energy_limit).max(f64::MIN_POSITIVE);
    let vscale = rows[0].vector_error.max(vec_limit.norm_sq().sqrt()).max(f64::MIN_POSITIVE);
    let epts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.energy_error)).collect();
    let vpts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.vector_error)).collect();
    let scaled: Vec<f64> = rows.iter().map(|r| r.scaled_energy).collect();
    Ok(ConvergenceReport {
        energy_error_ratio: fitted_factor(&epts, 1e-11 * scale0),
        vector_error_ratio: fitted_factor(&vpts, 1e-11 * vscale),
        scaled_inf: scaled.iter().copied().fold(f64::INFINITY, f64::min),
        scaled_sup: scaled.iter().copied().fold(0.0, f64::max),
        energy_limit,
        ratio_limit: limit.value.to_f64(),
        rows,
    })
}

/// Checks `Σ_a ν_{h_a}(K_w) = ν(K_w)` for an orthonormal basis `{u_a}`.
pub fn onb_decomposition_check<T: Scalar>(
    ctx: &HarmonicContext<T>,
    basis: &[Vector<T>],
    words: &[Word],
    tol: f64,
) -> Result<Report> {
    if basis.len() != ctx.size() {
        return Err(Error::SizeMismatch { expected: ctx.size(), found: basis.len() });
    }
    for (a, x) in basis.iter().enumerate() {
        ctx.check_vector(x)?;
        for (b, y) in basis.iter().enumerate() {
            let want = if a == b { T::one() } else { T::zero() };
            if !x.dot_unchecked(y).approx_eq(&want, tol) {
                return Err(Error::Precondition("basis is not orthonormal".into()));
            }
        }
    }
    let mut report = Report::new();
    for w in words {
        let total = basis.iter().try_fold(T::zero(), |acc, x| Ok::<T, Error>(acc + cell_energy_direct(ctx, x, w)?))?;
        let nu = kusuoka_cell(ctx, w)?;
        let pass = if T::EXACT {
            total == nu
        } else {
            (total - nu.clone()).to_f64().abs() <= tol * nu.to_f64().abs().max(1.0)
        };
        report.push("orthonormal decomposition", format!("N={}, w={}", ctx.n(), w), pass);
    }
    Ok(report)
}

/// Orthonormal basis of `R^size` from Gram-Schmidt on Gaussian vectors.
pub fn random_orthonormal_basis<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Vec<Vector<f64>> {
    loop {
        let mut basis: Vec<Vector<f64>> = Vec::with_capacity(size);
        for _ in 0..size {
            let mut v = Vector::new((0..size).map(|_| standard_normal(rng)).collect());
            for _ in 0..2 {
                for b in &basis {
                    let c = v.dot_unchecked(b);
                    v = v.axpy(&-c, b).expect("same length");
                }
            }
            let norm = v.norm_sq().sqrt();
            if norm < 1e-6 {
                break;
            }
            basis.push(v.scale(&(1.0 / norm)));
        }
        if basis.len() == size {
            return basis;
        }
    }
}

#[derive(Clone, Debug)]
pub struct DecayRow {
    pub n: usize,
    pub ratio: f64,
    /// `ν_h(K_{w i j^n})`
    pub energy: f64,
}

#[derive(Clone, Debug)]
pub struct TailDecay<T> {
    /// Ratio at `w i j^n` for the largest `n` requested.
    pub ratio: T,
    pub rows: Vec<DecayRow>,
    pub ratio_fit: Option<LineFit>,
    pub energy_fit: Option<LineFit>,
    /// `-2 log(N+1)`
    pub predicted_ratio_slope: f64,
    /// `-log((N+1)(N+3))`
    pub predicted_energy_slope: f64,
}

fn equal_values<T: Scalar>(a: &T, b: &T, scale: f64) -> bool {
    if T::EXACT {
        a == b
    } else {
        (a.to_f64() - b.to_f64()).abs() <= 1e-12 * scale.max(1.0)
    }
}

/// Ratios along `w i j^n` when `(A_w u)_i = (A_w u)_j`; the log-slope fit uses
/// the rows with `n` in `fit`.
pub fn symmetric_tail_ratio<T: Scalar>(
    ctx: &HarmonicContext<T>,
    u: &Vector<T>,
    w: &Word,
    i: usize,
    j: usize,
    n: usize,
    fit: std::ops::RangeInclusive<usize>,
) -> Result<TailDecay<T>> {
    ctx.dim().check_symbol(i)?;
    ctx.dim().check_symbol(j)?;
    if i == j {
        return Err(Error::DegenerateEdge(i));
    }
    let uw = ctx.apply_word(w, u)?;
    let mag = uw.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
    if !equal_values(&uw[i - 1], &uw[j - 1], mag) {
        return Err(Error::Precondition(format!("(A_w u)_{i} != (A_w u)_{j}")));
    }
    let tj = ctx.projected(j)?;
    let mut b = ctx.projected_word(&w.push(i)?)?;
    let mut pre = cell_prefactor(ctx, w.len() + 1);
    let mut rows = Vec::with_capacity(n + 1);
    let mut last = T::zero();
    for step in 0..=n {
        let num = b.mul_vec_unchecked(u).norm_sq();
        let ratio = num.clone() / b.frobenius_sq();
        rows.push(DecayRow { n: step, ratio: ratio.to_f64(), energy: (pre.clone() * num).to_f64() });
        last = ratio;
        if step < n {
            b = tj.mul_unchecked(&b);
            pre = pre * ctx.scale().clone();
        }
    }
    let pick = |f: &dyn Fn(&DecayRow) -> f64| -> Vec<(f64, f64)> {
        rows.iter().filter(|r| fit.contains(&r.n)).map(|r| (r.n as f64, f(r))).collect()
    };
    let n1 = ctx.n() as f64 + 1.0;
    Ok(TailDecay {
        ratio: last,
        ratio_fit: log_slope(&pick(&|r| r.ratio)),
        energy_fit: log_slope(&pick(&|r| r.energy)),
        predicted_ratio_slope: -2.0 * n1.ln(),
        predicted_energy_slope: -(n1 * (n1 + 2.0)).ln(),
        rows,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct VanishOptions {
    /// Longest witness word (relative to `w`).
    pub depth_cap: usize,
    /// Largest dyadic exponent tried for the maximum location.
    pub dyadic_cap: u32,
}

impl Default for VanishOptions {
    fn default() -> Self {
        Self { depth_cap: 40, dyadic_cap: 20 }
    }
}

/// How the witness was produced.
#[derive(Clone, Debug, PartialEq)]
pub enum VanishStrategy {
    /// The ratio on `K_w` itself is already small.
    Immediate,
    /// `(A_w u)_i = (A_w u)_j`: tail `i j^n`.
    SymmetricTail { i: usize, j: usize, n: usize },
    /// `N = 2` with the middle value equal to the mean: tail `j^n`.
    MiddleTail { j: usize, n: usize },
    /// Perturb the mean so the edge maximum sits on `m/2^e`, then follow the
    /// symmetric tail of the perturbed function.
    Perturbed {
        /// Second smallest value below the mean (`false`) or second largest above it (`true`).
        mirrored: bool,
        i: usize,
        j: usize,
        l: usize,
        s: f64,
        s_prime: f64,
        dyadic: (u64, u32),
        hat_word: Word,
        tail: usize,
        /// `(√r_{h'} + (N+1)|s'-s|·|P A_w^{-1} e_l|)²`
        certificate: f64,
    },
}

impl fmt::Display for VanishStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VanishStrategy::Immediate => write!(f, "immediate"),
            VanishStrategy::SymmetricTail { i, j, n } => write!(f, "symmetric tail {i} {j}^{n}"),
            VanishStrategy::MiddleTail { j, n } => write!(f, "middle tail {j}^{n}"),
            VanishStrategy::Perturbed { mirrored, i, j, l, s, s_prime, dyadic, hat_word, tail, certificate } => write!(
                f,
                "perturbed (l={l}{}, s={s}, s'={s_prime}, t={}/2^{}, cell {hat_word}, tail {i} {j}^{tail}, certificate {certificate:.3e})",
                if *mirrored { ", mirrored" } else { "" },
                dyadic.0,
                dyadic.1
            ),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VanishingWitness<T> {
    /// Word `w''` relative to the starting cell.
    pub word: Word,
    /// Ratio on `K_{w w''}`, computed in the context's scalar type.
    pub ratio: T,
    pub strategy: VanishStrategy,
}

/// Walks `start · tail…` computing the ratio of `u` at each step until it
/// drops below `eps`; returns the number of tail symbols used.
fn descend<T: Scalar>(
    ctx: &HarmonicContext<T>,
    start: &Word,
    head: &[usize],
    repeat: usize,
    u: &Vector<T>,
    eps: f64,
    cap: usize,
) -> Result<Option<(usize, T)>> {
    let mut b = ctx.projected_word(&start.extend(head)?)?;
    let t = ctx.projected(repeat)?;
    for n in 0..=cap.saturating_sub(head.len()) {
        let r = ratio_from_projected(&b, u);
        if r.to_f64() < eps {
            return Ok(Some((n, r)));
        }
        b = t.mul_unchecked(&b);
    }
    Ok(None)
}

/// A word `w''` with `ν_h(K_{w w''}) / ν(K_{w w''}) < eps`.
pub fn find_vanishing_cell<T: Scalar>(
    ctx: &HarmonicContext<T>,
    u: &Vector<T>,
    w: &Word,
    eps: f64,
    opts: VanishOptions,
) -> Result<VanishingWitness<T>> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    let here = cell_ratio(ctx, u, w)?;
    if here.to_f64() < eps {
        return Ok(VanishingWitness { word: Word::empty(ctx.dim()), ratio: here, strategy: VanishStrategy::Immediate });
    }
    let uw = ctx.apply_word(w, u)?;
    let size = ctx.size();
    let mag = uw.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max);

    for i in 1..=size {
        for j in i + 1..=size {
            if equal_values(&uw[i - 1], &uw[j - 1], mag) {
                if let Some((n, ratio)) = descend(ctx, w, &[i], j, u, eps, opts.depth_cap)? {
                    let word = Word::new(ctx.dim(), std::iter::once(i).chain(std::iter::repeat_n(j, n)).collect())?;
                    return Ok(VanishingWitness { word, ratio, strategy: VanishStrategy::SymmetricTail { i, j, n } });
                }
            }
        }
    }

    let mut order: Vec<usize> = (1..=size).collect();
    order.sort_by(|&a, &b| uw[a - 1].partial_cmp(&uw[b - 1]).expect("comparable"));
    let s = uw.mean();
    let beta = |k: usize| &uw[order[k] - 1];
    let (mirrored, i, j) = if *beta(1) < s {
        (false, order[0], order[1])
    } else if *beta(size - 2) > s {
        (true, order[size - 1], order[size - 2])
    } else {
        let j = order[1];
        return match descend(ctx, w, &[], j, u, eps, opts.depth_cap)? {
            Some((n, ratio)) => Ok(VanishingWitness {
                word: Word::repeat(ctx.dim(), j, n)?,
                ratio,
                strategy: VanishStrategy::MiddleTail { j, n },
            }),
            None => Err(Error::BudgetExhausted(format!("tail {j}^n did not reach {eps}"))),
        };
    };
    perturbed_search(ctx, u, w, eps, opts, mirrored, i, j)
}

#[allow(clippy::too_many_arguments)]
fn perturbed_search<T: Scalar>(
    ctx: &HarmonicContext<T>,
    u: &Vector<T>,
    w: &Word,
    eps: f64,
    opts: VanishOptions,
    mirrored: bool,
    i: usize,
    j: usize,
) -> Result<VanishingWitness<T>> {
    let fctx = HarmonicContext::<f64>::for_dim(ctx.dim());
    let derham = DeRham::new(ctx.dim());
    let sign = if mirrored { -1.0 } else { 1.0 };
    let uf = u.to_f64().scale(&sign);
    let uw = fctx.apply_word(w, &uf)?;
    let size = fctx.size();
    let n1 = size as f64;
    let s = uw.mean();
    let (ai, aj) = (uw[i - 1], uw[j - 1]);
    let t_star = derham.m_general(s, ai, aj)?;
    let l = (1..=size).find(|&k| k != i && k != j).expect("N >= 2 leaves a third symbol");
    // |P A_w^{-1} e_l| bounds the ratio of the correction term
    let aw_inv = fctx.word_matrix(w)?.inverse()?;
    let hat_norm = fctx.project(&aw_inv.mul_vec_unchecked(&fctx.e(l)?))?.norm_sq().sqrt();
    let hat_top = aw_inv.mul_vec_unchecked(&fctx.e(l)?);
    let mut best = f64::INFINITY;

    for e in 1..=opts.dyadic_cap {
        if e as usize > opts.depth_cap {
            break;
        }
        let scale = (1u64 << e) as f64;
        // nearest odd numerator, kept inside (1/2, 1)
        let mut m = (t_star * scale).round() as u64;
        if m.is_multiple_of(2) {
            m = if (t_star * scale) >= m as f64 { m + 1 } else { m.saturating_sub(1) };
        }
        let lo_m = (1u64 << (e - 1)) + 1;
        let hi_m = (1u64 << e) - 1;
        if lo_m > hi_m {
            continue;
        }
        let m = m.clamp(lo_m, hi_m);
        let target = m as f64 / scale;
        let Ok(sigma) = derham.m_inverse(target) else { continue };
        let s_prime = aj + sigma * (aj - ai);
        let shift = n1 * (s_prime - s);
        let u_prime = uf.axpy(&shift, &hat_top)?;
        // subedge [(m-1)/2^e, (m+1)/2^e] is cell k = (m-1)/2 at level e-1
        let k = (m - 1) / 2;
        let hat_word: Vec<usize> = (0..e - 1).rev().map(|bit| if (k >> bit) & 1 == 0 { i } else { j }).collect();
        let base = w.extend(&hat_word)?;
        let room = opts.depth_cap.saturating_sub(hat_word.len() + 1);
        let mut b = fctx.projected_word(&base.push(i)?)?;
        let tj = fctx.projected(j)?;
        let mut prev_h = f64::INFINITY;
        for tail in 0..=room {
            let r_h = ratio_from_projected(&b, &uf);
            best = best.min(r_h);
            if r_h < eps {
                let mut symbols = hat_word.clone();
                symbols.push(i);
                symbols.extend(std::iter::repeat_n(j, tail));
                let word = Word::new(ctx.dim(), symbols)?;
                let ratio = cell_ratio(ctx, u, &w.concat(&word)?)?;
                if ratio.to_f64() < eps {
                    let r_hp = ratio_from_projected(&b, &u_prime);
                    let certificate = (r_hp.sqrt() + n1 * (s_prime - s).abs() * hat_norm).powi(2);
                    return Ok(VanishingWitness {
                        word,
                        ratio,
                        strategy: VanishStrategy::Perturbed {
                            mirrored,
                            i,
                            j,
                            l,
                            s: sign * s,
                            s_prime: sign * s_prime,
                            dyadic: (m, e),
                            hat_word: Word::new(ctx.dim(), hat_word)?,
                            tail,
                            certificate,
                        },
                    });
                }
            }
            // the perturbed tail has bottomed out; a finer dyadic is needed
            let r_hp = ratio_from_projected(&b, &u_prime);
            if r_hp >= prev_h && tail > 2 {
                break;
            }
            prev_h = r_hp;
            b = tj.mul_unchecked(&b);
        }
    }
    Err(Error::BudgetExhausted(format!("best ratio {best:.3e} did not reach {eps}")))
}

/// Minimum and maximum ratio per level over all words of length `<= depth`
/// below `w`, for several boundary vectors at once.
#[derive(Clone, Debug)]
pub struct LevelScan {
    /// `min_level[v][n]`: minimum over `W_n` for vector `v`.
    pub min_level: Vec<Vec<f64>>,
    pub max_level: Vec<Vec<f64>>,
    /// Overall minimum and one word attaining it, per vector.
    pub argmin: Vec<(f64, Word)>,
}

struct ScanAcc {
    min_level: Vec<Vec<f64>>,
    max_level: Vec<Vec<f64>>,
    argmin: Vec<(f64, Vec<usize>)>,
}

impl ScanAcc {
    fn new(vectors: usize, depth: usize) -> Self {
        Self {
            min_level: vec![vec![f64::INFINITY; depth + 1]; vectors],
            max_level: vec![vec![0.0; depth + 1]; vectors],
            argmin: vec![(f64::INFINITY, Vec::new()); vectors],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for v in 0..self.min_level.len() {
            for n in 0..self.min_level[v].len() {
                self.min_level[v][n] = self.min_level[v][n].min(other.min_level[v][n]);
                self.max_level[v][n] = self.max_level[v][n].max(other.max_level[v][n]);
            }
            if other.argmin[v].0 < self.argmin[v].0 {
                self.argmin[v] = other.argmin[v].clone();
            }
        }
        self
    }
}

struct Scanner<'a> {
    size: usize,
    maps: &'a [Vec<f64>],
    vectors: &'a [Vec<f64>],
    depth: usize,
}

impl Scanner<'_> {
    /// `b` is `P A_w` row-major; `path` the word below the start cell.
    fn visit(&self, b: &[f64], path: &mut Vec<usize>, acc: &mut ScanAcc) {
        let s = self.size;
        let level = path.len();
        let den: f64 = b.iter().map(|x| x * x).sum();
        for (v, u) in self.vectors.iter().enumerate() {
            let mut num = 0.0;
            for r in 0..s {
                let x: f64 = (0..s).map(|c| b[r * s + c] * u[c]).sum();
                num += x * x;
            }
            let ratio = num / den;
            if ratio < acc.min_level[v][level] {
                acc.min_level[v][level] = ratio;
            }
            if ratio > acc.max_level[v][level] {
                acc.max_level[v][level] = ratio;
            }
            if ratio < acc.argmin[v].0 {
                acc.argmin[v] = (ratio, path.clone());
            }
        }
        if level == self.depth {
            return;
        }
        let mut child = vec![0.0; s * s];
        for (k, t) in self.maps.iter().enumerate() {
            for r in 0..s {
                for c in 0..s {
                    child[r * s + c] = (0..s).map(|x| t[r * s + x] * b[x * s + c]).sum();
                }
            }
            path.push(k + 1);
            self.visit(&child, path, acc);
            path.pop();
        }
    }
}

/// Exhaustive float scan of the ratio over all words of length `<= depth`.
pub fn scan_levels<T: Scalar>(
    ctx: &HarmonicContext<T>,
    w: &Word,
    vectors: &[Vector<T>],
    depth: usize,
) -> Result<LevelScan> {
    for u in vectors {
        ctx.check_vector(u)?;
    }
    let fctx = HarmonicContext::<f64>::for_dim(ctx.dim());
    let maps: Vec<Vec<f64>> =
        (1..=fctx.size()).map(|k| fctx.projected(k).map(|m| m.entries().to_vec())).collect::<Result<_>>()?;
    let vecs: Vec<Vec<f64>> = vectors.iter().map(|u| u.to_f64().into_inner()).collect();
    let root = ctx.projected_word(w)?.to_f64();
    let scanner = Scanner { size: fctx.size(), maps: &maps, vectors: &vecs, depth };

    let mut top = ScanAcc::new(vecs.len(), depth);
    let mut path = Vec::new();
    let root_only = Scanner { depth: 0, ..scanner };
    root_only.visit(root.entries(), &mut path, &mut top);
    let scanner = Scanner { depth, ..root_only };
    let acc = if depth == 0 {
        top
    } else {
        let children: Vec<ScanAcc> = (1..=fctx.size())
            .into_par_iter()
            .map(|k| {
                let child = fctx.projected(k).expect("valid symbol").mul_unchecked(&root);
                let mut acc = ScanAcc::new(vecs.len(), depth);
                let mut path = vec![k];
                scanner.visit(child.entries(), &mut path, &mut acc);
                acc
            })
            .collect();
        children.into_iter().fold(top, ScanAcc::merge)
    };
    let argmin = acc.argmin.into_iter().map(|(r, p)| Ok((r, Word::new(ctx.dim(), p)?))).collect::<Result<Vec<_>>>()?;
    Ok(LevelScan { min_level: acc.min_level, max_level: acc.max_level, argmin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::Zero;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type Ctx = HarmonicContext<Rational>;

    fn q(a: i64, b: i64) -> Rational {
        Rational::ratio(a, b)
    }

    fn word(ctx: &Ctx, s: &str) -> Word {
        Word::parse(ctx.dim(), s).unwrap()
    }

    #[test]
    fn energy_examples() {
        let ctx = Ctx::build(2).unwrap();
        let e1 = ctx.e(1).unwrap();
        let empty = Word::empty(ctx.dim());
        assert_eq!(cell_energy(&ctx, &e1, &empty).unwrap(), q(4, 1));
        assert_eq!(cell_energy(&ctx, &e1, &word(&ctx, "1")).unwrap(), q(12, 5));
        assert_eq!(cell_energy_direct(&ctx, &e1, &word(&ctx, "1")).unwrap(), q(12, 5));
        assert!(cell_energy(&ctx, &ctx.ones(), &word(&ctx, "213")).unwrap().is_zero());
        assert_eq!(kusuoka_cell(&ctx, &empty).unwrap(), q(12, 1));
        assert_eq!(kusuoka_cell(&ctx, &word(&ctx, "1")).unwrap(), q(4, 1));
        assert_eq!(cell_ratio(&ctx, &e1, &empty).unwrap(), q(1, 3));
        for n in 2..=5 {
            let c = Ctx::build(n).unwrap();
            let want = Rational::from_i64(2 * n as i64 * (n as i64 + 1));
            assert_eq!(kusuoka_cell(&c, &Word::empty(c.dim())).unwrap(), want);
        }
    }

    #[test]
    fn corner_limit_examples() {
        let ctx = Ctx::build(2).unwrap();
        let e1 = ctx.e(1).unwrap();
        let empty = Word::empty(ctx.dim());
        let lim = corner_limit(&ctx, &e1, &empty, 1).unwrap();
        assert_eq!(lim.value, q(2, 3));
        assert_eq!(lim.pairing, q(-2, 1));
        assert_eq!(lim.dual_norm_sq, q(6, 1));
        assert!(corner_limit(&ctx, &ctx.ones(), &empty, 1).unwrap().value.is_zero());
        let w = word(&ctx, "2311");
        let total = (1..=3).fold(q(0, 1), |acc, k| acc + corner_limit(&ctx, &ctx.e(k).unwrap(), &w, 2).unwrap().value);
        assert_eq!(total, q(1, 1));
        let report = convergence_rate_check(&ctx, &e1, &empty, 1, 40).unwrap();
        assert!(report.final_ratio_gap() < 1e-8);
    }

    #[test]
    fn convergence_rates() {
        let ctx = Ctx::build(2).unwrap();
        let u = Vector::new(vec![q(1, 1), q(-2, 1), q(3, 7)]);
        let w = word(&ctx, "21");
        let r = convergence_rate_check(&ctx, &u, &w, 3, 40).unwrap();
        assert!(r.final_energy_gap() < 1e-8 * r.energy_limit.max(1.0));
        let vr = r.vector_error_ratio.unwrap();
        assert!((vr - 1.0 / 3.0).abs() < 0.05 / 3.0, "{vr}");
        let er = r.energy_error_ratio.unwrap();
        assert!((er - 1.0 / 9.0).abs() < 0.05 / 9.0, "{er}");
        assert!(r.scaled_inf > 0.0 && r.scaled_sup < f64::INFINITY);
        assert!(convergence_rate_check(&ctx, &u, &w, 3, 61).is_err());
    }

    #[test]
    fn onb_standard_and_rotated() {
        let ctx = Ctx::build(2).unwrap();
        let basis: Vec<_> = (1..=3).map(|k| ctx.e(k).unwrap()).collect();
        let words = Word::all_of_length(ctx.dim(), 3);
        assert!(onb_decomposition_check(&ctx, &basis, &words, 0.0).unwrap().passed());
        let fctx = HarmonicContext::<f64>::build(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rot = random_orthonormal_basis(3, &mut rng);
        let words: Vec<Word> = (0..=8).map(|m| Word::repeat(fctx.dim(), 1 + m % 3, m).unwrap()).collect();
        assert!(onb_decomposition_check(&fctx, &rot, &words, 1e-10).unwrap().passed());
        let bad = vec![rot[0].clone(), rot[0].clone(), rot[2].clone()];
        assert!(onb_decomposition_check(&fctx, &bad, &words, 1e-10).is_err());
    }

    #[test]
    fn symmetric_tail_slopes() {
        let ctx = HarmonicContext::<f64>::build(2).unwrap();
        let u = Vector::new(vec![0.3, 0.3, -1.7]);
        let w = Word::empty(ctx.dim());
        let d = symmetric_tail_ratio(&ctx, &u, &w, 1, 2, 30, 10..=30).unwrap();
        let slope = d.ratio_fit.unwrap().slope;
        assert!((slope / d.predicted_ratio_slope - 1.0).abs() < 0.05, "{slope}");
        let es = d.energy_fit.unwrap().slope;
        assert!((es / d.predicted_energy_slope - 1.0).abs() < 0.05, "{es}");
        let c = symmetric_tail_ratio(&ctx, &ctx.ones(), &w, 1, 2, 5, 0..=5).unwrap();
        assert!(c.rows.iter().all(|r| r.ratio < 1e-25));
        assert!(symmetric_tail_ratio(&ctx, &Vector::new(vec![0.0, 1.0, 5.0]), &w, 1, 2, 5, 0..=5).is_err());
    }

    #[test]
    fn vanishing_symmetric_and_constant() {
        let ctx = Ctx::build(2).unwrap();
        let w = Word::empty(ctx.dim());
        let u = Vector::new(vec![q(1, 1), q(1, 1), q(-3, 1)]);
        let v = find_vanishing_cell(&ctx, &u, &w, 1e-6, VanishOptions::default()).unwrap();
        assert!(v.ratio.to_f64() < 1e-6);
        match v.strategy {
            VanishStrategy::SymmetricTail { i: 1, j: 2, n } => assert!(n <= 13),
            other => panic!("{other:?}"),
        }
        let c = find_vanishing_cell(&ctx, &ctx.ones(), &w, 1e-6, VanishOptions::default()).unwrap();
        assert!(c.word.is_empty());
        assert_eq!(c.strategy, VanishStrategy::Immediate);
    }

    #[test]
    fn vanishing_middle_case() {
        let ctx = Ctx::build(2).unwrap();
        let w = Word::empty(ctx.dim());
        // values 0 < 1 < 2 with mean 1
        let u = Vector::new(vec![q(2, 1), q(0, 1), q(1, 1)]);
        let v = find_vanishing_cell(&ctx, &u, &w, 1e-8, VanishOptions::default()).unwrap();
        assert!(matches!(v.strategy, VanishStrategy::MiddleTail { j: 3, .. }));
        assert!(v.ratio.to_f64() < 1e-8);
    }

    #[test]
    fn vanishing_general_case() {
        let ctx = Ctx::build(2).unwrap();
        let w = Word::empty(ctx.dim());
        let u = Vector::new(vec![q(0, 1), q(1, 1), q(5, 1)]);
        let v = find_vanishing_cell(&ctx, &u, &w, 1e-3, VanishOptions::default()).unwrap();
        assert!(v.ratio.to_f64() < 1e-3);
        assert_eq!(cell_ratio(&ctx, &u, &v.word).unwrap(), v.ratio);
        assert!(matches!(v.strategy, VanishStrategy::Perturbed { .. }));
        let scan = scan_levels(&ctx, &w, &[u], 8).unwrap();
        assert!(scan.argmin[0].0 < 1e-3);
    }

    #[test]
    fn scan_levels_monotone_min() {
        let ctx = Ctx::build(2).unwrap();
        let w = word(&ctx, "3");
        let us = vec![Vector::new(vec![q(0, 1), q(1, 1), q(5, 1)]), ctx.e(1).unwrap()];
        let scan = scan_levels(&ctx, &w, &us, 7).unwrap();
        for (v, u) in us.iter().enumerate() {
            assert!(scan.min_level[v].windows(2).all(|p| p[1] <= p[0] + 1e-15));
            assert!(scan.max_level[v].iter().all(|&m| m > 0.0));
            let (r, wd) = &scan.argmin[v];
            let direct = cell_ratio(&ctx, u, &w.concat(wd).unwrap()).unwrap().to_f64();
            assert!((direct - r).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn additivity_and_restriction(
            n in 2usize..5,
            raw in proptest::collection::vec(-9i64..9, 5),
            w in proptest::collection::vec(0usize..8, 0..5),
            w2 in proptest::collection::vec(0usize..8, 0..3),
        ) {
            let ctx = Ctx::build(n).unwrap();
            let u = Vector::from_i64s(&raw[..n + 1]);
            let w = Word::new(ctx.dim(), w.iter().map(|s| 1 + s % (n + 1)).collect()).unwrap();
            let w2 = Word::new(ctx.dim(), w2.iter().map(|s| 1 + s % (n + 1)).collect()).unwrap();
            let parent = cell_energy(&ctx, &u, &w).unwrap();
            let kids = (1..=n + 1).fold(Rational::from_i64(0), |acc, k| acc + cell_energy(&ctx, &u, &w.push(k).unwrap()).unwrap());
            prop_assert_eq!(&parent, &kids);
            let nu = kusuoka_cell(&ctx, &w).unwrap();
            let nu_kids = (1..=n + 1).fold(Rational::from_i64(0), |acc, k| acc + kusuoka_cell(&ctx, &w.push(k).unwrap()).unwrap());
            prop_assert_eq!(&nu, &nu_kids);
            prop_assert_eq!(cell_energy(&ctx, &u, &w).unwrap(), cell_energy_direct(&ctx, &u, &w).unwrap());
            // ν_f(K_{w w2}) = scale^{|w|} ν_{ψ_w^* f}(K_{w2})
            let lhs = cell_energy(&ctx, &u, &w.concat(&w2).unwrap()).unwrap();
            let rhs = ctx.scale().powi(w.len() as u32) * cell_energy(&ctx, &ctx.apply_word(&w, &u).unwrap(), &w2).unwrap();
            prop_assert_eq!(lhs, rhs);
            let total = (1..=n + 1).fold(Rational::from_i64(0), |acc, k| acc + cell_ratio(&ctx, &ctx.e(k).unwrap(), &w).unwrap());
            prop_assert_eq!(total, Rational::from_i64(1));
            let bound = ctx.project(&u).unwrap().norm_sq();
            prop_assert!(cell_ratio(&ctx, &u, &w).unwrap() <= bound);
            prop_assert!(nu > Rational::from_i64(0));
        }
    }
}
