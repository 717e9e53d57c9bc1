//! Invariant simplicial cones of `T_k = P A_k P` for `N = 2, 3`, the Hilbert
//! projective metric, the dual iteration for `ρ(ω)` and the edge density at
//! arbitrary points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::address::{EdgeAddress, SymbolStream, Word};
use crate::error::{Error, Result};
use crate::fit::{log_slope, LineFit};
use crate::harmonic::HarmonicContext;
use crate::linalg::{Matrix, Vector};
use crate::report::Report;
use crate::scalar::Scalar;

/// `T_k = P A_k P`.
pub fn build_tk<T: Scalar>(ctx: &HarmonicContext<T>, k: usize) -> Result<Matrix<T>> {
    Ok(ctx.projected(k)?.clone())
}

/// Cone generated by `N` independent zero-mean vectors, tied to an edge pair.
#[derive(Clone, Debug)]
pub struct ConeFrame<T> {
    i: usize,
    j: usize,
    generators: Vec<Vector<T>>,
    /// Inverse of the generator matrix with its last row dropped.
    solver: Matrix<T>,
}

fn standard_generators(n: usize) -> Result<Vec<Vec<i64>>> {
    match n {
        2 => Ok(vec![vec![1, -3, 2], vec![3, -1, -2]]),
        3 => Ok(vec![vec![-7, 2, 2, 3], vec![-1, 4, -2, -1], vec![-3, 3, 4, -4]]),
        _ => Err(Error::Unsupported(format!("no invariant cone is known for N = {n}"))),
    }
}

/// Coefficients of `T_i a_l` and `T_j a_l` in the generators (row `l`).
pub fn tabulated_coefficients<T: Scalar>(n: usize) -> Result<[Matrix<T>; 2]> {
    let table = |den: i64, rows: &[&[i64]]| Matrix::from_fn(rows.len(), rows.len(), |r, c| T::ratio(rows[r][c], den));
    match n {
        2 => Ok([table(40, &[&[9, 5], &[3, 23]]), table(40, &[&[23, 3], &[5, 9]])]),
        3 => Ok([
            table(696, &[&[445, 7, 42], &[47, 117, 6], &[141, 3, 134]]),
            table(696, &[&[118, 158, 20], &[4, 432, 40], &[3, 237, 146]]),
        ]),
        _ => Err(Error::Unsupported(format!("no invariant cone is known for N = {n}"))),
    }
}

impl<T: Scalar> ConeFrame<T> {
    pub fn new(i: usize, j: usize, generators: Vec<Vector<T>>) -> Result<Self> {
        let n = generators.len();
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        for g in &generators {
            if g.len() != n + 1 {
                return Err(Error::SizeMismatch { expected: n + 1, found: g.len() });
            }
            if !g.sum().is_zero() {
                return Err(Error::Precondition("generators must have zero mean".into()));
            }
        }
        let top = Matrix::from_fn(n, n, |r, c| generators[c][r].clone());
        let solver = top.inverse().map_err(|_| Error::Precondition("generators are linearly dependent".into()))?;
        Ok(Self { i, j, generators, solver })
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Vector<T>] {
        &self.generators
    }

    /// Generator coordinates `c` with `x = Σ c_l a_l`; `x` must have zero mean.
    pub fn coords(&self, x: &Vector<T>) -> Result<Vector<T>> {
        let n = self.rank();
        if x.len() != n + 1 {
            return Err(Error::SizeMismatch { expected: n + 1, found: x.len() });
        }
        if !x.sum().approx_eq(&T::zero(), 1e-12) {
            return Err(Error::Precondition("vector is not in the zero-mean subspace".into()));
        }
        let top = Vector::new(x.as_slice()[..n].to_vec());
        Ok(self.solver.mul_vec_unchecked(&top))
    }

    pub fn combine(&self, c: &Vector<T>) -> Vector<T> {
        let size = self.rank() + 1;
        self.generators.iter().zip(c.iter()).fold(Vector::zeros(size), |acc, (g, w)| acc.axpy(w, g).expect("same size"))
    }

    pub fn contains(&self, x: &Vector<T>) -> Result<bool> {
        Ok(self.coords(x)?.iter().all(|c| *c >= T::zero()))
    }

    pub fn contains_interior(&self, x: &Vector<T>) -> Result<bool> {
        Ok(self.coords(x)?.iter().all(|c| *c > T::zero()))
    }

    /// `z = a_1 + … + a_N`
    pub fn anchor(&self) -> Vector<T> {
        self.combine(&Vector::constant(self.rank(), T::one()))
    }

    /// `u_1 = z`, `u_l = z + a_l`.
    pub fn interior_basis(&self) -> Vec<Vector<T>> {
        let z = self.anchor();
        std::iter::once(z.clone()).chain(self.generators[1..].iter().map(|g| z.add(g).expect("same size"))).collect()
    }

    /// Row `l` holds the generator coordinates of `T_k a_l`.
    pub fn coefficients(&self, ctx: &HarmonicContext<T>, k: usize) -> Result<Matrix<T>> {
        let tk = ctx.projected(k)?;
        let rows = self
            .generators
            .iter()
            .map(|g| Ok(self.coords(&tk.mul_vec(g)?)?.into_inner()))
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(rows)
    }
}

/// Invariant cone for the pair `(i, j)`: the `(1, 2)` generators with
/// coordinates relabelled so that `1 ↦ i`, `2 ↦ j`.
pub fn standard_cone<T: Scalar>(ctx: &HarmonicContext<T>, i: usize, j: usize) -> Result<ConeFrame<T>> {
    let n = ctx.n();
    let base = standard_generators(n)?;
    ctx.dim().check_symbol(i)?;
    ctx.dim().check_symbol(j)?;
    if i == j {
        return Err(Error::DegenerateEdge(i));
    }
    let mut perm = vec![i - 1, j - 1];
    perm.extend((0..=n).filter(|&s| s != i - 1 && s != j - 1));
    let generators = base.iter().map(|g| Vector::from_i64s(g).permuted(&perm)).collect();
    ConeFrame::new(i, j, generators)
}

/// Exact comparison of the coefficient tables with the recorded ones, plus strict positivity.
pub fn invariance_check<T: Scalar>(ctx: &HarmonicContext<T>, frame: &ConeFrame<T>) -> Result<Report> {
    let expected = tabulated_coefficients::<T>(ctx.n())?;
    let mut report = Report::new();
    let (i, j) = frame.pair();
    for (k, table) in [i, j].into_iter().zip(expected) {
        let got = frame.coefficients(ctx, k)?;
        for l in 0..frame.rank() {
            let row = got.row(l);
            let same = (0..frame.rank()).all(|m| row[m].approx_eq(&table[(l, m)], 1e-12));
            let coeffs: Vec<String> = row.iter().map(|c| c.to_text()).collect();
            report.push(
                "cone image coefficients",
                format!("N={}, T_{k} a_{} = [{}]", ctx.n(), l + 1, coeffs.join(", ")),
                same && row.iter().all(|c| *c > T::zero()),
            );
        }
    }
    Ok(report)
}

/// `max_l(x_l/y_l) / min_l(x_l/y_l)` on nonnegative coordinate vectors;
/// `None` when exactly one side has a zero coordinate.
pub fn coordinate_ratio_spread<T: Scalar>(x: &[T], y: &[T]) -> Option<T> {
    let mut hi: Option<T> = None;
    let mut lo: Option<T> = None;
    for (a, b) in x.iter().zip(y) {
        match (a.is_zero(), b.is_zero()) {
            (true, true) => continue,
            (true, false) | (false, true) => return None,
            _ => {}
        }
        let r = a.clone() / b.clone();
        if hi.as_ref().is_none_or(|h| r > *h) {
            hi = Some(r.clone());
        }
        if lo.as_ref().is_none_or(|l| r < *l) {
            lo = Some(r);
        }
    }
    match (hi, lo) {
        (Some(h), Some(l)) => Some(h / l),
        _ => None,
    }
}

fn spread_log<T: Scalar>(x: &[T], y: &[T]) -> f64 {
    coordinate_ratio_spread(x, y).map_or(f64::INFINITY, |r| r.to_f64().ln())
}

/// Hilbert projective metric of the frame's cone; infinite across faces.
pub fn hilbert_metric<T: Scalar>(frame: &ConeFrame<T>, x: &Vector<T>, y: &Vector<T>) -> Result<f64> {
    let (cx, cy) = (frame.coords(x)?, frame.coords(y)?);
    for c in [&cx, &cy] {
        if c.iter().any(|v| *v < T::zero()) {
            return Err(Error::Precondition("argument lies outside the cone".into()));
        }
        if c.is_zero() {
            return Err(Error::Precondition("argument is the cone vertex".into()));
        }
    }
    Ok(spread_log(cx.as_slice(), cy.as_slice()))
}

fn diameter<T: Scalar>(points: &[Vec<T>]) -> (f64, Option<T>) {
    let mut best = (0.0, Some(T::one()));
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            let spread = coordinate_ratio_spread(&points[a], &points[b]);
            let d = spread.as_ref().map_or(f64::INFINITY, |r| r.to_f64().ln());
            if d > best.0 {
                best = (d, spread);
            }
        }
    }
    best
}

#[derive(Clone, Debug)]
pub struct MapContraction<T> {
    pub symbol: usize,
    /// `exp(Δ_k)`, exact when the scalar is.
    pub spread: Option<T>,
    /// Hilbert diameter of `{T_k a_l}`.
    pub diameter: f64,
    /// `tanh(Δ_k / 4)`
    pub tau: f64,
    /// Largest observed `d(T_k x, T_k y) / d(x, y)`.
    pub empirical: f64,
}

#[derive(Clone, Debug)]
pub struct ContractionEstimate<T> {
    pub maps: Vec<MapContraction<T>>,
    pub tau: f64,
    /// Same quantities for the adjoint maps on the dual cone.
    pub dual_tau: f64,
    /// Hilbert diameter of the joint dual image cone.
    pub dual_diameter: f64,
}

fn rows_of<T: Scalar>(m: &Matrix<T>) -> Vec<Vec<T>> {
    (0..m.rows()).map(|r| m.row(r).into_inner()).collect()
}

fn cols_of<T: Scalar>(m: &Matrix<T>) -> Vec<Vec<T>> {
    (0..m.cols()).map(|c| m.column(c).into_inner()).collect()
}

/// Birkhoff contraction constants from the image diameters, checked against
/// `samples` random interior pairs per map.
pub fn contraction_estimate<T: Scalar>(
    ctx: &HarmonicContext<T>,
    frame: &ConeFrame<T>,
    samples: usize,
    seed: u64,
) -> Result<ContractionEstimate<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (i, j) = frame.pair();
    let mut maps = Vec::new();
    let mut dual_points = Vec::new();
    let mut dual_tau: f64 = 0.0;
    for k in [i, j] {
        let c = frame.coefficients(ctx, k)?;
        let (diameter, spread) = diameter(&rows_of(&c));
        let tau = (diameter / 4.0).tanh();
        let cf = c.to_f64();
        let ct = cf.transpose();
        let mut empirical: f64 = 0.0;
        for _ in 0..samples {
            let x = Vector::new((0..frame.rank()).map(|_| rng.gen_range(0.01..1.0)).collect());
            let y = Vector::new((0..frame.rank()).map(|_| rng.gen_range(0.01..1.0)).collect());
            let d0 = spread_log(x.as_slice(), y.as_slice());
            if d0 < 1e-9 {
                continue;
            }
            let d1 = spread_log(ct.mul_vec(&x)?.as_slice(), ct.mul_vec(&y)?.as_slice());
            empirical = empirical.max(d1 / d0);
        }
        let dual_cols = cols_of(&c);
        dual_tau = dual_tau.max((diameter_of(&dual_cols) / 4.0).tanh());
        dual_points.extend(dual_cols);
        maps.push(MapContraction { symbol: k, spread, diameter, tau, empirical });
    }
    let tau = maps.iter().map(|m| m.tau).fold(0.0, f64::max);
    Ok(ContractionEstimate { maps, tau, dual_tau, dual_diameter: diameter_of(&dual_points) })
}

fn diameter_of<T: Scalar>(points: &[Vec<T>]) -> f64 {
    diameter(points).0
}

/// Dual coordinates `φ_l = ρ(a_l)`, normalized to `ρ(z) = Σ φ_l = 1`.
#[derive(Clone, Debug)]
pub struct RhoLimit {
    pub coords: Vec<f64>,
    pub iterations: usize,
    /// `|ψ_n - ψ_{n-1}|₁` per step, from `n = 2`.
    pub differences: Vec<f64>,
    /// `exp((τ*)^{n-1}·diam) - 1`, the bound on `|ψ_n - ψ_{n+l}|₁`.
    pub bounds: Vec<f64>,
    /// Bound on `|ψ_n - ρ|₁` at the returned iterate.
    pub tail_bound: f64,
}

impl RhoLimit {
    /// Every observed step stays under the bound for the preceding index.
    pub fn certificate_holds(&self) -> bool {
        self.differences.iter().zip(&self.bounds).all(|(d, b)| *d <= b + 1e-14)
    }

    pub fn final_bound(&self) -> f64 {
        self.tail_bound
    }
}

/// Float copy of the coefficient tables and the dual constants, reused across streams.
#[derive(Clone, Debug)]
pub struct DualIteration {
    pair: (usize, usize),
    maps: [Matrix<f64>; 2],
    dual_tau: f64,
    dual_diameter: f64,
    pub max_iterations: usize,
}

impl DualIteration {
    pub fn new<T: Scalar>(ctx: &HarmonicContext<T>, frame: &ConeFrame<T>) -> Result<Self> {
        let (i, j) = frame.pair();
        let ci = frame.coefficients(ctx, i)?;
        let cj = frame.coefficients(ctx, j)?;
        let taus = [&ci, &cj].map(|c| (diameter_of(&cols_of(c)) / 4.0).tanh());
        let mut all = cols_of(&ci);
        all.extend(cols_of(&cj));
        Ok(Self {
            pair: (i, j),
            dual_tau: taus[0].max(taus[1]),
            dual_diameter: diameter_of(&all),
            maps: [ci.to_f64(), cj.to_f64()],
            max_iterations: 10_000,
        })
    }

    pub fn dual_tau(&self) -> f64 {
        self.dual_tau
    }

    fn map_for(&self, s: usize) -> Result<&Matrix<f64>> {
        if s == self.pair.0 {
            Ok(&self.maps[0])
        } else if s == self.pair.1 {
            Ok(&self.maps[1])
        } else {
            Err(Error::Precondition(format!("symbol {s} is not one of {}, {}", self.pair.0, self.pair.1)))
        }
    }

    fn bound(&self, n: usize) -> f64 {
        (self.dual_tau.powi(n as i32 - 1) * self.dual_diameter).exp_m1()
    }

    /// `ψ_n = T*_{ω_1}…T*_{ω_n} ψ` normalized, until both the step and the
    /// geometric bound fall below `tol`.
    pub fn rho(&self, omega: &SymbolStream, tol: f64, start: Option<&[f64]>) -> Result<RhoLimit> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::Precondition("tol must be positive".into()));
        }
        let r = self.maps[0].rows();
        let phi0 = match start {
            Some(s) if s.len() == r && s.iter().all(|v| *v > 0.0) => Vector::new(s.to_vec()),
            Some(_) => return Err(Error::Precondition("start must be a positive dual vector".into())),
            None => Vector::constant(r, 1.0),
        };
        let mut product = Matrix::<f64>::identity(r);
        let mut prev: Option<Vector<f64>> = None;
        let mut differences = Vec::new();
        let mut bounds = Vec::new();
        for n in 1..=self.max_iterations {
            product = product.mul(self.map_for(omega.symbol(n - 1)?)?)?;
            let top = product.entries().iter().copied().fold(0.0, f64::max);
            product = product.scale(&(1.0 / top));
            let psi = product.mul_vec(&phi0)?;
            let psi = psi.scale(&(1.0 / psi.sum()));
            if let Some(p) = &prev {
                let diff: f64 = psi.iter().zip(p.iter()).map(|(a, b)| (a - b).abs()).sum();
                differences.push(diff);
                bounds.push(self.bound(n - 1));
                let tail_bound = self.bound(n);
                if diff < tol && tail_bound < tol {
                    return Ok(RhoLimit { coords: psi.into_inner(), iterations: n, differences, bounds, tail_bound });
                }
            }
            prev = Some(psi);
        }
        Err(Error::BudgetExhausted(format!("dual iteration did not settle within {} steps", self.max_iterations)))
    }
}

/// Exact `ρ` for `ω = v·k^∞`: dual coordinates of `T*_v d_k`, normalized.
pub fn rho_eventually_constant<T: Scalar>(
    ctx: &HarmonicContext<T>,
    frame: &ConeFrame<T>,
    omega: &SymbolStream,
) -> Result<Vec<T>> {
    let k = omega.constant_tail().ok_or_else(|| Error::Precondition("stream is not eventually constant".into()))?;
    let (i, j) = frame.pair();
    let dk = ctx.d(k)?;
    let mut phi = Vector::new(frame.generators().iter().map(|g| dk.dot_unchecked(g)).collect());
    for &s in omega.head().symbols().iter().rev() {
        if s != i && s != j {
            return Err(Error::Precondition(format!("symbol {s} is not one of {i}, {j}")));
        }
        phi = frame.coefficients(ctx, s)?.mul_vec_unchecked(&phi);
    }
    if k != i && k != j {
        return Err(Error::Precondition(format!("symbol {k} is not one of {i}, {j}")));
    }
    let total = phi.sum();
    Ok(phi.iter().map(|p| p.clone() / total.clone()).collect())
}

#[derive(Clone, Debug)]
pub struct EdgeDensityLimit {
    pub value: f64,
    /// Coordinates of `P A_w u` in the interior basis.
    pub alpha: Vec<f64>,
    /// Coordinates of `P A_w e_k`, one row per `k`.
    pub beta: Vec<Vec<f64>>,
    /// `λ^{(l)} = ρ(u_l)/ρ(u_1)`
    pub lambda: Vec<f64>,
    pub rho: RhoLimit,
}

fn basis_coords<T: Scalar>(frame: &ConeFrame<T>, basis_inv: &Matrix<T>, x: &Vector<T>) -> Result<Vec<f64>> {
    Ok(basis_inv.mul_vec_unchecked(&frame.coords(x)?).to_f64().into_inner())
}

/// Density at the point `Ψ(ω)` of the edge `(w, i, j)`.
pub fn density_along<T: Scalar>(
    ctx: &HarmonicContext<T>,
    frame: &ConeFrame<T>,
    edge: &EdgeAddress,
    u: &Vector<T>,
    omega: &SymbolStream,
    tol: f64,
) -> Result<EdgeDensityLimit> {
    let dual = DualIteration::new(ctx, frame)?;
    density_with(ctx, frame, &dual, edge, u, omega, tol)
}

/// As [`density_along`] with a prepared dual iteration.
pub fn density_with<T: Scalar>(
    ctx: &HarmonicContext<T>,
    frame: &ConeFrame<T>,
    dual: &DualIteration,
    edge: &EdgeAddress,
    u: &Vector<T>,
    omega: &SymbolStream,
    tol: f64,
) -> Result<EdgeDensityLimit> {
    let (fi, fj) = frame.pair();
    if (edge.i(), edge.j()) != (fi, fj) && (edge.i(), edge.j()) != (fj, fi) {
        return Err(Error::Precondition(format!("frame is for ({fi},{fj}), edge is {edge}")));
    }
    ctx.check_vector(u)?;
    let aw = ctx.projected_word(edge.prefix())?;
    let basis = frame.interior_basis();
    // columns: generator coordinates of u_l
    let cols = basis.iter().map(|b| frame.coords(b)).collect::<Result<Vec<_>>>()?;
    let basis_inv = Matrix::from_columns(&cols)?.inverse()?;
    let alpha = basis_coords(frame, &basis_inv, &aw.mul_vec_unchecked(u))?;
    let beta = (1..=ctx.size())
        .map(|k| basis_coords(frame, &basis_inv, &aw.mul_vec_unchecked(&ctx.e(k)?)))
        .collect::<Result<Vec<_>>>()?;
    let rho = dual.rho(omega, tol, None)?;
    let rho_at = |c: &Vector<T>| -> f64 { c.iter().zip(&rho.coords).map(|(a, b)| a.to_f64() * b).sum() };
    let first = rho_at(&cols[0]);
    let lambda: Vec<f64> = cols.iter().map(|c| rho_at(c) / first).collect();
    let pair = |coef: &[f64]| -> f64 { coef.iter().zip(&lambda).map(|(a, b)| a * b).sum() };
    let num = pair(&alpha).powi(2);
    let den: f64 = beta.iter().map(|b| pair(b).powi(2)).sum();
    if den.is_nan() || den <= 0.0 {
        return Err(Error::Singular);
    }
    Ok(EdgeDensityLimit { value: num / den, alpha, beta, lambda, rho })
}

#[derive(Clone, Debug)]
pub struct ContinuityReport {
    /// `(m, max |δ(v i^∞) - δ(v j^∞)|)` over the sampled prefixes of length `m`.
    pub gaps: Vec<(usize, f64)>,
    pub fit: Option<LineFit>,
    /// Largest `|δ(v i j^∞) - δ(v j i^∞)|`.
    pub quotient_gap: f64,
    pub dual_tau: f64,
    pub report: Report,
}

impl ContinuityReport {
    pub fn rate(&self) -> Option<f64> {
        self.fit.map(|f| f.slope.exp())
    }
}

/// Oscillation of the density between streams sharing `m` symbols, and the
/// agreement of the two codings of each dyadic point.
#[allow(clippy::too_many_arguments)]
pub fn continuity_modulus<T: Scalar>(
    ctx: &HarmonicContext<T>,
    frame: &ConeFrame<T>,
    edge: &EdgeAddress,
    u: &Vector<T>,
    m_max: usize,
    prefixes: usize,
    tol: f64,
    seed: u64,
) -> Result<ContinuityReport> {
    let dual = DualIteration::new(ctx, frame)?;
    let (i, j) = (edge.i(), edge.j());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_prefix = |rng: &mut ChaCha8Rng, m: usize| -> Result<Word> {
        Word::new(ctx.dim(), (0..m).map(|_| if rng.gen::<bool>() { i } else { j }).collect())
    };
    let density = |v: &Word, tail: &[usize], k: usize| -> Result<f64> {
        let omega = SymbolStream::eventually_constant(v.extend(tail)?, k)?;
        Ok(density_with(ctx, frame, &dual, edge, u, &omega, tol)?.value)
    };
    let mut gaps = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let mut worst: f64 = 0.0;
        for _ in 0..prefixes.max(1) {
            let v = random_prefix(&mut rng, m)?;
            worst = worst.max((density(&v, &[], i)? - density(&v, &[], j)?).abs());
        }
        gaps.push((m, worst));
    }
    let mut quotient_gap: f64 = 0.0;
    for _ in 0..30 {
        let len = rng.gen_range(0..=8);
        let v = random_prefix(&mut rng, len)?;
        quotient_gap = quotient_gap.max((density(&v, &[i], j)? - density(&v, &[j], i)?).abs());
    }
    let scale = gaps.iter().map(|g| g.1).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let usable: Vec<(f64, f64)> = gaps.iter().filter(|g| g.1 > 1e-9 * scale).map(|&(m, g)| (m as f64, g)).collect();
    let fit = log_slope(&usable);
    let mut report = Report::new();
    let tag = format!("N={}, edge {edge}", ctx.n());
    report.push("oscillation is finite", format!("{tag}, m=0 gap {:.6}", gaps[0].1), gaps[0].1.is_finite());
    let rate = fit.map(|f| f.slope.exp());
    report.push(
        "oscillation decays geometrically",
        format!("{tag}, fitted rate {}", rate.map_or("n/a".into(), |r| format!("{r:.4}"))),
        rate.map_or(scale < 1e-12, |r| r < 1.0),
    );
    report.push("codings of dyadic points agree", format!("{tag}, max gap {quotient_gap:.2e}"), quotient_gap < 1e-9);
    Ok(ContinuityReport { gaps, fit, quotient_gap, dual_tau: dual.dual_tau, report })
}
