//! Harmonic extension on the gasket: `D`, `Q_0`, the matrices `A_k`, word
//! products and the projection onto zero-mean vectors.

use std::collections::BTreeMap;

use crate::address::{lattice_key, Dim, Word};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::report::Report;
use crate::scalar::{Rational, Scalar};

/// Everything derived from the dimension `N`, built once and shared.
#[derive(Clone, Debug)]
pub struct HarmonicContext<T> {
    dim: Dim,
    laplacian: Matrix<T>,
    extension: Vec<Matrix<T>>,
    projected: Vec<Matrix<T>>,
    projector: Matrix<T>,
    scale: T,
}

/// Entry `(r, c)` of `A_k`, all indices 0-based.
fn extension_entry<T: Scalar>(n: usize, k: usize, r: usize, c: usize) -> T {
    let denom = (n + 3) as i64;
    if r == k {
        return if c == k { T::one() } else { T::zero() };
    }
    if c == k || r == c {
        T::ratio(2, denom)
    } else {
        T::ratio(1, denom)
    }
}

impl<T: Scalar> HarmonicContext<T> {
    pub fn build(n: usize) -> Result<Self> {
        Ok(Self::for_dim(Dim::new(n)?))
    }

    pub fn for_dim(dim: Dim) -> Self {
        let n = dim.get();
        let size = dim.symbols();
        let laplacian = Matrix::from_fn(size, size, |r, c| if r == c { T::from_i64(-(n as i64)) } else { T::one() });
        let extension: Vec<Matrix<T>> =
            (0..size).map(|k| Matrix::from_fn(size, size, |r, c| extension_entry(n, k, r, c))).collect();
        let inv = T::ratio(1, size as i64);
        let projector = Matrix::from_fn(size, size, |r, c| if r == c { T::one() - inv.clone() } else { -inv.clone() });
        let scale = T::ratio((n + 3) as i64, (n + 1) as i64);
        let mut ctx = Self { dim, laplacian, extension, projected: Vec::new(), projector, scale };
        ctx.refresh_projected();
        ctx
    }

    fn refresh_projected(&mut self) {
        self.projected =
            self.extension.iter().map(|a| self.projector.mul_unchecked(a).mul_unchecked(&self.projector)).collect();
    }

    /// Copy of the context with one entry of `A_k` shifted by `delta`.
    /// Only meant for negative controls of the verification suite.
    #[doc(hidden)]
    pub fn perturbed(&self, k: usize, r: usize, c: usize, delta: T) -> Result<Self> {
        let k = self.dim.check_symbol(k)?;
        let size = self.size();
        if r >= size || c >= size {
            return Err(Error::SizeMismatch { expected: size, found: r.max(c) + 1 });
        }
        let mut out = self.clone();
        let entry = &mut out.extension[k - 1][(r, c)];
        *entry = entry.clone() + delta;
        out.refresh_projected();
        Ok(out)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    /// `N`
    pub fn n(&self) -> usize {
        self.dim.get()
    }

    /// `N + 1`
    pub fn size(&self) -> usize {
        self.dim.symbols()
    }

    /// `D`: `-N` on the diagonal, `1` elsewhere.
    pub fn laplacian(&self) -> &Matrix<T> {
        &self.laplacian
    }

    /// `A_k` for a 1-based symbol `k`.
    pub fn extension(&self, k: usize) -> Result<&Matrix<T>> {
        Ok(&self.extension[self.dim.check_symbol(k)? - 1])
    }

    /// `T_k = P A_k P`.
    pub fn projected(&self, k: usize) -> Result<&Matrix<T>> {
        Ok(&self.projected[self.dim.check_symbol(k)? - 1])
    }

    pub fn projector(&self) -> &Matrix<T> {
        &self.projector
    }

    /// `(N+3)/(N+1)`
    pub fn scale(&self) -> &T {
        &self.scale
    }

    /// `e_k`
    pub fn e(&self, k: usize) -> Result<Vector<T>> {
        Ok(Vector::basis(self.size(), self.dim.check_symbol(k)? - 1))
    }

    pub fn ones(&self) -> Vector<T> {
        Vector::constant(self.size(), T::one())
    }

    /// `d_k`, the `k`th column of `D`.
    pub fn d(&self, k: usize) -> Result<Vector<T>> {
        Ok(self.laplacian.column(self.dim.check_symbol(k)? - 1))
    }

    /// `v_k = (1 - e_k)/N`.
    pub fn v(&self, k: usize) -> Result<Vector<T>> {
        let e = self.e(k)?;
        Ok(self.ones().sub(&e)?.scale(&T::ratio(1, self.n() as i64)))
    }

    pub fn check_vector(&self, u: &Vector<T>) -> Result<()> {
        if u.len() != self.size() {
            return Err(Error::SizeMismatch { expected: self.size(), found: u.len() });
        }
        Ok(())
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        if w.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.n(), found: w.dim().get() });
        }
        Ok(())
    }

    /// `A_w = A_{w_m} ⋯ A_{w_1}`, with `A_∅ = I`.
    pub fn word_matrix(&self, w: &Word) -> Result<Matrix<T>> {
        self.check_word(w)?;
        Ok(self.fold_word(Matrix::identity(self.size()), w, &self.extension))
    }

    /// `P A_w`, built as `T_{w_m} ⋯ T_{w_1} P`; avoids the cancellation a
    /// float product of `A_w` suffers on near-constant vectors.
    pub fn projected_word(&self, w: &Word) -> Result<Matrix<T>> {
        self.check_word(w)?;
        Ok(self.fold_word(self.projector.clone(), w, &self.projected))
    }

    fn fold_word(&self, start: Matrix<T>, w: &Word, factors: &[Matrix<T>]) -> Matrix<T> {
        w.symbols().iter().fold(start, |acc, &k| factors[k - 1].mul_unchecked(&acc))
    }

    /// `A_w u`, applying `A_{w_1}` first.
    pub fn apply_word(&self, w: &Word, u: &Vector<T>) -> Result<Vector<T>> {
        self.check_word(w)?;
        self.check_vector(u)?;
        Ok(w.symbols().iter().fold(u.clone(), |acc, &k| self.extension[k - 1].mul_vec_unchecked(&acc)))
    }

    /// `P A_w u` through the projected maps.
    pub fn apply_projected_word(&self, w: &Word, u: &Vector<T>) -> Result<Vector<T>> {
        self.check_word(w)?;
        let start = self.project(u)?;
        Ok(w.symbols().iter().fold(start, |acc, &k| self.projected[k - 1].mul_vec_unchecked(&acc)))
    }

    /// `Q_0(u, v) = (u, -D v)`.
    pub fn q0(&self, u: &Vector<T>, v: &Vector<T>) -> Result<T> {
        self.check_vector(u)?;
        self.check_vector(v)?;
        Ok(-u.dot_unchecked(&self.laplacian.mul_vec_unchecked(v)))
    }

    /// `Q_0` by the half-sum of pair differences.
    pub fn q0_pairs(&self, u: &Vector<T>, v: &Vector<T>) -> Result<T> {
        self.check_vector(u)?;
        self.check_vector(v)?;
        let mut acc = T::zero();
        for a in 0..self.size() {
            for b in a + 1..self.size() {
                acc = acc + (u[a].clone() - u[b].clone()) * (v[a].clone() - v[b].clone());
            }
        }
        Ok(acc)
    }

    /// `Q_0(x, x)` for zero-mean `x`, i.e. `(N+1)|x|²`.
    pub fn q0_zero_mean(&self, x: &Vector<T>) -> T {
        T::from_i64(self.size() as i64) * x.norm_sq()
    }

    /// `P u = u - mean(u)·1`.
    pub fn project(&self, u: &Vector<T>) -> Result<Vector<T>> {
        self.check_vector(u)?;
        let mean = u.mean();
        Ok(u.map(|x| x.clone() - mean.clone()))
    }

    /// Integral basis `e_a - e_b` of `E_k = {u : u_k = 0, (u, 1) = 0}`, with `a`
    /// the smallest index other than `k`.
    pub fn e_k_basis(&self, k: usize) -> Result<Vec<Vector<T>>> {
        let k = self.dim.check_symbol(k)?;
        let others: Vec<usize> = (1..=self.size()).filter(|&a| a != k).collect();
        let a = others[0];
        others[1..].iter().map(|&b| self.e(a)?.sub(&self.e(b)?)).collect()
    }

    /// The eigen-relations of each `A_k` and its transpose.
    pub fn eigen_check(&self) -> Report {
        let mut report = Report::new();
        let n = self.n();
        let top = T::ratio((n + 1) as i64, (n + 3) as i64);
        let low = T::ratio(1, (n + 3) as i64);
        let ones = self.ones();
        for k in 1..=self.size() {
            let detail = format!("N={n}, k={k}");
            let a = &self.extension[k - 1];
            let at = a.transpose();
            let ek = self.e(k).expect("valid symbol");
            let dk = self.d(k).expect("valid symbol");
            let co = ones.sub(&ek).expect("same length");
            let basis = self.e_k_basis(k).expect("valid symbol");

            report.push("A_k fixes 1", &detail, a.mul_vec_unchecked(&ones) == ones);
            report.push("A_k on 1-e_k", &detail, a.mul_vec_unchecked(&co) == co.scale(&top));
            let in_ek = basis.iter().all(|b| b[k - 1].is_zero() && b.sum().is_zero());
            report.push("E_k basis membership", &detail, in_ek && basis.len() == n - 1);
            report.push("A_k on E_k", &detail, basis.iter().all(|b| a.mul_vec_unchecked(b) == b.scale(&low)));
            report.push("tA_k fixes e_k", &detail, at.mul_vec_unchecked(&ek) == ek);
            report.push("tA_k on d_k", &detail, at.mul_vec_unchecked(&dk) == dk.scale(&top));
            report.push("tA_k on E_k", &detail, basis.iter().all(|b| at.mul_vec_unchecked(b) == b.scale(&low)));
        }
        report
    }

    /// Remaining closed-form identities: row sums, pairings of `d` and `v`,
    /// the transposed action on `d_i` and the antisymmetry between corners.
    pub fn transition_check(&self) -> Report {
        let mut report = Report::new();
        let n = self.n();
        let size = self.size();
        let top = T::ratio((n + 1) as i64, (n + 3) as i64);
        let inv = T::ratio(1, (n + 3) as i64);
        let ones = self.ones();
        for k in 1..=size {
            let detail = format!("N={n}, k={k}");
            let a = &self.extension[k - 1];
            report.push("row sums", &detail, a.mul_vec_unchecked(&ones) == ones);
            let dk = self.d(k).expect("valid symbol");
            let vk = self.v(k).expect("valid symbol");
            report.push("(d_k, v_k) = 1", &detail, dk.dot_unchecked(&vk).is_one());
            let qv = self.q0(&vk, &vk).expect("same length");
            report.push("Q_0(v_k, v_k) = 1/N", &detail, qv == T::ratio(1, n as i64));
        }
        for i in 1..=size {
            for j in 1..=size {
                if i == j {
                    continue;
                }
                let detail = format!("N={n}, i={i}, j={j}");
                let ai_t = self.extension[i - 1].transpose();
                let aj_t = self.extension[j - 1].transpose();
                let di = self.d(i).expect("valid symbol");
                let dj = self.d(j).expect("valid symbol");
                let lhs = ai_t.mul_vec_unchecked(&dj);
                let rhs = aj_t.mul_vec_unchecked(&di).neg();
                report.push("tA_i d_j = -tA_j d_i", &detail, lhs == rhs);
                report.push("tA_i d_i", &detail, ai_t.mul_vec_unchecked(&di) == di.scale(&top));
                let want = di.sub(&dj).expect("same length").scale(&inv);
                report.push("tA_j d_i", &detail, aj_t.mul_vec_unchecked(&di) == want);
            }
        }
        report
    }

    /// Values of the harmonic function with boundary vector `u` on `V_m`.
    pub fn harmonic_values(&self, u: &Vector<T>, m: usize) -> Result<HarmonicValues<T>> {
        self.check_vector(u)?;
        let mut out = HarmonicValues { depth: m, values: BTreeMap::new(), conflicts: 0 };
        let mut stack = vec![(Word::empty(self.dim), u.clone())];
        while let Some((w, vals)) = stack.pop() {
            if w.len() == m {
                for c in 1..=self.size() {
                    let key = lattice_key(&w, c, m);
                    match out.values.get(&key) {
                        Some(prev) if *prev != vals[c - 1] => out.conflicts += 1,
                        Some(_) => {}
                        None => {
                            out.values.insert(key, vals[c - 1].clone());
                        }
                    }
                }
                continue;
            }
            for k in 1..=self.size() {
                let child = self.extension[k - 1].mul_vec_unchecked(&vals);
                stack.push((w.push(k)?, child));
            }
        }
        Ok(out)
    }
}

/// Values on `V_m`, keyed by lattice coordinates of the point.
#[derive(Clone, Debug)]
pub struct HarmonicValues<T> {
    depth: usize,
    values: BTreeMap<Vec<u64>, T>,
    conflicts: usize,
}

impl<T: Scalar> HarmonicValues<T> {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of shared points where two cells disagreed.
    pub fn conflicts(&self) -> usize {
        self.conflicts
    }

    pub fn is_consistent(&self) -> bool {
        self.conflicts == 0
    }

    /// Value at `ψ_w(p_corner)`, for `|w| <= depth`.
    pub fn at(&self, w: &Word, corner: usize) -> Option<&T> {
        if w.len() > self.depth {
            return None;
        }
        self.values.get(&lattice_key(w, corner, self.depth))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u64>, &T)> {
        self.values.iter()
    }
}

/// Whether every entry of `m` has denominator dividing `base^exp`.
pub fn denominators_divide(m: &Matrix<Rational>, base: u64, exp: u32) -> bool {
    let bound = num_bigint::BigInt::from(base).pow(exp);
    m.entries().iter().all(|x| (&bound % x.denom()) == num_bigint::BigInt::from(0))
}
