//! Words, symbol streams, edge addresses and dyadic points on edges.
//!
//! Symbols are 1-based: the alphabet for dimension `N` is `1..=N+1`.
//! `ψ_w = ψ_{w_1} ∘ … ∘ ψ_{w_m}` with `ψ_k(z) = (z + p_k)/2`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::{Rational, Scalar};

/// Dimension parameter shared by every address object.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dim(usize);

impl Dim {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Self(n))
    }

    /// `N`
    pub fn get(self) -> usize {
        self.0
    }

    /// Alphabet size `N + 1`.
    pub fn symbols(self) -> usize {
        self.0 + 1
    }

    pub fn check_symbol(self, k: usize) -> Result<usize> {
        if k == 0 || k > self.symbols() {
            return Err(Error::SymbolOutOfRange { symbol: k, max: self.symbols() });
        }
        Ok(k)
    }

    fn check_same(self, other: Dim) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch { expected: self.0, found: other.0 });
        }
        Ok(())
    }
}

/// Finite address `w = w_1 … w_m` of the cell `K_w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    dim: Dim,
    symbols: Vec<usize>,
}

impl Word {
    pub fn new(dim: Dim, symbols: Vec<usize>) -> Result<Self> {
        for &k in &symbols {
            dim.check_symbol(k)?;
        }
        Ok(Self { dim, symbols })
    }

    pub fn empty(dim: Dim) -> Self {
        Self { dim, symbols: Vec::new() }
    }

    /// `k^n`
    pub fn repeat(dim: Dim, k: usize, n: usize) -> Result<Self> {
        dim.check_symbol(k)?;
        Ok(Self { dim, symbols: vec![k; n] })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn last(&self) -> Option<usize> {
        self.symbols.last().copied()
    }

    /// `[w]_n`, the first `n` symbols (the whole word if shorter).
    pub fn prefix(&self, n: usize) -> Self {
        Self { dim: self.dim, symbols: self.symbols[..n.min(self.len())].to_vec() }
    }

    pub fn concat(&self, other: &Word) -> Result<Self> {
        self.dim.check_same(other.dim)?;
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Ok(Self { dim: self.dim, symbols })
    }

    pub fn push(&self, k: usize) -> Result<Self> {
        self.dim.check_symbol(k)?;
        let mut symbols = self.symbols.clone();
        symbols.push(k);
        Ok(Self { dim: self.dim, symbols })
    }

    pub fn extend(&self, ks: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        for &k in ks {
            self.dim.check_symbol(k)?;
            out.symbols.push(k);
        }
        Ok(out)
    }

    /// All words of length exactly `m`, in lexicographic order.
    pub fn all_of_length(dim: Dim, m: usize) -> Vec<Word> {
        let mut out = vec![Word::empty(dim)];
        for _ in 0..m {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (1..=dim.symbols()).map(move |k| {
                        let mut s = w.symbols.clone();
                        s.push(k);
                        Word { dim, symbols: s }
                    })
                })
                .collect();
        }
        out
    }

    /// Parse the text encoding: a digit string for `N <= 8`, comma separated
    /// otherwise. The empty string and `∅` denote the empty word.
    pub fn parse(dim: Dim, text: &str) -> Result<Self> {
        let t = text.trim();
        if t.is_empty() || t == "∅" {
            return Ok(Self::empty(dim));
        }
        let symbols: Vec<usize> = if t.contains(',') || dim.get() > 8 {
            t.split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad symbol `{s}` in word `{t}`"))))
                .collect::<Result<_>>()?
        } else {
            t.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::Parse(format!("bad symbol `{c}` in word `{t}`")))
                })
                .collect::<Result<_>>()?
        };
        Self::new(dim, symbols)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.symbols.cmp(&other.symbols)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim.get() <= 8 {
            for k in &self.symbols {
                write!(f, "{k}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.symbols.iter().map(usize::to_string).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

/// Symbol generator for a stream tail; receives the 0-based index past the head.
pub type SymbolFn = Arc<dyn Fn(usize) -> usize + Send + Sync>;

#[derive(Clone)]
pub enum Tail {
    Constant(usize),
    Generator(SymbolFn),
}

impl fmt::Debug for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tail::Constant(k) => write!(f, "Constant({k})"),
            Tail::Generator(_) => write!(f, "Generator(..)"),
        }
    }
}

/// Infinite symbol sequence `ω`: explicit head followed by a constant or generated tail.
#[derive(Clone, Debug)]
pub struct SymbolStream {
    head: Word,
    tail: Tail,
}

impl SymbolStream {
    /// `w · k^∞`
    pub fn eventually_constant(head: Word, k: usize) -> Result<Self> {
        head.dim.check_symbol(k)?;
        Ok(Self { head, tail: Tail::Constant(k) })
    }

    pub fn generated(head: Word, f: SymbolFn) -> Self {
        Self { head, tail: Tail::Generator(f) }
    }

    pub fn dim(&self) -> Dim {
        self.head.dim
    }

    pub fn head(&self) -> &Word {
        &self.head
    }

    /// The repeated tail symbol when the stream was built as `w · k^∞`.
    pub fn constant_tail(&self) -> Option<usize> {
        match self.tail {
            Tail::Constant(k) => Some(k),
            Tail::Generator(_) => None,
        }
    }

    pub fn is_eventually_constant(&self) -> bool {
        self.constant_tail().is_some()
    }

    /// The `idx`th symbol (0-based).
    pub fn symbol(&self, idx: usize) -> Result<usize> {
        if idx < self.head.len() {
            return Ok(self.head.symbols[idx]);
        }
        let k = match &self.tail {
            Tail::Constant(k) => *k,
            Tail::Generator(f) => f(idx - self.head.len()),
        };
        self.head.dim.check_symbol(k)
    }

    /// `[ω]_n`
    pub fn prefix(&self, n: usize) -> Result<Word> {
        let symbols = (0..n).map(|i| self.symbol(i)).collect::<Result<Vec<_>>>()?;
        Ok(Word { dim: self.head.dim, symbols })
    }
}

/// The segment `ψ_w(p_i p_j)`, oriented from `ψ_w(p_i)` to `ψ_w(p_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeAddress {
    prefix: Word,
    i: usize,
    j: usize,
}

impl EdgeAddress {
    pub fn new(prefix: Word, i: usize, j: usize) -> Result<Self> {
        prefix.dim.check_symbol(i)?;
        prefix.dim.check_symbol(j)?;
        if i == j {
            return Err(Error::DegenerateEdge(i));
        }
        Ok(Self { prefix, i, j })
    }

    pub fn dim(&self) -> Dim {
        self.prefix.dim
    }

    pub fn prefix(&self) -> &Word {
        &self.prefix
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    /// Parse `w:i:j`, with `w` possibly empty.
    pub fn parse(dim: Dim, text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.trim().split(':').collect();
        let [w, i, j] = parts.as_slice() else {
            return Err(Error::Parse(format!("edge `{text}` is not of the form w:i:j")));
        };
        let sym = |s: &str| {
            s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad endpoint `{s}` in edge `{text}`")))
        };
        Self::new(Word::parse(dim, w)?, sym(i)?, sym(j)?)
    }
}

impl fmt::Display for EdgeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.prefix, self.i, self.j)
    }
}

/// The point at parameter `t = m / 2^n` on an edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicPoint {
    numer: u64,
    exponent: u32,
    edge: EdgeAddress,
}

impl DyadicPoint {
    pub const MAX_EXPONENT: u32 = 62;

    /// Builds `m / 2^n`, reducing to lowest terms.
    pub fn new(numer: u64, exponent: u32, edge: EdgeAddress) -> Result<Self> {
        if exponent > Self::MAX_EXPONENT {
            return Err(Error::Precondition(format!("dyadic exponent {exponent} exceeds {}", Self::MAX_EXPONENT)));
        }
        if numer > 1u64 << exponent {
            return Err(Error::Precondition(format!("{numer}/2^{exponent} is not in [0, 1]")));
        }
        let (mut m, mut n) = (numer, exponent);
        if m == 0 {
            n = 0;
        }
        while n > 0 && m % 2 == 0 {
            m /= 2;
            n -= 1;
        }
        Ok(Self { numer: m, exponent: n, edge })
    }

    pub fn numer(&self) -> u64 {
        self.numer
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn edge(&self) -> &EdgeAddress {
        &self.edge
    }

    pub fn value<T: Scalar>(&self) -> T {
        T::from_rational(&Rational::new(self.numer.into(), (1u64 << self.exponent).into()))
    }
}

/// Word over `{i, j}` and corner `c` with `Φ(t) = ψ_{w · word}(p_c)`.
///
/// Interior points at exponent `n` get a word of length `n`; the endpoints
/// give the empty word with corner `i` (t = 0) or `j` (t = 1).
pub fn dyadic_to_path(p: &DyadicPoint) -> (Word, usize) {
    let (i, j) = (p.edge.i, p.edge.j);
    let (mut m, mut n) = (p.numer, p.exponent);
    let mut symbols = Vec::with_capacity(n as usize);
    while n > 0 {
        let half = 1u64 << (n - 1);
        if m <= half {
            symbols.push(i);
        } else {
            symbols.push(j);
            m -= half;
        }
        n -= 1;
    }
    let corner = if m == 0 { i } else { j };
    (Word { dim: p.edge.dim(), symbols }, corner)
}

/// A point `ψ_w(p_c)` given by one of its encodings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexRep {
    pub word: Word,
    pub corner: usize,
}

impl fmt::Display for VertexRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.word, self.corner)
    }
}

/// `{(wi, j), (wj, i)}` for `i ≠ j`, `{(wi, i)}` otherwise; sorted, so the
/// first member is the canonical one.
pub fn vertex_representations(w: &Word, i: usize, j: usize) -> Result<Vec<VertexRep>> {
    let a = VertexRep { word: w.push(i)?, corner: w.dim.check_symbol(j)? };
    if i == j {
        return Ok(vec![a]);
    }
    let b = VertexRep { word: w.push(j)?, corner: i };
    let mut out = vec![a, b];
    out.sort();
    Ok(out)
}

/// `p_1 = 0`, `p_k = e_{k-1}` in `R^N`.
pub fn standard_simplex<T: Scalar>(dim: Dim) -> Vec<Vector<T>> {
    let n = dim.get();
    (0..dim.symbols()).map(|k| if k == 0 { Vector::zeros(n) } else { Vector::basis(n, k - 1) }).collect()
}

/// Coordinates of `ψ_w(p_corner)` for the given simplex vertices.
pub fn embed_point<T: Scalar>(w: &Word, corner: usize, simplex: &[Vector<T>]) -> Result<Vector<T>> {
    let dim = w.dim;
    dim.check_symbol(corner)?;
    if simplex.len() != dim.symbols() {
        return Err(Error::SizeMismatch { expected: dim.symbols(), found: simplex.len() });
    }
    let ambient = simplex[0].len();
    let diffs = simplex[1..].iter().map(|p| p.sub(&simplex[0])).collect::<Result<Vec<_>>>()?;
    if ambient < dim.get() || Matrix::from_columns(&diffs)?.rank() < dim.get() {
        return Err(Error::DegenerateSimplex);
    }
    let half = T::ratio(1, 2);
    let mut z = simplex[corner - 1].clone();
    for &k in w.symbols.iter().rev() {
        z = z.add(&simplex[k - 1])?.scale(&half);
    }
    Ok(z)
}

/// Integer key of `ψ_w(p_c)` on the standard simplex, scaled by `2^{|w|}`
/// and then by `2^{extra}`; equal keys at a common scale mean equal points.
pub fn lattice_key(w: &Word, corner: usize, depth: usize) -> Vec<u64> {
    let n = w.dim.get();
    let mut z = vec![0u64; n];
    if corner > 1 {
        z[corner - 2] = 1;
    }
    // z_{level} = (z + p_k)/2 ⇒ scaled: Z' = Z + 2^{level} p_k
    for (level, &k) in w.symbols.iter().rev().enumerate() {
        if k > 1 {
            z[k - 2] += 1u64 << level;
        }
    }
    let shift = depth.saturating_sub(w.len());
    z.iter().map(|v| v << shift).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d2() -> Dim {
        Dim::new(2).unwrap()
    }

    fn word(s: &str) -> Word {
        Word::parse(d2(), s).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn edge12() -> EdgeAddress {
        EdgeAddress::new(Word::empty(d2()), 1, 2).unwrap()
    }

    #[test]
    fn concat_examples() {
        assert_eq!(Word::empty(d2()).concat(&Word::empty(d2())).unwrap(), Word::empty(d2()));
        assert_eq!(word("1").concat(&word("22")).unwrap(), word("122"));
        assert_eq!(word("12").concat(&word("3")).unwrap().to_string(), "123");
        let d3 = Dim::new(3).unwrap();
        assert!(matches!(word("1").concat(&Word::empty(d3)), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(Word::new(d2(), vec![4]), Err(Error::SymbolOutOfRange { .. })));
        assert!(Word::parse(d2(), "14").is_err());
    }

    #[test]
    fn text_encodings() {
        let d9 = Dim::new(9).unwrap();
        let w = Word::new(d9, vec![10, 1]).unwrap();
        assert_eq!(w.to_string(), "10,1");
        assert_eq!(Word::parse(d9, "10,1").unwrap(), w);
        let e = EdgeAddress::parse(d2(), ":1:2").unwrap();
        assert_eq!(e, edge12());
        assert_eq!(EdgeAddress::parse(d2(), "31:2:3").unwrap().to_string(), "31:2:3");
        assert!(EdgeAddress::parse(d2(), ":1:1").is_err());
        assert!(EdgeAddress::parse(d2(), "1:2").is_err());
    }

    #[test]
    fn dyadic_examples() {
        let p = DyadicPoint::new(0, 3, edge12()).unwrap();
        assert_eq!(dyadic_to_path(&p), (Word::empty(d2()), 1));
        let p = DyadicPoint::new(2, 2, edge12()).unwrap();
        assert_eq!((p.numer(), p.exponent()), (1, 1));
        assert_eq!(dyadic_to_path(&p), (word("1"), 2));
        let p = DyadicPoint::new(3, 2, edge12()).unwrap();
        let (w, c) = dyadic_to_path(&p);
        let simplex = standard_simplex::<Rational>(d2());
        let got = embed_point(&w, c, &simplex).unwrap();
        let want = simplex[0].scale(&q(1, 4)).add(&simplex[1].scale(&q(3, 4))).unwrap();
        assert_eq!(got, want);
        let p = DyadicPoint::new(1, 0, edge12()).unwrap();
        assert_eq!(dyadic_to_path(&p), (Word::empty(d2()), 2));
        assert!(DyadicPoint::new(5, 2, edge12()).is_err());
    }

    #[test]
    fn vertex_representation_examples() {
        let reps = vertex_representations(&Word::empty(d2()), 1, 2).unwrap();
        assert_eq!(reps[0], VertexRep { word: word("1"), corner: 2 });
        assert_eq!(reps[1], VertexRep { word: word("2"), corner: 1 });
        let reps = vertex_representations(&Word::empty(d2()), 1, 1).unwrap();
        assert_eq!(reps, vec![VertexRep { word: word("1"), corner: 1 }]);
        let reps = vertex_representations(&word("3"), 1, 2).unwrap();
        assert_eq!(reps[0], VertexRep { word: word("31"), corner: 2 });
        assert_eq!(reps[1], VertexRep { word: word("32"), corner: 1 });
    }

    #[test]
    fn embed_examples() {
        let s = standard_simplex::<Rational>(d2());
        assert_eq!(embed_point(&Word::empty(d2()), 1, &s).unwrap(), s[0]);
        let mid = s[0].add(&s[1]).unwrap().scale(&q(1, 2));
        assert_eq!(embed_point(&word("2"), 1, &s).unwrap(), mid);
        let quarter = s[0].add(&s[1].sub(&s[0]).unwrap().scale(&q(1, 4))).unwrap();
        assert_eq!(embed_point(&word("11"), 2, &s).unwrap(), quarter);
        let p = DyadicPoint::new(1, 2, edge12()).unwrap();
        let (w, c) = dyadic_to_path(&p);
        assert_eq!(embed_point(&w, c, &s).unwrap(), quarter);
        let flat = vec![Vector::from_i64s(&[0, 0]), Vector::from_i64s(&[1, 1]), Vector::from_i64s(&[2, 2])];
        assert_eq!(embed_point::<Rational>(&word("1"), 1, &flat), Err(Error::DegenerateSimplex));
    }

    #[test]
    fn stream_prefixes() {
        let s = SymbolStream::eventually_constant(word("31"), 2).unwrap();
        assert!(s.is_eventually_constant());
        assert_eq!(s.prefix(5).unwrap(), word("31222"));
        let g = SymbolStream::generated(Word::empty(d2()), Arc::new(|i| 1 + i % 3));
        assert!(!g.is_eventually_constant());
        assert_eq!(g.prefix(4).unwrap(), word("1231"));
        let bad = SymbolStream::generated(Word::empty(d2()), Arc::new(|_| 7));
        assert!(bad.prefix(1).is_err());
    }

    proptest! {
        #[test]
        fn dyadic_round_trip(
            n in 2usize..5,
            w in proptest::collection::vec(0usize..16, 0..4),
            i in 0usize..16,
            j in 0usize..16,
            exp in 0u32..=12,
            m_seed in any::<u64>(),
        ) {
            let dim = Dim::new(n).unwrap();
            let k = dim.symbols();
            let (i, j) = (1 + i % k, 1 + j % k);
            prop_assume!(i != j);
            let prefix = Word::new(dim, w.iter().map(|s| 1 + s % k).collect()).unwrap();
            let edge = EdgeAddress::new(prefix, i, j).unwrap();
            let m = m_seed % ((1u64 << exp) + 1);
            let p = DyadicPoint::new(m, exp, edge.clone()).unwrap();
            let (sub, corner) = dyadic_to_path(&p);
            prop_assert_eq!(sub.len() as u32, p.exponent());
            let full = edge.prefix().concat(&sub).unwrap();
            let s = standard_simplex::<Rational>(dim);
            let got = embed_point(&full, corner, &s).unwrap();
            let a = embed_point(edge.prefix(), edge.i(), &s).unwrap();
            let b = embed_point(edge.prefix(), edge.j(), &s).unwrap();
            let t: Rational = p.value();
            let want = a.scale(&(Rational::from_i64(1) - t.clone())).add(&b.scale(&t)).unwrap();
            prop_assert_eq!(got, want);
        }

        #[test]
        fn representations_share_coordinates(w in proptest::collection::vec(1usize..=4, 0..5), i in 1usize..=4, j in 1usize..=4) {
            let dim = Dim::new(3).unwrap();
            let w = Word::new(dim, w).unwrap();
            let s = standard_simplex::<Rational>(dim);
            let reps = vertex_representations(&w, i, j).unwrap();
            let first = embed_point(&reps[0].word, reps[0].corner, &s).unwrap();
            for r in &reps {
                prop_assert_eq!(&embed_point(&r.word, r.corner, &s).unwrap(), &first);
                prop_assert_eq!(
                    lattice_key(&r.word, r.corner, 8),
                    lattice_key(&reps[0].word, reps[0].corner, 8)
                );
            }
        }

        #[test]
        fn concat_lengths_add(a in proptest::collection::vec(1usize..=3, 0..6), b in proptest::collection::vec(1usize..=3, 0..6), c in proptest::collection::vec(1usize..=3, 0..6)) {
            let (a, b, c) = (Word::new(d2(), a).unwrap(), Word::new(d2(), b).unwrap(), Word::new(d2(), c).unwrap());
            let ab = a.concat(&b).unwrap();
            prop_assert_eq!(ab.len(), a.len() + b.len());
            prop_assert_eq!(ab.concat(&c).unwrap(), a.concat(&b.concat(&c).unwrap()).unwrap());
        }
    }
}
