//! Vertex and edge model of the hypercube `Q_q`.
//!
//! A vertex is a `q`-bit word. Coordinates are 0-based: coordinate `j`
//! is bit `j`, so the first coordinate of a tuple `(a_1, .., a_q)` is the
//! least-significant bit. The tuple `(1, 0, 1)` is the word `0b101` and
//! the tuple `(0, 0, 1, 0)` is the word `0b0100`.
//!
//! An edge `{v, v ^ (1 << j)}` is named by the endpoint with bit `j`
//! cleared together with `j` (see [`EdgeRef`]).

use std::fmt;

use crate::decompose::Decomposition;
use crate::error::{Error, Result};

pub type Vertex = u64;

/// Largest dimension for which point-wise formulas are defined.
pub const MAX_DIM: u32 = 64;

/// Largest dimension for which any operation materializes the full edge set.
pub const MAX_MATERIALIZED_DIM: u32 = 30;

/// Word with the low `k` bits set (`1^k 0^(q-k)` in tuple notation).
#[inline]
pub fn low_ones(k: u32) -> Vertex {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// Number of vertices of `Q_q`, as a 128-bit count so `q = 64` is representable.
#[inline]
pub fn vertex_count(q: u32) -> u128 {
    1u128 << q
}

/// `|E(Q_q)| = q * 2^(q-1)`.
#[inline]
pub fn edge_count(q: u32) -> u128 {
    if q == 0 {
        0
    } else {
        (q as u128) << (q - 1)
    }
}

#[inline]
pub fn parity(v: Vertex) -> u32 {
    v.count_ones() & 1
}

#[inline]
pub fn flip(v: Vertex, j: u32) -> Vertex {
    v ^ (1 << j)
}

/// Alter coordinate `j` if necessary so the parity becomes 0.
#[inline]
pub fn force_even(v: Vertex, j: u32) -> Vertex {
    if parity(v) == 0 {
        v
    } else {
        flip(v, j)
    }
}

/// Alter coordinate `j` if necessary so the parity becomes 1.
#[inline]
pub fn force_odd(v: Vertex, j: u32) -> Vertex {
    flip(force_even(v, j), j)
}

pub(crate) fn check_dim(q: u32) -> Result<()> {
    if q == 0 || q > MAX_DIM {
        return Err(Error::param(format!("dimension {q} outside 1..={MAX_DIM}")));
    }
    Ok(())
}

pub(crate) fn check_vertex(q: u32, v: Vertex) -> Result<()> {
    if q < 64 && v >> q != 0 {
        return Err(Error::index(format!("vertex {v:#x} is not in Q_{q}")));
    }
    Ok(())
}

/// Canonical name of an edge: the endpoint with the varying bit cleared,
/// and the varying coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRef {
    base: Vertex,
    coord: u32,
}

impl EdgeRef {
    /// The edge joining `v` and `v ^ (1 << j)`.
    #[inline]
    pub fn new(v: Vertex, j: u32) -> Self {
        EdgeRef {
            base: v & !(1 << j),
            coord: j,
        }
    }

    /// The edge between `a` and `b`, if they are adjacent.
    #[inline]
    pub fn between(a: Vertex, b: Vertex) -> Option<Self> {
        let d = a ^ b;
        if d.count_ones() == 1 {
            Some(EdgeRef::new(a, d.trailing_zeros()))
        } else {
            None
        }
    }

    #[inline]
    pub fn base(&self) -> Vertex {
        self.base
    }

    #[inline]
    pub fn coord(&self) -> u32 {
        self.coord
    }

    #[inline]
    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.base, self.base | (1 << self.coord))
    }

    /// Dense index `base * q + j`; injective on `E(Q_q)` and below `q * 2^q`.
    #[inline]
    pub fn index(&self, q: u32) -> u64 {
        self.base * q as u64 + self.coord as u64
    }

    /// Translate by `gamma` (the action of `Z_2^q` on edges).
    #[inline]
    pub fn translate(&self, gamma: Vertex) -> Self {
        EdgeRef::new(self.base ^ gamma, self.coord)
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.endpoints();
        write!(f, "{{{a:x}, {b:x}}}")
    }
}

/// Results of the four single-coordinate operators at one vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoordOps {
    pub flip: Vertex,
    pub even: Vertex,
    pub odd: Vertex,
    pub edge: EdgeRef,
}

pub fn coord_ops(v: Vertex, j: u32) -> CoordOps {
    CoordOps {
        flip: flip(v, j),
        even: force_even(v, j),
        odd: force_odd(v, j),
        edge: EdgeRef::new(v, j),
    }
}

pub fn edge_index(e: EdgeRef, q: u32) -> u64 {
    e.index(q)
}

/// Iterate every edge of `Q_q` in index order.
pub fn edges(q: u32) -> impl Iterator<Item = EdgeRef> {
    (0..1u64 << q).flat_map(move |v| {
        (0..q)
            .filter(move |&j| v & (1 << j) == 0)
            .map(move |j| EdgeRef::new(v, j))
    })
}

/// A simple path in `Q_dim`, stored as its vertex sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathEmbedding {
    dim: u32,
    verts: Vec<Vertex>,
}

impl PathEmbedding {
    /// Checks adjacency, distinctness and range.
    pub fn new(dim: u32, verts: Vec<Vertex>) -> Result<Self> {
        check_dim(dim)?;
        if verts.is_empty() {
            return Err(Error::param("a path needs at least one vertex"));
        }
        for &v in &verts {
            check_vertex(dim, v)?;
        }
        if let Some(w) = verts.windows(2).find(|w| (w[0] ^ w[1]).count_ones() != 1) {
            return Err(Error::param(format!(
                "{:x} and {:x} are not adjacent",
                w[0], w[1]
            )));
        }
        if !all_distinct(&verts) {
            return Err(Error::param("path repeats a vertex"));
        }
        Ok(PathEmbedding { dim, verts })
    }

    pub(crate) fn from_raw(dim: u32, verts: Vec<Vertex>) -> Self {
        debug_assert!(PathEmbedding::new(dim, verts.clone()).is_ok());
        PathEmbedding { dim, verts }
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.verts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.verts.len() == 1
    }

    pub fn verts(&self) -> &[Vertex] {
        &self.verts
    }

    pub fn into_verts(self) -> Vec<Vertex> {
        self.verts
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        self.verts
            .windows(2)
            .map(|w| EdgeRef::between(w[0], w[1]).expect("path steps are edges"))
    }

    pub fn reversed(&self) -> Self {
        let mut verts = self.verts.clone();
        verts.reverse();
        PathEmbedding {
            dim: self.dim,
            verts,
        }
    }
}

/// A cycle in `Q_dim`; the last vertex is adjacent to the first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleEmbedding {
    dim: u32,
    verts: Vec<Vertex>,
}

impl CycleEmbedding {
    pub fn new(dim: u32, verts: Vec<Vertex>) -> Result<Self> {
        check_dim(dim)?;
        if verts.len() < 4 || !verts.len().is_multiple_of(2) {
            return Err(Error::param(format!(
                "a hypercube cycle has even length >= 4, got {}",
                verts.len()
            )));
        }
        for &v in &verts {
            check_vertex(dim, v)?;
        }
        let n = verts.len();
        if (0..n).any(|i| (verts[i] ^ verts[(i + 1) % n]).count_ones() != 1) {
            return Err(Error::param("consecutive cycle vertices are not adjacent"));
        }
        if !all_distinct(&verts) {
            return Err(Error::param("cycle repeats a vertex"));
        }
        Ok(CycleEmbedding { dim, verts })
    }

    pub(crate) fn from_raw(dim: u32, verts: Vec<Vertex>) -> Self {
        CycleEmbedding { dim, verts }
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn verts(&self) -> &[Vertex] {
        &self.verts
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        let n = self.verts.len();
        (0..n).map(move |i| {
            EdgeRef::between(self.verts[i], self.verts[(i + 1) % n]).expect("cycle steps are edges")
        })
    }
}

pub(crate) fn all_distinct(verts: &[Vertex]) -> bool {
    if verts.len() <= 24 {
        verts
            .iter()
            .enumerate()
            .all(|(i, v)| !verts[i + 1..].contains(v))
    } else {
        let mut sorted = verts.to_vec();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }
}

/// Vertex `k` of the walk `f_gamma`: `(2^k - 1) ^ gamma`. Any `gamma` is accepted.
#[inline]
pub(crate) fn f_point(gamma: Vertex, k: u32) -> Vertex {
    low_ones(k) ^ gamma
}

/// The length-`q` path `k -> 1^k 0^(q-k) + gamma` for an even-parity `gamma`.
pub fn f_gamma(q: u32, gamma: Vertex) -> Result<PathEmbedding> {
    check_dim(q)?;
    check_vertex(q, gamma)?;
    if parity(gamma) != 0 {
        return Err(Error::index(format!("gamma {gamma:#x} has odd parity")));
    }
    Ok(PathEmbedding {
        dim: q,
        verts: (0..=q).map(|k| f_point(gamma, k)).collect(),
    })
}

/// The `2^(q-1)` paths `f_gamma`, one per even `gamma`, partitioning `E(Q_q)`.
pub fn base_partition(q: u32) -> Result<Decomposition> {
    Decomposition::base_partition(q)
}

/// The `i`-th even-parity word of `width` bits, `i < 2^(width-1)`.
///
/// The low `width - 1` bits are `i`; the top bit restores even parity.
#[inline]
pub fn even_word(width: u32, i: u64) -> Vertex {
    debug_assert!(width >= 1);
    i | ((parity(i) as u64) << (width - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_examples() {
        assert_eq!(parity(0), 0);
        assert_eq!(parity(0b110), 0);
        assert_eq!(parity(0b11111), 1);
    }

    #[test]
    fn coord_ops_examples() {
        // 0b101 already has even parity, so forcing parity 0 leaves it alone.
        let ops = coord_ops(0b101, 1);
        assert_eq!(ops.flip, 0b111);
        assert_eq!(ops.even, 0b101);
        assert_eq!(ops.odd, 0b111);
        assert_eq!(ops.edge, EdgeRef::new(0b101, 1));
        assert_eq!((ops.edge.base(), ops.edge.coord()), (0b101, 1));

        let ops = coord_ops(0, 0);
        assert_eq!((ops.flip, ops.even, ops.odd), (1, 0, 1));
        assert_eq!((ops.edge.base(), ops.edge.coord()), (0, 0));
    }

    #[test]
    fn coord_ops_exhaustive() {
        for q in 1..=12u32 {
            for v in 0..1u64 << q {
                for j in 0..q {
                    let ops = coord_ops(v, j);
                    assert_eq!(parity(ops.even), 0);
                    assert_eq!(parity(ops.odd), 1);
                    assert!((ops.even ^ v) & !(1 << j) == 0);
                    assert!((ops.odd ^ v) & !(1 << j) == 0);
                    assert_eq!(EdgeRef::new(ops.even, j), ops.edge);
                    assert_eq!(EdgeRef::new(ops.odd, j), ops.edge);
                    assert_eq!(EdgeRef::new(ops.flip, j), ops.edge);
                    assert_eq!(force_even(ops.flip, j), ops.even);
                }
            }
        }
    }

    #[test]
    fn edge_index_examples() {
        assert_eq!(edge_index(EdgeRef::between(0b000, 0b001).unwrap(), 3), 0);
        let e = EdgeRef::between(0b011, 0b111).unwrap();
        assert_eq!((e.base(), e.coord()), (0b011, 2));
        assert_eq!(edge_index(e, 3), 11);
    }

    #[test]
    fn edge_index_injective() {
        for q in 1..=12u32 {
            let mut seen = vec![false; (q as usize) << q];
            let mut count = 0u128;
            for e in edges(q) {
                let i = e.index(q) as usize;
                assert!(!seen[i]);
                seen[i] = true;
                count += 1;
            }
            assert_eq!(count, edge_count(q));
        }
        assert_eq!(edges(4).count(), 32);
    }

    #[test]
    fn f_gamma_examples() {
        assert_eq!(
            f_gamma(3, 0).unwrap().verts(),
            &[0b000, 0b001, 0b011, 0b111]
        );
        assert_eq!(
            f_gamma(3, 0b110).unwrap().verts(),
            &[0b110, 0b111, 0b101, 0b001]
        );
        assert_eq!(f_gamma(1, 0).unwrap().verts(), &[0, 1]);
        assert!(matches!(f_gamma(3, 0b100), Err(Error::InvalidIndex(_))));
    }

    #[test]
    fn f_gamma_is_translate_of_f_zero() {
        for q in 1..=10u32 {
            let zero = f_gamma(q, 0).unwrap();
            for i in 0..1u64 << (q - 1) {
                let gamma = even_word(q, i);
                let p = f_gamma(q, gamma).unwrap();
                let shifted: Vec<_> = zero.verts().iter().map(|v| v ^ gamma).collect();
                assert_eq!(p.verts(), &shifted[..]);
            }
        }
    }

    #[test]
    fn base_partition_is_exact() {
        for q in 1..=12u32 {
            let mut seen = vec![false; (q as usize) << q];
            let mut paths = 0u64;
            for i in 0..1u64 << (q - 1) {
                let p = f_gamma(q, even_word(q, i)).unwrap();
                assert_eq!(p.len(), q as usize);
                for e in p.edges() {
                    let idx = e.index(q) as usize;
                    assert!(!seen[idx], "q={q}: edge {e} covered twice");
                    seen[idx] = true;
                }
                paths += 1;
            }
            assert_eq!(paths, 1 << (q - 1));
            assert_eq!(seen.iter().filter(|&&b| b).count() as u128, edge_count(q));
        }
    }

    #[test]
    fn path_and_cycle_validation() {
        assert!(PathEmbedding::new(3, vec![0, 1, 3]).is_ok());
        assert!(PathEmbedding::new(3, vec![0, 3]).is_err());
        assert!(PathEmbedding::new(3, vec![0, 1, 0]).is_err());
        assert!(PathEmbedding::new(2, vec![0, 4]).is_err());
        assert!(CycleEmbedding::new(2, vec![0, 1, 3, 2]).is_ok());
        assert!(CycleEmbedding::new(2, vec![0, 1, 3]).is_err());
        assert!(CycleEmbedding::new(3, vec![0, 1, 3, 7]).is_err());
    }

    #[test]
    fn even_words_enumerate_b_q() {
        for q in 1..=8u32 {
            let mut words: Vec<_> = (0..1u64 << (q - 1)).map(|i| even_word(q, i)).collect();
            words.sort_unstable();
            let expected: Vec<_> = (0..1u64 << q).filter(|&v| parity(v) == 0).collect();
            assert_eq!(words, expected);
        }
    }
}
