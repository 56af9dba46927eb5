//! The recursive Hamiltonian cycle family `g_delta` on `Q_{2^r}`.
//!
//! For `r = 1` there is a single 4-cycle `g` on `Q_2`:
//! `0 -> 0b01 -> 0b11 -> 0b10` (the 2-bit reflected Gray code). For
//! `r >= 2`, write a position as `w = n*u + v` with `n = 2^(2^(r-1))`
//! and `u, v < n`. With `delta = delta' . d` (the last component `d`
//! selecting the formula),
//!
//! ```text
//! g_{delta'0}(w) = (g_{delta'}(v - u), g_{delta'}(u))
//! g_{delta'1}(w) = (g_{delta'}(u),     g_{delta'}(v - u))
//! ```
//!
//! where the first component is the low half of the word and `v - u` is
//! taken modulo `n`.
//!
//! A cycle index is the bit vector `(d_1, .., d_{r-1})` packed into an
//! integer with `d_1` in bit 0. "Numeric order" of cycles is the order of
//! these integers, so the cycles with `d_1 = 0` are the even indices.

use std::fmt;

use crate::cube::{CycleEmbedding, Vertex};
use crate::error::{Error, Result};

/// Positions of a cycle at `r = 5` already fill 32 bits; `r = 6` would need 64.
pub const MAX_R: u32 = 5;

/// Largest `r` whose cycles are materialized as vertex lists.
pub const MAX_MATERIALIZED_R: u32 = 4;

const G: [Vertex; 4] = [0b00, 0b01, 0b11, 0b10];
const G_INV: [u64; 4] = [0, 1, 3, 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleIndex {
    r: u32,
    delta: u32,
}

impl CycleIndex {
    pub fn new(r: u32, delta: u32) -> Result<Self> {
        check_r(r)?;
        if delta >> (r - 1) != 0 {
            return Err(Error::index(format!(
                "cycle index {delta} needs more than {} bits",
                r - 1
            )));
        }
        Ok(CycleIndex { r, delta })
    }

    /// All `2^(r-1)` indices in numeric order.
    pub fn all(r: u32) -> Result<impl Iterator<Item = CycleIndex>> {
        check_r(r)?;
        Ok((0..1u32 << (r - 1)).map(move |delta| CycleIndex { r, delta }))
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    /// Dimension `2^r` of the hypercube the cycle lives in.
    pub fn dim(&self) -> u32 {
        1 << self.r
    }

    /// Cycle length `2^(2^r)`.
    pub fn cycle_len(&self) -> u64 {
        1u64 << (1u32 << self.r)
    }

    /// First component `d_1`; 0 for the `0delta` family.
    pub fn leading(&self) -> u32 {
        self.delta & 1
    }
}

impl fmt::Display for CycleIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.r - 1 {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", (self.delta >> i) & 1)?;
        }
        write!(f, ")")
    }
}

fn check_r(r: u32) -> Result<()> {
    if r == 0 || r > MAX_R {
        return Err(Error::param(format!(
            "cycle level r={r} outside 1..={MAX_R}"
        )));
    }
    Ok(())
}

fn eval_rec(r: u32, delta: u32, w: u64) -> Vertex {
    if r == 1 {
        return G[(w & 3) as usize];
    }
    let half = 1u32 << (r - 1);
    let mask = (1u64 << half) - 1;
    let (u, v) = (w >> half, w & mask);
    let inner = delta & ((1 << (r - 2)) - 1);
    let a = eval_rec(r - 1, inner, v.wrapping_sub(u) & mask);
    let b = eval_rec(r - 1, inner, u);
    if (delta >> (r - 2)) & 1 == 0 {
        a | (b << half)
    } else {
        b | (a << half)
    }
}

fn inverse_rec(r: u32, delta: u32, x: Vertex) -> u64 {
    if r == 1 {
        return G_INV[(x & 3) as usize];
    }
    let half = 1u32 << (r - 1);
    let mask = (1u64 << half) - 1;
    let (low, high) = (x & mask, x >> half);
    let inner = delta & ((1 << (r - 2)) - 1);
    let (u, diff) = if (delta >> (r - 2)) & 1 == 0 {
        (
            inverse_rec(r - 1, inner, high),
            inverse_rec(r - 1, inner, low),
        )
    } else {
        (
            inverse_rec(r - 1, inner, low),
            inverse_rec(r - 1, inner, high),
        )
    };
    (u << half) | (diff.wrapping_add(u) & mask)
}

/// Vertex at position `w` (taken modulo the cycle length) of cycle `c`.
pub fn g_eval(c: CycleIndex, w: u64) -> Vertex {
    eval_rec(c.r, c.delta, w & (c.cycle_len() - 1))
}

/// Position of `v` on cycle `c`. Bits of `v` above `2^r` are ignored.
pub fn g_inverse(c: CycleIndex, v: Vertex) -> u64 {
    let dim = c.dim();
    let v = if dim >= 64 {
        v
    } else {
        v & ((1u64 << dim) - 1)
    };
    inverse_rec(c.r, c.delta, v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn reverse(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// One step along cycle `c` from `v` (`h_delta` forward, its inverse backward).
pub fn advance(c: CycleIndex, v: Vertex, dir: Direction) -> Vertex {
    let w = g_inverse(c, v);
    let next = match dir {
        Direction::Forward => w.wrapping_add(1),
        Direction::Backward => w.wrapping_sub(1),
    };
    g_eval(c, next)
}

/// Vertices at positions `start, .., start + len` of cycle `c`.
pub fn arc(c: CycleIndex, start: u64, len: u64) -> Vec<Vertex> {
    (0..=len)
        .map(|i| g_eval(c, start.wrapping_add(i)))
        .collect()
}

/// Materialize one cycle as its vertex list, starting at position 0.
pub fn cycle(c: CycleIndex) -> Result<CycleEmbedding> {
    if c.r > MAX_MATERIALIZED_R {
        return Err(Error::limit(
            format!("materializing cycle {c} of Q_{}", c.dim()),
            c.cycle_len() as u128,
            1u128 << (1u32 << MAX_MATERIALIZED_R),
        ));
    }
    let verts = (0..c.cycle_len()).map(|w| g_eval(c, w)).collect();
    Ok(CycleEmbedding::from_raw(c.dim(), verts))
}

/// The `2^(r-1)` cycles of `Q_{2^r}` in numeric index order.
pub fn ham_decomposition(r: u32) -> Result<Vec<CycleEmbedding>> {
    CycleIndex::all(r)?.map(cycle).collect()
}

/// The cycle of `Q_{2^r}` containing edge `{a, b}`, if they are adjacent.
pub fn cycle_of_edge(r: u32, a: Vertex, b: Vertex) -> Option<CycleIndex> {
    if (a ^ b).count_ones() != 1 {
        return None;
    }
    CycleIndex::all(r).ok()?.find(|&c| {
        let mask = c.cycle_len() - 1;
        let (wa, wb) = (g_inverse(c, a), g_inverse(c, b));
        wb == wa.wrapping_add(1) & mask || wa == wb.wrapping_add(1) & mask
    })
}

/// 1-value: sum of `g^{-1}` over the 2-bit blocks of `v`, modulo 4.
pub fn rho1(v: Vertex, dim: u32) -> Result<u32> {
    if dim == 0 || !dim.is_multiple_of(2) || dim > 64 {
        return Err(Error::param(format!(
            "1-value needs an even dimension, got {dim}"
        )));
    }
    let sum: u64 = (0..dim / 2)
        .map(|i| G_INV[((v >> (2 * i)) & 3) as usize])
        .sum();
    Ok((sum % 4) as u32)
}

/// 2-value: sum of `g_0^{-1}` over the 4-bit blocks of `v`, modulo 16.
pub fn rho2(v: Vertex, dim: u32) -> Result<u32> {
    if dim == 0 || !dim.is_multiple_of(4) || dim > 64 {
        return Err(Error::param(format!(
            "2-value needs a dimension divisible by 4, got {dim}"
        )));
    }
    let sum: u64 = (0..dim / 4)
        .map(|i| inverse_rec(2, 0, (v >> (4 * i)) & 0xf))
        .sum();
    Ok((sum % 16) as u32)
}
