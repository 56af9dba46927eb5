//! Vertex-originating path systems on `Q_{2^r}`.
//!
//! A system with parameter `k` assigns to every vertex `v` a path of length
//! `k` starting at `v`; the paths are pairwise edge-disjoint. Systems built
//! from the cycles `g_delta` leave a set of whole cycles unused, reported as
//! the complement.

use std::fmt;

use crate::cube::{self, f_point, low_ones, parity, PathEmbedding, Vertex};
use crate::error::{Error, Result};
use crate::ham::{self, CycleIndex, Direction};
use crate::transforms::PathSystem;

/// One step of a cycle walk: move along `cycle` in direction `dir`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub cycle: CycleIndex,
    pub dir: Direction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DvopKind {
    /// Forward steps along the first `k` cycles, `k <= 3`.
    Basic,
    /// Coordinate walks inside one half of the cube, `k = 2^(r-1)`.
    Half,
    /// Seven alternating cycle steps, `r >= 4`.
    Mid,
    /// Fifteen steps over two interleaved cycle families, `r = 5`.
    Wide,
}

impl fmt::Display for DvopKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            DvopKind::Basic => "basic",
            DvopKind::Half => "half",
            DvopKind::Mid => "mid",
            DvopKind::Wide => "wide",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug)]
enum Walk {
    Cycles(Vec<Step>),
    Half,
}

#[derive(Clone, Debug)]
pub struct Dvop {
    dim: u32,
    k: u32,
    kind: DvopKind,
    walk: Walk,
    complement: Vec<CycleIndex>,
}

impl Dvop {
    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn kind(&self) -> DvopKind {
        self.kind
    }

    /// Cycles of the Hamiltonian decomposition not touched by any path.
    pub fn complement(&self) -> &[CycleIndex] {
        &self.complement
    }

    /// The cycle steps, for systems built from cycle walks.
    pub fn steps(&self) -> Option<&[Step]> {
        match &self.walk {
            Walk::Cycles(steps) => Some(steps),
            Walk::Half => None,
        }
    }

    /// Vertices of the path originating at `v`, written into `out`.
    pub fn path_into(&self, v: Vertex, out: &mut Vec<Vertex>) {
        out.clear();
        match &self.walk {
            Walk::Cycles(steps) => {
                let mut x = v;
                out.push(x);
                for s in steps {
                    x = ham::advance(s.cycle, x, s.dir);
                    out.push(x);
                }
            }
            Walk::Half => {
                let n = self.dim / 2;
                let (alpha, beta) = (v & low_ones(n), v >> n);
                if parity(v) == 0 {
                    out.extend((0..=self.k).map(|j| f_point(alpha, j) | (beta << n)));
                } else {
                    out.extend((0..=self.k).map(|j| alpha | (f_point(beta, j) << n)));
                }
            }
        }
    }

    pub fn path_of(&self, v: Vertex) -> Result<PathEmbedding> {
        cube::check_vertex(self.dim, v)?;
        let mut out = Vec::with_capacity(self.k as usize + 1);
        self.path_into(v, &mut out);
        Ok(PathEmbedding::from_raw(self.dim, out))
    }
}

impl PathSystem for Dvop {
    type Complement = Vec<CycleIndex>;

    fn vertex_count(&self) -> u64 {
        1u64 << self.dim
    }

    fn path_len(&self) -> u32 {
        self.k
    }

    fn path_from(&self, v: Vertex, out: &mut Vec<Vertex>) {
        self.path_into(v, out);
    }

    fn complement(&self) -> Vec<CycleIndex> {
        self.complement.clone()
    }
}

fn cycle_walk(r: u32, kind: DvopKind, steps: Vec<Step>) -> Result<Dvop> {
    let used: Vec<u32> = steps.iter().map(|s| s.cycle.delta()).collect();
    let complement = CycleIndex::all(r)?
        .filter(|c| !used.contains(&c.delta()))
        .collect();
    Ok(Dvop {
        dim: 1 << r,
        k: steps.len() as u32,
        kind,
        walk: Walk::Cycles(steps),
        complement,
    })
}

fn forward(r: u32, delta: u32) -> Result<Step> {
    Ok(Step {
        cycle: CycleIndex::new(r, delta)?,
        dir: Direction::Forward,
    })
}

fn backward(r: u32, delta: u32) -> Result<Step> {
    Ok(Step {
        cycle: CycleIndex::new(r, delta)?,
        dir: Direction::Backward,
    })
}

/// Forward steps along cycles `0 .. k`.
pub fn dvop_basic(r: u32, k: u32) -> Result<Dvop> {
    if r == 0 || r > ham::MAX_R {
        return Err(Error::param(format!("r={r} outside 1..={}", ham::MAX_R)));
    }
    if k > 3 || k > 1 << (r - 1) {
        return Err(Error::param(format!(
            "basic system on Q_{} needs k <= min(3, {}), got {k}",
            1u32 << r,
            1u32 << (r - 1)
        )));
    }
    let steps = (0..k).map(|d| forward(r, d)).collect::<Result<_>>()?;
    cycle_walk(r, DvopKind::Basic, steps)
}

/// The `k = n` system on `Q_{2n}`. Even vertices walk `f_alpha` in the low
/// half, odd vertices walk `f_beta` in the high half. Every edge is used.
pub fn dvop_half(n: u32) -> Result<Dvop> {
    if n == 0 || 2 * n > cube::MAX_DIM {
        return Err(Error::param(format!(
            "half system needs 1 <= n <= 32, got {n}"
        )));
    }
    Ok(Dvop {
        dim: 2 * n,
        k: n,
        kind: DvopKind::Half,
        walk: Walk::Half,
        complement: Vec::new(),
    })
}

const MID_DIRS: [bool; 7] = [true, false, true, true, true, false, true];

/// Up to seven steps along cycles `0 .. 7` with directions `+ - + + + - +`.
pub fn dvop_mid(r: u32, k: u32) -> Result<Dvop> {
    if !(4..=ham::MAX_R).contains(&r) {
        return Err(Error::param(format!(
            "mid system needs 4 <= r <= {}, got {r}",
            ham::MAX_R
        )));
    }
    if k > 7 {
        return Err(Error::param(format!("mid system needs k <= 7, got {k}")));
    }
    let steps = (0..k)
        .map(|i| {
            if MID_DIRS[i as usize] {
                forward(r, i)
            } else {
                backward(r, i)
            }
        })
        .collect::<Result<_>>()?;
    cycle_walk(r, DvopKind::Mid, steps)
}

/// `(family, member, forward)`; family 0 is the even-indexed cycles, 1 the odd.
const WIDE_STEPS: [(u32, u32, bool); 15] = [
    (0, 0, true),
    (0, 1, false),
    (0, 2, true),
    (0, 3, true),
    (1, 0, true),
    (1, 1, false),
    (1, 2, true),
    (1, 3, true),
    (0, 4, true),
    (0, 5, false),
    (0, 6, true),
    (0, 7, true),
    (1, 4, true),
    (1, 5, false),
    (1, 6, true),
];

/// Up to fifteen steps on `Q_32`, alternating between blocks of the
/// even-indexed and odd-indexed cycles.
pub fn dvop_wide(r: u32, k: u32) -> Result<Dvop> {
    if r != 5 {
        return Err(Error::param(format!("wide system needs r = 5, got {r}")));
    }
    if k > 15 {
        return Err(Error::param(format!("wide system needs k <= 15, got {k}")));
    }
    let steps = WIDE_STEPS[..k as usize]
        .iter()
        .map(|&(family, member, fwd)| {
            let delta = 2 * member + family;
            if fwd {
                forward(r, delta)
            } else {
                backward(r, delta)
            }
        })
        .collect::<Result<_>>()?;
    cycle_walk(r, DvopKind::Wide, steps)
}

/// Which construction covers `(r, k)`, if any.
pub fn dvop_kind(r: u32, k: u32) -> Option<DvopKind> {
    if r == 0 || r > ham::MAX_R {
        return None;
    }
    let half = 1u32 << (r - 1);
    if k <= 3 && k <= half {
        Some(DvopKind::Basic)
    } else if k == half {
        Some(DvopKind::Half)
    } else if k <= 7 && r >= 4 {
        Some(DvopKind::Mid)
    } else if k <= 15 && r >= 5 {
        Some(DvopKind::Wide)
    } else {
        None
    }
}

/// A system with parameter `k` on `Q_{2^r}`, from whichever construction applies.
pub fn dvop_for(r: u32, k: u32) -> Result<Dvop> {
    match dvop_kind(r, k) {
        Some(DvopKind::Basic) => dvop_basic(r, k),
        Some(DvopKind::Half) => dvop_half(1 << (r - 1)),
        Some(DvopKind::Mid) => dvop_mid(r, k),
        Some(DvopKind::Wide) => dvop_wide(r, k),
        None => Err(Error::Unsupported(format!(
            "no vertex-originating system with k={k} on Q_{} is available",
            if r < 7 { 1u64 << r } else { 0 }
        ))),
    }
}

/// A value along a path: the sequence of `value(x)` for each vertex `x`.
pub fn trace(path: &[Vertex], value: impl Fn(Vertex) -> u32) -> Vec<u32> {
    path.iter().map(|&x| value(x)).collect()
}
