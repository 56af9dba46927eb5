//! Independent checks of claimed decompositions and path systems, and a
//! brute-force search for tiny cubes.
//!
//! The verifier only trusts the emitted vertex sequences: it re-derives
//! every edge and marks it in a bitmap indexed by [`EdgeRef::index`].

use std::collections::HashSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cube::{self, all_distinct, EdgeRef, PathEmbedding, Vertex};
use crate::decompose::Decomposition;
use crate::dvop::Dvop;
use crate::error::{Error, Result};
use crate::ham::{self, CycleIndex};
use crate::Limits;

/// Seed used when sampling is requested without one.
pub const DEFAULT_SEED: u64 = 0x5eed_c0de;

/// Path systems on cubes up to this dimension are checked exhaustively.
pub const DVOP_EXHAUSTIVE_DIM: u32 = 16;

/// One bit per potential edge index of `Q_q`.
#[derive(Clone, Debug)]
pub struct EdgeBitmap {
    q: u32,
    words: Vec<u64>,
    count: u64,
}

impl EdgeBitmap {
    pub fn new(q: u32) -> Result<Self> {
        if q > cube::MAX_MATERIALIZED_DIM {
            return Err(Error::limit(
                format!("edge bitmap of Q_{q}"),
                q as u128 * cube::vertex_count(q),
                cube::MAX_MATERIALIZED_DIM as u128 * cube::vertex_count(cube::MAX_MATERIALIZED_DIM),
            ));
        }
        let bits = (q as u64) << q;
        Ok(EdgeBitmap {
            q,
            words: vec![0; bits.div_ceil(64) as usize],
            count: 0,
        })
    }

    /// Mark `e`; false if it was already marked.
    #[inline]
    pub fn insert(&mut self, e: EdgeRef) -> bool {
        let i = e.index(self.q);
        let (w, b) = ((i / 64) as usize, i % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        self.count += fresh as u64;
        fresh
    }

    #[inline]
    pub fn contains(&self, e: EdgeRef) -> bool {
        let i = e.index(self.q);
        self.words[(i / 64) as usize] & (1 << (i % 64)) != 0
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    /// Path `path` (0-based, in emission order) is not a simple path of the cube.
    NonPath {
        path: u64,
        detail: String,
    },
    WrongLength {
        path: u64,
        expected: u32,
        found: usize,
    },
    DuplicateEdge {
        path: u64,
        edge: EdgeRef,
    },
    IncompleteCover {
        covered: u128,
        expected: u128,
    },
    /// A sampled path uses an edge outside the cycle its step should follow.
    WrongCycle {
        path: u64,
        edge: EdgeRef,
        detail: String,
    },
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::NonPath { path, detail } => write!(f, "NonPath: path {path}: {detail}"),
            Failure::WrongLength {
                path,
                expected,
                found,
            } => write!(
                f,
                "WrongLength: path {path} has {found} edges, expected {expected}"
            ),
            Failure::DuplicateEdge { path, edge } => {
                write!(f, "DuplicateEdge: path {path} reuses edge {edge}")
            }
            Failure::IncompleteCover { covered, expected } => {
                write!(f, "IncompleteCover: {covered} of {expected} edges covered")
            }
            Failure::WrongCycle { path, edge, detail } => {
                write!(f, "WrongCycle: path {path}, edge {edge}: {detail}")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    Exhaustive,
    Sampled { seed: u64, samples: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub ok: bool,
    pub paths_seen: u64,
    pub edges_seen: u64,
    pub first_failure: Option<Failure>,
    pub coverage: Coverage,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.first_failure {
            None => write!(
                f,
                "ok: {} paths, {} edges",
                self.paths_seen, self.edges_seen
            )?,
            Some(fail) => write!(f, "FAILED: {fail}")?,
        }
        if let Coverage::Sampled { seed, samples } = self.coverage {
            write!(f, " (sampled {samples} vertices, seed {seed:#x})")?;
        }
        Ok(())
    }
}

/// Streaming check that a sequence of paths is a `P_m` decomposition of `Q_q`.
#[derive(Debug)]
pub struct PathVerifier {
    q: u32,
    m: u32,
    seen: EdgeBitmap,
    paths_seen: u64,
    edges_seen: u64,
    failure: Option<Failure>,
}

impl PathVerifier {
    pub fn new(q: u32, m: u32, limits: &Limits) -> Result<Self> {
        limits.check_cube(q as u64, &format!("verifying Q_{q}"))?;
        Ok(PathVerifier {
            q,
            m,
            seen: EdgeBitmap::new(q)?,
            paths_seen: 0,
            edges_seen: 0,
            failure: None,
        })
    }

    fn check(&mut self, path: u64, verts: &[Vertex]) -> Option<Failure> {
        if verts.len() != self.m as usize + 1 {
            return Some(Failure::WrongLength {
                path,
                expected: self.m,
                found: verts.len().saturating_sub(1),
            });
        }
        if let Some(v) = verts.iter().find(|&&v| self.q < 64 && v >> self.q != 0) {
            return Some(Failure::NonPath {
                path,
                detail: format!("vertex {v:x} is outside Q_{}", self.q),
            });
        }
        if let Some(w) = verts
            .windows(2)
            .find(|w| EdgeRef::between(w[0], w[1]).is_none())
        {
            return Some(Failure::NonPath {
                path,
                detail: format!("{:x} and {:x} are not adjacent", w[0], w[1]),
            });
        }
        if !all_distinct(verts) {
            return Some(Failure::NonPath {
                path,
                detail: "a vertex repeats".into(),
            });
        }
        for w in verts.windows(2) {
            let e = EdgeRef::between(w[0], w[1]).expect("adjacency checked");
            if !self.seen.insert(e) {
                return Some(Failure::DuplicateEdge { path, edge: e });
            }
            self.edges_seen += 1;
        }
        None
    }

    /// Feed one path. Returns false once any failure has been recorded.
    pub fn push(&mut self, verts: &[Vertex]) -> bool {
        let path = self.paths_seen;
        self.paths_seen += 1;
        if self.failure.is_some() {
            return false;
        }
        self.failure = self.check(path, verts);
        self.failure.is_none()
    }

    pub fn finish(self) -> Report {
        let expected = cube::edge_count(self.q);
        let failure = self.failure.or_else(|| {
            (self.seen.count() as u128 != expected).then(|| Failure::IncompleteCover {
                covered: self.seen.count() as u128,
                expected,
            })
        });
        Report {
            ok: failure.is_none(),
            paths_seen: self.paths_seen,
            edges_seen: self.edges_seen,
            first_failure: failure,
            coverage: Coverage::Exhaustive,
        }
    }
}

/// Check a decomposition by streaming all of its paths.
pub fn verify_decomposition(d: &Decomposition, limits: &Limits) -> Result<Report> {
    let mut v = PathVerifier::new(d.dim(), d.path_len(), limits)?;
    d.for_each_path(&mut |p| {
        v.push(p);
    });
    Ok(v.finish())
}

/// Check an arbitrary sequence of paths as a `P_m` decomposition of `Q_q`.
pub fn verify_paths<I, P>(q: u32, m: u32, paths: I, limits: &Limits) -> Result<Report>
where
    I: IntoIterator<Item = P>,
    P: AsRef<[Vertex]>,
{
    let mut v = PathVerifier::new(q, m, limits)?;
    for p in paths {
        v.push(p.as_ref());
    }
    Ok(v.finish())
}

/// How to check a path system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DvopCheck {
    /// Force sampling with this many vertices; `None` means exhaustive when
    /// the cube is small enough and 10^4 samples otherwise.
    pub samples: Option<u64>,
    pub seed: u64,
}

impl Default for DvopCheck {
    fn default() -> Self {
        DvopCheck {
            samples: None,
            seed: DEFAULT_SEED,
        }
    }
}

fn check_dvop_path(d: &Dvop, v: Vertex, verts: &[Vertex], path: u64) -> Option<Failure> {
    if verts.len() != d.k() as usize + 1 {
        return Some(Failure::WrongLength {
            path,
            expected: d.k(),
            found: verts.len().saturating_sub(1),
        });
    }
    if verts[0] != v {
        return Some(Failure::NonPath {
            path,
            detail: format!("path of {v:x} starts at {:x}", verts[0]),
        });
    }
    if let Some(w) = verts
        .windows(2)
        .find(|w| EdgeRef::between(w[0], w[1]).is_none())
    {
        return Some(Failure::NonPath {
            path,
            detail: format!("{:x} and {:x} are not adjacent", w[0], w[1]),
        });
    }
    if !all_distinct(verts) {
        return Some(Failure::NonPath {
            path,
            detail: "a vertex repeats".into(),
        });
    }
    None
}

/// Check origination, simplicity, disjointness and the complement partition.
///
/// Small cubes are checked exhaustively. Otherwise vertices are sampled
/// with a fixed seed, and each step's edge is located among the cycles of
/// the family: it must lie on exactly one cycle, the one the step follows,
/// and that cycle must not be in the complement.
pub fn verify_dvop(d: &Dvop, check: &DvopCheck, limits: &Limits) -> Result<Report> {
    let exhaustive = check.samples.is_none()
        && d.dim() <= DVOP_EXHAUSTIVE_DIM
        && limits.check_cube(d.dim() as u64, "path system").is_ok();
    if exhaustive {
        verify_dvop_exhaustive(d, limits)
    } else {
        Ok(verify_dvop_sampled(
            d,
            check.samples.unwrap_or(10_000),
            check.seed,
        ))
    }
}

fn verify_dvop_exhaustive(d: &Dvop, limits: &Limits) -> Result<Report> {
    let q = d.dim();
    limits.check_cube(q as u64, &format!("path system on Q_{q}"))?;
    let mut seen = EdgeBitmap::new(q)?;
    let mut buf = Vec::with_capacity(d.k() as usize + 1);
    let mut failure = None;
    let mut paths_seen = 0;
    'walk: for v in 0..1u64 << q {
        d.path_into(v, &mut buf);
        paths_seen += 1;
        if let Some(f) = check_dvop_path(d, v, &buf, v) {
            failure = Some(f);
            break;
        }
        for w in buf.windows(2) {
            let e = EdgeRef::between(w[0], w[1]).expect("adjacency checked");
            if !seen.insert(e) {
                failure = Some(Failure::DuplicateEdge { path: v, edge: e });
                break 'walk;
            }
        }
    }
    if failure.is_none() {
        'complement: for &c in d.complement() {
            for e in ham::cycle(c)?.edges() {
                if !seen.insert(e) {
                    failure = Some(Failure::DuplicateEdge {
                        path: paths_seen,
                        edge: e,
                    });
                    break 'complement;
                }
            }
        }
    }
    let expected = cube::edge_count(q);
    if failure.is_none() && seen.count() as u128 != expected {
        failure = Some(Failure::IncompleteCover {
            covered: seen.count() as u128,
            expected,
        });
    }
    Ok(Report {
        ok: failure.is_none(),
        paths_seen,
        edges_seen: seen.count(),
        first_failure: failure,
        coverage: Coverage::Exhaustive,
    })
}

fn cycles_through(r: u32, a: Vertex, b: Vertex) -> Vec<CycleIndex> {
    CycleIndex::all(r)
        .expect("level checked by the path system")
        .filter(|&c| {
            let mask = c.cycle_len() - 1;
            let (wa, wb) = (ham::g_inverse(c, a), ham::g_inverse(c, b));
            wb == wa.wrapping_add(1) & mask || wa == wb.wrapping_add(1) & mask
        })
        .collect()
}

fn verify_dvop_sampled(d: &Dvop, samples: u64, seed: u64) -> Report {
    let mask = cube::low_ones(d.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = Vec::with_capacity(d.k() as usize + 1);
    let mut failure = None;
    let mut edges_seen = 0;
    let mut paths_seen = 0;
    'sample: for i in 0..samples {
        let v = rng.gen::<u64>() & mask;
        d.path_into(v, &mut buf);
        paths_seen += 1;
        if let Some(f) = check_dvop_path(d, v, &buf, i) {
            failure = Some(f);
            break;
        }
        edges_seen += d.k() as u64;
        let Some(steps) = d.steps() else { continue };
        let r = d.dim().trailing_zeros();
        for (s, w) in steps.iter().zip(buf.windows(2)) {
            let e = EdgeRef::between(w[0], w[1]).expect("adjacency checked");
            let on = cycles_through(r, w[0], w[1]);
            let detail = if on.len() != 1 {
                Some(format!("edge lies on {} cycles", on.len()))
            } else if on[0] != s.cycle {
                Some(format!(
                    "edge lies on cycle {} instead of {}",
                    on[0], s.cycle
                ))
            } else if d.complement().contains(&on[0]) {
                Some(format!("cycle {} is also in the complement", on[0]))
            } else {
                None
            };
            if let Some(detail) = detail {
                failure = Some(Failure::WrongCycle {
                    path: i,
                    edge: e,
                    detail,
                });
                break 'sample;
            }
        }
        let mut used: Vec<_> = steps.iter().map(|s| s.cycle).collect();
        used.sort();
        used.dedup();
        if used.len() != steps.len() {
            failure = Some(Failure::NonPath {
                path: i,
                detail: "two steps follow the same cycle".into(),
            });
            break;
        }
    }
    Report {
        ok: failure.is_none(),
        paths_seen,
        edges_seen,
        first_failure: failure,
        coverage: Coverage::Sampled { seed, samples },
    }
}

/// Largest edge count the brute-force search accepts.
pub const BRUTE_FORCE_MAX_EDGES: u32 = 32;

struct Search {
    m: usize,
    /// Endpoints of local edge `i`, smaller first.
    ends: Vec<(Vertex, Vertex)>,
    /// `(neighbor, local edge)` lists per vertex.
    adj: Vec<Vec<(Vertex, usize)>>,
    full: u64,
    dead: HashSet<u64>,
    chosen: Vec<Vec<Vertex>>,
}

impl Search {
    /// All simple walks of `len` edges from `start` over edges not in `used`,
    /// avoiding `forbidden` vertices. Each walk lists vertices after `start`.
    fn walks(
        &self,
        start: Vertex,
        len: usize,
        used: u64,
        forbidden: &[Vertex],
    ) -> Vec<(u64, Vec<Vertex>)> {
        if len == 0 {
            return vec![(0, Vec::new())];
        }
        let mut out = Vec::new();
        for &(next, e) in &self.adj[start as usize] {
            if used & (1 << e) != 0 || forbidden.contains(&next) {
                continue;
            }
            let mut forbid = forbidden.to_vec();
            forbid.push(next);
            for (mask, rest) in self.walks(next, len - 1, used | (1 << e), &forbid) {
                let mut verts = vec![next];
                verts.extend(rest);
                out.push((mask | (1 << e), verts));
            }
        }
        out
    }

    /// Paths of length `m` through the lowest uncovered edge.
    fn candidates(&self, covered: u64) -> Vec<(u64, Vec<Vertex>)> {
        let e = (!covered).trailing_zeros() as usize;
        let (x, y) = self.ends[e];
        let base = covered | (1 << e);
        let mut out = Vec::new();
        for left in 0..self.m {
            let right = self.m - 1 - left;
            for (lmask, lverts) in self.walks(x, left, base, &[x, y]) {
                let mut forbid = vec![x, y];
                forbid.extend(&lverts);
                for (rmask, rverts) in self.walks(y, right, base | lmask, &forbid) {
                    let mut verts: Vec<Vertex> = lverts.iter().rev().copied().collect();
                    verts.push(x);
                    verts.push(y);
                    verts.extend(rverts);
                    out.push((lmask | rmask | (1 << e), verts));
                }
            }
        }
        out
    }

    fn solve(&mut self, covered: u64) -> bool {
        if covered == self.full {
            return true;
        }
        if self.dead.contains(&covered) {
            return false;
        }
        for (mask, verts) in self.candidates(covered) {
            self.chosen.push(verts);
            if self.solve(covered | mask) {
                return true;
            }
            self.chosen.pop();
        }
        self.dead.insert(covered);
        false
    }
}

/// Exhaustive search for a `P_m` decomposition of `Q_q`, for `|E(Q_q)| <= 32`.
///
/// Returns a witness or `None` when no decomposition exists.
pub fn brute_force_decompose(q: u32, m: u32) -> Result<Option<Vec<PathEmbedding>>> {
    if m == 0 {
        return Err(Error::param("m must be positive"));
    }
    let edges = cube::edge_count(q);
    if q > 6 || edges > BRUTE_FORCE_MAX_EDGES as u128 {
        return Err(Error::limit(
            format!("brute-force search on Q_{q}"),
            edges,
            BRUTE_FORCE_MAX_EDGES as u128,
        ));
    }
    let ends: Vec<_> = cube::edges(q).map(|e| e.endpoints()).collect();
    let mut adj = vec![Vec::new(); 1 << q];
    for (i, &(a, b)) in ends.iter().enumerate() {
        adj[a as usize].push((b, i));
        adj[b as usize].push((a, i));
    }
    if edges == 0 {
        return Ok(Some(Vec::new()));
    }
    if !edges.is_multiple_of(m as u128) || m > q {
        return Ok(None);
    }
    let mut search = Search {
        m: m as usize,
        ends,
        adj,
        full: cube::low_ones(edges as u32),
        dead: HashSet::new(),
        chosen: Vec::new(),
    };
    if !search.solve(0) {
        return Ok(None);
    }
    Ok(Some(
        search
            .chosen
            .into_iter()
            .map(|v| PathEmbedding::new(q, v).expect("search builds simple paths"))
            .collect(),
    ))
}
