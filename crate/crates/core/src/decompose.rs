//! The divisibility condition and the constructive pipeline producing an
//! explicit `P_m` decomposition of `Q_q` for odd `q`.
//!
//! A [`Plan`] is the recursion tree; a [`Decomposition`] is a lazy
//! description of the resulting paths that streams them on demand.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;

use crate::cube::{self, check_dim, even_word, f_point, CycleEmbedding, PathEmbedding, Vertex};
use crate::dvop::{dvop_for, dvop_kind};
use crate::error::{Error, Result};
use crate::ham::{self, CycleIndex};
use crate::transforms::{self, concat_dvop_paths, Embedding, SharpVertex};
use crate::Limits;

/// Largest odd dimension the planner accepts.
pub const MAX_PLAN_DIM: u64 = (1 << 32) - 1;

fn check_odd_dim(q: u64) -> Result<()> {
    if q == 0 || q.is_multiple_of(2) {
        return Err(Error::param(format!("q must be odd and positive, got {q}")));
    }
    Ok(())
}

/// `None` if `P_m` can divide `Q_q` (`m <= q` and `m | q * 2^(q-1)`),
/// otherwise the reason it cannot.
pub fn divisibility_failure(m: u64, q: u64) -> Result<Option<String>> {
    check_odd_dim(q)?;
    if m == 0 {
        return Err(Error::param("m must be positive"));
    }
    if m > q {
        return Ok(Some(format!("{m} exceeds {q}")));
    }
    // m = 2^a * b with b odd divides q * 2^(q-1) iff b | q and a <= q - 1.
    let (a, b) = (m.trailing_zeros() as u64, m >> m.trailing_zeros());
    if !q.is_multiple_of(b) || a > q - 1 {
        return Ok(Some(format!("{m} does not divide {q}·2^{}", q - 1)));
    }
    Ok(None)
}

pub fn check_divisibility(m: u64, q: u64) -> Result<bool> {
    Ok(divisibility_failure(m, q)?.is_none())
}

/// The recursion tree of a construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Plan {
    /// `P_1` in `Q_q`: every edge.
    Trivial { q: u64 },
    /// `P_q` in `Q_q`: the paths `f_gamma`.
    BasePartition { q: u64 },
    /// The fixed `P_2` decomposition of `Q_3`.
    P2InQ3,
    /// `P_{2^t}` in `Q_{2^t + s}` from `rungs#Q_{2^r}` with path systems of
    /// lengths `k_out` and `k_in`.
    SharpBase {
        t: u32,
        s: u32,
        r: u32,
        rungs: u32,
        k_out: u32,
        k_in: u32,
    },
    /// `copies` cartesian products of `base` with the split cycles of `Q_{2^r}`.
    Stride {
        t: u32,
        r: u32,
        copies: u64,
        base: Box<Plan>,
    },
    /// The `d`-stretch of a decomposition of `Q_{q/d}`.
    GcdReduce { d: u64, inner: Box<Plan> },
}

impl Plan {
    pub fn dim(&self) -> u64 {
        match self {
            Plan::Trivial { q } | Plan::BasePartition { q } => *q,
            Plan::P2InQ3 => 3,
            Plan::SharpBase { t, s, .. } => (1u64 << t) + *s as u64,
            Plan::Stride {
                r, copies, base, ..
            } => base.dim() + copies * (1u64 << r),
            Plan::GcdReduce { d, inner } => d * inner.dim(),
        }
    }

    pub fn path_len(&self) -> u64 {
        match self {
            Plan::Trivial { .. } => 1,
            Plan::BasePartition { q } => *q,
            Plan::P2InQ3 => 2,
            Plan::SharpBase { t, .. } | Plan::Stride { t, .. } => 1u64 << t,
            Plan::GcdReduce { d, inner } => d * inner.path_len(),
        }
    }

    /// Structural checks on every node, plus the divisibility condition at
    /// the root.
    pub fn validate(&self) -> Result<()> {
        self.validate_node()?;
        if let Some(reason) = divisibility_failure(self.path_len(), self.dim())? {
            return Err(Error::Unsupported(format!(
                "plan produces an impossible shape: {reason}"
            )));
        }
        Ok(())
    }

    fn validate_node(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Unsupported(format!("malformed plan: {msg}")));
        match self {
            Plan::Trivial { q } | Plan::BasePartition { q } => {
                if *q == 0 {
                    return bad("empty cube".into());
                }
            }
            Plan::P2InQ3 => {}
            &Plan::SharpBase {
                t,
                s,
                r,
                rungs,
                k_out,
                k_in,
            } => {
                if r == 0 || r > ham::MAX_R {
                    return bad(format!("level r={r}"));
                }
                if t as u64 >= 1u64 << r {
                    return bad(format!(
                        "P_{{2^{t}}} does not split the cycles of Q_{}",
                        1u64 << r
                    ));
                }
                if s % 2 == 0 || s as u64 >= 1u64 << r {
                    return bad(format!("offset s={s} must be odd and below {}", 1u64 << r));
                }
                if rungs % 2 == 0 || rungs as u64 + (1u64 << r) != (1u64 << t) + s as u64 {
                    return bad(format!("rung length {rungs}"));
                }
                if k_out as u64 + rungs as u64 + k_in as u64 != 1u64 << t {
                    return bad(format!("{k_out} + {rungs} + {k_in} != 2^{t}"));
                }
                for k in [k_out, k_in] {
                    if dvop_kind(r, k).is_none() {
                        return bad(format!("no path system with k={k} at r={r}"));
                    }
                }
            }
            Plan::Stride { t, r, copies, base } => {
                base.validate_node()?;
                if *r == 0 || *r > ham::MAX_R || *t as u64 >= 1u64 << r {
                    return bad(format!("stride level r={r} for t={t}"));
                }
                if base.path_len() != 1u64 << t || *copies == 0 {
                    return bad(format!(
                        "stride over a base with paths of length {}",
                        base.path_len()
                    ));
                }
            }
            Plan::GcdReduce { d, inner } => {
                inner.validate_node()?;
                if *d < 3 || d % 2 == 0 {
                    return bad(format!("stretch factor {d}"));
                }
            }
        }
        if self.dim().is_multiple_of(2)
            && !matches!(self, Plan::Trivial { .. } | Plan::BasePartition { .. })
        {
            return Err(Error::Unsupported(format!(
                "malformed plan: even dimension {}",
                self.dim()
            )));
        }
        Ok(())
    }

    fn fmt_tree(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        write!(f, "{pad}P_{} in Q_{}: ", self.path_len(), self.dim())?;
        match self {
            Plan::Trivial { .. } => writeln!(f, "single edges"),
            Plan::BasePartition { .. } => writeln!(f, "base partition"),
            Plan::P2InQ3 => writeln!(f, "fixed table"),
            Plan::SharpBase {
                r,
                rungs,
                k_out,
                k_in,
                ..
            } => writeln!(f, "{rungs}#Q_{} with k'={k_out}, k''={k_in}", 1u64 << r),
            Plan::Stride {
                r, copies, base, ..
            } => {
                writeln!(f, "{copies} x Q_{} stride", 1u64 << r)?;
                base.fmt_tree(f, depth + 1)
            }
            Plan::GcdReduce { d, inner } => {
                writeln!(f, "stretch by {d}")?;
                inner.fmt_tree(f, depth + 1)
            }
        }
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_tree(f, 0)
    }
}

/// Default stride level for `P_{2^t}`: the smallest `r` with `t < 2^r`,
/// at least 2.
pub fn default_level(t: u32) -> u32 {
    (32 - t.leading_zeros()).max(2)
}

/// The sharp base for `P_{2^t}` in `Q_{2^t + s}` at level `r`.
pub fn sharp_base_plan(t: u32, s: u32, r: u32) -> Result<Plan> {
    if r == 0 || r > ham::MAX_R {
        return Err(Error::Unsupported(format!(
            "no cycle family at level r={r}"
        )));
    }
    let (n, half) = (1u32 << r, 1u32 << (r - 1));
    if t >= n {
        return Err(Error::Unsupported(format!(
            "level r={r} is too small for P_{{2^{t}}}"
        )));
    }
    if s.is_multiple_of(2) || s >= n {
        return Err(Error::param(format!(
            "offset s={s} must be odd and below {n}"
        )));
    }
    let total = (1u64 << t) + s as u64;
    if total <= n as u64 {
        return Err(Error::Unsupported(format!(
            "Q_{total} is too small for a sharp base over Q_{n}"
        )));
    }
    let rungs = (total - n as u64) as u32;
    let (k_out, k_in) = if r == 2 && s == 3 {
        (1, 0)
    } else {
        let k_out = if s < half { half } else { 0 };
        (k_out, n - s - k_out)
    };
    let plan = Plan::SharpBase {
        t,
        s,
        r,
        rungs,
        k_out,
        k_in,
    };
    plan.validate_node()?;
    Ok(plan)
}

/// `P_{2^t}` in `Q_q` with strides and base at level `r`.
pub fn power2_plan_at(t: u32, q: u64, r: u32) -> Result<Plan> {
    check_odd_dim(q)?;
    if t >= 32 {
        return Err(Error::Unsupported(format!(
            "P_{{2^{t}}} is beyond the constructed range"
        )));
    }
    if t == 0 {
        return Ok(Plan::Trivial { q });
    }
    if q <= 1u64 << t {
        return Err(Error::NotDivisible {
            m: 1 << t,
            q,
            reason: format!("{} exceeds {q}", 1u64 << t),
        });
    }
    if r == 0 || r > ham::MAX_R {
        return Err(Error::Unsupported(format!(
            "no cycle family at level r={r}"
        )));
    }
    let stride = 1u64 << r;
    let s0 = q - (1u64 << t);
    let s = s0 % stride;
    let base = if t == 1 && r == 1 && s == 1 {
        Plan::P2InQ3
    } else {
        sharp_base_plan(t, s as u32, r)?
    };
    let copies = (s0 - s) / stride;
    let plan = if copies == 0 {
        base
    } else {
        Plan::Stride {
            t,
            r,
            copies,
            base: Box::new(base),
        }
    };
    plan.validate()?;
    Ok(plan)
}

/// `P_{2^t}` in `Q_q` for odd `q > 2^t` using the default base/stride table.
pub fn power2_plan(t: u32, q: u64) -> Result<Plan> {
    let r = if t <= 1 { 1 } else { default_level(t) };
    power2_plan_at(t, q, r)
}

/// The plan for `P_m` in `Q_q`.
pub fn decompose_plan(m: u64, q: u64) -> Result<Plan> {
    check_odd_dim(q)?;
    if q > MAX_PLAN_DIM {
        return Err(Error::Unsupported(format!("q={q} is at least 2^32")));
    }
    if let Some(reason) = divisibility_failure(m, q)? {
        return Err(Error::NotDivisible { m, q, reason });
    }
    if m == q {
        return Ok(Plan::BasePartition { q });
    }
    let d = m.gcd(&q);
    let (m1, q1) = (m / d, q / d);
    debug_assert!(m1.is_power_of_two() && m1 < q1);
    let inner = power2_plan(m1.trailing_zeros(), q1)?;
    let plan = if d == 1 {
        inner
    } else {
        Plan::GcdReduce {
            d,
            inner: Box::new(inner),
        }
    };
    plan.validate()?;
    Ok(plan)
}

#[derive(Clone, Debug)]
enum Body {
    Empty,
    Edges,
    Base,
    Flat(Arc<Vec<Vertex>>),
    /// Copies of `low` in the low bits, one per vertex of the high factor,
    /// then copies of `high` shifted above `low.dim`.
    Cartesian {
        low: Arc<Decomposition>,
        high: Arc<Decomposition>,
    },
    /// The image of `inner` under every odd-stretch map by `factor`.
    Stretched {
        inner: Arc<Decomposition>,
        factor: u32,
    },
}

/// A claimed `P_m` decomposition of `Q_q`, emitted lazily.
///
/// Nothing here is trusted: [`crate::verify`] checks the emitted paths.
#[derive(Clone, Debug)]
pub struct Decomposition {
    dim: u32,
    path_len: u32,
    count: u128,
    body: Body,
}

impl Decomposition {
    /// The decomposition of `Q_0`, which has no edges.
    pub fn empty(path_len: u32) -> Self {
        Decomposition {
            dim: 0,
            path_len,
            count: 0,
            body: Body::Empty,
        }
    }

    /// Every edge of `Q_q` as a path of length 1.
    pub fn edges(q: u32) -> Result<Self> {
        check_dim(q)?;
        Ok(Decomposition {
            dim: q,
            path_len: 1,
            count: cube::edge_count(q),
            body: Body::Edges,
        })
    }

    /// The `2^(q-1)` paths `f_gamma` of length `q`.
    pub fn base_partition(q: u32) -> Result<Self> {
        check_dim(q)?;
        if q == 0 {
            return Err(Error::param("base partition needs q >= 1"));
        }
        Ok(Decomposition {
            dim: q,
            path_len: q,
            count: 1u128 << (q - 1),
            body: Body::Base,
        })
    }

    /// Wrap explicit paths. Lengths and dimensions are checked, the
    /// partition property is not.
    pub fn from_paths(dim: u32, path_len: u32, paths: Vec<PathEmbedding>) -> Result<Self> {
        check_dim(dim)?;
        let mut verts = Vec::with_capacity(paths.len() * (path_len as usize + 1));
        for p in &paths {
            if p.dim() != dim || p.len() != path_len as usize {
                return Err(Error::param(format!(
                    "path of length {} in Q_{} does not belong to a P_{path_len} decomposition of Q_{dim}",
                    p.len(),
                    p.dim()
                )));
            }
            verts.extend_from_slice(p.verts());
        }
        Ok(Self::flat(dim, path_len, verts))
    }

    fn flat(dim: u32, path_len: u32, verts: Vec<Vertex>) -> Self {
        Decomposition {
            dim,
            path_len,
            count: (verts.len() / (path_len as usize + 1)) as u128,
            body: Body::Flat(Arc::new(verts)),
        }
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn path_len(&self) -> u32 {
        self.path_len
    }

    pub fn path_count(&self) -> u128 {
        self.count
    }

    /// Stream every path, in a fixed order, to `f`.
    pub fn for_each_path(&self, f: &mut dyn FnMut(&[Vertex])) {
        let mut buf = Vec::with_capacity(self.path_len as usize + 1);
        match &self.body {
            Body::Empty => {}
            Body::Edges => {
                for e in cube::edges(self.dim) {
                    let (a, b) = e.endpoints();
                    f(&[a, b]);
                }
            }
            Body::Base => {
                for i in 0..1u64 << (self.dim - 1) {
                    let gamma = even_word(self.dim, i);
                    buf.clear();
                    buf.extend((0..=self.dim).map(|k| f_point(gamma, k)));
                    f(&buf);
                }
            }
            Body::Flat(verts) => {
                for p in verts.chunks(self.path_len as usize + 1) {
                    f(p);
                }
            }
            Body::Cartesian { low, high } => {
                let shift = low.dim;
                for y in 0..1u64 << high.dim {
                    let hi = y << shift;
                    low.for_each_path(&mut |p| {
                        buf.clear();
                        buf.extend(p.iter().map(|&x| x | hi));
                        f(&buf);
                    });
                }
                for x in 0..1u64 << low.dim {
                    high.for_each_path(&mut |p| {
                        buf.clear();
                        buf.extend(p.iter().map(|&y| x | (y << shift)));
                        f(&buf);
                    });
                }
            }
            Body::Stretched { inner, factor } => {
                let family = transforms::odd_stretch_family(*factor, inner.dim)
                    .expect("stretch parameters checked at construction");
                for map in family {
                    inner.for_each_path(&mut |p| {
                        map.stretch_path(p, &mut buf);
                        f(&buf);
                    });
                }
            }
        }
    }

    /// Materialize every path. Meant for small instances and tests.
    pub fn paths(&self) -> Vec<PathEmbedding> {
        let mut out = Vec::new();
        self.for_each_path(&mut |p| out.push(PathEmbedding::from_raw(self.dim, p.to_vec())));
        out
    }

    /// A compact description of the construction, e.g. `cartesian(Q_3, Q_2)`.
    pub fn describe(&self) -> String {
        match &self.body {
            Body::Empty => "Q_0".into(),
            Body::Edges => format!("edges(Q_{})", self.dim),
            Body::Base => format!("f_gamma(Q_{})", self.dim),
            Body::Flat(_) => format!("table(Q_{})", self.dim),
            Body::Cartesian { low, high } => {
                format!("cartesian({}, {})", low.describe(), high.describe())
            }
            Body::Stretched { inner, factor } => format!("stretch{factor}({})", inner.describe()),
        }
    }
}

/// Copies of `low` translated by every vertex of the high factor, plus
/// copies of `high` translated by every vertex of the low factor.
pub fn cartesian_combine(low: Decomposition, high: Decomposition) -> Result<Decomposition> {
    combine_shared(Arc::new(low), Arc::new(high))
}

fn combine_shared(low: Arc<Decomposition>, high: Arc<Decomposition>) -> Result<Decomposition> {
    if low.path_len != high.path_len {
        return Err(Error::param(format!(
            "cannot combine P_{} and P_{} decompositions",
            low.path_len, high.path_len
        )));
    }
    let dim = low.dim + high.dim;
    check_dim(dim)?;
    let count = (low.count << high.dim) + (high.count << low.dim);
    Ok(Decomposition {
        dim,
        path_len: low.path_len,
        count,
        body: Body::Cartesian { low, high },
    })
}

/// Cut a cycle of length `n` into `n/m` consecutive paths from position 0.
pub fn split_cycle(c: &CycleEmbedding, m: usize) -> Result<Vec<PathEmbedding>> {
    let n = c.len();
    if m == 0 || m >= n || !n.is_multiple_of(m) {
        return Err(Error::param(format!(
            "cannot cut a cycle of length {n} into paths of length {m}"
        )));
    }
    let verts = c.verts();
    Ok((0..n / m)
        .map(|i| {
            let path = (0..=m).map(|k| verts[(i * m + k) % n]).collect();
            PathEmbedding::from_raw(c.dim(), path)
        })
        .collect())
}

const P2_IN_Q3: [[Vertex; 3]; 6] = [
    [0b000, 0b001, 0b011],
    [0b011, 0b010, 0b000],
    [0b000, 0b100, 0b101],
    [0b001, 0b101, 0b111],
    [0b011, 0b111, 0b110],
    [0b010, 0b110, 0b100],
];

/// Six `P_2` covering `Q_3`: two around the inner square (bit 2 clear),
/// four each pairing an outer edge with a matching edge.
pub fn p2_in_q3() -> Decomposition {
    Decomposition::flat(3, 2, P2_IN_Q3.iter().flatten().copied().collect())
}

/// All cycles of `Q_{2^r}` cut into paths of length `2^t`.
fn ham_split(r: u32, t: u32) -> Result<Decomposition> {
    let mut verts = Vec::new();
    for c in ham::ham_decomposition(r)? {
        for p in split_cycle(&c, 1 << t)? {
            verts.extend_from_slice(p.verts());
        }
    }
    Ok(Decomposition::flat(1 << r, 1 << t, verts))
}

/// Arcs of length `len` covering cycle `c`, in sharp-vertex form.
fn push_arcs(
    c: CycleIndex,
    len: u64,
    wrap: impl Fn(Vertex) -> SharpVertex,
    out: &mut Vec<SharpVertex>,
) {
    for i in 0..c.cycle_len() / len {
        out.extend((0..=len).map(|k| wrap(ham::g_eval(c, i * len + k))));
    }
}

fn sharp_base(t: u32, r: u32, rungs: u32, k_out: u32, k_in: u32) -> Result<Decomposition> {
    let outer = dvop_for(r, k_out)?;
    let inner = dvop_for(r, k_in)?;
    let concat = concat_dvop_paths(rungs, &outer, &inner)?;
    let len = 1u64 << t;
    debug_assert_eq!(concat.path_len as u64, len);
    let mut abstract_paths = concat.verts;
    for &c in &concat.prime_complement {
        push_arcs(c, len, SharpVertex::Prime, &mut abstract_paths);
    }
    for &c in &concat.double_prime_complement {
        push_arcs(c, len, SharpVertex::DoublePrime, &mut abstract_paths);
    }
    let dim = rungs + (1 << r);
    let maps: Vec<_> = transforms::sharp_family(rungs, 1 << r)?.collect();
    let mut verts = Vec::with_capacity(maps.len() * abstract_paths.len());
    for map in &maps {
        verts.extend(abstract_paths.iter().map(|&v| map.eval(v)));
    }
    Ok(Decomposition::flat(dim, 1 << t, verts))
}

fn build(plan: &Plan) -> Result<Decomposition> {
    let small = |x: u64| u32::try_from(x).map_err(|_| Error::Unsupported(format!("dimension {x}")));
    match plan {
        Plan::Trivial { q } => Decomposition::edges(small(*q)?),
        Plan::BasePartition { q } => Decomposition::base_partition(small(*q)?),
        Plan::P2InQ3 => Ok(p2_in_q3()),
        &Plan::SharpBase {
            t,
            r,
            rungs,
            k_out,
            k_in,
            ..
        } => sharp_base(t, r, rungs, k_out, k_in),
        Plan::Stride { t, r, copies, base } => {
            let high = Arc::new(ham_split(*r, *t)?);
            let mut cur = build(base)?;
            for _ in 0..*copies {
                cur = combine_shared(Arc::new(cur), high.clone())?;
            }
            Ok(cur)
        }
        Plan::GcdReduce { d, inner } => {
            let inner = build(inner)?;
            let factor = small(*d)?;
            let dim = factor
                .checked_mul(inner.dim)
                .filter(|&x| x <= cube::MAX_DIM)
                .ok_or_else(|| {
                    Error::Unsupported(format!("stretched dimension {d}*{}", inner.dim))
                })?;
            let count = inner.count << ((factor - 1) * inner.dim);
            Ok(Decomposition {
                dim,
                path_len: factor * inner.path_len,
                count,
                body: Body::Stretched {
                    inner: Arc::new(inner),
                    factor,
                },
            })
        }
    }
}

impl Decomposition {
    /// Build the lazy decomposition described by `plan`, refusing cubes
    /// beyond `limits`.
    pub fn from_plan(plan: &Plan, limits: &Limits) -> Result<Self> {
        plan.validate()?;
        limits.check_cube(
            plan.dim(),
            &format!("P_{} in Q_{}", plan.path_len(), plan.dim()),
        )?;
        build(plan)
    }
}

/// `P_{2^t}` in `Q_q` for odd `q > 2^t` (or `t = 0`).
pub fn power2_decompose(t: u32, q: u64, limits: &Limits) -> Result<Decomposition> {
    Decomposition::from_plan(&power2_plan(t, q)?, limits)
}

/// An explicit `P_m` decomposition of `Q_q` for odd `q`.
pub fn decompose(m: u64, q: u64, limits: &Limits) -> Result<Decomposition> {
    Decomposition::from_plan(&decompose_plan(m, q)?, limits)
}
