//! Stretched (`m*G`) and sharp (`m#G`) hypercubes and their embedding
//! families into larger hypercubes.
//!
//! Layout conventions:
//! - `Q_{mq}` is viewed as `q` blocks of `m` bits; block `s` occupies bits
//!   `s*m .. (s+1)*m`.
//! - `Q_{2q}` used by the doubling maps is `(low q bits, high q bits)`.
//! - `Q_{m+q}` used by the sharp maps keeps the `Q_m` factor in the low
//!   `m` bits and the `Q_q` factor above it.

use crate::cube::{
    self, check_dim, check_vertex, even_word, f_point, force_even, force_odd, low_ones, parity,
    EdgeRef, Vertex,
};
use crate::error::{Error, Result};

/// A vertex of `m*Q_q`.
///
/// Interior points of a stretched edge are always named from the
/// even-parity endpoint; use [`StretchedVertex::on_edge`] to build them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StretchedVertex {
    Base(Vertex),
    /// Point `step` (1 ..= m-1) on the path from the even vertex `base`
    /// across coordinate `coord`.
    Inner {
        coord: u32,
        step: u32,
        base: Vertex,
    },
}

impl StretchedVertex {
    /// Point `k` (0 ..= m) on the `m`-path that replaces the edge leaving
    /// `from` across coordinate `j`, counted from `from`.
    pub fn on_edge(m: u32, from: Vertex, j: u32, k: u32) -> Self {
        debug_assert!(k <= m);
        if k == 0 {
            StretchedVertex::Base(from)
        } else if k == m {
            StretchedVertex::Base(cube::flip(from, j))
        } else if parity(from) == 0 {
            StretchedVertex::Inner {
                coord: j,
                step: k,
                base: from,
            }
        } else {
            StretchedVertex::Inner {
                coord: j,
                step: m - k,
                base: cube::flip(from, j),
            }
        }
    }

    /// Rewrite any `(j, k, alpha)` name into the canonical one.
    pub fn normalized(self, m: u32) -> Self {
        match self {
            StretchedVertex::Base(_) => self,
            StretchedVertex::Inner { coord, step, base } => {
                StretchedVertex::on_edge(m, base, coord, step)
            }
        }
    }
}

/// Vertices of `m*Q_q` in a fixed order: the `2^q` cube vertices, then the
/// interior points edge by edge.
pub fn stretched_vertices(m: u32, q: u32) -> impl Iterator<Item = StretchedVertex> {
    let bases = (0..1u64 << q).map(StretchedVertex::Base);
    let inner = cube::edges(q).flat_map(move |e| {
        (1..m).map(move |k| StretchedVertex::on_edge(m, e.base(), e.coord(), k))
    });
    bases.chain(inner)
}

/// Edges of `m*Q_q`, `m` per edge of `Q_q`.
pub fn stretched_edges(m: u32, q: u32) -> impl Iterator<Item = (StretchedVertex, StretchedVertex)> {
    cube::edges(q).flat_map(move |e| {
        (1..=m).map(move |k| {
            (
                StretchedVertex::on_edge(m, e.base(), e.coord(), k - 1),
                StretchedVertex::on_edge(m, e.base(), e.coord(), k),
            )
        })
    })
}

/// A vertex of `m#Q_q`: the two copies of `Q_q` and the rung interiors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SharpVertex {
    Prime(Vertex),
    DoublePrime(Vertex),
    /// Point `step` (1 ..= m-1) on the rung from `Prime(base)` to `DoublePrime(base)`.
    Rung {
        base: Vertex,
        step: u32,
    },
}

impl SharpVertex {
    /// Point `j` (0 ..= m) on the rung of `beta`.
    pub fn at(m: u32, beta: Vertex, j: u32) -> Self {
        debug_assert!(j <= m);
        if j == 0 {
            SharpVertex::Prime(beta)
        } else if j == m {
            SharpVertex::DoublePrime(beta)
        } else {
            SharpVertex::Rung {
                base: beta,
                step: j,
            }
        }
    }

    /// `(rung position, Q_q vertex)`.
    pub fn split(self, m: u32) -> (u32, Vertex) {
        match self {
            SharpVertex::Prime(b) => (0, b),
            SharpVertex::DoublePrime(b) => (m, b),
            SharpVertex::Rung { base, step } => (step, base),
        }
    }
}

pub fn sharp_vertices(m: u32, q: u32) -> impl Iterator<Item = SharpVertex> {
    (0..1u64 << q).flat_map(move |b| (0..=m).map(move |j| SharpVertex::at(m, b, j)))
}

/// Edges of `m#Q_q`: both copies of `Q_q`, then the rungs.
pub fn sharp_edges(m: u32, q: u32) -> impl Iterator<Item = (SharpVertex, SharpVertex)> {
    let prime = cube::edges(q).map(|e| {
        let (a, b) = e.endpoints();
        (SharpVertex::Prime(a), SharpVertex::Prime(b))
    });
    let double = cube::edges(q).map(|e| {
        let (a, b) = e.endpoints();
        (SharpVertex::DoublePrime(a), SharpVertex::DoublePrime(b))
    });
    let rungs = (0..1u64 << q).flat_map(move |b| {
        (1..=m).map(move |j| (SharpVertex::at(m, b, j - 1), SharpVertex::at(m, b, j)))
    });
    prime.chain(double).chain(rungs)
}

/// A vertex map from a source graph into a hypercube.
pub trait Embedding {
    type Source: Copy;

    fn target_dim(&self) -> u32;

    fn eval(&self, v: Self::Source) -> Vertex;
}

/// `F_gamma: m*Q_q -> Q_{mq}` for odd `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OddStretch {
    m: u32,
    q: u32,
    gamma: Vertex,
}

impl OddStretch {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn gamma(&self) -> Vertex {
        self.gamma
    }

    /// `(a_1^m, .., a_q^m)`: every set coordinate becomes a block of ones.
    #[inline]
    fn spread(&self, alpha: Vertex) -> Vertex {
        let block = low_ones(self.m);
        let mut out = 0;
        let mut rest = alpha;
        while rest != 0 {
            let s = rest.trailing_zeros();
            out |= block << (s * self.m);
            rest &= rest - 1;
        }
        out
    }

    /// Image of the `m`-path leaving `from` across coordinate `j`, without
    /// its first vertex, appended to `out`.
    #[inline]
    pub fn extend_edge(&self, from: Vertex, j: u32, out: &mut Vec<Vertex>) {
        let (even, reversed) = if parity(from) == 0 {
            (from, false)
        } else {
            (cube::flip(from, j), true)
        };
        let base = self.spread(even) ^ self.gamma;
        let shift = j * self.m;
        for k in 1..=self.m {
            let step = if reversed { self.m - k } else { k };
            out.push(base ^ (low_ones(step) << shift));
        }
    }

    /// Image of a whole path of `Q_q`: a path of length `m * len` in `Q_{mq}`.
    pub fn stretch_path(&self, verts: &[Vertex], out: &mut Vec<Vertex>) {
        out.clear();
        out.push(self.eval(StretchedVertex::Base(verts[0])));
        for w in verts.windows(2) {
            self.extend_edge(w[0], (w[0] ^ w[1]).trailing_zeros(), out);
        }
    }
}

impl Embedding for OddStretch {
    type Source = StretchedVertex;

    fn target_dim(&self) -> u32 {
        self.m * self.q
    }

    fn eval(&self, v: StretchedVertex) -> Vertex {
        match v.normalized(self.m) {
            StretchedVertex::Base(alpha) => self.spread(alpha) ^ self.gamma,
            StretchedVertex::Inner { coord, step, base } => {
                self.spread(base) ^ (low_ones(step) << (coord * self.m)) ^ self.gamma
            }
        }
    }
}

/// `F_gamma` for odd `m`; `gamma` packs `q` even-parity `m`-bit blocks.
pub fn stretch_map_odd(m: u32, q: u32, gamma: Vertex) -> Result<OddStretch> {
    if m.is_multiple_of(2) {
        return Err(Error::param(format!("odd stretch needs odd m, got {m}")));
    }
    check_dim(q)?;
    let target = m
        .checked_mul(q)
        .filter(|&d| d <= cube::MAX_DIM)
        .ok_or_else(|| Error::param(format!("{m}*Q_{q} does not fit in 64 bits")))?;
    check_vertex(target, gamma)?;
    for s in 0..q {
        let block = (gamma >> (s * m)) & low_ones(m);
        if parity(block) != 0 {
            return Err(Error::index(format!(
                "block {s} of gamma {gamma:#x} has odd parity"
            )));
        }
    }
    Ok(OddStretch { m, q, gamma })
}

/// The `i`-th element of `B_m^q` (`q` even-parity blocks of width `m`).
pub fn odd_stretch_gamma(m: u32, q: u32, i: u64) -> Vertex {
    let width = m - 1;
    (0..q).fold(0, |acc, s| {
        let chunk = (i >> (s * width)) & low_ones(width);
        acc | (even_word(m, chunk) << (s * m))
    })
}

/// All `2^((m-1)q)` odd-stretch maps, partitioning `E(Q_{mq})`.
pub fn odd_stretch_family(m: u32, q: u32) -> Result<impl Iterator<Item = OddStretch>> {
    stretch_map_odd(m, q, 0)?;
    Ok((0..1u64 << ((m - 1) * q)).map(move |i| OddStretch {
        m,
        q,
        gamma: odd_stretch_gamma(m, q, i),
    }))
}

/// `F_gamma^eps: 2*Q_q -> Q_{2q}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DoubleStretch {
    q: u32,
    gamma: Vertex,
    eps: bool,
}

impl DoubleStretch {
    pub fn gamma(&self) -> Vertex {
        self.gamma
    }

    pub fn eps(&self) -> bool {
        self.eps
    }

    #[inline]
    fn pair(&self, low: Vertex, high: Vertex) -> Vertex {
        low | ((high ^ self.gamma) << self.q)
    }
}

impl Embedding for DoubleStretch {
    type Source = StretchedVertex;

    fn target_dim(&self) -> u32 {
        2 * self.q
    }

    fn eval(&self, v: StretchedVertex) -> Vertex {
        match v.normalized(2) {
            StretchedVertex::Base(alpha) => self.pair(alpha, alpha),
            StretchedVertex::Inner { coord, base, .. } => {
                let (even, odd) = (force_even(base, coord), force_odd(base, coord));
                if self.eps {
                    self.pair(odd, even)
                } else {
                    self.pair(even, odd)
                }
            }
        }
    }
}

pub fn stretch_map_two(q: u32, gamma: Vertex, eps: bool) -> Result<DoubleStretch> {
    check_dim(q)?;
    if 2 * q > cube::MAX_DIM {
        return Err(Error::param(format!("2*Q_{q} does not fit in 64 bits")));
    }
    check_vertex(q, gamma)?;
    if parity(gamma) != 0 {
        return Err(Error::index(format!("gamma {gamma:#x} has odd parity")));
    }
    Ok(DoubleStretch { q, gamma, eps })
}

/// A composite embedding `m*Q_q -> Q_{mq}` for `m = 2^a * m_odd`: one odd
/// stretch followed by `a` doublings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StretchEmbedding {
    m: u32,
    q: u32,
    odd: OddStretch,
    doublings: Vec<DoubleStretch>,
}

impl StretchEmbedding {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Image of the `m`-path replacing the edge leaving `from` across `j`,
    /// all `m + 1` vertices, starting at the image of `from`.
    pub fn edge_image(&self, from: Vertex, j: u32) -> Vec<Vertex> {
        let mut path = vec![self.odd.eval(StretchedVertex::Base(from))];
        self.odd.extend_edge(from, j, &mut path);
        for d in &self.doublings {
            let mut next = Vec::with_capacity(2 * path.len() - 1);
            next.push(d.eval(StretchedVertex::Base(path[0])));
            for w in path.windows(2) {
                let c = (w[0] ^ w[1]).trailing_zeros();
                next.push(d.eval(StretchedVertex::on_edge(2, w[0], c, 1)));
                next.push(d.eval(StretchedVertex::Base(w[1])));
            }
            path = next;
        }
        path
    }
}

impl Embedding for StretchEmbedding {
    type Source = StretchedVertex;

    fn target_dim(&self) -> u32 {
        self.m * self.q
    }

    fn eval(&self, v: StretchedVertex) -> Vertex {
        match v.normalized(self.m) {
            StretchedVertex::Base(alpha) => {
                let mut x = self.odd.eval(StretchedVertex::Base(alpha));
                for d in &self.doublings {
                    x = d.eval(StretchedVertex::Base(x));
                }
                x
            }
            StretchedVertex::Inner { coord, step, base } => {
                self.edge_image(base, coord)[step as usize]
            }
        }
    }
}

/// A family of `2^((m-1)q)` embeddings of `m*Q_q` partitioning `E(Q_{mq})`.
///
/// `m` is factored as `2^a * m_odd`; every member applies an odd stretch
/// first and then `a` doublings, enumerated odd-map major.
pub fn stretch_decomposition(
    m: u32,
    q: u32,
    limits: &crate::Limits,
) -> Result<Vec<StretchEmbedding>> {
    if m == 0 {
        return Err(Error::param("stretch factor must be positive"));
    }
    check_dim(q)?;
    let target = m as u64 * q as u64;
    limits.check_cube(target, &format!("stretch family {m}*Q_{q}"))?;
    let target = target as u32;
    let (a, m_odd) = (m.trailing_zeros(), m >> m.trailing_zeros());
    // Family size is 2^(mq - q); every member is materialized.
    let members = 1u128 << (target - q);
    if members > limits.max_edges as u128 {
        return Err(Error::limit(
            format!("stretch family {m}*Q_{q}"),
            members,
            limits.max_edges as u128,
        ));
    }

    let mut family: Vec<StretchEmbedding> = odd_stretch_family(m_odd, q)?
        .map(|odd| StretchEmbedding {
            m: m_odd,
            q,
            odd,
            doublings: Vec::new(),
        })
        .collect();
    let mut level = m_odd * q;
    for _ in 0..a {
        let maps: Vec<DoubleStretch> = (0..1u64 << (level - 1))
            .flat_map(|i| {
                let gamma = even_word(level, i);
                [false, true].map(|eps| DoubleStretch {
                    q: level,
                    gamma,
                    eps,
                })
            })
            .collect();
        family = family
            .into_iter()
            .flat_map(|e| {
                maps.iter().map(move |d| {
                    let mut doublings = e.doublings.clone();
                    doublings.push(*d);
                    StretchEmbedding {
                        m: e.m * 2,
                        doublings,
                        ..e
                    }
                })
            })
            .collect();
        level *= 2;
    }
    debug_assert!(family.iter().all(|e| e.m == m));
    Ok(family)
}

/// `F_gamma: m#Q_q -> Q_{m+q}`, `beta_<j> -> (f_gamma(j), beta)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SharpMap {
    m: u32,
    q: u32,
    gamma: Vertex,
}

impl SharpMap {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn gamma(&self) -> Vertex {
        self.gamma
    }
}

impl Embedding for SharpMap {
    type Source = SharpVertex;

    fn target_dim(&self) -> u32 {
        self.m + self.q
    }

    #[inline]
    fn eval(&self, v: SharpVertex) -> Vertex {
        let (j, beta) = v.split(self.m);
        f_point(self.gamma, j) | (beta << self.m)
    }
}

pub fn sharp_map(m: u32, q: u32, gamma: Vertex) -> Result<SharpMap> {
    if m.is_multiple_of(2) {
        return Err(Error::param(format!(
            "sharp embedding needs odd m, got {m}"
        )));
    }
    check_dim(q)?;
    if m + q > cube::MAX_DIM {
        return Err(Error::param(format!("{m}#Q_{q} does not fit in 64 bits")));
    }
    check_vertex(m, gamma)?;
    if parity(gamma) != 0 {
        return Err(Error::index(format!("gamma {gamma:#x} has odd parity")));
    }
    Ok(SharpMap { m, q, gamma })
}

/// The `2^(m-1)` sharp maps, one per even `gamma` in `Q_m`.
pub fn sharp_family(m: u32, q: u32) -> Result<impl Iterator<Item = SharpMap>> {
    sharp_map(m, q, 0)?;
    Ok((0..1u64 << (m - 1)).map(move |i| SharpMap {
        m,
        q,
        gamma: even_word(m, i),
    }))
}

/// A system of vertex-originating paths on a graph whose vertices are
/// `0 .. vertex_count`, together with the edges it leaves unused.
pub trait PathSystem {
    type Complement: Clone;

    fn vertex_count(&self) -> u64;

    fn path_len(&self) -> u32;

    /// Vertices of the path originating at `v`, starting with `v`.
    fn path_from(&self, v: Vertex, out: &mut Vec<Vertex>);

    fn complement(&self) -> Self::Complement;
}

/// Paths of `m#G` built from two path systems on `G`, stored flat.
#[derive(Clone, Debug)]
pub struct SharpConcat<C> {
    pub rungs: u32,
    pub path_len: u32,
    /// `path_len + 1` vertices per path, one path per vertex of `G` in order.
    pub verts: Vec<SharpVertex>,
    /// Unused edges of the `G'` copy.
    pub prime_complement: C,
    /// Unused edges of the `G''` copy.
    pub double_prime_complement: C,
}

impl<C> SharpConcat<C> {
    pub fn paths(&self) -> impl Iterator<Item = &[SharpVertex]> {
        self.verts.chunks(self.path_len as usize + 1)
    }

    pub fn len(&self) -> usize {
        self.verts.len() / (self.path_len as usize + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }
}

/// For each vertex `v`: the `outer` path of `v` reversed inside `G'`, the
/// rung from `v'` to `v''`, then the `inner` path of `v` inside `G''`.
pub fn concat_dvop_paths<S: PathSystem>(
    m: u32,
    outer: &S,
    inner: &S,
) -> Result<SharpConcat<S::Complement>> {
    if m == 0 {
        return Err(Error::param("rung length must be positive"));
    }
    if outer.vertex_count() != inner.vertex_count() {
        return Err(Error::param("path systems live on different vertex sets"));
    }
    let (k1, k2) = (outer.path_len(), inner.path_len());
    let path_len = k1 + m + k2;
    let n = outer.vertex_count();
    let mut verts = Vec::with_capacity(n as usize * (path_len as usize + 1));
    let mut buf = Vec::new();
    for v in 0..n {
        outer.path_from(v, &mut buf);
        debug_assert_eq!(buf.len(), k1 as usize + 1);
        verts.extend(buf.iter().rev().map(|&x| SharpVertex::Prime(x)));
        verts.extend((1..m).map(|j| SharpVertex::Rung { base: v, step: j }));
        inner.path_from(v, &mut buf);
        verts.extend(buf.iter().map(|&x| SharpVertex::DoublePrime(x)));
    }
    Ok(SharpConcat {
        rungs: m,
        path_len,
        verts,
        prime_complement: outer.complement(),
        double_prime_complement: inner.complement(),
    })
}

/// Check that a family of embeddings sends the given source edges onto
/// `E(Q_target)` exactly once each.
pub fn family_partitions<E, I>(family: &[E], source_edges: I) -> Result<bool>
where
    E: Embedding,
    I: Fn() -> Box<dyn Iterator<Item = (E::Source, E::Source)>>,
{
    let Some(first) = family.first() else {
        return Ok(false);
    };
    let q = first.target_dim();
    let mut seen = crate::verify::EdgeBitmap::new(q)?;
    for map in family {
        for (a, b) in source_edges() {
            let Some(e) = EdgeRef::between(map.eval(a), map.eval(b)) else {
                return Ok(false);
            };
            if !seen.insert(e) {
                return Ok(false);
            }
        }
    }
    Ok(seen.count() as u128 == cube::edge_count(q))
}
