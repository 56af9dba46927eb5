//! Decompositions of odd-dimensional hypercubes `Q_q` into paths `P_m`.
//!
//! Vertices of `Q_q` are `u64` words; coordinate `j` (0-based) is bit `j`.
//! Large decompositions are lazy: a [`Decomposition`] describes how to
//! emit its paths and streams them through a callback, so emission and
//! verification stay within the edge bitmap's memory.

pub mod cube;
pub mod decompose;
pub mod dvop;
pub mod error;
pub mod format;
pub mod ham;
pub mod transforms;
pub mod verify;

pub use cube::{CycleEmbedding, EdgeRef, PathEmbedding, Vertex};
pub use decompose::{check_divisibility, decompose, decompose_plan, Decomposition, Plan};
pub use error::{Error, Result};
pub use verify::{PathVerifier, Report};

/// Guards on materialization. Exceeding them yields [`Error::ResourceLimit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest edge count of a cube that may be emitted or verified.
    pub max_edges: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_edges: 1 << 28 }
    }
}

impl Limits {
    pub fn new(max_edges: u64) -> Self {
        Limits { max_edges }
    }

    /// Accept `Q_q` for materialization: `q <= 30` and `|E(Q_q)| <= max_edges`.
    pub fn check_cube(&self, q: u64, what: &str) -> Result<()> {
        let needed = if q < 100 {
            cube::edge_count(q as u32)
        } else {
            u128::MAX
        };
        if q > cube::MAX_MATERIALIZED_DIM as u64 {
            return Err(Error::limit(
                format!(
                    "{what} (dimension {q} above {})",
                    cube::MAX_MATERIALIZED_DIM
                ),
                needed,
                cube::edge_count(cube::MAX_MATERIALIZED_DIM).min(self.max_edges as u128),
            ));
        }
        if needed > self.max_edges as u128 {
            return Err(Error::limit(what, needed, self.max_edges as u128));
        }
        Ok(())
    }
}
