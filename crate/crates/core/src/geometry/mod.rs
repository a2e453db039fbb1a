//! H-representation polyhedra, finite unions of them, axis-aligned boxes,
//! and the LP oracle every other module builds on.
//!
//! All polyhedra are closed: `{x : C x <= d}`. Emptiness is representable
//! syntactically (contradictory constraints) and canonically (a union with
//! no parts); union-level operations canonicalize by dropping empty parts.

mod hyperbox;
pub mod json;
pub mod lp;
mod polygon;
mod polyhedron;
mod projection;
mod union;

pub use hyperbox::{Hyperbox, Interval};
pub use polyhedron::{HalfSpace, Polyhedron};
pub use union::PolyUnion;

/// Global tolerance for LP feasibility, redundancy, and membership.
pub const EPS_FEAS: f64 = 1e-9;
