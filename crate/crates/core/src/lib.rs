//! Exact forward images and preimages of polyhedral sets under feed-forward
//! neural networks with piecewise-affine activations.
//!
//! The crate is organized bottom-up:
//!
//! - [`geometry`]: H-polyhedra, unions of polyhedra, boxes, and the linear
//!   programming oracle behind emptiness, support, and redundancy queries.
//! - [`network`]: affine layers, activations, evaluation, and the JSON format.
//! - [`propagate`]: exact forward images through activations and networks.
//! - [`preimage`]: exact backward images (preimages), plus a single-branch
//!   under-approximation.
//! - [`intervals`]: box arithmetic, box over-approximated preimages, and the
//!   forward-backward interval contractor for monotone activations.
//!
//! All sets are closed. A set union is a list of polyhedra that may overlap.

pub mod error;
pub mod geometry;
pub mod intervals;
pub mod network;
pub mod preimage;
pub mod propagate;

pub use error::{Error, Result};
pub use geometry::{HalfSpace, Hyperbox, Interval, PolyUnion, Polyhedron, EPS_FEAS};
pub use intervals::{forward_backward_contract, Contraction, NeuronTrace};
pub use network::{Activation, AffineMap, Layer, Network};
pub use preimage::{preimage_network, preimage_underapprox, SearchOrder};
pub use propagate::network_image;
