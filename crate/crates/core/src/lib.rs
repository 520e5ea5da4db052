//! Flip distance in simple polygons, rectilinear Steiner arborescences, and
//! the gadget reduction that turns one into the other.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: exact rationals and orientation predicates.
//! - [`triangulation`]: simple polygons, triangulations, flips.
//! - [`search`]: exact flip distance over the implicit flip graph.
//! - [`double_chain`]: double chains, their extreme triangulations and kernels.
//! - [`rsa`]: arborescences, slides, the exact solver and the YRSA perturbation.
//! - [`chain_path`]: chain paths on the single-apex double chain, traces and costs.
//! - [`reduction`]: the full polygon instance built from a YRSA instance.
//! - [`convert`]: arborescence to flip sequence and back.
//! - [`io`] and [`svg`]: text file formats and rendering.

pub mod chain_path;
pub mod convert;
pub mod double_chain;
pub mod error;
pub mod geometry;
pub mod io;
pub mod reduction;
pub mod rsa;
pub mod search;
pub mod svg;
pub mod triangulation;

pub use error::{Error, Result};
pub use geometry::{ExactPoint, Orientation, Rat};
pub use triangulation::{Diagonal, FlipSequence, SimplePolygon, Triangulation};
