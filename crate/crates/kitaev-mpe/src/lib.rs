//! Exact simulator and analysis toolkit for the closed Kitaev chain with
//! variable-range pairing: quantum Fisher information of nonlocal string
//! operators, winding numbers, fidelity susceptibilities, and finite-size
//! scaling of multipartite entanglement.

pub mod analysis;
pub mod correlators;
pub mod error;
pub mod model;
pub mod oracle;
pub mod output;
pub mod sweep;

pub use error::{Error, Result};

/// Tool version echoed in output provenance headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
