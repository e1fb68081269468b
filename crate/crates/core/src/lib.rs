//! Edge-disjoint linkages, splitting-off and orientations, on finite
//! multigraphs and on finitely presented locally finite infinite graphs.
//!
//! Every constructive routine returns a certificate that the independent
//! checkers in [`certify`] can replay without touching solver code.

pub mod certify;
pub mod compatible;
pub mod connectivity;
pub mod decomposition;
pub mod error;
pub mod family;
pub mod fan;
pub mod flow;
pub mod gen;
pub mod graph;
pub mod immersion;
pub mod infinite;
pub mod io;
pub mod lifting;
pub mod linkage;
pub mod orient;
pub mod rays;
pub mod rounds;
pub mod routing;
pub mod truncation;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{EdgeId, MultiGraph, VertexId};
pub use walk::Walk;
