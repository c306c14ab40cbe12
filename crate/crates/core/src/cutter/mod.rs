//! Making a curve part of a triangulation, and cutting a surface along it.
//!
//! [`subdivide_along`] walks a polyline through a triangulated polygon and
//! splits every triangle it meets, following a fixed table of cases, so that
//! the curve becomes a path of edges. [`cut_open`] then duplicates a path or
//! cycle of edges on a surface and records how the two copies are glued.

mod curve;
mod subdivide;
mod surface;

pub use curve::{transversalize, Curve};
pub use subdivide::{subdivide_along, Case, CrossingEvent, Locus, Subdivided};
pub use surface::{cut_open, Cut, EdgeLabel, Surface};

use crate::complex::{ComplexError, EdgeId, VertexId};
use crate::scheme::SchemeError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CutError {
    #[error("curve needs at least two distinct points")]
    CurveTooShort,
    #[error("curve leaves the polygon")]
    CurveNotInPolygon,
    #[error("curve runs along part of an edge")]
    CurveNotTransversal,
    #[error("curve intersects itself")]
    CurveSelfIntersects,
    #[error("closed curve does not return to its base point")]
    CurveNotClosed,
    #[error("polygon has no coordinates")]
    NoCoordinates,
    #[error("edges do not form a simple interior path or cycle: {0}")]
    CurveNotSubcomplex(String),
    #[error("cutting along the curve disconnects the surface")]
    CutDisconnects,
    #[error("edge {0} is a loop")]
    LoopEdge(EdgeId),
    #[error("vertex {0} has no triangle")]
    IsolatedVertex(VertexId),
    #[error("surface is not a disc: {0}")]
    NotADisc(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}
