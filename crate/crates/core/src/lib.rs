//! Cauchy's hole-expansion proof of Euler's formula, made executable.
//!
//! * [`complex`]: cell complexes, counts and validation.
//! * [`scheme`]: edge words, planar polygons and quotients.
//! * [`engine`]: triangle removal with operations I, II and III.
//! * [`lift`]: a removal schedule that never gets stuck, built from a
//!   height function on a triangulated polygon.
//! * [`cutter`]: sub-triangulating along a curve and cutting open.
//! * [`surface`] and [`polyhedron`]: generators for the standard surfaces
//!   and convex polyhedra.

pub mod complex;
pub mod cutter;
pub mod engine;
pub mod lift;
pub mod oracle;
pub mod polyhedron;
pub mod rational;
pub mod sample;
pub mod scheme;
pub mod surface;
pub mod unionfind;

pub use complex::{CellCounts, Complex, EdgeId, TriId, Triangle, VertexId};
pub use cutter::{cut_open, subdivide_along, transversalize, Curve, CutError, Surface};
pub use engine::{HoleState, InvalidReason, Mode, OpKind, Rules, Seed, Trace};
pub use lift::{lift, verify_theorem1, LiftOptions, Schedule, Theorem1Report};
pub use polyhedron::{descartes_check, project_schlegel, ConvexPolyhedron3, Point3};
pub use rational::{Point2, Q};
pub use scheme::{
    boundary_chi, parse_word, quotient, EdgeWord, IdentificationScheme, PlanarPolygon,
};
pub use surface::{generate, lhuilier_expected, SurfaceKind, SurfaceSpec};
