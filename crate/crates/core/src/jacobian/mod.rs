//! The Jacobian torus `R^n / Lambda` and its Namikawa decompositions.

pub mod admissible;
pub mod cell;
pub mod decomposition;
pub mod lattice;
pub mod locate;
pub mod poset;
pub mod refine;

pub use admissible::{admissible_halfspaces, check_admissible, is_admissible, Halfspace, Surd, SurdZonotope};
pub use cell::{cell_zonotope, Cell, Functional, Hull, Zonotope, ZonotopeKey};
pub use decomposition::{
    namikawa_decomposition, namikawa_decomposition_with, BuildOptions, Decomposition, FaceCheck, Kind, ValidationReport,
};
pub use lattice::LatticeData;
pub use locate::CellLocation;
pub use poset::{face_poset, FacePoset, HasseEdge};
pub use refine::{refinement_map, Refinement};
