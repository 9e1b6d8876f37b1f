//! Tile assembly workbench: an aTAM simulator (2D and two-plane 3D), compilers
//! from colored patterns to tile systems, and a diagonalization pipeline over
//! strength-free tile systems.

pub mod compilers;
pub mod diag;
pub mod model;
pub mod patterns;
pub mod sim;
pub mod verify;

pub use model::{
    attachment_strength, glue_binds, Assembly, Dim, Dir, Glue, Loc, ModelError, TileAssemblySystem,
    TileSet, TileType,
};
pub use patterns::{Pattern, PatternError};
pub use sim::{Policy, SimState};
