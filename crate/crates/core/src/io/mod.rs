//! Files: the binary scene container, object models, PLY export and the run
//! configuration.

pub mod config;
pub mod container;
pub mod object;
pub mod ply;

pub use config::RunConfig;
pub use container::{
    read_scene_container, write_scene_container, SceneContainer, StoredPair, StoredRoom,
};
pub use object::{load_catalog, read_object, write_xyz, ObjectCatalog};
pub use ply::{export_ply, export_ply_room};
