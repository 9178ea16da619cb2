//! Procedural "random room" scene pairs built from object point clouds,
//! plus an object-level contrastive loss over the shared instances.
//!
//! The generation path is
//! [`augment`] (per-object) → [`layout`] (height-map placement) →
//! [`scene`] (floor/walls, scene augmentation, subsampling, pairing),
//! with [`io`] for the on-disk container and [`ocl`] for the loss.

// NaN must fail validation, so checks are written as `!(x > 0.0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod augment;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod io;
pub mod layout;
pub mod ocl;
pub mod pipeline;
pub mod rng;
pub mod scene;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::{Aabb, Point3, PointCloud};
pub use layout::{generate_layout, Layout, LayoutConfig};
pub use rng::Rng;
pub use scene::{generate_pair, generate_room, RoomScene, SceneConfig, ScenePair};
