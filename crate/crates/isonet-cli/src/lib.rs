//! Command-line front end for the isonet geometry library: flat key-value job
//! configs, OBJ/PLY quad-mesh export with optional stereographic projection,
//! and machine-readable verification reports.

pub mod config;
pub mod error;
pub mod mesh;
pub mod pipeline;

pub use config::{Family, JobConfig, Projection};
pub use error::{CliError, Result};
pub use mesh::QuadMesh;
pub use pipeline::{run_job, verify_mesh, JobOutput};
