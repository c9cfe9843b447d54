pub mod diagram;
pub mod error;
pub mod poly;
pub mod smoothing;
pub mod moves;
pub mod gdf;
pub mod invariants;
pub mod fuzz;
