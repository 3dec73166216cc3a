pub mod gen;
pub mod reconstruct;
pub mod resources;
pub mod solve;
