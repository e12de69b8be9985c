mod dsu;
pub mod experiment;
pub mod lattice;
pub mod surface;
pub mod topotype;
pub mod tracks;
