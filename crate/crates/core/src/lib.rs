pub mod anticonc;
pub mod circuit;
pub mod error;
pub mod etr;
pub mod grid;
pub mod hardpoly;
pub mod norms;
pub mod params;
pub mod poly;
pub mod robust;
pub mod scalar;
pub mod search;
pub mod universal;
