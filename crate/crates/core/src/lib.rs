pub mod angle;
pub mod caps;
pub mod descriptor;
pub mod error;
pub mod fc;
pub mod finite;
pub mod group;
pub mod linalg;
pub mod montecarlo;
pub mod openfc;
pub mod perm;
pub mod torus;
pub mod weyl;
