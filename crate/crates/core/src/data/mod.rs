//! Dataset loading/saving and synthetic point-cloud generators.

pub mod io;
pub mod npy;
pub mod synth;
