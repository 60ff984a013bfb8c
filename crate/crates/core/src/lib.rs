pub mod decode;
pub mod geometry;
pub mod harness;
pub mod imaging;
pub mod nirsim;
pub mod payload;
pub mod thermsim;
