pub mod bounds;
pub mod channel;
pub mod codes;
pub mod decode;
pub mod galois;
pub mod matgf;
pub mod spec;
pub mod tables;
pub mod weave;
