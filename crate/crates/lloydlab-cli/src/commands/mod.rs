pub mod bench;
pub mod cluster;
pub mod compare;
pub mod gen;
