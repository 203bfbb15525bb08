pub mod kernel;
pub mod lts;
pub mod omega;
pub mod prob;
pub mod tree;
pub mod word;
