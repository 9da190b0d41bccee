pub mod adversary;
pub mod checker;
pub mod engine;
pub mod geometry;
pub mod precise;
pub mod protocols;
