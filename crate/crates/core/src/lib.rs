//! Batch compiler for randomized multiple-choice assignments written in the
//! Spike quiz language.

pub mod blocks;
pub mod cli;
pub mod emit;
pub mod engines;
pub mod expand;
pub mod interp;
pub mod project;
pub mod rng;
