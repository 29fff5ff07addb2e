#![allow(clippy::needless_range_loop)]

pub mod chern;
pub mod connection;
pub mod examples;
pub mod constructions;
pub mod gauge;
pub mod groebner;
pub mod lie;
pub mod linsolve;
pub mod par;
pub mod poly;
pub mod random;
pub mod report;
pub mod scenario;
pub mod runner;
