//! Diversity gain of one-shot communication over molecular timing
//! channels.
//!
//! A transmitter releases `M` particles at once at one of a few release
//! times; each particle reaches the receiver after an i.i.d. random delay.
//! This crate computes how fast the detection error decays with `M` for
//! the maximum-likelihood, sample-mean (linear) and first-arrival
//! detectors, and checks those exponents with a seeded Monte Carlo
//! simulator.

pub mod cli;
pub mod detectors;
pub mod distributions;
pub mod diversity;
pub mod numerics;
pub mod simulation;

pub use distributions::{NoiseDensity, NoiseModel};
pub use diversity::{DiversityReport, Exponent};
