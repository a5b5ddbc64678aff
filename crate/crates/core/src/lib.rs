//! Quantum expanders built from random unitaries.
//!
//! The combinatorial and symbolic parts ([`cayley`], [`sd`], [`ratfn`])
//! build without `std`. Dense linear algebra, Haar sampling and the channel
//! spectra need the default `std` feature.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cayley;
pub mod error;
pub mod ratfn;
pub mod sd;

#[cfg(feature = "std")]
pub mod channel;
#[cfg(feature = "std")]
pub mod edge;
#[cfg(feature = "std")]
pub mod matrix;
#[cfg(feature = "std")]
pub mod spectrum;

pub use error::{Error, Result};
