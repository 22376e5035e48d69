pub mod error;
pub mod filtration;
pub mod hardy;
pub mod harness;
pub mod harmonics;
pub mod multiplier;
pub mod oracles;
pub mod rng;

pub use error::{Error, Result};
