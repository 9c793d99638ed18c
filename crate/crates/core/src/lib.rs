pub mod activation;
pub mod error;
pub mod ffnn;
pub mod gradcheck;
pub mod harness;
pub mod lstm;
pub mod params;
pub mod rnn;
pub mod topology;
pub mod vanish;
pub mod variants;

pub use activation::Activation;
pub use error::{Error, Result};
pub use params::{Deltas, Params};
pub use topology::{Delay, NetworkSpec, UnitId, UnitRole};
