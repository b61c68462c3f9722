//! Modified extended exponential (MExED) lifetime distribution.

pub mod bayes;
pub mod competitors;
pub mod data;
pub mod dist;
pub mod error;
pub mod io;
mod linalg;
pub mod mle;
pub mod optim;
pub mod quad;
pub mod sim;
pub mod special;

pub use dist::{Dataset, MomentMethod, MomentSpec, Params};
pub use error::{Error, Result};
