pub mod covering;
pub mod dimcmp;
pub mod error;
pub mod families;
pub mod group;
pub mod probes;
pub mod setalg;
pub mod tower;

pub use error::{Error, Result};
pub use group::{Backend, Elem, GroupCtx};
pub use setalg::FinSet;
