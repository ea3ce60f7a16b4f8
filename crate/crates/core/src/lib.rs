pub mod error;
pub mod numkernel;
pub mod pencil;
pub mod bounds;
pub mod bench;
pub mod rng;
pub mod serde_num;
pub mod slope;
pub mod randomized;
pub mod sweep;
pub mod io;

pub use error::{Error, Result};
