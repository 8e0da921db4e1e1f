pub mod binform;
pub mod complexify;
pub mod corpus;
pub mod error;
pub mod exterior;
pub mod linalg;
pub mod pencil;
pub mod polyring;
pub mod webs;

pub use error::{Error, Result};
