//! Validity-filtered advice complexity at desk scale.
//!
//! Everything is measured relative to a small step-bounded reference machine
//! (see [`machine`]); values are exact for that machine and its caps.

pub mod bitcode;
pub mod bounds;
pub mod complexity;
pub mod constants;
pub mod compress;
pub mod descsel;
pub mod error;
pub mod executor;
pub mod kt;
pub mod machine;
pub mod naq;
pub mod oracle;
pub mod validity;

pub use bitcode::BitString;
pub use error::{Error, Result};
pub use kt::KtValue;
