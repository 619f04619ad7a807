//! Tameness certificates for modules over finitely generated nilpotent
//! groups, and finite presentations of the split extensions they define.

pub mod error;
pub mod geometry;
pub mod group;
pub mod lp;
pub mod presenter;
pub mod radius;
pub mod ring;
pub mod specfile;
pub mod tameness;
pub mod verifier;
pub mod word;

pub use error::{Error, Result};
