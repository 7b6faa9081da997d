//! Exact computation of order of contact, canonical sections and index
//! residues for holomorphic self-maps fixing a hypersurface.

pub mod algebra;
pub mod blowup;
pub mod canonical_sections;
pub mod cli;
pub mod error;
pub mod germ_analysis;
pub mod index;
pub mod residues;

pub use error::{Error, Result};
