//! Frame-based polymer conformation geometry.
//!
//! A chain conformation is split into standardized repeating-unit
//! conformations plus one rigid frame per unit ([`polymer`]); chains are
//! rebuilt from units and rotations alone ([`assembly`]). On top of that sit
//! diffusion-style samplers with pluggable denoisers ([`generative`]),
//! conformer-set evaluation ([`metrics`]) and file formats ([`io`]).

pub mod assembly;
pub mod generative;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod polymer;
pub mod testing;
