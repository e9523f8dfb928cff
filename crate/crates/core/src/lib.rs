//! Curvature, classification and geodesics of spherically symmetric Finsler
//! metrics `F = |y|·φ(|x|, <x, y>/|y|)`.

pub mod classify;
pub mod error;
pub mod families;
pub mod geodesics;
pub mod geometry;
pub mod grid;
pub mod jets;
pub mod phi_lang;
pub mod quad;
pub mod source;

pub use classify::{classify_metric, ClassificationReport, Verdict};
pub use error::{Error, Result};
pub use geodesics::{integrate, GeodesicSource, GeodesicState, Trajectory};
pub use grid::GridSpec;
pub use jets::{fd_oracle, Jet};
pub use source::PhiSource;
