//! Table structure recognition for scanned document images.
//!
//! The crate implements a deterministic, multi-stage pipeline:
//!
//! 1. page alignment ([`preprocess::deskew`]),
//! 2. table localisation through a pluggable region provider ([`detect`]),
//! 3. color-invariance normalisation ([`preprocess::normalize_colors`]),
//! 4. one of three morphological grid extractors ([`tsr`]): bordered,
//!    unbordered, or the type-independent partial-border variant,
//! 5. row/column assembly into a [`tsr::TableStructure`].
//!
//! [`eval`] scores predicted cells against ground truth with IoU-thresholded
//! F1, and [`synth`] renders tables with pixel-exact ground truth for testing.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod detect;
pub mod error;
pub mod eval;
pub mod morphology;
pub mod pipeline;
pub mod preprocess;
pub mod raster;
pub mod regions;
pub mod synth;
pub mod tsr;

pub use error::{Error, Result};
pub use raster::{BinaryImage, GrayImage, Polarity};
pub use regions::BBox;
