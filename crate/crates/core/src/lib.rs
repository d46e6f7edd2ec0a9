//! Perception building blocks for a vision- and voice-guided wheelchair.
//!
//! Two independent pipelines live here:
//!
//! - **Vision**: appearance-based ground/obstacle segmentation of the left
//!   camera frame ([`obstacle`]), window-based stereo correspondence over the
//!   navigation region and triangulation to a nearest-obstacle distance
//!   ([`stereo`]), and a threshold control law ([`nav`]).
//! - **Speech**: a log-mel / MFCC front end ([`features`]) and dynamic time
//!   warping against stored word templates ([`dtw`]).
//!
//! [`synth`] renders stereo scenes and word utterances with known ground
//! truth, and [`pipeline`] chains the vision stages the way the batch CLI
//! runs them. All computations are deterministic.

// `!(x > 0.0)` is used deliberately to reject NaN alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dtw;
pub mod error;
pub mod features;
pub mod image;
pub mod media_io;
pub mod nav;
pub mod obstacle;
pub mod pipeline;
pub mod stereo;
pub mod synth;

pub use error::{Error, Result};
pub use image::{GrayImage, RgbImage};
