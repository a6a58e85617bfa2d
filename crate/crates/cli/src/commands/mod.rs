//! One module per subcommand family. Every flag struct doubles as the config
//! schema: fields are optional on input and all filled after `resolve`.

pub mod chain;
pub mod gates;
pub mod magic;
pub mod rydberg;

use std::f64::consts::PI;

/// Default chirality angles: the super-integrable point.
pub(crate) const DEFAULT_ANGLE: f64 = PI / 6.0;
