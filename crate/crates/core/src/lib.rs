//! Multibeam synthesis for large planar arrays.
//!
//! A set of beams, each with a direction and an absolute directivity (or a
//! superposition coefficient), is turned into a single phase/amplitude
//! excitation map by adding gradient-phase steering maps with real
//! coefficients. Closed-form predictors give each beam's directivity from
//! the coefficients and the aperture size; [`pattern`] evaluates the exact
//! array factor over the hemisphere and measures the directivities the map
//! actually produces.
//!
//! ```
//! use multibeam::array::{ArrayGeometry, BeamDirection};
//! use multibeam::synthesis::{plan, BeamRequest, DesignSpec, GeometrySpec};
//!
//! let geometry = ArrayGeometry::square(30, 1.0 / 3.0).unwrap();
//! let spec = DesignSpec::new(
//!     GeometrySpec::Fixed(geometry),
//!     vec![
//!         BeamRequest::directivity(BeamDirection::new(10.0, 180.0).unwrap(), 29.0),
//!         BeamRequest::free(BeamDirection::new(30.0, 270.0).unwrap()),
//!     ],
//! );
//! let design = plan(&spec).unwrap();
//! assert!((design.coefficients()[1] - 0.70).abs() < 0.01);
//! ```

pub mod array;
pub mod closed_form;
pub mod error;
pub mod pattern;
pub mod synthesis;

pub use error::{Error, Result};
