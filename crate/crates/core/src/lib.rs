//! # tsforge
//!
//! Univariate time-series forecasting from first principles: event
//! aggregation and stationarizing transforms, unit-root and correlogram
//! diagnostics, seasonal ARIMA by conditional sum of squares, recurrent
//! networks trained by backpropagation through time, and kernel ridge /
//! support vector regression over lag windows.
//!
//! ```
//! use tsforge::series::{difference, undifference, TimeSeries};
//!
//! let ts = TimeSeries::from_values(vec![1.0, 2.0, 4.0, 7.0]).unwrap();
//! let (diffed, state) = difference(&ts, 1, 0).unwrap();
//! assert_eq!(diffed.values(), &[1.0, 2.0, 3.0]);
//! assert_eq!(undifference(&diffed, &state).unwrap(), ts);
//! ```

pub mod arima;
pub mod deep;
pub mod diagnostics;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod optim;
pub mod pipeline;
pub mod series;
pub mod synthetic;
pub mod validation;

pub use error::{Error, Result};
pub use series::TimeSeries;
