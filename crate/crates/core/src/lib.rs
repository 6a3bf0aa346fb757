//! Online classification when a forecaster predicts the example stream.
//!
//! Every round, nature reveals an example, a predictor forecasts the whole
//! remaining stream, and a learner outputs a label distribution before the
//! true label arrives. The crate provides the learners that turn forecasts
//! into mistake bounds, the expert aggregators they are built from, the
//! adversary that forces matching lower bounds, and a harness that measures
//! all of it.
//!
//! ```
//! use prescient::example::{Example, Label};
//! use prescient::hypotheses::{project, HypothesisClass};
//!
//! let xs: Vec<Example> = [1, 2, 3].iter().map(|&i| Example::frac(i, 4).unwrap()).collect();
//! let table = project(&HypothesisClass::Threshold, &xs).unwrap();
//! assert_eq!(table.len(), 4);
//! assert_eq!(table.rows()[1], vec![Label(1), Label(1), Label(0)]);
//! ```

pub mod adversary;
pub mod aggregate;
pub mod error;
pub mod example;
pub mod harness;
pub mod hypotheses;
pub mod learners;
pub mod offline;
pub mod predictors;
pub mod transcript;

pub use error::{Error, Result};
pub use example::{Example, Label, LabeledStream, Rational};
pub use transcript::{Prediction, RoundRecord, Transcript};
