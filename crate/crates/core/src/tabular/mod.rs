//! Tables of numeric and categorical variables, their one-hot encoding, the
//! synthetic benchmark generator and train/test splitting.

mod csv;
mod dataset;
mod encoder;
mod schema;
mod synthetic;

pub use self::csv::{format_csv, parse_csv, SchemaSource};
pub use dataset::{split, ColumnData, Dataset};
pub use encoder::{decode, encode, fit_encoder, CategoryGroup, EncodedMatrix, EncoderState, FeatureSlot};
pub use schema::{Column, ColumnKind, Schema};
pub use synthetic::{generate_synthetic, SyntheticContext, SYNTHETIC_COEFF_COUNT};
