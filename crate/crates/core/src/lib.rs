//! Dependence measures and a Monte-Carlo power benchmark.
//!
//! The statistics ([`pearson`], [`distance_correlation`], [`mic`]) are
//! generic over the floating-point type through [`Scalar`]; the simulation
//! side ([`scenarios`], [`power`]) works in `f64`.

pub mod error;
pub mod measures;
pub mod mic_grid;
pub mod normal;
pub mod power;
pub mod rng;
pub mod scalar;
pub mod scenarios;

pub use error::{MeasureError, PowerError};
pub use measures::{distance_correlation, mic, pearson, pearson_stat, Dataset, MeasureId, MicParams};
pub use mic_grid::{characteristic_matrix, mic_exhaustive, CharacteristicMatrix};
pub use power::{run_grid, GridConfig, GridReport, PowerResult, Workers};
pub use rng::RandomStream;
pub use scalar::Scalar;
pub use scenarios::{generate, generate_null, NoiseSpec, ScenarioId};

pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type CharacteristicMatrix64 = CharacteristicMatrix<f64>;
pub type CharacteristicMatrix32 = CharacteristicMatrix<f32>;
