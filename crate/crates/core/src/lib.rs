//! Gender-debiasing for pre-trained word embeddings.
//!
//! The pipeline loads an embedding table, purifies it of the dominant
//! frequency-linked direction that masks gender information, projects the
//! gender subspace out of every non-definitional word, and then measures
//! what bias remains. The pieces:
//!
//! * [`store`]: embedding I/O (plain-text and binary tables) and word lists.
//! * [`linalg`]: centering, SVD-backed principal components, projections.
//! * [`kmeans`]: restarted Lloyd clustering used by the bias metrics and by
//!   the component-selection loop.
//! * [`debias`]: gender direction estimation, hard debiasing, and the
//!   two-stage variant that first strips a corpus-frequency component.
//! * [`eval`]: neighborhood clustering accuracy, association tests,
//!   analogies, categorization purity, pair-difference structure.
//! * [`datasets`]: parsers for the small text formats evaluation data uses.
//! * [`synth`]: synthetic embedding sets with planted gender and frequency
//!   structure, for tests and demos.
//!
//! Everything randomized takes an explicit seed; equal inputs and seeds
//! reproduce results bit for bit.

pub mod datasets;
pub mod debias;
pub mod error;
pub mod eval;
pub mod kmeans;
pub mod linalg;
pub mod seeds;
pub mod store;
pub mod synth;

pub use debias::{DebiasConfig, DebiasVariant, DiscoveryReport, GenderPair, GenderPairSet};
pub use error::{Error, Result};
pub use store::{EmbeddingSet, WordList};
