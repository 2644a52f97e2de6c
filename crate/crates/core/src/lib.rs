//! Scores source files by language-model cross-entropy and logical lines of
//! code, and evaluates how well those signals predict expert maintainability
//! ratings.
//!
//! - [`corpus`]: comment stripping, LLOC, ratings ingestion
//! - [`lm`]: builtin and remote token-level language models
//! - [`entropy`]: chunked cross-entropy and descriptive statistics
//! - [`features`]: label binarization and log/standardized features
//! - [`ml`]: logistic regression, random forest, metrics, cross-validation
//! - [`analysis`]: marginal vs. LLOC-stratified association, reversal checks
//! - [`scoring`]: concurrent corpus scoring with a failure report

pub mod analysis;
pub mod corpus;
pub mod features;
pub mod ml;
pub mod entropy;
pub mod lm;
pub mod scoring;
