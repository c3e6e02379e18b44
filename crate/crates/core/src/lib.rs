//! Semantic maps of frames in collections of text messages.
//!
//! The pipeline turns raw messages into a word/document occurrence matrix,
//! extracts latent frames with a varimax-rotated principal component
//! analysis, checks each frame with Cronbach's alpha, and draws the cosine
//! network of the selected words as Pajek files and a static SVG.
//!
//! Stages, in pipeline order:
//!
//! - [`corpus`]: loading, tokenizing, plural stripping and stopwords
//! - [`lexicon`]: frequency lists, vocabulary selection, tf-idf and chi-square
//! - [`matrix`]: word/document matrix, cosine and Pearson similarities
//! - [`factors`]: eigendecomposition, loadings, varimax, frames, reliability
//! - [`graph`]: semantic network, thresholding, k-cores, layouts, styling
//! - [`export`]: Pajek `.net`/`.dat`/`.clu`/`.vec`, CSV tables and SVG
//! - [`pipeline`]: configuration, subcommands and the run manifest

#![forbid(unsafe_code)]

pub mod corpus;
pub mod error;
pub mod export;
pub mod factors;
pub mod graph;
pub mod lexicon;
pub mod linalg;
pub mod matrix;
pub mod pipeline;

pub use error::{Error, Result};
