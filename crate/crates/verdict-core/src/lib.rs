//! Desk-scale, explainable fake-news text classification.
//!
//! The pipeline covers the whole loop: dataset ingestion and cleaning
//! ([`corpus`]), a small transformer encoder with exact manual
//! backpropagation plus a TF-IDF logistic-regression baseline ([`model`]),
//! a two-phase fine-tuning curriculum with layer-wise learning-rate decay
//! ([`trainer`]), threshold-free and thresholded evaluation ([`metrics`]),
//! LIME and Shapley-value attribution ([`explain`]), and compute-efficiency
//! measurement ([`bench`]).
//!
//! Everything is deterministic given a seed: batch-level data parallelism
//! (rayon, behind the default `parallel` feature) maps over independent
//! samples and reduces in a fixed order, so results are bit-identical with
//! the feature on or off.

pub mod bench;
pub mod corpus;
pub mod exec;
pub mod explain;
pub mod metrics;
pub mod model;
pub mod seed;
pub mod trainer;
