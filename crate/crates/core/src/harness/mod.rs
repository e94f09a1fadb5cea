//! Experiment plumbing: manifests, sweeps, lemma suites and serialization.

pub mod emit;
pub mod manifest;
pub mod report;
pub mod sweep;
pub mod verify;
