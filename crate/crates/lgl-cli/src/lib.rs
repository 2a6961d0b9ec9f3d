//! CLI plumbing for the lgl toolkit: argument surface, dispatch, and the
//! CSV/JSON/SVG emitters.
//!
//! The binary guarantees byte-identical CSV and JSON for identical
//! configurations regardless of worker count; everything stateful lives in
//! lgl-core behind deterministic segmented scans.

pub mod args;
pub mod run;
pub mod svg;
