//! Numerics for rotation/measurement guessing games and their entropic
//! uncertainty bounds.
//!
//! A referee either applies a random rotation e^{−iGr_k} generated by an
//! observable G or measures G; memory holders try to guess the rotation
//! parameter or the outcome. This crate builds the post-protocol states,
//! evaluates and certifies the lower bounds on the total guessing
//! uncertainty (including the log|R| and trivial-memory baselines),
//! verifies the conditional-expectation and commuting-square algebra the
//! bounds rest on, and reproduces the reference numerical sweeps as
//! deterministic data files.
//!
//! Module map:
//! - [`qstate`]: labeled composite states and dense primitives
//!   (tensor, partial trace, embedded unitaries, Hermitian eigensolver).
//! - [`entropy`]: von Neumann, conditional, mutual and relative entropy,
//!   and the asymmetry measure of a state under a conditional expectation.
//! - [`algebra`]: conditional expectations (pinching, trace-embedding,
//!   compositions), commuting squares and their entropy inequality,
//!   Stinespring dilation of pinching, recovery-map certificates.
//! - [`games`]: κ/ω/ψ state constructions and the bound reports for the
//!   tripartite and bipartite games.
//! - [`ensembles`]: seeded, stream-named random states, angles and the
//!   θ-parameterized product family.
//! - [`sweep`]: θ sweeps with optional noise, presets, CSV/JSON output.
//! - [`verify`]: named invariant suites behind `rotgame verify`.
//!
//! The `examples/` directory holds one runnable demonstration per
//! capability; the `rotgame` binary exposes `sweep`, `verify` and
//! `bounds` subcommands over the same entry points.

pub mod algebra;
pub mod ensembles;
pub mod entropy;
pub mod error;
pub mod games;
pub mod linalg;
pub mod qstate;
pub mod sweep;
pub mod verify;
