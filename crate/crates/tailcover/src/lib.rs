//! Planted exact-cover benchmarks for annealing-style solvers.
//!
//! The pipeline mirrors how such problems are run on quantum annealing
//! hardware, but every stage here is classical and deterministic:
//!
//! 1. [`instances`] generates set-partitioning ("tail assignment") instances
//!    with a planted exact cover and a tunable conflict density.
//! 2. [`model`] compiles an instance into a QUBO or Ising model whose ground
//!    state energy is exactly zero at the planted cover (for zero cost weight).
//! 3. [`topology`] builds Chimera and Pegasus hardware graphs.
//! 4. [`embedding`] maps logical models onto hardware graphs via minor
//!    embedding (randomized chain growth, or a deterministic clique template
//!    on Chimera) and applies chain couplers.
//! 5. [`sampler`] solves models by exhaustive Gray-code enumeration (up to 32
//!    variables) or by Metropolis simulated annealing.
//! 6. [`bench`] runs the sweep protocols (relative chain strength, annealing
//!    time, cost weight, size scaling) and writes CSV/JSON reports.
//!
//! The `examples/` directory is the front door: each major capability has a
//! runnable example, e.g.
//!
//! ```text
//! cargo run --release --example compile_to_models
//! cargo run --release --example sweep_and_report
//! ```
//!
//! A thin `tailcover` binary exposes the same stages as subcommands
//! (`generate`, `compile`, `embed`, `solve`, `sweep`, `report`).

pub mod bench;
pub mod cli;
pub mod embedding;
mod error;
pub mod instances;
pub mod model;
pub mod rng;
pub mod sampler;
pub mod topology;

pub use error::{Error, Result};
