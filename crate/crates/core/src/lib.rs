//! # lightset
//!
//! Construction and certification of ε-light vertex subsets of weighted
//! graphs: sets `S` whose induced Laplacian satisfies `L_S ⪯ ε L`.
//!
//! The pipeline is
//!
//! 1. [`spectral`]: full eigendecomposition of `L`, pseudoinverse square root,
//!    leverage scores `τ_e` and the lightness test `‖L^{+/2} L_S L^{+/2}‖ ≤ ε`.
//! 2. [`selection::pruning`]: drop heavy edges (`τ_e > ε`) by taking an
//!    independent set of the heavy graph, then optionally filter vertices of
//!    large leverage degree.
//! 3. [`selection::barrier`]: grow `S` one vertex at a time while keeping
//!    `λ_max(M_t) < ε`, logging the average barrier degree `d̄_t`, the
//!    pigeonhole and trace-bound certificates and the roots of the averaged
//!    characteristic polynomial at every step.
//!
//! [`sampling`] provides the Bernoulli baseline and [`experiment`] sweeps the
//! whole pipeline over benchmark families.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod report;
pub mod rng;
pub mod sampling;
pub mod selection;
pub mod spectral;

pub use error::{Error, Result};
pub use experiment::{run_suite, ExperimentReport, SuiteConfig, SuiteFamily};
pub use graph::{generate_family, induced_laplacian, laplacian, Family, FamilySpec, SymMatrix, WeightedGraph};
pub use selection::{barrier_greedy, select_light_set, GreedyTrace, PipelineOptions, Policy};
pub use spectral::{
    is_epsilon_light, leverage_profile, lightness_norm, normalized_edge_matrix, spectral_context,
    star_domination_gap, LeverageProfile, SpectralContext,
};
