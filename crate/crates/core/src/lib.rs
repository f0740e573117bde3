//! Exact numerical birational geometry of surfaces: intersection lattices,
//! blow-ups and contractions, Zariski decompositions, pairs and their
//! anticanonical MMP, and weighted dual graphs of log terminal germs.

pub mod birational;
pub mod dualgraph;
pub mod error;
pub mod lattice;
pub mod pairs;
pub mod rational;
pub mod scene;
pub mod verify;
pub mod zariski;

pub use birational::{
    blow_up_chain, chain_name, log_discrepancy_chain, parse_chain, ChainModel, ContractionResult,
    ModelEvent, PointSpec, SurfaceModel, TrackedCurve,
};
pub use dualgraph::{enumerate_and_verify, DualGraph, EnumerationMode, Family, GraphVerdict};
pub use error::{Error, Result};
pub use lattice::{DivisorClass, IntersectionLattice, NegDefCertificate, Sign};
pub use pairs::{
    check_mmp_redundant_factorization, enumerate_chains, lct_sigma_estimate, pklt_certificate,
    run_anticanonical_mmp, MMPTrace, PairModel,
};
pub use rational::{format_rational, int, parse_rational, q, Extended, Rational};
pub use scene::Scene;
pub use zariski::{sigma, zariski_decompose, DivisorOver, NefScope, ZariskiDecomp};
