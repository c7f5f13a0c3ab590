//! Near-field XL-MIMO channel estimation library.
//!
//! Implements a semi-gridless variational Bayes (SG-VB) estimator for
//! spherical-wavefront channels observed by uniform linear or uniform planar
//! arrays, together with the reference estimators it is usually compared
//! against (LS, oracle LS, polar-domain OMP, sparse Bayesian learning) and
//! the matching/metric machinery for scoring them.
//!
//! The observation model is `y = h + n` with `h` a superposition of paths,
//! each parameterized by spatial frequencies (one per array axis) and a
//! curvature parameter `s` inversely proportional to source distance. The
//! estimator infers von Mises posteriors for the frequencies and a
//! grid-initialized, Newton-refined point estimate for `s`.

pub mod baselines;
pub mod bessel;
pub mod channel;
pub mod estimator;
pub mod geometry;
pub mod metrics;
pub mod rng;
pub mod vonmises;

mod linalg;

pub use channel::{
    add_noise, exact_distance, fresnel_distance, from_path_params, generate_scene,
    steering_reparam, synthesize_channel, PathParams, Scatterer, Scene, SceneConfig, SceneError,
    SynthesisMode,
};
pub use estimator::{EstimatorState, PathReport, SgvbConfig, SgvbResult, UpdateOutcome};
pub use geometry::{ArrayGeometry, ArrayKind, GeometryError, PhaseSign, SteeringFactor};
pub use vonmises::{FitError, LogLinearCircularDensity, VonMisesParams};

/// Complex sample type used throughout.
pub type C64 = num_complex::Complex64;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
