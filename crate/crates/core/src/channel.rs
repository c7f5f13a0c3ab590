//! Spherical-wavefront channel synthesis, the angle/distance
//! re-parameterization, scene generation and noise injection.
//!
//! A scatterer at range r and elevation θ (plus azimuth φ for planar
//! arrays) contributes `α·[e^{jk(r - d_i)}]_i` with `d_i` the element-wise
//! propagation distance; under the Fresnel (second-order) expansion this
//! factors into the product of unit-modulus steering factors evaluated at
//! the reduced parameters (ω[, ψ], s).

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::geometry::{ArrayGeometry, ArrayKind};
use crate::rng::derive_rng;

/// A point scatterer. `phi` is meaningful for planar arrays only.
#[derive(Debug, Clone, Copy)]
pub struct Scatterer {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub alpha: Complex64,
}

impl Scatterer {
    /// Cartesian position; the array is on the y-axis (ULA) or yz-plane (UPA).
    pub fn position(&self, kind: ArrayKind) -> [f64; 3] {
        match kind {
            ArrayKind::Ula => [self.r * self.theta.cos(), self.r * self.theta.sin(), 0.0],
            ArrayKind::Upa => [
                self.r * self.theta.cos() * self.phi.cos(),
                self.r * self.theta.cos() * self.phi.sin(),
                self.r * self.theta.sin(),
            ],
        }
    }
}

/// A multipath scene.
#[derive(Debug, Clone, Default)]
pub struct Scene {
    pub scatterers: Vec<Scatterer>,
}

/// Reduced per-path parameters of the factored model.
#[derive(Debug, Clone, Copy)]
pub struct PathParams {
    /// Spatial frequency (radians per element along the first axis).
    pub omega: f64,
    /// Second spatial frequency, planar arrays only.
    pub psi: Option<f64>,
    /// Curvature phase coefficient, `s ≥ 0`; 0 is the far-field limit.
    pub s: f64,
    /// Effective complex gain multiplying the factored steering product.
    pub gain: Complex64,
}

/// Which distance law the synthesizer uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthesisMode {
    /// Exact Euclidean element-to-scatterer distances.
    Exact,
    /// Second-order (Fresnel) expansion; matches the factored model exactly.
    Fresnel,
}

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("invalid scene configuration: {0}")]
    InvalidConfig(String),
    #[error("frequency parameter outside the principal range (|omega/k·spacing| > 1)")]
    OutOfPrincipalRange,
}

/// Exact element-to-scatterer distance for element `index`.
pub fn exact_distance(geom: &ArrayGeometry, sc: &Scatterer, index: usize) -> f64 {
    let p = sc.position(geom.kind());
    let e = match geom.kind() {
        ArrayKind::Ula => [0.0, geom.ula_offset(index), 0.0],
        ArrayKind::Upa => [
            0.0,
            geom.horizontal_index(index) as f64 * geom.spacing(),
            geom.vertical_index(index) as f64 * geom.spacing(),
        ],
    };
    let dx = p[0] - e[0];
    let dy = p[1] - e[1];
    let dz = p[2] - e[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Fresnel-approximated element-to-scatterer distance (second-order Taylor
/// expansion of [`exact_distance`] in aperture/r).
pub fn fresnel_distance(geom: &ArrayGeometry, sc: &Scatterer, index: usize) -> f64 {
    match geom.kind() {
        ArrayKind::Ula => {
            let delta = geom.ula_offset(index);
            sc.r + delta * delta / (2.0 * sc.r) - delta * sc.theta.sin()
        }
        ArrayKind::Upa => {
            let d = geom.spacing();
            let m = geom.horizontal_index(index) as f64;
            let n = geom.vertical_index(index) as f64;
            sc.r - d * (m * sc.theta.cos() * sc.phi.sin() + n * sc.theta.sin())
                + d * d * (m * m + n * n) / (2.0 * sc.r)
        }
    }
}

/// Map a scatterer to the reduced parameters (ω[, ψ], s, gain).
pub fn to_path_params(geom: &ArrayGeometry, sc: &Scatterer) -> PathParams {
    let k = geom.wavenumber();
    let d = geom.spacing();
    let s = k * d * d / (2.0 * sc.r);
    match geom.kind() {
        ArrayKind::Ula => {
            let omega = k * d * sc.theta.sin();
            let n = geom.n() as f64;
            // phase offset folding the centered element indexing into the gain
            let phase =
                -(n - 1.0) / 2.0 * k * d * (sc.theta.sin() + (n - 1.0) * d / (4.0 * sc.r));
            PathParams {
                omega,
                psi: None,
                s,
                gain: sc.alpha * Complex64::from_polar(1.0, phase),
            }
        }
        ArrayKind::Upa => PathParams {
            omega: k * d * sc.theta.cos() * sc.phi.sin(),
            psi: Some(k * d * sc.theta.sin()),
            s,
            gain: sc.alpha,
        },
    }
}

/// Invert the re-parameterization: (θ, φ, r) from (ω[, ψ], s).
///
/// `s = 0` maps to `r = ∞`. Errors with [`SceneError::OutOfPrincipalRange`]
/// when a frequency implies |sin| > 1; callers that must stay total clamp
/// first (see [`from_path_params_clamped`]).
pub fn from_path_params(
    geom: &ArrayGeometry,
    p: &PathParams,
) -> Result<(f64, Option<f64>, f64), SceneError> {
    let kd = geom.wavenumber() * geom.spacing();
    let r = if p.s > 0.0 {
        geom.wavenumber() * geom.spacing() * geom.spacing() / (2.0 * p.s)
    } else {
        f64::INFINITY
    };
    match geom.kind() {
        ArrayKind::Ula => {
            let x = p.omega / kd;
            if x.abs() > 1.0 {
                return Err(SceneError::OutOfPrincipalRange);
            }
            Ok((x.asin(), None, r))
        }
        ArrayKind::Upa => {
            let sy = p.psi.unwrap_or(0.0) / kd;
            if sy.abs() > 1.0 {
                return Err(SceneError::OutOfPrincipalRange);
            }
            let theta = sy.asin();
            let sx = p.omega / (kd * theta.cos());
            if !sx.is_finite() || sx.abs() > 1.0 {
                return Err(SceneError::OutOfPrincipalRange);
            }
            Ok((theta, Some(sx.asin()), r))
        }
    }
}

/// As [`from_path_params`] but clamping out-of-range sines to ±1.
pub fn from_path_params_clamped(geom: &ArrayGeometry, p: &PathParams) -> (f64, Option<f64>, f64) {
    let kd = geom.wavenumber() * geom.spacing();
    let r = if p.s > 0.0 {
        geom.wavenumber() * geom.spacing() * geom.spacing() / (2.0 * p.s)
    } else {
        f64::INFINITY
    };
    match geom.kind() {
        ArrayKind::Ula => ((p.omega / kd).clamp(-1.0, 1.0).asin(), None, r),
        ArrayKind::Upa => {
            let theta = (p.psi.unwrap_or(0.0) / kd).clamp(-1.0, 1.0).asin();
            let c = theta.cos().max(1e-12);
            let phi = (p.omega / (kd * c)).clamp(-1.0, 1.0).asin();
            (theta, Some(phi), r)
        }
    }
}

/// The factored steering vector at the reduced parameters (without gain).
pub fn steering_reparam(geom: &ArrayGeometry, p: &PathParams) -> Vec<Complex64> {
    let freq = geom.frequency_factors();
    let mut v = freq[0].evaluate(p.omega);
    if let Some(psi) = p.psi {
        for (a, b) in v.iter_mut().zip(freq[1].evaluate(psi)) {
            *a *= b;
        }
    }
    for (a, b) in v.iter_mut().zip(geom.curvature_factor().evaluate(p.s)) {
        *a *= b;
    }
    v
}

/// Superpose all scene paths: `h_i = Σ_ℓ α_ℓ e^{jk(r_ℓ - d_ℓi)}`.
pub fn synthesize_channel(geom: &ArrayGeometry, scene: &Scene, mode: SynthesisMode) -> Vec<Complex64> {
    let k = geom.wavenumber();
    let mut h = vec![Complex64::ZERO; geom.n()];
    for sc in &scene.scatterers {
        for (i, hi) in h.iter_mut().enumerate() {
            let d = match mode {
                SynthesisMode::Exact => exact_distance(geom, sc, i),
                SynthesisMode::Fresnel => fresnel_distance(geom, sc, i),
            };
            *hi += sc.alpha * Complex64::from_polar(1.0, k * (sc.r - d));
        }
    }
    h
}

/// Scene-generation parameters. Angle ranges are half-widths in radians
/// (θ ~ U(-θ_range, θ_range)).
#[derive(Debug, Clone)]
pub struct SceneConfig {
    pub l_paths: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub theta_range: f64,
    pub phi_range: f64,
    /// Minimum pairwise elevation separation (radians); 0 disables.
    pub min_angle_sep: f64,
    /// Pin every path's range to this value (distance sweeps).
    pub fixed_r: Option<f64>,
}

impl SceneConfig {
    pub fn validate(&self) -> Result<(), SceneError> {
        if self.l_paths == 0 {
            return Err(SceneError::InvalidConfig("l_paths must be >= 1".into()));
        }
        if !(self.r_min > 0.0) {
            return Err(SceneError::InvalidConfig("r_min must be > 0".into()));
        }
        if self.r_min > self.r_max {
            return Err(SceneError::InvalidConfig("r_min must be <= r_max".into()));
        }
        Ok(())
    }
}

/// Draw a random scene: ranges uniform on [r_min, r_max], angles uniform on
/// their ranges, gains circularly-symmetric complex normal with unit
/// variance. Deterministic in `seed`.
pub fn generate_scene(
    geom: &ArrayGeometry,
    config: &SceneConfig,
    seed: u64,
) -> Result<Scene, SceneError> {
    config.validate()?;
    let mut rng = derive_rng(seed, "scene", &[]);
    let mut scatterers: Vec<Scatterer> = Vec::with_capacity(config.l_paths);
    for _ in 0..config.l_paths {
        let r = rng.gen_range(config.r_min..=config.r_max);
        let mut theta = sample_symmetric(&mut rng, config.theta_range);
        if config.min_angle_sep > 0.0 {
            let mut attempts = 0;
            while scatterers.iter().any(|s| (s.theta - theta).abs() < config.min_angle_sep) {
                theta = sample_symmetric(&mut rng, config.theta_range);
                attempts += 1;
                if attempts > 10_000 {
                    return Err(SceneError::InvalidConfig(
                        "cannot satisfy min_angle_sep with this path count".into(),
                    ));
                }
            }
        }
        let phi = match geom.kind() {
            ArrayKind::Ula => 0.0,
            ArrayKind::Upa => sample_symmetric(&mut rng, config.phi_range),
        };
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let alpha = Complex64::new(re, im) / 2f64.sqrt();
        let r = config.fixed_r.unwrap_or(r);
        scatterers.push(Scatterer { r, theta, phi, alpha });
    }
    Ok(Scene { scatterers })
}

fn sample_symmetric(rng: &mut impl Rng, half_width: f64) -> f64 {
    if half_width <= 0.0 {
        0.0
    } else {
        rng.gen_range(-half_width..half_width)
    }
}

/// Add i.i.d. complex Gaussian noise at `N₀ = l_paths / snr_linear` per
/// element; returns the noisy observation and N₀.
pub fn add_noise(h: &[Complex64], snr_linear: f64, l_paths: usize, seed: u64) -> (Vec<Complex64>, f64) {
    assert!(snr_linear > 0.0, "snr must be positive (linear scale)");
    let n0 = l_paths as f64 / snr_linear;
    let sigma = (n0 / 2.0).sqrt();
    let mut rng = derive_rng(seed, "noise", &[]);
    let y = h
        .iter()
        .map(|&hi| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            hi + Complex64::new(sigma * re, sigma * im)
        })
        .collect();
    (y, n0)
}
