//! Von Mises circular distributions: moments, and fitting one to a
//! log-linear circular density by mode finding plus curvature matching.
//!
//! The densities fitted here have the form `p(ω) ∝ exp f(ω)` with
//! `f(ω) = ℜ{Σ_i conj(η_i) e^{j g_i ω}}` for complex coefficients η and
//! nonnegative integer phase multipliers g. A single tone (g = 1) is exactly
//! a von Mises density with `η = κ e^{jμ}`; multi-tone densities are
//! approximated by the von Mises matching the mode and the negated curvature
//! there (a Laplace fit).

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::bessel::{bessel_ratio, bessel_ratio_batch};

/// Lower clamp for fitted concentrations.
pub const KAPPA_MIN: f64 = 1e-6;
/// Upper clamp for fitted concentrations.
pub const KAPPA_MAX: f64 = 1e10;

/// Mean direction and concentration of a von Mises distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VonMisesParams {
    mu: f64,
    kappa: f64,
}

impl VonMisesParams {
    /// Build parameters, normalizing `mu` into [-π, π). `kappa` must be ≥ 0.
    pub fn new(mu: f64, kappa: f64) -> Self {
        assert!(kappa >= 0.0, "kappa must be nonnegative, got {kappa}");
        Self { mu: wrap_angle(mu), kappa }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Circular moment `E[e^{jnθ}] = (I_n(κ)/I_0(κ)) e^{jnμ}`.
    pub fn moment(&self, n: u32) -> Complex64 {
        let modulus = bessel_ratio(n, self.kappa);
        Complex64::from_polar(modulus, n as f64 * self.mu)
    }
}

/// Circular moment of a von Mises distribution (free-function form).
pub fn von_mises_moment(params: &VonMisesParams, n: u32) -> Complex64 {
    params.moment(n)
}

/// Expected phase vector `⟨e^{j g_i θ}⟩` under a von Mises law, one entry per
/// exponent. The entry for `g_i = 0` is exactly 1.
pub fn expected_steering(params: &VonMisesParams, exponents: &[u32]) -> Vec<Complex64> {
    let max_g = exponents.iter().copied().max().unwrap_or(0);
    let ratios = bessel_ratio_batch(max_g, params.kappa);
    exponents
        .iter()
        .map(|&g| Complex64::from_polar(ratios[g as usize], g as f64 * params.mu))
        .collect()
}

/// A density `∝ exp{ℜ{Σ_i conj(η_i) e^{j g_i ω}}}` on the circle.
#[derive(Debug, Clone)]
pub struct LogLinearCircularDensity {
    coeffs: Vec<Complex64>,
    exponents: Vec<u32>,
}

impl LogLinearCircularDensity {
    /// `coeffs` and `exponents` must have equal length.
    pub fn new(coeffs: Vec<Complex64>, exponents: Vec<u32>) -> Self {
        assert_eq!(
            coeffs.len(),
            exponents.len(),
            "coefficient and exponent vectors must have equal length"
        );
        Self { coeffs, exponents }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Sum coefficients sharing an exponent into a dense (conjugated) array
    /// indexed by exponent; this is the `c_g` of `f(ω) = ℜ{Σ c_g e^{jgω}}`.
    fn compressed(&self) -> Vec<Complex64> {
        let max_g = self.exponents.iter().copied().max().unwrap_or(0) as usize;
        let mut c = vec![Complex64::ZERO; max_g + 1];
        for (&eta, &g) in self.coeffs.iter().zip(&self.exponents) {
            c[g as usize] += eta.conj();
        }
        c
    }
}

/// Failure modes of [`fit_von_mises`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FitError {
    /// Every coefficient is zero (or the density is empty), so the density
    /// is uniform and has no mode; the caller should skip its update.
    #[error("all density coefficients are zero")]
    AllZeroCoefficients,
}

/// Fit a von Mises distribution to a log-linear circular density.
///
/// The mode is located on a uniform grid of `max(4·(max g + 1), 512)` points
/// (computed as one inverse DFT when the exponents are dense) and polished
/// with up to 8 undamped Newton steps; the concentration is the negated
/// curvature at the mode, clamped to [1e-6, 1e10]. A supplied prior adds its
/// own `κ_p cos(ω - μ_p)` term to the objective.
pub fn fit_von_mises(
    density: &LogLinearCircularDensity,
    prior: Option<&VonMisesParams>,
) -> Result<VonMisesParams, FitError> {
    let mut c = density.compressed();
    if let Some(p) = prior {
        if c.len() < 2 {
            c.resize(2, Complex64::ZERO);
        }
        c[1] += Complex64::from_polar(p.kappa(), -p.mu()).conj();
    }
    if c.iter().all(|v| v.norm_sqr() == 0.0) {
        return Err(FitError::AllZeroCoefficients);
    }

    let max_g = c.len() - 1;
    let grid_len = (4 * (max_g + 1)).max(512);
    let f_grid = eval_on_grid(&c, grid_len);
    let (k_best, _) = f_grid
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc });
    let cell = 2.0 * PI / grid_len as f64;
    let omega0 = wrap_angle(k_best as f64 * cell);
    let f0 = f_grid[k_best];

    // Newton polish restricted to the bracketing cell; any step that leaves
    // the cell or lowers f reverts to the grid argmax.
    let mut omega = omega0;
    let mut f_cur = f0;
    let mut ok = true;
    for _ in 0..8 {
        let (_, d1, d2) = eval_derivs(&c, omega);
        if d2 >= 0.0 {
            ok = d1.abs() <= 1e-12 * coeff_scale(&c);
            break;
        }
        let step = -d1 / d2;
        let candidate = omega + step;
        if (candidate - omega0).abs() > cell {
            ok = false;
            break;
        }
        let (f_new, _, _) = eval_derivs(&c, candidate);
        if f_new < f_cur {
            ok = false;
            break;
        }
        omega = candidate;
        f_cur = f_new;
        if step.abs() < 1e-12 {
            break;
        }
    }
    let mu = if ok { omega } else { omega0 };
    let (_, _, d2) = eval_derivs(&c, mu);
    let kappa = (-d2).clamp(KAPPA_MIN, KAPPA_MAX);
    Ok(VonMisesParams::new(mu, kappa))
}

fn coeff_scale(c: &[Complex64]) -> f64 {
    let max_c = c.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let max_g = (c.len() - 1).max(1) as f64;
    max_c * max_g
}

/// f, f' and f'' of `f(ω) = ℜ{Σ c_g e^{jgω}}`.
pub(crate) fn eval_derivs(c: &[Complex64], omega: f64) -> (f64, f64, f64) {
    let mut s0 = Complex64::ZERO;
    let mut s1 = Complex64::ZERO;
    let mut s2 = Complex64::ZERO;
    for (g, &cg) in c.iter().enumerate() {
        if cg.norm_sqr() == 0.0 {
            continue;
        }
        let gf = g as f64;
        let e = Complex64::from_polar(1.0, gf * omega);
        let t = cg * e;
        s0 += t;
        s1 += gf * t;
        s2 += gf * gf * t;
    }
    (s0.re, -s1.im, -s2.re)
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan_inverse(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// Evaluate `f` on the uniform grid ω_k = 2πk/G via one inverse DFT
/// (unnormalized: Σ_g c_g e^{+j2πgk/G}).
fn eval_on_grid(c: &[Complex64], grid_len: usize) -> Vec<f64> {
    let fft = plan_inverse(grid_len);
    let mut buf = vec![Complex64::ZERO; grid_len];
    buf[..c.len()].copy_from_slice(c);
    fft.process(&mut buf);
    buf.iter().map(|v| v.re).collect()
}

/// Wrap an angle into [-π, π).
pub fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = (x + PI).rem_euclid(two_pi);
    if y < 0.0 {
        y += two_pi;
    }
    y - PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Periodic-trapezoid quadrature oracle for circular moments, with the
    /// e^κ factor removed so huge concentrations stay finite.
    pub(crate) fn moment_quadrature(mu: f64, kappa: f64, n: u32, points: usize) -> Complex64 {
        let mut num = Complex64::ZERO;
        let mut den = 0.0;
        for i in 0..points {
            let theta = -PI + 2.0 * PI * i as f64 / points as f64;
            let w = (kappa * ((theta - mu).cos() - 1.0)).exp();
            num += Complex64::from_polar(w, n as f64 * theta);
            den += w;
        }
        num / den
    }

    #[test]
    fn moment_uniform_vanishes() {
        let p = VonMisesParams::new(0.7, 0.0);
        assert_eq!(p.moment(1), Complex64::ZERO);
        assert_eq!(p.moment(0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn moment_concentration_limit_is_point_mass() {
        let p = VonMisesParams::new(0.3, 1e12);
        let want = Complex64::from_polar(1.0, 1.5);
        assert!((p.moment(5) - want).norm() < 1e-6);
    }

    #[test]
    fn moment_matches_quadrature() {
        let p = VonMisesParams::new(1.0, 3.0);
        let want = moment_quadrature(1.0, 3.0, 2, 100_000);
        assert!((p.moment(2) - want).norm() < 1e-8, "got {} want {}", p.moment(2), want);
    }

    #[test]
    fn moment_modulus_equals_bessel_ratio() {
        for (mu, kappa, n) in [(0.2, 4.0, 3u32), (-1.0, 77.0, 12), (2.0, 1e5, 40)] {
            let p = VonMisesParams::new(mu, kappa);
            assert_eq!(p.moment(n).norm(), bessel_ratio(n, kappa));
        }
    }

    #[test]
    fn expected_steering_limits() {
        let g: Vec<u32> = (0..8).collect();
        let hi = expected_steering(&VonMisesParams::new(0.4, 1e12), &g);
        for (i, v) in hi.iter().enumerate() {
            let want = Complex64::from_polar(1.0, i as f64 * 0.4);
            assert!((v - want).norm() < 1e-6, "entry {i}");
        }
        let lo = expected_steering(&VonMisesParams::new(0.4, 0.0), &g);
        assert_eq!(lo[0], Complex64::new(1.0, 0.0));
        for v in &lo[1..] {
            assert_eq!(*v, Complex64::ZERO);
        }
    }

    #[test]
    fn expected_steering_matches_quadrature() {
        let p = VonMisesParams::new(0.5, 100.0);
        let got = expected_steering(&p, &[0, 1, 2, 3]);
        for (n, v) in got.iter().enumerate() {
            let want = moment_quadrature(0.5, 100.0, n as u32, 100_000);
            assert!((v - want).norm() < 1e-8, "n={n}: got {v}, want {want}");
        }
    }

    #[test]
    fn fit_single_tone_is_exact() {
        let omega0 = -1.234;
        let amp = 7.5;
        let density = LogLinearCircularDensity::new(
            vec![Complex64::ZERO, Complex64::from_polar(amp, omega0)],
            vec![0, 1],
        );
        let fit = fit_von_mises(&density, None).unwrap();
        assert_relative_eq!(fit.mu(), omega0, epsilon = 1e-10);
        assert_relative_eq!(fit.kappa(), amp, max_relative = 1e-10);
    }

    #[test]
    fn fit_rejects_all_zero() {
        let density =
            LogLinearCircularDensity::new(vec![Complex64::ZERO; 4], (0..4).collect());
        assert_eq!(fit_von_mises(&density, None), Err(FitError::AllZeroCoefficients));
        let empty = LogLinearCircularDensity::new(vec![], vec![]);
        assert_eq!(fit_von_mises(&empty, None), Err(FitError::AllZeroCoefficients));
    }

    #[test]
    fn fit_single_path_residual_correlation() {
        // eta_n = e^{j n omega}: the density's mode is the true frequency.
        let n = 32u32;
        let omega = 0.7;
        let coeffs: Vec<Complex64> =
            (0..n).map(|i| Complex64::from_polar(1.0, i as f64 * omega)).collect();
        let density = LogLinearCircularDensity::new(coeffs, (0..n).collect());
        let fit = fit_von_mises(&density, None).unwrap();
        assert!((fit.mu() - omega).abs() < 1e-4, "got {}", fit.mu());

        // dense scan oracle
        let c = density.compressed();
        let mut best = (0.0, f64::NEG_INFINITY);
        for k in 0..1_000_000u32 {
            let w = -PI + 2.0 * PI * k as f64 / 1e6;
            let (f, _, _) = eval_derivs(&c, w);
            if f > best.1 {
                best = (w, f);
            }
        }
        assert!((fit.mu() - best.0).abs() < 1e-5, "fit {} vs scan {}", fit.mu(), best.0);
    }

    #[test]
    fn fit_prior_pulls_mode() {
        // weak single tone at 0, strong prior at 1 -> mode close to 1
        let density = LogLinearCircularDensity::new(
            vec![Complex64::from_polar(0.1, 0.0)],
            vec![1],
        );
        let prior = VonMisesParams::new(1.0, 50.0);
        let fit = fit_von_mises(&density, Some(&prior)).unwrap();
        assert!((fit.mu() - 1.0).abs() < 0.05, "got {}", fit.mu());
    }

    #[test]
    fn fit_mode_is_stationary_on_realistic_densities() {
        // densities shaped like the estimator's update coefficients
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..200 {
            let n = 24u32;
            let omega = rng.gen_range(-3.0..3.0);
            let coeffs: Vec<Complex64> = (0..n)
                .map(|i| {
                    let noise = Complex64::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
                    Complex64::from_polar(1.0, i as f64 * omega) + noise
                })
                .collect();
            let density = LogLinearCircularDensity::new(coeffs, (0..n).collect());
            let fit = fit_von_mises(&density, None).unwrap();
            let c = density.compressed();
            let (_, d1, d2) = eval_derivs(&c, fit.mu());
            let scale = coeff_scale(&c);
            assert!(d1.abs() < 1e-8 * scale, "trial {trial}: f'={d1} scale={scale}");
            assert!(d2 <= 0.0, "trial {trial}: f''={d2}");
        }
    }

    proptest! {
        #[test]
        fn moment_modulus_never_exceeds_one(mu in -3.2f64..3.2, kappa in 0.0f64..1e6, n in 0u32..128) {
            let p = VonMisesParams::new(mu, kappa);
            prop_assert!(p.moment(n).norm() <= 1.0 + 1e-12);
        }

        #[test]
        fn wrap_angle_range(x in -100.0f64..100.0) {
            let w = wrap_angle(x);
            prop_assert!((-PI..PI).contains(&w));
        }
    }
}
