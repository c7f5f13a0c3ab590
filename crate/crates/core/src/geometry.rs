//! Array geometries and the unit-modulus steering factors of the
//! re-parameterized near-field model.
//!
//! Every factor here is a phase vector `[e^{j·σ·g_i·x}]_i` for an integer
//! exponent vector `g` and a sign `σ = ±1`; the frequency factors of a ULA
//! use `g_i = i`, its curvature factor uses `g_i = i(N-1-i)`, and a UPA uses
//! the horizontal/vertical element indices and `m_i² + n_i²` (negative
//! phase) respectively.

use num_complex::Complex64;
use thiserror::Error;

use crate::SPEED_OF_LIGHT;

/// Array layout families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrayKind {
    Ula,
    Upa,
}

/// Orientation of a steering factor's phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseSign {
    Plus,
    Minus,
}

impl PhaseSign {
    pub fn signum(self) -> f64 {
        match self {
            PhaseSign::Plus => 1.0,
            PhaseSign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("antenna count must be positive")]
    EmptyArray,
    #[error("spacing and carrier frequency must be positive")]
    NonPositeParameter,
}

/// Element layout, spacing and wavelength of a ULA or UPA.
#[derive(Debug, Clone)]
pub struct ArrayGeometry {
    kind: ArrayKind,
    n_total: usize,
    n_h: usize,
    n_v: usize,
    spacing: f64,
    wavelength: f64,
    carrier_hz: f64,
}

impl ArrayGeometry {
    /// Uniform linear array with `n` elements; spacing given in wavelengths
    /// (0.5 for the usual half-wavelength layout).
    pub fn ula(n: usize, carrier_hz: f64, spacing_wavelengths: f64) -> Result<Self, GeometryError> {
        if n == 0 {
            return Err(GeometryError::EmptyArray);
        }
        if carrier_hz <= 0.0 || spacing_wavelengths <= 0.0 {
            return Err(GeometryError::NonPositeParameter);
        }
        let wavelength = SPEED_OF_LIGHT / carrier_hz;
        Ok(Self {
            kind: ArrayKind::Ula,
            n_total: n,
            n_h: n,
            n_v: 1,
            spacing: spacing_wavelengths * wavelength,
            wavelength,
            carrier_hz,
        })
    }

    /// Uniform planar array with `n_h × n_v` elements on the yz-plane.
    pub fn upa(
        n_h: usize,
        n_v: usize,
        carrier_hz: f64,
        spacing_wavelengths: f64,
    ) -> Result<Self, GeometryError> {
        if n_h == 0 || n_v == 0 {
            return Err(GeometryError::EmptyArray);
        }
        if carrier_hz <= 0.0 || spacing_wavelengths <= 0.0 {
            return Err(GeometryError::NonPositeParameter);
        }
        let wavelength = SPEED_OF_LIGHT / carrier_hz;
        Ok(Self {
            kind: ArrayKind::Upa,
            n_total: n_h * n_v,
            n_h,
            n_v,
            spacing: spacing_wavelengths * wavelength,
            wavelength,
            carrier_hz,
        })
    }

    pub fn kind(&self) -> ArrayKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n_total
    }

    pub fn n_h(&self) -> usize {
        self.n_h
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    /// Inter-element spacing in meters.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn carrier_hz(&self) -> f64 {
        self.carrier_hz
    }

    /// Wavenumber k = 2π/λ.
    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength
    }

    /// Signed on-axis offset of ULA element `n`: δ_n = (2n - N + 1)d/2.
    pub fn ula_offset(&self, n: usize) -> f64 {
        debug_assert_eq!(self.kind, ArrayKind::Ula);
        (2.0 * n as f64 - self.n_total as f64 + 1.0) * self.spacing / 2.0
    }

    /// Horizontal index of UPA element `i` (row-major, zero based).
    pub fn horizontal_index(&self, i: usize) -> usize {
        i % self.n_h
    }

    /// Vertical index of UPA element `i`.
    pub fn vertical_index(&self, i: usize) -> usize {
        i / self.n_h
    }

    /// Element positions in meters. A ULA lies along the y-axis at
    /// (0, δ_n, 0); a UPA occupies the yz-plane at (0, mΔ, nΔ).
    pub fn element_positions(&self) -> Vec<[f64; 3]> {
        match self.kind {
            ArrayKind::Ula => (0..self.n_total)
                .map(|n| [0.0, self.ula_offset(n), 0.0])
                .collect(),
            ArrayKind::Upa => (0..self.n_total)
                .map(|i| {
                    let m = self.horizontal_index(i) as f64;
                    let n = self.vertical_index(i) as f64;
                    [0.0, m * self.spacing, n * self.spacing]
                })
                .collect(),
        }
    }

    /// Rayleigh (far-field boundary) distance 2D²/λ with D the array
    /// aperture: N·d for a ULA, the panel diagonal Δ·√(N_H² + N_V²) for a UPA.
    pub fn rayleigh_distance(&self) -> f64 {
        let aperture = match self.kind {
            ArrayKind::Ula => self.n_total as f64 * self.spacing,
            ArrayKind::Upa => {
                let nh = self.n_h as f64;
                let nv = self.n_v as f64;
                self.spacing * (nh * nh + nv * nv).sqrt()
            }
        };
        2.0 * aperture * aperture / self.wavelength
    }

    /// The frequency steering factors: `[a(ω)]` for a ULA, `[a(ω), c(ψ)]`
    /// for a UPA.
    pub fn frequency_factors(&self) -> Vec<SteeringFactor> {
        match self.kind {
            ArrayKind::Ula => vec![SteeringFactor::new(
                (0..self.n_total as u32).collect(),
                PhaseSign::Plus,
            )],
            ArrayKind::Upa => {
                let m: Vec<u32> =
                    (0..self.n_total).map(|i| self.horizontal_index(i) as u32).collect();
                let n: Vec<u32> =
                    (0..self.n_total).map(|i| self.vertical_index(i) as u32).collect();
                vec![
                    SteeringFactor::new(m, PhaseSign::Plus),
                    SteeringFactor::new(n, PhaseSign::Plus),
                ]
            }
        }
    }

    /// The curvature steering factor: `c(s)` with `g_i = i(N-1-i)` for a
    /// ULA, `d(s)` with `g_i = m_i² + n_i²` and negative phase for a UPA.
    pub fn curvature_factor(&self) -> SteeringFactor {
        match self.kind {
            ArrayKind::Ula => {
                let n = self.n_total as u32;
                SteeringFactor::new(
                    (0..n).map(|i| i * (n - 1 - i)).collect(),
                    PhaseSign::Plus,
                )
            }
            ArrayKind::Upa => {
                let g = (0..self.n_total)
                    .map(|i| {
                        let m = self.horizontal_index(i) as u32;
                        let n = self.vertical_index(i) as u32;
                        m * m + n * n
                    })
                    .collect();
                SteeringFactor::new(g, PhaseSign::Minus)
            }
        }
    }

    /// Curvature parameter bounds implied by a distance interval:
    /// `s = k·spacing²/(2r)` maps [r_min, r_max] to [s(r_max), s(r_min)].
    pub fn curvature_range(&self, r_min: f64, r_max: f64) -> (f64, f64) {
        let kd2 = self.wavenumber() * self.spacing * self.spacing / 2.0;
        let s_min = if r_max.is_finite() { kd2 / r_max } else { 0.0 };
        (s_min, kd2 / r_min)
    }
}

/// A unit-modulus phase vector `x ↦ [e^{j·σ·g_i·x}]_i`.
#[derive(Debug, Clone)]
pub struct SteeringFactor {
    exponents: Vec<u32>,
    sign: PhaseSign,
    /// Element indices sorted by exponent, with group boundaries, so
    /// correlations can be folded over distinct exponents only.
    perm: Vec<u32>,
    group_starts: Vec<u32>,
    unique: Vec<u32>,
}

impl SteeringFactor {
    pub fn new(exponents: Vec<u32>, sign: PhaseSign) -> Self {
        let mut perm: Vec<u32> = (0..exponents.len() as u32).collect();
        perm.sort_unstable_by_key(|&i| exponents[i as usize]);
        let mut group_starts = Vec::new();
        let mut unique = Vec::new();
        let mut prev = None;
        for (pos, &i) in perm.iter().enumerate() {
            let g = exponents[i as usize];
            if prev != Some(g) {
                group_starts.push(pos as u32);
                unique.push(g);
                prev = Some(g);
            }
        }
        group_starts.push(perm.len() as u32);
        Self { exponents, sign, perm, group_starts, unique }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn sign(&self) -> PhaseSign {
        self.sign
    }

    pub fn max_exponent(&self) -> u32 {
        *self.unique.last().unwrap_or(&0)
    }

    /// Evaluate the factor at `x`.
    pub fn evaluate(&self, x: f64) -> Vec<Complex64> {
        let s = self.sign.signum();
        self.exponents
            .iter()
            .map(|&g| Complex64::from_polar(1.0, s * g as f64 * x))
            .collect()
    }

    /// Fold `conj(v_i)` over elements sharing an exponent, producing the
    /// weights of the correlation `L(x) = ℜ{Σ_g w_g e^{jσgx}}`.
    pub fn compress_conjugated(&self, v: &[Complex64]) -> Vec<(f64, Complex64)> {
        debug_assert_eq!(v.len(), self.exponents.len());
        let mut out = Vec::with_capacity(self.unique.len());
        for (gi, &g) in self.unique.iter().enumerate() {
            let lo = self.group_starts[gi] as usize;
            let hi = self.group_starts[gi + 1] as usize;
            let mut w = Complex64::ZERO;
            for &idx in &self.perm[lo..hi] {
                w += v[idx as usize].conj();
            }
            out.push((g as f64, w));
        }
        out
    }

    /// `L(x)`, `L'(x)`, `L''(x)` for `L(x) = ℜ{Σ_g w_g e^{jσgx}}` given
    /// weights from [`Self::compress_conjugated`].
    pub fn correlation_derivs(&self, weights: &[(f64, Complex64)], x: f64) -> (f64, f64, f64) {
        let sgn = self.sign.signum();
        let mut s0 = Complex64::ZERO;
        let mut s1 = Complex64::ZERO;
        let mut s2 = Complex64::ZERO;
        for &(g, w) in weights {
            let t = w * Complex64::from_polar(1.0, sgn * g * x);
            s0 += t;
            s1 += g * t;
            s2 += g * g * t;
        }
        // d/dx e^{jσgx} = jσg e^{jσgx}; ℜ{jσ z} = -σ ℑ{z}, (jσ)² = -1.
        (s0.re, -sgn * s1.im, -s2.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ula_offsets_symmetric_pair() {
        let g = ArrayGeometry::ula(2, SPEED_OF_LIGHT, 1.0).unwrap();
        // spacing d = 1 m when carrier is c Hz and spacing is 1 wavelength
        assert_relative_eq!(g.ula_offset(0), -0.5);
        assert_relative_eq!(g.ula_offset(1), 0.5);
    }

    #[test]
    fn upa_index_order_row_major() {
        let g = ArrayGeometry::upa(2, 2, SPEED_OF_LIGHT, 1.0).unwrap();
        let mn: Vec<(usize, usize)> =
            (0..4).map(|i| (g.horizontal_index(i), g.vertical_index(i))).collect();
        assert_eq!(mn, vec![(0, 0), (1, 0), (0, 1), (1, 1)]);
    }

    #[test]
    fn ula_aperture_table_scale() {
        let g = ArrayGeometry::ula(256, 100e9, 0.5).unwrap();
        let aperture = 256.0 * g.spacing();
        assert!((aperture - 0.3837).abs() < 1e-3, "aperture {aperture}");
        let rd = g.rayleigh_distance();
        assert!((rd - 98.3).abs() < 0.5, "rayleigh {rd}");
    }

    #[test]
    fn upa_rayleigh_distance() {
        let g = ArrayGeometry::upa(16, 16, 3e9, 0.5).unwrap();
        let want = {
            let lam = SPEED_OF_LIGHT / 3e9;
            let d = (lam / 2.0) * (2.0 * 256.0f64).sqrt();
            2.0 * d * d / lam
        };
        assert_relative_eq!(g.rayleigh_distance(), want, max_relative = 1e-12);
        assert!((want - 25.6).abs() < 0.1);
    }

    #[test]
    fn degenerate_aperture_rayleigh_zero() {
        let g = ArrayGeometry::ula(1, 1e9, 1e-12).unwrap();
        assert!(g.rayleigh_distance() < 1e-9);
    }

    #[test]
    fn steering_factor_exponents() {
        let g = ArrayGeometry::ula(8, 100e9, 0.5).unwrap();
        let a = &g.frequency_factors()[0];
        assert_eq!(a.exponents(), &[0, 1, 2, 3, 4, 5, 6, 7]);
        let c = g.curvature_factor();
        assert_eq!(c.exponents(), &[0, 7, 12, 15, 16, 15, 12, 7]);
        assert_eq!(c.sign(), PhaseSign::Plus);

        let g = ArrayGeometry::upa(2, 2, 3e9, 0.5).unwrap();
        let f = g.frequency_factors();
        assert_eq!(f[0].exponents(), &[0, 1, 0, 1]);
        assert_eq!(f[1].exponents(), &[0, 0, 1, 1]);
        let d = g.curvature_factor();
        assert_eq!(d.exponents(), &[0, 1, 1, 2]);
        assert_eq!(d.sign(), PhaseSign::Minus);
    }

    #[test]
    fn factor_unit_modulus() {
        let g = ArrayGeometry::upa(4, 3, 3e9, 0.5).unwrap();
        for f in g.frequency_factors().iter().chain([g.curvature_factor()].iter()) {
            for v in f.evaluate(0.37) {
                assert!((v.norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn correlation_derivatives_match_finite_differences() {
        let g = ArrayGeometry::ula(16, 100e9, 0.5).unwrap();
        let c = g.curvature_factor();
        let v: Vec<Complex64> = (0..16)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let w = c.compress_conjugated(&v);
        let x = 3.3e-3;
        let h = 1e-7;
        let (_, d1, d2) = c.correlation_derivs(&w, x);
        let (lp, _, _) = c.correlation_derivs(&w, x + h);
        let (lm, _, _) = c.correlation_derivs(&w, x - h);
        let (l0, _, _) = c.correlation_derivs(&w, x);
        assert_relative_eq!(d1, (lp - lm) / (2.0 * h), max_relative = 1e-5);
        assert_relative_eq!(d2, (lp - 2.0 * l0 + lm) / (h * h), max_relative = 1e-3);
    }

    #[test]
    fn compress_groups_duplicate_exponents() {
        let f = SteeringFactor::new(vec![2, 0, 2, 1], PhaseSign::Plus);
        let v = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, -2.0),
        ];
        let w = f.compress_conjugated(&v);
        assert_eq!(w.len(), 3);
        assert_eq!(w[0], (0.0, Complex64::new(0.0, -1.0)));
        assert_eq!(w[1], (1.0, Complex64::new(0.0, 2.0)));
        assert_eq!(w[2], (2.0, Complex64::new(4.0, 0.0)));
    }
}
