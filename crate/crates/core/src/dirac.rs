//! Free and constant-potential plane waves of the one-dimensional Dirac
//! equation `(σx ∂x − (E − V) σz + m) ψ = 0` with two-component spinors.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative tolerance used to decide that `|E − V| = m`.
pub const THRESHOLD_TOL: f64 = 1e-12;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Fermion mass in natural units. All energies and momenta scale with it.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Mass(f64);

impl Mass {
    pub const UNIT: Mass = Mass(1.0);

    pub fn new(m: f64) -> Result<Self> {
        if m.is_finite() && m > 0.0 {
            Ok(Mass(m))
        } else {
            Err(Error::InvalidMass(m))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for Mass {
    fn default() -> Self {
        Mass::UNIT
    }
}

impl TryFrom<f64> for Mass {
    type Error = Error;
    fn try_from(m: f64) -> Result<Self> {
        Mass::new(m)
    }
}

impl From<Mass> for f64 {
    fn from(m: Mass) -> f64 {
        m.0
    }
}

impl fmt::Display for Mass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Two-component spinor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spinor {
    pub upper: Complex64,
    pub lower: Complex64,
}

impl Spinor {
    pub const ZERO: Spinor = Spinor {
        upper: Complex64 { re: 0.0, im: 0.0 },
        lower: Complex64 { re: 0.0, im: 0.0 },
    };

    pub fn new(upper: Complex64, lower: Complex64) -> Self {
        Spinor { upper, lower }
    }

    pub fn norm(&self) -> f64 {
        self.upper.norm().hypot(self.lower.norm())
    }

    pub fn is_finite(&self) -> bool {
        self.upper.is_finite() && self.lower.is_finite()
    }

    /// Probability current `j = −ψ†σ_y ψ`; positive means flow to the right.
    pub fn current(&self) -> f64 {
        -2.0 * (self.upper.conj() * self.lower).im
    }

    /// Components exchanged; used to build non-solutions in tests.
    pub fn swapped(&self) -> Self {
        Spinor::new(self.lower, self.upper)
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.upper + rhs.upper, self.lower + rhs.lower)
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.upper - rhs.upper, self.lower - rhs.lower)
    }
}

impl Mul<Complex64> for Spinor {
    type Output = Spinor;
    fn mul(self, rhs: Complex64) -> Spinor {
        Spinor::new(self.upper * rhs, self.lower * rhs)
    }
}

impl Mul<f64> for Spinor {
    type Output = Spinor;
    fn mul(self, rhs: f64) -> Spinor {
        Spinor::new(self.upper * rhs, self.lower * rhs)
    }
}

/// Kinematic character of a region at a given energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `E − V > m`.
    ParticlePropagating,
    /// `E − V < −m`: the hole continuum.
    HolePropagating,
    /// `|E − V| < m`.
    Evanescent,
    /// `|E − V| = m`: zero momentum.
    Threshold,
}

impl Regime {
    pub fn is_propagating(self) -> bool {
        matches!(self, Regime::ParticlePropagating | Regime::HolePropagating)
    }
}

/// Propagation (or decay) direction of a plane wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Right,
    Left,
}

/// Signed momentum of the right-moving (or rightward-decaying) wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Momentum {
    pub q: Complex64,
    pub regime: Regime,
}

/// True when `|E − V|` equals `m` to [`THRESHOLD_TOL`].
pub fn at_threshold(kinetic: f64, m: f64) -> bool {
    (kinetic.abs() - m).abs() <= THRESHOLD_TOL * m.max(kinetic.abs())
}

/// Momentum of the right-moving wave in a region of constant potential.
///
/// Right-moving means positive group velocity `q / (E − V)`, so in the hole
/// continuum the returned momentum is negative. Evanescent momenta sit on the
/// positive imaginary axis, i.e. `e^{iqx}` decays to the right.
pub fn momentum_branch(energy: f64, potential: f64, m: Mass) -> Momentum {
    let m = m.get();
    let w = energy - potential;
    if at_threshold(w, m) {
        return Momentum {
            q: Complex64::new(0.0, 0.0),
            regime: Regime::Threshold,
        };
    }
    // (w - m)(w + m) avoids cancellation in w² − m² near threshold.
    let q2 = (w - m) * (w + m);
    if q2 > 0.0 {
        let q = q2.sqrt();
        if w > 0.0 {
            Momentum {
                q: Complex64::new(q, 0.0),
                regime: Regime::ParticlePropagating,
            }
        } else {
            Momentum {
                q: Complex64::new(-q, 0.0),
                regime: Regime::HolePropagating,
            }
        }
    } else {
        Momentum {
            q: Complex64::new(0.0, (-q2).sqrt()),
            regime: Regime::Evanescent,
        }
    }
}

/// Normalization convention for propagating plane waves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Normalization {
    /// Periodic box of length `2L`.
    Box { half_length: f64 },
    /// Continuum states normalized in energy.
    Energy,
}

impl Normalization {
    fn length_factor(self) -> f64 {
        match self {
            Normalization::Box { half_length } => (2.0 * half_length).sqrt(),
            Normalization::Energy => (2.0 * PI).sqrt(),
        }
    }
}

/// A plane wave `amplitude · e^{iqx}` in a region of constant potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveMode {
    pub energy: f64,
    pub potential: f64,
    pub mass: Mass,
    /// Wavenumber of `e^{iqx}`, already oriented by `direction`.
    pub q: Complex64,
    pub regime: Regime,
    pub direction: Direction,
    pub amplitude: Spinor,
    pub normalization: Normalization,
    /// `ε = |E − V|`.
    pub epsilon: f64,
}

impl PlaneWaveMode {
    /// Spinor value at `x`.
    pub fn at(&self, x: f64) -> Spinor {
        self.amplitude * (I * self.q * x).exp()
    }

    /// Group velocity `q / (E − V)`; `None` unless propagating.
    pub fn group_velocity(&self) -> Option<f64> {
        self.regime
            .is_propagating()
            .then(|| self.q.re / (self.energy - self.potential))
    }
}

/// Unnormalized spinor `(iq, E − V − m)` solving the equation for `e^{iqx}`.
pub fn spinor_for(q: Complex64, kinetic: f64, m: f64) -> Spinor {
    Spinor::new(I * q, Complex64::new(kinetic - m, 0.0))
}

/// Plane-wave solution with the particle (`N₊`) or hole (`N₋`) normalization.
///
/// Evanescent modes come back unnormalized (factor 1). Threshold energies
/// have zero momentum and an undefined normalization.
pub fn plane_wave(
    energy: f64,
    potential: f64,
    m: Mass,
    direction: Direction,
    normalization: Normalization,
) -> Result<PlaneWaveMode> {
    let mass = m.get();
    let w = energy - potential;
    let eps = w.abs();
    let branch = momentum_branch(energy, potential, m);
    let q = match direction {
        Direction::Right => branch.q,
        Direction::Left => -branch.q,
    };
    let factor = match branch.regime {
        Regime::Threshold => {
            return Err(Error::NormalizationSingular {
                energy,
                level: potential,
            })
        }
        Regime::Evanescent => 1.0,
        Regime::ParticlePropagating => {
            1.0 / (normalization.length_factor() * (2.0 * eps * (eps - mass)).sqrt())
        }
        Regime::HolePropagating => {
            1.0 / (normalization.length_factor() * (2.0 * eps * (eps + mass)).sqrt())
        }
    };
    Ok(PlaneWaveMode {
        energy,
        potential,
        mass: m,
        q,
        regime: branch.regime,
        direction,
        amplitude: spinor_for(q, w, mass) * factor,
        normalization,
        epsilon: eps,
    })
}

/// Relative residual `|(σx ∂x − (E−V)σz + m)ψ| / |ψ|` of a plane wave at `x`.
pub fn dirac_residual(mode: &PlaneWaveMode, x: f64) -> f64 {
    let psi = mode.at(x);
    let dpsi = psi * (I * mode.q);
    let w = mode.energy - mode.potential;
    let m = mode.mass.get();
    let r = Spinor::new(
        dpsi.lower - psi.upper * w + psi.upper * m,
        dpsi.upper + psi.lower * w + psi.lower * m,
    );
    let scale = psi.norm();
    if scale == 0.0 {
        r.norm()
    } else {
        r.norm() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const M: Mass = Mass::UNIT;

    #[test]
    fn particle_branch() {
        let b = momentum_branch(1.5, 0.0, M);
        assert_eq!(b.regime, Regime::ParticlePropagating);
        assert!((b.q.re - 1.118034).abs() < 1e-6);
        assert_eq!(b.q.im, 0.0);
    }

    #[test]
    fn hole_branch_is_negative_for_right_movers() {
        let b = momentum_branch(1.5, 5.0, M);
        assert_eq!(b.regime, Regime::HolePropagating);
        assert!((b.q.re + 3.354102).abs() < 1e-6);
    }

    #[test]
    fn evanescent_branch_on_positive_imaginary_axis() {
        let b = momentum_branch(0.5, 0.0, M);
        assert_eq!(b.regime, Regime::Evanescent);
        assert_eq!(b.q.re, 0.0);
        assert!((b.q.im - 0.866025).abs() < 1e-6);
    }

    #[test]
    fn threshold_is_explicit() {
        for (e, v) in [(1.0, 0.0), (4.0, 5.0), (6.0, 5.0), (-1.0, 0.0)] {
            let b = momentum_branch(e, v, M);
            assert_eq!(b.regime, Regime::Threshold);
            assert_eq!(b.q, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn energy_normalized_particle() {
        let w = plane_wave(1.5, 0.0, M, Direction::Right, Normalization::Energy).unwrap();
        let n = 1.0 / (2.0 * PI * 2.0 * 1.5 * 0.5).sqrt();
        assert!((w.amplitude.upper - Complex64::new(0.0, 1.25f64.sqrt() * n)).norm() < 1e-15);
        assert!((w.amplitude.lower.re - 0.5 * n).abs() < 1e-15);
        assert_eq!(w.group_velocity().map(|v| v > 0.0), Some(true));
    }

    #[test]
    fn hole_spinor_lower_component() {
        let w = plane_wave(-1.5, 0.0, M, Direction::Right, Normalization::Energy).unwrap();
        assert_eq!(w.regime, Regime::HolePropagating);
        let n = 1.0 / (2.0 * PI * 2.0 * 1.5 * 2.5).sqrt();
        assert!((w.amplitude.lower.re / n + 2.5).abs() < 1e-12);
        assert!(w.group_velocity().unwrap() > 0.0);
        assert!(w.q.re < 0.0);
    }

    #[test]
    fn threshold_normalization_is_singular() {
        for dir in [Direction::Right, Direction::Left] {
            let err = plane_wave(1.0, 0.0, M, dir, Normalization::Energy).unwrap_err();
            assert!(matches!(err, Error::NormalizationSingular { .. }));
        }
    }

    #[test]
    fn residual_detects_solutions_and_non_solutions() {
        let w = plane_wave(1.5, 0.0, M, Direction::Right, Normalization::Energy).unwrap();
        assert!(dirac_residual(&w, 0.3) < 1e-12);
        let mut bad = w;
        bad.amplitude = w.amplitude.swapped();
        assert!(dirac_residual(&bad, 0.3) > 0.1);

        let ev = plane_wave(0.5, 0.0, M, Direction::Right, Normalization::Energy).unwrap();
        assert!(dirac_residual(&ev, 2.0) < 1e-12);
        let ev_left = plane_wave(0.5, 0.0, M, Direction::Left, Normalization::Energy).unwrap();
        assert!(dirac_residual(&ev_left, -2.0) < 1e-12);
    }

    #[test]
    fn box_and_energy_normalization_differ_by_constant() {
        let half_length = 7.5;
        for (e, v) in [(1.5, 0.0), (1.5, 5.0), (-3.0, 1.0)] {
            let a = plane_wave(e, v, M, Direction::Right, Normalization::Energy).unwrap();
            let b = plane_wave(e, v, M, Direction::Right, Normalization::Box { half_length })
                .unwrap();
            let ratio = b.amplitude.norm() / a.amplitude.norm();
            assert!((ratio - (2.0 * PI / (2.0 * half_length)).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn right_movers_carry_positive_current() {
        for (e, v) in [(1.5, 0.0), (1.5, 5.0), (-2.0, 0.0), (3.0, -4.0)] {
            let w = plane_wave(e, v, M, Direction::Right, Normalization::Energy).unwrap();
            assert!(w.at(0.0).current() > 0.0, "E={e} V={v}");
            let l = plane_wave(e, v, M, Direction::Left, Normalization::Energy).unwrap();
            assert!(l.at(0.0).current() < 0.0, "E={e} V={v}");
        }
    }

    #[test]
    fn mass_validation() {
        assert!(Mass::new(0.0).is_err());
        assert!(Mass::new(-1.0).is_err());
        assert!(Mass::new(f64::NAN).is_err());
        assert_eq!(Mass::new(2.0).unwrap().get(), 2.0);
    }
}
