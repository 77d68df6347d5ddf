//! Closed-form results: the Klein step, the square barrier and its
//! transmission resonances, the Sauter weak-field limit, Coulomb penetration
//! ratios and the Schrödinger-equivalent effective potential.
//!
//! Amplitudes `B` (reflected) and `F` (transmitted) multiply the unnormalized
//! spinors `(iq, E − V − m)` with plane-wave phases referenced at the first and
//! last potential discontinuity respectively, which is the same basis the
//! transfer engine uses.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dirac::{at_threshold, momentum_branch, Mass, Regime};
use crate::{Error, Result};

/// Default fine-structure constant.
pub const ALPHA: f64 = 1.0 / 137.036;

/// Tolerance on `2pa − Nπ` for flagging a transmission resonance.
pub const RESONANCE_TOL: f64 = 1e-9;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Reflection and transmission at a single energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringResult {
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "T")]
    pub t: f64,
    /// Positive kinematic factor; absent when the far region is evanescent.
    pub kappa: Option<f64>,
    #[serde(rename = "B")]
    pub b: Complex64,
    #[serde(rename = "F")]
    pub f: Complex64,
    pub resonance: bool,
}

/// Kinematic factor `κ = √((V−E+m)(E+m) / ((V−E−m)(E−m)))`.
///
/// Defined when both the free region (`E > m`) and the region at `V` are
/// propagating. In the Klein zone `m < E < V − m` it is at least 1.
pub fn kappa(energy: f64, potential: f64, m: Mass) -> Option<f64> {
    let m = m.get();
    let num = (potential - energy + m) * (energy + m);
    let den = (potential - energy - m) * (energy - m);
    let k2 = num / den;
    (den != 0.0 && k2 > 0.0 && k2.is_finite()).then(|| k2.sqrt())
}

fn kappa_squared(energy: f64, potential: f64, m: f64) -> f64 {
    (potential - energy + m) * (energy + m) / ((potential - energy - m) * (energy - m))
}

fn incident_momentum(energy: f64, m: Mass) -> Result<f64> {
    let mass = m.get();
    if energy <= mass || at_threshold(energy, mass) {
        return Err(Error::NoIncidentChannel { energy, level: 0.0 });
    }
    Ok(((energy - mass) * (energy + mass)).sqrt())
}

/// Electron of energy `E` incident from the left on `V(x) = V θ(x)`.
pub fn step_scatter(energy: f64, potential: f64, m: Mass) -> Result<ScatteringResult> {
    let mass = m.get();
    let k = incident_momentum(energy, m)?;
    let w = energy - potential;
    let branch = momentum_branch(energy, potential, m);
    match branch.regime {
        Regime::Threshold => Err(Error::Threshold {
            energy,
            level: potential,
        }),
        Regime::Evanescent => {
            // Decaying wave e^{-|q|x}: (1 − B)/(1 + B) = q (E − m) / (k (W − m)).
            let rho = branch.q * (energy - mass) / (k * (w - mass));
            let b = (1.0 - rho) / (1.0 + rho);
            let f = (1.0 + b) * (energy - mass) / (w - mass);
            Ok(ScatteringResult {
                energy,
                r: 1.0,
                t: 0.0,
                kappa: None,
                b,
                f,
                resonance: false,
            })
        }
        Regime::ParticlePropagating | Regime::HolePropagating => {
            let kap = kappa_squared(energy, potential, mass).sqrt();
            let r = ((1.0 - kap) / (1.0 + kap)).powi(2);
            let t = 4.0 * kap / (1.0 + kap).powi(2);
            let b = Complex64::new((kap - 1.0) / (kap + 1.0), 0.0);
            let f = (1.0 + b) * (energy - mass) / (w - mass);
            Ok(ScatteringResult {
                energy,
                r,
                t,
                kappa: Some(kap),
                b,
                f,
                resonance: false,
            })
        }
    }
}

/// Electron incident on the square barrier `V` for `|x| < a`.
pub fn barrier_scatter(
    energy: f64,
    potential: f64,
    half_width: f64,
    m: Mass,
) -> Result<ScatteringResult> {
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::Domain(format!(
            "barrier half-width must be positive, got {half_width}"
        )));
    }
    let mass = m.get();
    let k = incident_momentum(energy, m)?;
    let w = energy - potential;
    let branch = momentum_branch(energy, potential, m);
    // A1 and B1 are the real combinations (W ± m)... · sin(2pa)/p entering
    // 1 − B = F (cos 2pa − i A1) and 1 + B = F (cos 2pa − i B1).
    let ratio_a = (w + mass) * (energy - mass) / k;
    let ratio_b = (w - mass) * k / (energy - mass);
    match branch.regime {
        Regime::Threshold => Err(Error::Threshold {
            energy,
            level: potential,
        }),
        Regime::Evanescent => {
            let p = branch.q.im;
            let y = 2.0 * p * half_width;
            let e2 = (-2.0 * y).exp();
            let tanh = (1.0 - e2) / (1.0 + e2);
            let sech = 2.0 * (-y).exp() / (1.0 + e2);
            let a1 = ratio_a * tanh / p;
            let b1 = ratio_b * tanh / p;
            let den = Complex64::new(2.0, -(a1 + b1));
            let f = 2.0 * sech / den;
            let b = I * (a1 - b1) / den;
            let norm = 4.0 + (a1 + b1).powi(2);
            Ok(ScatteringResult {
                energy,
                r: (a1 - b1).powi(2) / norm,
                t: 4.0 * sech * sech / norm,
                kappa: None,
                b,
                f,
                resonance: false,
            })
        }
        Regime::ParticlePropagating | Regime::HolePropagating => {
            let p = branch.q.re.abs();
            let theta = 2.0 * p * half_width;
            let k2 = kappa_squared(energy, potential, mass);
            let s2 = theta.sin().powi(2);
            let mismatch = (1.0 - k2).powi(2) * s2;
            let den_rt = 4.0 * k2 + mismatch;

            let sinc = theta.sin() / p;
            let a1 = ratio_a * sinc;
            let b1 = ratio_b * sinc;
            let den = Complex64::new(2.0 * theta.cos(), -(a1 + b1));
            let f = 2.0 / den;
            let b = I * f * (a1 - b1) / 2.0;

            let n = (theta / PI).round();
            let resonance =
                potential != 0.0 && n >= 1.0 && (theta - n * PI).abs() < RESONANCE_TOL;
            Ok(ScatteringResult {
                energy,
                r: mismatch / den_rt,
                t: 4.0 * k2 / den_rt,
                kappa: Some(k2.sqrt()),
                b,
                f,
                resonance,
            })
        }
    }
}

/// Phase-averaged wide-barrier coefficients `R∞`, `T∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WideBarrierLimit {
    pub r_inf: f64,
    pub t_inf: f64,
}

/// `R∞ = (1−κ²)² / (8κ² + (1−κ²)²)`, `T∞ = 8κ² / (8κ² + (1−κ²)²)`: the
/// barrier coefficients with `sin²(2pa)` replaced by its mean ½.
pub fn wide_barrier_limit(energy: f64, potential: f64, m: Mass) -> Result<WideBarrierLimit> {
    let mass = m.get();
    if !(energy > mass && energy < potential - mass) {
        return Err(Error::Domain(format!(
            "E = {energy} is outside the Klein zone ({mass}, {})",
            potential - mass
        )));
    }
    let k2 = kappa_squared(energy, potential, mass);
    let mismatch = (1.0 - k2).powi(2);
    let den = 8.0 * k2 + mismatch;
    Ok(WideBarrierLimit {
        r_inf: mismatch / den,
        t_inf: 8.0 * k2 / den,
    })
}

/// A perfectly transmitting barrier energy, `2pa = Nπ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "E")]
    pub energy: f64,
}

/// Resonance energy for index `n`: `E_N = V − √(m² + N²π²/4a²)`.
pub fn resonance_energy(n: u32, potential: f64, half_width: f64, m: Mass) -> f64 {
    let mass = m.get();
    let pn = f64::from(n) * PI / (2.0 * half_width);
    potential - mass.hypot(pn)
}

/// Klein-zone transmission resonances of the square barrier, ascending `N`.
pub fn resonance_energies(potential: f64, half_width: f64, m: Mass) -> Vec<Resonance> {
    let mass = m.get();
    if !(potential > 2.0 * mass) || !(half_width > 0.0) {
        return Vec::new();
    }
    (1u32..)
        .map(|n| Resonance {
            n,
            energy: resonance_energy(n, potential, half_width, m),
        })
        .take_while(|r| r.energy > mass)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SauterTransmission {
    #[serde(rename = "T")]
    pub t: f64,
    /// Field strength below the critical scale `π m²`.
    pub weak_field: bool,
}

/// Weak-field transmission `e^{−πm²/v}` through a linear ramp of slope `v`.
pub fn sauter_transmission(field: f64, m: Mass) -> Result<SauterTransmission> {
    if !(field > 0.0) {
        return Err(Error::Domain(format!(
            "field strength must be positive, got {field}"
        )));
    }
    let m2 = m.get() * m.get();
    Ok(SauterTransmission {
        t: (-PI * m2 / field).exp(),
        weak_field: field < PI * m2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum CoulombRegime {
    Nonrelativistic { energy: f64, momentum: f64 },
    Relativistic,
}

/// Positron-to-electron density ratio at the origin of a Coulomb field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulombRatio {
    #[serde(rename = "Z")]
    pub z: f64,
    pub alpha: f64,
    pub regime: CoulombRegime,
    pub rho: f64,
    pub f: f64,
}

/// `ρ = e^{−2πZαE/p}` (nonrelativistic) or `ρ = f e^{−2πZα}` (relativistic).
///
/// The relativistic prefactor `f` is a ratio of complex gamma functions close
/// to one for large `Z`; it is left to the caller. The nonrelativistic ratio
/// carries no prefactor, and `f` is ignored there.
pub fn coulomb_penetration(
    z: f64,
    regime: CoulombRegime,
    alpha: f64,
    prefactor: f64,
) -> Result<CoulombRatio> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("nuclear charge must be positive, got {z}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    match regime {
        CoulombRegime::Nonrelativistic { energy, momentum } => {
            if momentum == 0.0 {
                return Err(Error::DivergentExponent(momentum));
            }
            if !(momentum > 0.0) || !(energy > 0.0) {
                return Err(Error::Domain(format!(
                    "nonrelativistic ratio needs E > 0 and p > 0, got E = {energy}, p = {momentum}"
                )));
            }
            Ok(CoulombRatio {
                z,
                alpha,
                regime,
                rho: (-2.0 * PI * z * alpha * energy / momentum).exp(),
                f: 1.0,
            })
        }
        CoulombRegime::Relativistic => {
            if !(prefactor > 0.0) {
                return Err(Error::Domain(format!(
                    "prefactor f must be positive, got {prefactor}"
                )));
            }
            Ok(CoulombRatio {
                z,
                alpha,
                regime,
                rho: prefactor * (-2.0 * PI * z * alpha).exp(),
                f: prefactor,
            })
        }
    }
}

/// Schrödinger-equivalent potential `(2EV − V²) / 2m`.
pub fn effective_potential(potential: f64, energy: f64, m: Mass) -> f64 {
    (2.0 * energy * potential - potential * potential) / (2.0 * m.get())
}
