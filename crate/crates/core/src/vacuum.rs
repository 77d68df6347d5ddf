//! Normal modes of the Klein step inside the Klein zone `m < E < V − m`,
//! their currents, the vacuum pair-production current and the closed-form
//! emission estimates of a slightly supercritical well.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{kappa, resonance_energy, step_scatter};
use crate::dirac::{Mass, Spinor};
use crate::quad::{integrate, QuadControl};
use crate::spectrum::supercritical_count;
use crate::transfer::{scatter_numeric, PotentialProfile};
use crate::{Error, Result};

/// Relative error ceiling for a reported pair current.
pub const CURRENT_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModeKind {
    /// Incident from the left, no reflected wave.
    L,
    /// Incident from the right, no reflected wave.
    R,
}

/// `amplitude · e^{i k x}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveComponent {
    pub amplitude: Spinor,
    pub wavenumber: f64,
}

impl WaveComponent {
    fn at(&self, x: f64) -> Spinor {
        self.amplitude * Complex64::from_polar(1.0, self.wavenumber * x)
    }
}

/// Energy-normalized mode of the step `V θ(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KleinMode {
    pub kind: ModeKind,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "V")]
    pub potential: f64,
    pub mass: Mass,
    pub kappa: f64,
    /// Plane waves for `x < 0`.
    pub left: Vec<WaveComponent>,
    /// Plane waves for `x > 0`.
    pub right: Vec<WaveComponent>,
    /// Mismatch of the two sides at `x = 0`, relative to the spinor size.
    pub continuity_residual: f64,
}

impl KleinMode {
    pub fn at(&self, x: f64) -> Spinor {
        let side = if x < 0.0 { &self.left } else { &self.right };
        side.iter().fold(Spinor::ZERO, |acc, c| acc + c.at(x))
    }

    fn side_sum(side: &[WaveComponent]) -> Spinor {
        side.iter().fold(Spinor::ZERO, |acc, c| acc + c.amplitude)
    }

    /// Ratio of the reflected to the incident amplitude on the left for the
    /// `R` mode; `None` for the `L` mode.
    pub fn left_reflection_ratio(&self) -> Option<f64> {
        match (self.kind, self.left.as_slice()) {
            (ModeKind::R, [refl, inc]) => Some((refl.amplitude.upper / inc.amplitude.upper).re),
            _ => None,
        }
    }
}

/// The `u_L` and `u_R` modes at energy `E`.
pub fn klein_modes(energy: f64, potential: f64, m: Mass) -> Result<(KleinMode, KleinMode)> {
    let mass = m.get();
    if !(energy > mass && energy < potential - mass) {
        return Err(Error::Domain(format!(
            "E = {energy} lies outside the Klein zone ({mass}, {})",
            potential - mass
        )));
    }
    let kap = kappa(energy, potential, m)
        .ok_or_else(|| Error::Domain(format!("κ undefined at E = {energy}")))?;
    let k = ((energy - mass) * (energy + mass)).sqrt();
    let hole = potential - energy;
    let p = ((hole - mass) * (hole + mass)).sqrt();
    let norm = (2.0 * PI).sqrt().recip();
    let i = Complex64::i();
    let particle = |sign: f64, scale: f64| {
        Spinor::new(i, Complex64::from(sign * k / (energy + mass))) * (scale * norm)
    };
    let antiparticle = |sign: f64, scale: f64| {
        Spinor::new(i, Complex64::from(sign * p / (energy + mass - potential))) * (scale * norm)
    };
    let transmitted = (2.0 * kap).sqrt() / (kap + 1.0);
    let hole_weight = ((hole - mass) / (2.0 * p)).sqrt();
    let particle_weight = ((energy + mass) / (2.0 * k)).sqrt();

    let mode_l = finish(
        ModeKind::L,
        energy,
        potential,
        m,
        kap,
        vec![WaveComponent {
            amplitude: particle(1.0, transmitted * ((energy + mass) / k).sqrt()),
            wavenumber: k,
        }],
        vec![
            WaveComponent {
                amplitude: antiparticle(1.0, (kap - 1.0) / (kap + 1.0) * hole_weight),
                wavenumber: p,
            },
            WaveComponent {
                amplitude: antiparticle(-1.0, hole_weight),
                wavenumber: -p,
            },
        ],
    );
    let mode_r = finish(
        ModeKind::R,
        energy,
        potential,
        m,
        kap,
        vec![
            WaveComponent {
                amplitude: particle(1.0, (1.0 - kap) / (1.0 + kap) * particle_weight),
                wavenumber: k,
            },
            WaveComponent {
                amplitude: particle(-1.0, particle_weight),
                wavenumber: -k,
            },
        ],
        vec![WaveComponent {
            amplitude: antiparticle(1.0, transmitted * ((hole - mass) / p).sqrt()),
            wavenumber: p,
        }],
    );
    Ok((mode_l, mode_r))
}

fn finish(
    kind: ModeKind,
    energy: f64,
    potential: f64,
    mass: Mass,
    kappa: f64,
    left: Vec<WaveComponent>,
    right: Vec<WaveComponent>,
) -> KleinMode {
    let l = KleinMode::side_sum(&left);
    let r = KleinMode::side_sum(&right);
    let continuity_residual = (l - r).norm() / l.norm().max(r.norm());
    KleinMode {
        kind,
        energy,
        potential,
        mass,
        kappa,
        left,
        right,
        continuity_residual,
    }
}

/// `j = −u†σ_y u` at `x`.
pub fn mode_current(mode: &KleinMode, x: f64) -> f64 {
    mode.at(x).current()
}

/// `(2κ/π)/(κ+1)²`, the magnitude of either mode current.
pub fn mode_current_magnitude(kappa: f64) -> f64 {
    2.0 * kappa / PI / (kappa + 1.0).powi(2)
}

/// What drives the pair current.
#[derive(Debug, Clone, PartialEq)]
pub enum CurrentSource {
    /// Sharp step `V θ(x)`, transmission in closed form.
    Step { potential: f64, mass: Mass },
    /// Any step-like staircase, transmission from transfer matrices.
    Profile(PotentialProfile),
}

impl CurrentSource {
    fn mass(&self) -> Mass {
        match self {
            CurrentSource::Step { mass, .. } => *mass,
            CurrentSource::Profile(p) => p.mass,
        }
    }

    /// Levels `(low, high)` on the two sides.
    fn levels(&self) -> (f64, f64) {
        match self {
            CurrentSource::Step { potential, .. } => (0.0, *potential),
            CurrentSource::Profile(p) => (p.left_level, p.right_level),
        }
    }

    /// Transmission, with the low side on the left.
    pub fn transmission(&self, energy: f64) -> Result<f64> {
        match self {
            CurrentSource::Step { potential, mass } => {
                Ok(step_scatter(energy, *potential, *mass)?.t)
            }
            CurrentSource::Profile(p) if p.delta_v() < 0.0 => {
                Ok(scatter_numeric(&p.reversed(), energy)?.scattering.t)
            }
            CurrentSource::Profile(p) => Ok(scatter_numeric(p, energy)?.scattering.t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurrentReport {
    /// `∫ j_L dE` over the Klein zone from the explicit modes (step only).
    pub j_l: Option<f64>,
    /// `∫ j_R dE` over the Klein zone from the explicit modes (step only).
    pub j_r: Option<f64>,
    /// `⟨0|j|0⟩ = −(1/2π) ∫ T dE`.
    pub j_vacuum: f64,
    #[serde(rename = "E_range")]
    pub e_range: (f64, f64),
    pub quadrature_error: f64,
    pub evaluations: usize,
    /// True when the Klein zone is empty and no pairs are produced.
    pub subcritical: bool,
}

/// Integral of `f` over the Klein zone `(lo + m, hi − m)` with
/// `E − lo = m cosh θ` on the lower half and `hi − E = m cosh θ` on the
/// upper half. With `fold` the upper half is taken equal to the lower one.
fn klein_zone_integral<F>(f: F, lo: f64, hi: f64, mass: f64, fold: bool, control: QuadControl) -> Result<(f64, f64, usize)>
where
    F: Fn(f64) -> f64 + Sync,
{
    let theta_mid = (0.5 * (hi - lo) / mass).acosh();
    let lower = integrate(
        |t| f(lo + mass * t.cosh()) * mass * t.sinh(),
        0.0,
        theta_mid,
        control,
    );
    let (value, error, evaluations, converged) = if fold {
        (2.0 * lower.value, 2.0 * lower.error, lower.evaluations, lower.converged)
    } else {
        let upper = integrate(
            |t| f(hi - mass * t.cosh()) * mass * t.sinh(),
            0.0,
            theta_mid,
            control,
        );
        (
            lower.value + upper.value,
            lower.error + upper.error,
            lower.evaluations + upper.evaluations,
            lower.converged && upper.converged,
        )
    };
    if !value.is_finite() || !converged || error > CURRENT_REL_TOL * value.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::QuadratureFailed { value, error });
    }
    Ok((value, error, evaluations))
}

/// `∫ T dE` over the Klein zone. `fold` uses `T(E) = T(V − E)`, valid for
/// the sharp step and for antisymmetric ramps.
pub fn klein_zone_transmission(source: &CurrentSource, fold: bool, control: QuadControl) -> Result<(f64, f64, usize)> {
    let (a, b) = source.levels();
    let (lo, hi) = (a.min(b), a.max(b));
    let mass = source.mass().get();
    if hi - lo <= 2.0 * mass {
        return Ok((0.0, 0.0, 0));
    }
    let t = |e: f64| source.transmission(e).unwrap_or(f64::NAN);
    klein_zone_integral(t, lo, hi, mass, fold, control)
}

/// Vacuum expectation of the current in the presence of the source.
pub fn pair_current(source: &CurrentSource, control: QuadControl) -> Result<CurrentReport> {
    let (a, b) = source.levels();
    let (lo, hi) = (a.min(b), a.max(b));
    let mass = source.mass().get();
    let e_range = (lo + mass, hi - mass);
    if hi - lo <= 2.0 * mass {
        return Ok(CurrentReport {
            j_l: None,
            j_r: None,
            j_vacuum: 0.0,
            e_range,
            quadrature_error: 0.0,
            evaluations: 0,
            subcritical: true,
        });
    }
    let fold = matches!(source, CurrentSource::Step { .. });
    let (integral, error, evaluations) = klein_zone_transmission(source, fold, control)?;
    let (j_l, j_r) = match source {
        CurrentSource::Step { potential, mass } => {
            let mode_integral = |kind: ModeKind| {
                let j = |e: f64| match klein_modes(e, *potential, *mass) {
                    Ok((l, r)) => mode_current(if kind == ModeKind::L { &l } else { &r }, 0.0),
                    Err(_) => f64::NAN,
                };
                klein_zone_integral(j, lo, hi, mass.get(), false, control).map(|r| r.0)
            };
            (Some(mode_integral(ModeKind::L)?), Some(mode_integral(ModeKind::R)?))
        }
        CurrentSource::Profile(_) => (None, None),
    };
    Ok(CurrentReport {
        j_l,
        j_r,
        j_vacuum: -integral / (2.0 * PI),
        e_range,
        quadrature_error: error / (2.0 * PI),
        evaluations,
        subcritical: false,
    })
}

/// Write `E, T, −T/2π` on a uniform grid over the Klein zone as CSV.
pub fn write_integrand_csv<W: Write>(source: &CurrentSource, n_points: usize, out: &mut W) -> Result<()> {
    let (a, b) = source.levels();
    let (lo, hi) = (a.min(b), a.max(b));
    let mass = source.mass().get();
    let io = |e: std::io::Error| Error::Domain(format!("write failed: {e}"));
    writeln!(out, "E,T,j").map_err(io)?;
    if hi - lo <= 2.0 * mass || n_points == 0 {
        return Ok(());
    }
    let (e0, e1) = (lo + mass, hi - mass);
    for i in 0..n_points {
        let e = e0 + (e1 - e0) * (i as f64 + 0.5) / n_points as f64;
        let t = source.transmission(e)?;
        writeln!(out, "{e:.16e},{t:.16e},{:.16e}", -t / (2.0 * PI)).map_err(io)?;
    }
    Ok(())
}

/// Closed-form emission estimates for a well `V` just past `2m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionEstimate {
    /// `V − 2m`.
    #[serde(rename = "Delta")]
    pub delta: f64,
    #[serde(rename = "Q_S")]
    pub q_s: i64,
    /// Lifetime of the slowest positron, `2ma²/π`.
    pub tau: f64,
    /// Average momentum `√(mΔ/2)`.
    pub p_bar: f64,
    /// Typical emission time `a√(2m/Δ)`.
    pub tau_bar: f64,
    /// `|E_N| = V − √(p_N² + m²)` with `p_N = Nπ/2a`, for `N = 1..Q_S`.
    #[serde(rename = "E_N")]
    pub energies: Vec<f64>,
    /// `Δ ≤ 0.2 m`, where the small-excess estimates apply.
    pub small_delta_valid: bool,
}

pub fn emission_estimates(potential: f64, half_width: f64, m: Mass) -> Result<EmissionEstimate> {
    let mass = m.get();
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::Domain(format!(
            "half-width must be positive, got {half_width}"
        )));
    }
    if !(potential > 2.0 * mass && potential.is_finite()) {
        return Err(Error::Domain(format!(
            "V = {potential} is not supercritical (needs V > 2m)"
        )));
    }
    let delta = potential - 2.0 * mass;
    let q_s = supercritical_count(potential, half_width, m);
    let energies = (1..=q_s as u32)
        .map(|n| resonance_energy(n, potential, half_width, m))
        .collect();
    Ok(EmissionEstimate {
        delta,
        q_s,
        tau: 2.0 * mass * half_width * half_width / PI,
        p_bar: (mass * delta / 2.0).sqrt(),
        tau_bar: half_width * (2.0 * mass / delta).sqrt(),
        energies,
        small_delta_valid: delta <= 0.2 * mass,
    })
}
