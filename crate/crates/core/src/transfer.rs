//! Transfer-matrix scattering off piecewise-constant potentials.
//!
//! Inside a segment of constant potential the Dirac equation reads
//! `ψ' = K ψ` with the real matrix `K = [[0, −(W+m)], [W−m, 0]]`,
//! `W = E − V`, and `K² = −q² I`. The segment propagator
//! `exp(K d) = C(d) I + S(d) K` is therefore real, with `C = cos qd`,
//! `S = sin(qd)/q` (or the hyperbolic pair when evanescent), and matching at
//! interfaces is plain spinor continuity. The transmitted wave is carried
//! from the right edge back to the left edge, where it is split into
//! incident and reflected parts. Growth factors are kept in the log domain.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::ScatteringResult;
use crate::dirac::{momentum_branch, spinor_for, Mass, Regime, Spinor};
use crate::{Error, Result};

/// Condition number above which a transfer matrix is rejected.
pub const MAX_COND: f64 = 1e12;

const CONTIGUITY_TOL: f64 = 1e-12;

/// A constant-potential slab `[x_start, x_end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub x_start: f64,
    pub x_end: f64,
    #[serde(rename = "V")]
    pub v: f64,
}

impl Segment {
    pub fn new(x_start: f64, x_end: f64, v: f64) -> Self {
        Segment { x_start, x_end, v }
    }

    pub fn width(&self) -> f64 {
        self.x_end - self.x_start
    }
}

/// Asymptotic levels plus contiguous constant segments between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialProfile {
    pub left_level: f64,
    pub right_level: f64,
    pub segments: Vec<Segment>,
    pub mass: Mass,
}

/// Validate, sort and join a segment list into a profile.
///
/// Segments are ordered by `x_start`; neighbours must meet within a relative
/// `1e-12`, in which case the start is snapped onto the previous end. Error
/// indices refer to positions in the caller's list.
pub fn build_profile(
    left_level: f64,
    right_level: f64,
    segments: Vec<Segment>,
    mass: Mass,
) -> Result<PotentialProfile> {
    if !left_level.is_finite() || !right_level.is_finite() {
        return Err(Error::Domain("asymptotic levels must be finite".into()));
    }
    for (i, s) in segments.iter().enumerate() {
        if !(s.x_start.is_finite() && s.x_end.is_finite() && s.v.is_finite()) {
            return Err(Error::ProfileValidation {
                index: i,
                reason: "non-finite coordinate or level".into(),
            });
        }
        if s.x_end <= s.x_start {
            return Err(Error::ProfileValidation {
                index: i,
                reason: format!("reversed or empty segment ({}, {})", s.x_start, s.x_end),
            });
        }
    }
    let mut order: Vec<usize> = (0..segments.len()).collect();
    order.sort_by(|&a, &b| segments[a].x_start.total_cmp(&segments[b].x_start));

    let mut out: Vec<Segment> = Vec::with_capacity(segments.len());
    for &i in &order {
        let mut s = segments[i];
        if let Some(prev) = out.last() {
            let tol = CONTIGUITY_TOL * prev.x_end.abs().max(1.0);
            if s.x_start < prev.x_end - tol {
                return Err(Error::ProfileValidation {
                    index: i,
                    reason: "segment overlaps previous".into(),
                });
            }
            if s.x_start > prev.x_end + tol {
                return Err(Error::ProfileValidation {
                    index: i,
                    reason: format!("gap between x = {} and x = {}", prev.x_end, s.x_start),
                });
            }
            s.x_start = prev.x_end;
        }
        out.push(s);
    }
    Ok(PotentialProfile {
        left_level,
        right_level,
        segments: out,
        mass,
    })
}

impl PotentialProfile {
    pub fn free(mass: Mass) -> Self {
        PotentialProfile {
            left_level: 0.0,
            right_level: 0.0,
            segments: Vec::new(),
            mass,
        }
    }

    /// Klein step `0` for `x < 0`, `height` for `x > 0`.
    pub fn step(height: f64, mass: Mass) -> Self {
        PotentialProfile {
            left_level: 0.0,
            right_level: height,
            segments: Vec::new(),
            mass,
        }
    }

    /// Square barrier of height `v` on `|x| < a`.
    pub fn barrier(v: f64, half_width: f64, mass: Mass) -> Result<Self> {
        build_profile(0.0, 0.0, vec![Segment::new(-half_width, half_width, v)], mass)
    }

    /// Linear ramp from 0 to `height` with slope `field`, as `steps` stairs.
    pub fn sauter(field: f64, height: f64, steps: usize, mass: Mass) -> Result<Self> {
        if !(field > 0.0) {
            return Err(Error::Domain(format!("field must be positive, got {field}")));
        }
        let length = height / field;
        build_profile(
            0.0,
            height,
            staircase(0.0, length, 0.0, height, steps)?,
            mass,
        )
    }

    /// `V(+∞) − V(−∞)`.
    pub fn delta_v(&self) -> f64 {
        self.right_level - self.left_level
    }

    /// Mirror image `x → −x`; incidence from the right becomes incidence
    /// from the left.
    pub fn reversed(&self) -> Self {
        PotentialProfile {
            left_level: self.right_level,
            right_level: self.left_level,
            segments: self
                .segments
                .iter()
                .rev()
                .map(|s| Segment::new(-s.x_end, -s.x_start, s.v))
                .collect(),
            mass: self.mass,
        }
    }

    /// Potential at `x`; interfaces belong to the segment on their right.
    pub fn potential_at(&self, x: f64) -> f64 {
        match (self.segments.first(), self.segments.last()) {
            (Some(first), _) if x < first.x_start => self.left_level,
            (_, Some(last)) if x >= last.x_end => self.right_level,
            (None, _) => {
                if x < 0.0 {
                    self.left_level
                } else {
                    self.right_level
                }
            }
            _ => self
                .segments
                .iter()
                .find(|s| x >= s.x_start && x < s.x_end)
                .map_or(self.right_level, |s| s.v),
        }
    }

    pub fn left_edge(&self) -> f64 {
        self.segments.first().map_or(0.0, |s| s.x_start)
    }

    pub fn right_edge(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.x_end)
    }
}

/// `n` equal-width stairs approximating the ramp from `(x0, v0)` to
/// `(x1, v1)`, each at the ramp's midpoint value.
pub fn staircase(x0: f64, x1: f64, v0: f64, v1: f64, n: usize) -> Result<Vec<Segment>> {
    if n == 0 {
        return Err(Error::Domain("staircase needs at least one step".into()));
    }
    if !(x1 > x0) {
        return Err(Error::Domain(format!("staircase needs x1 > x0, got {x0}, {x1}")));
    }
    let nf = n as f64;
    let edge = |i: usize| {
        if i == n {
            x1
        } else {
            x0 + (x1 - x0) * (i as f64) / nf
        }
    };
    Ok((0..n)
        .map(|i| Segment::new(edge(i), edge(i + 1), v0 + (v1 - v0) * (i as f64 + 0.5) / nf))
        .collect())
}

/// Numerical scattering result with transfer-matrix diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferResult {
    #[serde(flatten)]
    pub scattering: ScatteringResult,
    /// 2-norm condition number of the position-space transfer matrix.
    pub matrix_cond: f64,
    pub n_segments: usize,
    /// Incident particle continuum overlaps the transmitted hole continuum
    /// (or the reverse).
    pub klein: bool,
    /// Net current at the left edge, in units of the incident current.
    pub current_left: f64,
    /// Current at the right edge, in units of the incident current.
    pub current_right: f64,
}

type Mat2 = [[f64; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// `exp(−K d)` for one segment, as a scaled matrix and the log of its scale.
fn back_propagator(kinetic: f64, m: f64, d: f64) -> (Mat2, f64) {
    let q2 = (kinetic - m) * (kinetic + m);
    let (c, s, log_scale) = if q2 > 0.0 {
        let q = q2.sqrt();
        ((q * d).cos(), (q * d).sin() / q, 0.0)
    } else if q2 < 0.0 {
        // cosh and sinh with e^{κd} factored out.
        let kappa = (-q2).sqrt();
        let y = kappa * d;
        let e2 = (-2.0 * y).exp();
        (0.5 * (1.0 + e2), 0.5 * (1.0 - e2) / kappa, y)
    } else {
        (1.0, d, 0.0)
    };
    // exp(−K d) = C I − S K with K = [[0, −(W+m)], [W−m, 0]].
    (
        [[c, s * (kinetic + m)], [-s * (kinetic - m), c]],
        log_scale,
    )
}

fn normalize(m: &mut Mat2) -> f64 {
    let max = m
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if max > 0.0 && max.is_finite() {
        for v in m.iter_mut().flatten() {
            *v /= max;
        }
        max.ln()
    } else {
        0.0
    }
}

fn largest_singular_value(m: &Mat2) -> f64 {
    let fro2: f64 = m.iter().flatten().map(|v| v * v).sum();
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    (0.5 * (fro2 + disc)).sqrt()
}

fn apply(m: &Mat2, s: &Spinor) -> Spinor {
    Spinor::new(
        s.upper * m[0][0] + s.lower * m[0][1],
        s.upper * m[1][0] + s.lower * m[1][1],
    )
}

/// Scatter a unit wave incident from the left off `profile` at energy `E`.
///
/// "Incident" means positive group velocity, so a hole continuum on the left
/// is entered through its negative-momentum branch. R and T are ratios of
/// the conserved current `−ψ†σ_y ψ`. An evanescent right region gives
/// `T = 0`; an evanescent left region has no incident channel.
pub fn scatter_numeric(profile: &PotentialProfile, energy: f64) -> Result<TransferResult> {
    let m = profile.mass.get();
    let left = momentum_branch(energy, profile.left_level, profile.mass);
    let right = momentum_branch(energy, profile.right_level, profile.mass);
    match left.regime {
        Regime::Threshold => {
            return Err(Error::Threshold {
                energy,
                level: profile.left_level,
            })
        }
        Regime::Evanescent => {
            return Err(Error::NoIncidentChannel {
                energy,
                level: profile.left_level,
            })
        }
        _ => {}
    }
    if right.regime == Regime::Threshold {
        return Err(Error::Threshold {
            energy,
            level: profile.right_level,
        });
    }

    let mut total: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
    let mut log_scale = 0.0;
    for seg in &profile.segments {
        let (p, ls) = back_propagator(energy - seg.v, m, seg.width());
        total = mat_mul(&total, &p);
        log_scale += ls + normalize(&mut total);
    }
    let log_cond = 2.0 * (log_scale + largest_singular_value(&total).ln());
    let cond = log_cond.exp();
    if !(cond <= MAX_COND) {
        return Err(Error::NumericalFailure { cond });
    }

    let w_left = energy - profile.left_level;
    let w_right = energy - profile.right_level;
    let q_in = left.q.re;
    let transmitted = spinor_for(right.q, w_right, m);
    let psi = apply(&total, &transmitted);

    // psi = c_in (i q, W−m) + c_ref (−i q, W−m)
    let from_upper = psi.upper / num_complex::Complex64::new(0.0, q_in);
    let from_lower = psi.lower / (w_left - m);
    let c_in = 0.5 * (from_lower + from_upper);
    let c_ref = 0.5 * (from_lower - from_upper);

    let flux_in = 2.0 * q_in * (w_left - m);
    let norm_in = c_in.norm_sqr() * flux_in;
    let scale = (-2.0 * log_scale).exp();
    let r = c_ref.norm_sqr() / c_in.norm_sqr();
    let current_right = transmitted.current() * scale / norm_in;
    let current_left = psi.current() / norm_in;
    let t = if right.regime.is_propagating() {
        current_right
    } else {
        0.0
    };

    let kappa = right.regime.is_propagating().then(|| {
        (q_in * (w_right - m) / (right.q.re * (w_left - m))).abs()
    });
    let klein = matches!(
        (left.regime, right.regime),
        (Regime::ParticlePropagating, Regime::HolePropagating)
            | (Regime::HolePropagating, Regime::ParticlePropagating)
    );
    let resonance = profile.left_level == profile.right_level && (t - 1.0).abs() < 1e-9;

    Ok(TransferResult {
        scattering: ScatteringResult {
            energy,
            r,
            t,
            kappa,
            b: c_ref / c_in,
            f: (-log_scale).exp() / c_in,
            resonance,
        },
        matrix_cond: cond,
        n_segments: profile.segments.len(),
        klein,
        current_left,
        current_right,
    })
}

/// Outcome of an energy sweep. Threshold energies are skipped; other
/// per-point failures are collected without aborting the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub results: Vec<TransferResult>,
    pub skipped: Vec<f64>,
    pub failures: Vec<(f64, Error)>,
}

/// Evenly spaced energies from `e_min` to `e_max` inclusive.
pub fn energy_grid(e_min: f64, e_max: f64, n_points: usize) -> Result<Vec<f64>> {
    if !(e_min < e_max) || n_points < 2 {
        return Err(Error::Domain(format!(
            "sweep needs e_min < e_max and at least 2 points (got {e_min}, {e_max}, {n_points})"
        )));
    }
    let step = (e_max - e_min) / (n_points - 1) as f64;
    Ok((0..n_points)
        .map(|i| if i + 1 == n_points { e_max } else { e_min + step * i as f64 })
        .collect())
}

/// Evaluate [`scatter_numeric`] on an ascending energy grid. Points run in
/// parallel; the output order and values match a sequential loop.
pub fn transmission_sweep(
    profile: &PotentialProfile,
    e_min: f64,
    e_max: f64,
    n_points: usize,
) -> Result<Sweep> {
    let grid = energy_grid(e_min, e_max, n_points)?;
    let outcomes: Vec<(f64, Result<TransferResult>)> = grid
        .par_iter()
        .map(|&e| (e, scatter_numeric(profile, e)))
        .collect();
    let mut sweep = Sweep {
        results: Vec::with_capacity(outcomes.len()),
        skipped: Vec::new(),
        failures: Vec::new(),
    };
    for (e, outcome) in outcomes {
        match outcome {
            Ok(r) => sweep.results.push(r),
            Err(Error::Threshold { .. }) => sweep.skipped.push(e),
            Err(err) => sweep.failures.push((e, err)),
        }
    }
    Ok(sweep)
}

/// Staircase refinement history for a ramp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseConvergence {
    /// Smallest doubling level with `|T(2n) − T(n)| < tol`.
    pub n_star: usize,
    /// `T(2 n_star)`.
    pub transmission: f64,
    /// `(n, T(n))` for every level evaluated.
    pub history: Vec<(usize, f64)>,
}

/// A linear ramp between two asymptotic levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ramp {
    pub x0: f64,
    pub x1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Ramp {
    pub fn profile(&self, steps: usize, mass: Mass) -> Result<PotentialProfile> {
        build_profile(
            self.v0,
            self.v1,
            staircase(self.x0, self.x1, self.v0, self.v1, steps)?,
            mass,
        )
    }
}

/// Double the stair count from `n_start` until successive transmissions
/// agree to `tol`.
pub fn staircase_convergence(
    ramp: Ramp,
    mass: Mass,
    energy: f64,
    n_start: usize,
    tol: f64,
    n_max: usize,
) -> Result<StaircaseConvergence> {
    let transmission = |n: usize| -> Result<f64> {
        Ok(scatter_numeric(&ramp.profile(n, mass)?, energy)?.scattering.t)
    };
    let mut n = n_start.max(1);
    let mut t_n = transmission(n)?;
    let mut history = vec![(n, t_n)];
    while 2 * n <= n_max {
        let t_2n = transmission(2 * n)?;
        history.push((2 * n, t_2n));
        if (t_2n - t_n).abs() < tol {
            return Ok(StaircaseConvergence {
                n_star: n,
                transmission: t_2n,
                history,
            });
        }
        n *= 2;
        t_n = t_2n;
    }
    Err(Error::NotConverged(format!(
        "staircase transmission up to {n} steps"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{barrier_scatter, resonance_energies, step_scatter};

    const M: Mass = Mass::UNIT;

    #[test]
    fn profile_validation() {
        assert!(build_profile(0.0, 5.0, vec![], M).is_ok());
        assert!(build_profile(0.0, 0.0, vec![Segment::new(-1.0, 1.0, 5.0)], M).is_ok());
        let err = build_profile(
            0.0,
            0.0,
            vec![Segment::new(0.0, 2.0, 1.0), Segment::new(1.0, 3.0, 2.0)],
            M,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ProfileValidation { index: 1, .. }), "{err}");
        let err = build_profile(0.0, 0.0, vec![Segment::new(2.0, 1.0, 1.0)], M).unwrap_err();
        assert!(matches!(err, Error::ProfileValidation { index: 0, .. }));
        let err = build_profile(
            0.0,
            0.0,
            vec![Segment::new(0.0, 1.0, 1.0), Segment::new(1.5, 3.0, 2.0)],
            M,
        )
        .unwrap_err();
        assert!(err.to_string().contains("gap"));
    }

    #[test]
    fn profile_sorts_segments() {
        let p = build_profile(
            0.0,
            0.0,
            vec![Segment::new(1.0, 2.0, 2.0), Segment::new(0.0, 1.0, 1.0)],
            M,
        )
        .unwrap();
        assert_eq!(p.segments[0].v, 1.0);
        assert_eq!(p.potential_at(-0.5), 0.0);
        assert_eq!(p.potential_at(0.5), 1.0);
        assert_eq!(p.potential_at(1.5), 2.0);
        assert_eq!(p.potential_at(2.5), 0.0);
    }

    #[test]
    fn staircase_midpoints() {
        let one = staircase(0.0, 10.0, 0.0, 5.0, 1).unwrap();
        assert_eq!(one, vec![Segment::new(0.0, 10.0, 2.5)]);
        let five = staircase(0.0, 10.0, 0.0, 5.0, 5).unwrap();
        let vs: Vec<f64> = five.iter().map(|s| s.v).collect();
        assert_eq!(vs, vec![0.5, 1.5, 2.5, 3.5, 4.5]);
        assert_eq!(five.last().unwrap().x_end, 10.0);
        for w in five.windows(2) {
            assert_eq!(w[0].x_end, w[1].x_start);
        }
        assert!(staircase(0.0, 1.0, 0.0, 1.0, 0).is_err());
        assert!(staircase(1.0, 1.0, 0.0, 1.0, 3).is_err());
    }

    #[test]
    fn klein_step_matches_closed_form() {
        let n = scatter_numeric(&PotentialProfile::step(5.0, M), 1.5).unwrap();
        let a = step_scatter(1.5, 5.0, M).unwrap();
        assert!((n.scattering.r - 0.25).abs() < 1e-10);
        assert!((n.scattering.t - 0.75).abs() < 1e-10);
        assert!((n.scattering.kappa.unwrap() - 3.0).abs() < 1e-10);
        assert!((n.scattering.b - a.b).norm() < 1e-10);
        assert!((n.scattering.f - a.f).norm() < 1e-10);
        assert!(n.klein);
    }

    #[test]
    fn barrier_matches_closed_form_amplitudes() {
        let p = PotentialProfile::barrier(5.0, 1.0, M).unwrap();
        for e in [1.5, 2.7, 4.3, 5.7, 7.0] {
            let n = scatter_numeric(&p, e).unwrap().scattering;
            let a = barrier_scatter(e, 5.0, 1.0, M).unwrap();
            assert!((n.t - a.t).abs() < 1e-10, "E={e}");
            assert!((n.b - a.b).norm() < 1e-10, "E={e}");
            assert!((n.f - a.f).norm() < 1e-10, "E={e}");
        }
    }

    #[test]
    fn resonance_cross_check() {
        let p = PotentialProfile::barrier(5.0, 1.0, M).unwrap();
        for r in resonance_energies(5.0, 1.0, M) {
            let n = scatter_numeric(&p, r.energy).unwrap();
            assert!((n.scattering.t - 1.0).abs() < 1e-9);
            assert!(n.scattering.resonance);
        }
    }

    #[test]
    fn free_profile_is_transparent() {
        for e in [1.01, 1.5, 30.0, -2.0] {
            let n = scatter_numeric(&PotentialProfile::free(M), e).unwrap();
            assert!(n.scattering.r < 1e-20 && (n.scattering.t - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn asymptotic_channel_errors() {
        let step = PotentialProfile::step(5.0, M);
        assert!(matches!(
            scatter_numeric(&step, 0.5),
            Err(Error::NoIncidentChannel { .. })
        ));
        assert!(matches!(scatter_numeric(&step, 4.0), Err(Error::Threshold { .. })));
        let total = scatter_numeric(&step, 4.5).unwrap();
        assert_eq!(total.scattering.t, 0.0);
        assert!((total.scattering.r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn opaque_barrier_is_flagged() {
        let p = PotentialProfile::barrier(5.0, 40.0, M).unwrap();
        let err = scatter_numeric(&p, 4.5).unwrap_err();
        assert!(matches!(err, Error::NumericalFailure { cond } if cond > MAX_COND));
    }

    #[test]
    fn sweep_skips_thresholds_and_keeps_order() {
        let p = PotentialProfile::step(5.0, M);
        let sweep = transmission_sweep(&p, 3.0, 5.0, 5).unwrap();
        assert_eq!(sweep.skipped, vec![4.0]);
        assert_eq!(sweep.results.len(), 4);
        assert!(sweep
            .results
            .windows(2)
            .all(|w| w[0].scattering.energy < w[1].scattering.energy));
        assert!(transmission_sweep(&p, 2.0, 1.0, 5).is_err());
        assert!(transmission_sweep(&p, 1.0, 2.0, 1).is_err());
    }

    #[test]
    fn subcritical_step_has_no_klein_zone() {
        let p = PotentialProfile::step(1.5, M);
        let sweep = transmission_sweep(&p, 1.01, 6.0, 40).unwrap();
        assert!(sweep.failures.is_empty());
        assert!(sweep.results.iter().all(|r| !r.klein));
        assert!(sweep
            .results
            .iter()
            .all(|r| (r.scattering.r + r.scattering.t - 1.0).abs() < 1e-10));
    }
}
