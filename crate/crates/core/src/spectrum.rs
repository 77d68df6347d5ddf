//! Bound states of the delta well and the square well `−V` on `|x| < a`,
//! supercritical thresholds and the charge bookkeeping that follows the
//! levels as the well is deepened adiabatically from the vacuum.
//!
//! The square-well equations are searched in the variable `pa`, where
//! `p² = (E + V)² − m²`. The quadrant `[kπ/2, (k+1)π/2]` of `pa` holds at most
//! one level: even for even `k`, odd for odd `k`. That level enters at `E = m`
//! on the lower edge and dives into the lower continuum at `E = −m` on the
//! upper edge, so `N = k + 1` is also the index of its supercritical
//! threshold `V_N^c`. Conditions are evaluated in the pole-free form
//! `sin(pa − φ) = 0` rather than through `tan(pa)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::dirac::Mass;
use crate::roots::{bisect_predicate, bisect_secant};
use crate::{Error, Result};

/// Target residual of the pole-free bound-state condition.
pub const ROOT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn of_branch(k: u32) -> Parity {
        if k % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// A level of the square well with `−m ≤ E < m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub parity: Parity,
    /// Quadrant index plus one; the level goes supercritical at `V_N^c`.
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "E")]
    pub energy: f64,
    /// `p` inside the well, `p² = (E + V)² − m²`.
    #[serde(rename = "p")]
    pub well_momentum: f64,
    /// `|sin(pa − φ)|` at the returned root.
    pub residual: f64,
}

/// Particle, vacuum and supercritical charges. The electron charge is −1,
/// so each bound or emitted positron adds +1 to `Q_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChargeLedger {
    #[serde(rename = "Q_p")]
    pub q_p: i64,
    #[serde(rename = "Q_0")]
    pub q_0: i64,
    #[serde(rename = "Q_S")]
    pub q_s: i64,
    #[serde(rename = "Q_total")]
    pub q_total: i64,
}

impl ChargeLedger {
    /// Ledger reached from the vacuum, where `Q_0 = −Q_p`.
    pub fn from_counts(q_p: i64, q_s: i64) -> Self {
        ChargeLedger {
            q_p,
            q_0: -q_p,
            q_s,
            q_total: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaState {
    pub parity: Parity,
    #[serde(rename = "E")]
    pub energy: f64,
}

/// The single bound level of `−λ δ(x)`.
///
/// Even with `E = m cos λ` while `⌊λ/π⌋` is even, odd with `E = −m cos λ`
/// otherwise; at each multiple of π one parity dives and the other enters
/// at `E = m`.
pub fn delta_well_energy(lambda: f64, m: Mass) -> Result<DeltaState> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("λ must be positive, got {lambda}")));
    }
    let parity = if (lambda / PI).floor() as u64 % 2 == 0 {
        Parity::Even
    } else {
        Parity::Odd
    };
    let c = m.get() * lambda.cos();
    let energy = match parity {
        Parity::Even => c,
        Parity::Odd => -c,
    };
    Ok(DeltaState { parity, energy })
}

/// `Q_p = ⌊λ/π + ½⌋`, `Q_S = ⌊λ/π⌋`, `Q_0 = −Q_p`.
pub fn delta_ledger(lambda: f64) -> Result<ChargeLedger> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("λ must be non-negative, got {lambda}")));
    }
    let x = lambda / PI;
    Ok(ChargeLedger::from_counts(
        (x + 0.5).floor() as i64,
        x.floor() as i64,
    ))
}

/// `V_N^c = m + √(m² + N²π²/4a²)`.
pub fn supercritical_threshold(n: u32, half_width: f64, m: Mass) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("threshold index starts at 1".into()));
    }
    check_width(half_width)?;
    let mass = m.get();
    Ok(mass + mass.hypot(f64::from(n) * PI / (2.0 * half_width)))
}

fn check_width(half_width: f64) -> Result<()> {
    if half_width > 0.0 && half_width.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "half-width must be positive, got {half_width}"
        )))
    }
}

#[derive(Debug, Clone, Copy)]
struct Well {
    depth: f64,
    half_width: f64,
    m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Status {
    Absent,
    Bound(BoundState),
    Dived,
}

impl Well {
    fn new(depth: f64, half_width: f64, m: Mass) -> Result<Self> {
        if !(depth > 0.0 && depth.is_finite()) {
            return Err(Error::Domain(format!("well depth must be positive, got {depth}")));
        }
        check_width(half_width)?;
        Ok(Well {
            depth,
            half_width,
            m: m.get(),
        })
    }

    /// `pa` at `E = −m` (zero when the lower edge is not reachable).
    fn pa_min(&self) -> f64 {
        let w = self.depth - self.m;
        if w > self.m {
            self.half_width * ((w - self.m) * (w + self.m)).sqrt()
        } else {
            0.0
        }
    }

    /// `pa` at `E = m`.
    fn pa_max(&self) -> f64 {
        let w = self.depth + self.m;
        self.half_width * ((w - self.m) * (w + self.m)).sqrt()
    }

    fn energy_at(&self, pa: f64) -> f64 {
        (pa / self.half_width).hypot(self.m) - self.depth
    }

    /// Signed, normalized condition for quadrant `k`, increasing in `pa` and
    /// zero at a level.
    fn condition(&self, k: u32, pa: f64) -> f64 {
        let m = self.m;
        let e = self.energy_at(pa);
        let w = e + self.depth;
        let m_plus = (m + e).max(0.0);
        let m_minus = (m - e).max(0.0);
        let w_plus = w + m;
        let w_minus = (w - m).max(0.0);
        let (s, c) = pa.sin_cos();
        if k % 2 == 0 {
            // tan pa = √((m−E)(W+m) / ((m+E)(W−m)))
            let a = (m_plus * w_minus).sqrt();
            let b = (m_minus * w_plus).sqrt();
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            sign * (s * a - c * b) / a.hypot(b)
        } else {
            // tan pa = −√((m+E)(W+m) / ((m−E)(W−m)))
            let d = (m_minus * w_minus).sqrt();
            let cc = (m_plus * w_plus).sqrt();
            let sign = if ((k + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            sign * (s * d + c * cc) / d.hypot(cc)
        }
    }

    fn state(&self, k: u32, pa: f64) -> BoundState {
        BoundState {
            parity: Parity::of_branch(k),
            n: k + 1,
            energy: self.energy_at(pa),
            well_momentum: pa / self.half_width,
            residual: self.condition(k, pa).abs(),
        }
    }

    fn status(&self, k: u32) -> Result<Status> {
        let lower = f64::from(k) * FRAC_PI_2;
        let upper = lower + FRAC_PI_2;
        let pa_min = self.pa_min();
        let pa_max = self.pa_max();
        let tol = 1e-12 * upper;
        if lower >= pa_max {
            return Ok(Status::Absent);
        }
        if pa_min > upper + tol {
            return Ok(Status::Dived);
        }
        if pa_min >= upper - tol {
            // Sitting on E = −m: still bound until it strictly crosses.
            let mut s = self.state(k, upper.min(pa_min));
            s.energy = -self.m;
            return Ok(Status::Bound(s));
        }
        let lo = lower.max(pa_min);
        let hi = upper.min(pa_max);
        let (h_lo, h_hi) = (self.condition(k, lo), self.condition(k, hi));
        let pa = if h_lo.abs() <= ROOT_TOL {
            lo
        } else if h_hi.abs() <= ROOT_TOL {
            hi
        } else if h_lo < 0.0 && h_hi > 0.0 {
            bisect_secant(|x| self.condition(k, x), lo, hi, ROOT_TOL)?
        } else {
            return Ok(Status::Absent);
        };
        let s = self.state(k, pa);
        if s.energy >= self.m {
            return Ok(Status::Absent);
        }
        Ok(Status::Bound(s))
    }

    fn n_branches(&self) -> u32 {
        (self.pa_max() / FRAC_PI_2).floor() as u32 + 1
    }
}

/// All levels of a square well plus the count already in the lower continuum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellSpectrum {
    /// Ordered by decreasing energy.
    pub states: Vec<BoundState>,
    /// Levels that have crossed `E = −m`.
    pub supercritical: u32,
}

pub fn well_spectrum(depth: f64, half_width: f64, m: Mass) -> Result<WellSpectrum> {
    let well = Well::new(depth, half_width, m)?;
    let mut states = Vec::new();
    let mut supercritical = 0;
    for k in 0..well.n_branches() {
        match well.status(k)? {
            Status::Bound(s) => states.push(s),
            Status::Dived => supercritical += 1,
            Status::Absent => {}
        }
    }
    states.sort_by(|a, b| b.energy.total_cmp(&a.energy));
    Ok(WellSpectrum {
        states,
        supercritical,
    })
}

/// Bound levels of the square well, highest energy first.
pub fn well_bound_states(depth: f64, half_width: f64, m: Mass) -> Result<Vec<BoundState>> {
    Ok(well_spectrum(depth, half_width, m)?.states)
}

/// `⌊(2a/π)√(V² − 2mV)⌋` for `V > 2m`, else 0.
pub fn supercritical_count(depth: f64, half_width: f64, m: Mass) -> i64 {
    let mass = m.get();
    if depth > 2.0 * mass {
        (2.0 * half_width / PI * (depth * (depth - 2.0 * mass)).sqrt()).floor() as i64
    } else {
        0
    }
}

/// `⌊(2a/π)√(V² − m²)⌋`, which lies in `[Q_p − 1, Q_p]`; 0 for `V ≤ m`.
pub fn positron_bound(depth: f64, half_width: f64, m: Mass) -> i64 {
    let mass = m.get();
    if depth > mass {
        (2.0 * half_width / PI * ((depth - mass) * (depth + mass)).sqrt()).floor() as i64
    } else {
        0
    }
}

/// Charges of the well switched on from the vacuum. `Q_p` counts levels
/// below `E = 0` plus those already supercritical.
pub fn well_ledger(depth: f64, half_width: f64, m: Mass) -> Result<ChargeLedger> {
    let spectrum = well_spectrum(depth, half_width, m)?;
    let negative = spectrum.states.iter().filter(|s| s.energy < 0.0).count() as i64;
    let q_p = negative + i64::from(spectrum.supercritical);
    Ok(ChargeLedger::from_counts(
        q_p,
        supercritical_count(depth, half_width, m),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    StateAppears,
    CrossesZero,
    GoesSupercritical,
}

/// One step of the spectral flow. For delta-well sweeps `V` holds `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepEvent {
    #[serde(rename = "V")]
    pub v: f64,
    pub event: EventKind,
    pub parity: Parity,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "E")]
    pub energy: f64,
    pub ledger: ChargeLedger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    Absent,
    Positive,
    Negative,
    Dived,
}

impl Stage {
    fn rank(self) -> u8 {
        self as u8
    }
}

fn stage(depth: f64, half_width: f64, m: Mass, k: u32) -> Result<Stage> {
    if depth <= 0.0 {
        return Ok(Stage::Absent);
    }
    Ok(match Well::new(depth, half_width, m)?.status(k)? {
        Status::Absent => Stage::Absent,
        Status::Dived => Stage::Dived,
        Status::Bound(s) if s.energy < 0.0 => Stage::Negative,
        Status::Bound(_) => Stage::Positive,
    })
}

struct Sweeper {
    half_width: f64,
    m: Mass,
    n_branches: u32,
    min_width: f64,
    ledger: ChargeLedger,
    events: Vec<SweepEvent>,
}

impl Sweeper {
    fn stages(&self, depth: f64) -> Result<Vec<Stage>> {
        (0..self.n_branches)
            .map(|k| stage(depth, self.half_width, self.m, k))
            .collect()
    }

    fn interval(&mut self, lo: f64, hi: f64, s_lo: &[Stage], s_hi: &[Stage]) -> Result<()> {
        let pending: Vec<(u32, u8)> = s_lo
            .iter()
            .zip(s_hi)
            .enumerate()
            .flat_map(|(k, (a, b))| (a.rank()..b.rank()).map(move |r| (k as u32, r)))
            .collect();
        match pending.len() {
            0 => Ok(()),
            1 => {
                let (k, rank) = pending[0];
                self.locate(lo, hi, k, rank)
            }
            _ if hi - lo > self.min_width => {
                let mid = 0.5 * (lo + hi);
                let s_mid = self.stages(mid)?;
                self.interval(lo, mid, s_lo, &s_mid)?;
                self.interval(mid, hi, &s_mid, s_hi)
            }
            _ => Err(Error::UnresolvedEvents { lo, hi }),
        }
    }

    /// Record the single transition of branch `k` out of stage `rank`.
    fn locate(&mut self, lo: f64, hi: f64, k: u32, rank: u8) -> Result<()> {
        let (a, m) = (self.half_width, self.m);
        let passed = |v: f64| stage(v, a, m, k).map_or(true, |s| s.rank() > rank);
        let v = bisect_predicate(passed, lo, hi, 1e-13 * hi.max(1.0));
        let mass = m.get();
        let (event, energy) = match rank {
            0 => (EventKind::StateAppears, mass),
            1 => {
                self.ledger.q_p += 1;
                self.ledger.q_0 -= 1;
                (EventKind::CrossesZero, 0.0)
            }
            _ => {
                self.ledger.q_s += 1;
                (EventKind::GoesSupercritical, -mass)
            }
        };
        self.ledger.q_total = self.ledger.q_p + self.ledger.q_0;
        self.events.push(SweepEvent {
            v,
            event,
            parity: Parity::of_branch(k),
            n: k + 1,
            energy,
            ledger: self.ledger,
        });
        Ok(())
    }
}

/// Deepen the square well from 0 to `v_max` in steps of `dv`, logging each
/// level that enters at `E = m`, crosses `E = 0` or dives below `E = −m`.
///
/// A step holding more than one event is halved, down to `dv / 1024`.
pub fn adiabatic_sweep(half_width: f64, m: Mass, v_max: f64, dv: f64) -> Result<Vec<SweepEvent>> {
    check_width(half_width)?;
    if !(dv > 0.0 && dv.is_finite()) {
        return Err(Error::Domain(format!("dV must be positive, got {dv}")));
    }
    if !(v_max >= dv) {
        return Ok(Vec::new());
    }
    let mut sweeper = Sweeper {
        half_width,
        m,
        n_branches: Well::new(v_max, half_width, m)?.n_branches(),
        min_width: dv / 1024.0,
        ledger: ChargeLedger::default(),
        events: Vec::new(),
    };
    let steps = (v_max / dv).ceil() as usize;
    let mut lo = 0.0;
    let mut s_lo = sweeper.stages(lo)?;
    for i in 1..=steps {
        let hi = if i == steps { v_max } else { dv * i as f64 };
        if hi <= lo {
            continue;
        }
        let s_hi = sweeper.stages(hi)?;
        sweeper.interval(lo, hi, &s_lo, &s_hi)?;
        lo = hi;
        s_lo = s_hi;
    }
    Ok(sweeper.events)
}

/// Spectral flow of the delta well as `λ` rises to `lambda_max`: the level
/// crosses zero at `λ = π/2 + nπ` and at `λ = nπ` one parity dives while the
/// other enters at `E = m`.
pub fn delta_adiabatic_sweep(lambda_max: f64, m: Mass) -> Vec<SweepEvent> {
    let mass = m.get();
    let mut events = Vec::new();
    if !(lambda_max > 0.0) {
        return events;
    }
    let mut ledger = ChargeLedger::default();
    let mut push = |v: f64, event, n: u32, energy, ledger: ChargeLedger| {
        events.push(SweepEvent {
            v,
            event,
            parity: Parity::of_branch(n - 1),
            n,
            energy,
            ledger,
        })
    };
    push(0.0, EventKind::StateAppears, 1, mass, ledger);
    for period in 0u32.. {
        let base = f64::from(period) * PI;
        let zero = base + FRAC_PI_2;
        if zero > lambda_max {
            break;
        }
        ledger.q_p += 1;
        ledger.q_0 -= 1;
        push(zero, EventKind::CrossesZero, period + 1, 0.0, ledger);
        let dive = base + PI;
        if dive > lambda_max {
            break;
        }
        ledger.q_s += 1;
        push(dive, EventKind::GoesSupercritical, period + 1, -mass, ledger);
        push(dive, EventKind::StateAppears, period + 2, mass, ledger);
    }
    events
}
