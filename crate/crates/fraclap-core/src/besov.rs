//! Smoothness-scale machinery built on second-difference moduli: sup- and
//! integral-form q-norms over translation steps, discrete K-functionals for
//! the (L², H¹) pair with the derived interpolation norms, the first-to-
//! second difference comparison, localization of a modulus seminorm over a
//! covering, and a reiteration-style bound against first-difference energies.
//!
//! Every quantity is computed from the same restricted moduli
//! ω₂(h; Ω_{|h|}) = ‖Δ²_h v‖_{L²(Ω_{|h|})}, with steps snapped to the grid
//! lattice so translations are exact. Sup-norms over a cone use a subset of
//! the ball's step set, which makes the cone value provably no larger than
//! the ball value — the discrete counterpart of the cone-to-ball comparison
//! with constant c^σ(2^σ + 1).

use alloc::vec::Vec;

use crate::fracop::{gagliardo_seminorm, GagliardoMode};
use crate::geometry::{Cone, Covering};
use crate::gridfn::{dyadic_steps, GridFunction, Restriction};
use crate::linalg::tridiag_spd_solve;
use crate::{invalid, mth, Error, Result};

/// Index (σ, p, q) of a smoothness space on the second-difference scale.
/// Only p = 2 is implemented; q = ∞ (sup form) is `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovIndex {
    pub sigma: f64,
    pub p: f64,
    pub q: f64,
}

impl BesovIndex {
    pub fn new(sigma: f64, q: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 2.0) {
            return Err(invalid!("smoothness order must lie in (0,2), got {sigma}"));
        }
        if !(q >= 1.0) {
            return Err(invalid!("integrability exponent must satisfy q >= 1, got {q}"));
        }
        Ok(BesovIndex { sigma, p: 2.0, q })
    }

    /// Sup-form index (q = ∞).
    pub fn sup(sigma: f64) -> Result<Self> {
        Self::new(sigma, f64::INFINITY)
    }

    pub fn is_sup(&self) -> bool {
        self.q.is_infinite()
    }

    /// Interpolation parameter against the first-order scale: θ = σ, valid
    /// for σ < 1.
    pub fn theta(&self) -> f64 {
        self.sigma
    }
}

/// Which translation steps a modulus seminorm samples.
#[derive(Debug, Clone)]
pub enum DirectionSet {
    /// All lattice directions, dyadic magnitudes from `rho` down to the 4Δ
    /// resolution floor.
    Ball { rho: f64 },
    /// The subset of the ball's steps lying in the cone (same magnitudes,
    /// `rho` taken from the cone truncation radius).
    Cone(Cone),
}

impl DirectionSet {
    fn rho(&self) -> f64 {
        match self {
            DirectionSet::Ball { rho } => *rho,
            DirectionSet::Cone(c) => c.radius,
        }
    }

    fn cone(&self) -> Option<&Cone> {
        match self {
            DirectionSet::Cone(c) => Some(c),
            DirectionSet::Ball { .. } => None,
        }
    }
}

fn step_norm(h: &[f64]) -> f64 {
    mth::sqrt(h.iter().map(|c| c * c).sum())
}

/// Lattice steps of nominal magnitude `t`: unit directions (±e in d = 1,
/// sixteen angles in d = 2) scaled by `t` and snapped to grid multiples.
/// Steps snapping to zero or leaving the cone are dropped; duplicates merge.
fn snapped_steps(dim: usize, t: f64, delta: f64, cone: Option<&Cone>) -> Vec<Vec<f64>> {
    let dirs: Vec<Vec<f64>> = match dim {
        1 => alloc::vec![alloc::vec![1.0], alloc::vec![-1.0]],
        _ => (0..16)
            .map(|j| {
                let angle = core::f64::consts::PI * j as f64 / 8.0;
                alloc::vec![mth::cos(angle), mth::sin(angle)]
            })
            .collect(),
    };
    let mut out: Vec<Vec<f64>> = Vec::new();
    for dir in dirs {
        let h: Vec<f64> = dir
            .iter()
            .map(|c| mth::round(c * t / delta) * delta)
            .collect();
        if h.iter().all(|&c| c == 0.0) {
            continue;
        }
        if let Some(k) = cone {
            if !k.contains(&h) {
                continue;
            }
        }
        if !out.contains(&h) {
            out.push(h);
        }
    }
    out
}

/// One dyadic magnitude with the moduli of its snapped steps.
struct DqRow {
    label: f64,
    /// (snapped step, ω_order(step; Ω_{|step|}))
    steps: Vec<(Vec<f64>, f64)>,
}

fn dq_rows(
    v: &GridFunction,
    order: u8,
    dirs: &DirectionSet,
    ball: Option<(&[f64], f64)>,
) -> Result<Vec<DqRow>> {
    if v.dim() > 2 {
        return Err(Error::Unsupported(alloc::string::String::from(
            "modulus seminorms support d in {1,2}",
        )));
    }
    let delta = v.grid.spacing;
    let mut rows = Vec::new();
    for t in dyadic_steps(dirs.rho(), delta, 64) {
        let steps = snapped_steps(v.dim(), t, delta, dirs.cone());
        let mut measured = Vec::with_capacity(steps.len());
        for h in steps {
            let len = step_norm(&h);
            let value = match ball {
                None => v.omega(order, &h, Restriction::InnerOffset)?,
                Some((center, radius)) => {
                    let diff = v.difference(&h, order)?;
                    let mut mask = v.mask(Restriction::InnerOffset, len);
                    for (fl, keep) in mask.iter_mut().enumerate() {
                        if *keep {
                            let x = v.grid.node(&v.grid.unflat(fl));
                            let dist: f64 = step_norm(
                                &x.iter().zip(center).map(|(a, b)| a - b).collect::<Vec<_>>(),
                            );
                            *keep = dist < radius - len;
                        }
                    }
                    diff.l2_p1(Some(&mask))?
                }
            };
            measured.push((h, value));
        }
        if !measured.is_empty() {
            rows.push(DqRow {
                label: t,
                steps: measured,
            });
        }
    }
    if rows.is_empty() {
        return Err(invalid!(
            "no admissible steps: grid resolution too coarse for the requested scale"
        ));
    }
    Ok(rows)
}

fn assemble_dq(idx: &BesovIndex, rows: &[DqRow], dim: usize) -> f64 {
    if idx.is_sup() {
        let mut best = 0.0f64;
        for row in rows {
            for (h, w) in &row.steps {
                best = mth::fmax(best, w / mth::pow(step_norm(h), idx.sigma));
            }
        }
        return best;
    }
    // integral form over the truncated scale [4Δ, ρ]:
    // q σ (2−σ) ∫ A(t) t^{−σq} dt/t with A(t) the surface-weighted angular
    // mean of ω^q, discretized by the trapezoid rule in ln t
    let surface = if dim == 1 {
        2.0
    } else {
        2.0 * core::f64::consts::PI
    };
    let q = idx.q;
    let f: Vec<f64> = rows
        .iter()
        .map(|row| {
            let mean = row
                .steps
                .iter()
                .map(|(_, w)| mth::pow(*w, q))
                .sum::<f64>()
                / row.steps.len() as f64;
            surface * mean * mth::pow(row.label, -idx.sigma * q)
        })
        .collect();
    let mut integral = 0.0;
    if rows.len() == 1 {
        integral = f[0] * core::f64::consts::LN_2;
    } else {
        for k in 0..rows.len() - 1 {
            let width = mth::ln(rows[k].label / rows[k + 1].label);
            integral += 0.5 * (f[k] + f[k + 1]) * width;
        }
    }
    mth::pow(
        q * idx.sigma * (2.0 - idx.sigma) * integral,
        1.0 / q,
    )
}

/// Second-difference modulus seminorm of index `idx` over the given steps.
///
/// Sup form: max over steps of ω₂(h; Ω_{|h|})/|h|^σ. Integral form: the
/// q-integral of the angular mean over the sampled dyadic scale.
pub fn dq_seminorm(v: &GridFunction, idx: &BesovIndex, dirs: &DirectionSet) -> Result<f64> {
    let rows = dq_rows(v, 2, dirs, None)?;
    Ok(assemble_dq(idx, &rows, v.dim()))
}

/// Interpolation couple selector for K-functionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpacePair {
    /// (L², H¹) on the grid box, Neumann-natural first-order energy.
    L2H1,
    /// (H⁻¹, H¹): not implemented.
    DualH1,
}

/// A measured K-functional profile t ↦ K(t) with the endpoint norms.
#[derive(Debug, Clone)]
pub struct KProfile {
    pub ts: Vec<f64>,
    pub ks: Vec<f64>,
    pub pair: SpacePair,
    /// ‖u‖ in the first endpoint space.
    pub norm0: f64,
    /// ‖u‖ in the second endpoint space.
    pub norm1: f64,
}

impl KProfile {
    /// Validates the structural facts every true K-profile satisfies:
    /// positive increasing abscissae, K nondecreasing, K(t)/t nonincreasing,
    /// and K(t) ≤ min(norm0, t·norm1), all up to 1e−10 relative slack.
    pub fn new(
        ts: Vec<f64>,
        ks: Vec<f64>,
        pair: SpacePair,
        norm0: f64,
        norm1: f64,
    ) -> Result<Self> {
        if ts.len() != ks.len() || ts.is_empty() {
            return Err(invalid!("profile needs matching nonempty ts/ks"));
        }
        const SLACK: f64 = 1e-10;
        for i in 0..ts.len() {
            if !(ts[i] > 0.0) || !(ks[i] >= 0.0) {
                return Err(invalid!("profile needs t > 0 and K >= 0"));
            }
            if i > 0 {
                if ts[i] <= ts[i - 1] {
                    return Err(invalid!("profile abscissae must increase"));
                }
                if ks[i] < ks[i - 1] * (1.0 - SLACK) {
                    return Err(invalid!("K(t) must be nondecreasing"));
                }
                if ks[i] / ts[i] > ks[i - 1] / ts[i - 1] * (1.0 + SLACK) {
                    return Err(invalid!("K(t)/t must be nonincreasing"));
                }
            }
            let cap = mth::fmin(norm0, ts[i] * norm1);
            if ks[i] > cap * (1.0 + SLACK) {
                return Err(invalid!(
                    "K(t) exceeds min of the endpoint norms at t = {}",
                    ts[i]
                ));
            }
        }
        Ok(KProfile {
            ts,
            ks,
            pair,
            norm0,
            norm1,
        })
    }
}

/// Exact discrete K-functional for the (L², H¹) couple:
/// K(t)² = min_w ‖u − w‖₀² + t²‖w‖₁², with lumped mass M = Δ·I and the
/// Neumann first-order energy on the grid box. The minimizer solves the
/// tridiagonal system (M + t²(M + S))w = M u, so each K(t) is exact up to
/// round-off rather than an upper bound from a trial function.
pub fn k_functional(u: &GridFunction, ts: &[f64], pair: SpacePair) -> Result<KProfile> {
    if pair == SpacePair::DualH1 {
        return Err(Error::Unsupported(alloc::string::String::from(
            "the dual-to-H1 couple is not implemented",
        )));
    }
    if u.dim() != 1 {
        return Err(Error::Unsupported(alloc::string::String::from(
            "K-functionals support one-dimensional data",
        )));
    }
    if ts.is_empty() {
        return Err(invalid!("K-functional needs at least one t"));
    }
    let mut ts = ts.to_vec();
    ts.sort_by(|a, b| a.partial_cmp(b).expect("finite abscissae"));
    if !(ts[0] > 0.0) {
        return Err(invalid!("K-functional abscissae must be positive"));
    }

    let n = u.grid.shape[0];
    let delta = u.grid.spacing;
    let deg = |i: usize| if i == 0 || i == n - 1 { 1.0 } else { 2.0 };
    // M = Δ·I, S = (1/Δ)·tridiag(−1, deg, −1)
    let mass = |w: &[f64]| -> f64 { w.iter().map(|x| x * x).sum::<f64>() * delta };
    let stiff = |w: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n - 1 {
            let d = w[i + 1] - w[i];
            acc += d * d;
        }
        acc / delta
    };
    let norm0 = mth::sqrt(mass(&u.values));
    let norm1 = mth::sqrt(mass(&u.values) + stiff(&u.values));

    let mut ks = Vec::with_capacity(ts.len());
    for &t in &ts {
        let t2 = t * t;
        let diag: Vec<f64> = (0..n)
            .map(|i| delta + t2 * (delta + deg(i) / delta))
            .collect();
        let off = alloc::vec![-t2 / delta; n - 1];
        let rhs: Vec<f64> = u.values.iter().map(|x| x * delta).collect();
        let w = tridiag_spd_solve(&diag, &off, &rhs)?;
        let resid: Vec<f64> = u.values.iter().zip(&w).map(|(a, b)| a - b).collect();
        let k2 = mass(&resid) + t2 * (mass(&w) + stiff(&w));
        ks.push(mth::sqrt(mth::fmax(k2, 0.0)));
    }
    KProfile::new(ts, ks, pair, norm0, norm1)
}

/// Interpolation norm of index (θ = σ, q) read off a K-profile.
///
/// The profile must resolve the crossover where K reaches norm0/√2: two
/// decades of abscissae on each side are required, otherwise the tails of
/// the t-integral are not trustworthy and the call fails with
/// `InsufficientCoverage`.
pub fn interpolation_norm(idx: &BesovIndex, kp: &KProfile) -> Result<f64> {
    let theta = idx.theta();
    if !(theta > 0.0 && theta < 1.0) {
        return Err(invalid!(
            "interpolation against the first-order scale needs sigma in (0,1)"
        ));
    }
    if kp.norm0 == 0.0 {
        return Ok(0.0);
    }
    // locate the crossover K(t*) = norm0/√2
    let target = kp.norm0 / mth::sqrt(2.0);
    let mut t_star = None;
    for i in 0..kp.ts.len() {
        if kp.ks[i] >= target {
            t_star = Some(if i == 0 {
                kp.ts[0]
            } else {
                // log-linear interpolation between the bracketing rows
                let (t0, t1) = (kp.ts[i - 1], kp.ts[i]);
                let (k0, k1) = (kp.ks[i - 1], kp.ks[i]);
                if k1 <= k0 {
                    t1
                } else {
                    let w = (target - k0) / (k1 - k0);
                    mth::exp((1.0 - w) * mth::ln(t0) + w * mth::ln(t1))
                }
            });
            break;
        }
    }
    let t_star = t_star.ok_or_else(|| {
        Error::InsufficientCoverage(alloc::string::String::from(
            "profile never reaches the crossover",
        ))
    })?;
    let (t_min, t_max) = (kp.ts[0], *kp.ts.last().expect("nonempty"));
    if t_min > t_star / 100.0 || t_max < 100.0 * t_star {
        return Err(Error::InsufficientCoverage(alloc::format!(
            "need abscissae spanning [{:.3e}, {:.3e}] around the crossover",
            t_star / 100.0,
            100.0 * t_star
        )));
    }

    if idx.is_sup() {
        let g: Vec<f64> = kp
            .ts
            .iter()
            .zip(&kp.ks)
            .map(|(t, k)| k / mth::pow(*t, theta))
            .collect();
        let mut best_i = 0;
        for (i, v) in g.iter().enumerate() {
            if *v > g[best_i] {
                best_i = i;
            }
        }
        let mut best = g[best_i];
        if best_i > 0 && best_i + 1 < g.len() && best > 0.0 {
            // parabolic vertex through the three log-log points around the
            // max recovers the continuum sup between samples
            let x: Vec<f64> = (best_i - 1..=best_i + 1)
                .map(|i| mth::ln(kp.ts[i]))
                .collect();
            let y: Vec<f64> = (best_i - 1..=best_i + 1)
                .map(|i| mth::ln(g[i]))
                .collect();
            let d21 = (y[2] - y[1]) / (x[2] - x[1]);
            let d10 = (y[1] - y[0]) / (x[1] - x[0]);
            let curv = (d21 - d10) / (x[2] - x[0]);
            if curv < 0.0 {
                let slope = 0.5 * (d21 + d10);
                let vertex_x = x[1] - 0.5 * slope / curv;
                if vertex_x >= x[0] && vertex_x <= x[2] {
                    let dy = y[1] + slope * (vertex_x - x[1])
                        + curv * (vertex_x - x[1]) * (vertex_x - x[1]);
                    best = mth::fmax(best, mth::exp(dy));
                }
            }
        }
        return Ok(best);
    }

    let q = idx.q;
    let g: Vec<f64> = kp
        .ts
        .iter()
        .zip(&kp.ks)
        .map(|(t, k)| mth::pow(k / mth::pow(*t, theta), q))
        .collect();
    let mut integral = 0.0;
    for i in 0..g.len() - 1 {
        integral += 0.5 * (g[i] + g[i + 1]) * mth::ln(kp.ts[i + 1] / kp.ts[i]);
    }
    // analytic tails: K ≈ t·norm1 below t_min and K ≈ norm0 above t_max
    integral += mth::pow(kp.norm1, q) * mth::pow(t_min, q * (1.0 - theta)) / (q * (1.0 - theta));
    integral += mth::pow(kp.norm0, q) * mth::pow(t_max, -theta * q) / (theta * q);
    Ok(mth::pow(integral, 1.0 / q))
}

/// Outcome of the first-to-second difference comparison at order σ.
#[derive(Debug, Clone, Copy)]
pub struct MarchaudReport {
    /// sup over sampled steps of ω₁(h; Ω_{|h|})/|h|^σ.
    pub lhs: f64,
    /// ‖v‖_{L²(Ω)} + (1 − σ)^{−1/2}·sup ω₂(h; Ω_{|h|})/|h|^σ.
    pub rhs: f64,
    /// lhs/rhs, zero when lhs vanishes.
    pub ratio: f64,
}

/// Checks the comparison "first differences are controlled by second
/// differences plus the function": both sides are computed over the same
/// dyadic steps below `rho`, so a bounded ratio is exactly what the
/// continuum inequality predicts.
pub fn marchaud_check(v: &GridFunction, sigma: f64, rho: f64) -> Result<MarchaudReport> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(invalid!(
            "first-difference comparison needs sigma in (0,1), got {sigma}"
        ));
    }
    let dirs = DirectionSet::Ball { rho };
    let rows1 = dq_rows(v, 1, &dirs, None)?;
    let rows2 = dq_rows(v, 2, &dirs, None)?;
    let sup = |rows: &[DqRow]| -> f64 {
        let mut best = 0.0f64;
        for row in rows {
            for (h, w) in &row.steps {
                best = mth::fmax(best, w / mth::pow(step_norm(h), sigma));
            }
        }
        best
    };
    let lhs = sup(&rows1);
    let mask = v.mask(Restriction::InnerOffset, 0.0);
    let l2 = v.l2_p1(Some(&mask))?;
    let rhs = l2 + sup(&rows2) / mth::sqrt(1.0 - sigma);
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(MarchaudReport { lhs, rhs, ratio })
}

/// Localization of a sup-form modulus seminorm over a covering.
#[derive(Debug, Clone)]
pub struct LocalizationReport {
    /// The seminorm measured with steps restricted to each ball: the mask at
    /// step h keeps x with dist(x, ∂Ω) > |h| and |x − c_j| < r − |h|.
    pub per_ball: Vec<f64>,
    /// √(Σ per_ball²).
    pub aggregate: f64,
}

/// Measures the modulus seminorm ball-by-ball over a covering. A single ball
/// engulfing the domain with margin ≥ the top step reproduces the global
/// seminorm exactly; a genuine covering yields an aggregate between the
/// global value and √(overlap multiplicity) times it.
pub fn localize(
    v: &GridFunction,
    cov: &Covering,
    idx: &BesovIndex,
    dirs: &DirectionSet,
) -> Result<LocalizationReport> {
    let mut per_ball = Vec::with_capacity(cov.centers.len());
    for c in &cov.centers {
        let rows = dq_rows(v, 2, dirs, Some((c.as_slice(), cov.radius)))?;
        per_ball.push(assemble_dq(idx, &rows, v.dim()));
    }
    let aggregate = mth::sqrt(per_ball.iter().map(|x| x * x).sum());
    Ok(LocalizationReport {
        per_ball,
        aggregate,
    })
}

/// Reiteration-style comparison: the second-difference seminorm at order
/// s + σ against the worst first-difference Gagliardo quotient
/// |v − v(·+h)|_{H^s(Ω)} / |h|^σ over the given step magnitudes (d = 1).
///
/// Returns `(lhs, rhs)`; boundedness of lhs by a moderate multiple of rhs is
/// the discrete trace of lifting σ orders through the s-energy.
pub fn reiteration_bound(
    v: &GridFunction,
    s: f64,
    sigma: f64,
    steps: &[f64],
) -> Result<(f64, f64)> {
    if v.dim() != 1 {
        return Err(Error::Unsupported(alloc::string::String::from(
            "the reiteration comparison supports one-dimensional data",
        )));
    }
    if steps.is_empty() {
        return Err(invalid!("reiteration needs at least one step"));
    }
    if !(s + sigma < 2.0) {
        return Err(invalid!("combined order s + sigma must stay below 2"));
    }
    let mut lhs = 0.0f64;
    let mut rhs = 0.0f64;
    for &t in steps {
        if !(t > 0.0) {
            return Err(invalid!("step magnitudes must be positive"));
        }
        for sign in [1.0, -1.0] {
            let h = alloc::vec![sign * t];
            let w2 = v.omega(2, &h, Restriction::InnerOffset)?;
            lhs = mth::fmax(lhs, w2 / mth::pow(t, s + sigma));
            let diff = v.difference(&h, 1)?;
            let energy = gagliardo_seminorm(&diff, s, &GagliardoMode::Domain)?;
            rhs = mth::fmax(rhs, energy / mth::pow(t, sigma));
        }
    }
    Ok((lhs, rhs))
}
