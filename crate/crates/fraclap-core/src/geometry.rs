//! Domains, inner offsets, direction cones and coverings.
//!
//! Two domain families are supported: finite unions of disjoint open
//! intervals (dimension 1) and open balls (any dimension). Both expose exact
//! boundary distances, which drive the inner-offset sets `Ω_λ = {x ∈ Ω :
//! dist(x, ∂Ω) > λ}` used by restricted smoothness moduli.
//!
//! A [`Cone`] is a truncated circular cone of directions `{h : |h| ≤ ρ,
//! h·n ≥ |h| cos θ}`. Near a boundary point of a Lipschitz domain such a cone
//! (pointing outward) consists of admissible translation directions: shifting
//! the exterior by them keeps it exterior. [`Cone::decompose`] writes an
//! arbitrary small vector as a signed sum from the cone with controlled total
//! length, which is what lets one-directional difference bounds spread to all
//! directions.

use crate::error::{Error, Result};
use crate::invalid;
use crate::mth;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// A bounded domain: union of disjoint open intervals (d = 1) or an open
/// ball (any d).
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    IntervalUnion { intervals: Vec<(f64, f64)> },
    Ball { center: Vec<f64>, radius: f64 },
}

/// Where a point sits relative to the inner offset `Ω_λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OffsetClass {
    /// In `Ω` with `dist(x, ∂Ω) > λ`.
    Inner,
    /// In `Ω` but within `λ` of the boundary.
    Shell,
    /// Not in `Ω`.
    Exterior,
}

impl Domain {
    /// Union of disjoint open intervals, given in any order.
    pub fn interval_union(intervals: &[(f64, f64)]) -> Result<Self> {
        if intervals.is_empty() {
            return Err(invalid!("interval union needs at least one interval"));
        }
        let mut iv = intervals.to_vec();
        iv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for &(a, b) in &iv {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(invalid!("degenerate interval ({a}, {b})"));
            }
        }
        for w in iv.windows(2) {
            if w[1].0 <= w[0].1 {
                return Err(invalid!(
                    "intervals ({}, {}) and ({}, {}) overlap or touch",
                    w[0].0,
                    w[0].1,
                    w[1].0,
                    w[1].1
                ));
            }
        }
        Ok(Domain::IntervalUnion { intervals: iv })
    }

    /// Open ball with the given center and radius.
    pub fn ball(center: &[f64], radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(invalid!("ball center needs at least one coordinate"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid!("ball radius must be positive, got {radius}"));
        }
        Ok(Domain::Ball {
            center: center.to_vec(),
            radius,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::IntervalUnion { .. } => 1,
            Domain::Ball { center, .. } => center.len(),
        }
    }

    /// Is `x` inside the open domain?
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::IntervalUnion { intervals } => {
                let t = x[0];
                intervals.iter().any(|&(a, b)| t > a && t < b)
            }
            Domain::Ball { center, radius } => dist(x, center) < *radius,
        }
    }

    /// Exact distance from `x` to the boundary `∂Ω` (zero on the boundary).
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        match self {
            Domain::IntervalUnion { intervals } => {
                let t = x[0];
                let mut d = f64::INFINITY;
                for &(a, b) in intervals {
                    d = mth::fmin(d, mth::fmin(mth::abs(t - a), mth::abs(t - b)));
                }
                d
            }
            Domain::Ball { center, radius } => mth::abs(radius - dist(x, center)),
        }
    }

    /// Classify `x` against the inner offset `Ω_λ` (λ ≥ 0).
    pub fn offset_membership(&self, x: &[f64], lambda: f64) -> OffsetClass {
        if !self.contains(x) {
            OffsetClass::Exterior
        } else if self.boundary_distance(x) > lambda {
            OffsetClass::Inner
        } else {
            OffsetClass::Shell
        }
    }

    /// Inradius: the largest λ for which `Ω_λ` is nonempty.
    pub fn inradius(&self) -> f64 {
        match self {
            Domain::IntervalUnion { intervals } => intervals
                .iter()
                .map(|&(a, b)| 0.5 * (b - a))
                .fold(0.0, mth::fmax),
            Domain::Ball { radius, .. } => *radius,
        }
    }

    /// Axis-aligned bounding box as (lower corner, upper corner).
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::IntervalUnion { intervals } => {
                (vec![intervals[0].0], vec![intervals.last().unwrap().1])
            }
            Domain::Ball { center, radius } => {
                let lo = center.iter().map(|c| c - radius).collect();
                let hi = center.iter().map(|c| c + radius).collect();
                (lo, hi)
            }
        }
    }

    /// Total measure (length, area for d = 2 balls, …).
    pub fn measure(&self) -> f64 {
        match self {
            Domain::IntervalUnion { intervals } => intervals.iter().map(|&(a, b)| b - a).sum(),
            Domain::Ball { center, radius } => match center.len() {
                1 => 2.0 * radius,
                2 => core::f64::consts::PI * radius * radius,
                3 => 4.0 / 3.0 * core::f64::consts::PI * mth::pow(*radius, 3.0),
                d => {
                    // unit-ball volume π^{d/2} / Γ(d/2 + 1)
                    let df = d as f64;
                    mth::pow(core::f64::consts::PI, 0.5 * df) / mth::tgamma(0.5 * df + 1.0)
                        * mth::pow(*radius, df)
                }
            },
        }
    }

    /// Outward cone of admissible translation directions anchored near `x0`:
    /// axis points outward through the nearest boundary point, half-opening
    /// π/4, radius a quarter of the local geometric scale. Translating the
    /// exterior by any direction in the cone keeps it exterior.
    pub fn admissible_cone(&self, x0: &[f64]) -> Result<Cone> {
        let theta = core::f64::consts::FRAC_PI_4;
        match self {
            Domain::IntervalUnion { intervals } => {
                let t = x0[0];
                // nearest endpoint, tie broken toward the right endpoint
                let mut best_d = f64::INFINITY;
                let mut axis = 1.0;
                for &(a, b) in intervals {
                    if mth::abs(t - b) <= best_d {
                        best_d = mth::abs(t - b);
                        axis = 1.0; // right endpoint: outward is +1
                    }
                    if mth::abs(t - a) < best_d {
                        best_d = mth::abs(t - a);
                        axis = -1.0; // left endpoint: outward is −1
                    }
                }
                let min_len = intervals
                    .iter()
                    .map(|&(a, b)| b - a)
                    .fold(f64::INFINITY, mth::fmin);
                let min_gap = intervals
                    .windows(2)
                    .map(|w| w[1].0 - w[0].1)
                    .fold(f64::INFINITY, mth::fmin);
                let scale = mth::fmin(min_len, min_gap);
                Cone::new(&[axis], theta, 0.5 * scale)
            }
            Domain::Ball { center, radius } => {
                let mut axis: Vec<f64> = x0.iter().zip(center.iter()).map(|(x, c)| x - c).collect();
                let n = mth::sqrt(axis.iter().map(|v| v * v).sum());
                if n < 1e-300 {
                    // at the center every direction is as good; pick e1
                    axis = vec![0.0; center.len()];
                    axis[0] = 1.0;
                } else {
                    for v in axis.iter_mut() {
                        *v /= n;
                    }
                }
                Cone::new(&axis, theta, 0.25 * radius)
            }
        }
    }
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for (a, b) in x.iter().zip(y.iter()) {
        acc += (a - b) * (a - b);
    }
    mth::sqrt(acc)
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    let mut acc = 0.0;
    for a in x {
        acc += a * a;
    }
    mth::sqrt(acc)
}

/// Truncated cone of directions `{h : |h| ≤ ρ, h·axis ≥ |h| cos θ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    /// Unit axis direction.
    pub axis: Vec<f64>,
    /// Half-opening angle θ ∈ (0, π/2].
    pub half_opening: f64,
    /// Truncation radius ρ > 0.
    pub radius: f64,
    /// Generating constant: any `h` with `|h| ≤ ρ·sin(θ/2)` decomposes into
    /// cone directions of total length ≤ c·|h|; c = 1/sin(θ/2).
    pub generating_constant: f64,
}

/// Signed decomposition of a vector into cone directions.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Parts summing exactly to the input; each lies in `C ∪ (−C)`.
    pub parts: Vec<Vec<f64>>,
}

impl Cone {
    pub fn new(axis: &[f64], half_opening: f64, radius: f64) -> Result<Self> {
        let n = norm(axis);
        if !(n > 0.0 && n.is_finite()) {
            return Err(invalid!("cone axis must be a nonzero vector"));
        }
        if !(half_opening > 0.0 && half_opening <= core::f64::consts::FRAC_PI_2) {
            return Err(invalid!(
                "cone half-opening must lie in (0, π/2], got {half_opening}"
            ));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid!("cone radius must be positive, got {radius}"));
        }
        let axis: Vec<f64> = axis.iter().map(|v| v / n).collect();
        Ok(Cone {
            axis,
            half_opening,
            radius,
            generating_constant: 1.0 / mth::sin(0.5 * half_opening),
        })
    }

    /// Radius of the ball on which [`Cone::decompose`] is guaranteed:
    /// ρ₀ = ρ·sin(θ/2).
    pub fn generating_radius(&self) -> f64 {
        self.radius * mth::sin(0.5 * self.half_opening)
    }

    /// Same cone scaled to radius `factor·ρ`.
    pub fn scaled(&self, factor: f64) -> Cone {
        Cone {
            axis: self.axis.clone(),
            half_opening: self.half_opening,
            radius: self.radius * factor,
            generating_constant: self.generating_constant,
        }
    }

    /// Membership in the closed truncated cone; the zero vector counts as
    /// contained.
    pub fn contains(&self, h: &[f64]) -> bool {
        let len = norm(h);
        if len == 0.0 {
            return true;
        }
        if len > self.radius * (1.0 + 1e-12) {
            return false;
        }
        let d = crate::linalg::dot(h, &self.axis);
        d >= len * mth::cos(self.half_opening) - 1e-12 * len
    }

    /// Membership in `C ∪ (−C)`.
    pub fn contains_signed(&self, h: &[f64]) -> bool {
        let neg: Vec<f64> = h.iter().map(|v| -v).collect();
        self.contains(h) || self.contains(&neg)
    }

    /// Write `h` (with `|h| ≤ ρ·sin(θ/2)`) as a sum of at most two vectors
    /// from `C ∪ (−C)` with `Σ|h_j| ≤ c·|h|`.
    ///
    /// Construction: in the plane spanned by the axis `n` and `h`, split over
    /// the boundary ray at angle +θ toward `h` and the axis itself. On-axis
    /// and in-cone inputs pass through unchanged.
    pub fn decompose(&self, h: &[f64]) -> Result<Decomposition> {
        let len = norm(h);
        let rho0 = self.generating_radius();
        if len > rho0 * (1.0 + 1e-12) {
            return Err(invalid!(
                "|h| = {len} exceeds the generating radius ρ·sin(θ/2) = {rho0}"
            ));
        }
        if len == 0.0 || self.contains_signed(h) {
            return Ok(Decomposition {
                parts: vec![h.to_vec()],
            });
        }
        let e1 = &self.axis;
        let h1 = crate::linalg::dot(h, e1);
        let mut e2: Vec<f64> = h
            .iter()
            .zip(e1.iter())
            .map(|(hv, av)| hv - h1 * av)
            .collect();
        let h2 = norm(&e2);
        debug_assert!(h2 > 0.0, "off-cone vector cannot be on the axis");
        for v in e2.iter_mut() {
            *v /= h2;
        }
        let theta = self.half_opening;
        let (st, ct) = (mth::sin(theta), mth::cos(theta));
        // h = a·(cos θ e1 + sin θ e2) − b·e1
        let a = h2 / st;
        let b = a * ct - h1;
        let part1: Vec<f64> = e1
            .iter()
            .zip(e2.iter())
            .map(|(u, v)| a * (ct * u + st * v))
            .collect();
        let mut parts = vec![part1];
        if b != 0.0 {
            parts.push(e1.iter().map(|u| -b * u).collect());
        }
        Ok(Decomposition { parts })
    }

    /// Two-term split `h = h₊ − h₋` with both terms in the half-radius cone
    /// `C/2`; requires `|h| ≤ ρ·sin(θ/2)/2`. Either term may be zero.
    pub fn two_term_split(&self, h: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let len = norm(h);
        if len > 0.5 * self.generating_radius() * (1.0 + 1e-12) {
            return Err(invalid!(
                "|h| = {len} exceeds half the generating radius for a two-term split"
            ));
        }
        let dec = self.decompose(h)?;
        let d = self.axis.len();
        let mut plus = vec![0.0; d];
        let mut minus = vec![0.0; d];
        for p in &dec.parts {
            if self.contains(p) {
                for (acc, v) in plus.iter_mut().zip(p.iter()) {
                    *acc += v;
                }
            } else {
                for (acc, v) in minus.iter_mut().zip(p.iter()) {
                    *acc -= v;
                }
            }
        }
        let half = self.scaled(0.5);
        if !(half.contains(&plus) && half.contains(&minus)) {
            return Err(Error::InvalidParameter(format!(
                "two-term split escaped C/2 for |h| = {len}"
            )));
        }
        Ok((plus, minus))
    }
}

/// A finite covering of the δ-neighborhood `Ω^δ` by equal balls.
#[derive(Debug, Clone, PartialEq)]
pub struct Covering {
    pub centers: Vec<Vec<f64>>,
    pub radius: f64,
    pub delta: f64,
}

impl Covering {
    /// Validate that the given balls cover `Ω^δ = {x : dist(x, Ω) < δ}`.
    ///
    /// Dimension 1 is checked exactly by interval arithmetic; balls in d ≥ 2
    /// are checked on a deterministic dense sample of `Ω^δ`.
    pub fn new(domain: &Domain, centers: &[Vec<f64>], radius: f64, delta: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(invalid!("covering needs at least one ball"));
        }
        if !(radius > 0.0) || !(delta >= 0.0) {
            return Err(invalid!("covering needs radius > 0 and δ ≥ 0"));
        }
        for c in centers {
            if c.len() != domain.dim() {
                return Err(invalid!("covering center dimension mismatch"));
            }
        }
        let cov = Covering {
            centers: centers.to_vec(),
            radius,
            delta,
        };
        cov.check_covers(domain)?;
        Ok(cov)
    }

    /// Build a covering of `Ω^δ` by balls of the given radius on a regular
    /// lattice of pitch ≤ r/√2 (so the lattice balls cover space), keeping
    /// the balls that meet `Ω^δ`.
    pub fn generate(domain: &Domain, radius: f64, delta: f64) -> Result<Self> {
        if !(radius > 0.0) || !(delta >= 0.0) {
            return Err(invalid!("covering needs radius > 0 and δ ≥ 0"));
        }
        let (lo, hi) = domain.bounding_box();
        let d = domain.dim();
        let pitch = radius / mth::sqrt(d as f64) * 0.999;
        let mut counts = Vec::with_capacity(d);
        for k in 0..d {
            let span = hi[k] - lo[k] + 2.0 * delta + 2.0 * radius;
            counts.push((span / pitch) as usize + 2);
        }
        let mut centers = Vec::new();
        let mut idx = vec![0usize; d];
        'outer: loop {
            let c: Vec<f64> = (0..d)
                .map(|k| lo[k] - delta - radius + idx[k] as f64 * pitch)
                .collect();
            // keep balls that could meet Ω^δ
            if dist_to_domain(domain, &c) < delta + radius {
                centers.push(c);
            }
            for k in 0..d {
                idx[k] += 1;
                if idx[k] < counts[k] {
                    continue 'outer;
                }
                idx[k] = 0;
            }
            break;
        }
        Covering::new(domain, &centers, radius, delta)
    }

    fn check_covers(&self, domain: &Domain) -> Result<()> {
        match domain {
            Domain::IntervalUnion { intervals } => {
                // merge the covering balls into maximal intervals
                let mut iv: Vec<(f64, f64)> = self
                    .centers
                    .iter()
                    .map(|c| (c[0] - self.radius, c[0] + self.radius))
                    .collect();
                iv.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
                let mut merged: Vec<(f64, f64)> = Vec::new();
                for (a, b) in iv {
                    match merged.last_mut() {
                        Some(last) if a <= last.1 => last.1 = mth::fmax(last.1, b),
                        _ => merged.push((a, b)),
                    }
                }
                for &(a, b) in intervals {
                    let (lo, hi) = (a - self.delta, b + self.delta);
                    let ok = merged.iter().any(|&(ma, mb)| ma <= lo && mb >= hi);
                    if !ok {
                        return Err(invalid!(
                            "covering misses part of the neighborhood of ({a}, {b})"
                        ));
                    }
                }
                Ok(())
            }
            Domain::Ball { center, radius } => {
                // deterministic sample of Ω^δ on a lattice of pitch r_cov/8
                let d = center.len();
                let pitch = self.radius / 8.0;
                let ext = radius + self.delta;
                let steps = (2.0 * ext / pitch) as usize + 1;
                let mut idx = vec![0usize; d];
                'outer: loop {
                    let x: Vec<f64> = (0..d)
                        .map(|k| center[k] - ext + idx[k] as f64 * pitch)
                        .collect();
                    if dist_to_domain(domain, &x) < self.delta {
                        let covered = self
                            .centers
                            .iter()
                            .any(|c| dist(c, &x) < self.radius * (1.0 + 1e-12));
                        if !covered {
                            return Err(invalid!(
                                "covering misses the sampled point {:?} of the δ-neighborhood",
                                x
                            ));
                        }
                    }
                    for k in 0..d {
                        idx[k] += 1;
                        if idx[k] <= steps {
                            continue 'outer;
                        }
                        idx[k] = 0;
                    }
                    break;
                }
                Ok(())
            }
        }
    }
}

/// Distance from a point to the closed domain (0 inside).
pub fn dist_to_domain(domain: &Domain, x: &[f64]) -> f64 {
    match domain {
        Domain::IntervalUnion { intervals } => {
            let t = x[0];
            let mut d = f64::INFINITY;
            for &(a, b) in intervals {
                if t >= a && t <= b {
                    return 0.0;
                }
                d = mth::fmin(d, mth::fmin(mth::abs(t - a), mth::abs(t - b)));
            }
            d
        }
        Domain::Ball { center, radius } => mth::fmax(0.0, dist(x, center) - radius),
    }
}
