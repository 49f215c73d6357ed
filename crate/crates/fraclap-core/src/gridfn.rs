//! Uniform grids, sampled functions with zero extension, aligned
//! translations, difference quotients, smooth cutoffs and L² moduli of
//! smoothness.
//!
//! Conventions:
//! * nodes sit at `origin + i·Δ` per coordinate, values stored row-major
//!   (last coordinate fastest);
//! * translations are restricted to integer multiples of the spacing, so a
//!   translate is an exact index shift — no interpolation error enters the
//!   smoothness measurements;
//! * the L² norm behind moduli is the exact L² norm of the piecewise
//!   (multi)linear interpolant of the nodal values, summed over cells whose
//!   corners all lie in the restriction set. It is exact for piecewise
//!   linear data (the second difference of a ramp) and second-order
//!   consistent otherwise. Plain `‖·‖_{L²(Ω)}` norms elsewhere use the
//!   midpoint rule with cell volume Δ^d;
//! * full-space moduli difference the zero extension over a lattice padded
//!   by the stencil reach, so cells straddling the edge of the grid box are
//!   counted too.

use crate::closedform::ClosedForm;
use crate::error::{Error, Result};
use crate::geometry::{norm, Domain, OffsetClass};
use crate::invalid;
use crate::mth;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Tolerance on the zero-extension invariant: nodal values outside the
/// domain must vanish to this level.
pub const ZERO_EXTENSION_TOL: f64 = 1e-14;

/// Uniform tensor grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub shape: Vec<usize>,
}

impl Grid {
    pub fn new(origin: &[f64], spacing: f64, shape: &[usize]) -> Result<Self> {
        if origin.len() != shape.len() || origin.is_empty() {
            return Err(invalid!("grid origin and shape must have equal dimension ≥ 1"));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(invalid!("grid spacing must be positive, got {spacing}"));
        }
        if shape.iter().any(|&n| n < 2) {
            return Err(invalid!("grid needs at least 2 points per dimension"));
        }
        Ok(Grid {
            origin: origin.to_vec(),
            spacing,
            shape: shape.to_vec(),
        })
    }

    /// 1D grid with `n` nodes spanning `[a, b]` inclusive.
    pub fn line(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(b > a) {
            return Err(invalid!("grid span needs b > a"));
        }
        if n < 2 {
            return Err(invalid!("grid needs at least 2 points"));
        }
        Grid::new(&[a], (b - a) / (n - 1) as f64, &[n])
    }

    /// 2D grid with `n×n` nodes spanning `[a, b]²`.
    pub fn square(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(b > a) {
            return Err(invalid!("grid span needs b > a"));
        }
        if n < 2 {
            return Err(invalid!("grid needs at least 2 points"));
        }
        Grid::new(&[a, a], (b - a) / (n - 1) as f64, &[n, n])
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinates of the node with multi-index `idx`.
    pub fn node(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .zip(self.origin.iter())
            .map(|(&i, &o)| o + i as f64 * self.spacing)
            .collect()
    }

    /// Row-major flattening (last coordinate fastest).
    pub fn flat(&self, idx: &[usize]) -> usize {
        let mut f = 0;
        for (k, &i) in idx.iter().enumerate() {
            f = f * self.shape[k] + i;
        }
        f
    }

    /// Inverse of [`Grid::flat`].
    pub fn unflat(&self, mut f: usize) -> Vec<usize> {
        let d = self.dim();
        let mut idx = vec![0usize; d];
        for k in (0..d).rev() {
            idx[k] = f % self.shape[k];
            f /= self.shape[k];
        }
        idx
    }

    /// Integer offset realizing the vector `h`, or an error if `h` is not an
    /// integer multiple of the spacing (within 1e−9·Δ per coordinate).
    pub fn step_offset(&self, h: &[f64]) -> Result<Vec<isize>> {
        if h.len() != self.dim() {
            return Err(Error::GridMismatch(format!(
                "step has dimension {}, grid has {}",
                h.len(),
                self.dim()
            )));
        }
        let mut off = Vec::with_capacity(h.len());
        for &c in h {
            let k = mth::round(c / self.spacing);
            if mth::abs(k * self.spacing - c) > 1e-9 * self.spacing {
                return Err(Error::UnalignedStep(format!(
                    "component {c} is not an integer multiple of Δ = {}",
                    self.spacing
                )));
            }
            off.push(k as isize);
        }
        Ok(off)
    }
}

/// How a norm or modulus is restricted in space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Restriction {
    /// Over the inner offset `Ω_{|h|}` of the function's domain.
    InnerOffset,
    /// Over all of ℝ^d (requires a zero-extended function).
    FullSpace,
}

impl Restriction {
    pub fn tag(&self) -> &'static str {
        match self {
            Restriction::InnerOffset => "inner_offset",
            Restriction::FullSpace => "full_space",
        }
    }
}

/// Nodal samples of a function on a uniform grid, tied to a domain.
///
/// When `zero_extended` is set, nodal values outside the domain vanish (to
/// [`ZERO_EXTENSION_TOL`]); this is the invariant that makes full-space
/// seminorms of the samples meaningful.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub domain: Domain,
    pub zero_extended: bool,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>, domain: Domain, zero_extended: bool) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if domain.dim() != grid.dim() {
            return Err(Error::GridMismatch(format!(
                "domain dimension {} vs grid dimension {}",
                domain.dim(),
                grid.dim()
            )));
        }
        let gf = GridFunction {
            grid,
            values,
            domain,
            zero_extended,
        };
        if zero_extended {
            gf.check_zero_extension()?;
        }
        Ok(gf)
    }

    fn check_zero_extension(&self) -> Result<()> {
        for f in 0..self.grid.len() {
            let x = self.grid.node(&self.grid.unflat(f));
            if !self.domain.contains(&x) && mth::abs(self.values[f]) >= ZERO_EXTENSION_TOL {
                return Err(invalid!(
                    "zero extension violated: |v| = {:.3e} at an exterior node",
                    self.values[f]
                ));
            }
        }
        Ok(())
    }

    /// Sample a closed form on a grid. With `zero_extended`, exterior nodes
    /// are forced to exactly zero (the sampled families already vanish
    /// there when they are genuinely supported in the domain).
    pub fn sample(
        grid: Grid,
        domain: Domain,
        f: &ClosedForm,
        zero_extended: bool,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for fl in 0..grid.len() {
            let x = grid.node(&grid.unflat(fl));
            let mut v = f.eval(&x);
            if zero_extended && !domain.contains(&x) {
                v = 0.0;
            }
            values.push(v);
        }
        GridFunction::new(grid, values, domain, zero_extended)
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// `v(· + h)` for grid-aligned `h`; nodes shifted in from beyond the
    /// grid box are filled with zero (consistent with zero extension).
    pub fn translate(&self, h: &[f64]) -> Result<GridFunction> {
        let off = self.grid.step_offset(h)?;
        let mut out = vec![0.0; self.values.len()];
        let d = self.dim();
        for fl in 0..self.values.len() {
            let idx = self.grid.unflat(fl);
            let mut src = Vec::with_capacity(d);
            let mut inside = true;
            for k in 0..d {
                let j = idx[k] as isize + off[k];
                if j < 0 || j as usize >= self.grid.shape[k] {
                    inside = false;
                    break;
                }
                src.push(j as usize);
            }
            if inside {
                out[fl] = self.values[self.grid.flat(&src)];
            }
        }
        GridFunction::new(self.grid.clone(), out, self.domain.clone(), false)
    }

    /// First (`v_h − v`) or second (`v_h − 2v + v_{−h}`) difference along `h`.
    pub fn difference(&self, h: &[f64], order: u8) -> Result<GridFunction> {
        match order {
            1 => {
                let vh = self.translate(h)?;
                let vals = vh
                    .values
                    .iter()
                    .zip(self.values.iter())
                    .map(|(a, b)| a - b)
                    .collect();
                GridFunction::new(self.grid.clone(), vals, self.domain.clone(), false)
            }
            2 => {
                if self.grid.shape.iter().any(|&n| n < 4) {
                    return Err(invalid!(
                        "second differences need at least 4 grid points per dimension"
                    ));
                }
                let hp = self.translate(h)?;
                let hm: Vec<f64> = h.iter().map(|c| -c).collect();
                let hm = self.translate(&hm)?;
                let vals = hp
                    .values
                    .iter()
                    .zip(self.values.iter())
                    .zip(hm.values.iter())
                    .map(|((a, b), c)| a - 2.0 * b + c)
                    .collect();
                GridFunction::new(self.grid.clone(), vals, self.domain.clone(), false)
            }
            k => Err(invalid!("difference order must be 1 or 2, got {k}")),
        }
    }

    /// Pointwise linear combination `a·self + b·other` on a shared grid.
    pub fn combine(&self, a: f64, other: &GridFunction, b: f64) -> Result<GridFunction> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(String::from(
                "combining functions on different grids",
            )));
        }
        let vals = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(x, y)| a * x + b * y)
            .collect();
        GridFunction::new(self.grid.clone(), vals, self.domain.clone(), false)
    }

    /// Node mask for a restriction at step magnitude `|h|`.
    pub fn mask(&self, restriction: Restriction, step_len: f64) -> Vec<bool> {
        let n = self.grid.len();
        let mut m = vec![true; n];
        if let Restriction::InnerOffset = restriction {
            for (fl, mk) in m.iter_mut().enumerate() {
                let x = self.grid.node(&self.grid.unflat(fl));
                *mk = self.domain.offset_membership(&x, step_len) == OffsetClass::Inner;
            }
        }
        m
    }

    /// Midpoint-rule L² norm over masked nodes: `√(Σ v_i² Δ^d)`.
    pub fn l2_midpoint(&self, mask: Option<&[bool]>) -> f64 {
        let vol = mth::pow(self.grid.spacing, self.dim() as f64);
        let mut acc = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            if mask.is_none_or(|m| m[i]) {
                acc += v * v;
            }
        }
        mth::sqrt(acc * vol)
    }

    /// Exact L² norm of the piecewise (multi)linear interpolant, summed over
    /// cells whose corners all lie in the mask. Implemented for d ≤ 2.
    pub fn l2_p1(&self, mask: Option<&[bool]>) -> Result<f64> {
        let d = self.dim();
        let h = self.grid.spacing;
        let inc = |i: usize| mask.is_none_or(|m| m[i]);
        match d {
            1 => {
                let n = self.grid.shape[0];
                let mut acc = 0.0;
                for i in 0..n - 1 {
                    if inc(i) && inc(i + 1) {
                        let a = self.values[i];
                        let b = self.values[i + 1];
                        acc += h * (a * a + a * b + b * b) / 3.0;
                    }
                }
                Ok(mth::sqrt(acc))
            }
            2 => {
                let (nx, ny) = (self.grid.shape[0], self.grid.shape[1]);
                // 1D element mass matrix on [0,1]: [[1/3,1/6],[1/6,1/3]]
                const M: [[f64; 2]; 2] = [[1.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 3.0]];
                let mut acc = 0.0;
                for ix in 0..nx - 1 {
                    for iy in 0..ny - 1 {
                        let c = [
                            ix * ny + iy,
                            ix * ny + iy + 1,
                            (ix + 1) * ny + iy,
                            (ix + 1) * ny + iy + 1,
                        ];
                        if !(inc(c[0]) && inc(c[1]) && inc(c[2]) && inc(c[3])) {
                            continue;
                        }
                        // corner (a,b): a = x-side, b = y-side
                        let val = |a: usize, b: usize| self.values[c[2 * a + b]];
                        let mut cell = 0.0;
                        for a in 0..2 {
                            for b in 0..2 {
                                for a2 in 0..2 {
                                    for b2 in 0..2 {
                                        cell += val(a, b) * val(a2, b2) * M[a][a2] * M[b][b2];
                                    }
                                }
                            }
                        }
                        acc += cell * h * h;
                    }
                }
                Ok(mth::sqrt(acc))
            }
            _ => Err(Error::Unsupported(format!(
                "piecewise-linear L² norms are implemented for d ≤ 2, got d = {d}"
            ))),
        }
    }

    /// L² modulus of one difference step: the interpolant norm of
    /// `δ_order(h)v` over the restriction.
    ///
    /// * `InnerOffset`: cells whose corners lie in the inner offset set
    ///   `Ω_{|h|}` of the domain.
    /// * `FullSpace`: the zero extension is differenced over a lattice
    ///   enlarged by the stencil reach, so stencils straddling the edge of
    ///   the grid box still contribute — for boundary-concentrated data
    ///   those straddling cells carry a share of the modulus that does not
    ///   vanish under refinement. Requires a zero-extended function.
    pub fn omega(&self, order: u8, h: &[f64], restriction: Restriction) -> Result<f64> {
        match restriction {
            Restriction::InnerOffset => {
                let delta = self.difference(h, order)?;
                let mask = self.mask(restriction, norm(h));
                delta.l2_p1(Some(&mask))
            }
            Restriction::FullSpace => {
                if !self.zero_extended {
                    return Err(invalid!(
                        "full-space moduli require a zero-extended function"
                    ));
                }
                let off = self.grid.step_offset(h)?;
                let d = self.dim();
                let pad: Vec<usize> = off
                    .iter()
                    .map(|&o| order as usize * o.unsigned_abs() + 1)
                    .collect();
                let origin: Vec<f64> = (0..d)
                    .map(|k| self.grid.origin[k] - pad[k] as f64 * self.grid.spacing)
                    .collect();
                let shape: Vec<usize> = (0..d)
                    .map(|k| self.grid.shape[k] + 2 * pad[k])
                    .collect();
                let wide_grid = Grid::new(&origin, self.grid.spacing, &shape)?;
                let mut vals = vec![0.0; wide_grid.len()];
                for fl in 0..self.grid.len() {
                    let mut idx = self.grid.unflat(fl);
                    for (i, p) in idx.iter_mut().zip(pad.iter()) {
                        *i += p;
                    }
                    vals[wide_grid.flat(&idx)] = self.values[fl];
                }
                let wide = GridFunction::new(wide_grid, vals, self.domain.clone(), false)?;
                let delta = wide.difference(h, order)?;
                delta.l2_p1(None)
            }
        }
    }
}

/// Radial quintic-smoothstep cutoff: 1 on the ball of radius ρ around the
/// center, 0 outside radius 2ρ, C² in between.
#[derive(Debug, Clone, PartialEq)]
pub struct Cutoff {
    pub center: Vec<f64>,
    pub rho: f64,
}

impl Cutoff {
    pub fn new(center: &[f64], rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(invalid!("cutoff radius must be positive, got {rho}"));
        }
        Ok(Cutoff {
            center: center.to_vec(),
            rho,
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let t = dist(x, &self.center);
        if t <= self.rho {
            1.0
        } else if t >= 2.0 * self.rho {
            0.0
        } else {
            let u = (t - self.rho) / self.rho;
            1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
        }
    }

    /// `‖φ‖_{W¹_∞} = ‖φ‖_∞ + ‖φ'‖_∞`: the quintic transition over width ρ has
    /// maximal slope 15/(8ρ), attained halfway.
    pub fn lipschitz_bound(&self) -> f64 {
        1.0 + 15.0 / (8.0 * self.rho)
    }
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (a, b) in x.iter().zip(y.iter()) {
        acc += (a - b) * (a - b);
    }
    mth::sqrt(acc)
}

/// Localized translation `T_h v = φ·v(·+h) + (1−φ)·v`: translates only where
/// the cutoff is active. The result keeps the zero-extension flag exactly
/// when its exterior nodal values still vanish.
pub fn localized_translate(v: &GridFunction, h: &[f64], cutoff: &Cutoff) -> Result<GridFunction> {
    let vh = v.translate(h)?;
    let mut vals = Vec::with_capacity(v.values.len());
    for fl in 0..v.values.len() {
        let x = v.grid.node(&v.grid.unflat(fl));
        let phi = cutoff.eval(&x);
        vals.push(phi * vh.values[fl] + (1.0 - phi) * v.values[fl]);
    }
    let mut out = GridFunction::new(v.grid.clone(), vals, v.domain.clone(), false)?;
    if v.zero_extended && out.check_zero_extension_ok() {
        out.zero_extended = true;
    }
    Ok(out)
}

impl GridFunction {
    fn check_zero_extension_ok(&self) -> bool {
        for f in 0..self.grid.len() {
            let x = self.grid.node(&self.grid.unflat(f));
            if !self.domain.contains(&x) && mth::abs(self.values[f]) >= ZERO_EXTENSION_TOL {
                return false;
            }
        }
        true
    }
}

/// A measured modulus-of-smoothness profile: `ω_order(h)` over strictly
/// decreasing step magnitudes, under a fixed restriction.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulusProfile {
    pub order: u8,
    pub restriction: Restriction,
    /// Rows `(|h|, ω(|h|))`, with `|h|` strictly decreasing.
    pub rows: Vec<(f64, f64)>,
}

impl ModulusProfile {
    pub fn new(order: u8, restriction: Restriction, rows: Vec<(f64, f64)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(invalid!("modulus profile needs at least one row"));
        }
        for w in rows.windows(2) {
            if !(w[1].0 < w[0].0) {
                return Err(invalid!(
                    "modulus steps must be strictly decreasing, got {} then {}",
                    w[0].0,
                    w[1].0
                ));
            }
        }
        if rows.iter().any(|r| !(r.0 > 0.0) || r.1 < 0.0) {
            return Err(invalid!("modulus rows need h > 0 and ω ≥ 0"));
        }
        Ok(ModulusProfile {
            order,
            restriction,
            rows,
        })
    }
}

/// Measure `ω_order` over a set of step magnitudes along fixed unit
/// directions: for each magnitude the maximum over the supplied directions
/// (a single axis direction in d = 1).
///
/// Steps smaller than 4Δ are rejected: below that the difference stencil is
/// under-resolved.
pub fn modulus(
    v: &GridFunction,
    order: u8,
    magnitudes: &[f64],
    directions: &[Vec<f64>],
    restriction: Restriction,
) -> Result<ModulusProfile> {
    if directions.is_empty() {
        return Err(invalid!("modulus needs at least one direction"));
    }
    let mut rows = Vec::with_capacity(magnitudes.len());
    for &m in magnitudes {
        if m < 4.0 * v.grid.spacing * (1.0 - 1e-12) {
            return Err(invalid!(
                "step {m} is below the 4Δ resolution floor (Δ = {})",
                v.grid.spacing
            ));
        }
        let mut best = 0.0;
        for dir in directions {
            let h: Vec<f64> = dir.iter().map(|c| c * m).collect();
            best = mth::fmax(best, v.omega(order, &h, restriction)?);
        }
        rows.push((m, best));
    }
    rows.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    ModulusProfile::new(order, restriction, rows)
}

/// Dyadic step magnitudes `top·2^{-k}`, `k = 0..`, truncated at the 4Δ floor.
pub fn dyadic_steps(top: f64, spacing: f64, max_count: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let mut m = top;
    while m >= 4.0 * spacing * (1.0 - 1e-12) && out.len() < max_count {
        out.push(m);
        m *= 0.5;
    }
    out
}
