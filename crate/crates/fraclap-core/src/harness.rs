//! Measurement harness: fits a smoothness index to a measured modulus
//! profile, states the theory-predicted index for each data class, exposes
//! the index bootstrap recursions, and sweeps the operator order through a
//! solve/measure pipeline.
//!
//! The index fit works on `ω₂(h) ≈ C·h^{σ*}`: a least-squares slope in
//! log-log coordinates over the smallest resolved decade of steps. A fitted
//! slope answers "which index"; the complementary boundedness verdict
//! answers "is `ω₂(h)/h^σ` bounded as h → 0" for a *given* σ, which is the
//! sharper question near an endpoint index where the sup-type membership
//! either holds or fails.

use alloc::vec::Vec;

use crate::besov::{dq_seminorm, BesovIndex, DirectionSet};
use crate::closedform::ClosedForm;
use crate::fracop::FracParams;
use crate::geometry::Domain;
use crate::gridfn::{dyadic_steps, modulus, GridFunction, ModulusProfile, Restriction};
use crate::solver1d::{solve_dirichlet, Mesh};
use crate::{invalid, mth, quad, Error, Result};

/// Boundedness of `ω(h)/h^σ` toward h → 0, judged from the finest steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Bounded,
    Growing,
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Bounded => "bounded",
            Verdict::Growing => "growing",
        }
    }
}

/// A fitted decay exponent with its uncertainty and fit quality.
///
/// `sigma_star = +∞` (with an empty verdict basis and `r2 = 1`) is the
/// sentinel for profiles containing exactly-zero rows: the data is smoother
/// than any finite index resolves, and every verdict is `Bounded`.
#[derive(Debug, Clone)]
pub struct RateEstimate {
    /// Least-squares slope of log ω vs log h over the smallest decade.
    pub sigma_star: f64,
    /// 95% band (low, high) from the fit residuals.
    pub slope_ci: (f64, f64),
    /// Coefficient of determination of the log-log fit.
    pub r2: f64,
    /// The four smallest rows `(h, ω)` in ascending h — the verdict basis.
    smallest: Vec<(f64, f64)>,
}

impl RateEstimate {
    /// `Growing` iff `ω(h)/h^σ` increases strictly as h shrinks across the
    /// four smallest steps; anything weaker (including ties) is `Bounded`.
    pub fn bounded_verdict(&self, sigma: f64) -> Verdict {
        if self.smallest.len() < 4 {
            return Verdict::Bounded;
        }
        let ratio: Vec<f64> = self
            .smallest
            .iter()
            .map(|&(h, w)| w / mth::pow(h, sigma))
            .collect();
        // smallest h first: growth toward h → 0 means ratio[0] largest
        if ratio.windows(2).all(|p| p[0] > p[1]) {
            Verdict::Growing
        } else {
            Verdict::Bounded
        }
    }
}

/// Fits `ω(h) ≈ C·h^{σ*}` over the smallest resolved decade of a profile.
///
/// Requires at least five rows spanning at least three octaves. Profiles
/// with a zero row short-circuit to the +∞ sentinel (see [`RateEstimate`]).
pub fn estimate_index(profile: &ModulusProfile) -> Result<RateEstimate> {
    let rows = &profile.rows;
    if rows.len() < 5 {
        return Err(Error::InsufficientCoverage(alloc::format!(
            "index fit needs at least 5 modulus rows, got {}",
            rows.len()
        )));
    }
    let h_max = rows[0].0;
    let h_min = rows[rows.len() - 1].0;
    if h_max < 8.0 * h_min * (1.0 - 1e-9) {
        return Err(Error::InsufficientCoverage(alloc::format!(
            "index fit needs 3 octaves of steps, got {h_min}..{h_max}"
        )));
    }
    if rows.iter().any(|&(_, w)| w <= 0.0) {
        return Ok(RateEstimate {
            sigma_star: f64::INFINITY,
            slope_ci: (f64::INFINITY, f64::INFINITY),
            r2: 1.0,
            smallest: Vec::new(),
        });
    }

    // fitting window: the smallest decade (rows are sorted descending)
    let mut start = rows.len();
    while start > 0 && rows[start - 1].0 <= 10.0 * h_min * (1.0 + 1e-9) {
        start -= 1;
    }
    // degenerate spacing (a lone small step far below the rest): widen to
    // the four smallest rows so a slope is still defined
    let start = start.min(rows.len() - 4);
    let window = &rows[start..];

    let n = window.len() as f64;
    let (mut xbar, mut ybar) = (0.0, 0.0);
    let pts: Vec<(f64, f64)> = window
        .iter()
        .map(|&(h, w)| (mth::ln(h), mth::ln(w)))
        .collect();
    for &(x, y) in &pts {
        xbar += x;
        ybar += y;
    }
    xbar /= n;
    ybar /= n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in &pts {
        sxx += (x - xbar) * (x - xbar);
        sxy += (x - xbar) * (y - ybar);
    }
    let slope = sxy / sxx;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for &(x, y) in &pts {
        let fit = ybar + slope * (x - xbar);
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - ybar) * (y - ybar);
    }
    let r2 = if ss_tot <= 1e-28 {
        1.0
    } else {
        mth::fmin(1.0, mth::fmax(0.0, 1.0 - ss_res / ss_tot))
    };
    let se = if pts.len() > 2 {
        mth::sqrt(ss_res / (n - 2.0) / sxx)
    } else {
        0.0
    };
    let band = 1.96 * se;

    let mut smallest: Vec<(f64, f64)> = rows[rows.len() - 4..].to_vec();
    smallest.reverse(); // ascending h
    Ok(RateEstimate {
        sigma_star: slope,
        slope_ci: (slope - band, slope + band),
        r2,
        smallest,
    })
}

/// Second-difference modulus rows of a grid function over dyadic axis steps.
///
/// Zero-extended functions are measured over the full space: that is the
/// estimand behind the zero-extension smoothness classes, and it keeps the
/// cells straddling the boundary — which carry a stable share of the modulus
/// for boundary-concentrated data — inside the norm. Plain box functions are
/// measured on the inner offset sets instead, so values the difference
/// stencil cannot see never enter. The top step is half the inradius so
/// every restriction set has interior mass.
pub fn second_difference_profile(v: &GridFunction) -> Result<ModulusProfile> {
    let rho = 0.5 * v.domain.inradius();
    let steps = dyadic_steps(rho, v.grid.spacing, 64);
    let mut dirs = Vec::with_capacity(2 * v.dim());
    for k in 0..v.dim() {
        for sign in [1.0, -1.0] {
            let mut e = alloc::vec![0.0; v.dim()];
            e[k] = sign;
            dirs.push(e);
        }
    }
    let restriction = if v.zero_extended {
        Restriction::FullSpace
    } else {
        Restriction::InnerOffset
    };
    modulus(v, 2, &steps, &dirs, restriction)
}

/// Regularity class of the right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub enum DataClass {
    /// Square-integrable data.
    L2,
    /// Data half an order below square-integrability (summability one) —
    /// the weakest class for which the half-order lift still holds.
    Rough,
    /// Data θ orders above the dual energy space, summability `q`.
    Intermediate { theta: f64, q: f64 },
}

/// The sharp smoothness index the theory predicts for the solution.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedIndex {
    pub value: f64,
    /// Membership holds at every index below `value` but fails at it.
    pub open_endpoint: bool,
    pub data_class: DataClass,
}

/// Predicted solution index for operator order `s` and the given data class.
///
/// Square-integrable data lifts by `min{s, 1/2}`; exactly at `s = 1/2` the
/// lift reaches 1 only as an open endpoint. Rough data applies for `s > 1/2`
/// and still lifts by a full half order. Intermediate data of excess θ (with
/// `0 < θ < min{s, 1/2}`) lifts by θ, again with an open endpoint at
/// `s = 1/2`.
pub fn predicted_index(s: f64, class: &DataClass) -> Result<PredictedIndex> {
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid!("operator order must lie in (0,1), got {s}"));
    }
    let critical = mth::abs(s - 0.5) < 1e-12;
    let (value, open_endpoint) = match class {
        DataClass::L2 => {
            if critical {
                (1.0, true)
            } else {
                (s + mth::fmin(s, 0.5), false)
            }
        }
        DataClass::Rough => {
            if !(s > 0.5) {
                return Err(invalid!(
                    "the rough data class needs s > 1/2, got {s}"
                ));
            }
            (s + 0.5, false)
        }
        DataClass::Intermediate { theta, q } => {
            if !(*q >= 1.0) {
                return Err(invalid!("summability must be ≥ 1, got {q}"));
            }
            if !(*theta > 0.0 && *theta < mth::fmin(s, 0.5)) {
                return Err(invalid!(
                    "intermediate excess must lie in (0, min(s, 1/2)), got {theta}"
                ));
            }
            (
                if critical { 0.5 } else { s } + theta,
                critical,
            )
        }
    };
    Ok(PredictedIndex {
        value,
        open_endpoint,
        data_class: class.clone(),
    })
}

/// Which lifting recursion generates the bootstrap sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BootstrapVariant {
    /// Orders s ∈ (0, 1/2]: σ_{j+1} = s + σ_j/2 from σ₀ = 0, limit 2s.
    L2,
    /// Orders s ∈ (1/2, 1): σ_{j+1} = (σ_j + 1)/2 from σ₀ = 1/2, limit 1.
    Rough,
}

/// First `n` terms of the bootstrap sequence of intermediate indices.
pub fn bootstrap_sequence(s: f64, variant: BootstrapVariant, n: usize) -> Result<Vec<f64>> {
    match variant {
        BootstrapVariant::L2 => {
            if !(s > 0.0 && s <= 0.5) {
                return Err(invalid!(
                    "the square-integrable bootstrap needs s in (0, 1/2], got {s}"
                ));
            }
        }
        BootstrapVariant::Rough => {
            if !(s > 0.5 && s < 1.0) {
                return Err(invalid!(
                    "the rough bootstrap needs s in (1/2, 1), got {s}"
                ));
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    // p = 2^{−j}, exact in floating point
    let mut p = 1.0f64;
    for _ in 0..n {
        match variant {
            BootstrapVariant::L2 => out.push(2.0 * s * (1.0 - p)),
            BootstrapVariant::Rough => out.push(1.0 - 0.5 * p),
        }
        p *= 0.5;
    }
    Ok(out)
}

/// Configuration of an order sweep: solve once per `s` and measure.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub domain: Domain,
    pub s_values: Vec<f64>,
    /// Cells per interval in each solve.
    pub cells: usize,
    pub data: ClosedForm,
}

/// Result of one sweep row.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub s: f64,
    pub estimate: RateEstimate,
    pub predicted: PredictedIndex,
    /// (endpoint-index seminorm + ‖u_h‖_{L²}) / ‖f‖_{L²(Ω)} — a stability
    /// ratio reported for trend inspection across orders.
    pub ratio: f64,
}

/// Solve at one order and measure the fitted index and stability ratio.
pub fn sweep_row(domain: &Domain, s: f64, cells: usize, data: &ClosedForm) -> Result<SweepRow> {
    let params = FracParams::new(1, s)?;
    let mesh = Mesh::uniform(domain, cells)?;
    let (u_h, report) = solve_dirichlet(&mesh, data, &params)?;
    let profile = second_difference_profile(&u_h)?;
    let estimate = estimate_index(&profile)?;
    let predicted = predicted_index(s, &DataClass::L2)?;

    let idx = BesovIndex::sup(predicted.value)?;
    let rho = 0.5 * domain.inradius();
    let dq = dq_seminorm(&u_h, &idx, &DirectionSet::Ball { rho })?;

    let rule = quad::gauss_legendre(5);
    let mut fsq = 0.0;
    for &(a, b) in mesh.intervals() {
        fsq += quad::gauss(&rule, a, b, &|x| {
            let v = data.eval(&[x]);
            v * v
        });
    }
    let fnorm = mth::sqrt(mth::fmax(fsq, 0.0));
    if !(fnorm > 1e-14) {
        return Err(invalid!("sweep data vanishes on the domain"));
    }
    Ok(SweepRow {
        s,
        estimate,
        predicted,
        ratio: (dq + report.l2) / fnorm,
    })
}

/// Runs [`sweep_row`] for every order in the configuration. Failed rows keep
/// their error; rows come back sorted by `s`.
pub fn sweep_s(cfg: &SweepConfig) -> Vec<(f64, Result<SweepRow>)> {
    let mut out: Vec<(f64, Result<SweepRow>)> = cfg
        .s_values
        .iter()
        .map(|&s| (s, sweep_row(&cfg.domain, s, cfg.cells, &cfg.data)))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracop::getoor_solution;
    use crate::gridfn::Grid;

    fn power_profile(exponent: f64, rows: usize) -> ModulusProfile {
        let rows: Vec<(f64, f64)> = (0..rows)
            .map(|k| {
                let h = (0.5f64).powi(k as i32);
                (h, h.powf(exponent))
            })
            .collect();
        ModulusProfile::new(2, Restriction::InnerOffset, rows).unwrap()
    }

    #[test]
    fn exact_power_law_is_recovered_to_machine_precision() {
        let est = estimate_index(&power_profile(1.25, 8)).unwrap();
        assert!(
            (est.sigma_star - 1.25).abs() <= 1e-12,
            "sigma_star = {}",
            est.sigma_star
        );
        assert!(est.r2 >= 1.0 - 1e-12 && est.r2 <= 1.0);
        assert!(est.slope_ci.0 <= est.sigma_star && est.sigma_star <= est.slope_ci.1);
        assert!(est.slope_ci.1 - est.slope_ci.0 <= 1e-9);
        // boundedness flips around the true exponent
        assert_eq!(est.bounded_verdict(1.2), Verdict::Bounded);
        assert_eq!(est.bounded_verdict(1.3), Verdict::Growing);
    }

    #[test]
    fn coverage_preconditions_are_enforced() {
        assert!(estimate_index(&power_profile(1.0, 4)).is_err());
        // five rows but only two octaves of span
        let rows = alloc::vec![
            (1.0, 1.0),
            (0.9, 0.9),
            (0.8, 0.8),
            (0.7, 0.7),
            (0.3, 0.3),
        ];
        let p = ModulusProfile::new(2, Restriction::InnerOffset, rows).unwrap();
        assert!(matches!(
            estimate_index(&p),
            Err(Error::InsufficientCoverage(_))
        ));
    }

    #[test]
    fn zero_rows_give_the_bounded_sentinel() {
        let rows: Vec<(f64, f64)> = (0..8).map(|k| ((0.5f64).powi(k), 0.0)).collect();
        let p = ModulusProfile::new(2, Restriction::InnerOffset, rows).unwrap();
        let est = estimate_index(&p).unwrap();
        assert!(est.sigma_star.is_infinite());
        assert_eq!(est.r2, 1.0);
        for sigma in [0.1, 0.9, 1.9] {
            assert_eq!(est.bounded_verdict(sigma), Verdict::Bounded);
        }
        // a single vanishing row also short-circuits
        let mut rows: Vec<(f64, f64)> = (0..8)
            .map(|k| {
                let h = (0.5f64).powi(k);
                (h, h)
            })
            .collect();
        rows.last_mut().unwrap().1 = 0.0;
        let p = ModulusProfile::new(2, Restriction::InnerOffset, rows).unwrap();
        assert!(estimate_index(&p).unwrap().sigma_star.is_infinite());
    }

    #[test]
    fn ramp_profile_measures_the_three_halves_index() {
        let n = 1 << 14;
        let grid = Grid::line(-1.0, 1.0, n + 1).unwrap();
        let dom = Domain::interval_union(&[(-1.0, 1.0)]).unwrap();
        let v = GridFunction::sample(grid, dom, &ClosedForm::Power { alpha: 1.0 }, false)
            .unwrap();
        let est = estimate_index(&second_difference_profile(&v).unwrap()).unwrap();
        assert!(
            (est.sigma_star - 1.5).abs() <= 0.02,
            "sigma_star = {}",
            est.sigma_star
        );
        assert!(est.r2 > 0.999);
        assert_eq!(est.bounded_verdict(1.45), Verdict::Bounded);
        assert_eq!(est.bounded_verdict(1.55), Verdict::Growing);
    }

    #[test]
    fn explicit_solutions_show_the_half_order_shift() {
        let n = 1 << 14;
        let dom = Domain::interval_union(&[(-1.0, 1.0)]).unwrap();
        for s in [0.25, 0.5, 0.75] {
            let u = getoor_solution(1, s, 1.0).unwrap();
            let grid = Grid::line(-1.0, 1.0, n + 1).unwrap();
            let v = GridFunction::sample(grid, dom.clone(), &u, true).unwrap();
            let est = estimate_index(&second_difference_profile(&v).unwrap()).unwrap();
            assert!(
                (est.sigma_star - (s + 0.5)).abs() <= 0.05,
                "s = {s}: sigma_star = {}",
                est.sigma_star
            );
            assert_eq!(
                est.bounded_verdict(s + 0.45),
                Verdict::Bounded,
                "s = {s}"
            );
            assert_eq!(est.bounded_verdict(s + 0.6), Verdict::Growing, "s = {s}");
        }
    }

    #[test]
    fn bootstrap_sequences_match_their_closed_forms() {
        let l2 = bootstrap_sequence(0.25, BootstrapVariant::L2, 4).unwrap();
        for (got, want) in l2.iter().zip([0.0, 0.25, 0.375, 0.4375]) {
            assert!((got - want).abs() <= 1e-15);
        }
        let rough = bootstrap_sequence(0.75, BootstrapVariant::Rough, 4).unwrap();
        for (got, want) in rough.iter().zip([0.5, 0.75, 0.875, 0.9375]) {
            assert!((got - want).abs() <= 1e-15);
        }

        for s in [0.1, 0.3, 0.5] {
            let seq = bootstrap_sequence(s, BootstrapVariant::L2, 12).unwrap();
            for j in 0..seq.len() - 1 {
                assert!(
                    (s + 0.5 * seq[j] - seq[j + 1]).abs() <= 1e-15,
                    "s = {s}, j = {j}"
                );
                assert!(seq[j + 1] > seq[j]);
            }
            let last = *seq.last().unwrap();
            assert!((last - 2.0 * s).abs() <= 2.0 * s * (0.5f64).powi(11) + 1e-15);
        }
        for s in [0.6, 0.9] {
            let seq = bootstrap_sequence(s, BootstrapVariant::Rough, 12).unwrap();
            for j in 0..seq.len() - 1 {
                assert!(
                    (s + 0.5 * seq[j] - (seq[j + 1] + s - 0.5)).abs() <= 1e-15,
                    "s = {s}, j = {j}"
                );
                assert!(seq[j + 1] > seq[j]);
            }
            assert!((seq[11] - 1.0).abs() <= (0.5f64).powi(12) + 1e-15);
        }

        assert!(bootstrap_sequence(0.6, BootstrapVariant::L2, 3).is_err());
        assert!(bootstrap_sequence(0.5, BootstrapVariant::Rough, 3).is_err());
        assert!(bootstrap_sequence(1.0, BootstrapVariant::Rough, 3).is_err());
        assert!(bootstrap_sequence(0.25, BootstrapVariant::L2, 0)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn predicted_indices_follow_the_data_class() {
        let p = predicted_index(0.3, &DataClass::L2).unwrap();
        assert!((p.value - 0.6).abs() <= 1e-15 && !p.open_endpoint);
        let p = predicted_index(0.5, &DataClass::L2).unwrap();
        assert!(p.value == 1.0 && p.open_endpoint);
        let p = predicted_index(0.75, &DataClass::L2).unwrap();
        assert!((p.value - 1.25).abs() <= 1e-15 && !p.open_endpoint);
        let p = predicted_index(0.75, &DataClass::Rough).unwrap();
        assert!((p.value - 1.25).abs() <= 1e-15 && !p.open_endpoint);
        let p = predicted_index(0.4, &DataClass::Intermediate { theta: 0.2, q: 2.0 })
            .unwrap();
        assert!((p.value - 0.6).abs() <= 1e-15 && !p.open_endpoint);
        let p = predicted_index(0.5, &DataClass::Intermediate { theta: 0.25, q: 1.0 })
            .unwrap();
        assert!((p.value - 0.75).abs() <= 1e-15 && p.open_endpoint);

        assert!(predicted_index(0.4, &DataClass::Rough).is_err());
        assert!(predicted_index(0.5, &DataClass::Rough).is_err());
        assert!(
            predicted_index(0.4, &DataClass::Intermediate { theta: 0.4, q: 2.0 }).is_err()
        );
        assert!(
            predicted_index(0.4, &DataClass::Intermediate { theta: 0.0, q: 2.0 }).is_err()
        );
        assert!(
            predicted_index(0.4, &DataClass::Intermediate { theta: 0.2, q: 0.5 }).is_err()
        );
        assert!(predicted_index(1.1, &DataClass::L2).is_err());

        // monotone in s for square-integrable data
        let mut prev = 0.0;
        for k in 1..=18 {
            let s = 0.05 * k as f64;
            let v = predicted_index(s, &DataClass::L2).unwrap().value;
            assert!(v >= prev, "s = {s}");
            prev = v;
        }
    }

    #[test]
    fn sweep_measures_the_shift_through_the_solver() {
        let cfg = SweepConfig {
            domain: Domain::interval_union(&[(-1.0, 1.0)]).unwrap(),
            s_values: alloc::vec![0.75, 0.25],
            cells: 512,
            data: ClosedForm::Const { c: 1.0 },
        };
        let rows = sweep_s(&cfg);
        assert_eq!(rows.len(), 2);
        assert!(rows[0].0 < rows[1].0, "rows sorted by order");
        for (s, row) in &rows {
            let row = row.as_ref().unwrap();
            assert!(
                (row.estimate.sigma_star - (s + 0.5)).abs() <= 0.05,
                "s = {s}: sigma_star = {}",
                row.estimate.sigma_star
            );
            assert!((row.predicted.value - (s + s.min(0.5))).abs() <= 1e-15);
            assert!(row.ratio.is_finite() && row.ratio > 0.0);
        }

        // empty grid → empty report
        let empty = SweepConfig {
            s_values: Vec::new(),
            ..cfg.clone()
        };
        assert!(sweep_s(&empty).is_empty());

        // bad rows fail individually and keep their error
        let bad = SweepConfig {
            s_values: alloc::vec![0.99],
            cells: 16,
            ..cfg.clone()
        };
        let rows = sweep_s(&bad);
        assert!(rows[0].1.is_err());
        let zero = SweepConfig {
            s_values: alloc::vec![0.5],
            cells: 16,
            data: ClosedForm::Const { c: 0.0 },
            ..cfg
        };
        assert!(sweep_s(&zero)[0].1.is_err());
    }
}
