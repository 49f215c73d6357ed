//! On-disk formats: JSON for grid functions and solve reports, CSV for
//! modulus profiles, rate estimates, sweeps, K-profiles and ratio tables.
//!
//! Numbers are written with Rust's shortest round-trip formatting and
//! structures in declaration order, so a given value always serializes to
//! the same bytes.

use fraclap_core::besov::KProfile;
use fraclap_core::geometry::Domain;
use fraclap_core::gridfn::{Grid, GridFunction, ModulusProfile};
use fraclap_core::harness::{RateEstimate, SweepRow};
use fraclap_core::solver1d::SolveReport;
use serde::{Deserialize, Serialize};

/// JSON image of a uniform grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridJson {
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub shape: Vec<usize>,
}

/// JSON image of a domain, tagged by kind.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainJson {
    IntervalUnion { intervals: Vec<(f64, f64)> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl DomainJson {
    pub fn from_core(d: &Domain) -> Self {
        match d {
            Domain::IntervalUnion { intervals } => DomainJson::IntervalUnion {
                intervals: intervals.clone(),
            },
            Domain::Ball { center, radius } => DomainJson::Ball {
                center: center.clone(),
                radius: *radius,
            },
        }
    }

    pub fn to_core(&self) -> Result<Domain, String> {
        match self {
            DomainJson::IntervalUnion { intervals } => {
                Domain::interval_union(intervals).map_err(|e| e.to_string())
            }
            DomainJson::Ball { center, radius } => {
                Domain::ball(center, *radius).map_err(|e| e.to_string())
            }
        }
    }
}

/// Free-form provenance carried beside the samples.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Meta {
    /// Whether nodal values vanish outside the domain.
    pub zero_extended: bool,
    /// Descriptor of the data or sampled function, e.g. `const:1`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub f: Option<String>,
    /// Operator order used to produce the samples, when applicable.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub s: Option<f64>,
    /// Mesh cells per interval used to produce the samples.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cells: Option<usize>,
}

/// JSON image of a sampled grid function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridFunctionJson {
    pub grid: GridJson,
    /// Nodal values in row-major order.
    pub values: Vec<f64>,
    pub domain: DomainJson,
    pub meta: Meta,
}

impl GridFunctionJson {
    pub fn from_core(v: &GridFunction, meta: Meta) -> Self {
        GridFunctionJson {
            grid: GridJson {
                origin: v.grid.origin.clone(),
                spacing: v.grid.spacing,
                shape: v.grid.shape.clone(),
            },
            values: v.values.clone(),
            domain: DomainJson::from_core(&v.domain),
            meta,
        }
    }

    pub fn to_core(&self) -> Result<GridFunction, String> {
        let grid = Grid::new(&self.grid.origin, self.grid.spacing, &self.grid.shape)
            .map_err(|e| e.to_string())?;
        let domain = self.domain.to_core()?;
        GridFunction::new(grid, self.values.clone(), domain, self.meta.zero_extended)
            .map_err(|e| e.to_string())
    }
}

/// JSON image of the solve diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReportJson {
    pub energy: f64,
    pub load_pairing: f64,
    pub stability_gap: f64,
    pub l2: f64,
    pub cond_est: f64,
}

impl SolveReportJson {
    pub fn from_core(r: &SolveReport) -> Self {
        SolveReportJson {
            energy: r.energy,
            load_pairing: r.load_pairing,
            stability_gap: r.stability_gap,
            l2: r.l2,
            cond_est: r.cond_est,
        }
    }
}

/// One named two-sided comparison: `pass` iff the suite's bound held.
#[derive(Debug, Clone)]
pub struct RatioRow {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// Pretty JSON with a trailing newline.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable value");
    bytes.push(b'\n');
    bytes
}

/// CSV of a modulus profile: `order,h,omega,restriction`.
pub fn profile_csv(p: &ModulusProfile) -> String {
    let mut out = String::from("order,h,omega,restriction\n");
    for &(h, w) in &p.rows {
        out.push_str(&format!("{},{},{},{}\n", p.order, h, w, p.restriction.tag()));
    }
    out
}

/// CSV of a rate estimate evaluated at the requested indices:
/// `sigma,sigma_star,ci_low,ci_high,r2,verdict`.
pub fn rates_csv(est: &RateEstimate, sigmas: &[f64]) -> String {
    let mut out = String::from("sigma,sigma_star,ci_low,ci_high,r2,verdict\n");
    for &sigma in sigmas {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            sigma,
            est.sigma_star,
            est.slope_ci.0,
            est.slope_ci.1,
            est.r2,
            est.bounded_verdict(sigma).tag()
        ));
    }
    out
}

/// CSV of an order sweep:
/// `s,sigma_star,ci_low,ci_high,r2,predicted,open_endpoint,R`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("s,sigma_star,ci_low,ci_high,r2,predicted,open_endpoint,R\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.s,
            row.estimate.sigma_star,
            row.estimate.slope_ci.0,
            row.estimate.slope_ci.1,
            row.estimate.r2,
            row.predicted.value,
            row.predicted.open_endpoint,
            row.ratio
        ));
    }
    out
}

/// CSV of a K-functional profile: `t,K`.
pub fn kprofile_csv(kp: &KProfile) -> String {
    let mut out = String::from("t,K\n");
    for (t, k) in kp.ts.iter().zip(&kp.ks) {
        out.push_str(&format!("{t},{k}\n"));
    }
    out
}

/// CSV of a ratio table: `name,lhs,rhs,ratio`.
pub fn ratio_csv(rows: &[RatioRow]) -> String {
    let mut out = String::from("name,lhs,rhs,ratio\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.name, row.lhs, row.rhs, row.ratio
        ));
    }
    out
}
