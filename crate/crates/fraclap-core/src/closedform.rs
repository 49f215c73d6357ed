//! Registry of closed-form functions used as exact references and test
//! batteries: the explicit ball solution with unit right-hand side, power
//! ramps, smooth bumps, constants and polynomials.
//!
//! Descriptors are plain strings (`"getoor:1,0.5,1"`, `"power:1"`, `"bump"`,
//! `"const:2"`, `"poly:0,1,-3"`) so the same families are addressable from
//! the CLI and from file metadata.

use crate::error::{Error, Result};
use crate::fracop;
use crate::geometry::norm;
use crate::mth;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// A closed-form function on ℝ^d.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    /// `κ(d,s)·(r² − |x|²)₊^s`: the exact solution of the fractional
    /// Dirichlet problem with right-hand side one on the ball of radius `r`.
    Getoor { d: usize, s: f64, r: f64 },
    /// `x₊^α` in the first coordinate.
    Power { alpha: f64 },
    /// `exp(1 − 1/(1 − |x|²))` inside the unit ball, zero outside.
    Bump,
    /// Constant.
    Const { c: f64 },
    /// `Σ c_k x^k` in the first coordinate.
    Poly { coeffs: Vec<f64> },
}

impl ClosedForm {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ClosedForm::Getoor { d, s, r } => {
                debug_assert_eq!(x.len(), *d);
                let q = r * r - x.iter().map(|v| v * v).sum::<f64>();
                if q <= 0.0 {
                    0.0
                } else {
                    fracop::getoor_kappa(*d, *s) * mth::pow(q, *s)
                }
            }
            ClosedForm::Power { alpha } => {
                let t = x[0];
                if t <= 0.0 {
                    0.0
                } else {
                    mth::pow(t, *alpha)
                }
            }
            ClosedForm::Bump => {
                let q = 1.0 - x.iter().map(|v| v * v).sum::<f64>();
                if q <= 0.0 {
                    0.0
                } else {
                    mth::exp(1.0 - 1.0 / q)
                }
            }
            ClosedForm::Const { c } => *c,
            ClosedForm::Poly { coeffs } => {
                let t = x[0];
                let mut acc = 0.0;
                for &c in coeffs.iter().rev() {
                    acc = acc * t + c;
                }
                acc
            }
        }
    }

    /// Radius `R` with `f(x) = 0` for `|x| ≥ R`, when the function has
    /// compact support.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            ClosedForm::Getoor { r, .. } => Some(*r),
            ClosedForm::Bump => Some(1.0),
            ClosedForm::Const { c } if *c == 0.0 => Some(0.0),
            _ => None,
        }
    }

    /// Parse a descriptor string.
    pub fn parse(desc: &str) -> Result<Self> {
        let (head, args) = match desc.split_once(':') {
            Some((h, a)) => (h, a),
            None => (desc, ""),
        };
        let nums = || -> Result<Vec<f64>> {
            args.split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::BadDescriptor(format!("bad number `{s}` in `{desc}`")))
                })
                .collect()
        };
        match head {
            "getoor" => {
                let v = nums()?;
                if v.len() != 3 {
                    return Err(Error::BadDescriptor(format!(
                        "`getoor` needs d,s,r — got `{desc}`"
                    )));
                }
                let d = v[0] as usize;
                if v[0] != d as f64 || d == 0 || d > 3 {
                    return Err(Error::BadDescriptor(format!(
                        "`getoor` dimension must be 1, 2 or 3 — got `{desc}`"
                    )));
                }
                if !(v[1] > 0.0 && v[1] < 1.0) || !(v[2] > 0.0) {
                    return Err(Error::BadDescriptor(format!(
                        "`getoor` needs s ∈ (0,1) and r > 0 — got `{desc}`"
                    )));
                }
                Ok(ClosedForm::Getoor {
                    d,
                    s: v[1],
                    r: v[2],
                })
            }
            "power" => {
                let v = nums()?;
                if v.len() != 1 || !(v[0] > 0.0) {
                    return Err(Error::BadDescriptor(format!(
                        "`power` needs one positive exponent — got `{desc}`"
                    )));
                }
                Ok(ClosedForm::Power { alpha: v[0] })
            }
            "bump" => Ok(ClosedForm::Bump),
            "const" => {
                let v = nums()?;
                if v.len() != 1 {
                    return Err(Error::BadDescriptor(format!(
                        "`const` needs one value — got `{desc}`"
                    )));
                }
                Ok(ClosedForm::Const { c: v[0] })
            }
            "poly" => {
                let v = nums()?;
                if v.is_empty() {
                    return Err(Error::BadDescriptor(format!(
                        "`poly` needs coefficients — got `{desc}`"
                    )));
                }
                Ok(ClosedForm::Poly { coeffs: v })
            }
            _ => Err(Error::BadDescriptor(format!("unknown family `{head}`"))),
        }
    }

    /// Canonical descriptor string (round-trips through [`ClosedForm::parse`]).
    pub fn descriptor(&self) -> String {
        match self {
            ClosedForm::Getoor { d, s, r } => format!("getoor:{d},{s},{r}"),
            ClosedForm::Power { alpha } => format!("power:{alpha}"),
            ClosedForm::Bump => "bump".to_string(),
            ClosedForm::Const { c } => format!("const:{c}"),
            ClosedForm::Poly { coeffs } => {
                let mut out = String::from("poly:");
                for (i, c) in coeffs.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&format!("{c}"));
                }
                out
            }
        }
    }

    /// Quick check used by pointwise evaluation: |f| at |x| = R for large R.
    pub fn decays(&self) -> bool {
        self.support_radius().is_some() || matches!(self, ClosedForm::Const { .. })
    }
}

/// Convenience: evaluate at a 1D point.
pub fn eval1(f: &ClosedForm, x: f64) -> f64 {
    f.eval(&[x])
}

/// Max |f| on the sphere of radius `t` around `x` along a fixed direction
/// sample — cheap upper-bound helper for truncation reporting.
pub fn sup_on_sphere(f: &ClosedForm, x: &[f64], t: f64) -> f64 {
    let d = x.len();
    if d == 1 {
        mth::fmax(
            mth::abs(f.eval(&[x[0] + t])),
            mth::abs(f.eval(&[x[0] - t])),
        )
    } else {
        let mut m = 0.0;
        let k = 32;
        for j in 0..k {
            let ang = 2.0 * core::f64::consts::PI * j as f64 / k as f64;
            let mut y = x.to_vec();
            y[0] += t * mth::cos(ang);
            y[1] += t * mth::sin(ang);
            m = mth::fmax(m, mth::abs(f.eval(&y)));
        }
        m
    }
}

/// Euclidean magnitude of the point (re-exported geometry helper).
pub fn point_norm(x: &[f64]) -> f64 {
    norm(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for d in [
            "getoor:1,0.5,1",
            "power:1",
            "bump",
            "const:2",
            "poly:0,1,-3",
        ] {
            let f = ClosedForm::parse(d).unwrap();
            let f2 = ClosedForm::parse(&f.descriptor()).unwrap();
            assert_eq!(f, f2, "{d}");
        }
        assert!(ClosedForm::parse("getoor:0.5,0.5,1").is_err());
        assert!(ClosedForm::parse("power:-1").is_err());
        assert!(ClosedForm::parse("mystery:1").is_err());
        assert!(ClosedForm::parse("const:a").is_err());
    }

    #[test]
    fn eval_basics() {
        let p = ClosedForm::parse("power:1").unwrap();
        assert_eq!(eval1(&p, -0.5), 0.0);
        assert_eq!(eval1(&p, 0.25), 0.25);

        let poly = ClosedForm::parse("poly:1,0,2").unwrap(); // 1 + 2x²
        assert!(mth::abs(eval1(&poly, 3.0) - 19.0) < 1e-14);

        let b = ClosedForm::Bump;
        assert_eq!(b.eval(&[1.0]), 0.0);
        assert!(mth::abs(b.eval(&[0.0]) - 1.0) < 1e-15);

        // the ball solution at the origin for d=1, s=1/2, r=1 equals 1
        let g = ClosedForm::parse("getoor:1,0.5,1").unwrap();
        assert!(mth::abs(eval1(&g, 0.0) - 1.0) < 1e-12);
        assert_eq!(eval1(&g, 1.5), 0.0);
    }
}
