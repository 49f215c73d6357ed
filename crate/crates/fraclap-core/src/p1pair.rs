//! Pair-energy quadrature for piecewise-linear data against the fractional
//! kernel |x − y|^{−1−2σ} in one dimension.
//!
//! The Gagliardo quadratic form of a continuous piecewise-linear function —
//! and every Galerkin stiffness entry built from hat functions — reduces to a
//! sum over cell pairs of integrals
//!
//! ```text
//! ∬_{A×B} (u(x) − u(y)) (w(x) − w(y)) |x − y|^{−1−2σ} dx dy,
//! ```
//!
//! with u, w affine on each cell. Three geometric regimes need different
//! treatment of the kernel singularity:
//!
//! * **same cell** (A = B): the difference quotient is the constant cell
//!   slope and the integral collapses to a closed form;
//! * **touching cells** (shared node): a Duffy-type change of variables makes
//!   the radial factor integrable in closed form on the near triangle and
//!   leaves analytic profiles for Gauss quadrature;
//! * **separated cells** (positive gap): the inner variable integrates in
//!   closed form (switching to a stable series when the gap dominates the
//!   cell) and the outer variable is handled by Gauss panels graded toward
//!   the gap.
//!
//! A [`UniformPairTable`] caches the distinct moment sets of an equispaced
//! cell chain, making quadratic-form evaluation O(n²) arithmetic with only
//! O(n) quadrature work. Piecewise-constant variants (`*_p0_*`) support
//! seminorms of cell-wise derivatives, and [`tail_product_moment`] supplies
//! the closed-form building block for interactions with regions where the
//! data vanishes identically.
//!
//! All routines are deterministic; unit tests pin every moment against
//! brute-force adaptive quadrature.

use alloc::vec::Vec;

use crate::quad;
use crate::{invalid, mth, Error, Result};

/// Gauss order for the smooth one-dimensional profiles left after the exact
/// radial integration of touching pairs.
const TOUCH_ORDER: usize = 24;
/// Gauss order per graded panel in the outer integral of separated pairs.
const SEP_ORDER: usize = 16;

/// ∬_{A×A} |x − y|^{1−2σ} dx dy over a single cell of length `len`.
///
/// Multiplying by the product of the two cell slopes gives the same-cell pair
/// energy: on one cell u(x) − u(y) = s_u·(x − y), so the slopes factor out of
/// the integral. The remaining integral is elementary. Requires σ < 1.
pub fn same_cell_factor(sigma: f64, len: f64) -> f64 {
    2.0 * mth::pow(len, 3.0 - 2.0 * sigma) / ((2.0 - 2.0 * sigma) * (3.0 - 2.0 * sigma))
}

/// Second-order moments of the kernel over two cells sharing a node.
///
/// With ξ ∈ [0, l_A] the distance into the left cell from the shared node and
/// η ∈ [0, l_B] the distance into the right cell, these are
/// J_mn = ∬ ξ^m η^n (ξ + η)^{−1−2σ} dξ dη for m + n = 2.
#[derive(Debug, Clone, Copy)]
pub struct TouchingMoments {
    pub j20: f64,
    pub j11: f64,
    pub j02: f64,
}

impl TouchingMoments {
    /// Pair energy ∬_{A×B} for data continuous at the shared node.
    ///
    /// `sa_*` are slopes on the left cell, `sb_*` slopes on the right cell;
    /// continuity makes the difference u(x) − u(y) = −(sa_u·ξ + sb_u·η).
    pub fn pair_energy(&self, sa_u: f64, sb_u: f64, sa_w: f64, sb_w: f64) -> f64 {
        sa_u * sa_w * self.j20 + (sa_u * sb_w + sb_u * sa_w) * self.j11 + sb_u * sb_w * self.j02
    }
}

/// Kernel moments for two cells separated by `gap` > 0.
///
/// With ξ ∈ [0, l_A] the distance from the right end of the left cell and
/// η ∈ [0, l_B] the distance from the left end of the right cell, these are
/// m_pq = ∬ ξ^p η^q (gap + ξ + η)^{−1−2σ} dξ dη for p + q ≤ 2.
#[derive(Debug, Clone, Copy)]
pub struct SeparatedMoments {
    pub m00: f64,
    pub m10: f64,
    pub m01: f64,
    pub m20: f64,
    pub m02: f64,
    pub m11: f64,
}

impl SeparatedMoments {
    /// Pair energy ∬_{A×B} for affine data on each cell.
    ///
    /// `du` is u(right end of A) − u(left end of B); `sa_u`/`sb_u` are the
    /// slopes of u on A and B (likewise for w). The difference then reads
    /// u(x) − u(y) = du − sa_u·ξ − sb_u·η.
    pub fn pair_energy(
        &self,
        du: f64,
        sa_u: f64,
        sb_u: f64,
        dw: f64,
        sa_w: f64,
        sb_w: f64,
    ) -> f64 {
        du * dw * self.m00 - (du * sa_w + dw * sa_u) * self.m10
            - (du * sb_w + dw * sb_u) * self.m01
            + sa_u * sa_w * self.m20
            + sb_u * sb_w * self.m02
            + (sa_u * sb_w + sb_u * sa_w) * self.m11
    }

    /// Specialization of [`Self::pair_energy`] to u = w.
    pub fn self_energy(&self, du: f64, sa: f64, sb: f64) -> f64 {
        du * du * self.m00 - 2.0 * du * (sa * self.m10 + sb * self.m01)
            + sa * sa * self.m20
            + sb * sb * self.m02
            + 2.0 * sa * sb * self.m11
    }
}

/// ∫₀^len η^q (c + η)^{−1−2σ} dη for q ∈ {0, 1, 2} and c > 0.
///
/// When the offset dominates the cell the binomial expansion of the shifted
/// power is summed instead of differencing antiderivatives, which would lose
/// roughly len/c in relative precision.
fn inner_moment(q: usize, sigma: f64, c: f64, len: f64) -> f64 {
    debug_assert!(q <= 2 && c > 0.0 && len > 0.0);
    let e = -1.0 - 2.0 * sigma;
    if c > 2.0 * len {
        // (c+η)^e = c^e Σ_k binom(e,k)(η/c)^k, integrated term by term; the
        // ratio len/c ≤ 1/2 makes the series converge geometrically.
        let scale = mth::pow(c, e) * mth::pow(len, q as f64 + 1.0);
        let mut coeff = 1.0;
        let mut ratio_pow = 1.0;
        let mut sum = 0.0;
        for k in 0..400u32 {
            let kf = f64::from(k);
            let term = coeff * ratio_pow / (q as f64 + kf + 1.0);
            sum += term;
            if k > 2 && mth::abs(term) <= 1e-17 * mth::abs(sum) {
                break;
            }
            coeff *= (e - kf) / (kf + 1.0);
            ratio_pow *= len / c;
        }
        scale * sum
    } else {
        let (a, b) = (c, c + len);
        match q {
            0 => mth::power_integral(e, a, b),
            1 => mth::power_integral(e + 1.0, a, b) - c * mth::power_integral(e, a, b),
            _ => {
                mth::power_integral(e + 2.0, a, b) - 2.0 * c * mth::power_integral(e + 1.0, a, b)
                    + c * c * mth::power_integral(e, a, b)
            }
        }
    }
}

/// Outer-integral panel boundaries over [0, la], doubling away from ξ = 0.
///
/// The integrand varies on the scale gap + ξ, so geometric panels keep a
/// fixed Gauss order accurate on every panel even when gap ≪ la.
fn graded_cuts(gap: f64, la: f64) -> Vec<f64> {
    let mut cuts = alloc::vec![0.0];
    if gap < 0.5 * la {
        let mut c = mth::fmax(gap, la * 1e-14);
        while c < 0.5 * la {
            cuts.push(c);
            c *= 2.0;
        }
    } else {
        cuts.push(0.5 * la);
    }
    cuts.push(la);
    cuts
}

/// Moments for cells of lengths `la`, `lb` separated by `gap` > 0.
pub fn separated_moments(sigma: f64, la: f64, lb: f64, gap: f64) -> SeparatedMoments {
    debug_assert!(gap > 0.0 && la > 0.0 && lb > 0.0);
    let rule = quad::gauss_legendre(SEP_ORDER);
    let cuts = graded_cuts(gap, la);
    let mut m = SeparatedMoments {
        m00: 0.0,
        m10: 0.0,
        m01: 0.0,
        m20: 0.0,
        m02: 0.0,
        m11: 0.0,
    };
    for panel in cuts.windows(2) {
        let half = 0.5 * (panel[1] - panel[0]);
        let mid = 0.5 * (panel[1] + panel[0]);
        for &(node, weight) in &rule {
            let xi = mid + half * node;
            let w = half * weight;
            let i0 = inner_moment(0, sigma, gap + xi, lb);
            let i1 = inner_moment(1, sigma, gap + xi, lb);
            let i2 = inner_moment(2, sigma, gap + xi, lb);
            m.m00 += w * i0;
            m.m10 += w * xi * i0;
            m.m20 += w * xi * xi * i0;
            m.m01 += w * i1;
            m.m11 += w * xi * i1;
            m.m02 += w * i2;
        }
    }
    m
}

/// Moments for cells of lengths `la`, `lb` sharing a node. Requires σ < 1.
pub fn touching_moments(sigma: f64, la: f64, lb: f64) -> TouchingMoments {
    debug_assert!(la > 0.0 && lb > 0.0);
    let rule = quad::gauss_legendre(TOUCH_ORDER);
    let mut j20 = 0.0;
    let mut j11 = 0.0;
    let mut j02 = 0.0;

    // Near triangle {ξ/la + η/lb ≤ 1}: substituting (ξ, η) = t·(la·w, lb(1−w))
    // with Jacobian la·lb·t turns the radial factor into t^{2−2σ}, whose
    // integral over [0, 1] is exactly 1/(3 − 2σ); the remaining w-profile is
    // analytic. Split at the corner direction ξ = η where it varies fastest.
    let radial = 1.0 / (3.0 - 2.0 * sigma);
    let wstar = lb / (la + lb);
    for panel in [[0.0, wstar], [wstar, 1.0]] {
        let half = 0.5 * (panel[1] - panel[0]);
        let mid = 0.5 * (panel[1] + panel[0]);
        for &(node, weight) in &rule {
            let w = mid + half * node;
            let u = la * w;
            let z = lb * (1.0 - w);
            let k = half * weight * radial * la * lb * mth::pow(u + z, -1.0 - 2.0 * sigma);
            j20 += k * u * u;
            j11 += k * u * z;
            j02 += k * z * z;
        }
    }

    // Far triangle with corners (la, 0), (la, lb), (0, lb): parametrized from
    // the outer corner as (ξ, η) = (la(1 − t·w), lb(1 − t(1−w))), Jacobian
    // la·lb·t. Here ξ + η ≥ min(la, lb), so the integrand is analytic and a
    // tensor Gauss rule suffices.
    for &(tn, tw) in &rule {
        let t = 0.5 * (tn + 1.0);
        for &(wn, ww) in &rule {
            let w = 0.5 * (wn + 1.0);
            let u = la * (1.0 - t * w);
            let z = lb * (1.0 - t * (1.0 - w));
            let k = 0.25 * tw * ww * la * lb * t * mth::pow(u + z, -1.0 - 2.0 * sigma);
            j20 += k * u * u;
            j11 += k * u * z;
            j02 += k * z * z;
        }
    }
    TouchingMoments { j20, j11, j02 }
}

/// ∬_{A×B} (ξ + η)^{−1−2σ} over touching cells, for piecewise-constant data.
///
/// This is the zeroth moment J₀₀, finite only for σ < 1/2 (for σ ≥ 1/2 the
/// jump across the shared node carries infinite energy).
pub fn touching_p0_moment(sigma: f64, la: f64, lb: f64) -> Result<f64> {
    if sigma >= 0.5 {
        return Err(Error::Unsupported(alloc::format!(
            "piecewise-constant pair energy diverges across shared nodes for sigma = {sigma} >= 0.5"
        )));
    }
    let e = -2.0 * sigma;
    Ok((mth::power_integral(e, 0.0, la) - mth::power_integral(e, lb, lb + la)) / (2.0 * sigma))
}

/// ∬_{A×B} (gap + ξ + η)^{−1−2σ} over separated cells (closed form).
pub fn separated_p0_moment(sigma: f64, la: f64, lb: f64, gap: f64) -> f64 {
    debug_assert!(gap > 0.0);
    let e = -2.0 * sigma;
    (mth::power_integral(e, gap, gap + la) - mth::power_integral(e, gap + lb, gap + lb + la))
        / (2.0 * sigma)
}

/// ∫_{t0}^{t1} (a0 + a1·t)(b0 + b1·t) · t^{−2σ} dt in closed form.
///
/// This is the building block for interactions between a cell and a region
/// where the data vanishes: after integrating the kernel over the empty
/// region, each complement endpoint contributes a ±(distance)^{−2σ}/(2σ)
/// weight against the product of two affine factors on the cell, and `t`
/// measures the distance to that endpoint. `t0 = 0` is admissible when the
/// corresponding affine factors vanish there (a0·b0 = 0) or σ < 1/2.
pub fn tail_product_moment(
    sigma: f64,
    t0: f64,
    t1: f64,
    a0: f64,
    a1: f64,
    b0: f64,
    b1: f64,
) -> f64 {
    let e = -2.0 * sigma;
    let mut acc = 0.0;
    let c0 = a0 * b0;
    if c0 != 0.0 {
        acc += c0 * mth::power_integral(e, t0, t1);
    }
    let c1 = a0 * b1 + a1 * b0;
    if c1 != 0.0 {
        acc += c1 * mth::power_integral(e + 1.0, t0, t1);
    }
    let c2 = a1 * b1;
    if c2 != 0.0 {
        acc += c2 * mth::power_integral(e + 2.0, t0, t1);
    }
    acc
}

/// Cached kernel moments for a chain of equispaced cells of width `delta`.
///
/// On a uniform chain the moment set of a cell pair depends only on the
/// index offset, so an O(n²) quadratic form needs just O(n) quadrature work.
#[derive(Debug, Clone)]
pub struct UniformPairTable {
    pub sigma: f64,
    pub delta: f64,
    /// Same-cell factor (multiply by the product of cell slopes).
    pub same: f64,
    /// Moments for adjacent cells (index offset 1).
    pub touching: TouchingMoments,
    /// Moments for offset k ≥ 2 stored at position k − 2 (gap (k−1)·delta).
    separated: Vec<SeparatedMoments>,
}

impl UniformPairTable {
    /// Builds moments for all index offsets up to `max_offset` (inclusive).
    pub fn new(sigma: f64, delta: f64, max_offset: usize) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(invalid!("pair table requires sigma in (0,1), got {sigma}"));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(invalid!("pair table requires positive spacing, got {delta}"));
        }
        let separated = (2..=max_offset.max(1))
            .map(|k| separated_moments(sigma, delta, delta, (k - 1) as f64 * delta))
            .collect();
        Ok(UniformPairTable {
            sigma,
            delta,
            same: same_cell_factor(sigma, delta),
            touching: touching_moments(sigma, delta, delta),
            separated,
        })
    }

    /// Moments for cell-index offset `k` ≥ 2.
    pub fn separated(&self, k: usize) -> &SeparatedMoments {
        &self.separated[k - 2]
    }

    /// Largest cached index offset.
    pub fn max_offset(&self) -> usize {
        self.separated.len() + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive;
    use crate::quad::adaptive_panels;

    /// Brute-force ∬ ξ^p η^q (gap + ξ + η)^{−1−2σ} by nested adaptive
    /// quadrature (smooth for gap > 0).
    fn brute_sep(p: i32, q: i32, sigma: f64, la: f64, lb: f64, gap: f64) -> f64 {
        adaptive(
            &|xi: f64| {
                let inner = adaptive(
                    &|eta: f64| {
                        xi.powi(p) * eta.powi(q) * (gap + xi + eta).powf(-1.0 - 2.0 * sigma)
                    },
                    0.0,
                    lb,
                    1e-13,
                    400_000,
                )
                .unwrap();
                inner.value
            },
            0.0,
            la,
            1e-11,
            400_000,
        )
        .unwrap()
        .value
    }

    /// Brute-force ∬ ξ^m η^n (ξ + η)^{−1−2σ} over [0,la]×[0,lb] with the
    /// singularity at the origin left to adaptive bisection.
    fn brute_touch(m: i32, n: i32, sigma: f64, la: f64, lb: f64) -> f64 {
        adaptive(
            &|xi: f64| {
                if xi == 0.0 {
                    return 0.0;
                }
                adaptive(
                    &|eta: f64| xi.powi(m) * eta.powi(n) * (xi + eta).powf(-1.0 - 2.0 * sigma),
                    0.0,
                    lb,
                    1e-13,
                    600_000,
                )
                .unwrap()
                .value
            },
            0.0,
            la,
            1e-10,
            600_000,
        )
        .unwrap()
        .value
    }

    #[test]
    fn same_cell_matches_semi_analytic_reference() {
        for (sigma, len) in [(0.25, 1.0), (0.5, 0.7), (0.9, 0.01)] {
            // inner integral ∫ |x−y|^{1−2σ} dy has the elementary form
            // (x^{2−2σ} + (l−x)^{2−2σ})/(2−2σ); integrate it adaptively in x
            let e = 2.0 - 2.0 * sigma;
            let oracle = adaptive(
                &|x: f64| (x.powf(e) + (len - x).powf(e)) / e,
                0.0,
                len,
                1e-14 * len.powf(3.0 - 2.0 * sigma),
                200_000,
            )
            .unwrap()
            .value;
            let got = same_cell_factor(sigma, len);
            assert!(
                (got - oracle).abs() <= 1e-11 * oracle,
                "sigma={sigma}, len={len}: {got} vs {oracle}"
            );
        }
    }

    #[test]
    fn touching_moments_match_brute_force() {
        for sigma in [0.25, 0.5, 0.9] {
            for (la, lb) in [(1.0, 1.0), (0.4, 1.3)] {
                let tm = touching_moments(sigma, la, lb);
                let cases = [(2, 0, tm.j20), (1, 1, tm.j11), (0, 2, tm.j02)];
                for (m, n, got) in cases {
                    let want = brute_touch(m, n, sigma, la, lb);
                    assert!(
                        (got - want).abs() <= 1e-7 * want.abs(),
                        "sigma={sigma}, la={la}, lb={lb}, J{m}{n}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn separated_moments_match_brute_force() {
        for sigma in [0.25, 0.5, 0.85] {
            for (la, lb, gap) in [(1.0, 1.0, 1e-3), (1.0, 1.0, 0.6), (0.3, 2.0, 7.0)] {
                let sm = separated_moments(sigma, la, lb, gap);
                let cases = [
                    (0, 0, sm.m00),
                    (1, 0, sm.m10),
                    (0, 1, sm.m01),
                    (2, 0, sm.m20),
                    (0, 2, sm.m02),
                    (1, 1, sm.m11),
                ];
                for (p, q, got) in cases {
                    let want = brute_sep(p, q, sigma, la, lb, gap);
                    assert!(
                        (got - want).abs() <= 1e-8 * want.abs(),
                        "sigma={sigma}, la={la}, lb={lb}, gap={gap}, m{p}{q}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn separated_moments_are_symmetric_and_homogeneous() {
        let (sigma, la, lb, gap) = (0.6, 0.8, 1.7, 0.35);
        let ab = separated_moments(sigma, la, lb, gap);
        let ba = separated_moments(sigma, lb, la, gap);
        assert!((ab.m00 - ba.m00).abs() <= 1e-13 * ab.m00);
        assert!((ab.m10 - ba.m01).abs() <= 1e-13 * ab.m10.abs());
        assert!((ab.m20 - ba.m02).abs() <= 1e-13 * ab.m20.abs());
        assert!((ab.m11 - ba.m11).abs() <= 1e-13 * ab.m11.abs());

        // scaling all lengths by λ multiplies m_pq by λ^{p+q+1−2σ}
        let lam = 0.01;
        let scaled = separated_moments(sigma, lam * la, lam * lb, lam * gap);
        for (pq, big, small) in [
            (0.0, ab.m00, scaled.m00),
            (1.0, ab.m10, scaled.m10),
            (2.0, ab.m20, scaled.m20),
            (2.0, ab.m11, scaled.m11),
        ] {
            let factor = lam.powf(pq + 1.0 - 2.0 * sigma);
            assert!(
                (small - big * factor).abs() <= 1e-11 * (big * factor).abs(),
                "p+q={pq}"
            );
        }
    }

    #[test]
    fn p0_moments_match_brute_force() {
        for sigma in [0.3, 0.45] {
            let got = touching_p0_moment(sigma, 0.9, 1.4).unwrap();
            let want = brute_touch(0, 0, sigma, 0.9, 1.4);
            assert!((got - want).abs() <= 1e-8 * want, "{got} vs {want}");
        }
        assert!(touching_p0_moment(0.5, 1.0, 1.0).is_err());

        let got = separated_p0_moment(0.7, 0.9, 1.4, 0.25);
        let want = brute_sep(0, 0, 0.7, 0.9, 1.4, 0.25);
        assert!((got - want).abs() <= 1e-9 * want, "{got} vs {want}");
    }

    #[test]
    fn inner_moment_series_and_closed_form_agree_at_the_switch() {
        for sigma in [0.15, 0.5, 0.95] {
            for q in 0..3usize {
                // straddle the c = 2·len branch point
                for c_over_len in [1.9, 2.1] {
                    let len = 0.3;
                    let c = c_over_len * len;
                    let got = inner_moment(q, sigma, c, len);
                    let want = adaptive(
                        &|eta: f64| eta.powi(q as i32) * (c + eta).powf(-1.0 - 2.0 * sigma),
                        0.0,
                        len,
                        1e-16,
                        200_000,
                    )
                    .unwrap()
                    .value;
                    assert!(
                        (got - want).abs() <= 1e-12 * want,
                        "sigma={sigma}, q={q}, c/len={c_over_len}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn tail_product_moment_matches_quadrature() {
        let (sigma, t0, t1) = (0.75, 0.2, 1.1);
        let (a0, a1, b0, b1) = (0.3, -1.2, 0.8, 0.5);
        let got = tail_product_moment(sigma, t0, t1, a0, a1, b0, b1);
        let want = adaptive(
            &|t: f64| (a0 + a1 * t) * (b0 + b1 * t) * t.powf(-2.0 * sigma),
            t0,
            t1,
            1e-14,
            100_000,
        )
        .unwrap()
        .value;
        assert!((got - want).abs() <= 1e-12 * want.abs(), "{got} vs {want}");

        // vanishing affine factors make t0 = 0 admissible for every σ
        let got = tail_product_moment(0.9, 0.0, 1.0, 0.0, 1.0, 0.0, 2.0);
        // ∫₀¹ 2t²·t^{−1.8} dt = 2/1.2
        assert!((got - 2.0 / 1.2).abs() <= 1e-13);
    }

    #[test]
    fn uniform_table_replays_direct_calls() {
        let table = UniformPairTable::new(0.35, 0.125, 6).unwrap();
        assert_eq!(table.max_offset(), 6);
        assert!((table.same - same_cell_factor(0.35, 0.125)).abs() == 0.0);
        for k in 2..=6usize {
            let direct = separated_moments(0.35, 0.125, 0.125, (k - 1) as f64 * 0.125);
            let cached = table.separated(k);
            assert_eq!(cached.m00, direct.m00);
            assert_eq!(cached.m11, direct.m11);
        }
        assert!(UniformPairTable::new(1.2, 0.1, 4).is_err());
        assert!(UniformPairTable::new(0.5, -0.1, 4).is_err());
    }

    #[test]
    fn assembled_quadratic_form_matches_brute_double_integral() {
        // continuous piecewise-linear v on 8 cells over [0,1]; compare the
        // cell-pair accumulation against the full double integral
        let nodal = [0.0, 0.4, -0.3, 0.9, 1.1, -0.2, 0.5, 0.0, 0.3];
        let n_cells = nodal.len() - 1;
        let delta = 1.0 / n_cells as f64;

        for sigma in [0.4, 0.6] {
            let table = UniformPairTable::new(sigma, delta, n_cells).unwrap();
            let slope: Vec<f64> = (0..n_cells)
                .map(|i| (nodal[i + 1] - nodal[i]) / delta)
                .collect();
            let mut total = 0.0;
            for i in 0..n_cells {
                total += slope[i] * slope[i] * table.same;
                for j in i + 1..n_cells {
                    let contrib = if j == i + 1 {
                        table.touching.pair_energy(slope[i], slope[j], slope[i], slope[j])
                    } else {
                        let du = nodal[i + 1] - nodal[j];
                        table.separated(j - i).self_energy(du, slope[i], slope[j])
                    };
                    total += 2.0 * contrib;
                }
            }

            let interp = |x: f64| -> f64 {
                let cell = ((x / delta) as usize).min(n_cells - 1);
                nodal[cell] + slope[cell] * (x - cell as f64 * delta)
            };
            let cell_edges: Vec<f64> = (0..=n_cells).map(|k| k as f64 * delta).collect();
            let brute = adaptive_panels(
                &|x: f64| {
                    let mut cuts = cell_edges.clone();
                    cuts.push(x);
                    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    adaptive_panels(
                        &|y: f64| {
                            if y == x {
                                return 0.0;
                            }
                            let d = interp(x) - interp(y);
                            d * d * (x - y).abs().powf(-1.0 - 2.0 * sigma)
                        },
                        &cuts,
                        1e-10,
                        2_000_000,
                    )
                    .unwrap()
                    .value
                },
                &cell_edges,
                1e-7,
                4_000_000,
            )
            .unwrap()
            .value;
            assert!(
                (total - brute).abs() <= 1e-5 * brute,
                "sigma={sigma}: {total} vs {brute}"
            );
        }
    }
}
