//! Galerkin solver for the homogeneous Dirichlet problem of the fractional
//! operator on a union of intervals, with continuous piecewise-linear
//! elements vanishing on the boundary and extended by zero outside.
//!
//! The stiffness entries and the full-space Gagliardo seminorm share one set
//! of cell-pair primitives, so discrete energies computed by either route
//! agree to round-off; the functional identity
//! F(v) − F(u_h) = ½·a(v − u_h, v − u_h) then holds exactly for any
//! discrete v, which the tests exercise with random perturbations.
//!
//! Within an interval the mesh is uniform and pair moments depend only on
//! the index offset, so assembly needs O(cells) quadrature and O(cells²)
//! arithmetic; cross-interval pairs get individual moments.

use alloc::vec::Vec;

use crate::closedform::ClosedForm;
use crate::fracop::{exterior_tail, normalization_constant, FracParams};
use crate::geometry::Domain;
use crate::gridfn::{Grid, GridFunction};
use crate::linalg::{condition_estimate, dot, Cholesky, SymMatrix};
use crate::{invalid, mth, p1pair, quad, Error, Result};

/// A conforming partition of an interval union into cells, uniform within
/// each interval. Nodes at interval endpoints carry no degree of freedom.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub domain: Domain,
    intervals: Vec<(f64, f64)>,
    /// cells per interval
    counts: Vec<usize>,
    /// spacing per interval
    spacings: Vec<f64>,
    /// positions of the interior (degree-of-freedom) nodes, in order
    dofs: Vec<f64>,
}

/// One cell with its global basis support: `node_l`/`node_r` are indices
/// into the degree-of-freedom list, `None` on the boundary.
struct Cell {
    left: f64,
    len: f64,
    dof_l: Option<usize>,
    dof_r: Option<usize>,
}

impl Mesh {
    /// Partition each interval of the domain into the given number of cells.
    pub fn new(domain: &Domain, cells_per_interval: &[usize]) -> Result<Self> {
        let intervals = match domain {
            Domain::IntervalUnion { intervals } => intervals.clone(),
            Domain::Ball { .. } => {
                return Err(Error::Unsupported(alloc::string::String::from(
                    "the solver meshes interval unions",
                )))
            }
        };
        if cells_per_interval.len() != intervals.len() {
            return Err(invalid!(
                "need one cell count per interval ({} intervals, {} counts)",
                intervals.len(),
                cells_per_interval.len()
            ));
        }
        if cells_per_interval.iter().any(|&m| m < 2) {
            return Err(invalid!(
                "each interval needs at least two cells for an interior node"
            ));
        }
        let mut spacings = Vec::with_capacity(intervals.len());
        let mut dofs = Vec::new();
        for (&(a, b), &m) in intervals.iter().zip(cells_per_interval) {
            let h = (b - a) / m as f64;
            spacings.push(h);
            for i in 1..m {
                dofs.push(a + i as f64 * h);
            }
        }
        Ok(Mesh {
            domain: domain.clone(),
            intervals,
            counts: cells_per_interval.to_vec(),
            spacings,
            dofs,
        })
    }

    /// Same cell count in every interval.
    pub fn uniform(domain: &Domain, cells: usize) -> Result<Self> {
        let m = match domain {
            Domain::IntervalUnion { intervals } => intervals.len(),
            _ => 1,
        };
        Mesh::new(domain, &alloc::vec![cells; m])
    }

    /// Positions of the interior nodes, one per degree of freedom.
    pub fn interior_dofs(&self) -> &[f64] {
        &self.dofs
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn spacings(&self) -> &[f64] {
        &self.spacings
    }

    fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        let mut dof = 0usize;
        for (j, &(a, _)) in self.intervals.iter().enumerate() {
            let m = self.counts[j];
            let h = self.spacings[j];
            for i in 0..m {
                let dof_l = if i == 0 { None } else { Some(dof + i - 1) };
                let dof_r = if i == m - 1 { None } else { Some(dof + i) };
                out.push(Cell {
                    left: a + i as f64 * h,
                    len: h,
                    dof_l,
                    dof_r,
                });
            }
            dof += m - 1;
        }
        out
    }

    /// Value of the discrete solution with the given coefficients at `x`
    /// (zero outside the domain and on the boundary).
    pub fn eval(&self, dofs: &[f64], x: f64) -> f64 {
        assert_eq!(dofs.len(), self.dofs.len());
        let mut base = 0usize;
        for (j, &(a, b)) in self.intervals.iter().enumerate() {
            let m = self.counts[j];
            if x >= a && x <= b {
                let h = self.spacings[j];
                let mut i = ((x - a) / h) as usize;
                if i >= m {
                    i = m - 1;
                }
                let val = |k: usize| -> f64 {
                    if k == 0 || k == m {
                        0.0
                    } else {
                        dofs[base + k - 1]
                    }
                };
                let t = (x - (a + i as f64 * h)) / h;
                return (1.0 - t) * val(i) + t * val(i + 1);
            }
            base += m - 1;
        }
        0.0
    }
}

/// Accumulates `weight · uᵀ(local)w` for a 4×4 local block over the values
/// (aL, aR, bL, bR), scattering only the entries whose nodes carry dofs.
fn scatter(
    a: &mut SymMatrix,
    ids: &[Option<usize>; 4],
    local: &[[f64; 4]; 4],
    weight: f64,
) {
    for (p, &gi) in ids.iter().enumerate() {
        let Some(i) = gi else { continue };
        for (q, &gj) in ids.iter().enumerate() {
            let Some(j) = gj else { continue };
            let v = a.get(i, j) + weight * local[p][q];
            a.set(i, j, v);
        }
    }
}

/// local = Gᵀ M G for K intermediate coordinates.
fn congruence<const K: usize>(g: &[[f64; 4]; K], m: &[[f64; K]; K]) -> [[f64; 4]; 4] {
    let mut local = [[0.0; 4]; 4];
    for k in 0..K {
        for l in 0..K {
            let mkl = m[k][l];
            if mkl == 0.0 {
                continue;
            }
            for p in 0..4 {
                let gkp = g[k][p];
                if gkp == 0.0 {
                    continue;
                }
                for q in 0..4 {
                    local[p][q] += gkp * mkl * g[l][q];
                }
            }
        }
    }
    local
}

fn local_touching(m: &p1pair::TouchingMoments, la: f64, lb: f64) -> [[f64; 4]; 4] {
    // coordinates (slope on A, slope on B) over (aL, aR, bL, bR)
    let g = [
        [-1.0 / la, 1.0 / la, 0.0, 0.0],
        [0.0, 0.0, -1.0 / lb, 1.0 / lb],
    ];
    let mm = [[m.j20, m.j11], [m.j11, m.j02]];
    congruence(&g, &mm)
}

fn local_separated(m: &p1pair::SeparatedMoments, la: f64, lb: f64) -> [[f64; 4]; 4] {
    // coordinates (du, slope on A, slope on B) over (aL, aR, bL, bR)
    let g = [
        [0.0, 1.0, -1.0, 0.0],
        [-1.0 / la, 1.0 / la, 0.0, 0.0],
        [0.0, 0.0, -1.0 / lb, 1.0 / lb],
    ];
    let mm = [
        [m.m00, -m.m10, -m.m01],
        [-m.m10, m.m20, m.m11],
        [-m.m01, m.m11, m.m02],
    ];
    congruence(&g, &mm)
}

fn assemble_parts(mesh: &Mesh, s: f64) -> Result<(SymMatrix, f64)> {
    let c_half = 0.5 * normalization_constant(1, s)?;
    let cells = mesh.cells();
    let n = mesh.dofs.len();
    let mut a = SymMatrix::zeros(n);

    // per-interval uniform tables: moments depend only on the index offset
    let tables: Vec<p1pair::UniformPairTable> = mesh
        .spacings
        .iter()
        .zip(&mesh.counts)
        .map(|(&h, &m)| p1pair::UniformPairTable::new(s, h, m - 1))
        .collect::<Result<_>>()?;

    // interval id of each cell, and its index within the interval
    let mut owner = Vec::with_capacity(cells.len());
    for (j, &m) in mesh.counts.iter().enumerate() {
        for i in 0..m {
            owner.push((j, i));
        }
    }

    for (ca, cell_a) in cells.iter().enumerate() {
        let ids_a = [cell_a.dof_l, cell_a.dof_r];
        // same-cell block
        {
            let f = tables[owner[ca].0].same;
            let inv = 1.0 / cell_a.len;
            let local2 = [[f * inv * inv, -f * inv * inv], [-f * inv * inv, f * inv * inv]];
            let ids = [cell_a.dof_l, cell_a.dof_r, None, None];
            let mut local = [[0.0; 4]; 4];
            for p in 0..2 {
                for q in 0..2 {
                    local[p][q] = local2[p][q];
                }
            }
            scatter(&mut a, &ids, &local, 1.0);
        }
        for (cb, cell_b) in cells.iter().enumerate().skip(ca + 1) {
            let ids = [ids_a[0], ids_a[1], cell_b.dof_l, cell_b.dof_r];
            let (ja, ia) = owner[ca];
            let (jb, ib) = owner[cb];
            let local = if ja == jb {
                let offset = ib - ia;
                if offset == 1 {
                    local_touching(&tables[ja].touching, cell_a.len, cell_b.len)
                } else {
                    local_separated(tables[ja].separated(offset), cell_a.len, cell_b.len)
                }
            } else {
                let gap = cell_b.left - (cell_a.left + cell_a.len);
                let m = p1pair::separated_moments(s, cell_a.len, cell_b.len, gap);
                local_separated(&m, cell_a.len, cell_b.len)
            };
            // unordered pair visited once: both orders of the double integral
            scatter(&mut a, &ids, &local, 2.0);
        }
        // interactions with the zero extension outside the domain
        let inv = 1.0 / cell_a.len;
        let bases = [(1.0, -inv), (0.0, inv)];
        let cell_span = (cell_a.left, cell_a.left + cell_a.len);
        let mut local = [[0.0; 4]; 4];
        for p in 0..2 {
            for q in 0..2 {
                local[p][q] =
                    exterior_tail(s, &mesh.intervals, cell_span, bases[p], bases[q]);
            }
        }
        let ids = [cell_a.dof_l, cell_a.dof_r, None, None];
        scatter(&mut a, &ids, &local, 2.0);
    }

    for v in a.data.iter_mut() {
        *v *= c_half;
    }
    let defect = a.symmetry_defect();
    let mut scale = 0.0f64;
    for i in 0..n {
        scale = mth::fmax(scale, mth::abs(a.get(i, i)));
    }
    if n > 0 && !(defect <= 1e-12 * scale) {
        return Err(Error::LinearSolve(alloc::format!(
            "assembled stiffness is asymmetric: defect {defect:.3e} vs scale {scale:.3e}"
        )));
    }
    Ok((a, defect))
}

/// Stiffness matrix of the bilinear form ½C(1,s)·⟨(−Δ)^{s/2}·, (−Δ)^{s/2}·⟩
/// restricted to the mesh's zero-boundary piecewise-linear space.
pub fn assemble_stiffness(mesh: &Mesh, s: f64) -> Result<SymMatrix> {
    Ok(assemble_parts(mesh, s)?.0)
}

/// Load vector b_i = ∫ f·φ_i with a fifth-order Gauss rule per cell.
pub fn assemble_load(mesh: &Mesh, f: &ClosedForm) -> Result<Vec<f64>> {
    let mut b = alloc::vec![0.0; mesh.dofs.len()];
    let rule = quad::gauss_legendre(5);
    for cell in mesh.cells() {
        let (x0, l) = (cell.left, cell.len);
        for &(node, weight) in &rule {
            let t = 0.5 * (node + 1.0); // map to [0,1]
            let x = x0 + t * l;
            let w = weight * 0.5 * l;
            let fx = f.eval(&[x]);
            if let Some(i) = cell.dof_l {
                b[i] += w * fx * (1.0 - t);
            }
            if let Some(i) = cell.dof_r {
                b[i] += w * fx * t;
            }
        }
    }
    Ok(b)
}

/// Diagnostics of a discrete solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Coefficients of the solution on the interior nodes.
    pub dof_values: Vec<f64>,
    /// uᵀA u — twice the quadratic part of the energy at the solution.
    pub energy: f64,
    /// bᵀu — the load pairing; equals `energy` up to solver round-off.
    pub load_pairing: f64,
    /// |energy − load_pairing|.
    pub stability_gap: f64,
    /// L² norm of the solution (exact piecewise-linear mass).
    pub l2: f64,
    /// One-norm condition estimate of the stiffness matrix.
    pub cond_est: f64,
    /// Measured max |A_ij − A_ji| before factorization.
    pub symmetry_defect: f64,
}

/// Assembles and solves the Dirichlet problem, returning the solution
/// resampled onto a uniform grid spanning the domain's bounding interval
/// (piecewise-linear interpolation, zero extension outside the domain).
pub fn solve_dirichlet(
    mesh: &Mesh,
    f: &ClosedForm,
    params: &FracParams,
) -> Result<(GridFunction, SolveReport)> {
    if params.d != 1 {
        return Err(Error::Unsupported(alloc::string::String::from(
            "the mesh solver is one-dimensional",
        )));
    }
    let (a, symmetry_defect) = assemble_parts(mesh, params.s)?;
    let b = assemble_load(mesh, f)?;
    let chol = Cholesky::factor(&a)?;
    let u = chol.solve(&b);

    let energy = a.quad_form(&u);
    let load_pairing = dot(&b, &u);
    let stability_gap = mth::abs(energy - load_pairing);
    let cond_est = condition_estimate(&a, &chol);

    // exact piecewise-linear mass over the mesh cells
    let mut mass = 0.0;
    for cell in mesh.cells() {
        let vl = cell.dof_l.map_or(0.0, |i| u[i]);
        let vr = cell.dof_r.map_or(0.0, |i| u[i]);
        mass += cell.len * (vl * vl + vl * vr + vr * vr) / 3.0;
    }
    let l2 = mth::sqrt(mass);

    // resample onto the uniform output grid
    let lo = mesh.intervals[0].0;
    let hi = mesh.intervals.last().expect("nonempty").1;
    let h_min = mesh
        .spacings
        .iter()
        .fold(f64::INFINITY, |acc, &h| mth::fmin(acc, h));
    let m_out = mth::round((hi - lo) / h_min) as usize;
    let grid = Grid::line(lo, hi, m_out + 1)?;
    let mut values = Vec::with_capacity(m_out + 1);
    for i in 0..=m_out {
        let x = lo + (hi - lo) * i as f64 / m_out as f64;
        values.push(mesh.eval(&u, x));
    }
    let gf = GridFunction::new(grid, values, mesh.domain.clone(), true)?;

    Ok((
        gf,
        SolveReport {
            dof_values: u,
            energy,
            load_pairing,
            stability_gap,
            l2,
            cond_est,
            symmetry_defect,
        },
    ))
}

/// L²(Ω) distance between the discrete solution and a reference closed form,
/// by a fifth-order Gauss rule per mesh cell.
pub fn l2_error(mesh: &Mesh, dofs: &[f64], exact: &ClosedForm) -> f64 {
    let rule = quad::gauss_legendre(5);
    let mut acc = 0.0;
    for cell in mesh.cells() {
        for &(node, weight) in &rule {
            let t = 0.5 * (node + 1.0);
            let x = cell.left + t * cell.len;
            let d = mesh.eval(dofs, x) - exact.eval(&[x]);
            acc += weight * 0.5 * cell.len * d * d;
        }
    }
    mth::sqrt(acc)
}
