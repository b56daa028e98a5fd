//! Parent-Hamiltonian machinery for PEPS site tensors.
//!
//! A region of the lattice induces a linear map chi from boundary virtual
//! configurations to physical vectors; the canonical parent term of a pair
//! of adjacent plaquettes is the orthogonal projector onto the complement of
//! the image of that map, so its kernel is exactly the image. The module
//! also materialises the diagonal tiling terms for domination checks, tests
//! the image-decomposition identity of direct-sum/tensor-product composed
//! tensors, and builds the composed gap-construction pair term.
//!
//! All spectral computations run in floating point with explicit tolerances;
//! subspace ranks use a relative singular-value cutoff.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::hamiltonian::{bulk_term_diagonal, Orientation};
use crate::tensor::{direct_sum, tensor_product, LegLabel, Tensor};
use crate::tiling::TileSet;

/// Relative singular-value / eigenvalue cutoff for all subspace decisions.
pub const RANK_TOL: f64 = 1e-10;
/// Hermiticity tolerance enforced on every [`OperatorMatrix`].
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Idempotence tolerance for projector-flagged operators.
pub const PROJECTOR_TOL: f64 = 1e-10;
/// Default refusal threshold on operator dimensions.
pub const DEFAULT_OP_BUDGET: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum ParentError {
    NotSquare { rows: usize, cols: usize },
    NotHermitian { max_asymmetry: f64 },
    DimensionMismatch { a: usize, b: usize },
    BudgetExceeded { required: usize, budget: usize },
    MissingLeg(LegLabel),
    NotUnitH1 { dim: usize },
}

impl core::fmt::Display for ParentError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ParentError::NotSquare { rows, cols } => write!(f, "operator is {rows}x{cols}"),
            ParentError::NotHermitian { max_asymmetry } => {
                write!(f, "operator asymmetry {max_asymmetry} exceeds tolerance")
            }
            ParentError::DimensionMismatch { a, b } => {
                write!(f, "operator dimensions {a} and {b} differ")
            }
            ParentError::BudgetExceeded { required, budget } => {
                write!(f, "operator dimension {required} exceeds the budget of {budget}")
            }
            ParentError::MissingLeg(l) => write!(f, "site tensor lacks leg {l:?}"),
            ParentError::NotUnitH1 { dim } => {
                write!(f, "the composed construction needs dim H1 = 1, got {dim}")
            }
        }
    }
}

/// A rectangular, hence connected, region of plaquettes. Its boundary legs
/// are the virtual legs crossing the region's rim, enumerated bottom
/// (left to right), top, left (bottom to top), right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    rows: usize,
    cols: usize,
}

impl Region {
    pub fn new(rows: usize, cols: usize) -> Option<Self> {
        (rows > 0 && cols > 0).then_some(Region { rows, cols })
    }

    /// Two plaquettes sharing a vertical edge.
    pub fn horizontal_pair() -> Self {
        Region { rows: 1, cols: 2 }
    }

    /// Two plaquettes sharing a horizontal edge.
    pub fn vertical_pair() -> Self {
        Region { rows: 2, cols: 1 }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn sites(&self) -> usize {
        self.rows * self.cols
    }

    pub fn boundary_leg_count(&self) -> usize {
        2 * (self.rows + self.cols)
    }

    /// Boundary legs in canonical order as (row, col, label).
    fn boundary_legs(&self) -> Vec<(usize, usize, LegLabel)> {
        let mut legs = Vec::with_capacity(self.boundary_leg_count());
        for col in 0..self.cols {
            legs.push((0, col, LegLabel::Down));
        }
        for col in 0..self.cols {
            legs.push((self.rows - 1, col, LegLabel::Up));
        }
        for row in 0..self.rows {
            legs.push((row, 0, LegLabel::Left));
        }
        for row in 0..self.rows {
            legs.push((row, self.cols - 1, LegLabel::Right));
        }
        legs
    }
}

/// A dense Hermitian operator over the physical space of a region.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    mat: DMatrix<f64>,
}

impl OperatorMatrix {
    pub fn new(mat: DMatrix<f64>) -> Result<Self, ParentError> {
        if mat.nrows() != mat.ncols() {
            return Err(ParentError::NotSquare { rows: mat.nrows(), cols: mat.ncols() });
        }
        let mut max_asymmetry = 0.0_f64;
        for i in 0..mat.nrows() {
            for j in 0..i {
                max_asymmetry = max_asymmetry.max((mat[(i, j)] - mat[(j, i)]).abs());
            }
        }
        if max_asymmetry > HERMITICITY_TOL {
            return Err(ParentError::NotHermitian { max_asymmetry });
        }
        Ok(OperatorMatrix { mat })
    }

    pub fn identity(dim: usize) -> Self {
        OperatorMatrix { mat: DMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        OperatorMatrix { mat: DMatrix::zeros(dim, dim) }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        OperatorMatrix { mat: DMatrix::from_diagonal(&DVector::from_row_slice(diag)) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Max-norm idempotence check: is `h^2 = h` within `tol`?
    pub fn is_projector(&self, tol: f64) -> bool {
        let sq = &self.mat * &self.mat;
        (sq - &self.mat).amax() <= tol
    }

    /// Orthonormal basis of the kernel: eigenvectors whose eigenvalue is
    /// below `tol` relative to the spectral radius (floored at 1).
    pub fn kernel_basis(&self, tol: f64) -> DMatrix<f64> {
        let (values, vectors) = symmetric_eigen(&self.mat);
        let scale = values.amax().max(1.0);
        let keep: Vec<usize> =
            (0..self.dim()).filter(|&i| values[i].abs() <= tol * scale).collect();
        let mut basis = DMatrix::zeros(self.dim(), keep.len());
        for (k, &i) in keep.iter().enumerate() {
            basis.set_column(k, &vectors.column(i));
        }
        basis
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let (values, _) = symmetric_eigen(&self.mat);
        values.min()
    }
}

/// Symmetric eigendecomposition by Householder tridiagonalisation followed
/// by implicit-shift QL, after EISPACK's `tred2`/`tql2`. nalgebra's
/// `symmetric_eigen` can fail to converge on differences of projectors,
/// reporting non-finite eigenvalues, so the decomposition is done here.
/// Eigenvalues come back ascending with matching eigenvector columns.
fn symmetric_eigen(mat: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = mat.nrows();
    let mut v = mat.clone();
    let mut d = DVector::zeros(n);
    let mut e = DVector::zeros(n);
    if n == 0 {
        return (d, v);
    }

    // Householder reduction to tridiagonal form.
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let f = d[i - 1];
            let mut g = libm::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }
            for j in 0..i {
                let f = d[j];
                v[(j, i)] = f;
                let mut g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    // Accumulate the Householder transformations.
    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;

    // Implicit-shift QL iteration on the tridiagonal form.
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0_f64;
    let mut tst1 = 0.0_f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for i in l + 2..n {
                    d[i] -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0_f64;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0_f64;
                let mut s2 = 0.0_f64;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let h = v[(k, i + 1)];
                        v[(k, i + 1)] = s * v[(k, i)] + c * h;
                        v[(k, i)] = c * v[(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Sort eigenvalues ascending, carrying the eigenvectors along.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for j in i + 1..n {
            if d[j] < p {
                k = j;
                p = d[j];
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            v.swap_columns(i, k);
        }
    }
    (d, v)
}

/// Open legs of the region contraction performed by [`chi_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RegionSlot {
    /// Physical leg of a site, row-major site index.
    Phys(usize),
    /// Boundary virtual leg, index into the canonical boundary-leg order.
    Boundary(usize),
    /// Interior frontier: the up leg awaiting the site above.
    Up(usize),
    /// Interior frontier: the right leg awaiting the next site in the row.
    Right,
}

/// The boundary-to-physical map of a region tiled with copies of `a`:
/// column `C` holds the physical vector obtained by contracting the region
/// with its boundary legs pinned to the configuration `C` (mixed-radix over
/// the canonical boundary-leg order, first leg most significant). Rows run
/// over physical configurations in row-major site order.
pub fn chi_matrix(
    a: &Tensor<f64>,
    region: &Region,
    budget: usize,
) -> Result<DMatrix<f64>, ParentError> {
    for label in [LegLabel::Up, LegLabel::Down, LegLabel::Left, LegLabel::Right, LegLabel::Phys] {
        if a.leg_pos(label).is_none() {
            return Err(ParentError::MissingLeg(label));
        }
    }
    let d = a.leg_dim(LegLabel::Phys).unwrap();
    let phys_dim = d
        .checked_pow(region.sites() as u32)
        .ok_or(ParentError::BudgetExceeded { required: usize::MAX, budget })?;
    if phys_dim > budget {
        return Err(ParentError::BudgetExceeded { required: phys_dim, budget });
    }
    let boundary_legs = region.boundary_legs();
    let leg_dims: Vec<usize> =
        boundary_legs.iter().map(|(_, _, label)| a.leg_dim(*label).unwrap()).collect();
    let boundary_dim = leg_dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).ok_or(
        ParentError::BudgetExceeded { required: usize::MAX, budget },
    )?;
    let entry_budget = budget.saturating_mul(budget);
    let entries = phys_dim
        .checked_mul(boundary_dim)
        .ok_or(ParentError::BudgetExceeded { required: usize::MAX, budget })?;
    if entries > entry_budget {
        return Err(ParentError::BudgetExceeded { required: entries, budget: entry_budget });
    }

    // Contract the region in one row-major sweep, keeping physical and
    // boundary legs open.
    let (rows, cols) = (region.rows, region.cols);
    let mut slots: Vec<RegionSlot> = Vec::new();
    let mut dims: Vec<usize> = Vec::new();
    let mut data: Vec<f64> = vec![1.0];
    let a_dims: Vec<usize> = a.legs().iter().map(|(_, d)| *d).collect();
    for row in 0..rows {
        for col in 0..cols {
            let site = row * cols + col;
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            let mut free: Vec<(usize, RegionSlot)> = Vec::new();
            for (leg, (label, _)) in a.legs().iter().enumerate() {
                let slot = match label {
                    LegLabel::Phys => RegionSlot::Phys(site),
                    LegLabel::Down => {
                        if row == 0 {
                            RegionSlot::Boundary(col)
                        } else {
                            let p = slots
                                .iter()
                                .position(|s| *s == RegionSlot::Up(col))
                                .expect("frontier up slot present");
                            pairs.push((p, leg));
                            continue;
                        }
                    }
                    LegLabel::Left => {
                        if col == 0 {
                            RegionSlot::Boundary(2 * cols + row)
                        } else {
                            let p = slots
                                .iter()
                                .position(|s| *s == RegionSlot::Right)
                                .expect("frontier right slot present");
                            pairs.push((p, leg));
                            continue;
                        }
                    }
                    LegLabel::Up => {
                        if row == rows - 1 {
                            RegionSlot::Boundary(cols + col)
                        } else {
                            RegionSlot::Up(col)
                        }
                    }
                    LegLabel::Right => {
                        if col == cols - 1 {
                            RegionSlot::Boundary(2 * cols + rows + row)
                        } else {
                            RegionSlot::Right
                        }
                    }
                };
                free.push((leg, slot));
            }
            free.sort_by_key(|(leg, _)| *leg);
            let kept: Vec<RegionSlot> = (0..slots.len())
                .filter(|i| !pairs.iter().any(|(x, _)| x == i))
                .map(|i| slots[i])
                .collect();
            let (new_dims, new_data) = crate::tensor::contract_raw(&dims, &data, &a_dims, a.data(), &pairs);
            if new_data.len() > entry_budget {
                return Err(ParentError::BudgetExceeded { required: new_data.len(), budget: entry_budget });
            }
            slots = kept;
            slots.extend(free.iter().map(|(_, s)| *s));
            dims = new_dims;
            data = new_data;
        }
    }

    // Permute into (phys site-major, boundary canonical) order and reshape.
    let n = slots.len();
    debug_assert_eq!(n, region.sites() + boundary_legs.len());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| match slots[i] {
        RegionSlot::Phys(site) => site,
        RegionSlot::Boundary(k) => region.sites() + k,
        _ => unreachable!("interior slot left open"),
    });
    let str_in = {
        let mut s = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * dims[i + 1];
        }
        s
    };
    let out_dims: Vec<usize> = order.iter().map(|&i| dims[i]).collect();
    let mut chi = DMatrix::zeros(phys_dim, boundary_dim);
    let mut index = vec![0usize; n];
    for flat_out in 0..data.len() {
        let mut rem = flat_out;
        for (k, dd) in out_dims.iter().enumerate().rev() {
            index[k] = rem % dd;
            rem /= dd;
        }
        let mut flat_in = 0;
        for (k, &src) in order.iter().enumerate() {
            flat_in += index[k] * str_in[src];
        }
        chi[(flat_out / boundary_dim, flat_out % boundary_dim)] = data[flat_in];
    }
    Ok(chi)
}

/// Orthonormal basis of the column space of `m`; singular values at most
/// `tol` times the largest are treated as zero.
pub fn image_basis(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    if m.is_empty() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sigma_max = svd.singular_values.amax();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol * sigma_max && svd.singular_values[i] > 0.0)
        .collect();
    let mut basis = DMatrix::zeros(m.nrows(), keep.len());
    for (k, &i) in keep.iter().enumerate() {
        basis.set_column(k, &u.column(i));
    }
    basis
}

/// Does every column of `sub` lie in the span of the orthonormal columns of
/// `space`, within `tol` on the max norm of the residual?
pub fn contained_in(sub: &DMatrix<f64>, space: &DMatrix<f64>, tol: f64) -> bool {
    debug_assert_eq!(sub.nrows(), space.nrows());
    for j in 0..sub.ncols() {
        let v = sub.column(j);
        let residual = &v - space * (space.transpose() * &v);
        if residual.amax() > tol {
            return false;
        }
    }
    true
}

/// The canonical parent term of a region: `1 - P` where `P` projects onto
/// the image of [`chi_matrix`]. By construction its kernel is that image.
pub fn parent_term(
    a: &Tensor<f64>,
    region: &Region,
    budget: usize,
) -> Result<OperatorMatrix, ParentError> {
    let chi = chi_matrix(a, region, budget)?;
    let basis = image_basis(&chi, RANK_TOL);
    let dim = chi.nrows();
    let h = DMatrix::identity(dim, dim) - &basis * basis.transpose();
    let op = OperatorMatrix::new(h)?;
    debug_assert!(op.is_projector(PROJECTOR_TOL));
    Ok(op)
}

/// Kernel-equals-image check: `Ker h = Im chi(a, region)` as subspaces,
/// by mutual containment within [`RANK_TOL`].
pub fn check_parent_property(
    h: &OperatorMatrix,
    a: &Tensor<f64>,
    region: &Region,
    budget: usize,
) -> Result<bool, ParentError> {
    let chi = chi_matrix(a, region, budget)?;
    if chi.nrows() != h.dim() {
        return Err(ParentError::DimensionMismatch { a: h.dim(), b: chi.nrows() });
    }
    let image = image_basis(&chi, RANK_TOL);
    let kernel = h.kernel_basis(RANK_TOL);
    Ok(contained_in(&image, &kernel, RANK_TOL) && contained_in(&kernel, &image, RANK_TOL))
}

/// `h1 >= h2` in the PSD order: the minimum eigenvalue of `h1 - h2` is at
/// least `-`[`RANK_TOL`].
pub fn dominates(h1: &OperatorMatrix, h2: &OperatorMatrix) -> Result<bool, ParentError> {
    if h1.dim() != h2.dim() {
        return Err(ParentError::DimensionMismatch { a: h1.dim(), b: h2.dim() });
    }
    let diff = OperatorMatrix::new(h1.matrix() - h2.matrix())?;
    Ok(diff.min_eigenvalue() >= -RANK_TOL)
}

/// Dense materialisation of a tiling bulk term as a diagonal 0/1 operator
/// over the pair space `(Gamma^4)^2`, for domination checks against parent
/// terms.
pub fn bulk_term_operator(
    ts: &TileSet,
    orientation: Orientation,
    budget: usize,
) -> Result<OperatorMatrix, ParentError> {
    let dim = ts
        .num_colors()
        .checked_pow(8)
        .ok_or(ParentError::BudgetExceeded { required: usize::MAX, budget })?;
    if dim > budget {
        return Err(ParentError::BudgetExceeded { required: dim, budget });
    }
    let diag: Vec<f64> =
        bulk_term_diagonal(ts, orientation).into_iter().map(|e| e as f64).collect();
    Ok(OperatorMatrix::from_diagonal(&diag))
}

/// Embeds a vector over the pure-`H1` physical configurations of a region
/// into the composed space `(H1 + H2*HG)^sites` (the `H1` block occupies the
/// first `d1` indices of every site).
fn embed_h1_block(v: &DVector<f64>, d1: usize, d: usize, sites: usize) -> DVector<f64> {
    let mut out = DVector::zeros(d.pow(sites as u32));
    for flat in 0..v.len() {
        if v[flat] == 0.0 {
            continue;
        }
        let mut rem = flat;
        let mut target = 0usize;
        let mut digits = vec![0usize; sites];
        for k in (0..sites).rev() {
            digits[k] = rem % d1;
            rem /= d1;
        }
        for &digit in &digits {
            target = target * d + digit;
        }
        out[target] = v[flat];
    }
    out
}

/// Embeds the product of a pure-`H2` vector and a pure-`HG` vector into the
/// composed space: site index `d1 + z*dg + g`.
fn embed_zt_block(
    z: &DVector<f64>,
    g: &DVector<f64>,
    d1: usize,
    d2: usize,
    dg: usize,
    sites: usize,
) -> DVector<f64> {
    let d = d1 + d2 * dg;
    let mut out = DVector::zeros(d.pow(sites as u32));
    for zf in 0..z.len() {
        if z[zf] == 0.0 {
            continue;
        }
        let mut zrem = zf;
        let mut zdig = vec![0usize; sites];
        for k in (0..sites).rev() {
            zdig[k] = zrem % d2;
            zrem /= d2;
        }
        for gf in 0..g.len() {
            if g[gf] == 0.0 {
                continue;
            }
            let mut grem = gf;
            let mut target = 0usize;
            let mut gdig = vec![0usize; sites];
            for k in (0..sites).rev() {
                gdig[k] = grem % dg;
                grem /= dg;
            }
            for k in 0..sites {
                target = target * d + (d1 + zdig[k] * dg + gdig[k]);
            }
            out[target] = z[zf] * g[gf];
        }
    }
    out
}

fn image_decomposition_holds(
    composed: &Tensor<f64>,
    a_g: &Tensor<f64>,
    a_z: &Tensor<f64>,
    a_t: &Tensor<f64>,
    region: &Region,
    budget: usize,
) -> Result<bool, ParentError> {
    let lhs = image_basis(&chi_matrix(composed, region, budget)?, RANK_TOL);
    let b_g = image_basis(&chi_matrix(a_g, region, budget)?, RANK_TOL);
    let b_z = image_basis(&chi_matrix(a_z, region, budget)?, RANK_TOL);
    let b_t = image_basis(&chi_matrix(a_t, region, budget)?, RANK_TOL);
    let d1 = a_g.leg_dim(LegLabel::Phys).unwrap();
    let d2 = a_z.leg_dim(LegLabel::Phys).unwrap();
    let dg = a_t.leg_dim(LegLabel::Phys).unwrap();
    let d = d1 + d2 * dg;
    let sites = region.sites();
    let dim = d.pow(sites as u32);
    // Right-hand side: embedded Im chi(A_G) plus the blockwise tensor
    // product of Im chi(A_Z) and Im chi(A_T). The two parts are orthogonal
    // (they live on disjoint pure-block configurations), so stacking
    // orthonormal columns keeps the basis orthonormal.
    let mut rhs = DMatrix::zeros(dim, b_g.ncols() + b_z.ncols() * b_t.ncols());
    let mut col = 0;
    for j in 0..b_g.ncols() {
        rhs.set_column(col, &embed_h1_block(&b_g.column(j).into_owned(), d1, d, sites));
        col += 1;
    }
    for jz in 0..b_z.ncols() {
        for jt in 0..b_t.ncols() {
            rhs.set_column(
                col,
                &embed_zt_block(
                    &b_z.column(jz).into_owned(),
                    &b_t.column(jt).into_owned(),
                    d1,
                    d2,
                    dg,
                    sites,
                ),
            );
            col += 1;
        }
    }
    if lhs.nrows() != dim {
        return Err(ParentError::DimensionMismatch { a: lhs.nrows(), b: dim });
    }
    Ok(contained_in(&lhs, &rhs, RANK_TOL) && contained_in(&rhs, &lhs, RANK_TOL))
}

/// The image-decomposition identity of composed tensors:
/// `Im chi(A_G + A_Z*A_T, R) = Im chi(A_G, R) (+) Im chi(A_Z, R) (x)
/// Im chi(A_T, R)`, with the direct-sum embedding following the physical
/// block structure of the composed site space.
pub fn check_image_decomposition(
    a_g: &Tensor<f64>,
    a_z: &Tensor<f64>,
    a_t: &Tensor<f64>,
    region: &Region,
    budget: usize,
) -> Result<bool, ParentError> {
    let zt = tensor_product(a_z, a_t)
        .map_err(|_| ParentError::DimensionMismatch { a: a_z.legs().len(), b: a_t.legs().len() })?;
    let composed = direct_sum(a_g, &zt)
        .map_err(|_| ParentError::DimensionMismatch { a: a_g.legs().len(), b: zt.legs().len() })?;
    image_decomposition_holds(&composed, a_g, a_z, a_t, region, budget)
}

/// The composed pair term of the gap construction on the local space
/// `H1 + H2*HG` with `dim H1 = 1`:
///
/// `|0><0|_p (x) 1^ZT_p' + 1^ZT_p (x) |0><0|_p' + hZ (x) 1^T + 1^Z (x) hT`,
///
/// where `1^ZT` is the projector onto the `H2*HG` block and the last two
/// terms act within the block pair space. A sum of PSD terms, hence PSD.
pub fn compose_gap_term(
    hz: &OperatorMatrix,
    ht: &OperatorMatrix,
    dims: (usize, usize, usize),
) -> Result<OperatorMatrix, ParentError> {
    let (d1, d2, dg) = dims;
    if d1 != 1 {
        return Err(ParentError::NotUnitH1 { dim: d1 });
    }
    if hz.dim() != d2 * d2 {
        return Err(ParentError::DimensionMismatch { a: hz.dim(), b: d2 * d2 });
    }
    if ht.dim() != dg * dg {
        return Err(ParentError::DimensionMismatch { a: ht.dim(), b: dg * dg });
    }
    let d = d1 + d2 * dg;
    let dim = d * d;
    let mut m = DMatrix::zeros(dim, dim);
    // Cross penalties: |0><0| on one site, the ZT-block projector on the
    // other.
    for j in d1..d {
        m[(j, j)] += 1.0; // site p at |0> (index 0), site p' in the block
        m[(j * d, j * d)] += 1.0; // mirrored
    }
    // hZ (x) 1^T and 1^Z (x) hT on the block pair space.
    let site = |z: usize, g: usize| d1 + z * dg + g;
    for z1 in 0..d2 {
        for z2 in 0..d2 {
            for z1p in 0..d2 {
                for z2p in 0..d2 {
                    let w = hz.matrix()[(z1 * d2 + z2, z1p * d2 + z2p)];
                    if w == 0.0 {
                        continue;
                    }
                    for g1 in 0..dg {
                        for g2 in 0..dg {
                            let row = site(z1, g1) * d + site(z2, g2);
                            let colidx = site(z1p, g1) * d + site(z2p, g2);
                            m[(row, colidx)] += w;
                        }
                    }
                }
            }
        }
    }
    for g1 in 0..dg {
        for g2 in 0..dg {
            for g1p in 0..dg {
                for g2p in 0..dg {
                    let w = ht.matrix()[(g1 * dg + g2, g1p * dg + g2p)];
                    if w == 0.0 {
                        continue;
                    }
                    for z1 in 0..d2 {
                        for z2 in 0..d2 {
                            let row = site(z1, g1) * d + site(z2, g2);
                            let colidx = site(z1, g1p) * d + site(z2, g2p);
                            m[(row, colidx)] += w;
                        }
                    }
                }
            }
        }
    }
    OperatorMatrix::new(m)
}
