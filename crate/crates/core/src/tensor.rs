//! PEPS tensors built from tile sets and their exact contraction.
//!
//! The bulk tensor of a tile set places amplitude 1 on every configuration
//! whose virtual colours form a tile and whose physical index repeats them;
//! patching copies of it over a lattice yields the uniform superposition of
//! all valid tilings. Contraction is always exact: the double-layer norm is
//! computed cell by cell along a row boundary without truncation, in either
//! big-integer or floating-point entries, and a size guard refuses lattices
//! whose boundary would outgrow the configured budget rather than
//! approximating.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::tiling::{BTInstance, TileSet, DOWN, LEFT, RIGHT, UP};

/// Entry arithmetic shared by the exact-integer and floating-point modes.
/// Modes are never mixed within one contraction.
pub trait Entry: Clone + PartialEq + Zero + One {
    fn mul_ref(&self, other: &Self) -> Self;
}

impl Entry for f64 {
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

impl Entry for BigInt {
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

/// Leg labels of a PEPS site tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LegLabel {
    Up,
    Down,
    Left,
    Right,
    Phys,
}

pub const VIRTUAL_LABELS: [LegLabel; 4] = [LegLabel::Up, LegLabel::Down, LegLabel::Left, LegLabel::Right];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TensorError {
    DuplicateLeg(LegLabel),
    EntryCount { expected: usize, got: usize },
    MissingLeg(LegLabel),
    LegMismatch,
    DimensionMismatch { label: LegLabel, a: usize, b: usize },
}

impl core::fmt::Display for TensorError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TensorError::DuplicateLeg(l) => write!(f, "duplicate leg label {l:?}"),
            TensorError::EntryCount { expected, got } => {
                write!(f, "expected {expected} entries, got {got}")
            }
            TensorError::MissingLeg(l) => write!(f, "tensor lacks required leg {l:?}"),
            TensorError::LegMismatch => write!(f, "operands carry different leg label sets"),
            TensorError::DimensionMismatch { label, a, b } => {
                write!(f, "leg {label:?} has dimension {a} on one side and {b} on the other")
            }
        }
    }
}

/// A dense labelled multiarray. Entries are stored row-major in leg order.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<T> {
    legs: Vec<(LegLabel, usize)>,
    data: Vec<T>,
}

impl<T: Entry> Tensor<T> {
    pub fn new(legs: Vec<(LegLabel, usize)>, data: Vec<T>) -> Result<Self, TensorError> {
        for (i, (label, _)) in legs.iter().enumerate() {
            if legs[..i].iter().any(|(l, _)| l == label) {
                return Err(TensorError::DuplicateLeg(*label));
            }
        }
        let expected: usize = legs.iter().map(|(_, d)| d).product();
        if data.len() != expected {
            return Err(TensorError::EntryCount { expected, got: data.len() });
        }
        Ok(Tensor { legs, data })
    }

    pub fn zeros(legs: Vec<(LegLabel, usize)>) -> Self {
        let n: usize = legs.iter().map(|(_, d)| d).product();
        Tensor { legs, data: vec![T::zero(); n] }
    }

    pub fn legs(&self) -> &[(LegLabel, usize)] {
        &self.legs
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn leg_pos(&self, label: LegLabel) -> Option<usize> {
        self.legs.iter().position(|(l, _)| *l == label)
    }

    pub fn leg_dim(&self, label: LegLabel) -> Option<usize> {
        self.legs.iter().find(|(l, _)| *l == label).map(|(_, d)| *d)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    fn dims(&self) -> Vec<usize> {
        self.legs.iter().map(|(_, d)| *d).collect()
    }

    /// Entry at the given multi-index (in leg order).
    pub fn at(&self, index: &[usize]) -> &T {
        let mut flat = 0;
        for ((_, d), &i) in self.legs.iter().zip(index) {
            debug_assert!(i < *d);
            flat = flat * d + i;
        }
        &self.data[flat]
    }

    pub fn at_mut(&mut self, index: &[usize]) -> &mut T {
        let mut flat = 0;
        for ((_, d), &i) in self.legs.iter().zip(index) {
            debug_assert!(i < *d);
            flat = flat * d + i;
        }
        &mut self.data[flat]
    }

    /// Fixes one leg to a given index and removes it; the remaining legs
    /// keep their order (a row-major slice).
    pub fn pin(&self, label: LegLabel, index: usize) -> Tensor<T> {
        let p = self.leg_pos(label).expect("pinned leg must exist");
        let dims = self.dims();
        assert!(index < dims[p], "pinned index out of range");
        let str = strides(&dims);
        let legs: Vec<(LegLabel, usize)> =
            self.legs.iter().enumerate().filter(|(i, _)| *i != p).map(|(_, l)| *l).collect();
        let mut data = Vec::with_capacity(self.data.len() / dims[p]);
        for (flat, e) in self.data.iter().enumerate() {
            if (flat / str[p]) % dims[p] == index {
                data.push(e.clone());
            }
        }
        Tensor { legs, data }
    }

    /// Renames legs in place; the data layout is untouched.
    pub fn relabel(&mut self, map: &[(LegLabel, LegLabel)]) {
        for (label, _) in self.legs.iter_mut() {
            if let Some((_, to)) = map.iter().find(|(from, _)| from == label) {
                *label = *to;
            }
        }
    }
}

impl Tensor<BigInt> {
    pub fn to_f64(&self) -> Tensor<f64> {
        use num_traits::ToPrimitive;
        Tensor {
            legs: self.legs.clone(),
            data: self.data.iter().map(|e| e.to_f64().expect("entry out of f64 range")).collect(),
        }
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Offsets into a flat array for every multi-index over the given legs.
fn offset_table(dims: &[usize], strides: &[usize], legs: &[usize]) -> Vec<usize> {
    let mut offsets = vec![0usize];
    for &leg in legs {
        let mut next = Vec::with_capacity(offsets.len() * dims[leg]);
        for &base in &offsets {
            for i in 0..dims[leg] {
                next.push(base + i * strides[leg]);
            }
        }
        offsets = next;
    }
    offsets
}

/// Dense pairwise contraction over the given leg pairs. Result dims are the
/// free legs of `a` (in order) followed by the free legs of `b`.
pub fn contract_raw<T: Entry>(
    a_dims: &[usize],
    a: &[T],
    b_dims: &[usize],
    b: &[T],
    pairs: &[(usize, usize)],
) -> (Vec<usize>, Vec<T>) {
    let a_str = strides(a_dims);
    let b_str = strides(b_dims);
    let a_free: Vec<usize> = (0..a_dims.len()).filter(|i| !pairs.iter().any(|(x, _)| x == i)).collect();
    let b_free: Vec<usize> = (0..b_dims.len()).filter(|i| !pairs.iter().any(|(_, y)| y == i)).collect();
    for &(x, y) in pairs {
        assert_eq!(a_dims[x], b_dims[y], "contracted legs must agree on dimension");
    }
    let a_free_off = offset_table(a_dims, &a_str, &a_free);
    let b_free_off = offset_table(b_dims, &b_str, &b_free);
    let k_legs_a: Vec<usize> = pairs.iter().map(|(x, _)| *x).collect();
    let k_legs_b: Vec<usize> = pairs.iter().map(|(_, y)| *y).collect();
    let a_k_off = offset_table(a_dims, &a_str, &k_legs_a);
    let b_k_off = offset_table(b_dims, &b_str, &k_legs_b);

    let mut out_dims: Vec<usize> = a_free.iter().map(|&i| a_dims[i]).collect();
    out_dims.extend(b_free.iter().map(|&i| b_dims[i]));
    let mut out = Vec::with_capacity(a_free_off.len() * b_free_off.len());
    for &ao in &a_free_off {
        for &bo in &b_free_off {
            let mut acc = T::zero();
            for (&ak, &bk) in a_k_off.iter().zip(&b_k_off) {
                let lhs = &a[ao + ak];
                let rhs = &b[bo + bk];
                if !lhs.is_zero() && !rhs.is_zero() {
                    acc = acc + lhs.mul_ref(rhs);
                }
            }
            out.push(acc);
        }
    }
    (out_dims, out)
}

/// The bulk tensor of Eq.-(4) form: virtual legs of dimension |Gamma|, a
/// physical leg of dimension |Gamma|^4, and amplitude 1 exactly when the
/// virtual colours `(u, d, l, r)` form a tile and the physical index is
/// their lexicographic code.
pub fn bulk_tensor(ts: &TileSet) -> Tensor<BigInt> {
    let g = ts.num_colors();
    let phys = g.checked_pow(4).expect("physical dimension overflow");
    let legs = vec![
        (LegLabel::Up, g),
        (LegLabel::Down, g),
        (LegLabel::Left, g),
        (LegLabel::Right, g),
        (LegLabel::Phys, phys),
    ];
    let mut t = Tensor::zeros(legs);
    for tile in ts.tiles() {
        let s = ((tile[UP] * g + tile[DOWN]) * g + tile[LEFT]) * g + tile[RIGHT];
        *t.at_mut(&[tile[UP], tile[DOWN], tile[LEFT], tile[RIGHT], s]) = BigInt::one();
    }
    t
}

/// The lexicographic physical code of a colour 4-tuple, shared by
/// [`bulk_tensor`] and [`boundary_tensor`].
pub fn phys_code(g: usize, tile: &[usize; 4]) -> usize {
    ((tile[UP] * g + tile[DOWN]) * g + tile[LEFT]) * g + tile[RIGHT]
}

/// A bulk tensor with the given virtual legs removed and the corresponding
/// tile components pinned to fixed colours; edges fix one leg, corners two,
/// and degenerate strips may fix three or all four.
pub fn boundary_tensor(ts: &TileSet, fixed: &[(LegLabel, usize)]) -> Tensor<BigInt> {
    assert!(!fixed.is_empty(), "boundary tensors pin at least one leg");
    let g = ts.num_colors();
    for (label, color) in fixed {
        assert!(VIRTUAL_LABELS.contains(label), "only virtual legs can be pinned");
        assert!(*color < g, "pinned colour outside the colour set");
        assert_eq!(fixed.iter().filter(|(l, _)| l == label).count(), 1, "leg pinned twice");
    }
    let phys = g.checked_pow(4).expect("physical dimension overflow");
    let mut legs = Vec::new();
    for label in VIRTUAL_LABELS {
        if !fixed.iter().any(|(l, _)| *l == label) {
            legs.push((label, g));
        }
    }
    legs.push((LegLabel::Phys, phys));
    let mut t = Tensor::zeros(legs.clone());
    for tile in ts.tiles() {
        let components = [tile[UP], tile[DOWN], tile[LEFT], tile[RIGHT]];
        let pinned_ok = fixed.iter().all(|(label, color)| {
            let comp = match label {
                LegLabel::Up => components[0],
                LegLabel::Down => components[1],
                LegLabel::Left => components[2],
                LegLabel::Right => components[3],
                LegLabel::Phys => unreachable!(),
            };
            comp == *color
        });
        if !pinned_ok {
            continue;
        }
        let mut index = Vec::with_capacity(legs.len());
        for (label, _) in &legs {
            index.push(match label {
                LegLabel::Up => components[0],
                LegLabel::Down => components[1],
                LegLabel::Left => components[2],
                LegLabel::Right => components[3],
                LegLabel::Phys => phys_code(g, tile),
            });
        }
        *t.at_mut(&index) = BigInt::one();
    }
    t
}

/// An `m x n` grid of site tensors; row 0 is the bottom row. Boundary legs
/// are absent on open grids built from an instance (they are pinned into the
/// edge tensors).
#[derive(Debug, Clone, PartialEq)]
pub struct PepsGrid<T> {
    rows: usize,
    cols: usize,
    tensors: Vec<Tensor<T>>,
}

impl<T: Entry> PepsGrid<T> {
    pub fn new(rows: usize, cols: usize, tensors: Vec<Tensor<T>>) -> Result<Self, TensorError> {
        assert_eq!(tensors.len(), rows * cols, "grid shape mismatch");
        let grid = PepsGrid { rows, cols, tensors };
        for r in 0..rows {
            for c in 0..cols {
                let t = grid.tensor(r, c);
                if t.leg_pos(LegLabel::Phys).is_none() {
                    return Err(TensorError::MissingLeg(LegLabel::Phys));
                }
                if r + 1 < rows {
                    let up = t.leg_dim(LegLabel::Up).ok_or(TensorError::MissingLeg(LegLabel::Up))?;
                    let down = grid
                        .tensor(r + 1, c)
                        .leg_dim(LegLabel::Down)
                        .ok_or(TensorError::MissingLeg(LegLabel::Down))?;
                    if up != down {
                        return Err(TensorError::DimensionMismatch { label: LegLabel::Up, a: up, b: down });
                    }
                }
                if c + 1 < cols {
                    let right =
                        t.leg_dim(LegLabel::Right).ok_or(TensorError::MissingLeg(LegLabel::Right))?;
                    let left = grid
                        .tensor(r, c + 1)
                        .leg_dim(LegLabel::Left)
                        .ok_or(TensorError::MissingLeg(LegLabel::Left))?;
                    if right != left {
                        return Err(TensorError::DimensionMismatch { label: LegLabel::Right, a: right, b: left });
                    }
                }
            }
        }
        Ok(grid)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn tensor(&self, row: usize, col: usize) -> &Tensor<T> {
        &self.tensors[row * self.cols + col]
    }

    pub fn tensors(&self) -> &[Tensor<T>] {
        &self.tensors
    }

    /// Reflects the grid across its main diagonal, relabelling legs so the
    /// lattice geometry is preserved. Contracting the transpose row by row
    /// is the same computation as contracting the original column by column.
    pub fn transposed(&self) -> PepsGrid<T> {
        let mut tensors = Vec::with_capacity(self.tensors.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                let mut t = self.tensor(r, c).clone();
                t.relabel(&[
                    (LegLabel::Up, LegLabel::Right),
                    (LegLabel::Right, LegLabel::Up),
                    (LegLabel::Down, LegLabel::Left),
                    (LegLabel::Left, LegLabel::Down),
                ]);
                tensors.push(t);
            }
        }
        PepsGrid { rows: self.cols, cols: self.rows, tensors }
    }
}

impl PepsGrid<BigInt> {
    pub fn to_f64(&self) -> PepsGrid<f64> {
        PepsGrid {
            rows: self.rows,
            cols: self.cols,
            tensors: self.tensors.iter().map(Tensor::to_f64).collect(),
        }
    }
}

/// Builds the open-boundary PEPS of an instance: bulk tensors inside, edge
/// and corner tensors pinned to the instance's boundary colours.
pub fn assemble_peps(inst: &BTInstance) -> PepsGrid<BigInt> {
    let ts = inst.tileset();
    let b = inst.boundary();
    let (rows, cols) = (inst.rows(), inst.cols());
    let mut tensors = Vec::with_capacity(rows * cols);
    for row in 0..rows {
        for col in 0..cols {
            let mut fixed = Vec::new();
            if row == 0 {
                fixed.push((LegLabel::Down, b.bottom[col]));
            }
            if row == rows - 1 {
                fixed.push((LegLabel::Up, b.top[col]));
            }
            if col == 0 {
                fixed.push((LegLabel::Left, b.left[row]));
            }
            if col == cols - 1 {
                fixed.push((LegLabel::Right, b.right[row]));
            }
            tensors.push(if fixed.is_empty() { bulk_tensor(ts) } else { boundary_tensor(ts, &fixed) });
        }
    }
    PepsGrid::new(rows, cols, tensors).expect("assembled grid is consistent")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionBudgetExceeded {
    pub required: usize,
    pub budget: usize,
}

impl core::fmt::Display for ContractionBudgetExceeded {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "contraction boundary of dimension {} exceeds the budget of {}",
            self.required, self.budget
        )
    }
}

/// Slot bookkeeping for the boundary tensor held during the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    /// Open up-leg of the most recently absorbed cell in this column.
    Up { col: usize, bra: bool },
    /// Open right-leg of the cell just absorbed, awaiting its neighbour.
    Right { bra: bool },
    /// Open physical leg (single-layer sweeps only), in row-major cell order.
    Phys { cell: usize },
}

struct SweepState<T> {
    slots: Vec<Slot>,
    dims: Vec<usize>,
    data: Vec<T>,
}

impl<T: Entry> SweepState<T> {
    fn scalar() -> Self {
        SweepState { slots: Vec::new(), dims: Vec::new(), data: vec![T::one()] }
    }

    fn slot_pos(&self, slot: Slot) -> Option<usize> {
        self.slots.iter().position(|s| *s == slot)
    }

    /// Contracts the state with a cell tensor over the paired legs; the cell
    /// tensor's remaining legs are appended with the given slots.
    fn absorb(
        &mut self,
        cell_dims: &[usize],
        cell_data: &[T],
        pairs: &[(Slot, usize)],
        free_slots: &[(usize, Slot)],
        budget: usize,
    ) -> Result<(), ContractionBudgetExceeded> {
        let raw_pairs: Vec<(usize, usize)> = pairs
            .iter()
            .map(|(slot, leg)| (self.slot_pos(*slot).expect("missing boundary slot"), *leg))
            .collect();
        let kept: Vec<Slot> = (0..self.slots.len())
            .filter(|i| !raw_pairs.iter().any(|(x, _)| x == i))
            .map(|i| self.slots[i])
            .collect();
        let mut new_slots = kept;
        for (leg, slot) in free_slots {
            // free_slots are given in cell-leg order; contract_raw appends
            // the cell's free legs in that same order.
            let _ = leg;
            new_slots.push(*slot);
        }
        let (dims, data) = contract_raw(&self.dims, &self.data, cell_dims, cell_data, &raw_pairs);
        if data.len() > budget {
            return Err(ContractionBudgetExceeded { required: data.len(), budget });
        }
        debug_assert_eq!(dims.len(), new_slots.len());
        self.slots = new_slots;
        self.dims = dims;
        self.data = data;
        Ok(())
    }
}

/// `<Phi|Phi>` by exact double-layer contraction, swept cell by cell along a
/// row boundary. In integer mode the result equals the number of valid
/// tilings of the underlying instance.
pub fn norm_squared<T: Entry>(grid: &PepsGrid<T>, budget: usize) -> Result<T, ContractionBudgetExceeded> {
    let mut state = SweepState::<T>::scalar();
    for row in 0..grid.rows() {
        for col in 0..grid.cols() {
            let a = grid.tensor(row, col);
            let phys = a.leg_pos(LegLabel::Phys).expect("site tensor lacks a physical leg");
            // Double tensor: ket legs then bra legs, physical leg contracted.
            let (d_dims, d_data) =
                contract_raw(&a.dims(), a.data(), &a.dims(), a.data(), &[(phys, phys)]);
            let virt: Vec<LegLabel> = a
                .legs()
                .iter()
                .filter(|(l, _)| *l != LegLabel::Phys)
                .map(|(l, _)| *l)
                .collect();
            let n_virt = virt.len();
            let mut pairs = Vec::new();
            let mut free = Vec::new();
            for (i, label) in virt.iter().enumerate() {
                for (bra, leg) in [(false, i), (true, i + n_virt)] {
                    match label {
                        LegLabel::Down => pairs.push((Slot::Up { col, bra }, leg)),
                        LegLabel::Left => pairs.push((Slot::Right { bra }, leg)),
                        LegLabel::Up => free.push((leg, Slot::Up { col, bra })),
                        LegLabel::Right => free.push((leg, Slot::Right { bra })),
                        LegLabel::Phys => unreachable!(),
                    }
                }
            }
            // contract_raw keeps the cell's free legs in ascending leg
            // order, so sort the slot assignments accordingly.
            free.sort_by_key(|(leg, _)| *leg);
            state.absorb(&d_dims, &d_data, &pairs, &free, budget)?;
        }
    }
    debug_assert!(state.slots.is_empty(), "open legs left after the sweep");
    Ok(state.data.swap_remove(0))
}

/// Full amplitude vector of the state, physical indices in row-major cell
/// order (row 0 first, each row left to right). Exponential in the cell
/// count; guarded by `budget` on the largest intermediate.
pub fn state_vector<T: Entry>(
    grid: &PepsGrid<T>,
    budget: usize,
) -> Result<Vec<T>, ContractionBudgetExceeded> {
    let mut state = SweepState::<T>::scalar();
    for row in 0..grid.rows() {
        for col in 0..grid.cols() {
            let a = grid.tensor(row, col);
            let cell = row * grid.cols() + col;
            let mut pairs = Vec::new();
            let mut free = Vec::new();
            for (leg, (label, _)) in a.legs().iter().enumerate() {
                match label {
                    LegLabel::Down => pairs.push((Slot::Up { col, bra: false }, leg)),
                    LegLabel::Left => pairs.push((Slot::Right { bra: false }, leg)),
                    LegLabel::Up => free.push((leg, Slot::Up { col, bra: false })),
                    LegLabel::Right => free.push((leg, Slot::Right { bra: false })),
                    LegLabel::Phys => free.push((leg, Slot::Phys { cell })),
                }
            }
            free.sort_by_key(|(leg, _)| *leg);
            state.absorb(&a.dims(), a.data(), &pairs, &free, budget)?;
        }
    }
    // Only physical slots remain; permute them into row-major cell order.
    let n = state.slots.len();
    debug_assert_eq!(n, grid.rows() * grid.cols());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| match state.slots[i] {
        Slot::Phys { cell } => cell,
        _ => unreachable!("non-physical slot left after the sweep"),
    });
    let str_in = strides(&state.dims);
    let out_dims: Vec<usize> = order.iter().map(|&i| state.dims[i]).collect();
    let mut out = vec![T::zero(); state.data.len()];
    let mut index = vec![0usize; n];
    for (flat_out, slot) in out.iter_mut().enumerate() {
        // Decode the output multi-index, then map it back through `order`.
        let mut rem = flat_out;
        for (k, d) in out_dims.iter().enumerate().rev() {
            index[k] = rem % d;
            rem /= d;
        }
        let mut flat_in = 0;
        for (k, &src) in order.iter().enumerate() {
            flat_in += index[k] * str_in[src];
        }
        *slot = state.data[flat_in].clone();
    }
    Ok(out)
}

/// Open-boundary zero test in exact arithmetic: the state vanishes iff the
/// squared norm is zero.
pub fn zero_test_open(grid: &PepsGrid<BigInt>, budget: usize) -> Result<bool, ContractionBudgetExceeded> {
    Ok(norm_squared(grid, budget)?.is_zero())
}

/// Floating-point variant: the squared norm is compared against
/// `tol * scale`, where `scale` bounds the accumulated magnitude (product of
/// the squared largest entry per site, floored at 1).
pub fn zero_test_open_f64(
    grid: &PepsGrid<f64>,
    budget: usize,
    tol: f64,
) -> Result<bool, ContractionBudgetExceeded> {
    let mut scale = 1.0_f64;
    for t in grid.tensors() {
        let m = t.data().iter().fold(0.0_f64, |acc, e| acc.max(e.abs()));
        scale *= (m * m).max(1.0);
    }
    let n2 = norm_squared(grid, budget)?;
    Ok(n2.abs() < tol * scale)
}

/// `<Phi|Phi>` for the translation-invariant state on an `lx x ly` torus,
/// by a sparse double-layer row transfer matrix. Exact; equals the number
/// of periodic tilings of the torus.
pub fn torus_norm_squared(
    ts: &TileSet,
    lx: usize,
    ly: usize,
    budget: usize,
) -> Result<BigUint, ContractionBudgetExceeded> {
    assert!(lx >= 1 && ly >= 1, "torus dimensions must be positive");
    let g = ts.num_colors();
    let row_dim = g
        .checked_mul(g)
        .and_then(|gg| gg.checked_pow(lx as u32))
        .ok_or(ContractionBudgetExceeded { required: usize::MAX, budget })?;
    if row_dim > budget {
        return Err(ContractionBudgetExceeded { required: row_dim, budget });
    }

    // Physical contraction of two site tensors leaves a pair weight per
    // column: w(t, t') = sum_s A_t(s) A_t'(s), read off the bulk tensor.
    let bulk = bulk_tensor(ts);
    let tiles = ts.tiles();
    let phys = g.pow(4);
    let mut weight = vec![BigUint::zero(); tiles.len() * tiles.len()];
    for (i, a) in tiles.iter().enumerate() {
        for (j, b) in tiles.iter().enumerate() {
            let mut acc = BigInt::zero();
            for s in 0..phys {
                let ea = bulk.at(&[a[UP], a[DOWN], a[LEFT], a[RIGHT], s]);
                let eb = bulk.at(&[b[UP], b[DOWN], b[LEFT], b[RIGHT], s]);
                acc += ea * eb;
            }
            weight[i * tiles.len() + j] = acc.to_biguint().expect("weights are nonnegative");
        }
    }

    // Row transfer: key = ket row colours followed by bra row colours
    // (vertical links below the row); the horizontal links wrap.
    let mut keys: Vec<Vec<usize>> = Vec::with_capacity(row_dim);
    let mut cur = vec![0usize; 2 * lx];
    'gen: loop {
        keys.push(cur.clone());
        let mut k = 2 * lx;
        loop {
            if k == 0 {
                break 'gen;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < g {
                break;
            }
            cur[k] = 0;
        }
    }
    let transfer = transfer_fill(ts, &weight, &keys, lx);
    finish_torus(transfer, &keys, ly)
}

fn transfer_fill(
    ts: &TileSet,
    weight: &[BigUint],
    keys: &[Vec<usize>],
    lx: usize,
) -> BTreeMap<Vec<usize>, BTreeMap<Vec<usize>, BigUint>> {
    let tiles = ts.tiles();
    let nt = tiles.len();
    let mut transfer: BTreeMap<Vec<usize>, BTreeMap<Vec<usize>, BigUint>> = BTreeMap::new();
    for key in keys {
        let (kd, bd) = key.split_at(lx);
        let mut row: BTreeMap<Vec<usize>, BigUint> = BTreeMap::new();
        // Guess the wrapping horizontal link colours, then fill columns.
        for wrap_k in 0..ts.num_colors() {
            for wrap_b in 0..ts.num_colors() {
                fill_columns(
                    tiles, weight, nt, kd, bd, 0, wrap_k, wrap_b, wrap_k, wrap_b,
                    &mut Vec::new(), &mut Vec::new(), &BigUint::one(), &mut row,
                );
            }
        }
        if !row.is_empty() {
            transfer.insert(key.clone(), row);
        }
    }
    transfer
}

#[allow(clippy::too_many_arguments)]
fn fill_columns(
    tiles: &[[usize; 4]],
    weight: &[BigUint],
    nt: usize,
    kd: &[usize],
    bd: &[usize],
    col: usize,
    hk: usize,
    hb: usize,
    wrap_k: usize,
    wrap_b: usize,
    ku: &mut Vec<usize>,
    bu: &mut Vec<usize>,
    acc: &BigUint,
    row: &mut BTreeMap<Vec<usize>, BigUint>,
) {
    if col == kd.len() {
        if hk == wrap_k && hb == wrap_b {
            let mut out = ku.clone();
            out.extend_from_slice(bu);
            let slot = row.entry(out).or_insert_with(BigUint::zero);
            *slot += acc;
        }
        return;
    }
    for (i, tk) in tiles.iter().enumerate() {
        if tk[DOWN] != kd[col] || tk[LEFT] != hk {
            continue;
        }
        for (j, tb) in tiles.iter().enumerate() {
            if tb[DOWN] != bd[col] || tb[LEFT] != hb {
                continue;
            }
            let w = &weight[i * nt + j];
            if w.is_zero() {
                continue;
            }
            ku.push(tk[UP]);
            bu.push(tb[UP]);
            let acc2 = acc * w;
            fill_columns(
                tiles, weight, nt, kd, bd, col + 1, tk[RIGHT], tb[RIGHT], wrap_k, wrap_b,
                ku, bu, &acc2, row,
            );
            ku.pop();
            bu.pop();
        }
    }
}

fn finish_torus(
    transfer: BTreeMap<Vec<usize>, BTreeMap<Vec<usize>, BigUint>>,
    keys: &[Vec<usize>],
    ly: usize,
) -> Result<BigUint, ContractionBudgetExceeded> {
    let mut total = BigUint::zero();
    for start in keys {
        if !transfer.contains_key(start) {
            continue;
        }
        let mut vec: BTreeMap<&Vec<usize>, BigUint> = BTreeMap::new();
        vec.insert(start, BigUint::one());
        for _ in 0..ly {
            let mut next: BTreeMap<&Vec<usize>, BigUint> = BTreeMap::new();
            for (key, amp) in &vec {
                if let Some(row) = transfer.get(*key) {
                    for (out, w) in row {
                        let slot = next.entry(out).or_insert_with(BigUint::zero);
                        *slot += amp * w;
                    }
                }
            }
            vec = next;
        }
        if let Some(diag) = vec.get(start) {
            total += diag;
        }
    }
    Ok(total)
}

/// Exact zero test on the torus: true iff the translation-invariant state
/// of the tile set vanishes on the `lx x ly` torus.
pub fn zero_test_torus(
    ts: &TileSet,
    lx: usize,
    ly: usize,
    budget: usize,
) -> Result<bool, ContractionBudgetExceeded> {
    Ok(torus_norm_squared(ts, lx, ly, budget)?.is_zero())
}

/// Direct sum of two site tensors: every leg dimension adds, entries live
/// on the two diagonal blocks (first operand's indices come first on every
/// leg). Both operands must carry the same leg labels; the result uses the
/// first operand's leg order.
pub fn direct_sum<T: Entry>(a: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>, TensorError> {
    if a.legs().len() != b.legs().len() {
        return Err(TensorError::LegMismatch);
    }
    let mut b_pos = Vec::with_capacity(a.legs().len());
    for (label, _) in a.legs() {
        match b.leg_pos(*label) {
            Some(p) => b_pos.push(p),
            None => return Err(TensorError::LegMismatch),
        }
    }
    let legs: Vec<(LegLabel, usize)> = a
        .legs()
        .iter()
        .zip(&b_pos)
        .map(|((label, da), &p)| (*label, da + b.legs()[p].1))
        .collect();
    let mut out = Tensor::zeros(legs);
    let n = a.legs().len();
    let mut index = vec![0usize; n];
    // A block.
    for flat in 0..a.len() {
        let mut rem = flat;
        for (k, (_, d)) in a.legs().iter().enumerate().rev() {
            index[k] = rem % d;
            rem /= d;
        }
        if !a.data()[flat].is_zero() {
            *out.at_mut(&index) = a.data()[flat].clone();
        }
    }
    // B block, offset by A's dimensions, with legs matched by label.
    let mut b_index = vec![0usize; n];
    for flat in 0..b.len() {
        let mut rem = flat;
        for (k, (_, d)) in b.legs().iter().enumerate().rev() {
            b_index[k] = rem % d;
            rem /= d;
        }
        for (k, ((_, da), &p)) in a.legs().iter().zip(&b_pos).enumerate() {
            index[k] = da + b_index[p];
        }
        if !b.data()[flat].is_zero() {
            *out.at_mut(&index) = b.data()[flat].clone();
        }
    }
    Ok(out)
}

/// Tensor (Kronecker) product of two site tensors, leg by leg: dimensions
/// multiply, and on every leg the first operand's index is the major digit.
/// Both operands must carry the same leg labels; the result uses the first
/// operand's leg order.
pub fn tensor_product<T: Entry>(a: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>, TensorError> {
    if a.legs().len() != b.legs().len() {
        return Err(TensorError::LegMismatch);
    }
    let mut b_pos = Vec::with_capacity(a.legs().len());
    for (label, _) in a.legs() {
        match b.leg_pos(*label) {
            Some(p) => b_pos.push(p),
            None => return Err(TensorError::LegMismatch),
        }
    }
    let legs: Vec<(LegLabel, usize)> = a
        .legs()
        .iter()
        .zip(&b_pos)
        .map(|((label, da), &p)| (*label, da * b.legs()[p].1))
        .collect();
    let mut out = Tensor::zeros(legs);
    let n = a.legs().len();
    let mut a_index = vec![0usize; n];
    let mut b_index = vec![0usize; n];
    let mut index = vec![0usize; n];
    for fa in 0..a.len() {
        if a.data()[fa].is_zero() {
            continue;
        }
        let mut rem = fa;
        for (k, (_, d)) in a.legs().iter().enumerate().rev() {
            a_index[k] = rem % d;
            rem /= d;
        }
        for fb in 0..b.len() {
            if b.data()[fb].is_zero() {
                continue;
            }
            let mut rem = fb;
            for (k, (_, d)) in b.legs().iter().enumerate().rev() {
                b_index[k] = rem % d;
                rem /= d;
            }
            for (k, &p) in b_pos.iter().enumerate() {
                index[k] = a_index[k] * b.legs()[p].1 + b_index[p];
            }
            *out.at_mut(&index) = a.data()[fa].mul_ref(&b.data()[fb]);
        }
    }
    Ok(out)
}
