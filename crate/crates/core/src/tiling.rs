//! Bounded tilings of finite lattices and exact tiling counts.
//!
//! A tile is a 4-tuple of colours `(up, down, left, right)`; an instance fixes
//! a rectangular lattice of plaquettes together with a colour for every
//! boundary link. Everything here is exhaustive and exact: this module is the
//! trusted oracle the tensor and Hamiltonian modules are checked against, so
//! it deliberately stays free of heuristics.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Index into [`TileSet::colors`].
pub type Color = usize;

/// Tile components in `(up, down, left, right)` order.
pub type Tile = [Color; 4];

pub const UP: usize = 0;
pub const DOWN: usize = 1;
pub const LEFT: usize = 2;
pub const RIGHT: usize = 3;

/// An ordered colour set together with an ordered, duplicate-free tile list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileSet {
    colors: Vec<String>,
    tiles: Vec<Tile>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TileSetError {
    ColorOutOfRange { tile: usize, component: usize, color: Color },
    DuplicateTile { first: usize, second: usize },
    DuplicateColor { name: String },
}

impl core::fmt::Display for TileSetError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TileSetError::ColorOutOfRange { tile, component, color } => write!(
                f,
                "tile {tile} component {component} references colour {color} outside the colour set"
            ),
            TileSetError::DuplicateTile { first, second } => {
                write!(f, "tiles {first} and {second} are identical")
            }
            TileSetError::DuplicateColor { name } => {
                write!(f, "colour name {name:?} appears more than once")
            }
        }
    }
}

impl TileSet {
    pub fn new(colors: Vec<String>, tiles: Vec<Tile>) -> Result<Self, TileSetError> {
        let mut seen_colors = BTreeMap::new();
        for name in &colors {
            if seen_colors.insert(name.clone(), ()).is_some() {
                return Err(TileSetError::DuplicateColor { name: name.clone() });
            }
        }
        let mut seen = BTreeMap::new();
        for (i, tile) in tiles.iter().enumerate() {
            for (c, &col) in tile.iter().enumerate() {
                if col >= colors.len() {
                    return Err(TileSetError::ColorOutOfRange { tile: i, component: c, color: col });
                }
            }
            if let Some(&first) = seen.get(tile) {
                return Err(TileSetError::DuplicateTile { first, second: i });
            }
            seen.insert(*tile, i);
        }
        Ok(TileSet { colors, tiles })
    }

    pub fn num_colors(&self) -> usize {
        self.colors.len()
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn color_name(&self, c: Color) -> &str {
        &self.colors[c]
    }

    pub fn color_index(&self, name: &str) -> Option<Color> {
        self.colors.iter().position(|c| c == name)
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn contains(&self, tile: &Tile) -> bool {
        self.tiles.contains(tile)
    }

    /// Swaps up<->left and down<->right in every tile. Tilings of the
    /// transposed set on an `ly x lx` lattice are in bijection with tilings of
    /// the original set on `lx x ly`.
    pub fn transposed(&self) -> TileSet {
        let tiles = self
            .tiles
            .iter()
            .map(|t| [t[LEFT], t[RIGHT], t[UP], t[DOWN]])
            .collect();
        TileSet { colors: self.colors.clone(), tiles }
    }
}

/// Colours of the `2(m+n)` boundary links of an `m x n` lattice.
///
/// `top` and `bottom` are indexed by column, left to right; `left` and
/// `right` are indexed by row, with row 0 at the bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Boundary {
    pub top: Vec<Color>,
    pub bottom: Vec<Color>,
    pub left: Vec<Color>,
    pub right: Vec<Color>,
}

/// A bounded-tiling instance: lattice dimensions, tile set and a total
/// boundary condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BTInstance {
    rows: usize,
    cols: usize,
    tileset: TileSet,
    boundary: Boundary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceError {
    EmptyLattice,
    BoundaryLength { side: &'static str, expected: usize, got: usize },
    BoundaryColor { side: &'static str, index: usize, color: Color },
}

impl core::fmt::Display for InstanceError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            InstanceError::EmptyLattice => write!(f, "lattice must have at least one plaquette"),
            InstanceError::BoundaryLength { side, expected, got } => {
                write!(f, "{side} boundary has {got} links, expected {expected}")
            }
            InstanceError::BoundaryColor { side, index, color } => {
                write!(f, "{side} boundary link {index} references unknown colour {color}")
            }
        }
    }
}

impl BTInstance {
    pub fn new(
        rows: usize,
        cols: usize,
        tileset: TileSet,
        boundary: Boundary,
    ) -> Result<Self, InstanceError> {
        if rows == 0 || cols == 0 {
            return Err(InstanceError::EmptyLattice);
        }
        let sides: [(&'static str, &[Color], usize); 4] = [
            ("top", &boundary.top, cols),
            ("bottom", &boundary.bottom, cols),
            ("left", &boundary.left, rows),
            ("right", &boundary.right, rows),
        ];
        for (side, colors, expected) in sides {
            if colors.len() != expected {
                return Err(InstanceError::BoundaryLength { side, expected, got: colors.len() });
            }
            for (index, &color) in colors.iter().enumerate() {
                if color >= tileset.num_colors() {
                    return Err(InstanceError::BoundaryColor { side, index, color });
                }
            }
        }
        Ok(BTInstance { rows, cols, tileset, boundary })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn tileset(&self) -> &TileSet {
        &self.tileset
    }

    pub fn boundary(&self) -> &Boundary {
        &self.boundary
    }

    /// Colour required below plaquette `(row, col)`, if fixed by the boundary.
    /// Row 0 is the bottom row.
    fn below(&self, row: usize, col: usize) -> Option<Color> {
        (row == 0).then(|| self.boundary.bottom[col])
    }

    fn above(&self, row: usize, col: usize) -> Option<Color> {
        (row == self.rows - 1).then(|| self.boundary.top[col])
    }

    fn left_of(&self, row: usize, col: usize) -> Option<Color> {
        (col == 0).then(|| self.boundary.left[row])
    }

    fn right_of(&self, row: usize, col: usize) -> Option<Color> {
        (col == self.cols - 1).then(|| self.boundary.right[row])
    }
}

/// A candidate tiling: one tile index per plaquette, row-major with row 0 at
/// the bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tiling {
    rows: usize,
    cols: usize,
    tiles: Vec<usize>,
}

impl Tiling {
    pub fn new(rows: usize, cols: usize, tiles: Vec<usize>) -> Option<Self> {
        (tiles.len() == rows * cols).then_some(Tiling { rows, cols, tiles })
    }

    pub fn tile_at(&self, row: usize, col: usize) -> usize {
        self.tiles[row * self.cols + col]
    }

    pub fn tiles(&self) -> &[usize] {
        &self.tiles
    }
}

/// True iff every plaquette carries a tile from the set, adjacent plaquettes
/// agree on their shared link and the boundary condition is respected.
///
/// The shape of `t` and the range of its indices are preconditions.
pub fn validate_tiling(inst: &BTInstance, t: &Tiling) -> bool {
    assert_eq!(t.rows, inst.rows, "tiling row count mismatch");
    assert_eq!(t.cols, inst.cols, "tiling column count mismatch");
    let ts = inst.tileset();
    for row in 0..inst.rows {
        for col in 0..inst.cols {
            let idx = t.tile_at(row, col);
            assert!(idx < ts.tiles().len(), "tile index out of range");
            let tile = ts.tiles()[idx];
            if let Some(c) = inst.below(row, col) {
                if tile[DOWN] != c {
                    return false;
                }
            } else if ts.tiles()[t.tile_at(row - 1, col)][UP] != tile[DOWN] {
                return false;
            }
            if let Some(c) = inst.above(row, col) {
                if tile[UP] != c {
                    return false;
                }
            }
            if let Some(c) = inst.left_of(row, col) {
                if tile[LEFT] != c {
                    return false;
                }
            } else if ts.tiles()[t.tile_at(row, col - 1)][RIGHT] != tile[LEFT] {
                return false;
            }
            if let Some(c) = inst.right_of(row, col) {
                if tile[RIGHT] != c {
                    return false;
                }
            }
        }
    }
    true
}

/// Checks tile `idx` at `(row, col)` against the boundary and the already
/// placed up-neighbour (row below) and left-neighbour.
fn fits(inst: &BTInstance, placed: &[usize], row: usize, col: usize, idx: usize) -> bool {
    let ts = inst.tileset();
    let tile = ts.tiles()[idx];
    let down_req = match inst.below(row, col) {
        Some(c) => c,
        None => ts.tiles()[placed[(row - 1) * inst.cols + col]][UP],
    };
    if tile[DOWN] != down_req {
        return false;
    }
    let left_req = match inst.left_of(row, col) {
        Some(c) => c,
        None => ts.tiles()[placed[row * inst.cols + col - 1]][RIGHT],
    };
    if tile[LEFT] != left_req {
        return false;
    }
    if let Some(c) = inst.above(row, col) {
        if tile[UP] != c {
            return false;
        }
    }
    if let Some(c) = inst.right_of(row, col) {
        if tile[RIGHT] != c {
            return false;
        }
    }
    true
}

enum SearchGoal {
    First,
    CountAll,
}

fn backtrack(
    inst: &BTInstance,
    placed: &mut Vec<usize>,
    goal: &SearchGoal,
    count: &mut BigUint,
) -> bool {
    let cell = placed.len();
    if cell == inst.rows * inst.cols {
        *count += BigUint::one();
        return matches!(goal, SearchGoal::First);
    }
    let (row, col) = (cell / inst.cols, cell % inst.cols);
    for idx in 0..inst.tileset().tiles().len() {
        if fits(inst, placed, row, col, idx) {
            placed.push(idx);
            if backtrack(inst, placed, goal, count) {
                return true;
            }
            placed.pop();
        }
    }
    false
}

/// Finds a valid tiling if one exists. Deterministic: the witness is the
/// first solution in row-major, tile-index order.
pub fn solve(inst: &BTInstance) -> Option<Tiling> {
    let mut placed = Vec::with_capacity(inst.rows * inst.cols);
    let mut count = BigUint::zero();
    if backtrack(inst, &mut placed, &SearchGoal::First, &mut count) {
        Some(Tiling { rows: inst.rows, cols: inst.cols, tiles: placed })
    } else {
        None
    }
}

/// Exact number of valid tilings.
pub fn count(inst: &BTInstance) -> BigUint {
    let mut placed = Vec::with_capacity(inst.rows * inst.cols);
    let mut count = BigUint::zero();
    backtrack(inst, &mut placed, &SearchGoal::CountAll, &mut count);
    count
}

/// Exact number of valid tilings whose first plaquettes (row-major) carry the
/// given tile indices. Summing over all prefixes of a fixed length recovers
/// [`count`]; this is the fan-out point for parallel counting.
pub fn count_from_prefix(inst: &BTInstance, prefix: &[usize]) -> BigUint {
    assert!(prefix.len() <= inst.rows * inst.cols);
    let mut placed = Vec::with_capacity(inst.rows * inst.cols);
    for (cell, &idx) in prefix.iter().enumerate() {
        assert!(idx < inst.tileset().tiles().len(), "prefix tile index out of range");
        let (row, col) = (cell / inst.cols, cell % inst.cols);
        if !fits(inst, &placed, row, col, idx) {
            return BigUint::zero();
        }
        placed.push(idx);
    }
    let mut count = BigUint::zero();
    backtrack(inst, &mut placed, &SearchGoal::CountAll, &mut count);
    count
}

/// Exact number of valid tilings of the `lx x ly` torus (periodic
/// identification in both directions), via a row transfer matrix with exact
/// integer entries.
///
/// A row state is the tuple of `lx` horizontal-link colours between two
/// plaquette rows. The transfer entry `M[a][b]` counts ways to fill one
/// plaquette row with bottom links `a` and top links `b`, with the vertical
/// links matching cyclically; that inner count is itself a cyclic trace of
/// per-column 0/1 matrices. The torus count is `tr(M^ly)`.
pub fn torus_count(ts: &TileSet, lx: usize, ly: usize) -> BigUint {
    assert!(lx >= 1 && ly >= 1);
    let g = ts.num_colors();
    if g == 0 || ts.tiles().is_empty() {
        return BigUint::zero();
    }
    let states = g.checked_pow(lx as u32).expect("row state space overflow");

    let decode = |mut s: usize| -> Vec<Color> {
        let mut row = vec![0; lx];
        for c in (0..lx).rev() {
            row[c] = s % g;
            s /= g;
        }
        row
    };

    // M[a][b] = number of row fillings, computed lazily per (a, b).
    let row_fillings = |a: &[Color], b: &[Color]| -> BigUint {
        // X_col[v][v'] = 1 if (b_col, a_col, v, v') is a tile; count =
        // tr(X_0 ... X_{lx-1}) over the cyclic vertical links.
        let mut acc: Vec<Vec<BigUint>> = (0..g)
            .map(|i| (0..g).map(|j| if i == j { BigUint::one() } else { BigUint::zero() }).collect())
            .collect();
        for col in 0..lx {
            let mut x = vec![vec![BigUint::zero(); g]; g];
            for tile in ts.tiles() {
                if tile[UP] == b[col] && tile[DOWN] == a[col] {
                    x[tile[LEFT]][tile[RIGHT]] += BigUint::one();
                }
            }
            let mut next = vec![vec![BigUint::zero(); g]; g];
            for i in 0..g {
                for k in 0..g {
                    if acc[i][k].is_zero() {
                        continue;
                    }
                    for (j, next_ij) in next[i].iter_mut().enumerate() {
                        if !x[k][j].is_zero() {
                            *next_ij += &acc[i][k] * &x[k][j];
                        }
                    }
                }
            }
            acc = next;
        }
        (0..g).map(|i| acc[i][i].clone()).sum()
    };

    let mut transfer = vec![vec![BigUint::zero(); states]; states];
    for (a, transfer_a) in transfer.iter_mut().enumerate() {
        let ra = decode(a);
        for (b, entry) in transfer_a.iter_mut().enumerate() {
            *entry = row_fillings(&ra, &decode(b));
        }
    }

    // tr(M^ly) by repeated matrix-vector products from each basis state.
    let mut total = BigUint::zero();
    for start in 0..states {
        let mut v = vec![BigUint::zero(); states];
        v[start] = BigUint::one();
        for _ in 0..ly {
            let mut next = vec![BigUint::zero(); states];
            for (a, va) in v.iter().enumerate() {
                if va.is_zero() {
                    continue;
                }
                for (b, next_b) in next.iter_mut().enumerate() {
                    if !transfer[a][b].is_zero() {
                        *next_b += va * &transfer[a][b];
                    }
                }
            }
            v = next;
        }
        total += v[start].clone();
    }
    total
}
