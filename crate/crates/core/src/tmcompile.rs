//! Compiles a Turing machine and input word into a bounded-tiling instance.
//!
//! Each row of tiles rewrites one instantaneous description into the next:
//! the bottom edge of a row carries the current tape snapshot, the top edge
//! the successor, and a state colour travels along the vertical link between
//! the old and new head columns. The bottom boundary fixes the initial
//! description, the top boundary the normalised accepting one (head on the
//! leftmost cell, tape blank). An idle tile on the accepting head colour lets
//! finished computations repeat their final row, so a tiling of height `h`
//! exists exactly when the machine accepts within `h` steps on an `l`-cell
//! tape.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::tiling::{BTInstance, Boundary, Color, Tile, TileSet};
use crate::turing::{validate_tm, Move, TuringMachine};

/// Colours of the compiled tile set: plain tape symbols, head-marked symbols,
/// travelling head states, and the distinguished blank for sides that carry
/// no information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CompiledColor {
    /// Tape cell holding symbol `s` (symbol index).
    Symbol(usize),
    /// Tape cell holding symbol `s` with the head on it in state `q`.
    SymbolState(usize, usize),
    /// Head state `q` travelling sideways between columns.
    State(usize),
    /// No information; used on unlabelled tile sides and the lattice's left
    /// and right boundaries.
    Blank,
}

impl CompiledColor {
    /// Serialised form used in instance files: `s:<sym>`, `sq:<sym>,<state>`,
    /// `q:<state>`, `blank`.
    pub fn name(&self, tm: &TuringMachine) -> String {
        match *self {
            CompiledColor::Symbol(s) => format!("s:{}", tm.alphabet[s]),
            CompiledColor::SymbolState(s, q) => format!("sq:{},{}", tm.alphabet[s], tm.states[q]),
            CompiledColor::State(q) => format!("q:{}", tm.states[q]),
            CompiledColor::Blank => String::from("blank"),
        }
    }
}

/// Dense enumeration of the compiled colour set, in the fixed order: symbols,
/// symbol-state pairs (symbol-major), states, blank.
pub struct ColorTable {
    num_symbols: usize,
    num_states: usize,
}

impl ColorTable {
    pub fn new(tm: &TuringMachine) -> Self {
        ColorTable { num_symbols: tm.alphabet.len(), num_states: tm.states.len() }
    }

    pub fn len(&self) -> usize {
        self.num_symbols + self.num_symbols * self.num_states + self.num_states + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, c: CompiledColor) -> Color {
        match c {
            CompiledColor::Symbol(s) => s,
            CompiledColor::SymbolState(s, q) => self.num_symbols + s * self.num_states + q,
            CompiledColor::State(q) => self.num_symbols + self.num_symbols * self.num_states + q,
            CompiledColor::Blank => self.len() - 1,
        }
    }

    pub fn all(&self) -> impl Iterator<Item = CompiledColor> + '_ {
        let symbols = (0..self.num_symbols).map(CompiledColor::Symbol);
        let pairs = (0..self.num_symbols)
            .flat_map(move |s| (0..self.num_states).map(move |q| CompiledColor::SymbolState(s, q)));
        let states = (0..self.num_states).map(CompiledColor::State);
        symbols.chain(pairs).chain(states).chain(core::iter::once(CompiledColor::Blank))
    }
}

/// `|Sigma| + |Sigma||K| + |K| + 1`, the size of the compiled colour set.
pub fn color_count(tm: &TuringMachine) -> usize {
    assert!(validate_tm(tm).is_empty(), "machine failed validation");
    let n = ColorTable::new(tm).len();
    debug_assert_eq!(n, compile_tiles(tm).num_colors());
    n
}

/// Emits the tile set encoding the machine's program.
///
/// For each quintuple and each column case: a head tile that rewrites the
/// scanned cell (emitting the new state sideways on moves), a receiving tile
/// for the cell the head moves onto, and copy tiles that keep untouched
/// cells. Unlabelled sides are blank. The all-blank tile is included; the
/// idle tile on the accepting head colour lets the accepting row repeat
/// upward when the lattice is taller than the computation.
pub fn compile_tiles(tm: &TuringMachine) -> TileSet {
    assert!(validate_tm(tm).is_empty(), "machine failed validation");
    let table = ColorTable::new(tm);
    let colors: Vec<String> = table.all().map(|c| c.name(tm)).collect();
    let blank = table.index(CompiledColor::Blank);
    let accepting = tm.state_index(&tm.accepting).expect("invalid machine");
    let blank_sym = tm.blank_index();

    let mut tiles: Vec<Tile> = Vec::new();
    let push = |t: Tile, tiles: &mut Vec<Tile>| {
        if !tiles.contains(&t) {
            tiles.push(t);
        }
    };

    // Copy tiles: untouched cells carry their symbol upward.
    for s in 0..tm.alphabet.len() {
        let sym = table.index(CompiledColor::Symbol(s));
        push([sym, sym, blank, blank], &mut tiles);
    }

    for q in &tm.program {
        let state = tm.state_index(&q.state).expect("invalid machine");
        let read = tm.symbol_index(&q.read).expect("invalid machine");
        let next = tm.state_index(&q.next_state).expect("invalid machine");
        let write = tm.symbol_index(&q.write).expect("invalid machine");
        let scanned = table.index(CompiledColor::SymbolState(read, state));
        match q.mov {
            Move::Stay => {
                let top = table.index(CompiledColor::SymbolState(write, next));
                push([top, scanned, blank, blank], &mut tiles);
            }
            Move::Right => {
                let top = table.index(CompiledColor::Symbol(write));
                let carry = table.index(CompiledColor::State(next));
                push([top, scanned, blank, carry], &mut tiles);
                for s in 0..tm.alphabet.len() {
                    let below = table.index(CompiledColor::Symbol(s));
                    let above = table.index(CompiledColor::SymbolState(s, next));
                    push([above, below, carry, blank], &mut tiles);
                }
            }
            Move::Left => {
                let top = table.index(CompiledColor::Symbol(write));
                let carry = table.index(CompiledColor::State(next));
                push([top, scanned, carry, blank], &mut tiles);
                for s in 0..tm.alphabet.len() {
                    let below = table.index(CompiledColor::Symbol(s));
                    let above = table.index(CompiledColor::SymbolState(s, next));
                    push([above, below, blank, carry], &mut tiles);
                }
            }
        }
    }

    // Idle tile: the accepting head cell may repeat itself.
    let done = table.index(CompiledColor::SymbolState(blank_sym, accepting));
    push([done, done, blank, blank], &mut tiles);

    // The all-blank tile.
    push([blank, blank, blank, blank], &mut tiles);

    TileSet::new(colors, tiles).expect("compiled tile set is well-formed")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompileError {
    LatticeTooNarrow { word_len: usize, cols: usize },
    LatticeTooShort { rows: usize },
    UnknownSymbol { symbol: String },
    BlankInWord,
}

impl core::fmt::Display for CompileError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CompileError::LatticeTooNarrow { word_len, cols } => {
                write!(f, "{cols} columns cannot hold a word of length {word_len} plus a blank")
            }
            CompileError::LatticeTooShort { rows } => {
                write!(f, "lattice needs at least 2 rows, got {rows}")
            }
            CompileError::UnknownSymbol { symbol } => {
                write!(f, "input symbol {symbol:?} not in the machine's alphabet")
            }
            CompileError::BlankInWord => write!(f, "input words must be non-blank"),
        }
    }
}

/// Builds the `h x l` bounded-tiling instance whose bottom boundary is the
/// initial description of the machine on `w` and whose top boundary is the
/// normalised accepting description. Left and right boundaries are blank, so
/// a head state can never escape the tape region.
pub fn compile_instance(
    tm: &TuringMachine,
    w: &[String],
    rows: usize,
    cols: usize,
) -> Result<BTInstance, CompileError> {
    assert!(validate_tm(tm).is_empty(), "machine failed validation");
    if cols < w.len() + 1 {
        return Err(CompileError::LatticeTooNarrow { word_len: w.len(), cols });
    }
    if rows < 2 {
        return Err(CompileError::LatticeTooShort { rows });
    }
    let table = ColorTable::new(tm);
    let tiles = compile_tiles(tm);
    let blank = table.index(CompiledColor::Blank);
    let blank_sym = tm.blank_index();
    let initial = tm.state_index(&tm.initial).expect("invalid machine");
    let accepting = tm.state_index(&tm.accepting).expect("invalid machine");

    let mut bottom = Vec::with_capacity(cols);
    for col in 0..cols {
        let color = if col < w.len() {
            let s = tm
                .symbol_index(&w[col])
                .ok_or_else(|| CompileError::UnknownSymbol { symbol: w[col].clone() })?;
            if s == blank_sym {
                return Err(CompileError::BlankInWord);
            }
            if col == 0 {
                CompiledColor::SymbolState(s, initial)
            } else {
                CompiledColor::Symbol(s)
            }
        } else if col == 0 {
            // Empty word: the head starts on a blank cell.
            CompiledColor::SymbolState(blank_sym, initial)
        } else {
            CompiledColor::Symbol(blank_sym)
        };
        bottom.push(table.index(color));
    }

    let mut top = Vec::with_capacity(cols);
    top.push(table.index(CompiledColor::SymbolState(blank_sym, accepting)));
    for _ in 1..cols {
        top.push(table.index(CompiledColor::Symbol(blank_sym)));
    }

    let boundary = Boundary { top, bottom, left: vec![blank; rows], right: vec![blank; rows] };
    Ok(BTInstance::new(rows, cols, tiles, boundary).expect("compiled instance is well-formed"))
}
