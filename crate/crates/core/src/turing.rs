//! Nondeterministic Turing machines with bounded-time acceptance decided by
//! exhaustive search.
//!
//! This is the left end of the reduction chain: acceptance verdicts computed
//! here are the ground truth the compiled tiling instances are checked
//! against.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Head movement of a quintuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Move {
    Left,
    Stay,
    Right,
}

/// Program instruction `(q, s, q', s', M)`: in state `q` reading `s`, switch
/// to `q'`, write `s'` and move `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quintuple {
    pub state: String,
    pub read: String,
    pub next_state: String,
    pub write: String,
    pub mov: Move,
}

/// A Turing machine as raw data. Nothing is checked at construction;
/// [`validate_tm`] reports violations and the executable operations assume a
/// machine that passed validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuringMachine {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub blank: String,
    pub initial: String,
    pub accepting: String,
    pub program: Vec<Quintuple>,
}

impl TuringMachine {
    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.alphabet.iter().position(|s| s == name)
    }

    pub fn blank_index(&self) -> usize {
        self.symbol_index(&self.blank).expect("blank symbol not in alphabet")
    }

    /// True iff no two quintuples share the same `(q, s)` prefix.
    pub fn deterministic(&self) -> bool {
        let mut prefixes = BTreeSet::new();
        self.program
            .iter()
            .all(|q| prefixes.insert((q.state.clone(), q.read.clone())))
    }
}

/// Reports every violated well-formedness invariant; an empty list means the
/// machine is valid. Violations are data, not errors.
pub fn validate_tm(tm: &TuringMachine) -> Vec<String> {
    let mut violations = Vec::new();
    let mut seen_states = BTreeSet::new();
    for s in &tm.states {
        if !seen_states.insert(s.clone()) {
            violations.push(format!("duplicate state {s:?}"));
        }
    }
    let mut seen_syms = BTreeSet::new();
    for s in &tm.alphabet {
        if !seen_syms.insert(s.clone()) {
            violations.push(format!("duplicate symbol {s:?}"));
        }
    }
    if tm.state_index(&tm.initial).is_none() {
        violations.push(format!("initial state {:?} not in the state set", tm.initial));
    }
    if tm.state_index(&tm.accepting).is_none() {
        violations.push(format!("accepting state {:?} not in the state set", tm.accepting));
    }
    if tm.symbol_index(&tm.blank).is_none() {
        violations.push(format!("blank symbol {:?} not in the alphabet", tm.blank));
    }
    for (i, q) in tm.program.iter().enumerate() {
        if tm.state_index(&q.state).is_none() {
            violations.push(format!("quintuple {i}: state {:?} not in the state set", q.state));
        }
        if tm.state_index(&q.next_state).is_none() {
            violations.push(format!(
                "quintuple {i}: next state {:?} not in the state set",
                q.next_state
            ));
        }
        if tm.symbol_index(&q.read).is_none() {
            violations.push(format!("quintuple {i}: read symbol {:?} not in the alphabet", q.read));
        }
        if tm.symbol_index(&q.write).is_none() {
            violations.push(format!(
                "quintuple {i}: write symbol {:?} not in the alphabet",
                q.write
            ));
        }
    }
    violations
}

/// Instantaneous description: tape contents (symbol indices into the
/// machine's alphabet), head position and head state (state index). Cells
/// outside the stored tape are blank.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct InstantDescription {
    pub tape: Vec<usize>,
    pub head: usize,
    pub state: usize,
}

impl InstantDescription {
    pub fn new(tape: Vec<usize>, head: usize, state: usize) -> Self {
        assert!(head < tape.len(), "head index outside the tape");
        InstantDescription { tape, head, state }
    }
}

/// One successor per applicable quintuple; an empty set means the machine
/// halts at `id`. The tape grows by one blank cell when the head moves past
/// either end.
pub fn step(tm: &TuringMachine, id: &InstantDescription) -> Vec<InstantDescription> {
    assert!(id.head < id.tape.len(), "head index outside the tape");
    let blank = tm.blank_index();
    let mut successors = Vec::new();
    for q in &tm.program {
        let q_state = tm.state_index(&q.state).expect("invalid machine");
        let q_read = tm.symbol_index(&q.read).expect("invalid machine");
        if q_state != id.state || q_read != id.tape[id.head] {
            continue;
        }
        let mut tape = id.tape.clone();
        tape[id.head] = tm.symbol_index(&q.write).expect("invalid machine");
        let head = match q.mov {
            Move::Stay => id.head,
            Move::Right => {
                if id.head + 1 == tape.len() {
                    tape.push(blank);
                }
                id.head + 1
            }
            Move::Left => {
                if id.head == 0 {
                    tape.insert(0, blank);
                    0
                } else {
                    id.head - 1
                }
            }
        };
        let state = tm.state_index(&q.next_state).expect("invalid machine");
        successors.push(InstantDescription { tape, head, state });
    }
    successors
}

/// Successors restricted to a fixed `bound`-cell tape: moves that would take
/// the head outside `[0, bound)` are discarded.
fn step_bounded(tm: &TuringMachine, id: &InstantDescription, bound: usize) -> Vec<InstantDescription> {
    let mut successors = Vec::new();
    for q in &tm.program {
        let q_state = tm.state_index(&q.state).expect("invalid machine");
        let q_read = tm.symbol_index(&q.read).expect("invalid machine");
        if q_state != id.state || q_read != id.tape[id.head] {
            continue;
        }
        let head = match q.mov {
            Move::Stay => Some(id.head),
            Move::Right => (id.head + 1 < bound).then_some(id.head + 1),
            Move::Left => id.head.checked_sub(1),
        };
        let Some(head) = head else { continue };
        let mut tape = id.tape.clone();
        tape[id.head] = tm.symbol_index(&q.write).expect("invalid machine");
        let state = tm.state_index(&q.next_state).expect("invalid machine");
        successors.push(InstantDescription { tape, head, state });
    }
    successors
}

/// What counts as an accepting snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltMode {
    /// Any instantaneous description whose state is the accepting state.
    AcceptState,
    /// The normalised accepting description: accepting state, head on the
    /// leftmost cell, tape entirely blank.
    StrictHalt,
}

/// Verdict of [`accepts_within`], with a witness computation on acceptance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Acceptance {
    pub accepted: bool,
    pub witness: Option<Vec<InstantDescription>>,
}

/// Builds the initial description for input `w` on a `tape_bound`-cell tape
/// pre-filled with blanks: the input occupies the leftmost cells and the head
/// starts on cell 0 in the initial state. The empty word is encoded as the
/// all-blank tape.
pub fn initial_id(tm: &TuringMachine, w: &[String], tape_bound: usize) -> InstantDescription {
    assert!(tape_bound >= w.len().max(1), "tape bound smaller than the input");
    let blank = tm.blank_index();
    let mut tape = vec![blank; tape_bound];
    for (i, sym) in w.iter().enumerate() {
        let idx = tm.symbol_index(sym).expect("input symbol not in the alphabet");
        assert!(idx != blank, "input words are non-blank");
        tape[i] = idx;
    }
    InstantDescription { tape, head: 0, state: tm.state_index(&tm.initial).expect("invalid machine") }
}

fn is_accepting(tm: &TuringMachine, id: &InstantDescription, mode: HaltMode) -> bool {
    let accepting = tm.state_index(&tm.accepting).expect("invalid machine");
    if id.state != accepting {
        return false;
    }
    match mode {
        HaltMode::AcceptState => true,
        HaltMode::StrictHalt => {
            let blank = tm.blank_index();
            id.head == 0 && id.tape.iter().all(|&s| s == blank)
        }
    }
}

/// Decides whether some computation of at most `t` steps from the initial
/// description reaches acceptance without the head ever leaving the first
/// `tape_bound` cells. Depth-first search in quintuple order with a
/// visited-ID set for cycle pruning; the witness is the found chain of IDs.
pub fn accepts_within(
    tm: &TuringMachine,
    w: &[String],
    t: usize,
    tape_bound: usize,
    mode: HaltMode,
) -> Acceptance {
    let start = initial_id(tm, w, tape_bound);
    // visited maps an ID to the largest remaining budget it was explored
    // with; re-expansion is only needed with a strictly larger budget.
    let mut visited: BTreeSet<(InstantDescription, usize)> = BTreeSet::new();
    let mut path = vec![start.clone()];
    if dfs(tm, &start, t, tape_bound, mode, &mut visited, &mut path) {
        return Acceptance { accepted: true, witness: Some(path) };
    }
    Acceptance { accepted: false, witness: None }
}

fn dfs(
    tm: &TuringMachine,
    id: &InstantDescription,
    budget: usize,
    bound: usize,
    mode: HaltMode,
    visited: &mut BTreeSet<(InstantDescription, usize)>,
    path: &mut Vec<InstantDescription>,
) -> bool {
    if is_accepting(tm, id, mode) {
        return true;
    }
    if budget == 0 {
        return false;
    }
    if !visited.insert((id.clone(), budget)) {
        return false;
    }
    for succ in step_bounded(tm, id, bound) {
        path.push(succ.clone());
        if dfs(tm, &succ, budget - 1, bound, mode, visited, path) {
            return true;
        }
        path.pop();
    }
    false
}
