//! Command-line front end for the tiling / Hamiltonian / PEPS workbench.
//!
//! Every subcommand reads and writes JSON files (see [`formats`]) and prints
//! a machine-readable `RESULT: <value>` line on standard output. Exit codes:
//! 0 for decisive answers, 1 for malformed input, 2 for budget refusals.

pub mod formats;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::Zero;
use serde::de::DeserializeOwned;
use serde::Serialize;

use tilepeps_core::hamiltonian::{clh_decide, ground_energy, total_energy, ClhVerdict, Orientation};
use tilepeps_core::parent::{
    bulk_term_operator, check_parent_property, dominates, parent_term, OperatorMatrix, ParentError,
    Region,
};
use tilepeps_core::tensor::{
    assemble_peps, bulk_tensor, norm_squared, zero_test_open_f64, LegLabel, PepsGrid,
    torus_norm_squared,
};
use tilepeps_core::tiling::{count_from_prefix, solve, BTInstance, TileSet};
use tilepeps_core::turing::{accepts_within, validate_tm, HaltMode};

use formats::{
    ConfigFile, GridFile, InstanceFile, OperatorFile, ParsedGrid, TileSetFile, TmFile,
};

/// Tolerance used to declare a floating-point norm zero, relative to the
/// product of entry-magnitude bounds.
const FLOAT_ZERO_TOL: f64 = 1e-20;

#[derive(Debug)]
enum CliError {
    /// Malformed input: parse failures, invalid machines, inconsistent files.
    Malformed(String),
    /// A size budget refused the computation.
    Budget(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Malformed(_) => 1,
            CliError::Budget(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Malformed(m) | CliError::Budget(m) => m,
        }
    }
}

fn malformed(context: &str, detail: impl std::fmt::Display) -> CliError {
    CliError::Malformed(format!("{context}: {detail}"))
}

#[derive(Parser, Debug)]
#[command(
    name = "tilepeps",
    version,
    about = "Bounded tilings, commuting Hamiltonians and PEPS zero testing"
)]
struct Cli {
    /// Worker threads for parallelisable counts (results are identical for
    /// any thread count).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Max plaquettes for exhaustive energy minimisation.
    #[arg(long, global = true, env = "TILEPEPS_BUDGET_CELLS", default_value_t = 12)]
    budget_cells: usize,

    /// Max double-layer row dimension during contraction.
    #[arg(long, global = true, default_value_t = 65536)]
    budget_row_dim: usize,

    /// Max operator dimension for spectral computations.
    #[arg(long, global = true, default_value_t = 4096)]
    budget_op_dim: usize,

    /// Subspace tolerance for parent-Hamiltonian checks.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,

    #[command(subcommand)]
    cmd: Cmd,
}

/// Validated run configuration shared by the subcommands.
struct PipelineConfig {
    threads: usize,
    budget_cells: usize,
    budget_row_dim: usize,
    budget_op_dim: usize,
    #[allow(dead_code)]
    tol: f64,
}

impl PipelineConfig {
    fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        if cli.threads == 0 {
            return Err(CliError::Malformed("--threads must be positive".into()));
        }
        for (name, v) in [
            ("--budget-cells", cli.budget_cells),
            ("--budget-row-dim", cli.budget_row_dim),
            ("--budget-op-dim", cli.budget_op_dim),
        ] {
            if v == 0 {
                return Err(CliError::Malformed(format!("{name} must be positive")));
            }
        }
        if !(cli.tol > 0.0 && cli.tol < 1e-3) {
            return Err(CliError::Malformed("--tol must lie in (0, 1e-3)".into()));
        }
        Ok(PipelineConfig {
            threads: cli.threads,
            budget_cells: cli.budget_cells,
            budget_row_dim: cli.budget_row_dim,
            budget_op_dim: cli.budget_op_dim,
            tol: cli.tol,
        })
    }

    /// Entry-count budget for a double-layer sweep whose row dimension is
    /// bounded by `budget_row_dim`: one extra doubled leg may be pending.
    fn contraction_entry_budget<T: tilepeps_core::tensor::Entry>(&self, grid: &PepsGrid<T>) -> usize {
        let max_leg = grid
            .tensors()
            .iter()
            .flat_map(|t| t.legs().iter())
            .filter(|(l, _)| *l != LegLabel::Phys)
            .map(|(_, d)| *d)
            .max()
            .unwrap_or(1);
        self.budget_row_dim.saturating_mul(max_leg.saturating_mul(max_leg))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RegionArg {
    Horizontal,
    Vertical,
}

impl RegionArg {
    fn region(self) -> Region {
        match self {
            RegionArg::Horizontal => Region::horizontal_pair(),
            RegionArg::Vertical => Region::vertical_pair(),
        }
    }

    fn orientation(self) -> Orientation {
        match self {
            RegionArg::Horizontal => Orientation::Horizontal,
            RegionArg::Vertical => Orientation::Vertical,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Compile a Turing machine and input word into a tiling instance.
    CompileTm {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long, default_value = "")]
        word: String,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search for a valid tiling of an instance.
    Solve {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Count the valid tilings of an instance exactly.
    Count {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Count the periodic tilings of a tile set on a torus.
    TorusCount {
        #[arg(long)]
        tileset: PathBuf,
        #[arg(long)]
        lx: usize,
        #[arg(long)]
        ly: usize,
    },
    /// Evaluate the energy of a plaquette configuration.
    Energy {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        config: PathBuf,
    },
    /// Exact ground energy of the instance Hamiltonian.
    GroundEnergy {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Decide the commuting-local-Hamiltonian promise problem (YES/NO).
    Clh {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Assemble the PEPS of an instance and write it to a grid file.
    BuildPeps {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Test whether the state of a grid file is the null vector.
    ZeroTest {
        #[arg(long)]
        grid: PathBuf,
    },
    /// Test whether the translation-invariant state vanishes on a torus.
    ZeroTestTorus {
        #[arg(long)]
        tileset: PathBuf,
        #[arg(long)]
        lx: usize,
        #[arg(long)]
        ly: usize,
    },
    /// Canonical parent term of a tile-set tensor on a pair of plaquettes.
    ParentTerm {
        #[arg(long)]
        tileset: PathBuf,
        #[arg(long, value_enum, default_value_t = RegionArg::Horizontal)]
        region: RegionArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify the kernel-equals-image property of the parent term.
    CheckParent {
        #[arg(long)]
        tileset: PathBuf,
        #[arg(long, value_enum, default_value_t = RegionArg::Horizontal)]
        region: RegionArg,
    },
    /// Check h1 >= h2 in the positive-semidefinite order.
    Dominates {
        #[arg(long)]
        h1: PathBuf,
        #[arg(long)]
        h2: PathBuf,
    },
    /// Run the full reduction pipeline on one machine/word and report
    /// whether all verdicts agree.
    VerifyPipeline {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long, default_value = "")]
        word: String,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
    },
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| malformed(&format!("reading {}", path.display()), e))?;
    serde_json::from_str(&text).map_err(|e| malformed(&format!("parsing {}", path.display()), e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| malformed("serializing output", e))?;
    fs::write(path, text).map_err(|e| malformed(&format!("writing {}", path.display()), e))
}

fn load_instance(path: &Path) -> Result<BTInstance, CliError> {
    let file: InstanceFile = read_json(path)?;
    file.to_instance().map_err(|e| malformed(&format!("instance {}", path.display()), e))
}

fn load_tileset(path: &Path) -> Result<TileSet, CliError> {
    let file: TileSetFile = read_json(path)?;
    file.to_tileset().map_err(|e| malformed(&format!("tile set {}", path.display()), e))
}

fn load_operator(path: &Path) -> Result<OperatorMatrix, CliError> {
    let file: OperatorFile = read_json(path)?;
    let m = file.to_matrix().map_err(|e| malformed(&format!("operator {}", path.display()), e))?;
    OperatorMatrix::new(m).map_err(|e| malformed(&format!("operator {}", path.display()), e))
}

fn load_machine(path: &Path) -> Result<tilepeps_core::turing::TuringMachine, CliError> {
    let file: TmFile = read_json(path)?;
    let tm = file.to_machine().map_err(|e| malformed(&format!("machine {}", path.display()), e))?;
    let violations = validate_tm(&tm);
    if !violations.is_empty() {
        return Err(CliError::Malformed(format!(
            "machine {}: {}",
            path.display(),
            violations.join("; ")
        )));
    }
    Ok(tm)
}

fn split_word(tm: &tilepeps_core::turing::TuringMachine, word: &str) -> Result<Vec<String>, CliError> {
    let mut symbols = Vec::new();
    for ch in word.chars() {
        let s = ch.to_string();
        if tm.symbol_index(&s).is_none() {
            return Err(CliError::Malformed(format!("input symbol {s:?} not in the alphabet")));
        }
        symbols.push(s);
    }
    Ok(symbols)
}

fn parent_err(e: ParentError) -> CliError {
    match e {
        ParentError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
        other => CliError::Malformed(other.to_string()),
    }
}

/// Exact tiling count, optionally partitioned across threads by the tile
/// choice of the first plaquette; the per-prefix counts are summed in a
/// fixed order, so the result does not depend on the thread count.
fn parallel_count(inst: &BTInstance, threads: usize) -> BigUint {
    let n_tiles = inst.tileset().tiles().len();
    if threads <= 1 || n_tiles < 2 {
        return count_from_prefix(inst, &[]);
    }
    let mut partials: Vec<Option<BigUint>> = vec![None; n_tiles];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads.min(n_tiles))
            .map(|worker| {
                let inst = inst.clone();
                scope.spawn(move || {
                    let mut out = Vec::new();
                    let mut idx = worker;
                    while idx < n_tiles {
                        out.push((idx, count_from_prefix(&inst, &[idx])));
                        idx += threads.min(n_tiles);
                    }
                    out
                })
            })
            .collect();
        for handle in handles {
            for (idx, c) in handle.join().expect("count worker panicked") {
                partials[idx] = Some(c);
            }
        }
    });
    let mut total = BigUint::zero();
    for p in partials {
        total += p.expect("all prefixes counted");
    }
    total
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let cfg = PipelineConfig::from_cli(cli)?;
    match &cli.cmd {
        Cmd::CompileTm { machine, word, rows, cols, out } => {
            let tm = load_machine(machine)?;
            let w = split_word(&tm, word)?;
            let inst = tilepeps_core::tmcompile::compile_instance(&tm, &w, *rows, *cols)
                .map_err(|e| CliError::Malformed(e.to_string()))?;
            write_json(out, &InstanceFile::from_instance(&inst))?;
            println!(
                "RESULT: instance rows={} cols={} colors={} tiles={}",
                inst.rows(),
                inst.cols(),
                inst.tileset().num_colors(),
                inst.tileset().tiles().len()
            );
        }
        Cmd::Solve { instance } => {
            let inst = load_instance(instance)?;
            match solve(&inst) {
                Some(t) => {
                    for row in (0..inst.rows()).rev() {
                        let indices: Vec<String> = (0..inst.cols())
                            .map(|c| t.tile_at(row, c).to_string())
                            .collect();
                        println!("TILING row={}: {}", row, indices.join(" "));
                    }
                    println!("RESULT: solvable");
                }
                None => println!("RESULT: unsolvable"),
            }
        }
        Cmd::Count { instance } => {
            let inst = load_instance(instance)?;
            println!("RESULT: {}", parallel_count(&inst, cfg.threads));
        }
        Cmd::TorusCount { tileset, lx, ly } => {
            let ts = load_tileset(tileset)?;
            if *lx == 0 || *ly == 0 {
                return Err(CliError::Malformed("torus dimensions must be positive".into()));
            }
            let states = ts.num_colors().checked_pow(*lx as u32).unwrap_or(usize::MAX);
            if states > cfg.budget_row_dim {
                return Err(CliError::Budget(format!(
                    "transfer matrix needs {states} states, budget is {}",
                    cfg.budget_row_dim
                )));
            }
            println!("RESULT: {}", tilepeps_core::tiling::torus_count(&ts, *lx, *ly));
        }
        Cmd::Energy { instance, config } => {
            let inst = load_instance(instance)?;
            let file: ConfigFile = read_json(config)?;
            let c = file.to_config().map_err(|e| malformed("configuration", e))?;
            if c.rows() != inst.rows() || c.cols() != inst.cols() {
                return Err(CliError::Malformed(
                    "configuration lattice does not match the instance".into(),
                ));
            }
            println!("RESULT: {}", total_energy(&inst, &c));
        }
        Cmd::GroundEnergy { instance } => {
            let inst = load_instance(instance)?;
            let e = ground_energy(&inst, cfg.budget_cells)
                .map_err(|e| CliError::Budget(e.to_string()))?;
            println!("RESULT: {e}");
        }
        Cmd::Clh { instance } => {
            let inst = load_instance(instance)?;
            let v = clh_decide(&inst, cfg.budget_cells)
                .map_err(|e| CliError::Budget(e.to_string()))?;
            println!("RESULT: {}", if v == ClhVerdict::Yes { "YES" } else { "NO" });
        }
        Cmd::BuildPeps { instance, out } => {
            let inst = load_instance(instance)?;
            let grid = assemble_peps(&inst);
            write_json(out, &GridFile::from_grid(&grid))?;
            println!("RESULT: grid rows={} cols={}", grid.rows(), grid.cols());
        }
        Cmd::ZeroTest { grid } => {
            let file: GridFile = read_json(grid)?;
            let parsed = file.to_grid().map_err(|e| malformed("grid", e))?;
            let zero = match parsed {
                ParsedGrid::Int(g) => norm_squared(&g, cfg.contraction_entry_budget(&g))
                    .map_err(|e| CliError::Budget(e.to_string()))?
                    .is_zero(),
                ParsedGrid::Float(g) => {
                    zero_test_open_f64(&g, cfg.contraction_entry_budget(&g), FLOAT_ZERO_TOL)
                        .map_err(|e| CliError::Budget(e.to_string()))?
                }
            };
            println!("RESULT: {}", if zero { "zero" } else { "nonzero" });
        }
        Cmd::ZeroTestTorus { tileset, lx, ly } => {
            let ts = load_tileset(tileset)?;
            if *lx == 0 || *ly == 0 {
                return Err(CliError::Malformed("torus dimensions must be positive".into()));
            }
            let n = torus_norm_squared(&ts, *lx, *ly, cfg.budget_row_dim)
                .map_err(|e| CliError::Budget(e.to_string()))?;
            println!("RESULT: {}", if n.is_zero() { "zero" } else { "nonzero" });
        }
        Cmd::ParentTerm { tileset, region, out } => {
            let ts = load_tileset(tileset)?;
            let a = bulk_tensor(&ts).to_f64();
            let h = parent_term(&a, &region.region(), cfg.budget_op_dim).map_err(parent_err)?;
            write_json(out, &OperatorFile::from_matrix(h.matrix()))?;
            let rank = h.matrix().trace().round() as i64;
            println!("RESULT: dim={} rank={rank}", h.dim());
        }
        Cmd::CheckParent { tileset, region } => {
            let ts = load_tileset(tileset)?;
            let a = bulk_tensor(&ts).to_f64();
            let r = region.region();
            let h = parent_term(&a, &r, cfg.budget_op_dim).map_err(parent_err)?;
            let holds = check_parent_property(&h, &a, &r, cfg.budget_op_dim).map_err(parent_err)?;
            // Also report domination against the diagonal tiling term.
            let ht = bulk_term_operator(&ts, region.orientation(), cfg.budget_op_dim)
                .map_err(parent_err)?;
            let dominated = dominates(&h, &ht).map_err(parent_err)?;
            println!("RESULT: {}", holds && dominated);
        }
        Cmd::Dominates { h1, h2 } => {
            let a = load_operator(h1)?;
            let b = load_operator(h2)?;
            let d = dominates(&a, &b).map_err(parent_err)?;
            println!("RESULT: {d}");
        }
        Cmd::VerifyPipeline { machine, word, rows, cols } => {
            let tm = load_machine(machine)?;
            let w = split_word(&tm, word)?;
            let inst = tilepeps_core::tmcompile::compile_instance(&tm, &w, *rows, *cols)
                .map_err(|e| CliError::Malformed(e.to_string()))?;
            let accepted = accepts_within(&tm, &w, *rows, *cols, HaltMode::StrictHalt).accepted;
            println!("STAGE accepts_within: {accepted}");
            let solvable = solve(&inst).is_some();
            println!("STAGE solve: {}", if solvable { "solvable" } else { "unsolvable" });
            let energy = ground_energy(&inst, cfg.budget_cells)
                .map_err(|e| CliError::Budget(format!("ground-energy stage: {e}")))?;
            println!("STAGE ground_energy: {energy}");
            let grid = assemble_peps(&inst);
            let n2 = norm_squared(&grid, cfg.contraction_entry_budget(&grid))
                .map_err(|e| CliError::Budget(format!("zero-test stage: {e}")))?;
            let nonzero = !n2.is_zero();
            println!("STAGE zero_test: {}", if nonzero { "nonzero" } else { "zero" });
            let verdicts = [accepted, solvable, energy == 0, nonzero];
            if verdicts.iter().all(|&v| v) {
                println!("RESULT: agree positive");
            } else if verdicts.iter().all(|&v| !v) {
                println!("RESULT: agree negative");
            } else {
                println!("RESULT: disagree");
            }
        }
    }
    Ok(())
}

/// Parses `argv` and runs the selected subcommand, returning the process
/// exit code.
pub fn run<I>(args: I) -> i32
where
    I: IntoIterator<Item = String>,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
