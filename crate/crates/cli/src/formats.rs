//! JSON file formats of the command-line pipeline.
//!
//! Key names are part of the CLI contract; serialized artifacts are treated
//! as golden files by the test suite.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use tilepeps_core::hamiltonian::PlaquetteConfig;
use tilepeps_core::tensor::{LegLabel, PepsGrid, Tensor};
use tilepeps_core::tiling::{BTInstance, Boundary, TileSet};
use tilepeps_core::turing::{Move, Quintuple, TuringMachine};

/// Turing machine file: `states`, `alphabet`, `blank`, `initial`,
/// `accepting`, `program` (5-element lists `[state, read, next, write,
/// move]` with move one of `"L"`, `"S"`, `"R"`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TmFile {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub blank: String,
    pub initial: String,
    pub accepting: String,
    pub program: Vec<[String; 5]>,
}

impl TmFile {
    pub fn to_machine(&self) -> Result<TuringMachine, String> {
        let mut program = Vec::with_capacity(self.program.len());
        for q in &self.program {
            let mov = match q[4].as_str() {
                "L" => Move::Left,
                "S" => Move::Stay,
                "R" => Move::Right,
                other => return Err(format!("unknown move {other:?}, expected L, S or R")),
            };
            program.push(Quintuple {
                state: q[0].clone(),
                read: q[1].clone(),
                next_state: q[2].clone(),
                write: q[3].clone(),
                mov,
            });
        }
        Ok(TuringMachine {
            states: self.states.clone(),
            alphabet: self.alphabet.clone(),
            blank: self.blank.clone(),
            initial: self.initial.clone(),
            accepting: self.accepting.clone(),
            program,
        })
    }

    pub fn from_machine(tm: &TuringMachine) -> Self {
        TmFile {
            states: tm.states.clone(),
            alphabet: tm.alphabet.clone(),
            blank: tm.blank.clone(),
            initial: tm.initial.clone(),
            accepting: tm.accepting.clone(),
            program: tm
                .program
                .iter()
                .map(|q| {
                    let mov = match q.mov {
                        Move::Left => "L",
                        Move::Stay => "S",
                        Move::Right => "R",
                    };
                    [
                        q.state.clone(),
                        q.read.clone(),
                        q.next_state.clone(),
                        q.write.clone(),
                        mov.to_string(),
                    ]
                })
                .collect(),
        }
    }
}

/// Tile set file: `colors` (names) and `tiles` (`[u, d, l, r]` colour
/// indices).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TileSetFile {
    pub colors: Vec<String>,
    pub tiles: Vec<[usize; 4]>,
}

impl TileSetFile {
    pub fn to_tileset(&self) -> Result<TileSet, String> {
        TileSet::new(self.colors.clone(), self.tiles.clone()).map_err(|e| e.to_string())
    }

    pub fn from_tileset(ts: &TileSet) -> Self {
        TileSetFile { colors: ts.colors().to_vec(), tiles: ts.tiles().to_vec() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryFile {
    pub top: Vec<usize>,
    pub bottom: Vec<usize>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// Instance file: `colors`, `tiles`, `rows`, `cols`, `boundary`. `top` and
/// `bottom` are indexed by column (left to right); `left` and `right` by
/// row, row 0 at the bottom.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub colors: Vec<String>,
    pub tiles: Vec<[usize; 4]>,
    pub rows: usize,
    pub cols: usize,
    pub boundary: BoundaryFile,
}

impl InstanceFile {
    pub fn to_instance(&self) -> Result<BTInstance, String> {
        let ts = TileSet::new(self.colors.clone(), self.tiles.clone()).map_err(|e| e.to_string())?;
        BTInstance::new(
            self.rows,
            self.cols,
            ts,
            Boundary {
                top: self.boundary.top.clone(),
                bottom: self.boundary.bottom.clone(),
                left: self.boundary.left.clone(),
                right: self.boundary.right.clone(),
            },
        )
        .map_err(|e| e.to_string())
    }

    pub fn from_instance(inst: &BTInstance) -> Self {
        let b = inst.boundary();
        InstanceFile {
            colors: inst.tileset().colors().to_vec(),
            tiles: inst.tileset().tiles().to_vec(),
            rows: inst.rows(),
            cols: inst.cols(),
            boundary: BoundaryFile {
                top: b.top.clone(),
                bottom: b.bottom.clone(),
                left: b.left.clone(),
                right: b.right.clone(),
            },
        }
    }
}

/// Plaquette configuration file: `rows`, `cols`, `tuples` (row-major
/// `[u, d, l, r]`, row 0 at the bottom).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigFile {
    pub rows: usize,
    pub cols: usize,
    pub tuples: Vec<[usize; 4]>,
}

impl ConfigFile {
    pub fn to_config(&self) -> Result<PlaquetteConfig, String> {
        PlaquetteConfig::new(self.rows, self.cols, self.tuples.clone())
            .ok_or_else(|| "tuple count does not match the lattice".to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LegFile {
    pub label: String,
    pub dim: usize,
}

/// One site tensor: `legs` (label + dim, in storage order) and `entries`
/// (flat row-major, integers or floats).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorFile {
    pub legs: Vec<LegFile>,
    pub entries: Vec<serde_json::Number>,
}

/// PEPS grid file: `rows`, `cols`, `tensors` row-major with row 0 at the
/// bottom.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridFile {
    pub rows: usize,
    pub cols: usize,
    pub tensors: Vec<TensorFile>,
}

fn label_name(label: LegLabel) -> &'static str {
    match label {
        LegLabel::Up => "up",
        LegLabel::Down => "down",
        LegLabel::Left => "left",
        LegLabel::Right => "right",
        LegLabel::Phys => "phys",
    }
}

fn parse_label(name: &str) -> Result<LegLabel, String> {
    Ok(match name {
        "up" => LegLabel::Up,
        "down" => LegLabel::Down,
        "left" => LegLabel::Left,
        "right" => LegLabel::Right,
        "phys" => LegLabel::Phys,
        other => return Err(format!("unknown leg label {other:?}")),
    })
}

/// A parsed grid in one of the two arithmetic modes. Mode is a grid-level
/// attribute: a grid is integral only if every entry of every tensor is an
/// integer.
pub enum ParsedGrid {
    Int(PepsGrid<BigInt>),
    Float(PepsGrid<f64>),
}

impl GridFile {
    pub fn from_grid(grid: &PepsGrid<BigInt>) -> Self {
        let tensors = grid
            .tensors()
            .iter()
            .map(|t| TensorFile {
                legs: t
                    .legs()
                    .iter()
                    .map(|(label, dim)| LegFile { label: label_name(*label).to_string(), dim: *dim })
                    .collect(),
                entries: t
                    .data()
                    .iter()
                    .map(|e| {
                        serde_json::Number::from(
                            e.to_i64().expect("grid entries fit in 64 bits"),
                        )
                    })
                    .collect(),
            })
            .collect();
        GridFile { rows: grid.rows(), cols: grid.cols(), tensors }
    }

    pub fn to_grid(&self) -> Result<ParsedGrid, String> {
        let integral = self.tensors.iter().all(|t| t.entries.iter().all(|n| n.as_i64().is_some()));
        if integral {
            let mut tensors = Vec::with_capacity(self.tensors.len());
            for t in &self.tensors {
                tensors.push(self.parse_tensor(t, |n| Ok(BigInt::from(n.as_i64().unwrap())))?);
            }
            let grid =
                PepsGrid::new(self.rows, self.cols, tensors).map_err(|e| e.to_string())?;
            Ok(ParsedGrid::Int(grid))
        } else {
            let mut tensors = Vec::with_capacity(self.tensors.len());
            for t in &self.tensors {
                tensors.push(self.parse_tensor(t, |n| {
                    n.as_f64().ok_or_else(|| format!("entry {n} is not a float"))
                })?);
            }
            let grid =
                PepsGrid::new(self.rows, self.cols, tensors).map_err(|e| e.to_string())?;
            Ok(ParsedGrid::Float(grid))
        }
    }

    fn parse_tensor<T: tilepeps_core::tensor::Entry>(
        &self,
        t: &TensorFile,
        convert: impl Fn(&serde_json::Number) -> Result<T, String>,
    ) -> Result<Tensor<T>, String> {
        let mut legs = Vec::with_capacity(t.legs.len());
        for leg in &t.legs {
            legs.push((parse_label(&leg.label)?, leg.dim));
        }
        let mut data = Vec::with_capacity(t.entries.len());
        for n in &t.entries {
            data.push(convert(n)?);
        }
        Tensor::new(legs, data).map_err(|e| e.to_string())
    }
}

/// Operator file: `dim` and a dense row-major `entries` float list of
/// length `dim * dim`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorFile {
    pub dim: usize,
    pub entries: Vec<f64>,
}

impl OperatorFile {
    pub fn from_matrix(m: &nalgebra::DMatrix<f64>) -> Self {
        let dim = m.nrows();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(m[(i, j)]);
            }
        }
        OperatorFile { dim, entries }
    }

    pub fn to_matrix(&self) -> Result<nalgebra::DMatrix<f64>, String> {
        if self.entries.len() != self.dim * self.dim {
            return Err(format!(
                "operator of dimension {} needs {} entries, got {}",
                self.dim,
                self.dim * self.dim,
                self.entries.len()
            ));
        }
        Ok(nalgebra::DMatrix::from_row_slice(self.dim, self.dim, &self.entries))
    }
}
