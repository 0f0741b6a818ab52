//! Grid geometry, symbols, arrangements and norms.
//!
//! Cells are integer lattice points `(x_1, ..., x_d)` with every coordinate in
//! `[0, n)`. A cell's index is `x_1 + x_2 n + ... + x_d n^(d-1)`, so the first
//! coordinate varies fastest. That is the order the text format writes rows in,
//! and the order of the identity arrangement.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Shape of one hypercubic grid: `n` cells per axis, `d` axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    n: usize,
    d: usize,
    cells: usize,
}

impl GridSpec {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSpec(format!("side length must be at least 2, got {n}")));
        }
        if d < 2 {
            return Err(Error::InvalidSpec(format!("dimension must be at least 2, got {d}")));
        }
        let cells = u32::try_from(d)
            .ok()
            .and_then(|d| n.checked_pow(d))
            .ok_or_else(|| Error::InvalidSpec(format!("{n}^{d} cells overflow usize")))?;
        Ok(Self { n, d, cells })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `n^d`.
    pub fn cell_count(&self) -> usize {
        self.cells
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        cell.coords.len() == self.d && cell.coords.iter().all(|&x| x < self.n)
    }

    pub fn cell_index(&self, cell: &Cell) -> Result<usize> {
        self.check(cell)?;
        Ok(cell.coords.iter().rev().fold(0, |acc, &x| acc * self.n + x))
    }

    /// # Panics
    /// Panics if `index >= cell_count()`.
    pub fn cell_at(&self, index: usize) -> Cell {
        let mut coords = vec![0; self.d];
        self.decode(index, &mut coords);
        Cell { coords }
    }

    pub(crate) fn decode(&self, mut index: usize, out: &mut [usize]) {
        assert!(index < self.cells, "cell index {index} out of range");
        for c in out.iter_mut() {
            *c = index % self.n;
            index /= self.n;
        }
    }

    pub(crate) fn check(&self, cell: &Cell) -> Result<()> {
        if cell.coords.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: cell.coords.len(),
            });
        }
        if !self.contains(cell) {
            return Err(Error::OutOfRange {
                coords: cell.coords.clone(),
                n: self.n,
            });
        }
        Ok(())
    }

    /// Flat `cell_count() * d` table of coordinates, indexed by cell.
    pub(crate) fn coordinate_table(&self) -> Vec<u32> {
        let mut table = vec![0u32; self.cells * self.d];
        let mut coords = vec![0usize; self.d];
        for (index, row) in table.chunks_exact_mut(self.d).enumerate() {
            self.decode(index, &mut coords);
            for (slot, &x) in row.iter_mut().zip(&coords) {
                *slot = x as u32;
            }
        }
        table
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} d={}", self.n, self.d)
    }
}

/// A cell center. Facet-adjacent cells differ by one in a single coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    coords: Vec<usize>,
}

impl Cell {
    pub fn new(coords: Vec<usize>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl From<Vec<usize>> for Cell {
    fn from(coords: Vec<usize>) -> Self {
        Self { coords }
    }
}

impl<const D: usize> From<[usize; D]> for Cell {
    fn from(coords: [usize; D]) -> Self {
        Self {
            coords: coords.to_vec(),
        }
    }
}

/// Dense symbol id in `0..n^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub usize);

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The `L_p` distance regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    /// Finite `p >= 1`.
    L(u32),
    Inf,
}

impl Norm {
    pub fn finite(p: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidNorm("p must be at least 1".into()));
        }
        Ok(Norm::L(p))
    }

    /// Check that raw distances on `spec` cannot overflow `u64`.
    pub fn check_fits(&self, spec: &GridSpec) -> Result<()> {
        let Norm::L(p) = *self else { return Ok(()) };
        let span = (spec.n() - 1) as u64;
        span.checked_pow(p)
            .and_then(|t| t.checked_mul(spec.d() as u64))
            .map(|_| ())
            .ok_or_else(|| {
                Error::InvalidNorm(format!("L{p} power sums overflow on a grid with {spec}"))
            })
    }

    /// Integer distance key, monotone in the true distance.
    ///
    /// `max |dx|` for `L_inf`, `sum |dx|` for `L_1`, `sum |dx|^p` otherwise.
    #[inline]
    pub(crate) fn raw(&self, a: &[u32], b: &[u32]) -> u64 {
        match *self {
            Norm::Inf => a
                .iter()
                .zip(b)
                .map(|(&x, &y)| x.abs_diff(y) as u64)
                .max()
                .unwrap_or(0),
            Norm::L(1) => a.iter().zip(b).map(|(&x, &y)| x.abs_diff(y) as u64).sum(),
            Norm::L(2) => a
                .iter()
                .zip(b)
                .map(|(&x, &y)| {
                    let t = x.abs_diff(y) as u64;
                    t * t
                })
                .sum(),
            Norm::L(p) => a
                .iter()
                .zip(b)
                .map(|(&x, &y)| (x.abs_diff(y) as u64).pow(p))
                .sum(),
        }
    }

    /// Convert a raw key back to the metric distance.
    #[inline]
    pub(crate) fn from_raw(&self, raw: u64) -> f64 {
        match *self {
            Norm::Inf | Norm::L(1) => raw as f64,
            Norm::L(2) => (raw as f64).sqrt(),
            Norm::L(3) => (raw as f64).cbrt(),
            Norm::L(p) => (raw as f64).powf(1.0 / p as f64),
        }
    }

    /// Whether distances under this norm are always integers.
    pub fn is_integral(&self) -> bool {
        matches!(self, Norm::Inf | Norm::L(1))
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::L(p) => write!(f, "{p}"),
            Norm::Inf => f.write_str("inf"),
        }
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "max" => Ok(Norm::Inf),
            other => other
                .parse::<u32>()
                .map_err(|_| Error::InvalidNorm(format!("expected a positive integer or 'inf', got {s:?}")))
                .and_then(Norm::finite),
        }
    }
}

/// `L_p` distance between two cell centers.
pub fn dist(norm: Norm, c1: &Cell, c2: &Cell) -> Result<f64> {
    if c1.dim() != c2.dim() {
        return Err(Error::DimensionMismatch {
            expected: c1.dim(),
            got: c2.dim(),
        });
    }
    let to_u32 = |c: &Cell| -> Result<Vec<u32>> {
        c.coords
            .iter()
            .map(|&x| {
                u32::try_from(x).map_err(|_| Error::OutOfRange {
                    coords: c.coords.clone(),
                    n: u32::MAX as usize,
                })
            })
            .collect()
    };
    let (a, b) = (to_u32(c1)?, to_u32(c2)?);
    if let Norm::L(p) = norm {
        let worst = a.iter().zip(&b).try_fold(0u64, |acc, (&x, &y)| {
            (x.abs_diff(y) as u64).checked_pow(p).and_then(|t| acc.checked_add(t))
        });
        if worst.is_none() {
            return Err(Error::InvalidNorm(format!("L{p} power sum overflows")));
        }
    }
    Ok(norm.from_raw(norm.raw(&a, &b)))
}

/// A labeling of every cell of one grid by a distinct symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrangement {
    spec: GridSpec,
    cell_of: Vec<usize>,
    symbol_at: Vec<usize>,
}

impl Arrangement {
    /// Build from `cell_of[symbol] = cell index`.
    pub fn from_cells(spec: GridSpec, cell_of: Vec<usize>) -> Result<Self> {
        let count = spec.cell_count();
        if cell_of.len() != count {
            return Err(Error::NotABijection(format!(
                "expected {count} symbols, got {}",
                cell_of.len()
            )));
        }
        let mut symbol_at = vec![usize::MAX; count];
        for (s, &c) in cell_of.iter().enumerate() {
            if c >= count {
                return Err(Error::NotABijection(format!(
                    "symbol {s} placed at cell index {c}, grid has {count} cells"
                )));
            }
            if symbol_at[c] != usize::MAX {
                return Err(Error::NotABijection(format!(
                    "cell index {c} holds both symbol {} and symbol {s}",
                    symbol_at[c]
                )));
            }
            symbol_at[c] = s;
        }
        Ok(Self {
            spec,
            cell_of,
            symbol_at,
        })
    }

    /// Build from `symbol_at[cell index] = symbol`.
    pub fn from_symbols(spec: GridSpec, symbol_at: Vec<usize>) -> Result<Self> {
        let inverse = Self::from_cells(spec, symbol_at)?;
        Ok(Self {
            spec,
            cell_of: inverse.symbol_at,
            symbol_at: inverse.cell_of,
        })
    }

    /// Symbol `k` on the cell with index `k`.
    pub fn identity(spec: GridSpec) -> Self {
        let cell_of: Vec<usize> = (0..spec.cell_count()).collect();
        Self {
            spec,
            symbol_at: cell_of.clone(),
            cell_of,
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.cell_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cell_of.is_empty()
    }

    pub fn cell_of(&self, s: Symbol) -> Option<Cell> {
        self.cell_of.get(s.0).map(|&c| self.spec.cell_at(c))
    }

    pub fn symbol_at(&self, cell: &Cell) -> Result<Symbol> {
        Ok(Symbol(self.symbol_at[self.spec.cell_index(cell)?]))
    }

    /// `symbol -> cell index`.
    pub fn cells(&self) -> &[usize] {
        &self.cell_of
    }

    /// `cell index -> symbol`.
    pub fn symbols(&self) -> &[usize] {
        &self.symbol_at
    }

    pub fn is_identity(&self) -> bool {
        self.cell_of.iter().enumerate().all(|(s, &c)| s == c)
    }

    /// Rename every symbol `s` to `perm[s]`, keeping cells fixed.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.len() {
            return Err(Error::NotABijection("relabeling has the wrong length".into()));
        }
        let symbol_at = self.symbol_at.iter().map(|&s| perm[s]).collect();
        Self::from_symbols(self.spec, symbol_at)
    }

    /// Re-run the O(N) bijection check on both maps.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if self.symbol_at.len() != n || n != self.spec.cell_count() {
            return Err(Error::NotABijection("map lengths disagree".into()));
        }
        for (s, &c) in self.cell_of.iter().enumerate() {
            if c >= n || self.symbol_at[c] != s {
                return Err(Error::NotABijection(format!(
                    "symbol {s} and cell {c} disagree between forward and inverse maps"
                )));
            }
        }
        Ok(())
    }
}

/// The two labelings `A` and `B` over one symbol set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrangementPair {
    a: Arrangement,
    b: Arrangement,
}

impl ArrangementPair {
    pub fn new(a: Arrangement, b: Arrangement) -> Result<Self> {
        if a.spec != b.spec {
            return Err(Error::InvalidSpec(format!(
                "grids disagree: A has {}, B has {}",
                a.spec, b.spec
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &Arrangement {
        &self.a
    }

    pub fn b(&self) -> &Arrangement {
        &self.b
    }

    pub fn spec(&self) -> &GridSpec {
        &self.a.spec
    }

    pub fn symbol_count(&self) -> usize {
        self.a.len()
    }

    /// Apply one symbol renaming to both grids.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        Self::new(self.a.relabeled(perm)?, self.b.relabeled(perm)?)
    }

    /// Relabel so that `A` becomes the identity. Every combined distance is kept.
    pub fn canonical(&self) -> Self {
        // symbol s sits on A-cell c; rename it to c.
        let perm = self.a.cell_of.clone();
        self.relabeled(&perm).expect("A placement is a permutation")
    }
}
