//! Exhaustive search over every placement of `B` for tiny grids.
//!
//! `A` stays fixed (the identity unless another base is given); applying one
//! symbol renaming to both grids keeps every combined distance, so this loses
//! no generality. Placements are enumerated in lexicographic order of
//! `symbol -> cell index`, split by the cell of symbol 0 across workers and
//! reduced in that order.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Arrangement, ArrangementPair, GridSpec, Norm};
use crate::metrics::TIE_TOLERANCE;

/// Largest number of cells the oracle will enumerate (`9! = 362880`).
pub const MAX_CELLS: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub spec: GridSpec,
    pub norm: Norm,
    /// Maximum over all `B` of the minimum combined distance.
    pub optimum: f64,
    /// First maximizer in enumeration order.
    pub best_pair: ArrangementPair,
    /// Number of `B` placements covered, pruned subtrees included.
    pub arrangements_enumerated: u64,
}

#[derive(Debug, Clone)]
pub struct Oracle {
    spec: GridSpec,
    norm: Norm,
    base: Arrangement,
    pruning: bool,
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

impl Oracle {
    pub fn new(spec: GridSpec, norm: Norm) -> Result<Self> {
        if spec.cell_count() > MAX_CELLS {
            return Err(Error::TooLarge {
                cells: spec.cell_count(),
                limit: MAX_CELLS,
            });
        }
        Ok(Self {
            spec,
            norm,
            base: Arrangement::identity(spec),
            pruning: true,
        })
    }

    /// Fix `A` to `base` instead of the identity.
    pub fn with_base(mut self, base: Arrangement) -> Result<Self> {
        if *base.spec() != self.spec {
            return Err(Error::InvalidSpec(format!(
                "base arrangement has {}, oracle has {}",
                base.spec(),
                self.spec
            )));
        }
        self.base = base;
        Ok(self)
    }

    /// Abandon partial placements that can no longer matter. On by default;
    /// results are identical either way.
    pub fn with_pruning(mut self, pruning: bool) -> Self {
        self.pruning = pruning;
        self
    }

    fn search(&self, goal: Goal) -> Search {
        let count = self.spec.cell_count();
        let cells = self.spec.coordinate_table();
        let d = self.spec.d();
        let at = |c: usize| &cells[c * d..(c + 1) * d];
        let norm = self.norm;
        let dist = |c1: usize, c2: usize| norm.from_raw(norm.raw(at(c1), at(c2)));
        let placement = self.base.cells();
        let mut a = [[0.0; MAX_CELLS]; MAX_CELLS];
        let mut b = [[0.0; MAX_CELLS]; MAX_CELLS];
        for i in 0..count {
            for j in 0..count {
                a[i][j] = dist(placement[i], placement[j]);
                b[i][j] = dist(i, j);
            }
        }
        Search {
            count,
            a,
            b,
            pruning: self.pruning,
            goal,
            placed: [0; MAX_CELLS],
            used: 0,
            best: f64::NEG_INFINITY,
            best_placement: None,
            hits: 0,
            covered: 0,
        }
    }

    fn run(&self, goal: Goal) -> Vec<Search> {
        let template = self.search(goal);
        (0..template.count)
            .into_par_iter()
            .map(|first| {
                let mut s = template.clone();
                s.placed[0] = first;
                s.used = 1 << first;
                s.descend(1, f64::INFINITY);
                s
            })
            .collect()
    }

    pub fn exact_optimum(&self) -> OracleResult {
        let mut best = f64::NEG_INFINITY;
        let mut best_placement = None;
        let mut covered = 0;
        for part in self.run(Goal::Optimum) {
            covered += part.covered;
            if part.best > best + TIE_TOLERANCE {
                best = part.best;
                best_placement = part.best_placement;
            }
        }
        let placement = best_placement.expect("at least one full placement");
        let b = Arrangement::from_cells(self.spec, placement[..self.spec.cell_count()].to_vec())
            .expect("enumerated placements are permutations");
        OracleResult {
            spec: self.spec,
            norm: self.norm,
            optimum: best,
            best_pair: ArrangementPair::new(self.base.clone(), b).expect("same spec"),
            arrangements_enumerated: covered,
        }
    }

    /// Placements of `B` whose minimum combined distance is at least `threshold`
    /// (within `TIE_TOLERANCE`).
    pub fn count_solutions(&self, threshold: f64) -> u64 {
        self.run(Goal::Count(threshold))
            .into_iter()
            .map(|part| part.hits)
            .sum()
    }
}

pub fn exact_optimum(spec: GridSpec, norm: Norm) -> Result<OracleResult> {
    Ok(Oracle::new(spec, norm)?.exact_optimum())
}

pub fn count_solutions(spec: GridSpec, norm: Norm, threshold: f64) -> Result<u64> {
    Ok(Oracle::new(spec, norm)?.count_solutions(threshold))
}

#[derive(Debug, Clone, Copy)]
enum Goal {
    Optimum,
    Count(f64),
}

#[derive(Clone)]
struct Search {
    count: usize,
    /// Distances between the A-cells of two symbols.
    a: [[f64; MAX_CELLS]; MAX_CELLS],
    /// Distances between two cells.
    b: [[f64; MAX_CELLS]; MAX_CELLS],
    pruning: bool,
    goal: Goal,
    placed: [usize; MAX_CELLS],
    used: u32,
    best: f64,
    best_placement: Option<[usize; MAX_CELLS]>,
    hits: u64,
    covered: u64,
}

impl Search {
    /// Whether a subtree whose placements are all at most `bound` can matter.
    fn hopeless(&self, bound: f64) -> bool {
        match self.goal {
            Goal::Optimum => bound <= self.best + TIE_TOLERANCE,
            Goal::Count(threshold) => bound < threshold - TIE_TOLERANCE,
        }
    }

    fn descend(&mut self, depth: usize, partial: f64) {
        if depth == self.count {
            self.covered += 1;
            match self.goal {
                Goal::Optimum => {
                    if partial > self.best + TIE_TOLERANCE {
                        self.best = partial;
                        self.best_placement = Some(self.placed);
                    }
                }
                Goal::Count(_) => {
                    if !self.hopeless(partial) {
                        self.hits += 1;
                    }
                }
            }
            return;
        }
        for cell in 0..self.count {
            if self.used & (1 << cell) != 0 {
                continue;
            }
            let mut bound = partial;
            for t in 0..depth {
                bound = bound.min(self.a[depth][t] + self.b[cell][self.placed[t]]);
            }
            if self.pruning && self.hopeless(bound) {
                self.covered += factorial(self.count - depth - 1);
                continue;
            }
            self.placed[depth] = cell;
            self.used |= 1 << cell;
            self.descend(depth + 1, bound);
            self.used &= !(1 << cell);
        }
    }
}
