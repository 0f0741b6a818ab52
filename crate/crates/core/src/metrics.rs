//! Combined distances and the exact minimum combined distance of a pair.
//!
//! Two algorithms compute the same minimum and the same witness:
//!
//! * `naive` scans every unordered symbol pair.
//! * `pruned` first takes `beta`, the best value over pairs adjacent in `A` or
//!   in `B`. Combined `L_p` is at least `L_inf(A) + L_inf(B)`, so a pair that
//!   can still tie the minimum differs by at most `beta` in every coordinate of
//!   the joint point `(A-cell, B-cell)`. Symbols are bucketed in that
//!   `2d`-dimensional space with side `beta`, and only pairs in the same or
//!   neighbouring buckets are examined.
//!
//! Values within [`TIE_TOLERANCE`] of the minimum count as ties, and ties go to
//! the lexicographically smallest `(s, t)` with `s < t`. Work is split into
//! fixed symbol ranges and reduced associatively, so the result does not depend
//! on the thread count.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{ArrangementPair, GridSpec, Norm, Symbol};

/// Absolute tolerance for comparing non-integral distances.
pub const TIE_TOLERANCE: f64 = 1e-9;

const CHUNK: usize = 2048;
const GROUP_CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Naive,
    Pruned,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Naive => "naive",
            Algorithm::Pruned => "pruned",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Algorithm::Naive),
            "pruned" => Ok(Algorithm::Pruned),
            _ => Err(Error::Precondition(format!("unknown algorithm {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub min_combined: f64,
    /// `(s, t)` with `s < t`.
    pub witness: (Symbol, Symbol),
    pub pairs_examined: u64,
    pub algorithm: Algorithm,
}

/// Coordinates of every symbol's cell in both grids, flattened.
pub(crate) struct Tables<'a> {
    pub(crate) spec: GridSpec,
    pub(crate) norm: Norm,
    pub(crate) a: Vec<u32>,
    pub(crate) b: Vec<u32>,
    a_inv: &'a [usize],
    b_inv: &'a [usize],
}

impl<'a> Tables<'a> {
    pub(crate) fn new(pair: &'a ArrangementPair, norm: Norm) -> Result<Self> {
        let spec = *pair.spec();
        norm.check_fits(&spec)?;
        let cells = spec.coordinate_table();
        let d = spec.d();
        let by_symbol = |placement: &[usize]| {
            let mut out = vec![0u32; placement.len() * d];
            for (row, &c) in out.chunks_exact_mut(d).zip(placement) {
                row.copy_from_slice(&cells[c * d..(c + 1) * d]);
            }
            out
        };
        Ok(Self {
            spec,
            norm,
            a: by_symbol(pair.a().cells()),
            b: by_symbol(pair.b().cells()),
            a_inv: pair.a().symbols(),
            b_inv: pair.b().symbols(),
        })
    }

    #[inline]
    fn coords<'t>(&self, table: &'t [u32], s: usize) -> &'t [u32] {
        let d = self.spec.d();
        &table[s * d..(s + 1) * d]
    }

    #[inline]
    pub(crate) fn combined(&self, s: usize, t: usize) -> f64 {
        let n = self.norm;
        n.from_raw(n.raw(self.coords(&self.a, s), self.coords(&self.a, t)))
            + n.from_raw(n.raw(self.coords(&self.b, s), self.coords(&self.b, t)))
    }

    #[inline]
    fn linf_a(&self, s: usize, t: usize) -> u64 {
        Norm::Inf.raw(self.coords(&self.a, s), self.coords(&self.a, t))
    }

    #[inline]
    fn linf_b(&self, s: usize, t: usize) -> u64 {
        Norm::Inf.raw(self.coords(&self.b, s), self.coords(&self.b, t))
    }
}

/// Running minimum with tolerance-aware, order-independent tie breaking.
///
/// Keeps every distinct value within `TIE_TOLERANCE` of the current minimum,
/// each with its smallest witness. Since the minimum only decreases, nothing
/// dropped can become relevant again.
#[derive(Debug, Clone, Default)]
pub(crate) struct MinTracker {
    best: Option<f64>,
    entries: Vec<(f64, usize, usize)>,
}

impl MinTracker {
    pub(crate) fn best(&self) -> f64 {
        self.best.unwrap_or(f64::INFINITY)
    }

    #[inline]
    pub(crate) fn offer(&mut self, value: f64, s: usize, t: usize) {
        let best = self.best();
        if value > best + TIE_TOLERANCE {
            return;
        }
        if value < best {
            self.best = Some(value);
            self.entries.retain(|e| e.0 <= value + TIE_TOLERANCE);
        }
        match self.entries.iter_mut().find(|e| e.0 == value) {
            Some(e) => {
                if (s, t) < (e.1, e.2) {
                    e.1 = s;
                    e.2 = t;
                }
            }
            None => self.entries.push((value, s, t)),
        }
    }

    pub(crate) fn merge(mut self, other: MinTracker) -> MinTracker {
        for (v, s, t) in other.entries {
            self.offer(v, s, t);
        }
        self
    }

    /// `(value, s, t)` of the smallest witness among the tied entries.
    pub(crate) fn finish(&self) -> Option<(f64, usize, usize)> {
        self.entries
            .iter()
            .copied()
            .min_by_key(|&(_, s, t)| (s, t))
    }
}

fn report(tracker: MinTracker, pairs_examined: u64, algorithm: Algorithm) -> Result<VerifyReport> {
    let (min_combined, s, t) = tracker
        .finish()
        .ok_or_else(|| Error::InvariantViolation("no symbol pair was examined".into()))?;
    Ok(VerifyReport {
        min_combined,
        witness: (Symbol(s), Symbol(t)),
        pairs_examined,
        algorithm,
    })
}

/// `dist_p(A, s, t) + dist_p(B, s, t)`.
pub fn combined_distance(pair: &ArrangementPair, norm: Norm, s: Symbol, t: Symbol) -> Result<f64> {
    let count = pair.symbol_count();
    if s.0 >= count || t.0 >= count {
        return Err(Error::InvalidSymbol(format!(
            "symbols {s} and {t} must be below {count}"
        )));
    }
    if s == t {
        return Err(Error::InvalidSymbol(format!("symbol {s} paired with itself")));
    }
    let tables = Tables::new(pair, norm)?;
    Ok(tables.combined(s.0, t.0))
}

/// Exact minimum by scanning all `N(N-1)/2` pairs.
pub fn min_combined_naive(pair: &ArrangementPair, norm: Norm) -> Result<VerifyReport> {
    let tables = Tables::new(pair, norm)?;
    let count = pair.symbol_count();
    let tracker = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut tracker = MinTracker::default();
            for s in chunk * CHUNK..((chunk + 1) * CHUNK).min(count) {
                for t in s + 1..count {
                    tracker.offer(tables.combined(s, t), s, t);
                }
            }
            tracker
        })
        .reduce(MinTracker::default, MinTracker::merge);
    let pairs = (count as u64) * (count as u64 - 1) / 2;
    report(tracker, pairs, Algorithm::Naive)
}

/// Visit every cell index in the clipped `L_inf` box of radius `r` around `center`.
pub(crate) fn for_each_in_box(spec: &GridSpec, center: &[u32], r: u64, mut visit: impl FnMut(usize)) {
    let n = spec.n() as u64;
    let lo: Vec<u64> = center.iter().map(|&c| (c as u64).saturating_sub(r)).collect();
    let hi: Vec<u64> = center.iter().map(|&c| (c as u64 + r).min(n - 1)).collect();
    let strides: Vec<u64> = std::iter::successors(Some(1u64), |s| Some(s * n))
        .take(center.len())
        .collect();
    let mut cur = lo.clone();
    let mut index: u64 = lo.iter().zip(&strides).map(|(&x, &st)| x * st).sum();
    let row = hi[0] - lo[0] + 1;
    loop {
        for x in 0..row {
            visit((index + x) as usize);
        }
        // the row loop covers axis 0; step the remaining axes like an odometer
        let mut axis = 1;
        loop {
            if axis == center.len() {
                return;
            }
            if cur[axis] < hi[axis] {
                cur[axis] += 1;
                index += strides[axis];
                break;
            }
            index -= (cur[axis] - lo[axis]) * strides[axis];
            cur[axis] = lo[axis];
            axis += 1;
        }
    }
}

/// Joint-space bucket index: symbol `s` becomes the point
/// `(A-cell coords, B-cell coords)` in `2d` dimensions, bucketed with side `width`.
struct JointBuckets {
    radix: u128,
    axes: usize,
    /// Symbols sorted by bucket key.
    order: Vec<usize>,
    /// `(key, start, end)` ranges into `order`, sorted by key.
    groups: Vec<(u128, usize, usize)>,
    lookup: Lookup,
}

enum Lookup {
    /// `group + 1` per key, 0 for an empty bucket.
    Dense(Vec<u32>),
    Sparse(HashMap<u128, usize>),
}

/// Largest key space given a dense lookup table.
const DENSE_LIMIT: u128 = 1 << 26;

impl JointBuckets {
    fn new(tables: &Tables<'_>, width: u64) -> Self {
        let d = tables.spec.d();
        let count = tables.spec.cell_count();
        let radix = (tables.spec.n() as u64).div_ceil(width) as u128;
        let key_of = |s: usize| -> u128 {
            let a = tables.coords(&tables.a, s);
            let b = tables.coords(&tables.b, s);
            a.iter()
                .chain(b)
                .rev()
                .fold(0u128, |acc, &x| acc * radix + (x as u64 / width) as u128)
        };
        let mut keyed: Vec<(u128, usize)> = (0..count).into_par_iter().map(|s| (key_of(s), s)).collect();
        keyed.par_sort_unstable();
        let mut groups = Vec::new();
        let mut start = 0;
        for i in 1..=keyed.len() {
            if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                groups.push((keyed[start].0, start, i));
                start = i;
            }
        }
        let space = radix.checked_pow(2 * d as u32);
        let lookup = match space {
            Some(space) if space <= DENSE_LIMIT.max(2 * count as u128) && groups.len() < u32::MAX as usize => {
                let mut table = vec![0u32; space as usize];
                for (g, &(key, _, _)) in groups.iter().enumerate() {
                    table[key as usize] = g as u32 + 1;
                }
                Lookup::Dense(table)
            }
            _ => Lookup::Sparse(groups.iter().enumerate().map(|(g, &(key, _, _))| (key, g)).collect()),
        };
        Self {
            radix,
            axes: 2 * d,
            order: keyed.into_iter().map(|(_, s)| s).collect(),
            groups,
            lookup,
        }
    }

    fn members(&self, group: usize) -> &[usize] {
        let (_, start, end) = self.groups[group];
        &self.order[start..end]
    }

    /// Offsets in `{-1, 0, 1}^axes` whose first non-zero entry is positive.
    fn forward_offsets(&self) -> Vec<Vec<i8>> {
        let total = 3usize.pow(self.axes as u32);
        (0..total)
            .map(|mut code| {
                (0..self.axes)
                    .map(|_| {
                        let o = (code % 3) as i8 - 1;
                        code /= 3;
                        o
                    })
                    .collect::<Vec<i8>>()
            })
            .filter(|o| o.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0))
            .collect()
    }

    fn digits(&self, mut key: u128, out: &mut [u128]) {
        for digit in out.iter_mut() {
            *digit = key % self.radix;
            key /= self.radix;
        }
    }

    /// Group holding the bucket at `digits + offset`, if any.
    fn neighbour(&self, key: u128, digits: &[u128], places: &[u128], offset: &[i8]) -> Option<usize> {
        let mut target = key;
        for ((&o, &digit), &place) in offset.iter().zip(digits).zip(places) {
            match o {
                1 if digit + 1 < self.radix => target += place,
                -1 if digit > 0 => target -= place,
                0 => {}
                _ => return None,
            }
        }
        match &self.lookup {
            Lookup::Dense(table) => table[target as usize].checked_sub(1).map(|g| g as usize),
            Lookup::Sparse(map) => map.get(&target).copied(),
        }
    }
}

/// Exact minimum, same value and witness as [`min_combined_naive`], visiting
/// only pairs that share or neighbour a joint-space bucket.
pub fn min_combined_pruned(pair: &ArrangementPair, norm: Norm) -> Result<VerifyReport> {
    let tables = Tables::new(pair, norm)?;
    let spec = tables.spec;
    let count = pair.symbol_count();

    // Seed beta with the pairs that are facet-adjacent in A or in B.
    let mut seed = MinTracker::default();
    let mut seeded = 0u64;
    for inv in [tables.a_inv, tables.b_inv] {
        let mut stride = 1usize;
        for _ in 0..spec.d() {
            for cell in 0..count {
                if (cell / stride) % spec.n() + 1 < spec.n() {
                    let (s, t) = (inv[cell], inv[cell + stride]);
                    let (s, t) = (s.min(t), s.max(t));
                    seed.offer(tables.combined(s, t), s, t);
                    seeded += 1;
                }
            }
            stride *= spec.n();
        }
    }

    // A pair tying a value `v` has every joint coordinate within `v`, so a pass
    // with bucket side `w` is exact once its result is at most `w`. Try half the
    // seed first (much smaller buckets), then widen to the value found.
    let reach = |v: f64| ((v + 1e-6).floor() as u64).max(1);
    let mut width = reach(seed.best() / 2.0);
    let mut tracker = seed;
    let mut examined = seeded;
    loop {
        let (found, visited) = bucket_pass(&tables, width, tracker);
        tracker = found;
        examined += visited;
        let needed = reach(tracker.best());
        if needed <= width {
            break;
        }
        width = needed;
    }
    report(tracker, examined, Algorithm::Pruned)
}

fn bucket_pass(tables: &Tables<'_>, width: u64, seed: MinTracker) -> (MinTracker, u64) {
    let buckets = JointBuckets::new(tables, width);
    let offsets = buckets.forward_offsets();
    let groups = buckets.groups.len();
    let places: Vec<u128> = (0..buckets.axes as u32).map(|i| buckets.radix.pow(i)).collect();

    (0..groups.div_ceil(GROUP_CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut tracker = seed.clone();
            let mut examined = 0u64;
            let mut digits = vec![0u128; buckets.axes];
            let mut visit = |s: usize, t: usize, tracker: &mut MinTracker| {
                examined += 1;
                let (s, t) = (s.min(t), s.max(t));
                let floor = tables.linf_a(s, t) + tables.linf_b(s, t);
                if floor as f64 <= tracker.best() + 1e-6 {
                    tracker.offer(tables.combined(s, t), s, t);
                }
            };
            for g in chunk * GROUP_CHUNK..((chunk + 1) * GROUP_CHUNK).min(groups) {
                let here = buckets.members(g);
                for (i, &s) in here.iter().enumerate() {
                    for &t in &here[i + 1..] {
                        visit(s, t, &mut tracker);
                    }
                }
                let key = buckets.groups[g].0;
                buckets.digits(key, &mut digits);
                for offset in &offsets {
                    if let Some(h) = buckets.neighbour(key, &digits, &places, offset) {
                        for &s in here {
                            for &t in buckets.members(h) {
                                visit(s, t, &mut tracker);
                            }
                        }
                    }
                }
            }
            (tracker, examined)
        })
        .reduce(
            || (MinTracker::default(), 0),
            |(ta, ea), (tb, eb)| (ta.merge(tb), ea + eb),
        )
}

pub fn min_combined(pair: &ArrangementPair, norm: Norm, algorithm: Algorithm) -> Result<VerifyReport> {
    match algorithm {
        Algorithm::Naive => min_combined_naive(pair, norm),
        Algorithm::Pruned => min_combined_pruned(pair, norm),
    }
}

/// Closest pair under `L_inf` among distinct lattice points of `spec`.
///
/// `points[i]` is the flat coordinate slice of point `i`; the result is
/// `(distance, i, j)` with `i < j`, the smallest `(i, j)` among ties. Uses a
/// uniform bucket grid sized so that buckets hold about one point each, and
/// widens the neighbourhood until it provably covers the closest pair.
pub fn closest_pair_linf(spec: &GridSpec, points: &[&[u32]]) -> Option<(u64, usize, usize)> {
    let m = points.len();
    if m < 2 {
        return None;
    }
    let (n, d) = (spec.n() as u64, spec.d());
    let per_axis = ((m as f64).powf(1.0 / d as f64).floor() as u64).clamp(1, n);
    let width = n.div_ceil(per_axis);
    let buckets_per_axis = n.div_ceil(width);
    let bucket_spec = GridSpec::new(buckets_per_axis.max(2) as usize, d).ok()?;
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); bucket_spec.cell_count()];
    let bucket_coords: Vec<Vec<u32>> = points
        .iter()
        .map(|p| p.iter().map(|&x| (x as u64 / width) as u32).collect())
        .collect();
    for (i, bc) in bucket_coords.iter().enumerate() {
        let index = bc.iter().rev().fold(0usize, |acc, &x| acc * bucket_spec.n() + x as usize);
        buckets[index].push(i);
    }

    let mut reach = 1u64;
    loop {
        let mut best: Option<(u64, usize, usize)> = None;
        for (i, bc) in bucket_coords.iter().enumerate() {
            for_each_in_box(&bucket_spec, bc, reach, |bucket| {
                for &j in &buckets[bucket] {
                    if j > i {
                        let dist = Norm::Inf.raw(points[i], points[j]);
                        let cand = (dist, i, j);
                        if best.is_none_or(|b| cand < b) {
                            best = Some(cand);
                        }
                    }
                }
            });
        }
        match best {
            Some(b) if b.0.div_ceil(width) <= reach => return Some(b),
            Some(b) => reach = b.0.div_ceil(width),
            None if reach >= buckets_per_axis => return None,
            None => reach = (reach * 2).min(buckets_per_axis),
        }
    }
}
