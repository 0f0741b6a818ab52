//! The lower/upper envelope of the optimum and a constructive upper-bound witness.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{ArrangementPair, Cell, GridSpec, Norm, Symbol};
use crate::metrics::closest_pair_linf;

/// `floor(sqrt(x))`.
pub fn floor_sqrt(x: u64) -> u64 {
    x.isqrt()
}

/// `ceil(sqrt(x))`.
pub fn ceil_sqrt(x: u64) -> u64 {
    let r = x.isqrt();
    if r * r == x {
        r
    } else {
        r + 1
    }
}

pub fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// `2 floor(sqrt(n / 3))`, computed as twice the largest `m` with `3 m^2 <= n`.
pub fn lower_bound(n: u64) -> u64 {
    let mut m = floor_sqrt(n / 3);
    while 3 * (m + 1) * (m + 1) <= n {
        m += 1;
    }
    while 3 * m * m > n {
        m -= 1;
    }
    2 * m
}

/// `ceil(sqrt(n-1)) + floor(sqrt(n-1))`, the `L_inf` upper bound for every `d`.
pub fn upper_bound_linf(n: u64) -> u64 {
    ceil_sqrt(n - 1) + floor_sqrt(n - 1)
}

/// `d^(1/p)` times the `L_inf` upper bound.
pub fn upper_bound(n: u64, d: u64, norm: Norm) -> f64 {
    let base = upper_bound_linf(n) as f64;
    match norm {
        Norm::Inf => base,
        Norm::L(1) => d as f64 * base,
        Norm::L(p) => (d as f64).powf(1.0 / p as f64) * base,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    pub n: u64,
    pub d: u64,
    pub norm: Norm,
    pub lower: u64,
    /// The `L_inf` upper bound before norm scaling.
    pub upper_linf: u64,
    pub upper: f64,
    /// `upper / lower`; `None` when `lower == 0`.
    pub ratio: Option<f64>,
}

impl BoundsReport {
    pub fn new(spec: GridSpec, norm: Norm) -> Self {
        let (n, d) = (spec.n() as u64, spec.d() as u64);
        let lower = lower_bound(n);
        let upper = upper_bound(n, d, norm);
        Self {
            n,
            d,
            norm,
            lower,
            upper_linf: upper_bound_linf(n),
            upper,
            ratio: (lower > 0).then(|| upper / lower as f64),
        }
    }
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lower={}", self.lower)?;
        writeln!(f, "upper={}", self.upper)?;
        writeln!(f, "upper_inf={}", self.upper_linf)?;
        match self.ratio {
            Some(r) => write!(f, "ratio={r}"),
            None => write!(f, "ratio=undefined"),
        }
    }
}

/// A symbol pair inside a `(u+1)^d` block of `A` whose images in `B` are
/// closest, so its combined `L_inf` distance is at most `u + v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperBoundWitness {
    pub u: u64,
    pub sub_grid_origin: Cell,
    /// Minimum `L_inf` distance among the block's cells in `B`.
    pub v: u64,
    pub witness: (Symbol, Symbol),
    /// Combined `L_inf` distance of the witness pair.
    pub combined: u64,
}

impl UpperBoundWitness {
    /// The volume inequality `(u+1)^d v^d <= (n-1+v)^d`, i.e. `u v <= n - 1`.
    pub fn satisfies_volume_bound(&self, n: u64) -> bool {
        self.u * self.v < n
    }
}

/// Witness from the block anchored at the origin.
pub fn upper_bound_witness(pair: &ArrangementPair) -> Result<UpperBoundWitness> {
    let d = pair.spec().d();
    witness_at(pair, &vec![0; d], &WitnessTables::new(pair))
}

/// Try every block position and return the witness with the smallest combined
/// distance (first anchor in cell order among ties).
pub fn upper_bound_witness_scan(pair: &ArrangementPair) -> Result<UpperBoundWitness> {
    let spec = *pair.spec();
    let u = ceil_sqrt(spec.n() as u64 - 1) as usize;
    let span = spec.n() - u;
    let tables = WitnessTables::new(pair);
    let anchors = GridSpec::new(span.max(2), spec.d())?;
    let mut best: Option<UpperBoundWitness> = None;
    for index in 0..anchors.cell_count() {
        let origin = anchors.cell_at(index);
        if origin.coords().iter().any(|&x| x >= span) {
            continue;
        }
        let w = witness_at(pair, origin.coords(), &tables)?;
        if best.as_ref().is_none_or(|b| w.combined < b.combined) {
            best = Some(w);
        }
    }
    best.ok_or_else(|| Error::InvariantViolation("no anchor position".into()))
}

struct WitnessTables {
    cells: Vec<u32>,
}

impl WitnessTables {
    fn new(pair: &ArrangementPair) -> Self {
        Self {
            cells: pair.spec().coordinate_table(),
        }
    }
}

fn witness_at(pair: &ArrangementPair, origin: &[usize], tables: &WitnessTables) -> Result<UpperBoundWitness> {
    let spec = *pair.spec();
    let (n, d) = (spec.n(), spec.d());
    let u = ceil_sqrt(n as u64 - 1) as usize;
    if u + 1 > n || origin.iter().any(|&x| x + u >= n) {
        return Err(Error::InvariantViolation(format!(
            "block of side {} at {origin:?} does not fit a grid of side {n}",
            u + 1
        )));
    }

    // symbols of the block in A, in cell order
    let block = GridSpec::new((u + 1).max(2), d)?;
    let mut symbols = Vec::with_capacity(block.cell_count());
    let mut offset = vec![0usize; d];
    for local in 0..block.cell_count() {
        block.decode(local, &mut offset);
        if offset.iter().any(|&x| x > u) {
            continue;
        }
        let coords: Vec<usize> = origin.iter().zip(&offset).map(|(&o, &x)| o + x).collect();
        symbols.push(pair.a().symbol_at(&Cell::new(coords))?.0);
    }

    let table = &tables.cells;
    let b_points: Vec<&[u32]> = symbols
        .iter()
        .map(|&s| {
            let c = pair.b().cells()[s];
            &table[c * d..(c + 1) * d]
        })
        .collect();
    let (v, i, j) = closest_pair_linf(&spec, &b_points)
        .ok_or_else(|| Error::InvariantViolation("block holds fewer than two symbols".into()))?;
    let (s, t) = (symbols[i].min(symbols[j]), symbols[i].max(symbols[j]));
    let a_of = |s: usize| {
        let c = pair.a().cells()[s];
        &table[c * d..(c + 1) * d]
    };
    let combined = Norm::Inf.raw(a_of(s), a_of(t)) + v;
    Ok(UpperBoundWitness {
        u: u as u64,
        sub_grid_origin: Cell::new(origin.to_vec()),
        v,
        witness: (Symbol(s), Symbol(t)),
        combined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{construct_identity, construct_special};
    use crate::metrics::combined_distance;

    #[test]
    fn integer_roots() {
        for x in 0..10_000u64 {
            let f = floor_sqrt(x);
            assert!(f * f <= x && (f + 1) * (f + 1) > x);
            let c = ceil_sqrt(x);
            assert!(c * c >= x && (c == 0 || (c - 1) * (c - 1) < x));
        }
        assert_eq!(floor_sqrt(u64::MAX), u32::MAX as u64);
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_bound(13), 4);
        assert_eq!(lower_bound(3), 2);
        assert_eq!(lower_bound(2), 0);
        for n in 2..100_000u64 {
            let m = lower_bound(n) / 2;
            assert!(3 * m * m <= n && 3 * (m + 1) * (m + 1) > n);
        }
    }

    #[test]
    fn upper_bound_examples() {
        assert_eq!(upper_bound(3, 2, Norm::Inf), 3.0);
        assert_eq!(upper_bound(2, 2, Norm::Inf), 2.0);
        assert_eq!(upper_bound(10, 2, Norm::L(1)), 12.0);
        assert_eq!(upper_bound_linf(13), 7);
        assert!((upper_bound(13, 2, Norm::L(2)) - 7.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn report_text() {
        let r = BoundsReport::new(GridSpec::new(13, 2).unwrap(), Norm::Inf);
        assert_eq!(r.to_string(), "lower=4\nupper=7\nupper_inf=7\nratio=1.75");
        let r = BoundsReport::new(GridSpec::new(2, 2).unwrap(), Norm::Inf);
        assert_eq!(r.ratio, None);
        assert!(r.to_string().ends_with("ratio=undefined"));
    }

    #[test]
    fn envelope_is_ordered_and_ratio_bounded() {
        for n in 2..20_000u64 {
            for d in [2u64, 3, 4] {
                for norm in [Norm::L(1), Norm::L(2), Norm::Inf] {
                    assert!(lower_bound(n) as f64 <= upper_bound(n, d, norm));
                }
            }
            if n >= 12 {
                assert!(upper_bound_linf(n) as f64 / lower_bound(n) as f64 <= 4.0, "n={n}");
            }
        }
    }

    #[test]
    fn witness_examples() {
        let id = construct_identity(GridSpec::new(2, 2).unwrap());
        let w = upper_bound_witness(&id).unwrap();
        assert_eq!((w.u, w.v, w.combined), (1, 1, 2));

        let special = construct_special(GridSpec::new(9, 2).unwrap()).unwrap();
        let w = upper_bound_witness(&special).unwrap();
        assert_eq!(w.u, 3);
        assert!(w.v <= 2 && w.combined <= 5);
        assert!(w.satisfies_volume_bound(9));
        let direct = combined_distance(&special, Norm::Inf, w.witness.0, w.witness.1).unwrap();
        assert_eq!(direct, w.combined as f64);

        let scanned = upper_bound_witness_scan(&special).unwrap();
        assert!(scanned.combined <= w.combined);
    }
}
