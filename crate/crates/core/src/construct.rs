//! Modular-coloring constructions of the second grid.
//!
//! Every construction keeps `A` as the identity and moves each cell to another
//! cell of the same color (coordinates taken mod `k`). The move acts on each axis
//! independently, so a construction is fully described by one permutation of
//! `0..n`, applied coordinate-wise.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bounds::{ceil_div, floor_sqrt};
use crate::error::{Error, Result};
use crate::grid::{Arrangement, ArrangementPair, Cell, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// `B = A`. Guarantees nothing beyond distinct cells.
    Identity,
    /// Perfect-square side `n = k^2`.
    Special,
    /// Any `n >= 3`.
    General,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Identity => "identity",
            Method::Special => "special",
            Method::General => "general",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Method::Identity),
            "special" => Ok(Method::Special),
            "general" => Ok(Method::General),
            _ => Err(Error::Precondition(format!("unknown construction method {s:?}"))),
        }
    }
}

/// Which construction was used, its modulus, and the proven minimum combined
/// `L_inf` distance of its output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstructionPlan {
    pub spec: GridSpec,
    pub method: Method,
    pub k: usize,
    pub guarantee: u64,
}

impl fmt::Display for ConstructionPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "method={}", self.method)?;
        writeln!(f, "k={}", self.k)?;
        write!(f, "guarantee={}", self.guarantee)
    }
}

impl ConstructionPlan {
    /// The plan for `method` on `spec`, or an error if it does not apply.
    pub fn for_method(spec: GridSpec, method: Method) -> Result<Self> {
        let n = spec.n();
        let (k, guarantee) = match method {
            Method::Identity => (0, 0),
            Method::Special => {
                let k = special_k(n).ok_or_else(|| {
                    Error::Precondition(format!("special construction needs n = k^2 with k >= 2, got n = {n}"))
                })?;
                (k, k as u64)
            }
            Method::General => {
                let k = select_k(n);
                if k == 0 {
                    return Err(Error::Precondition(format!(
                        "general construction needs n >= 3, got n = {n}"
                    )));
                }
                (k, 2 * k as u64)
            }
        };
        Ok(Self {
            spec,
            method,
            k,
            guarantee,
        })
    }

    /// The applicable method with the largest guarantee; ties go to `General`.
    pub fn best(spec: GridSpec) -> Self {
        [Method::General, Method::Special, Method::Identity]
            .into_iter()
            .filter_map(|m| Self::for_method(spec, m).ok())
            .reduce(|best, p| if p.guarantee > best.guarantee { p } else { best })
            .expect("identity always applies")
    }
}

/// Largest `k >= 1` with `3k <= ceil(n / k)`, or 0 when there is none.
///
/// The admissible `k` form a prefix of the positive integers (the left side
/// grows, the right side shrinks), and the answer lies within one of
/// `sqrt(n / 3)`, so the search starts there.
pub fn select_k(n: usize) -> usize {
    let fits = |k: usize| 3 * k <= ceil_div(n, k);
    let mut k = floor_sqrt((n / 3) as u64) as usize;
    while k > 0 && !fits(k) {
        k -= 1;
    }
    if k == 0 && !fits(1) {
        return 0;
    }
    k = k.max(1);
    while fits(k + 1) {
        k += 1;
    }
    k
}

/// Residues of the coordinates mod `k`.
///
/// # Panics
/// Panics if `k == 0`.
pub fn color_of(cell: &Cell, k: usize) -> Vec<usize> {
    assert!(k > 0, "coloring modulus must be positive");
    cell.coords().iter().map(|&x| x % k).collect()
}

fn special_k(n: usize) -> Option<usize> {
    let k = floor_sqrt(n as u64) as usize;
    (k >= 2 && k * k == n).then_some(k)
}

/// One-axis displacement for `n = k^2`: `x + ik`, wrapped by `k^2`.
pub fn special_axis_map(n: usize, k: usize) -> Vec<usize> {
    (0..n)
        .map(|x| {
            let shifted = x + (x % k) * k;
            if shifted < n {
                shifted
            } else {
                shifted.wrapping_sub(k * k)
            }
        })
        .collect()
}

/// One-axis displacement for the general case: `x + 3ik`, wrapped by
/// `M = ceil(n/k) k` when `i <= (n-1) mod k` and by `M - k` otherwise.
pub fn general_axis_map(n: usize, k: usize) -> Vec<usize> {
    let wrap = ceil_div(n, k) * k;
    let last_residue = (n - 1) % k;
    (0..n)
        .map(|x| {
            let i = x % k;
            let shifted = x + 3 * i * k;
            if shifted < n {
                shifted
            } else if i <= last_residue {
                shifted.wrapping_sub(wrap)
            } else {
                shifted.wrapping_sub(wrap - k)
            }
        })
        .collect()
}

fn check_axis_map(map: &[usize]) -> Result<()> {
    let n = map.len();
    let mut seen = vec![false; n];
    for (x, &y) in map.iter().enumerate() {
        if y >= n {
            return Err(Error::InvariantViolation(format!(
                "axis coordinate {x} mapped outside the grid (to {})",
                y as isize
            )));
        }
        if std::mem::replace(&mut seen[y], true) {
            return Err(Error::InvariantViolation(format!(
                "axis coordinate {y} is the image of two coordinates"
            )));
        }
    }
    Ok(())
}

const CHUNK: usize = 1 << 14;

/// Apply one axis permutation to every coordinate of every cell. `A` is the identity.
pub fn apply_axis_map(spec: GridSpec, map: &[usize]) -> Result<ArrangementPair> {
    if map.len() != spec.n() {
        return Err(Error::InvariantViolation("axis map has the wrong length".into()));
    }
    check_axis_map(map)?;
    let (n, d) = (spec.n(), spec.d());
    // contribution[axis][x] = map[x] * n^axis
    let mut contribution = Vec::with_capacity(d);
    let mut stride = 1usize;
    for _ in 0..d {
        contribution.push(map.iter().map(|&y| y * stride).collect::<Vec<_>>());
        stride *= n;
    }

    let mut cell_of = vec![0usize; spec.cell_count()];
    cell_of
        .par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(chunk, out)| {
            let mut digits = vec![0usize; d];
            spec.decode(chunk * CHUNK, &mut digits);
            let mut index: usize = digits.iter().zip(&contribution).map(|(&x, c)| c[x]).sum();
            for slot in out.iter_mut() {
                *slot = index;
                // odometer step, first axis fastest
                for (axis, digit) in digits.iter_mut().enumerate() {
                    let c = &contribution[axis];
                    index -= c[*digit];
                    *digit += 1;
                    if *digit < n {
                        index += c[*digit];
                        break;
                    }
                    *digit = 0;
                    index += c[0];
                }
            }
        });

    let b = Arrangement::from_cells(spec, cell_of)
        .map_err(|e| Error::InvariantViolation(format!("constructed grid B: {e}")))?;
    ArrangementPair::new(Arrangement::identity(spec), b)
}

/// `B = A`.
pub fn construct_identity(spec: GridSpec) -> ArrangementPair {
    let a = Arrangement::identity(spec);
    ArrangementPair::new(a.clone(), a).expect("same spec")
}

pub fn construct_special(spec: GridSpec) -> Result<ArrangementPair> {
    let plan = ConstructionPlan::for_method(spec, Method::Special)?;
    apply_axis_map(spec, &special_axis_map(spec.n(), plan.k))
}

pub fn construct_general(spec: GridSpec) -> Result<ArrangementPair> {
    let plan = ConstructionPlan::for_method(spec, Method::General)?;
    apply_axis_map(spec, &general_axis_map(spec.n(), plan.k))
}

/// Build the pair described by `plan`.
pub fn build(plan: &ConstructionPlan) -> Result<ArrangementPair> {
    match plan.method {
        Method::Identity => Ok(construct_identity(plan.spec)),
        Method::Special => apply_axis_map(plan.spec, &special_axis_map(plan.spec.n(), plan.k)),
        Method::General => apply_axis_map(plan.spec, &general_axis_map(plan.spec.n(), plan.k)),
    }
}

pub fn construct(spec: GridSpec, method: Method) -> Result<(ArrangementPair, ConstructionPlan)> {
    let plan = ConstructionPlan::for_method(spec, method)?;
    Ok((build(&plan)?, plan))
}

/// Pick the construction with the best guarantee and run it.
///
/// The guarantee is stated in `L_inf`; it holds for every `L_p` because
/// `L_p >= L_inf`.
pub fn construct_auto(spec: GridSpec) -> Result<(ArrangementPair, ConstructionPlan)> {
    let plan = ConstructionPlan::best(spec);
    Ok((build(&plan)?, plan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Symbol;

    fn b_cell(pair: &ArrangementPair, a_cell: &[usize]) -> Vec<usize> {
        let s = pair.a().symbol_at(&Cell::new(a_cell.to_vec())).unwrap();
        pair.b().cell_of(s).unwrap().coords().to_vec()
    }

    fn brute_select_k(n: usize) -> usize {
        (1..=n).filter(|&k| 3 * k <= n.div_ceil(k)).max().unwrap_or(0)
    }

    #[test]
    fn select_k_examples() {
        assert_eq!(select_k(13), 2);
        assert_eq!(select_k(3), 1);
        assert_eq!(select_k(27), 3);
        assert_eq!(select_k(2), 0);
    }

    #[test]
    fn select_k_matches_full_scan() {
        for n in 2..5000 {
            assert_eq!(select_k(n), brute_select_k(n), "n = {n}");
        }
    }

    #[test]
    fn colors() {
        assert_eq!(color_of(&Cell::from([4, 7]), 3), vec![1, 1]);
        assert_eq!(color_of(&Cell::from([0, 0, 0]), 5), vec![0, 0, 0]);
        assert_eq!(color_of(&Cell::from([8, 5]), 3), vec![2, 2]);
    }

    #[test]
    fn special_examples_at_nine() {
        let pair = construct_special(GridSpec::new(9, 2).unwrap()).unwrap();
        assert_eq!(b_cell(&pair, &[0, 0]), vec![0, 0]);
        assert_eq!(b_cell(&pair, &[1, 0]), vec![4, 0]);
        assert_eq!(b_cell(&pair, &[8, 8]), vec![5, 5]);
    }

    #[test]
    fn general_examples_at_thirteen() {
        let pair = construct_general(GridSpec::new(13, 2).unwrap()).unwrap();
        assert_eq!(b_cell(&pair, &[0, 0]), vec![0, 0]);
        assert_eq!(b_cell(&pair, &[1, 1]), vec![7, 7]);
        assert_eq!(b_cell(&pair, &[11, 0]), vec![5, 0]);
    }

    #[test]
    fn preconditions() {
        assert!(matches!(
            construct_special(GridSpec::new(10, 2).unwrap()),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            construct_general(GridSpec::new(2, 2).unwrap()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn broken_axis_map_is_an_invariant_violation() {
        let spec = GridSpec::new(4, 2).unwrap();
        assert!(matches!(
            apply_axis_map(spec, &[0, 1, 1, 3]),
            Err(Error::InvariantViolation(_))
        ));
        assert!(matches!(
            apply_axis_map(spec, &[0, 1, 2, 9]),
            Err(Error::InvariantViolation(_))
        ));
    }

    #[test]
    fn auto_selection() {
        let plan = ConstructionPlan::best(GridSpec::new(9, 2).unwrap());
        assert_eq!((plan.method, plan.k, plan.guarantee), (Method::Special, 3, 3));
        let plan = ConstructionPlan::best(GridSpec::new(13, 2).unwrap());
        assert_eq!((plan.method, plan.k, plan.guarantee), (Method::General, 2, 4));
        let plan = ConstructionPlan::best(GridSpec::new(2, 2).unwrap());
        assert_eq!((plan.method, plan.k, plan.guarantee), (Method::Identity, 0, 0));
        // 4 = 2^2: special gives 2, general 2 * select_k(4) = 2; tie goes to general.
        let plan = ConstructionPlan::best(GridSpec::new(4, 2).unwrap());
        assert_eq!(plan.method, Method::General);
        // 144 = 12^2: special gives 12, select_k(144) = 7 gives 14
        let plan = ConstructionPlan::best(GridSpec::new(144, 2).unwrap());
        assert_eq!((plan.method, plan.guarantee), (Method::General, 14));
    }

    #[test]
    fn bijective_color_preserving_and_fixing_color_zero() {
        for d in [2, 3] {
            let top = if d == 2 { 200 } else { 40 };
            for n in 3..=top {
                let spec = GridSpec::new(n, d).unwrap();
                let mut runs = vec![(construct_general(spec).unwrap(), select_k(n))];
                if let Some(k) = special_k(n) {
                    runs.push((construct_special(spec).unwrap(), k));
                }
                for (pair, k) in runs {
                    pair.b().validate().unwrap();
                    for s in 0..spec.cell_count() {
                        let ca = pair.a().cell_of(Symbol(s)).unwrap();
                        let cb = pair.b().cell_of(Symbol(s)).unwrap();
                        assert_eq!(color_of(&ca, k), color_of(&cb, k), "n={n} d={d}");
                        if color_of(&ca, k).iter().all(|&r| r == 0) {
                            assert_eq!(ca, cb);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn special_bijective_on_squares_up_to_196() {
        for k in 2..=14 {
            let spec = GridSpec::new(k * k, 2).unwrap();
            construct_special(spec).unwrap().b().validate().unwrap();
        }
    }

    #[test]
    fn construction_is_separable_per_axis() {
        for (n, d) in [(13, 3), (16, 3), (7, 4)] {
            let spec = GridSpec::new(n, d).unwrap();
            let map = general_axis_map(n, select_k(n));
            let pair = construct_general(spec).unwrap();
            for s in 0..spec.cell_count() {
                let ca = pair.a().cell_of(Symbol(s)).unwrap();
                let expected: Vec<usize> = ca.coords().iter().map(|&x| map[x]).collect();
                assert_eq!(pair.b().cell_of(Symbol(s)).unwrap().coords(), &expected[..]);
            }
        }
    }
}
