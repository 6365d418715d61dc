//! Wasserstein `p`-distances and bottleneck distance between persistence diagrams.
//!
//! A matching is a partial bijection between two diagrams; points left out of it
//! are charged their distance to the diagonal. Essential points (infinite death)
//! may only pair with essential points, at the cost of their birth difference, so
//! two diagrams with different essential counts are infinitely far apart.

use rayon::prelude::*;
use thiserror::Error;

use crate::assignment::{hungarian, perfect_matching};
use crate::persistence::{Death, Diagram, PersistencePoint};
use crate::scalar::{cmp_scalar, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("essential point {0} has no diagonal projection")]
    InfiniteDeath(usize),
    #[error("Wasserstein order must be >= 1, got {0}")]
    InvalidOrder(f64),
}

/// Optimal partial bijection between two diagrams and its cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching<T> {
    /// `(index in first, index in second)`.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched1: Vec<usize>,
    pub unmatched2: Vec<usize>,
    pub cost: T,
    /// Wasserstein order; `T::infinity()` for bottleneck.
    pub p: T,
    /// The diagrams have different numbers of essential points; `cost` is infinite.
    pub essential_mismatch: bool,
}

impl<T: Scalar> Matching<T> {
    /// Partner of point `i` of the first diagram, if matched.
    pub fn partner_of_first(&self, i: usize) -> Option<usize> {
        self.pairs.iter().find(|&&(a, _)| a == i).map(|&(_, b)| b)
    }

    pub fn partner_of_second(&self, j: usize) -> Option<usize> {
        self.pairs.iter().find(|&&(_, b)| b == j).map(|&(a, _)| a)
    }

    /// Same matching seen from the second diagram.
    pub fn reversed(&self) -> Matching<T> {
        Matching {
            pairs: self.pairs.iter().map(|&(a, b)| (b, a)).collect(),
            unmatched1: self.unmatched2.clone(),
            unmatched2: self.unmatched1.clone(),
            ..self.clone()
        }
    }
}

fn check_order<T: Scalar>(p: T) -> Result<(), MetricError> {
    if p >= T::one() {
        Ok(())
    } else {
        Err(MetricError::InvalidOrder(p.to_f64_lossy()))
    }
}

/// `ℓ_p` distance from a finite point to the nearest diagonal point, `|d - b| · 2^{1/p - 1}`.
pub fn diagonal_distance<T: Scalar>(point: &PersistencePoint<T>, p: T) -> Result<T, MetricError> {
    let death = match point.death {
        Death::Finite(d) => d,
        Death::Infinite => return Err(MetricError::InfiniteDeath(point.anchor.unwrap_or(0))),
    };
    check_order(p)?;
    Ok(diagonal_gap(point.birth, death, p))
}

fn diagonal_gap<T: Scalar>(birth: T, death: T, p: T) -> T {
    let gap = (death - birth).abs();
    if p.is_infinite() {
        gap / T::lit(2.0)
    } else {
        gap * T::lit(2.0).powf(p.recip() - T::one())
    }
}

/// Nearest diagonal point `((b+d)/2, (b+d)/2)`; the same point for every `p ≥ 1`.
pub fn diagonal_projection<T: Scalar>(birth: T, death: T) -> (T, T) {
    let mid = (birth + death) / T::lit(2.0);
    (mid, mid)
}

fn lp_norm<T: Scalar>(dx: T, dy: T, p: T) -> T {
    let (dx, dy) = (dx.abs(), dy.abs());
    if p.is_infinite() {
        dx.max(dy)
    } else if p == T::one() {
        dx + dy
    } else if p == T::lit(2.0) {
        dx.hypot(dy)
    } else {
        (dx.powf(p) + dy.powf(p)).powf(p.recip())
    }
}

/// Cost of pairing two points; infinite when exactly one is essential.
pub fn pair_distance<T: Scalar>(a: &PersistencePoint<T>, b: &PersistencePoint<T>, p: T) -> T {
    match (a.death, b.death) {
        (Death::Finite(da), Death::Finite(db)) => lp_norm(a.birth - b.birth, da - db, p),
        (Death::Infinite, Death::Infinite) => (a.birth - b.birth).abs(),
        _ => T::infinity(),
    }
}

fn retire_cost<T: Scalar>(point: &PersistencePoint<T>, p: T) -> T {
    match point.death {
        Death::Finite(d) => diagonal_gap(point.birth, d, p),
        Death::Infinite => T::infinity(),
    }
}

/// Evaluates the `p`-cost of a partial bijection.
pub fn matching_cost<T: Scalar>(
    d1: &Diagram<T>,
    d2: &Diagram<T>,
    pairs: &[(usize, usize)],
    unmatched1: &[usize],
    unmatched2: &[usize],
    p: T,
) -> T {
    let terms = pairs
        .iter()
        .map(|&(i, j)| pair_distance(&d1.points[i], &d2.points[j], p))
        .chain(unmatched1.iter().map(|&i| retire_cost(&d1.points[i], p)))
        .chain(unmatched2.iter().map(|&j| retire_cost(&d2.points[j], p)));
    if p.is_infinite() {
        terms.fold(T::zero(), T::max)
    } else {
        let total: T = terms.map(|t| t.powf(p)).fold(T::zero(), |a, b| a + b);
        total.powf(p.recip())
    }
}

/// Pairs essential points in birth order, which is optimal for every `p`.
fn match_essential<T: Scalar>(
    d1: &Diagram<T>,
    d2: &Diagram<T>,
    ess1: &[usize],
    ess2: &[usize],
) -> (Vec<(usize, usize)>, Vec<usize>, Vec<usize>) {
    let sorted = |d: &Diagram<T>, idx: &[usize]| {
        let mut idx = idx.to_vec();
        idx.sort_by(|&a, &b| cmp_scalar(&d.points[a].birth, &d.points[b].birth).then(a.cmp(&b)));
        idx
    };
    let (s1, s2) = (sorted(d1, ess1), sorted(d2, ess2));
    let common = s1.len().min(s2.len());
    let pairs = s1.iter().zip(&s2).map(|(&a, &b)| (a, b)).collect();
    (pairs, s1[common..].to_vec(), s2[common..].to_vec())
}

fn assemble<T: Scalar>(
    d1: &Diagram<T>,
    d2: &Diagram<T>,
    mut pairs: Vec<(usize, usize)>,
    mut unmatched1: Vec<usize>,
    mut unmatched2: Vec<usize>,
    p: T,
    essential_mismatch: bool,
) -> Matching<T> {
    pairs.sort_unstable();
    unmatched1.sort_unstable();
    unmatched2.sort_unstable();
    let cost = matching_cost(d1, d2, &pairs, &unmatched1, &unmatched2, p);
    Matching {
        pairs,
        unmatched1,
        unmatched2,
        cost,
        p,
        essential_mismatch,
    }
}

/// Optimal `p`-Wasserstein matching; `p = ∞` delegates to [`bottleneck`].
pub fn wasserstein<T: Scalar>(d1: &Diagram<T>, d2: &Diagram<T>, p: T) -> Result<Matching<T>, MetricError> {
    check_order(p)?;
    if p.is_infinite() {
        return Ok(bottleneck(d1, d2));
    }
    let (fin1, ess1) = d1.split_indices();
    let (fin2, ess2) = d2.split_indices();
    let (mut pairs, left1, left2) = match_essential(d1, d2, &ess1, &ess2);
    let mismatch = !left1.is_empty() || !left2.is_empty();
    let (mut unmatched1, mut unmatched2) = (left1, left2);

    // rows: finite points of d1, then one diagonal slot per finite point of d2
    // cols: finite points of d2, then one diagonal slot per finite point of d1
    let (n, m) = (fin1.len(), fin2.len());
    let size = n + m;
    if size > 0 {
        let mut cost = vec![vec![T::zero(); size]; size];
        for (r, &i) in fin1.iter().enumerate() {
            let retire = retire_cost(&d1.points[i], p).powf(p);
            for (c, &j) in fin2.iter().enumerate() {
                cost[r][c] = pair_distance(&d1.points[i], &d2.points[j], p).powf(p);
            }
            for slot in cost[r].iter_mut().skip(m) {
                *slot = retire;
            }
        }
        for (c, &j) in fin2.iter().enumerate() {
            let retire = retire_cost(&d2.points[j], p).powf(p);
            for row in cost.iter_mut().skip(n) {
                row[c] = retire;
            }
        }
        let assignment = hungarian(&cost);
        let mut used2 = vec![false; m];
        for (r, &i) in fin1.iter().enumerate() {
            let c = assignment[r];
            if c < m {
                pairs.push((i, fin2[c]));
                used2[c] = true;
            } else {
                unmatched1.push(i);
            }
        }
        unmatched2.extend(fin2.iter().zip(&used2).filter(|(_, &u)| !u).map(|(&j, _)| j));
    }
    Ok(assemble(d1, d2, pairs, unmatched1, unmatched2, p, mismatch))
}

/// Bottleneck (`p = ∞`) matching: binary search over candidate costs with a
/// perfect-matching feasibility test at each threshold.
pub fn bottleneck<T: Scalar>(d1: &Diagram<T>, d2: &Diagram<T>) -> Matching<T> {
    let p = T::infinity();
    let (fin1, ess1) = d1.split_indices();
    let (fin2, ess2) = d2.split_indices();
    let (mut pairs, left1, left2) = match_essential(d1, d2, &ess1, &ess2);
    let mismatch = !left1.is_empty() || !left2.is_empty();
    let (mut unmatched1, mut unmatched2) = (left1, left2);

    let (n, m) = (fin1.len(), fin2.len());
    if n + m > 0 {
        let pair_cost: Vec<Vec<T>> = fin1
            .iter()
            .map(|&i| {
                fin2.iter()
                    .map(|&j| pair_distance(&d1.points[i], &d2.points[j], p))
                    .collect()
            })
            .collect();
        let retire1: Vec<T> = fin1.iter().map(|&i| retire_cost(&d1.points[i], p)).collect();
        let retire2: Vec<T> = fin2.iter().map(|&j| retire_cost(&d2.points[j], p)).collect();

        let mut candidates: Vec<T> = pair_cost
            .iter()
            .flatten()
            .chain(&retire1)
            .chain(&retire2)
            .copied()
            .collect();
        candidates.push(T::zero());
        candidates.sort_by(cmp_scalar);
        candidates.dedup();

        // rows: d1 points then diagonal copies of d2 points; cols: d2 points then diagonal copies of d1 points
        let feasible = |delta: T| {
            perfect_matching(n + m, |r, c| match (r < n, c < m) {
                (true, true) => pair_cost[r][c] <= delta,
                (true, false) => c - m == r && retire1[r] <= delta,
                (false, true) => r - n == c && retire2[c] <= delta,
                (false, false) => true,
            })
        };
        let (mut lo, mut hi) = (0usize, candidates.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if feasible(candidates[mid]).is_some() {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let assignment = feasible(candidates[lo]).expect("largest candidate is always feasible");
        let mut used2 = vec![false; m];
        for (r, &i) in fin1.iter().enumerate() {
            let c = assignment[r];
            if c < m {
                pairs.push((i, fin2[c]));
                used2[c] = true;
            } else {
                unmatched1.push(i);
            }
        }
        unmatched2.extend(fin2.iter().zip(&used2).filter(|(_, &u)| !u).map(|(&j, _)| j));
    }
    assemble(d1, d2, pairs, unmatched1, unmatched2, p, mismatch)
}

pub fn bottleneck_distance<T: Scalar>(d1: &Diagram<T>, d2: &Diagram<T>) -> T {
    bottleneck(d1, d2).cost
}

/// Symmetric matrix of pairwise distances, computed in parallel over rows.
pub fn distance_matrix<T: Scalar>(diagrams: &[Diagram<T>], p: T) -> Result<Vec<Vec<T>>, MetricError> {
    check_order(p)?;
    let n = diagrams.len();
    let upper: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..n)
                .map(|j| wasserstein(&diagrams[i], &diagrams[j], p).map(|m| m.cost))
                .collect::<Result<Vec<T>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let mut full = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for (offset, &d) in upper[i].iter().enumerate() {
            let j = i + 1 + offset;
            full[i][j] = d;
            full[j][i] = d;
        }
    }
    Ok(full)
}
