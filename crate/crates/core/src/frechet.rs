//! Fréchet means of diagram ensembles under the `p = 2` Wasserstein metric.
//!
//! Each update matches the current candidate optimally against every ensemble
//! diagram, sends unmatched candidate points to their nearest diagonal point, and
//! moves every candidate point to the average of its images. The functional never
//! increases along the iteration, so we stop on a small relative decrease. The
//! result depends on the starting diagram, hence several seeds are tried and the
//! lowest functional value wins.

use rayon::prelude::*;
use thiserror::Error;

use crate::metrics::{diagonal_projection, wasserstein, Matching};
use crate::persistence::{Death, Diagram, PersistencePoint};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrechetError {
    #[error("ensemble has no diagrams")]
    EmptyEnsemble,
    #[error("seed index {0} outside the ensemble")]
    SeedOutOfRange(usize),
    #[error("no seeds given")]
    NoSeeds,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrechetOptions<T> {
    pub max_iter: usize,
    /// Stop once `(F_old - F_new) <= tol · F_old`.
    pub tol: T,
}

impl<T: Scalar> Default for FrechetOptions<T> {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol: T::lit(1e-8),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrechetResult<T> {
    /// Barycenter candidate, anchors dropped and zero-persistence points pruned.
    pub mean: Diagram<T>,
    pub functional_value: T,
    /// Ensemble index of the diagram the winning run started from.
    pub seed_id: usize,
    pub iterations: usize,
    /// Functional value before the first update and after each update.
    pub per_iteration_functional: Vec<T>,
    /// Optimal `p = 2` matchings from `mean` to each ensemble diagram.
    pub final_matchings: Vec<Matching<T>>,
    /// False when `max_iter` was reached first.
    pub converged: bool,
}

fn two<T: Scalar>() -> T {
    T::lit(2.0)
}

fn match_all<T: Scalar>(candidate: &Diagram<T>, diagrams: &[Diagram<T>]) -> Vec<Matching<T>> {
    diagrams
        .par_iter()
        .map(|d| wasserstein(candidate, d, two()).expect("p = 2 is a valid order"))
        .collect()
}

fn functional_of<T: Scalar>(matchings: &[Matching<T>]) -> T {
    let n = T::from_count(matchings.len());
    matchings.iter().map(|m| m.cost * m.cost).fold(T::zero(), |a, b| a + b) / n
}

/// `F(x) = (1/n) Σ_j d_2(x, D_j)²`.
pub fn frechet_functional<T: Scalar>(candidate: &Diagram<T>, diagrams: &[Diagram<T>]) -> T {
    if diagrams.is_empty() {
        return T::zero();
    }
    functional_of(&match_all(candidate, diagrams))
}

/// One averaging step from `candidate`, using fresh optimal matchings.
pub fn frechet_update<T: Scalar>(candidate: &Diagram<T>, diagrams: &[Diagram<T>]) -> Diagram<T> {
    if diagrams.is_empty() {
        return candidate.clone();
    }
    update_with(candidate, diagrams, &match_all(candidate, diagrams))
}

fn update_with<T: Scalar>(candidate: &Diagram<T>, diagrams: &[Diagram<T>], matchings: &[Matching<T>]) -> Diagram<T> {
    let n = T::from_count(diagrams.len());
    let mut partners = vec![vec![None; diagrams.len()]; candidate.len()];
    for (j, m) in matchings.iter().enumerate() {
        for &(i, target) in &m.pairs {
            partners[i][j] = Some(target);
        }
    }
    let points = candidate
        .points
        .iter()
        .zip(&partners)
        .map(|(point, partner)| {
            // averaging offsets from the current point keeps exact fixed points exact
            let mut shift_b = T::zero();
            let mut shift_d = T::zero();
            for (j, target) in partner.iter().enumerate() {
                let (tb, td) = match (*target, point.death) {
                    (Some(t), _) => {
                        let q = &diagrams[j].points[t];
                        (q.birth, q.death.finite())
                    }
                    (None, Death::Finite(d)) => {
                        let (pb, pd) = diagonal_projection(point.birth, d);
                        (pb, Some(pd))
                    }
                    // an unmatched essential point only occurs on a count mismatch; it stays put
                    (None, Death::Infinite) => (point.birth, None),
                };
                shift_b = shift_b + (tb - point.birth);
                if let (Death::Finite(d), Some(td)) = (point.death, td) {
                    shift_d = shift_d + (td - d);
                }
            }
            PersistencePoint {
                birth: point.birth + shift_b / n,
                death: match point.death {
                    Death::Finite(d) => Death::Finite(d + shift_d / n),
                    Death::Infinite => Death::Infinite,
                },
                anchor: None,
            }
        })
        .collect();
    Diagram::new(points)
}

/// Evenly spaced seed indices, or all indices when `count >= n`.
pub fn stratified_seeds(n: usize, count: usize) -> Vec<usize> {
    if count >= n {
        return (0..n).collect();
    }
    (0..count).map(|i| i * n / count).collect()
}

struct Run<T> {
    seed: usize,
    candidate: Diagram<T>,
    trace: Vec<T>,
    iterations: usize,
    converged: bool,
}

fn run_from_seed<T: Scalar>(seed: usize, diagrams: &[Diagram<T>], opts: &FrechetOptions<T>) -> Run<T> {
    let mut candidate = Diagram::new(diagrams[seed].points.iter().map(|p| p.geometric()).collect());
    let mut matchings = match_all(&candidate, diagrams);
    let mut value = functional_of(&matchings);
    let mut trace = vec![value];
    let mut iterations = 0;
    let mut converged = value == T::zero();
    while !converged && iterations < opts.max_iter {
        let next = update_with(&candidate, diagrams, &matchings);
        let next_matchings = match_all(&next, diagrams);
        let next_value = functional_of(&next_matchings);
        iterations += 1;
        trace.push(next_value);
        let decrease = value - next_value;
        converged = next_value == T::zero() || decrease <= opts.tol * value;
        candidate = next;
        matchings = next_matchings;
        value = next_value;
    }
    Run {
        seed,
        candidate,
        trace,
        iterations,
        converged,
    }
}

pub fn frechet_mean<T: Scalar>(
    diagrams: &[Diagram<T>],
    seeds: &[usize],
    opts: &FrechetOptions<T>,
) -> Result<FrechetResult<T>, FrechetError> {
    if diagrams.is_empty() {
        return Err(FrechetError::EmptyEnsemble);
    }
    if seeds.is_empty() {
        return Err(FrechetError::NoSeeds);
    }
    if let Some(&bad) = seeds.iter().find(|&&s| s >= diagrams.len()) {
        return Err(FrechetError::SeedOutOfRange(bad));
    }
    let runs: Vec<Run<T>> = seeds.par_iter().map(|&s| run_from_seed(s, diagrams, opts)).collect();
    let best = runs
        .into_iter()
        .reduce(|best, run| {
            if run.trace.last() < best.trace.last() {
                run
            } else {
                best
            }
        })
        .expect("at least one seed");

    let tiny = T::lit(1e-12);
    let mut mean = best.candidate;
    mean.points.retain(|p| p.persistence() > tiny);
    let final_matchings = match_all(&mean, diagrams);
    let functional_value = functional_of(&final_matchings);
    Ok(FrechetResult {
        mean,
        functional_value,
        seed_id: best.seed,
        iterations: best.iterations,
        per_iteration_functional: best.trace,
        final_matchings,
        converged: best.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(pairs: &[(f64, Option<f64>)]) -> Diagram<f64> {
        Diagram::from_pairs(pairs)
    }

    #[test]
    fn functional_examples() {
        let d = diag(&[(0.1, None), (0.2, Some(0.5))]);
        assert_eq!(frechet_functional(&d, std::slice::from_ref(&d)), 0.0);
        assert_eq!(frechet_functional(&d, &vec![d.clone(); 5]), 0.0);
        let c = diag(&[(0.0, None)]);
        let ens = vec![diag(&[(0.0, None)]), diag(&[(0.2, None)])];
        assert!((frechet_functional(&c, &ens) - 0.02).abs() < 1e-15);
    }

    #[test]
    fn update_averages_matched_and_diagonal_images() {
        let candidate = diag(&[(0.0, None), (0.2, Some(0.4))]);
        let ens = vec![diag(&[(0.0, None), (0.2, Some(0.4))]), diag(&[(0.0, None)])];
        let next = frechet_update(&candidate, &ens);
        // images (.2,.4) and diagonal projection (.3,.3)
        let p = next.points[1];
        assert!((p.birth - 0.25).abs() < 1e-15);
        assert!((p.death.finite().unwrap() - 0.35).abs() < 1e-15);
        assert_eq!(next.points[0], PersistencePoint::essential(0.0));
    }

    #[test]
    fn update_moves_to_common_target() {
        let candidate = diag(&[(0.1, None), (0.3, Some(0.7))]);
        let target = diag(&[(0.15, None), (0.32, Some(0.66))]);
        let next = frechet_update(&candidate, &vec![target.clone(); 3]);
        for (a, b) in next.points.iter().zip(&target.points) {
            assert!((a.birth - b.birth).abs() < 1e-15);
            assert!((a.death.value() - b.death.value()).abs() < 1e-15 || a.is_essential());
        }
    }

    #[test]
    fn identical_ensemble_is_a_fixed_point() {
        let d = diag(&[(0.1, None), (0.2, Some(0.5)), (0.3, Some(0.35))]);
        let ens = vec![d.clone(); 4];
        assert!(frechet_update(&d, &ens).same_multiset(&d));
        let r = frechet_mean(&ens, &[0, 2], &FrechetOptions::default()).unwrap();
        assert!(r.mean.same_multiset(&d));
        assert_eq!(r.functional_value, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn two_essential_points_average_to_midpoint() {
        let ens = vec![diag(&[(0.2, None)]), diag(&[(0.5, None)])];
        let r = frechet_mean(&ens, &[0, 1], &FrechetOptions::default()).unwrap();
        assert_eq!(r.mean.len(), 1);
        assert!((r.mean.points[0].birth - 0.35).abs() < 1e-15);
        assert!(r.mean.points[0].is_essential());
    }

    #[test]
    fn input_validation() {
        let ens = vec![diag(&[(0.2, None)])];
        let opts = FrechetOptions::default();
        assert_eq!(frechet_mean::<f64>(&[], &[0], &opts), Err(FrechetError::EmptyEnsemble));
        assert_eq!(frechet_mean(&ens, &[], &opts), Err(FrechetError::NoSeeds));
        assert_eq!(frechet_mean(&ens, &[3], &opts), Err(FrechetError::SeedOutOfRange(3)));
    }

    #[test]
    fn seeds_are_stratified() {
        assert_eq!(stratified_seeds(100, 4), vec![0, 25, 50, 75]);
        assert_eq!(stratified_seeds(3, 20), vec![0, 1, 2]);
    }
}
