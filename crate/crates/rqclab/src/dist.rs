//! Functionals of output distributions: total variation distance, bounded
//! query functions and their expectations, norm reports for difference
//! vectors, and extremal witnesses.
//!
//! A query function is any phi: {0,1}^n -> [-1, 1]; its expectation under a
//! distribution is what a statistical-query oracle answers. The witness
//! returned by [`max_tv_witness`] is the indicator of the strict upper set
//! `{x : p(x) > q(x)}`, which attains the total variation distance exactly.

use thiserror::Error;

use crate::sim::BornDistribution;

#[derive(Debug, Error, PartialEq)]
pub enum DistError {
    #[error("qubit count must be at least 1")]
    NoQubits,
    #[error("qubit counts differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("value table has length {got}, expected {expected}")]
    BadLength { got: usize, expected: usize },
    #[error("query value {value} at index {index} lies outside [-1, 1]")]
    ValueOutOfRange { index: usize, value: f64 },
    #[error("basis label {label} out of range for {n} qubits")]
    LabelOutOfRange { label: usize, n: usize },
}

/// A bounded test function phi: {0,1}^n -> [-1, 1], stored as a table.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryFunction {
    n: usize,
    values: Vec<f64>,
}

impl QueryFunction {
    /// Values may exceed [-1, 1] by at most 1e-12 (and are then clamped).
    pub fn from_values(n: usize, mut values: Vec<f64>) -> Result<Self, DistError> {
        if n == 0 {
            return Err(DistError::NoQubits);
        }
        let expected = 1usize << n;
        if values.len() != expected {
            return Err(DistError::BadLength { got: values.len(), expected });
        }
        for (index, v) in values.iter_mut().enumerate() {
            if !v.is_finite() || v.abs() > 1.0 + 1e-12 {
                return Err(DistError::ValueOutOfRange { index, value: *v });
            }
            *v = v.clamp(-1.0, 1.0);
        }
        Ok(Self { n, values })
    }

    /// Indicator of an explicit subset of basis labels.
    pub fn indicator(n: usize, members: &[usize]) -> Result<Self, DistError> {
        if n == 0 {
            return Err(DistError::NoQubits);
        }
        let dim = 1usize << n;
        let mut values = vec![0.0; dim];
        for &label in members {
            if label >= dim {
                return Err(DistError::LabelOutOfRange { label, n });
            }
            values[label] = 1.0;
        }
        Ok(Self { n, values })
    }

    /// Indicator of the set where `pred` holds.
    pub fn from_predicate<F: Fn(usize) -> bool>(n: usize, pred: F) -> Result<Self, DistError> {
        if n == 0 {
            return Err(DistError::NoQubits);
        }
        let dim = 1usize << n;
        let values = (0..dim).map(|x| if pred(x) { 1.0 } else { 0.0 }).collect();
        Ok(Self { n, values })
    }

    /// Indicator of the single string `label`.
    pub fn singleton(n: usize, label: usize) -> Result<Self, DistError> {
        Self::indicator(n, &[label])
    }

    pub fn constant(n: usize, value: f64) -> Result<Self, DistError> {
        if n == 0 {
            return Err(DistError::NoQubits);
        }
        Self::from_values(n, vec![value; 1 << n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: usize) -> f64 {
        self.values[x]
    }

    /// Labels where the function is exactly 1 (useful for indicator
    /// witnesses).
    pub fn support_of_ones(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == 1.0)
            .map(|(x, _)| x)
            .collect()
    }
}

/// Total variation distance `(1/2) sum_x |p(x) - q(x)|`.
pub fn tv_distance(p: &BornDistribution, q: &BornDistribution) -> Result<f64, DistError> {
    if p.n() != q.n() {
        return Err(DistError::DimensionMismatch(p.n(), q.n()));
    }
    Ok(p.probs()
        .iter()
        .zip(q.probs())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / 2.0)
}

/// Expectation `sum_x p(x) phi(x)`, the value a statistical query returns.
pub fn functional(p: &BornDistribution, phi: &QueryFunction) -> Result<f64, DistError> {
    if p.n() != phi.n() {
        return Err(DistError::DimensionMismatch(p.n(), phi.n()));
    }
    Ok(p.probs().iter().zip(&phi.values).map(|(a, v)| a * v).sum())
}

/// Norms of a difference vector `p - q` and the Berger ratio
/// `l2^3 / l4^2`, which lower-bounds `l1` for any nonzero vector.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct NormReport {
    pub l1: f64,
    pub l2: f64,
    pub l4: f64,
    pub linf: f64,
    /// `l2^3 / l4^2`; defined as 0 for the zero vector.
    pub berger: f64,
}

pub fn norms_of_difference(
    p: &BornDistribution,
    q: &BornDistribution,
) -> Result<NormReport, DistError> {
    if p.n() != q.n() {
        return Err(DistError::DimensionMismatch(p.n(), q.n()));
    }
    let mut l1 = 0.0;
    let mut s2 = 0.0;
    let mut s4 = 0.0;
    let mut linf: f64 = 0.0;
    for (a, b) in p.probs().iter().zip(q.probs()) {
        let d = (a - b).abs();
        l1 += d;
        s2 += d * d;
        s4 += d * d * d * d;
        linf = linf.max(d);
    }
    let l2 = s2.sqrt();
    let l4 = s4.sqrt().sqrt();
    let berger = if l4 == 0.0 { 0.0 } else { l2.powi(3) / (l4 * l4) };
    Ok(NormReport { l1, l2, l4, linf, berger })
}

/// Second-moment summaries of a single distribution.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CollisionStats {
    /// Collision probability `sum_x p(x)^2`.
    pub collision: f64,
    /// Largest single probability.
    pub max_prob: f64,
    /// Number of strictly positive entries.
    pub support_size: usize,
}

pub fn collision_stats(p: &BornDistribution) -> CollisionStats {
    let mut collision = 0.0;
    let mut max_prob: f64 = 0.0;
    let mut support_size = 0;
    for &v in p.probs() {
        collision += v * v;
        max_prob = max_prob.max(v);
        if v > 0.0 {
            support_size += 1;
        }
    }
    CollisionStats { collision, max_prob, support_size }
}

/// The indicator of `{x : p(x) > q(x)}` (strict inequality) together with
/// the gap `E_p[phi] - E_q[phi]` it achieves, which equals
/// `tv_distance(p, q)` exactly.
pub fn max_tv_witness(
    p: &BornDistribution,
    q: &BornDistribution,
) -> Result<(QueryFunction, f64), DistError> {
    if p.n() != q.n() {
        return Err(DistError::DimensionMismatch(p.n(), q.n()));
    }
    let mut members = Vec::new();
    let mut gap = 0.0;
    for (x, (a, b)) in p.probs().iter().zip(q.probs()).enumerate() {
        if a > b {
            members.push(x);
            gap += a - b;
        }
    }
    Ok((QueryFunction::indicator(p.n(), &members)?, gap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use rand::Rng;

    fn random_dist<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BornDistribution {
        let dim = 1usize << n;
        let raw: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let sum: f64 = raw.iter().sum();
        BornDistribution::from_probs(n, raw.iter().map(|v| v / sum).collect()).unwrap()
    }

    #[test]
    fn tv_examples() {
        let point = BornDistribution::point_mass(3, 5).unwrap();
        let uniform = BornDistribution::uniform(3);
        let tv = tv_distance(&point, &uniform).unwrap();
        assert!((tv - (1.0 - 1.0 / 8.0)).abs() < 1e-15);

        let bell = BornDistribution::from_probs(2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let tv = tv_distance(&bell, &BornDistribution::uniform(2)).unwrap();
        assert!((tv - 0.5).abs() < 1e-15);

        let a = BornDistribution::point_mass(2, 0).unwrap();
        let b = BornDistribution::point_mass(2, 3).unwrap();
        assert_eq!(tv_distance(&a, &b).unwrap(), 1.0);
        assert_eq!(tv_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn tv_dimension_mismatch() {
        let a = BornDistribution::uniform(2);
        let b = BornDistribution::uniform(3);
        assert_eq!(tv_distance(&a, &b).unwrap_err(), DistError::DimensionMismatch(2, 3));
    }

    #[test]
    fn functional_examples() {
        let uniform = BornDistribution::uniform(4);
        let phi = QueryFunction::indicator(4, &[0, 1, 2]).unwrap();
        assert!((functional(&uniform, &phi).unwrap() - 3.0 / 16.0).abs() < 1e-15);

        let point = BornDistribution::point_mass(4, 7).unwrap();
        let probe = QueryFunction::singleton(4, 7).unwrap();
        assert_eq!(functional(&point, &probe).unwrap(), 1.0);
        let miss = QueryFunction::singleton(4, 8).unwrap();
        assert_eq!(functional(&point, &miss).unwrap(), 0.0);

        let minus = QueryFunction::constant(4, -1.0).unwrap();
        assert_eq!(functional(&uniform, &minus).unwrap(), -1.0);
    }

    #[test]
    fn query_function_validation() {
        assert_eq!(
            QueryFunction::from_values(1, vec![1.5, 0.0]).unwrap_err(),
            DistError::ValueOutOfRange { index: 0, value: 1.5 }
        );
        assert!(matches!(
            QueryFunction::from_values(1, vec![f64::NAN, 0.0]),
            Err(DistError::ValueOutOfRange { .. })
        ));
        assert_eq!(
            QueryFunction::from_values(2, vec![0.0; 3]).unwrap_err(),
            DistError::BadLength { got: 3, expected: 4 }
        );
        // Values within 1e-12 of the boundary clamp rather than fail.
        let phi = QueryFunction::from_values(1, vec![1.0 + 5e-13, -1.0 - 5e-13]).unwrap();
        assert_eq!(phi.values(), &[1.0, -1.0]);
        assert_eq!(
            QueryFunction::indicator(2, &[4]).unwrap_err(),
            DistError::LabelOutOfRange { label: 4, n: 2 }
        );
    }

    #[test]
    fn norms_of_point_mass_minus_uniform_one_qubit() {
        // Difference vector (1/2, -1/2): l1 = 1, l2 = 2^(-1/2),
        // l4 = 2^(-3/4), and the Berger ratio l2^3/l4^2 equals 1 exactly.
        let p = BornDistribution::point_mass(1, 0).unwrap();
        let u = BornDistribution::uniform(1);
        let r = norms_of_difference(&p, &u).unwrap();
        assert!((r.l1 - 1.0).abs() < 1e-15);
        assert!((r.l2 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((r.l4 - 2f64.powf(-0.75)).abs() < 1e-15);
        assert!((r.linf - 0.5).abs() < 1e-15);
        assert!((r.berger - 1.0).abs() < 1e-12);
    }

    #[test]
    fn berger_of_zero_vector_is_zero() {
        let u = BornDistribution::uniform(3);
        let r = norms_of_difference(&u, &u).unwrap();
        assert_eq!(r.berger, 0.0);
        assert_eq!(r.l1, 0.0);
    }

    #[test]
    fn berger_lower_bounds_l1_on_random_pairs() {
        let mut rng = RngStream::new(31).rng();
        for _ in 0..2000 {
            let n = rng.random_range(1..=6usize);
            let p = random_dist(n, &mut rng);
            let q = random_dist(n, &mut rng);
            let r = norms_of_difference(&p, &q).unwrap();
            assert!(r.berger <= r.l1 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn collision_stats_examples() {
        let u = collision_stats(&BornDistribution::uniform(5));
        assert!((u.collision - 1.0 / 32.0).abs() < 1e-15);
        assert_eq!(u.support_size, 32);

        let p = collision_stats(&BornDistribution::point_mass(5, 3).unwrap());
        assert_eq!(p.collision, 1.0);
        assert_eq!(p.max_prob, 1.0);
        assert_eq!(p.support_size, 1);
    }

    #[test]
    fn witness_achieves_tv_exactly() {
        let mut rng = RngStream::new(32).rng();
        for _ in 0..500 {
            let n = rng.random_range(1..=5usize);
            let p = random_dist(n, &mut rng);
            let q = random_dist(n, &mut rng);
            let (phi, gap) = max_tv_witness(&p, &q).unwrap();
            let direct = functional(&p, &phi).unwrap() - functional(&q, &phi).unwrap();
            let tv = tv_distance(&p, &q).unwrap();
            assert!((gap - tv).abs() < 1e-12);
            assert!((direct - tv).abs() < 1e-12);
        }
    }

    #[test]
    fn witness_is_optimal_over_all_indicators() {
        // Brute force: at n = 2 there are only 16 subsets of {0,1}^2.
        let mut rng = RngStream::new(33).rng();
        for _ in 0..50 {
            let p = random_dist(2, &mut rng);
            let q = random_dist(2, &mut rng);
            let (_, gap) = max_tv_witness(&p, &q).unwrap();
            let mut best = f64::NEG_INFINITY;
            for mask in 0u32..16 {
                let members: Vec<usize> = (0..4).filter(|x| mask >> x & 1 == 1).collect();
                let phi = QueryFunction::indicator(2, &members).unwrap();
                let v = functional(&p, &phi).unwrap() - functional(&q, &phi).unwrap();
                best = best.max(v);
            }
            assert!((gap - best).abs() < 1e-12);
        }
    }

    #[test]
    fn witness_uses_strict_inequality() {
        // p and q agree on labels 0 and 1; only label 2 (where p exceeds q)
        // may enter the witness set.
        let p = BornDistribution::from_probs(2, vec![0.25, 0.25, 0.5, 0.0]).unwrap();
        let q = BornDistribution::from_probs(2, vec![0.25, 0.25, 0.0, 0.5]).unwrap();
        let (phi, gap) = max_tv_witness(&p, &q).unwrap();
        assert_eq!(phi.support_of_ones(), vec![2]);
        assert!((gap - 0.5).abs() < 1e-15);

        let (empty, zero) = max_tv_witness(&p, &p).unwrap();
        assert!(empty.support_of_ones().is_empty());
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn bounded_functionals_are_tv_lipschitz() {
        // |E_p[phi] - E_q[phi]| <= 2 d_TV for |phi| <= 1, and <= d_TV when
        // phi takes values in [0, 1].
        let mut rng = RngStream::new(34).rng();
        for _ in 0..1000 {
            let n = rng.random_range(1..=5usize);
            let p = random_dist(n, &mut rng);
            let q = random_dist(n, &mut rng);
            let tv = tv_distance(&p, &q).unwrap();
            let signed: Vec<f64> = (0..1 << n).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let phi = QueryFunction::from_values(n, signed).unwrap();
            let gap = (functional(&p, &phi).unwrap() - functional(&q, &phi).unwrap()).abs();
            assert!(gap <= 2.0 * tv + 1e-12);

            let nonneg: Vec<f64> = (0..1 << n).map(|_| rng.random_range(0.0..=1.0)).collect();
            let psi = QueryFunction::from_values(n, nonneg).unwrap();
            let gap = (functional(&p, &psi).unwrap() - functional(&q, &psi).unwrap()).abs();
            assert!(gap <= tv + 1e-12);
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_dist(n: usize) -> impl Strategy<Value = BornDistribution> {
            prop::collection::vec(1e-3..1.0f64, 1 << n).prop_map(move |raw| {
                let sum: f64 = raw.iter().sum();
                BornDistribution::from_probs(n, raw.iter().map(|v| v / sum).collect()).unwrap()
            })
        }

        proptest! {
            #[test]
            fn tv_is_a_metric_on_the_simplex(
                p in arb_dist(3), q in arb_dist(3), r in arb_dist(3)
            ) {
                let pq = tv_distance(&p, &q).unwrap();
                let qp = tv_distance(&q, &p).unwrap();
                let pr = tv_distance(&p, &r).unwrap();
                let rq = tv_distance(&r, &q).unwrap();
                prop_assert!((0.0..=1.0 + 1e-12).contains(&pq));
                prop_assert!((pq - qp).abs() < 1e-15);
                prop_assert!(pq <= pr + rq + 1e-12);
            }

            #[test]
            fn functional_is_monotone_in_phi(p in arb_dist(3)) {
                let lo = QueryFunction::constant(3, -1.0).unwrap();
                let hi = QueryFunction::constant(3, 1.0).unwrap();
                prop_assert!(functional(&p, &lo).unwrap() <= functional(&p, &hi).unwrap());
            }

            #[test]
            fn norm_chain_holds(p in arb_dist(4), q in arb_dist(4)) {
                let r = norms_of_difference(&p, &q).unwrap();
                prop_assert!(r.linf <= r.l4 + 1e-12);
                prop_assert!(r.l4 <= r.l2 + 1e-12);
                prop_assert!(r.l2 <= r.l1 + 1e-12);
                prop_assert!(r.berger <= r.l1 + 1e-12);
            }
        }
    }
}
