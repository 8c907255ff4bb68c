//! Closed-form reference quantities: exact Haar output moments, Gaussian
//! integration constants, total-variation windows, brickwork second-moment
//! bounds, stabilizer censuses, and state-design deviations.
//!
//! Everything here is either evaluated in exact arithmetic (`BigUint`,
//! `BigRational`) or reduced to a short, explicitly documented floating
//! point formula. These values are what the Monte Carlo harness is checked
//! against, so they must not themselves depend on sampling.

use std::collections::{HashSet, VecDeque};

use nalgebra::DMatrix;
use num::{BigInt, BigRational, BigUint, One, ToPrimitive, Zero};
use num_complex::Complex64;
use thiserror::Error;

use crate::sim::Statevector;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("qubit count must be at least 1")]
    NoQubits,
    #[error("{got} exponents listed but only {dim} distinct strings exist")]
    TooManyStrings { got: usize, dim: u64 },
    #[error("basis label {label} out of range for {n} qubits")]
    LabelOutOfRange { label: usize, n: usize },
    #[error(
        "second-moment bound needs depth >= ln(n)/ln(5/4) = {min_depth:.4}, got {d} at n = {n}"
    )]
    DepthBelowValidRange { n: usize, d: usize, min_depth: f64 },
    #[error("stabilizer enumeration supported for n <= {max}, got {n}")]
    EnumerationTooLarge { n: usize, max: usize },
    #[error("replica dimension {dim}^{t} exceeds the {cap} cap")]
    DesignDimensionTooLarge { dim: usize, t: usize, cap: usize },
    #[error("design order t must be at least 1")]
    ZeroDesignOrder,
    #[error("state list is empty")]
    NoStates,
    #[error("states have mixed dimensions: {0} vs {1}")]
    MixedDimensions(usize, usize),
    #[error("matrix is not hermitian: max |M - M^H| = {0:e}")]
    NotHermitian(f64),
}

fn pow2_big(n: usize) -> BigUint {
    BigUint::one() << n
}

fn factorial(k: u64) -> BigUint {
    (1..=k).map(BigUint::from).product()
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    // Multiply before each divide so every intermediate stays integral.
    let mut acc = BigUint::one();
    for j in 0..k {
        acc = acc * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    acc
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact Haar moment `E[ prod_l P(x_l)^{lambda_l} ]` over states of `n`
/// qubits, for distinct strings `x_1, ..., x_r`:
/// `prod_l lambda_l! / (D (D+1) ... (D+t-1))` with `t = sum_l lambda_l`
/// and `D = 2^n`.
pub fn haar_monomial_moment(n: usize, exponents: &[u64]) -> Result<BigRational, OracleError> {
    if n == 0 {
        return Err(OracleError::NoQubits);
    }
    let dim = pow2_big(n);
    if BigUint::from(exponents.len()) > dim {
        return Err(OracleError::TooManyStrings {
            got: exponents.len(),
            dim: dim.to_u64().unwrap_or(u64::MAX),
        });
    }
    let t: u64 = exponents.iter().sum();
    let numerator: BigUint = exponents.iter().map(|&l| factorial(l)).product();
    let denominator: BigUint = (0..t).map(|j| &dim + BigUint::from(j)).product();
    Ok(ratio(numerator, denominator))
}

pub fn haar_monomial_moment_f64(n: usize, exponents: &[u64]) -> Result<f64, OracleError> {
    Ok(haar_monomial_moment(n, exponents)?.to_f64().unwrap())
}

/// Exact `E[P(x) P(y)]` for a Haar state: `(1 + [x == y]) / (2^n (2^n + 1))`.
pub fn haar_pair_moment(n: usize, x: usize, y: usize) -> Result<BigRational, OracleError> {
    if n == 0 {
        return Err(OracleError::NoQubits);
    }
    if n < usize::BITS as usize {
        let dim = 1usize << n;
        if x >= dim {
            return Err(OracleError::LabelOutOfRange { label: x, n });
        }
        if y >= dim {
            return Err(OracleError::LabelOutOfRange { label: y, n });
        }
    }
    if x == y {
        haar_monomial_moment(n, &[2])
    } else {
        haar_monomial_moment(n, &[1, 1])
    }
}

/// Exact expected collision probability `E[ sum_x P(x)^2 ] = 2 / (2^n + 1)`.
pub fn haar_collision_expectation(n: usize) -> Result<BigRational, OracleError> {
    if n == 0 {
        return Err(OracleError::NoQubits);
    }
    Ok(ratio(BigUint::from(2u8), pow2_big(n) + BigUint::one()))
}

/// Exact variance of `P[phi] = sum_x P(x) phi(x)` under a Haar state:
/// `( sum phi^2 - (sum phi)^2 / D ) / ( D (D+1) )`.
pub fn haar_functional_variance(n: usize, phi: &crate::dist::QueryFunction) -> f64 {
    let d = (1usize << n) as f64;
    let s1: f64 = phi.values().iter().sum();
    let s2: f64 = phi.values().iter().map(|v| v * v).sum();
    (s2 - s1 * s1 / d) / (d * (d + 1.0))
}

/// The Gaussian moment normalizer `(2D)(2D+2)...(2D+2(k-1))`, which equals
/// `k! 2^k binom(D+k-1, k)` and is the exact value of `E[ ||g||^(2k) ]` for
/// a vector of `D` standard complex Gaussians (real and imaginary parts of
/// unit variance each).
pub fn gaussian_integration_constant(dim: u64, k: u64) -> BigUint {
    (0..k).map(|j| BigUint::from(2 * dim + 2 * j)).product()
}

/// Limit value `1/e` of the expected total variation distance between a
/// Haar output distribution and uniform, as `n` grows.
pub fn gaussian_m_limit() -> f64 {
    (-1.0f64).exp()
}

/// Bound `1/(2 sqrt(D))` on how far the finite-`D` Gaussian mean can sit
/// from its `1/e` limit.
pub fn gaussian_delta_bound(dim: u64) -> f64 {
    1.0 / (2.0 * (dim as f64).sqrt())
}

/// Exact mean total variation distance from uniform for a flat Dirichlet
/// sample on `D` outcomes: `(1 - 1/D)^D`. This is also the exact mean for
/// a Haar state on `D` dimensions, since its output probabilities are flat
/// Dirichlet.
pub fn dirichlet_tv_exact(dim: u64) -> BigRational {
    let d = BigUint::from(dim);
    let num = (&d - BigUint::one()).pow(dim as u32);
    let den = d.pow(dim as u32);
    ratio(num, den)
}

/// An interval `center +/- half_width`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TvWindow {
    pub center: f64,
    pub half_width: f64,
}

impl TvWindow {
    pub fn contains(&self, x: f64) -> bool {
        (x - self.center).abs() <= self.half_width
    }

    pub fn lo(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn hi(&self) -> f64 {
        self.center + self.half_width
    }
}

/// Window `1/e +/- 2^(-n/2 - 1)` that contains the expected total
/// variation distance of a Haar output distribution from uniform.
pub fn haar_tv_window(n: usize) -> Result<TvWindow, OracleError> {
    if n == 0 {
        return Err(OracleError::NoQubits);
    }
    Ok(TvWindow {
        center: gaussian_m_limit(),
        half_width: 2f64.powf(-(n as f64) / 2.0 - 1.0),
    })
}

/// Minimum depth `ln(n) / ln(5/4)` at which the brickwork second-moment
/// bound is proved.
pub fn second_moment_min_depth(n: usize) -> f64 {
    (n as f64).ln() / (5.0f64 / 4.0).ln()
}

/// The brickwork second-moment bound together with its validity regime.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondMomentBound {
    /// `(1 + [x == y]) (1 + n (4/5)^d) / 2^(2n)` as an exact rational.
    pub exact: BigRational,
    pub value: f64,
    /// Whether `d >= ln(n)/ln(5/4)`, the regime the bound is proved in.
    pub regime_valid: bool,
    pub min_depth: f64,
}

/// Upper bound on `E[P(x) P(y)]` over depth-`d` brickwork circuits,
/// evaluated at any depth; `regime_valid` records whether the proof's
/// depth precondition holds.
pub fn brickwork_second_moment_bound_any_depth(
    n: usize,
    d: usize,
    equal_strings: bool,
) -> Result<SecondMomentBound, OracleError> {
    if n == 0 {
        return Err(OracleError::NoQubits);
    }
    let min_depth = second_moment_min_depth(n);
    // (1 + [x==y]) * (5^d + n 4^d) / (5^d 2^(2n))
    let five_d = BigUint::from(5u8).pow(d as u32);
    let four_d = BigUint::from(4u8).pow(d as u32);
    let num = BigUint::from(if equal_strings { 2u8 } else { 1u8 })
        * (&five_d + BigUint::from(n) * four_d);
    let den = five_d * pow2_big(2 * n);
    let exact = ratio(num, den);
    let value = exact.to_f64().unwrap();
    Ok(SecondMomentBound {
        exact,
        value,
        regime_valid: d as f64 >= min_depth,
        min_depth,
    })
}

/// Same as [`brickwork_second_moment_bound_any_depth`] but refuses depths
/// below the proved regime.
pub fn brickwork_second_moment_bound(
    n: usize,
    d: usize,
    equal_strings: bool,
) -> Result<SecondMomentBound, OracleError> {
    let bound = brickwork_second_moment_bound_any_depth(n, d, equal_strings)?;
    if !bound.regime_valid {
        return Err(OracleError::DepthBelowValidRange { n, d, min_depth: bound.min_depth });
    }
    Ok(bound)
}

/// Upper bound `n (4/5)^d (1 + 2^-n) + 2^-n` on the variance of `P[phi]`
/// over depth-`d` brickwork circuits, valid for query functions with
/// values in `[0, 1]`. Returned at any depth; `regime_valid` mirrors the
/// second-moment precondition it is assembled from.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct VarianceBound {
    pub value: f64,
    pub regime_valid: bool,
    pub min_depth: f64,
}

pub fn brickwork_variance_bound(n: usize, d: usize) -> Result<VarianceBound, OracleError> {
    if n == 0 {
        return Err(OracleError::NoQubits);
    }
    let min_depth = second_moment_min_depth(n);
    let inv_dim = 2f64.powi(-(n as i32));
    let decay = n as f64 * (0.8f64).powi(d as i32);
    Ok(VarianceBound {
        value: decay * (1.0 + inv_dim) + inv_dim,
        regime_valid: d as f64 >= min_depth,
        min_depth,
    })
}

/// Exact number of stabilizer states on `n` qubits:
/// `2^n prod_{i=1..n} (2^i + 1)`.
pub fn stabilizer_count(n: usize) -> Result<BigUint, OracleError> {
    if n == 0 {
        return Err(OracleError::NoQubits);
    }
    let product: BigUint = (1..=n).map(|i| pow2_big(i) + BigUint::one()).product();
    Ok(pow2_big(n) * product)
}

/// Exact number of stabilizer states whose output distribution is exactly
/// uniform: `2^(n + n(n+1)/2)`.
pub fn flat_stabilizer_count(n: usize) -> Result<BigUint, OracleError> {
    if n == 0 {
        return Err(OracleError::NoQubits);
    }
    Ok(pow2_big(n + n * (n + 1) / 2))
}

/// Fraction of stabilizer states with uniform output,
/// `prod_{i=1..n} 1/(1 + 2^-i)`; converges to 0.41942244... as n grows.
pub fn flat_stabilizer_fraction(n: usize) -> Result<f64, OracleError> {
    if n == 0 {
        return Err(OracleError::NoQubits);
    }
    Ok((1..=n).map(|i| 1.0 / (1.0 + 2f64.powi(-(i as i32)))).product())
}

/// The result of a breadth-first enumeration of all stabilizer states.
#[derive(Debug, Clone)]
pub struct StabilizerCensus {
    pub n: usize,
    pub states: Vec<Statevector>,
    /// How many of the states have an exactly uniform output distribution.
    pub flat_count: usize,
}

const ENUMERATION_MAX_QUBITS: usize = 4;
const CANON_GRID: f64 = 1e9;

fn canonical_key(amps: &[Complex64]) -> Vec<(i64, i64)> {
    // Remove the global phase by rotating the first nonzero amplitude onto
    // the positive real axis, then snap to a 1e-9 grid.
    let pivot = amps
        .iter()
        .find(|a| a.norm() > 1e-6)
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = pivot / pivot.norm();
    amps.iter()
        .map(|a| {
            let r = a / phase;
            (
                (r.re * CANON_GRID).round() as i64,
                (r.im * CANON_GRID).round() as i64,
            )
        })
        .collect()
}

fn apply_one_qubit(amps: &mut [Complex64], m: &[[Complex64; 2]; 2], q: usize) {
    let bit = 1usize << (q - 1);
    for base in 0..amps.len() {
        if base & bit != 0 {
            continue;
        }
        let a0 = amps[base];
        let a1 = amps[base | bit];
        amps[base] = m[0][0] * a0 + m[0][1] * a1;
        amps[base | bit] = m[1][0] * a0 + m[1][1] * a1;
    }
}

fn apply_cnot(amps: &mut [Complex64], control: usize, target: usize) {
    let c = 1usize << (control - 1);
    let t = 1usize << (target - 1);
    for base in 0..amps.len() {
        if base & c != 0 && base & t == 0 {
            amps.swap(base, base | t);
        }
    }
}

/// Enumerates every stabilizer state on `n <= 4` qubits by closing
/// `|0...0>` under Hadamard, phase, and CNOT generators, deduplicating up
/// to global phase.
pub fn enumerate_stabilizer_states(n: usize) -> Result<StabilizerCensus, OracleError> {
    if n == 0 {
        return Err(OracleError::NoQubits);
    }
    if n > ENUMERATION_MAX_QUBITS {
        return Err(OracleError::EnumerationTooLarge { n, max: ENUMERATION_MAX_QUBITS });
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = [
        [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
    ];
    let phase = [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)],
    ];

    let dim = 1usize << n;
    let mut start = vec![Complex64::new(0.0, 0.0); dim];
    start[0] = Complex64::new(1.0, 0.0);

    let mut seen = HashSet::new();
    seen.insert(canonical_key(&start));
    let mut queue = VecDeque::from([start]);
    let mut states = Vec::new();

    while let Some(amps) = queue.pop_front() {
        states.push(amps.clone());
        let mut push = |next: Vec<Complex64>, seen: &mut HashSet<Vec<(i64, i64)>>,
                        queue: &mut VecDeque<Vec<Complex64>>| {
            if seen.insert(canonical_key(&next)) {
                queue.push_back(next);
            }
        };
        for q in 1..=n {
            let mut next = amps.clone();
            apply_one_qubit(&mut next, &h, q);
            push(next, &mut seen, &mut queue);
            let mut next = amps.clone();
            apply_one_qubit(&mut next, &phase, q);
            push(next, &mut seen, &mut queue);
        }
        for c in 1..=n {
            for t in 1..=n {
                if c != t {
                    let mut next = amps.clone();
                    apply_cnot(&mut next, c, t);
                    push(next, &mut seen, &mut queue);
                }
            }
        }
    }

    let flat = 1.0 / dim as f64;
    let flat_count = states
        .iter()
        .filter(|amps| amps.iter().all(|a| (a.norm_sqr() - flat).abs() < 1e-9))
        .count();
    let states = states
        .into_iter()
        .map(|amps| Statevector::from_amplitudes(n, amps).expect("unit norm preserved"))
        .collect();
    Ok(StabilizerCensus { n, states, flat_count })
}

/// Trace norm (sum of singular values) of an arbitrary complex matrix.
pub fn trace_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone().svd(false, false).singular_values.iter().sum()
}

/// Trace norm of a hermitian matrix via its eigenvalues; errors if the
/// matrix is not hermitian within 1e-9.
pub fn hermitian_trace_norm(m: &DMatrix<Complex64>) -> Result<f64, OracleError> {
    let dev = (m - m.adjoint()).iter().map(|e| e.norm()).fold(0.0, f64::max);
    if dev > 1e-9 {
        return Err(OracleError::NotHermitian(dev));
    }
    Ok(m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .sum())
}

fn permutations(t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..t).collect();
    fn heap(k: usize, arr: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(arr.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, arr, out);
            if k % 2 == 0 {
                arr.swap(i, k - 1);
            } else {
                arr.swap(0, k - 1);
            }
        }
    }
    heap(t, &mut current, &mut out);
    out
}

const DESIGN_DIM_CAP: usize = 1024;

fn check_replica_dim(dim: usize, t: usize) -> Result<usize, OracleError> {
    if t == 0 {
        return Err(OracleError::ZeroDesignOrder);
    }
    let mut total = 1usize;
    for _ in 0..t {
        total = total
            .checked_mul(dim)
            .filter(|v| *v <= DESIGN_DIM_CAP)
            .ok_or(OracleError::DesignDimensionTooLarge { dim, t, cap: DESIGN_DIM_CAP })?;
    }
    Ok(total)
}

/// Orthogonal projector onto the symmetric subspace of `(C^dim)^(x t)`,
/// as the average of all `t!` tensor-leg permutation operators.
pub fn symmetric_projector(dim: usize, t: usize) -> Result<DMatrix<Complex64>, OracleError> {
    let total = check_replica_dim(dim, t)?;
    let perms = permutations(t);
    let weight = 1.0 / perms.len() as f64;
    let mut proj = DMatrix::from_element(total, total, Complex64::new(0.0, 0.0));
    let mut digits = vec![0usize; t];
    for col in 0..total {
        let mut rest = col;
        for k in (0..t).rev() {
            digits[k] = rest % dim;
            rest /= dim;
        }
        for perm in &perms {
            let mut row = 0usize;
            for k in 0..t {
                row = row * dim + digits[perm[k]];
            }
            proj[(row, col)] += Complex64::new(weight, 0.0);
        }
    }
    Ok(proj)
}

/// How far an ensemble of states is from a projective t-design.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DesignDeviationReport {
    pub t: usize,
    pub dim: usize,
    pub num_states: usize,
    /// Trace-norm distance between the ensemble's t-th moment operator and
    /// the Haar moment operator (the normalized symmetric projector).
    pub deviation: f64,
    /// Spread of per-batch deviations divided by sqrt(batches); a scale
    /// cue for sampled ensembles, not a rigorous confidence radius. None
    /// when fewer than two batches are requested (e.g. for exact orbits).
    pub batch_spread: Option<f64>,
}

fn moment_operator(
    states: &[&Statevector],
    dim: usize,
    t: usize,
    total: usize,
) -> DMatrix<Complex64> {
    let mut acc = DMatrix::from_element(total, total, Complex64::new(0.0, 0.0));
    let mut replica = vec![Complex64::new(0.0, 0.0); total];
    for state in states {
        let amps = state.amplitudes();
        let mut digits = vec![0usize; t];
        for (idx, slot) in replica.iter_mut().enumerate() {
            let mut rest = idx;
            for k in (0..t).rev() {
                digits[k] = rest % dim;
                rest /= dim;
            }
            *slot = digits.iter().map(|&i| amps[i]).product();
        }
        for (col, cv) in replica.iter().enumerate() {
            let cvc = cv.conj();
            for (row, rv) in replica.iter().enumerate() {
                acc[(row, col)] += rv * cvc;
            }
        }
    }
    acc / Complex64::new(states.len() as f64, 0.0)
}

/// Trace-norm deviation of the ensemble's t-th moment operator from the
/// Haar value `P_sym / binom(dim + t - 1, t)`. `batches >= 2` additionally
/// reports the spread of deviations across contiguous batches.
pub fn state_design_deviation(
    states: &[Statevector],
    t: usize,
    batches: usize,
) -> Result<DesignDeviationReport, OracleError> {
    if states.is_empty() {
        return Err(OracleError::NoStates);
    }
    let dim = states[0].dim();
    for s in states {
        if s.dim() != dim {
            return Err(OracleError::MixedDimensions(dim, s.dim()));
        }
    }
    let total = check_replica_dim(dim, t)?;

    let sym_dim = binomial((dim + t - 1) as u64, t as u64).to_f64().unwrap();
    let target = symmetric_projector(dim, t)? / Complex64::new(sym_dim, 0.0);

    let refs: Vec<&Statevector> = states.iter().collect();
    let deviation = hermitian_trace_norm(&(moment_operator(&refs, dim, t, total) - &target))?;

    let batch_spread = if batches >= 2 && states.len() >= batches {
        let per_batch = states.len() / batches;
        let mut devs = Vec::with_capacity(batches);
        for b in 0..batches {
            let chunk = &refs[b * per_batch..(b + 1) * per_batch];
            devs.push(hermitian_trace_norm(
                &(moment_operator(chunk, dim, t, total) - &target),
            )?);
        }
        let mean = devs.iter().sum::<f64>() / batches as f64;
        let var = devs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (batches as f64 - 1.0);
        Some((var / batches as f64).sqrt())
    } else {
        None
    };

    Ok(DesignDeviationReport { t, dim, num_states: states.len(), deviation, batch_spread })
}
