//! Dense statevector simulation of n-qubit states and brickwork circuits.
//!
//! Conventions, fixed so that basis-state examples are bit-exact:
//!
//! * qubit 1 is the least-significant bit of the basis index;
//! * a two-qubit gate on `(q_lo, q_hi)` acts on the 4-dimensional basis
//!   ordered as `2 * bit(q_hi) + bit(q_lo)`;
//! * layer 1 of a brickwork circuit pairs `(1,2), (3,4), ...`; layer 2
//!   pairs `(2,3), (4,5), ..., (n,1)` with periodic wraparound, and the
//!   parities alternate from there.
//!
//! Gates are applied in place with stride arithmetic over the amplitude
//! array; no `2^n x 2^n` matrix is ever materialized.

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::rng::{haar_unitary, unitarity_deviation, UNITARITY_TOL};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("qubit count must be at least 1")]
    NoQubits,
    #[error("brickwork circuits require an even qubit count, got {0}")]
    OddQubits(usize),
    #[error("qubit index {index} out of range 1..={n}")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("gate requires two distinct qubits, got {0} twice")]
    EqualQubits(usize),
    #[error("basis label {label} out of range for {n} qubits")]
    LabelOutOfRange { label: usize, n: usize },
    #[error("amplitude vector has length {got}, expected {expected}")]
    BadLength { got: usize, expected: usize },
    #[error("state is not normalized: |norm - 1| = {0:e}")]
    NotNormalized(f64),
    #[error("gate matrix is not unitary: max |GG^H - I| = {0:e}")]
    NotUnitary(f64),
    #[error("probabilities sum to {0}, expected 1 within 1e-9")]
    BadProbabilitySum(f64),
    #[error("negative probability {value:e} at index {index}")]
    NegativeProbability { index: usize, value: f64 },
    #[error("malformed layer {layer}: {reason}")]
    MalformedLayer { layer: usize, reason: String },
}

/// Norm drift per circuit beyond which a state is renormalized.
pub const RENORM_THRESHOLD: f64 = 1e-10;

static RENORM_EVENTS: AtomicU64 = AtomicU64::new(0);

/// Number of renormalization events since process start. Drift beyond
/// [`RENORM_THRESHOLD`] is corrected silently but never unrecorded.
pub fn renormalization_count() -> u64 {
    RENORM_EVENTS.load(Ordering::Relaxed)
}

/// A pure state on `n` qubits: `2^n` complex amplitudes, unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// The basis state `|label>`.
    pub fn basis(n: usize, label: usize) -> Result<Self, SimError> {
        if n == 0 {
            return Err(SimError::NoQubits);
        }
        let dim = 1usize << n;
        if label >= dim {
            return Err(SimError::LabelOutOfRange { label, n });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[label] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Wraps an amplitude vector; the norm must already be 1 within 1e-6.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self, SimError> {
        if n == 0 {
            return Err(SimError::NoQubits);
        }
        let expected = 1usize << n;
        if amps.len() != expected {
            return Err(SimError::BadLength { got: amps.len(), expected });
        }
        let state = Self { n, amps };
        let dev = (state.norm() - 1.0).abs();
        if dev > 1e-6 {
            return Err(SimError::NotNormalized(dev));
        }
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Euclidean distance `|| self - other ||_2`.
    pub fn distance(&self, other: &Statevector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn renormalize_if_drifted(&mut self) {
        let norm = self.norm();
        if (norm - 1.0).abs() > RENORM_THRESHOLD {
            RENORM_EVENTS.fetch_add(1, Ordering::Relaxed);
            for a in &mut self.amps {
                *a /= norm;
            }
        }
    }
}

/// A 4x4 unitary acting on two qubits. Unitarity is checked at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitGate {
    m: [[Complex64; 4]; 4],
}

impl TwoQubitGate {
    pub fn new(m: [[Complex64; 4]; 4]) -> Result<Self, SimError> {
        let dm = nalgebra::DMatrix::from_fn(4, 4, |i, j| m[i][j]);
        let dev = unitarity_deviation(&dm);
        if dev > UNITARITY_TOL {
            return Err(SimError::NotUnitary(dev));
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &[[Complex64; 4]; 4] {
        &self.m
    }

    pub fn identity() -> Self {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Complex64::new(1.0, 0.0);
        }
        Self { m }
    }

    pub fn swap() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        Self {
            m: [[o, z, z, z], [z, z, o, z], [z, o, z, z], [z, z, z, o]],
        }
    }

    /// CNOT composed after a Hadamard on the pair's low qubit: maps
    /// `|00>` to the Bell state `(|00> + |11>)/sqrt(2)`.
    pub fn bell() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        // Columns are images of |00>, |01>, |10>, |11> in (hi, lo) order.
        Self {
            m: [
                [s, s, z, z],
                [z, z, s, s],
                [z, z, s, -s],
                [s, -s, z, z],
            ],
        }
    }

    /// Haar-random element of U(4).
    pub fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let u = haar_unitary(4, rng).expect("dim 4");
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = u.matrix()[(i, j)];
            }
        }
        Self { m }
    }
}

/// Applies `gate` to qubits `(q_lo, q_hi)` of `state`, in place.
///
/// Qubit indices are 1-based; the gate's 4-dimensional basis index is
/// `2 * bit(q_hi) + bit(q_lo)`.
pub fn apply_two_qubit_gate(
    state: &mut Statevector,
    gate: &TwoQubitGate,
    q_lo: usize,
    q_hi: usize,
) -> Result<(), SimError> {
    let n = state.n;
    for q in [q_lo, q_hi] {
        if q == 0 || q > n {
            return Err(SimError::QubitOutOfRange { index: q, n });
        }
    }
    if q_lo == q_hi {
        return Err(SimError::EqualQubits(q_lo));
    }
    let lo = 1usize << (q_lo - 1);
    let hi = 1usize << (q_hi - 1);
    let mask = lo | hi;
    let m = &gate.m;
    let amps = &mut state.amps;
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        let idx = [base, base | lo, base | hi, base | lo | hi];
        let a = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (r, &target) in idx.iter().enumerate() {
            amps[target] =
                m[r][0] * a[0] + m[r][1] * a[1] + m[r][2] * a[2] + m[r][3] * a[3];
        }
    }
    Ok(())
}

/// A brickwork circuit: `d` layers of two-qubit gates on `n` qubits
/// (n even), alternating between the `(1,2)`-aligned and the
/// `(2,3)`-aligned pairing, the latter wrapping around via `(n, 1)`.
#[derive(Debug, Clone)]
pub struct BrickworkCircuit {
    n: usize,
    layers: Vec<Vec<(TwoQubitGate, usize, usize)>>,
}

/// Qubit pairs of 1-based layer `k` on `n` qubits.
pub fn layer_pairs(n: usize, k: usize) -> Result<Vec<(usize, usize)>, SimError> {
    if n == 0 {
        return Err(SimError::NoQubits);
    }
    if n % 2 != 0 {
        return Err(SimError::OddQubits(n));
    }
    let pairs = if k % 2 == 1 {
        (0..n / 2).map(|i| (2 * i + 1, 2 * i + 2)).collect()
    } else {
        (0..n / 2)
            .map(|i| (2 * i + 2, if 2 * i + 3 > n { 1 } else { 2 * i + 3 }))
            .collect()
    };
    Ok(pairs)
}

impl BrickworkCircuit {
    /// Builds a circuit from explicit per-layer gates, one gate per pair of
    /// the layer's brickwork pattern (same order as [`layer_pairs`]).
    pub fn from_layer_gates(n: usize, gates: Vec<Vec<TwoQubitGate>>) -> Result<Self, SimError> {
        if n == 0 {
            return Err(SimError::NoQubits);
        }
        if n % 2 != 0 {
            return Err(SimError::OddQubits(n));
        }
        let mut layers = Vec::with_capacity(gates.len());
        for (i, layer_gates) in gates.into_iter().enumerate() {
            let k = i + 1;
            let pairs = layer_pairs(n, k)?;
            if layer_gates.len() != pairs.len() {
                return Err(SimError::MalformedLayer {
                    layer: k,
                    reason: format!("{} gates for {} pairs", layer_gates.len(), pairs.len()),
                });
            }
            layers.push(
                layer_gates
                    .into_iter()
                    .zip(pairs)
                    .map(|(g, (a, b))| (g, a, b))
                    .collect(),
            );
        }
        Ok(Self { n, layers })
    }

    /// Samples a depth-`d` circuit with iid Haar gates from U(4).
    pub fn sample<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Self, SimError> {
        if n == 0 {
            return Err(SimError::NoQubits);
        }
        if n % 2 != 0 {
            return Err(SimError::OddQubits(n));
        }
        let gates = (1..=d)
            .map(|k| {
                layer_pairs(n, k)
                    .map(|pairs| pairs.iter().map(|_| TwoQubitGate::haar(rng)).collect())
            })
            .collect::<Result<Vec<Vec<TwoQubitGate>>, SimError>>()?;
        Self::from_layer_gates(n, gates)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<(TwoQubitGate, usize, usize)>] {
        &self.layers
    }

    /// Applies layers 1..=d in order to `|initial>`; depth 0 returns the
    /// basis state itself.
    pub fn run(&self, initial: usize) -> Result<Statevector, SimError> {
        let mut state = Statevector::basis(self.n, initial)?;
        for layer in &self.layers {
            for (gate, a, b) in layer {
                apply_two_qubit_gate(&mut state, gate, *a, *b)?;
            }
        }
        state.renormalize_if_drifted();
        Ok(state)
    }
}

/// A probability table over `{0,1}^n`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BornDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl BornDistribution {
    /// Born rule: `probs[x] = |amplitudes[x]|^2`. Errors if the state norm
    /// deviates from 1 by more than 1e-6.
    pub fn from_state(state: &Statevector) -> Result<Self, SimError> {
        let dev = (state.norm() - 1.0).abs();
        if dev > 1e-6 {
            return Err(SimError::NotNormalized(dev));
        }
        Ok(Self {
            n: state.n,
            probs: state.amps.iter().map(|a| a.norm_sqr()).collect(),
        })
    }

    /// Wraps a probability table: entries below -1e-12 are an error, tiny
    /// negatives clamp to 0, and the sum must be 1 within 1e-9.
    pub fn from_probs(n: usize, mut probs: Vec<f64>) -> Result<Self, SimError> {
        if n == 0 {
            return Err(SimError::NoQubits);
        }
        let expected = 1usize << n;
        if probs.len() != expected {
            return Err(SimError::BadLength { got: probs.len(), expected });
        }
        for (index, p) in probs.iter_mut().enumerate() {
            if *p < -1e-12 {
                return Err(SimError::NegativeProbability { index, value: *p });
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(SimError::BadProbabilitySum(sum));
        }
        Ok(Self { n, probs })
    }

    pub fn uniform(n: usize) -> Self {
        let dim = 1usize << n;
        Self { n, probs: vec![1.0 / dim as f64; dim] }
    }

    pub fn point_mass(n: usize, label: usize) -> Result<Self, SimError> {
        let dim = 1usize << n;
        if label >= dim {
            return Err(SimError::LabelOutOfRange { label, n });
        }
        let mut probs = vec![0.0; dim];
        probs[label] = 1.0;
        Ok(Self { n, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_gate_leaves_state_unchanged() {
        let mut rng = RngStream::new(21).rng();
        let psi = crate::rng::haar_state(8, &mut rng).unwrap();
        let mut moved = psi.clone();
        apply_two_qubit_gate(&mut moved, &TwoQubitGate::identity(), 1, 3).unwrap();
        assert_eq!(psi.amplitudes(), moved.amplitudes());
    }

    #[test]
    fn swap_gate_permutes_basis_labels() {
        // |01> is the 2-qubit string with qubit1 = 0, qubit2 = 1, i.e.
        // index 2; SWAP sends it to |10> = index 1.
        let mut state = Statevector::basis(2, 2).unwrap();
        apply_two_qubit_gate(&mut state, &TwoQubitGate::swap(), 1, 2).unwrap();
        let a = state.amplitudes();
        assert_eq!(a[1], c(1.0, 0.0));
        for (i, v) in a.iter().enumerate() {
            if i != 1 {
                assert_eq!(*v, c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn bell_gate_on_zero_state() {
        let mut state = Statevector::basis(2, 0).unwrap();
        apply_two_qubit_gate(&mut state, &TwoQubitGate::bell(), 1, 2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = state.amplitudes();
        assert!((a[0] - c(s, 0.0)).norm() < 1e-15);
        assert!((a[3] - c(s, 0.0)).norm() < 1e-15);
        assert!(a[1].norm() < 1e-15 && a[2].norm() < 1e-15);
    }

    #[test]
    fn gate_index_errors() {
        let mut state = Statevector::basis(2, 0).unwrap();
        let g = TwoQubitGate::identity();
        assert_eq!(
            apply_two_qubit_gate(&mut state, &g, 0, 1).unwrap_err(),
            SimError::QubitOutOfRange { index: 0, n: 2 }
        );
        assert_eq!(
            apply_two_qubit_gate(&mut state, &g, 1, 3).unwrap_err(),
            SimError::QubitOutOfRange { index: 3, n: 2 }
        );
        assert_eq!(
            apply_two_qubit_gate(&mut state, &g, 2, 2).unwrap_err(),
            SimError::EqualQubits(2)
        );
    }

    #[test]
    fn non_unitary_gate_rejected_at_construction() {
        let mut m = [[c(0.0, 0.0); 4]; 4];
        m[0][0] = c(2.0, 0.0);
        assert!(matches!(TwoQubitGate::new(m), Err(SimError::NotUnitary(_))));
    }

    #[test]
    fn depth_zero_circuit_returns_basis_state() {
        let circuit = BrickworkCircuit::from_layer_gates(4, vec![]).unwrap();
        let state = circuit.run(0).unwrap();
        assert_eq!(state.amplitudes()[0], c(1.0, 0.0));
        assert_eq!(state.dim(), 16);
    }

    #[test]
    fn all_identity_circuit_is_inert() {
        let gates = (1..=5)
            .map(|_| (0..3).map(|_| TwoQubitGate::identity()).collect())
            .collect();
        let circuit = BrickworkCircuit::from_layer_gates(6, gates).unwrap();
        let state = circuit.run(37).unwrap();
        assert_eq!(state.amplitudes()[37], c(1.0, 0.0));
    }

    #[test]
    fn single_bell_layer_produces_bell_state() {
        let circuit =
            BrickworkCircuit::from_layer_gates(2, vec![vec![TwoQubitGate::bell()]]).unwrap();
        let state = circuit.run(0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((state.amplitudes()[0] - c(s, 0.0)).norm() < 1e-15);
        assert!((state.amplitudes()[3] - c(s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn layer_pairs_match_brickwork_pattern() {
        assert_eq!(layer_pairs(6, 1).unwrap(), vec![(1, 2), (3, 4), (5, 6)]);
        assert_eq!(layer_pairs(6, 2).unwrap(), vec![(2, 3), (4, 5), (6, 1)]);
        assert_eq!(layer_pairs(6, 3).unwrap(), layer_pairs(6, 1).unwrap());
        assert_eq!(layer_pairs(8, 2).unwrap(), vec![(2, 3), (4, 5), (6, 7), (8, 1)]);
    }

    #[test]
    fn sampled_circuit_has_brickwork_structure() {
        let mut rng = RngStream::new(22).rng();
        let circuit = BrickworkCircuit::sample(8, 5, &mut rng).unwrap();
        assert_eq!(circuit.depth(), 5);
        for (i, layer) in circuit.layers().iter().enumerate() {
            let pairs = layer_pairs(8, i + 1).unwrap();
            let got: Vec<(usize, usize)> = layer.iter().map(|(_, a, b)| (*a, *b)).collect();
            assert_eq!(got, pairs);
            // Each qubit appears in exactly one gate per layer.
            let mut seen = vec![false; 9];
            for (a, b) in got {
                assert!(!seen[a] && !seen[b]);
                seen[a] = true;
                seen[b] = true;
            }
            assert!(seen[1..].iter().all(|s| *s));
        }
    }

    #[test]
    fn odd_qubit_count_rejected() {
        let mut rng = RngStream::new(23).rng();
        assert_eq!(
            BrickworkCircuit::sample(5, 2, &mut rng).unwrap_err(),
            SimError::OddQubits(5)
        );
    }

    #[test]
    fn identical_seed_gives_bit_identical_circuit_output() {
        let run = || {
            let mut rng = RngStream::new(24).rng();
            let circuit = BrickworkCircuit::sample(6, 7, &mut rng).unwrap();
            circuit.run(0).unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.amplitudes(), b.amplitudes());
    }

    #[test]
    fn norm_preserved_over_random_gate_sequences() {
        let mut rng = RngStream::new(25).rng();
        for _ in 0..1000 {
            let n = 2 + 2 * (rng.random_range(0..3usize));
            let mut state = crate::rng::haar_state(1 << n, &mut rng).unwrap();
            let q_lo = rng.random_range(1..=n);
            let mut q_hi = rng.random_range(1..=n);
            while q_hi == q_lo {
                q_hi = rng.random_range(1..=n);
            }
            let gate = TwoQubitGate::haar(&mut rng);
            apply_two_qubit_gate(&mut state, &gate, q_lo, q_hi).unwrap();
            assert!((state.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn born_distribution_examples() {
        let point = Statevector::basis(3, 0).unwrap();
        let dist = BornDistribution::from_state(&point).unwrap();
        assert_eq!(dist.probs()[0], 1.0);
        assert_eq!(dist.probs()[1..].iter().sum::<f64>(), 0.0);

        let mut bell = Statevector::basis(2, 0).unwrap();
        apply_two_qubit_gate(&mut bell, &TwoQubitGate::bell(), 1, 2).unwrap();
        let dist = BornDistribution::from_state(&bell).unwrap();
        for (i, expected) in [0.5, 0.0, 0.0, 0.5].iter().enumerate() {
            assert!((dist.probs()[i] - expected).abs() < 1e-15);
        }

        let n = 4;
        let amp = Complex64::new(0.25, 0.0);
        let flat = Statevector::from_amplitudes(n, vec![amp; 16]).unwrap();
        let dist = BornDistribution::from_state(&flat).unwrap();
        assert_eq!(dist, BornDistribution::uniform(n));
    }

    #[test]
    fn born_distribution_sums_to_one() {
        let mut rng = RngStream::new(26).rng();
        let circuit = BrickworkCircuit::sample(10, 12, &mut rng).unwrap();
        let dist = BornDistribution::from_state(&circuit.run(0).unwrap()).unwrap();
        assert!((dist.sum() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn from_probs_validation() {
        assert!(matches!(
            BornDistribution::from_probs(1, vec![0.6, 0.5]),
            Err(SimError::BadProbabilitySum(_))
        ));
        assert!(matches!(
            BornDistribution::from_probs(1, vec![1.1, -0.1]),
            Err(SimError::NegativeProbability { .. })
        ));
        // A -1e-13 entry clamps to zero.
        let d = BornDistribution::from_probs(1, vec![1.0 + 1e-13, -1e-13]).unwrap();
        assert_eq!(d.probs()[1], 0.0);
    }

    #[test]
    fn unnormalized_state_rejected_by_born() {
        let mut amps = vec![Complex64::new(0.0, 0.0); 4];
        amps[0] = Complex64::new(1.0, 0.0);
        let mut state = Statevector::from_amplitudes(2, amps).unwrap();
        state.amps[0] = Complex64::new(1.1, 0.0);
        assert!(matches!(
            BornDistribution::from_state(&state),
            Err(SimError::NotNormalized(_))
        ));
    }
}
