//! Seeded randomness: reproducible stream splitting, Haar-random unitaries
//! and states, and complex Gaussian vectors.
//!
//! Every experiment in this crate is keyed by an explicit [`RngStream`].
//! ChaCha12 is used as the underlying generator because it is
//! counter-based: a `(seed, stream_id)` pair fully determines the output
//! sequence, and substreams can be derived without consuming randomness,
//! so trial `t` of an experiment sees the same bits under any worker
//! scheduling.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::sim::Statevector;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RngError {
    #[error("dimension must be at least 1")]
    ZeroDim,
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
}

/// SplitMix64 finalizer. Bijective on u64, used to mix seeds and stream ids.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// A deterministic random stream, identified by `(seed, stream_id)`.
///
/// Distinct stream ids give statistically independent sequences (they map
/// to distinct ChaCha12 stream counters under the same key).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream_id: 0 }
    }

    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Derives child stream `index` of this stream.
    ///
    /// The child seed is `splitmix(seed ^ splitmix(stream_id))`; since the
    /// finalizer is a bijection, spawning is injective in
    /// `(stream_id, index)` for a fixed seed.
    pub fn substream(&self, index: u64) -> RngStream {
        RngStream {
            seed: splitmix(self.seed ^ splitmix(self.stream_id)),
            stream_id: index,
        }
    }

    /// Instantiates the generator positioned at the start of the stream.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut key = [0u8; 32];
        let mut z = self.seed;
        for chunk in key.chunks_exact_mut(8) {
            z = splitmix(z);
            chunk.copy_from_slice(&z.to_le_bytes());
        }
        let mut rng = ChaCha12Rng::from_seed(key);
        rng.set_stream(self.stream_id.into());
        rng
    }
}

/// A dim x dim complex matrix with `U U^dagger = I` within 1e-10 (max-abs).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    matrix: nalgebra::DMatrix<Complex64>,
}

pub const UNITARITY_TOL: f64 = 1e-10;

impl UnitaryMatrix {
    pub fn new(matrix: nalgebra::DMatrix<Complex64>) -> Result<Self, String> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(format!(
                "expected a nonempty square matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        let dev = unitarity_deviation(&matrix);
        if dev > UNITARITY_TOL {
            return Err(format!("matrix is not unitary: max |UU^H - I| = {dev:e}"));
        }
        Ok(Self { dim: matrix.nrows(), matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &nalgebra::DMatrix<Complex64> {
        &self.matrix
    }

    /// Column `j`, i.e. the image of basis state `j`.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        self.matrix.column(j).iter().copied().collect()
    }
}

/// Max-abs entry of `U U^dagger - I`.
pub fn unitarity_deviation(m: &nalgebra::DMatrix<Complex64>) -> f64 {
    let prod = m * m.adjoint();
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            dev = dev.max((prod[(i, j)] - target).norm());
        }
    }
    dev
}

/// One standard complex Gaussian: `g + i h` with `g`, `h` iid N(0, 1).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let g: f64 = StandardNormal.sample(rng);
    let h: f64 = StandardNormal.sample(rng);
    Complex64::new(g, h)
}

/// Vector of `dim` iid standard complex Gaussians.
pub fn complex_gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    (0..dim).map(|_| complex_gaussian(rng)).collect()
}

/// Draws a Haar-distributed unitary on U(dim).
///
/// QR of a complex Ginibre matrix, with each column of Q multiplied by the
/// phase of the corresponding R diagonal entry; without that correction
/// plain QR is not Haar-distributed.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<UnitaryMatrix, RngError> {
    if dim == 0 {
        return Err(RngError::ZeroDim);
    }
    let ginibre = nalgebra::DMatrix::from_fn(dim, dim, |_, _| {
        complex_gaussian(rng) / Complex64::new(std::f64::consts::SQRT_2, 0.0)
    });
    let qr = ginibre.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Ok(UnitaryMatrix { dim, matrix: q })
}

/// Draws a Haar-distributed pure state on the complex unit sphere in
/// dimension `dim = 2^n`, by normalizing a complex Gaussian vector.
///
/// Equivalent in distribution to applying a Haar unitary to any fixed
/// state, without materializing a `2^n x 2^n` matrix.
pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Statevector, RngError> {
    if dim == 0 {
        return Err(RngError::ZeroDim);
    }
    if !dim.is_power_of_two() {
        return Err(RngError::NotPowerOfTwo(dim));
    }
    let n = dim.trailing_zeros() as usize;
    loop {
        let mut v = complex_gaussian_vector(dim, rng);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // Zero norm has probability zero; resampling keeps the output well defined.
        if norm > 0.0 {
            for z in &mut v {
                *z /= norm;
            }
            return Ok(Statevector::from_amplitudes(n, v).expect("normalized vector"));
        }
    }
}
