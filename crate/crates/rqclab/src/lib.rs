//! Numerical laboratory for random brickwork quantum circuits.
//!
//! The crate bundles four kinds of machinery and cross-validates them
//! against each other:
//!
//! * dense statevector simulation of brickwork circuits and their Born
//!   distributions ([`sim`]),
//! * seeded Haar-measure sampling with reproducible substreams ([`rng`]),
//! * exact closed forms: Haar monomial moments, Gaussian-integration
//!   constants, the 1/e total-variation window, restricted-depth moment
//!   bounds, the stabilizer census, and symmetric-subspace design
//!   deviations ([`oracles`]),
//! * statistical-query machinery: the Stat oracle, the learn-to-decide
//!   reduction ([`sq`]), and every theorem-level query-complexity bound as
//!   a pure calculator ([`bounds`]).
//!
//! The Monte Carlo harness ([`mc`]) estimates each expectation or tail the
//! closed forms predict, deterministically under any worker count. The
//! [`verify`] module runs the whole cross-validation battery; the `rqclab`
//! binary and the `examples/` directory expose the same entry points.

pub mod bounds;
pub mod dist;
pub mod mc;
pub mod oracles;
pub mod rng;
pub mod sim;
pub mod sq;
pub mod verify;
