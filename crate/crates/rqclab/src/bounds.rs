//! Query-complexity and concentration bound calculators.
//!
//! Every calculator returns a [`BoundResult`] carrying the numeric value,
//! a log-space rendition (`log2`), the list of hypotheses it was derived
//! under, and an `informative` flag. The flag is false exactly when the
//! value had to be clamped to stay meaningful (a tail bound above 1, a
//! query bound below 0) or when some hypothesis does not hold for the
//! supplied parameters; the raw formula value is still reported so scans
//! over parameter space stay smooth.
//!
//! `log2` is computed analytically in log space wherever the formula
//! permits, so bounds that underflow or overflow `f64` (they routinely do
//! at cryptographic sizes) still report a usable magnitude.

use thiserror::Error;

use std::f64::consts::{E, LOG2_E, PI};

#[derive(Debug, Error, PartialEq)]
pub enum BoundError {
    #[error("qubit count must be at least 1")]
    NoQubits,
    #[error("dimension must be finite and at least 1, got {0}")]
    BadDimension(f64),
    #[error("tolerance must lie in (0, 1], got {0}")]
    BadTolerance(f64),
    #[error("success probability must lie in (0, 1], got {0}")]
    BadBeta(f64),
    #[error("alpha must lie in (0, 1], got {0}")]
    BadAlpha(f64),
    #[error("epsilon must be nonnegative and finite, got {0}")]
    BadEpsilon(f64),
    #[error("delta must be positive and finite, got {0}")]
    BadDelta(f64),
    #[error("lipschitz constant must be positive and finite, got {0}")]
    BadLipschitz(f64),
    #[error("probability argument must lie in [0, 1], got {0}")]
    BadProbability(f64),
    #[error("deviation probability must be positive and finite, got {0}")]
    BadFrac(f64),
    #[error("design order must be at least 2, got {0}")]
    BadDesignOrder(usize),
    #[error("accuracy must lie in (0, 1), got {0}")]
    BadAccuracy(f64),
    #[error("parameter c must be positive and finite, got {0}")]
    BadC(f64),
}

/// A hypothesis the bound was derived under, with whether it holds for
/// the parameters supplied.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Precondition {
    pub description: String,
    pub holds: bool,
}

impl Precondition {
    fn new(description: impl Into<String>, holds: bool) -> Self {
        Self { description: description.into(), holds }
    }
}

/// The output of a bound calculator.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BoundResult {
    pub name: &'static str,
    /// The bound after clamping into its meaningful range.
    pub value: f64,
    /// Log-base-2 of the unclamped bound, computed analytically where the
    /// formula allows; `None` when the raw value is nonpositive or the
    /// logarithm is otherwise undefined.
    pub log2: Option<f64>,
    /// False when the value was clamped or any precondition fails.
    pub informative: bool,
    pub preconditions: Vec<Precondition>,
    pub notes: Vec<String>,
}

impl BoundResult {
    fn preconditions_hold(pres: &[Precondition]) -> bool {
        pres.iter().all(|p| p.holds)
    }

    /// An upper bound on a probability: values above 1 clamp to 1 and are
    /// flagged vacuous.
    fn probability_upper(
        name: &'static str,
        raw: f64,
        log2: Option<f64>,
        preconditions: Vec<Precondition>,
        mut notes: Vec<String>,
    ) -> Self {
        let clamped = raw > 1.0;
        if clamped {
            notes.push(format!("raw value {raw:.6} exceeds 1; clamped (vacuous)"));
        }
        Self {
            name,
            value: raw.min(1.0),
            log2,
            informative: !clamped && Self::preconditions_hold(&preconditions),
            preconditions,
            notes,
        }
    }

    /// A lower bound on a probability: negative values clamp to 0 and are
    /// flagged vacuous.
    fn probability_lower(
        name: &'static str,
        raw: f64,
        preconditions: Vec<Precondition>,
        mut notes: Vec<String>,
    ) -> Self {
        let clamped = raw < 0.0;
        if clamped {
            notes.push(format!("raw value {raw:.6} is negative; clamped (vacuous)"));
        }
        let value = raw.max(0.0);
        Self {
            name,
            value,
            log2: if value > 0.0 { Some(value.log2()) } else { None },
            informative: !clamped && Self::preconditions_hold(&preconditions),
            preconditions,
            notes,
        }
    }

    /// A lower bound on a query count: negative values clamp to 0 and are
    /// flagged vacuous. `log2` may be supplied analytically for values
    /// beyond f64 range.
    fn query_lower(
        name: &'static str,
        raw: f64,
        log2: Option<f64>,
        preconditions: Vec<Precondition>,
        mut notes: Vec<String>,
    ) -> Self {
        let clamped = raw <= 0.0;
        if clamped {
            notes.push(format!("raw value {raw:.6} is not positive; clamped (vacuous)"));
        }
        Self {
            name,
            value: raw.max(0.0),
            log2,
            informative: !clamped && Self::preconditions_hold(&preconditions),
            preconditions,
            notes,
        }
    }
}

/// The constant `9 pi^3` that appears in the sphere concentration
/// exponent, derived from the library pi rather than transcribed.
pub fn nine_pi_cubed() -> f64 {
    9.0 * PI.powi(3)
}

fn check_n(n: usize) -> Result<(), BoundError> {
    if n == 0 {
        return Err(BoundError::NoQubits);
    }
    Ok(())
}

fn check_tau(tau: f64) -> Result<(), BoundError> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(BoundError::BadTolerance(tau));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<(), BoundError> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(BoundError::BadBeta(beta));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<(), BoundError> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(BoundError::BadEpsilon(eps));
    }
    Ok(())
}

/// Concentration on the unit sphere of complex dimension `dim`: for an
/// `lipschitz`-Lipschitz function of a Haar state,
/// `Pr[ |f - E f| >= tau ] <= 2 exp( -4 dim tau^2 / (9 pi^3 L^2) )`.
pub fn levy_tail(dim: f64, tau: f64, lipschitz: f64) -> Result<BoundResult, BoundError> {
    if !(dim.is_finite() && dim >= 1.0) {
        return Err(BoundError::BadDimension(dim));
    }
    check_tau(tau)?;
    if !(lipschitz > 0.0 && lipschitz.is_finite()) {
        return Err(BoundError::BadLipschitz(lipschitz));
    }
    let exponent = 4.0 * dim * tau * tau / (nine_pi_cubed() * lipschitz * lipschitz);
    let raw = 2.0 * (-exponent).exp();
    let log2 = 1.0 - exponent * LOG2_E;
    Ok(BoundResult::probability_upper(
        "levy-tail",
        raw,
        Some(log2),
        vec![],
        vec![format!("exponent 4 D tau^2 / (9 pi^3 L^2) = {exponent:.6e}")],
    ))
}

/// Which Haar concentration statement to evaluate: deviation of a bounded
/// query functional (Lipschitz constant 2) or of the total variation
/// distance itself (Lipschitz constant 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ConcentrationKind {
    Functional,
    TotalVariation,
}

/// Tail bound for a Haar state on `n` qubits:
/// `Pr[ deviation >= tau ] <= 2 exp( -4 * 2^n tau^2 / (9 pi^3 L^2) )`
/// with `L = 2` for bounded functionals and `L = 1` for the total
/// variation distance from uniform.
pub fn haar_concentration(
    n: usize,
    kind: ConcentrationKind,
    tau: f64,
) -> Result<BoundResult, BoundError> {
    check_n(n)?;
    let lipschitz = match kind {
        ConcentrationKind::Functional => 2.0,
        ConcentrationKind::TotalVariation => 1.0,
    };
    let mut result = levy_tail((n as f64).exp2(), tau, lipschitz)?;
    result.name = match kind {
        ConcentrationKind::Functional => "haar-concentration-functional",
        ConcentrationKind::TotalVariation => "haar-concentration-tv",
    };
    Ok(result)
}

/// Lower bound on the number of statistical queries (tolerance `tau`) any
/// algorithm needs to distinguish Haar output distributions from uniform
/// while succeeding with probability `beta` at accuracy `eps`. Stated as
/// `q + 1 >= (beta - 2 exp(-2^(n+2) xi^2 / 9 pi^3))
///            / (2 exp(-2^n tau^2 / 9 pi^3))`
/// with `xi = 1/e - 2^(-n/2-1) - eps - tau`; the returned value is the
/// implied bound on `q` itself.
pub fn haar_query_bound(
    n: usize,
    beta: f64,
    eps: f64,
    tau: f64,
) -> Result<BoundResult, BoundError> {
    check_n(n)?;
    check_beta(beta)?;
    check_eps(eps)?;
    check_tau(tau)?;

    let xi = 1.0 / E - 2f64.powf(-(n as f64) / 2.0 - 1.0) - eps - tau;
    let preconditions = vec![Precondition::new(
        format!("margin xi = 1/e - 2^(-n/2-1) - eps - tau = {xi:.6} must be positive"),
        xi > 0.0,
    )];

    let dim = (n as f64).exp2();
    let npc = nine_pi_cubed();
    // Numerator tail at Lipschitz constant 1, denominator at 2.
    let num_tail = 2.0 * (-4.0 * dim * xi * xi / npc).exp();
    let den_exponent = dim * tau * tau / npc;
    let den = 2.0 * (-den_exponent).exp();
    let log2_den = 1.0 - den_exponent * LOG2_E;

    let numerator = beta - num_tail;
    let (ratio, log2_ratio, mut notes) = if numerator <= 0.0 || xi <= 0.0 {
        (0.0, None, vec![format!("numerator beta - tail = {numerator:.6} is not positive")])
    } else {
        let log2_ratio = numerator.log2() - log2_den;
        // Evaluate through log space so an underflowed denominator still
        // yields the (astronomically large) ratio.
        let ratio = if den > 0.0 { numerator / den } else { log2_ratio.exp2() };
        (ratio, Some(log2_ratio), vec![format!("stated form: q + 1 >= {:.6e}", ratio)])
    };
    notes.push(format!("margin xi = {xi:.6}"));
    Ok(BoundResult::query_lower(
        "haar-query",
        ratio - 1.0,
        log2_ratio,
        preconditions,
        notes,
    ))
}

/// Minimum depth `3.2 ((2 + ln 2) n + ln n + ln(1/delta))` at which the
/// linear-depth deviation bound is proved.
pub fn linear_frac_min_depth(n: usize, delta: f64) -> Result<f64, BoundError> {
    check_n(n)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(BoundError::BadDelta(delta));
    }
    let nf = n as f64;
    Ok(3.2 * ((2.0 + 2f64.ln()) * nf + nf.ln() + (1.0 / delta).ln()))
}

/// For brickwork circuits of depth `d >= 3.2((2+ln2)n + ln n + ln(1/delta))`:
/// `Pr[ |P[phi] - mean| >= tau ] <= (2 + delta) / (2^n tau^2)` for any
/// query function with values in [0, 1].
pub fn linear_frac_bound(
    n: usize,
    d: usize,
    delta: f64,
    tau: f64,
) -> Result<BoundResult, BoundError> {
    let min_depth = linear_frac_min_depth(n, delta)?;
    check_tau(tau)?;
    let raw = (2.0 + delta) / ((n as f64).exp2() * tau * tau);
    let log2 = (2.0 + delta).log2() - n as f64 - 2.0 * tau.log2();
    Ok(BoundResult::probability_upper(
        "linear-frac",
        raw,
        Some(log2),
        vec![Precondition::new(
            format!("depth {d} >= 3.2((2+ln2)n + ln n + ln(1/delta)) = {min_depth:.2}"),
            d as f64 >= min_depth,
        )],
        vec![],
    ))
}

/// Depth `(n + log2 n) / log2(5/4)` at which the two entanglement-decay
/// branches of the shallow deviation bound cross over.
pub fn sublinear_branch_threshold(n: usize) -> Result<f64, BoundError> {
    check_n(n)?;
    let nf = n as f64;
    Ok((nf + nf.log2()) / 1.25f64.log2())
}

/// Chebyshev deviation bound for depth-`d` brickwork circuits:
/// `Pr[ |P[phi] - mean| >= tau ] <= ( n (4/5)^d (1 + 2^-n) + 2^-n ) / tau^2`
/// for query functions with values in [0, 1]. Valid at any depth; the
/// precondition records the second-moment regime `d >= ln n / ln(5/4)`.
pub fn sublinear_frac_bound(n: usize, d: usize, tau: f64) -> Result<BoundResult, BoundError> {
    check_n(n)?;
    check_tau(tau)?;
    let variance = crate::oracles::brickwork_variance_bound(n, d)
        .expect("n checked above");
    let raw = variance.value / (tau * tau);
    Ok(BoundResult::probability_upper(
        "sublinear-frac",
        raw,
        if raw > 0.0 { Some(raw.log2()) } else { None },
        vec![Precondition::new(
            format!("depth {d} >= ln(n)/ln(5/4) = {:.2}", variance.min_depth),
            variance.regime_valid,
        )],
        vec![],
    ))
}

/// Simplified two-branch form of [`sublinear_frac_bound`]:
/// `3 n (4/5)^d / tau^2` up to the branch threshold, `3 / (2^n tau^2)`
/// beyond it. The branches agree at the threshold.
pub fn sublinear_frac_simplified(n: usize, d: usize, tau: f64) -> Result<BoundResult, BoundError> {
    check_n(n)?;
    check_tau(tau)?;
    let threshold = sublinear_branch_threshold(n)?;
    let min_depth = crate::oracles::second_moment_min_depth(n);
    let shallow = d as f64 <= threshold;
    let (raw, log2) = if shallow {
        let raw = 3.0 * n as f64 * 0.8f64.powi(d as i32) / (tau * tau);
        let log2 = 3f64.log2() + (n as f64).log2() + d as f64 * 0.8f64.log2() - 2.0 * tau.log2();
        (raw, log2)
    } else {
        let raw = 3.0 / ((n as f64).exp2() * tau * tau);
        let log2 = 3f64.log2() - n as f64 - 2.0 * tau.log2();
        (raw, log2)
    };
    Ok(BoundResult::probability_upper(
        "sublinear-frac-simplified",
        raw,
        Some(log2),
        vec![Precondition::new(
            format!("depth {d} >= ln(n)/ln(5/4) = {min_depth:.2}"),
            d as f64 >= min_depth,
        )],
        vec![format!(
            "branch: {} (threshold (n + log2 n)/log2(5/4) = {threshold:.2})",
            if shallow { "decaying" } else { "plateau" }
        )],
    ))
}

/// A far-from-uniform guarantee: with probability at least
/// `probability.value`, the output distribution of a random circuit is at
/// total variation distance at least `radius` from uniform.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FarFromUniformBound {
    pub radius: f64,
    pub probability: BoundResult,
}

/// Far-from-uniform bound for ensembles with exact eighth moments
/// (Haar or any projective 8-design): radius `1/150` with probability at
/// least `1 - 3200 * 2^-n`, for `n >= 2`.
pub fn far_from_uniform_eight_design(n: usize) -> Result<FarFromUniformBound, BoundError> {
    check_n(n)?;
    let raw = 1.0 - 3200.0 * (-(n as f64)).exp2();
    Ok(FarFromUniformBound {
        radius: 1.0 / 150.0,
        probability: BoundResult::probability_lower(
            "far-from-uniform-eight-design",
            raw,
            vec![Precondition::new(format!("n = {n} >= 2"), n >= 2)],
            vec!["requires exact moments up to order 8 (Haar or an 8-design)".into()],
        ),
    })
}

/// Far-from-uniform bound for ensembles with exact fourth moments: radius
/// `1/(20 sqrt(c + 18))` with probability at least `1 - 100 2^-n - 25/c`,
/// for any `c > 0` and `n >= 2`.
pub fn far_from_uniform_four_design(n: usize, c: f64) -> Result<FarFromUniformBound, BoundError> {
    check_n(n)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(BoundError::BadC(c));
    }
    let raw = 1.0 - 100.0 * (-(n as f64)).exp2() - 25.0 / c;
    Ok(FarFromUniformBound {
        radius: 1.0 / (20.0 * (c + 18.0).sqrt()),
        probability: BoundResult::probability_lower(
            "far-from-uniform-four-design",
            raw,
            vec![Precondition::new(format!("n = {n} >= 2"), n >= 2)],
            vec!["requires exact moments up to order 4 (Haar or a 4-design)".into()],
        ),
    })
}

/// Far-from-uniform bound for brickwork circuits of any positive depth,
/// from the mean distance and Markov's inequality: radius `eps` with
/// probability at least `(1/4 - eps) / (1 - eps)`, for `eps` in [0, 1/4].
pub fn far_from_uniform_markov(
    n: usize,
    d: usize,
    eps: f64,
) -> Result<FarFromUniformBound, BoundError> {
    check_n(n)?;
    check_eps(eps)?;
    let raw = (0.25 - eps) / (1.0 - eps);
    Ok(FarFromUniformBound {
        radius: eps,
        probability: BoundResult::probability_lower(
            "far-from-uniform-markov",
            raw,
            vec![
                Precondition::new(format!("eps = {eps} <= 1/4"), eps <= 0.25),
                Precondition::new(format!("n = {n} >= 2"), n >= 2),
                Precondition::new(format!("depth {d} >= 1"), d >= 1),
            ],
            vec![],
        ),
    })
}

/// Mode selector for [`far_from_uniform_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FarFromUniformMode {
    EightDesign,
    FourDesign { c: f64 },
    Markov { d: usize, eps: f64 },
}

pub fn far_from_uniform_bound(
    n: usize,
    mode: FarFromUniformMode,
) -> Result<FarFromUniformBound, BoundError> {
    match mode {
        FarFromUniformMode::EightDesign => far_from_uniform_eight_design(n),
        FarFromUniformMode::FourDesign { c } => far_from_uniform_four_design(n, c),
        FarFromUniformMode::Markov { d, eps } => far_from_uniform_markov(n, d, eps),
    }
}

/// Which version of the far-from-any-fixed-distribution constants to use:
/// the ones the proof yields, or the rounder stated ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FarFromFixedVariant {
    Proof,
    Stated,
}

/// `(max_eps, c)` for [`far_from_fixed_bound`]: the proof gives
/// `eps <= 1/450` with `c = 3 * 450^2 = 607500`; the stated form rounds
/// to `eps <= 1/225` with `c = 7e6`.
pub fn far_from_fixed_constants(variant: FarFromFixedVariant) -> (f64, f64) {
    match variant {
        FarFromFixedVariant::Proof => (1.0 / 450.0, 3.0 * 450.0 * 450.0),
        FarFromFixedVariant::Stated => (1.0 / 225.0, 7e6),
    }
}

/// For any fixed reference distribution Q and a Haar state on `n` qubits:
/// `Pr[ d_TV(P, Q) <= eps ] <= c 2^-n` whenever `eps <= max_eps`, with
/// `(max_eps, c)` from [`far_from_fixed_constants`].
pub fn far_from_fixed_bound(
    n: usize,
    eps: f64,
    variant: FarFromFixedVariant,
) -> Result<BoundResult, BoundError> {
    check_n(n)?;
    check_eps(eps)?;
    let (max_eps, c) = far_from_fixed_constants(variant);
    let raw = c * (-(n as f64)).exp2();
    Ok(BoundResult::probability_upper(
        match variant {
            FarFromFixedVariant::Proof => "far-from-fixed-proof",
            FarFromFixedVariant::Stated => "far-from-fixed-stated",
        },
        raw,
        Some(c.log2() - n as f64),
        vec![Precondition::new(
            format!("eps = {eps} <= {max_eps:.6}"),
            eps <= max_eps,
        )],
        vec![],
    ))
}

/// Chebyshev ball bound for deep brickwork circuits: for any fixed
/// reference distribution Q,
/// `Pr[ d_TV(P, Q) <= tau ] <= 3 / (2^n tau^2)`... valid once the depth
/// clears the branch threshold `(n + log2 n)/log2(5/4)`.
pub fn chebyshev_ball_bound(n: usize, d: usize, tau: f64) -> Result<BoundResult, BoundError> {
    check_n(n)?;
    check_tau(tau)?;
    let threshold = sublinear_branch_threshold(n)?;
    let raw = 3.0 / ((n as f64).exp2() * tau * tau);
    Ok(BoundResult::probability_upper(
        "chebyshev-ball",
        raw,
        Some(3f64.log2() - n as f64 - 2.0 * tau.log2()),
        vec![Precondition::new(
            format!("depth {d} >= (n + log2 n)/log2(5/4) = {threshold:.2}"),
            d as f64 >= threshold,
        )],
        vec![],
    ))
}

/// The generic decision skeleton behind the circuit query bounds:
/// an algorithm that succeeds with probability `beta` while the ensemble
/// escapes its reference ball except with probability `ball`, and whose
/// individual queries are uninformative except with probability `frac`,
/// must make `q >= (beta - ball) / frac` queries.
pub fn query_bound_generic(beta: f64, ball: f64, frac: f64) -> Result<BoundResult, BoundError> {
    check_beta(beta)?;
    if !(0.0..=1.0).contains(&ball) {
        return Err(BoundError::BadProbability(ball));
    }
    if !(frac > 0.0 && frac.is_finite()) {
        return Err(BoundError::BadFrac(frac));
    }
    let raw = (beta - ball) / frac;
    Ok(BoundResult::query_lower(
        "query-bound-generic",
        raw,
        if raw > 0.0 { Some(raw.log2()) } else { None },
        vec![],
        vec![],
    ))
}

/// Depth at which the linear-depth query bound applies: `1.2e20 * n`.
pub fn linear_query_min_depth(n: usize) -> f64 {
    1.2e20 * n as f64
}

/// Query lower bound against linear-depth brickwork circuits:
/// `q + 1 >= (beta - 3200 * 2^-n) * 2^(n-2) * tau^2`, requiring
/// `eps <= 1/150 - tau`; the returned value is the bound on `q`. The
/// guarantee is for circuits of depth at least [`linear_query_min_depth`].
pub fn linear_query_bound(
    n: usize,
    beta: f64,
    eps: f64,
    tau: f64,
) -> Result<BoundResult, BoundError> {
    check_n(n)?;
    check_beta(beta)?;
    check_eps(eps)?;
    check_tau(tau)?;
    let nf = n as f64;
    let coefficient = beta - 3200.0 * (-nf).exp2();
    let ratio = coefficient * (nf - 2.0).exp2() * tau * tau;
    let log2 = if coefficient > 0.0 {
        Some(coefficient.log2() + nf - 2.0 + 2.0 * tau.log2())
    } else {
        None
    };
    Ok(BoundResult::query_lower(
        "linear-query",
        ratio - 1.0,
        log2,
        vec![Precondition::new(
            format!("eps = {eps} <= 1/150 - tau = {:.6}", 1.0 / 150.0 - tau),
            eps <= 1.0 / 150.0 - tau,
        )],
        vec![
            format!("stated form: q + 1 >= {ratio:.6e}"),
            format!("applies to brickwork depth >= 1.2e20 n = {:.3e}", linear_query_min_depth(n)),
        ],
    ))
}

/// Decaying branch of the sublinear-depth query bound:
/// `q + 1 >= (beta - 3/4 - eps - tau) * tau^2 / (3n) * (5/4)^d`.
pub fn sublinear_branch1_value(n: usize, d: usize, beta: f64, eps: f64, tau: f64) -> f64 {
    (beta - 0.75 - eps - tau) * tau * tau / (3.0 * n as f64) * 1.25f64.powi(d as i32)
}

/// Plateau branch of the sublinear-depth query bound:
/// `q + 1 >= (beta - 3/4 - eps - tau) * 2^(n-2) * tau^2`.
pub fn sublinear_branch2_value(n: usize, beta: f64, eps: f64, tau: f64) -> f64 {
    (beta - 0.75 - eps - tau) * (n as f64 - 2.0).exp2() * tau * tau
}

/// Query lower bound against depth-`d` brickwork circuits in the
/// sublinear regime. Selects the decaying branch for depths up to
/// `(n + log2 n)/log2(5/4)` and the plateau branch beyond; the returned
/// value is the bound on `q`.
pub fn sublinear_query_bound(
    n: usize,
    d: usize,
    beta: f64,
    eps: f64,
    tau: f64,
) -> Result<BoundResult, BoundError> {
    check_n(n)?;
    check_beta(beta)?;
    check_eps(eps)?;
    check_tau(tau)?;
    let threshold = sublinear_branch_threshold(n)?;
    let coefficient = beta - 0.75 - eps - tau;
    let shallow = d as f64 <= threshold;
    let ratio = if shallow {
        sublinear_branch1_value(n, d, beta, eps, tau)
    } else {
        sublinear_branch2_value(n, beta, eps, tau)
    };
    let log2 = if coefficient > 0.0 {
        Some(if shallow {
            coefficient.log2() + 2.0 * tau.log2() - (3.0 * n as f64).log2()
                + d as f64 * 1.25f64.log2()
        } else {
            coefficient.log2() + n as f64 - 2.0 + 2.0 * tau.log2()
        })
    } else {
        None
    };
    Ok(BoundResult::query_lower(
        "sublinear-query",
        ratio - 1.0,
        log2,
        vec![
            Precondition::new(
                format!("margin beta - 3/4 - eps - tau = {coefficient:.6} must be positive"),
                coefficient > 0.0,
            ),
            Precondition::new(format!("depth {d} >= 1"), d >= 1),
        ],
        vec![
            format!("stated form: q + 1 >= {ratio:.6e}"),
            format!(
                "branch: {} (threshold (n + log2 n)/log2(5/4) = {threshold:.2})",
                if shallow { "decaying" } else { "plateau" }
            ),
        ],
    ))
}

/// Success-probability prefactor `2 (alpha - 1/2)` for randomized
/// statistical-query algorithms with success probability `alpha`.
pub fn randomized_prefactor(alpha: f64) -> Result<f64, BoundError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(BoundError::BadAlpha(alpha));
    }
    Ok(2.0 * (alpha - 0.5))
}

/// Decision-style query bound `q >= (alpha beta - sup_ball) / frac` for
/// algorithms that succeed with probability `alpha` on instances drawn
/// with weight `beta` from the far set, where `sup_ball` caps the chance
/// the ensemble lands near any fixed reference and `frac` caps the chance
/// a single query deviates.
pub fn feldman_c2_bound(
    alpha: f64,
    beta: f64,
    sup_ball: f64,
    frac: f64,
) -> Result<BoundResult, BoundError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(BoundError::BadAlpha(alpha));
    }
    check_beta(beta)?;
    if !(0.0..=1.0).contains(&sup_ball) {
        return Err(BoundError::BadProbability(sup_ball));
    }
    if !(frac > 0.0 && frac.is_finite()) {
        return Err(BoundError::BadFrac(frac));
    }
    let raw = (alpha * beta - sup_ball) / frac;
    Ok(BoundResult::query_lower(
        "feldman-c2",
        raw,
        if raw > 0.0 { Some(raw.log2()) } else { None },
        vec![],
        vec![],
    ))
}

/// Sharper variant for randomized algorithms:
/// `q >= 2 (alpha - 1/2) (beta - sup_ball) / frac`, requiring
/// `alpha > 1/2`.
pub fn beta_tight_bound(
    alpha: f64,
    beta: f64,
    sup_ball: f64,
    frac: f64,
) -> Result<BoundResult, BoundError> {
    let prefactor = randomized_prefactor(alpha)?;
    check_beta(beta)?;
    if !(0.0..=1.0).contains(&sup_ball) {
        return Err(BoundError::BadProbability(sup_ball));
    }
    if !(frac > 0.0 && frac.is_finite()) {
        return Err(BoundError::BadFrac(frac));
    }
    let raw = prefactor * (beta - sup_ball) / frac;
    Ok(BoundResult::query_lower(
        "beta-tight",
        raw,
        if raw > 0.0 { Some(raw.log2()) } else { None },
        vec![Precondition::new(format!("alpha = {alpha} > 1/2"), alpha > 0.5)],
        vec![],
    ))
}

/// Denominator combinator used when deciding closeness to an unknown
/// member of a class: the larger of the per-query deviation probability
/// at tolerance `tau` and the ball probability at radius `2 eps + tau`.
pub fn combined_denominator(frac_tau: f64, ball_wide: f64) -> f64 {
    frac_tau.max(ball_wide)
}

/// Smallest qubit count the design-depth theorem asks for:
/// `ceil( 2 log2(4t) + 1.5 sqrt(log2(4t)) )`.
pub fn design_min_qubits(t: usize) -> Result<usize, BoundError> {
    if t < 2 {
        return Err(BoundError::BadDesignOrder(t));
    }
    let l = (4.0 * t as f64).log2();
    Ok((2.0 * l + 1.5 * l.sqrt()).ceil() as usize)
}

/// Depth at which brickwork circuits form approximate projective
/// t-designs: `T >= 1e13 ln^5(t) t^(4 + 3/sqrt(log2 t)) (2nt + log2(1/eps))`,
/// for `n >= design_min_qubits(t)`.
pub fn design_depth_bound(n: usize, t: usize, eps: f64) -> Result<BoundResult, BoundError> {
    check_n(n)?;
    if t < 2 {
        return Err(BoundError::BadDesignOrder(t));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(BoundError::BadAccuracy(eps));
    }
    let tf = t as f64;
    let exponent = 4.0 + 3.0 / tf.log2().sqrt();
    let tail = 2.0 * n as f64 * tf + (1.0 / eps).log2();
    let log2 = 13.0 * 10f64.log2()
        + 5.0 * tf.ln().log2()
        + exponent * tf.log2()
        + tail.log2();
    let raw = 1e13 * tf.ln().powi(5) * tf.powf(exponent) * tail;
    let min_qubits = design_min_qubits(t)?;
    Ok(BoundResult::query_lower(
        "design-depth",
        raw,
        Some(log2),
        vec![Precondition::new(
            format!("n = {n} >= ceil(2 log2(4t) + 1.5 sqrt(log2(4t))) = {min_qubits}"),
            n >= min_qubits,
        )],
        vec![format!("gate exponent 4 + 3/sqrt(log2 t) = {exponent:.4}")],
    ))
}
