//! Global numerical tolerances.

use std::sync::atomic::{AtomicU64, Ordering};

/// Default algebraic tolerance for closed-form identities.
pub const TAU_ALG_DEFAULT: f64 = 1e-10;

/// Distance to a zero of a radicand, log argument or denominator below which a
/// point counts as singular.
pub const TAU_BRANCH: f64 = 1e-8;

static TAU_ALG_BITS: AtomicU64 = AtomicU64::new(TAU_ALG_DEFAULT.to_bits());

/// Current algebraic tolerance.
pub fn tau_alg() -> f64 {
    f64::from_bits(TAU_ALG_BITS.load(Ordering::Relaxed))
}

/// Overrides the algebraic tolerance for the whole process.
pub fn set_tau_alg(tau: f64) {
    assert!(tau > 0.0 && tau.is_finite(), "tolerance must be positive");
    TAU_ALG_BITS.store(tau.to_bits(), Ordering::Relaxed);
}
