//! Gamma-function and harmonic-number helpers.
//!
//! `ln_gamma` shifts its argument above [`STIRLING_MIN`] with the recurrence
//! `Γ(x+1) = xΓ(x)` and then evaluates the Stirling series. Ratios of gamma
//! functions with nearby arguments are evaluated as a difference of two
//! Stirling series that is rearranged so the large terms cancel analytically,
//! which keeps `Γ(m+1)/Γ(m+1-δ)` accurate far past the point where `Γ(m+1)`
//! overflows.

/// Euler–Mascheroni constant, 0.57721566490153286061 (20 significant digits).
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

/// Below this `k`, harmonic numbers are summed term by term.
pub const HARMONIC_EXACT_LIMIT: u64 = 1_000_000;

const STIRLING_MIN: f64 = 20.0;
#[allow(clippy::excessive_precision)]
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_741_78;

// B_{2k} / (2k (2k-1)) for k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Σ c_k z^{1-2k}
fn stirling_tail(z: f64) -> f64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in STIRLING.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma requires a positive argument");
    if x.is_nan() || x <= 0.0 {
        return f64::NAN;
    }
    let mut z = x;
    let mut prod = 1.0;
    while z < STIRLING_MIN {
        prod *= z;
        z += 1.0;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + stirling_tail(z) - prod.ln()
}

/// Gamma function for `x > 0`.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// `ln Γ(x) - ln Γ(x - delta)` for `x - delta > 0` and `0 <= delta <= 1`.
///
/// The recurrence shift contributes `Σ ln(1 - δ/(x+j))`, and the large-argument
/// part uses `(z-δ-½)·ln(1 + δ/(z-δ)) + δ ln z - δ` plus the difference of
/// Stirling tails, so nothing of size `ln Γ(x)` is ever formed.
pub fn ln_gamma_diff(x: f64, delta: f64) -> f64 {
    debug_assert!(x - delta > 0.0);
    if delta == 0.0 {
        return 0.0;
    }
    let mut z = x;
    let mut acc = 0.0;
    while z - delta < STIRLING_MIN {
        acc += (-delta / z).ln_1p();
        z += 1.0;
    }
    let w = z - delta;
    let main = (w - 0.5) * (delta / w).ln_1p() + delta * z.ln() - delta;
    main + stirling_tail(z) - stirling_tail(w) + acc
}

/// Harmonic number `H_k = Σ_{j=1..k} 1/j`, with `H_0 = 0`.
///
/// Summed exactly (smallest terms first) below [`HARMONIC_EXACT_LIMIT`];
/// above it, `ln k + γ + 1/(2k) - 1/(12k²)`, whose truncation error is
/// below `1/(120 k⁴)`.
pub fn harmonic(k: u64) -> f64 {
    if k < HARMONIC_EXACT_LIMIT {
        (1..=k).rev().map(|j| 1.0 / j as f64).sum()
    } else {
        let kf = k as f64;
        kf.ln() + EULER_GAMMA + 0.5 / kf - 1.0 / (12.0 * kf * kf)
    }
}
