use crate::{Error, Result};

/// Below this the argument is shifted up by recurrence before the
/// asymptotic series is applied.
const ASYMPTOTIC_FROM: f64 = 6.0;

/// Digamma function `ψ(x) = Γ'(x)/Γ(x)` for `x > 0`.
///
/// Upward recurrence `ψ(x) = ψ(x+1) − 1/x` until `x ≥ 6`, then the
/// asymptotic expansion through the `x⁻¹⁴` term (truncation error below
/// 2e-13 at the switch point).
pub fn digamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Parameter(format!("digamma needs a positive finite argument, got {x}")));
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < ASYMPTOTIC_FROM {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Bernoulli-number coefficients B_2n / (2n)
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(shift + x.ln() - 0.5 * inv - series)
}
