//! Constants of the degenerating Clifford family.

use std::f64::consts::{PI, SQRT_2};

/// Radius of the limit sphere, `(2π²)^{1/4}`.
pub fn a_tilde() -> f64 {
    (2.0 * PI * PI).powf(0.25)
}

/// Coefficient of `cos θ` in the limit variation field, `√2/2`.
pub const A_PSI: f64 = SQRT_2 / 2.0;

/// Coefficient of `(1 − cos θ) cos 2φ`, `(2 − √2)/4`.
pub const B_PSI: f64 = (2.0 - SQRT_2) / 4.0;

/// Limit of `η⁻⁴(ξ'η − 2ξ)`, equal to `−√2/(8Ã²) = −1/(8π)`.
pub fn c0() -> f64 {
    -SQRT_2 / (8.0 * a_tilde().powi(2))
}

/// Area of the Clifford torus, `4√2π²`.
pub fn clifford_area() -> f64 {
    4.0 * SQRT_2 * PI * PI
}

/// Willmore energy of the Clifford torus, `8π²`.
pub fn clifford_willmore() -> f64 {
    8.0 * PI * PI
}

/// Limit of `η⁴/ξ_η²`, `4√2π`.
pub fn xi_ratio_limit() -> f64 {
    4.0 * SQRT_2 * PI
}

/// Coefficient of `Sc` in the ε² term of the energy, `(8√2/3)π²`.
pub fn sc_energy_coeff() -> f64 {
    8.0 * SQRT_2 * PI * PI / 3.0
}

/// Relative weight of the rotation term, `BÃ/(√2π)`.
pub fn rotation_weight() -> f64 {
    B_PSI * a_tilde() / (SQRT_2 * PI)
}

/// `(16/3)πBÃ`, the coefficient of `η ε² 𝓕` in `∂W/∂r`.
pub fn derivative_coeff() -> f64 {
    16.0 / 3.0 * PI * B_PSI * a_tilde()
}

/// `(4/3)πÃB`, the limit of the Ricci part of the sphere integral per unit `R₂₂ − R₃₃`.
pub fn ricci_integral_coeff() -> f64 {
    4.0 / 3.0 * PI * a_tilde() * B_PSI
}

/// `4πÃB`, the limit of the `FΔψ₀` part per unit `R₂₂ − R₃₃`.
pub fn f_integral_coeff() -> f64 {
    4.0 * PI * a_tilde() * B_PSI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_identities() {
        assert!((a_tilde().powi(2) - SQRT_2 * PI).abs() < 1e-14);
        assert!((c0() + 1.0 / (8.0 * PI)).abs() < 1e-16);
        assert!((ricci_integral_coeff() + f_integral_coeff() - derivative_coeff()).abs() < 1e-14);
        // d/dr of −(8√2π²/3)·w·(1−r)² equals (16/3)πBÃ(1−r)
        let lhs = 2.0 * sc_energy_coeff() * rotation_weight();
        assert!((lhs - derivative_coeff()).abs() < 1e-12);
        assert!((xi_ratio_limit() - 17.771_531_752_633_464).abs() < 1e-12);
    }
}
