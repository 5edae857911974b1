//! Numerical kernels: adaptive quadrature and the upper incomplete gamma
//! function for the negative orders that appear in the bound integrals.

mod gamma;
mod quadrature;

pub use gamma::{ln_gamma, upper_incomplete_gamma, upper_incomplete_gamma_scaled};
pub use quadrature::{integrate, QuadratureResult};

/// Neumaier-compensated sum, independent of how the terms were produced.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}
