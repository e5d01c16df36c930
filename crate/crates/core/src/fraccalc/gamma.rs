use std::f64::consts::{E, PI};

use super::FracError;

// Lanczos approximation, g = 10.900511, 11 terms.
const LANCZOS_G: f64 = 10.900511;
const LANCZOS_COEFFS: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];
const TWO_SQRT_E_OVER_PI: f64 = 1.860382734205265717336324047435490;
const LN_TWO_SQRT_E_OVER_PI: f64 = 0.620782237635245222345518445781647;
const LN_PI: f64 = 1.144729885849400174143427351353058;

fn lanczos_sum(x: f64) -> f64 {
    LANCZOS_COEFFS
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_COEFFS[0], |s, (i, c)| s + c / (x + i as f64 - 1.0))
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Euler's gamma function. Exact factorials for small positive integers,
/// Lanczos elsewhere, reflection below one half.
pub fn gamma_fn(x: f64) -> Result<f64, FracError> {
    if x.is_nan() || is_pole(x) {
        return Err(FracError::GammaPole(x));
    }
    if x == x.floor() && x <= 171.0 {
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < x {
            acc *= k;
            k += 1.0;
        }
        return Ok(acc);
    }
    if x < 0.5 {
        let g = gamma_fn(1.0 - x)?;
        return Ok(PI / ((PI * x).sin() * g));
    }
    if x < 1.0 {
        return Ok(lanczos(x + 1.0) / x);
    }
    if x > RECURRENCE_LIMIT {
        return Ok(lanczos(x));
    }
    // Lanczos is most accurate on [1, 2]; climb with exact unit shifts.
    let mut y = x;
    let mut prod = 1.0;
    while y > 2.0 {
        y -= 1.0;
        prod *= y;
    }
    Ok(prod * lanczos(y))
}

const RECURRENCE_LIMIT: f64 = 60.0;

fn lanczos(x: f64) -> f64 {
    lanczos_sum(x) * TWO_SQRT_E_OVER_PI * ((x - 0.5 + LANCZOS_G) / E).powf(x - 0.5)
}

/// Natural log of |Γ(x)|.
pub fn ln_gamma(x: f64) -> Result<f64, FracError> {
    if x.is_nan() || is_pole(x) {
        return Err(FracError::GammaPole(x));
    }
    if x < 0.5 {
        let rest = ln_gamma(1.0 - x)?;
        return Ok(LN_PI - (PI * x).sin().abs().ln() - rest);
    }
    if x <= RECURRENCE_LIMIT {
        return Ok(gamma_fn(x)?.ln());
    }
    Ok(lanczos_sum(x).ln() + LN_TWO_SQRT_E_OVER_PI + (x - 0.5) * ((x - 0.5 + LANCZOS_G) / E).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poles_are_rejected() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-3.0).is_err());
        assert!(ln_gamma(-1.0).is_err());
    }

    #[test]
    fn negative_non_integer_uses_reflection() {
        // Γ(-0.5) = -2√π
        let v = gamma_fn(-0.5).unwrap();
        assert!((v + 2.0 * PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn ln_gamma_matches_log_of_gamma() {
        for &x in &[0.1, 0.7, 2.5, 13.2, 40.0] {
            let a = ln_gamma(x).unwrap();
            let b = gamma_fn(x).unwrap().ln();
            assert!((a - b).abs() < 1e-13 * b.abs().max(1.0), "x={x}");
        }
    }
}

