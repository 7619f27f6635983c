//! Exact fractions used for utilizations, fluid allocations and lags.

use num_rational::Ratio;

/// Exact fraction over 128-bit integers.
///
/// Every quantity handled by the analysis has small numerators and
/// denominators (tick counts and ratios of tick counts), so 128 bits leave a
/// wide margin before overflow.
pub type Rational = Ratio<i128>;

/// Shorthand for `numer / denom` as a reduced [`Rational`].
///
/// Panics if `denom` is zero.
pub fn ratio(numer: i128, denom: i128) -> Rational {
    Rational::new(numer, denom)
}

/// An integer as a [`Rational`].
pub fn int(value: i128) -> Rational {
    Rational::from_integer(value)
}

/// Lossy conversion for display and CSV output only.
pub fn to_f64(value: &Rational) -> f64 {
    *value.numer() as f64 / *value.denom() as f64
}

/// Renders `3/4` style, or a bare integer when the denominator is one.
pub fn display(value: &Rational) -> String {
    if *value.denom() == 1 {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}
