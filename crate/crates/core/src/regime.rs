//! Asymptotic regime of `S_n = sqrt(n) (X_bar / Y_bar - E[X] / E[Y])` when
//! `E[X] = C1 n^-a`, `V[X] = n^-a'`, `E[Y] = C2 n^-b`, `V[Y] = n^-b'`.
//!
//! The row compares `b` with `1/2 + b'` (the signal-to-noise ratio diverges,
//! converges, or vanishes); the column compares `a + b'` with `b + a'`. Each of
//! the nine cells names a limiting family and the exponent `e` such that
//! `S_n / n^e` has a nondegenerate limit.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

const MICRO: i64 = 1_000_000;
const FLOAT_TOL: f64 = 1e-12;

/// A nonnegative decay exponent. Values parsed from decimal strings with at
/// most six fractional digits are held exactly in millionths and compared
/// without rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent {
    value: f64,
    micros: Option<i64>,
}

impl Exponent {
    pub fn from_f64(value: f64) -> Result<Self> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::param("exponent", format!("must be finite and >= 0, got {value}")));
        }
        Ok(Self { value, micros: None })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Exact value in millionths, when known.
    pub fn micros(&self) -> Option<i64> {
        self.micros
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(m) = parse_micros(t) {
            return Ok(Self {
                value: m as f64 / MICRO as f64,
                micros: Some(m),
            });
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::Parse(format!("invalid exponent {s:?}")))?;
        Self::from_f64(v)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// "12", "0.75", ".5", "3." with at most six fractional digits.
fn parse_micros(s: &str) -> Option<i64> {
    let s = s.strip_prefix('+').unwrap_or(s);
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if frac.len() > 6 || !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    if int.len() > 12 {
        return None;
    }
    let whole: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let mut f: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    for _ in frac.len()..6 {
        f *= 10;
    }
    whole.checked_mul(MICRO)?.checked_add(f)
}

// Sum of exponents, exact when every term is.
#[derive(Debug, Clone, Copy)]
struct Affine {
    value: f64,
    micros: Option<i64>,
}

impl Affine {
    fn one() -> Self {
        Self {
            value: 1.0,
            micros: Some(MICRO),
        }
    }

    fn constant_half() -> Self {
        Self {
            value: 0.5,
            micros: Some(MICRO / 2),
        }
    }

    fn of(e: Exponent) -> Self {
        Self {
            value: e.value,
            micros: e.micros,
        }
    }

    fn plus(self, e: Exponent) -> Self {
        self.combine(Self::of(e), 1)
    }

    fn minus(self, e: Exponent) -> Self {
        self.combine(Self::of(e), -1)
    }

    fn combine(self, o: Self, sign: i64) -> Self {
        Self {
            value: self.value + sign as f64 * o.value,
            micros: match (self.micros, o.micros) {
                (Some(a), Some(b)) => Some(a + sign * b),
                _ => None,
            },
        }
    }

    fn get(self) -> f64 {
        match self.micros {
            Some(m) => m as f64 / MICRO as f64,
            None => self.value,
        }
    }

    fn compare(self, o: Self) -> Ordering {
        match (self.micros, o.micros) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => {
                let (x, y) = (self.value, o.value);
                if (x - y).abs() <= FLOAT_TOL * x.abs().max(y.abs()).max(1.0) {
                    Ordering::Equal
                } else if x < y {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeInput {
    pub a: Exponent,
    pub a_prime: Exponent,
    pub b: Exponent,
    pub b_prime: Exponent,
    pub c1: f64,
    pub c2: f64,
}

impl RegimeInput {
    pub fn new(a: Exponent, a_prime: Exponent, b: Exponent, b_prime: Exponent, c1: f64, c2: f64) -> Result<Self> {
        if !(c1.is_finite() && c1 != 0.0) {
            return Err(Error::param("c1", "must be finite and nonzero"));
        }
        if !(c2.is_finite() && c2 != 0.0) {
            return Err(Error::param("c2", "must be finite and nonzero"));
        }
        Ok(Self {
            a,
            a_prime,
            b,
            b_prime,
            c1,
            c2,
        })
    }

    /// Convenience constructor from plain floats with `C1 = C2 = 1`.
    pub fn from_f64(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Result<Self> {
        Self::new(
            Exponent::from_f64(a)?,
            Exponent::from_f64(a_prime)?,
            Exponent::from_f64(b)?,
            Exponent::from_f64(b_prime)?,
            1.0,
            1.0,
        )
    }

    /// Parses each exponent from a decimal string, with `C1 = C2 = 1`.
    pub fn parse(a: &str, a_prime: &str, b: &str, b_prime: &str) -> Result<Self> {
        Self::new(a.parse()?, a_prime.parse()?, b.parse()?, b_prime.parse()?, 1.0, 1.0)
    }
}

/// `b` against `1/2 + b'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Row {
    Above,
    Equal,
    Below,
}

/// `a + b'` against `b + a'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Col {
    Less,
    Equal,
    Greater,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SnrClass {
    Diverges,
    ConstantC,
    VanishesToZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LawFamily {
    /// Linear in a centered Gaussian pair.
    GaussianLinear,
    /// A ratio of centered Gaussians, possibly shifted.
    GaussianRatio,
    /// A reciprocal of a shifted Gaussian with a deterministic numerator.
    ReciprocalShift,
    /// A nonrandom divergence.
    DeterministicDrift,
    /// Both numerator noise and a shifted denominator contribute.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeVerdict {
    pub snr_class: SnrClass,
    pub row: Row,
    pub col: Col,
    pub renorm_exponent: f64,
    pub law_family: LawFamily,
    pub delta_method_ok: bool,
}

pub fn classify_regime(r: &RegimeInput) -> RegimeVerdict {
    let row = match Affine::of(r.b).compare(Affine::constant_half().plus(r.b_prime)) {
        Ordering::Greater => Row::Above,
        Ordering::Equal => Row::Equal,
        Ordering::Less => Row::Below,
    };
    let col = match Affine::of(r.a)
        .plus(r.b_prime)
        .compare(Affine::of(r.b).plus(r.a_prime))
    {
        Ordering::Less => Col::Less,
        Ordering::Equal => Col::Equal,
        Ordering::Greater => Col::Greater,
    };

    // 1/2 + b' - a'
    let ratio_exp = Affine::constant_half().plus(r.b_prime).minus(r.a_prime);
    let (law_family, exponent) = match (row, col) {
        (Row::Above, Col::Less) | (Row::Above, Col::Equal) => (LawFamily::GaussianRatio, ratio_exp),
        (Row::Above, Col::Greater) => (
            LawFamily::DeterministicDrift,
            Affine::constant_half().plus(r.b).minus(r.a),
        ),
        (Row::Equal, Col::Less) => (
            LawFamily::ReciprocalShift,
            Affine::one().minus(r.a).plus(r.b_prime),
        ),
        (Row::Equal, _) => (LawFamily::Mixed, ratio_exp),
        (Row::Below, Col::Less) => (
            LawFamily::GaussianLinear,
            Affine::of(r.b).combine(Affine::of(r.b), 1).minus(r.a).minus(r.b_prime),
        ),
        (Row::Below, _) => (LawFamily::GaussianLinear, Affine::of(r.b).minus(r.a_prime)),
    };
    let snr_class = match row {
        Row::Below => SnrClass::Diverges,
        Row::Equal => SnrClass::ConstantC,
        Row::Above => SnrClass::VanishesToZero,
    };
    RegimeVerdict {
        snr_class,
        row,
        col,
        renorm_exponent: exponent.get(),
        law_family,
        delta_method_ok: row == Row::Below,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(a: &str, ap: &str, b: &str, bp: &str) -> RegimeVerdict {
        classify_regime(&RegimeInput::parse(a, ap, b, bp).unwrap())
    }

    #[test]
    fn parse_exponents() {
        assert_eq!("0.75".parse::<Exponent>().unwrap().micros(), Some(750_000));
        assert_eq!(".5".parse::<Exponent>().unwrap().micros(), Some(500_000));
        assert_eq!("2".parse::<Exponent>().unwrap().micros(), Some(2_000_000));
        assert_eq!("0.000001".parse::<Exponent>().unwrap().micros(), Some(1));
        let long = "0.1234567".parse::<Exponent>().unwrap();
        assert_eq!(long.micros(), None);
        assert_eq!(long.value(), 0.1234567);
        assert!("-1".parse::<Exponent>().is_err());
        assert!("abc".parse::<Exponent>().is_err());
        assert!("".parse::<Exponent>().is_err());
        assert!(".".parse::<Exponent>().is_err());
        assert!("nan".parse::<Exponent>().is_err());
        assert!("inf".parse::<Exponent>().is_err());
    }

    #[test]
    fn documented_examples() {
        let v = verdict("0", "0", "0", "0");
        assert_eq!((v.row, v.col, v.law_family), (Row::Below, Col::Equal, LawFamily::GaussianLinear));
        assert_eq!(v.renorm_exponent, 0.0);
        assert!(v.delta_method_ok);

        let v = verdict("1", "0", "0.75", "0");
        assert_eq!((v.row, v.col, v.law_family), (Row::Above, Col::Greater, LawFamily::DeterministicDrift));
        assert_eq!(v.renorm_exponent, 0.25);
        assert!(!v.delta_method_ok);

        let v = verdict("0", "0", "0.75", "0");
        assert_eq!((v.row, v.col, v.law_family), (Row::Above, Col::Less, LawFamily::GaussianRatio));
        assert_eq!(v.renorm_exponent, 0.5);
    }

    #[test]
    fn all_nine_cells() {
        // (a, a', b, b') -> (row, col, family, exponent)
        let cases = [
            ("0", "0", "1", "0", Row::Above, Col::Less, LawFamily::GaussianRatio, 0.5),
            ("1", "0", "1", "0", Row::Above, Col::Equal, LawFamily::GaussianRatio, 0.5),
            ("1.5", "0", "1", "0", Row::Above, Col::Greater, LawFamily::DeterministicDrift, 0.0),
            ("0", "0", "0.5", "0", Row::Equal, Col::Less, LawFamily::ReciprocalShift, 1.0),
            ("0.5", "0", "0.5", "0", Row::Equal, Col::Equal, LawFamily::Mixed, 0.5),
            ("1", "0", "0.5", "0", Row::Equal, Col::Greater, LawFamily::Mixed, 0.5),
            ("0", "0.5", "0.25", "0", Row::Below, Col::Less, LawFamily::GaussianLinear, 0.5),
            ("0", "0", "0", "0", Row::Below, Col::Equal, LawFamily::GaussianLinear, 0.0),
            ("1", "0", "0.25", "0", Row::Below, Col::Greater, LawFamily::GaussianLinear, 0.25),
        ];
        for (a, ap, b, bp, row, col, fam, e) in cases {
            let v = verdict(a, ap, b, bp);
            assert_eq!((v.row, v.col, v.law_family), (row, col, fam), "{a} {ap} {b} {bp}");
            assert_eq!(v.renorm_exponent, e, "{a} {ap} {b} {bp}");
            assert_eq!(v.delta_method_ok, row == Row::Below);
        }
    }

    #[test]
    fn exact_boundaries() {
        // 0.1 + 0.2 is not 0.3 in binary; the decimal path still ties.
        let v = verdict("0.3", "0.1", "0.2", "0");
        assert_eq!(v.col, Col::Equal);
        let v = verdict("0", "0", "0.7", "0.2");
        assert_eq!(v.row, Row::Equal);
        // Float path with tolerance.
        let v = classify_regime(&RegimeInput::from_f64(0.3, 0.1, 0.2, 0.0).unwrap());
        assert_eq!(v.col, Col::Equal);
    }

    #[test]
    fn snr_class_follows_row() {
        assert_eq!(verdict("0", "0", "0.2", "0").snr_class, SnrClass::Diverges);
        assert_eq!(verdict("0", "0", "0.5", "0").snr_class, SnrClass::ConstantC);
        assert_eq!(verdict("0", "0", "0.9", "0").snr_class, SnrClass::VanishesToZero);
    }

    #[test]
    fn rejects_zero_constants() {
        let e = Exponent::from_f64(0.0).unwrap();
        assert!(RegimeInput::new(e, e, e, e, 1.0, 0.0).is_err());
        assert!(RegimeInput::new(e, e, e, e, 0.0, 1.0).is_err());
    }
}
