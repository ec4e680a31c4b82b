//! Exact integer and rational scalars.
//!
//! Everything downstream works over `BigInt` / `BigRational`; no floating
//! point appears anywhere in this crate. Identities are checked by exact
//! cancellation, so even a single rounded intermediate would be fatal.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn is_integer(q: &Rat) -> bool {
    q.denom().is_one()
}

/// Ceiling of an exact rational.
pub fn ceil(q: &Rat) -> Int {
    q.ceil().to_integer()
}

/// Fractional part `{q} = q - floor(q)`, always in `[0, 1)`.
pub fn fract(q: &Rat) -> Rat {
    q - Rat::from_integer(q.floor().to_integer())
}

pub fn factorial(n: &Int) -> Int {
    assert!(!n.is_negative(), "factorial of negative integer");
    let mut acc = Int::one();
    let mut k = Int::one();
    while &k <= n {
        acc *= &k;
        k += 1;
    }
    acc
}

/// Parse an exact rational from `"p/q"`, `"p"`, or `"-p/q"`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: Int = p.trim().parse().ok()?;
            let q: Int = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rat::new(p, q))
        }
        None => {
            let p: Int = s.parse().ok()?;
            Some(Rat::from_integer(p))
        }
    }
}

/// Render a rational as `"p/q"` (or `"p"` when integral); inverse of `parse_rat`.
pub fn show_rat(q: &Rat) -> String {
    if is_integer(q) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fract_is_in_unit_interval() {
        for n in -7..=7 {
            for d in 1..=4 {
                let f = fract(&frac(n, d));
                assert!(f >= rat(0) && f < rat(1));
                assert!(is_integer(&(frac(n, d) - &f)));
            }
        }
    }

    #[test]
    fn rat_string_round_trip() {
        for s in ["3/2", "-5/7", "4", "0", "-12"] {
            let q = parse_rat(s).unwrap();
            assert_eq!(parse_rat(&show_rat(&q)).unwrap(), q);
        }
        assert_eq!(parse_rat("6/4").unwrap(), frac(3, 2));
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("x").is_none());
    }

    #[test]
    fn factorial_small() {
        assert_eq!(factorial(&int(0)), int(1));
        assert_eq!(factorial(&int(5)), int(120));
    }
}
