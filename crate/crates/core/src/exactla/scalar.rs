use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::LaError;

/// Base field of a computation: the rationals or a small prime field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Q,
    Fp(u32),
}

impl Field {
    pub fn prime(p: u32) -> Result<Field, LaError> {
        if !(2..1 << 16).contains(&p) || !is_prime(p) {
            return Err(LaError::BadPrime(p));
        }
        Ok(Field::Fp(p))
    }

    pub fn check(self) -> Result<Field, LaError> {
        match self {
            Field::Q => Ok(self),
            Field::Fp(p) => Field::prime(p),
        }
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> Scalar {
        match self {
            Field::Q => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
            Field::Fp(p) => Scalar::Fp { v: n.rem_euclid(p as i64) as u32, p },
        }
    }

    pub fn from_ratio(self, num: i64, den: i64) -> Scalar {
        assert!(den != 0, "zero denominator");
        self.from_i64(num).div(&self.from_i64(den))
    }

    pub fn is_char_zero(self) -> bool {
        matches!(self, Field::Q)
    }

    /// Number of elements, or `None` for Q.
    pub fn order(self) -> Option<u64> {
        match self {
            Field::Q => None,
            Field::Fp(p) => Some(p as u64),
        }
    }

    /// All elements of a prime field in residue order.
    pub fn elements(self) -> Vec<Scalar> {
        match self {
            Field::Q => panic!("Q is infinite"),
            Field::Fp(p) => (0..p).map(|v| Scalar::Fp { v, p }).collect(),
        }
    }

    pub fn parse(self, s: &str) -> Result<Scalar, LaError> {
        let bad = || LaError::Parse(s.to_string());
        let s = s.trim();
        match self {
            Field::Q => {
                let (n, d) = match s.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (s, "1"),
                };
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Scalar::Q(BigRational::new(n, d)))
            }
            Field::Fp(_) => {
                let v: i64 = s.parse().map_err(|_| bad())?;
                Ok(self.from_i64(v))
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Q => write!(f, "Q"),
            Field::Fp(p) => write!(f, "F_{p}"),
        }
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact field element. Rationals are kept in lowest terms with positive
/// denominator; prime-field residues lie in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    Fp { v: u32, p: u32 },
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // Fermat: a^(p-2)
    let mut base = a as u64;
    let mut e = p - 2;
    let mut acc = 1u64;
    let m = p as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc as u32
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) => Field::Q,
            Scalar::Fp { p, .. } => Field::Fp(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) if p == q => {
                Scalar::Fp { v: ((*a as u64 + *b as u64) % *p as u64) as u32, p: *p }
            }
            _ => panic!("mixed-field arithmetic"),
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp { v, p } => Scalar::Fp { v: if *v == 0 { 0 } else { p - v }, p: *p },
        }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => {
                if a.is_zero() || b.is_zero() {
                    Scalar::Q(BigRational::zero())
                } else {
                    Scalar::Q(a * b)
                }
            }
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) if p == q => {
                Scalar::Fp { v: ((*a as u64 * *b as u64) % *p as u64) as u32, p: *p }
            }
            _ => panic!("mixed-field arithmetic"),
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Q(a) => Scalar::Q(a.recip()),
            Scalar::Fp { v, p } => Scalar::Fp { v: inv_mod(*v, *p), p: *p },
        })
    }

    pub fn div(&self, o: &Scalar) -> Scalar {
        self.mul(&o.inv().expect("division by zero"))
    }

    /// Canonical text form: `num/den` (den omitted when 1) or the residue.
    pub fn to_text(&self) -> String {
        match self {
            Scalar::Q(r) => {
                if r.denom().is_one() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp { v, .. } => v.to_string(),
        }
    }

    /// Total ordering key used for deterministic tie-breaking.
    pub fn sort_key(&self) -> (i8, String) {
        match self {
            Scalar::Q(r) => (if r.is_negative() { -1 } else { 1 }, self.to_text()),
            Scalar::Fp { v, .. } => (0, format!("{v:08}")),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        let q = Field::Q;
        let x = q.from_ratio(6, -4);
        assert_eq!(x.to_text(), "-3/2");
        assert_eq!(q.parse("-3/2").unwrap(), x);
        assert_eq!(q.parse("5").unwrap().to_text(), "5");
        assert!(q.parse("1/0").is_err());
    }

    #[test]
    fn prime_field_inverse() {
        let f = Field::prime(7).unwrap();
        for a in 1..7 {
            let x = f.from_i64(a);
            assert!(x.mul(&x.inv().unwrap()).is_one());
        }
        assert_eq!(f.from_i64(-1).to_text(), "6");
        assert!(Field::prime(9).is_err());
        assert!(Field::prime(65537).is_err());
    }

    #[test]
    #[should_panic(expected = "mixed-field")]
    fn mixed_fields_panic() {
        let _ = Field::Q.one().add(&Field::Fp(3).one());
    }
}
