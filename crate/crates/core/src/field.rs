//! Exact scalar arithmetic: prime fields `F_p` and the rationals.
//!
//! Every computation in this crate is exact; there is no floating point
//! anywhere. Code is generic over a [`Field`] handle that knows how to
//! operate on its element type, so matrices and everything built on top
//! work uniformly over `F_p` and `Q`.

use std::fmt::Debug;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

/// A field descriptor. Elements are plain data; all arithmetic goes
/// through the handle so the modulus (for `F_p`) lives in one place.
pub trait Field: Copy + Eq + Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Debug + Send + Sync + 'static;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_i64(&self, n: i64) -> Self::Elem;

    /// Parse `"n"` or `"n/d"` with optional sign, the scalar encoding of
    /// the document format.
    fn parse(&self, s: &str) -> Result<Self::Elem, String>;
    /// Inverse of [`Field::parse`] up to normalization.
    fn format(&self, a: &Self::Elem) -> String;

    /// In-place `a += c * b`; the default is fine, `F_p` overrides to
    /// avoid reallocation in elimination inner loops.
    fn add_mul_assign(&self, a: &mut Self::Elem, c: &Self::Elem, b: &Self::Elem) {
        *a = self.add(a, &self.mul(c, b));
    }

    /// Field-specific rank routine used when the generic row reduction is
    /// not the preferred algorithm (fraction-free elimination over `Q`).
    fn rank_override(&self, _rows: usize, _cols: usize, _data: &[Self::Elem]) -> Option<usize> {
        None
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b).expect("division by zero"))
    }
}

/// The prime field `F_p` for a runtime modulus. Elements are reduced `u64`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Fp {
    p: u64,
}

impl Fp {
    /// Panics if `p` is not prime; the document loader reports this as an
    /// error before constructing the handle.
    pub fn new(p: u64) -> Self {
        assert!(is_prime(p), "modulus {p} is not prime");
        Fp { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b, self.p);
            }
            b = mulmod(b, b, self.p);
            e >>= 1;
        }
        acc
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

impl Field for Fp {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mulmod(*a, *b, self.p)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            None
        } else {
            Some(self.pow(*a, self.p - 2))
        }
    }
    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    fn add_mul_assign(&self, a: &mut u64, c: &u64, b: &u64) {
        *a = self.add(a, &mulmod(*c, *b, self.p));
    }

    fn parse(&self, s: &str) -> Result<u64, String> {
        let (num, den) = parse_ratio(s)?;
        let n = self.from_i64(num);
        let d = self.from_i64(den);
        let di = self
            .inv(&d)
            .ok_or_else(|| format!("denominator of {s:?} vanishes mod {}", self.p))?;
        Ok(self.mul(&n, &di))
    }

    fn format(&self, a: &u64) -> String {
        a.to_string()
    }
}

/// The rational field; elements are arbitrary-precision fractions.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Rat;

impl Field for Rat {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn parse(&self, s: &str) -> Result<BigRational, String> {
        let (num, den) = parse_ratio(s)?;
        if den == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn format(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }

    /// Fraction-free (Bareiss) elimination on a cleared-denominator copy;
    /// avoids the coefficient blow-up of straight rational row reduction.
    fn rank_override(&self, rows: usize, cols: usize, data: &[BigRational]) -> Option<usize> {
        Some(bareiss_rank(rows, cols, data))
    }
}

fn parse_ratio(s: &str) -> Result<(i64, i64), String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let num: i64 = n.parse().map_err(|_| format!("bad scalar {s:?}"))?;
    let den: i64 = match d {
        Some(d) => d.parse().map_err(|_| format!("bad scalar {s:?}"))?,
        None => 1,
    };
    if den <= 0 {
        return Err(format!("nonpositive denominator in {s:?}"));
    }
    Ok((num, den))
}

fn bareiss_rank(rows: usize, cols: usize, data: &[BigRational]) -> usize {
    // Clear denominators row by row, then run Bareiss over BigInt.
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(rows);
    for r in 0..rows {
        let row = &data[r * cols..(r + 1) * cols];
        let mut lcm = BigInt::one();
        for x in row {
            let d = x.denom();
            lcm = num::integer::lcm(lcm, d.clone());
        }
        m.push(
            row.iter()
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect(),
        );
    }
    let mut rank = 0usize;
    let mut prev = BigInt::one();
    let mut row = 0usize;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let piv = (row..rows).find(|&r| !m[r][col].is_zero());
        let Some(piv) = piv else { continue };
        m.swap(row, piv);
        for r in row + 1..rows {
            for c in col + 1..cols {
                let t = &m[row][col] * &m[r][c] - &m[r][col] * &m[row][c];
                m[r][c] = &t / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[row][col].clone();
        if prev.is_negative() {
            prev = -prev;
            // Sign of the pivot cancels in the next division either way.
        }
        row += 1;
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fp_arithmetic() {
        let f = Fp::new(101);
        assert_eq!(f.add(&100, &5), 4);
        assert_eq!(f.sub(&3, &7), 97);
        assert_eq!(f.mul(&50, &50), 2500 % 101);
        let i = f.inv(&7).unwrap();
        assert_eq!(f.mul(&7, &i), 1);
        assert_eq!(f.inv(&0), None);
        assert_eq!(f.from_i64(-1), 100);
    }

    #[test]
    fn fp_parse_ratio() {
        let f = Fp::new(101);
        let x = f.parse("3/7").unwrap();
        assert_eq!(f.mul(&x, &7), 3);
        assert!(f.parse("1/0").is_err());
        assert_eq!(f.parse("-2").unwrap(), 99);
    }

    #[test]
    fn rat_parse_format() {
        let q = Rat;
        let x = q.parse("-6/4").unwrap();
        assert_eq!(q.format(&x), "-3/2");
        assert_eq!(q.format(&q.from_i64(5)), "5");
    }

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(101));
        assert!(!is_prime(1));
        assert!(!is_prime(91));
    }

    #[test]
    fn bareiss_matches_hand_rank() {
        let q = Rat;
        // [[1,2],[2,4]] has rank 1; [[1,2],[3,4]] has rank 2.
        let d1: Vec<_> = [1, 2, 2, 4].iter().map(|&n| q.from_i64(n)).collect();
        assert_eq!(q.rank_override(2, 2, &d1), Some(1));
        let d2: Vec<_> = [1, 2, 3, 4].iter().map(|&n| q.from_i64(n)).collect();
        assert_eq!(q.rank_override(2, 2, &d2), Some(2));
    }
}
