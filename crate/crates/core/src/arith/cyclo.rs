//! Exact arithmetic in Z[zeta_p], where the exponential sums live.
//!
//! An element is stored as p integer coefficients on 1, zeta, .., zeta^{p-1}.
//! Since 1 + zeta + .. + zeta^{p-1} = 0 the representation is made unique by
//! forcing the last coefficient to zero.

use super::jet::JetScalar;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicSum {
    p: u32,
    coeffs: Vec<BigInt>,
}

impl CyclotomicSum {
    pub fn zero(p: u32) -> Self {
        CyclotomicSum { p, coeffs: vec![BigInt::zero(); p as usize] }
    }

    pub fn from_integer(p: u32, v: impl Into<BigInt>) -> Self {
        let mut s = Self::zero(p);
        s.coeffs[0] = v.into();
        s.normalize();
        s
    }

    /// zeta^k.
    pub fn root_power(p: u32, k: u64) -> Self {
        let mut s = Self::zero(p);
        s.coeffs[(k % p as u64) as usize] = BigInt::from(1);
        s.normalize();
        s
    }

    /// Sum of `counts[k] * zeta^k` for a length-p count vector.
    pub fn from_counts(p: u32, counts: &[i64]) -> Self {
        assert_eq!(counts.len(), p as usize);
        let mut s = CyclotomicSum { p, coeffs: counts.iter().map(|&c| BigInt::from(c)).collect() };
        s.normalize();
        s
    }

    pub fn from_big_counts(p: u32, counts: Vec<BigInt>) -> Self {
        assert_eq!(counts.len(), p as usize);
        let mut s = CyclotomicSum { p, coeffs: counts };
        s.normalize();
        s
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Canonical coefficients; the last one is always zero.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn normalize(&mut self) {
        let last = self.coeffs[self.p as usize - 1].clone();
        if !last.is_zero() {
            for c in self.coeffs.iter_mut() {
                *c -= &last;
            }
        }
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.p != o.p {
            Err(Error::FieldMismatch { left: self.p, right: o.p })
        } else {
            Ok(())
        }
    }

    /// `self += mult * term`.
    pub fn accumulate(&mut self, term: &Self, mult: &BigInt) -> Result<()> {
        self.check(term)?;
        for (c, t) in self.coeffs.iter_mut().zip(&term.coeffs) {
            *c += t * mult;
        }
        self.normalize();
        Ok(())
    }

    /// `self += mult * zeta^k`, the hot path of character sums.
    pub fn add_root_power(&mut self, k: u32, mult: &BigInt) {
        let k = (k % self.p) as usize;
        self.coeffs[k] += mult;
        self.normalize();
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let mut r = self.clone();
        r.accumulate(o, &BigInt::from(1))?;
        Ok(r)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        let mut r = self.clone();
        r.accumulate(o, &BigInt::from(-1))?;
        Ok(r)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        CyclotomicSum { p: self.p, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let p = self.p as usize;
        let mut out = vec![BigInt::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[(i + j) % p] += a * b;
            }
        }
        let mut r = CyclotomicSum { p: self.p, coeffs: out };
        r.normalize();
        Ok(r)
    }

    /// Complex conjugation, zeta -> zeta^{-1}.
    pub fn conj(&self) -> Self {
        let p = self.p as usize;
        let mut out = vec![BigInt::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            out[(p - i) % p] = a.clone();
        }
        let mut r = CyclotomicSum { p: self.p, coeffs: out };
        r.normalize();
        r
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::from_integer(self.p, 1);
        for _ in 0..k {
            r = r.mul(self).expect("same field");
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The integer value if the element lies in Z.
    pub fn as_integer(&self) -> Option<BigInt> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_integer().is_some()
    }

    /// Coefficients as JSON: numbers where they fit in 64 bits, decimal
    /// strings otherwise.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.coeffs
                .iter()
                .map(|c| match c.to_i64() {
                    Some(v) => serde_json::Value::from(v),
                    None => serde_json::Value::from(c.to_string()),
                })
                .collect(),
        )
    }
}

/// psi_m(u) = zeta_p^{u_0 + .. + u_m}.
pub fn psi_m(u: &JetScalar) -> CyclotomicSum {
    CyclotomicSum::root_power(u.field.p(), u.trace() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::field::PrimeField;

    #[test]
    fn sum_of_all_roots_is_zero() {
        let mut s = CyclotomicSum::zero(5);
        for k in 0..5 {
            s.add_root_power(k, &BigInt::from(1));
        }
        assert!(s.is_zero());
    }

    #[test]
    fn conjugate_product_of_root_is_one() {
        let z = CyclotomicSum::root_power(7, 3);
        assert_eq!(z.mul(&z.conj()).unwrap().as_integer(), Some(BigInt::from(1)));
    }

    #[test]
    fn gauss_sum_squared_for_p3() {
        // g = zeta - zeta^2 satisfies g^2 = -3 for p = 3
        let mut g = CyclotomicSum::zero(3);
        g.add_root_power(1, &BigInt::from(1));
        g.add_root_power(2, &BigInt::from(-1));
        assert_eq!(g.mul(&g).unwrap().as_integer(), Some(BigInt::from(-3)));
    }

    #[test]
    fn mismatched_primes() {
        let mut a = CyclotomicSum::zero(3);
        let b = CyclotomicSum::zero(5);
        assert!(a.accumulate(&b, &BigInt::from(1)).is_err());
    }

    #[test]
    fn character_of_jet() {
        let f = PrimeField::new(3).unwrap();
        let u = JetScalar::new(f, vec![1, 2]).unwrap();
        assert_eq!(psi_m(&u).as_integer(), Some(BigInt::from(1)));
    }
}
