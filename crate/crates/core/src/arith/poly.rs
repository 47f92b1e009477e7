//! Dense univariate polynomials over F_p (coefficients low to high) and the
//! extension fields F_{p^k} built from them.

use super::field::PrimeField;

pub fn trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Degree, or `None` for the zero polynomial.
pub fn degree(a: &[u32]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn mul(f: &PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

pub fn sub(f: &PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
    let n = a.len().max(b.len());
    let mut out: Vec<u32> = (0..n)
        .map(|i| f.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
        .collect();
    trim(&mut out);
    out
}

/// Remainder of `a` modulo nonzero `b`.
pub fn rem(f: &PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
    let db = degree(b).expect("division by zero polynomial");
    let lead_inv = f.inv(b[db]).unwrap();
    let mut r: Vec<u32> = a.to_vec();
    trim(&mut r);
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = f.mul(r[dr], lead_inv);
        let shift = dr - db;
        for i in 0..=db {
            r[i + shift] = f.sub(r[i + shift], f.mul(c, b[i]));
        }
        trim(&mut r);
    }
    r
}

/// Monic gcd; the zero polynomial if both inputs are zero.
pub fn gcd(f: &PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    if let Some(dx) = degree(&x) {
        let inv = f.inv(x[dx]).unwrap();
        for c in x.iter_mut() {
            *c = f.mul(*c, inv);
        }
    }
    x
}

pub fn mulmod(f: &PrimeField, a: &[u32], b: &[u32], m: &[u32]) -> Vec<u32> {
    rem(f, &mul(f, a, b), m)
}

pub fn powmod(f: &PrimeField, a: &[u32], mut k: u64, m: &[u32]) -> Vec<u32> {
    let mut base = rem(f, a, m);
    let mut r = rem(f, &[1], m);
    while k > 0 {
        if k & 1 == 1 {
            r = mulmod(f, &r, &base, m);
        }
        base = mulmod(f, &base, &base, m);
        k >>= 1;
    }
    r
}

/// Ben-Or irreducibility test for a polynomial of positive degree.
pub fn is_irreducible(f: &PrimeField, a: &[u32]) -> bool {
    let n = match degree(a) {
        Some(n) if n >= 1 => n,
        _ => return false,
    };
    let x = vec![0, 1];
    let mut xp = x.clone();
    for _ in 1..=n / 2 {
        xp = powmod(f, &xp, f.p() as u64, a);
        let diff = sub(f, &xp, &x);
        let g = gcd(f, a, &diff);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// Monic polynomials of exact degree `k` in the order used throughout the
/// crate: the coefficient tuple `(c_0, .., c_{k-1})` compared
/// lexicographically.
pub fn monic_of_degree(p: u32, k: usize, index: u64) -> Vec<u32> {
    let mut out = vec![0u32; k + 1];
    out[k] = 1;
    let mut idx = index;
    for i in (0..k).rev() {
        out[i] = (idx % p as u64) as u32;
        idx /= p as u64;
    }
    out
}

/// The first monic irreducible polynomial of degree `k` in that order.
pub fn first_irreducible(f: &PrimeField, k: usize) -> Vec<u32> {
    let total = (f.p() as u64).pow(k as u32);
    (0..total)
        .map(|i| monic_of_degree(f.p(), k, i))
        .find(|m| is_irreducible(f, m))
        .expect("irreducible polynomials exist in every degree")
}

/// F_{p^k} as F_p[x]/(m). Elements are coefficient vectors of length k.
#[derive(Debug, Clone)]
pub struct ExtField {
    pub base: PrimeField,
    pub k: usize,
    pub modulus: Vec<u32>,
}

impl ExtField {
    pub fn new(base: PrimeField, k: usize) -> Self {
        let modulus = if k == 1 { vec![0, 1] } else { first_irreducible(&base, k) };
        ExtField { base, k, modulus }
    }

    pub fn size(&self) -> u64 {
        (self.base.p() as u64).pow(self.k as u32)
    }

    pub fn zero(&self) -> Vec<u32> {
        vec![0; self.k]
    }

    pub fn one(&self) -> Vec<u32> {
        let mut v = self.zero();
        v[0] = 1;
        v
    }

    pub fn element(&self, index: u64) -> Vec<u32> {
        let p = self.base.p() as u64;
        let mut idx = index;
        (0..self.k)
            .map(|_| {
                let c = (idx % p) as u32;
                idx /= p;
                c
            })
            .collect()
    }

    pub fn is_zero(&self, a: &[u32]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.base.add(x, y)).collect()
    }

    pub fn scale(&self, c: u32, a: &[u32]) -> Vec<u32> {
        a.iter().map(|&x| self.base.mul(c, x)).collect()
    }

    pub fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let mut r = rem(&self.base, &mul(&self.base, a, b), &self.modulus);
        r.resize(self.k, 0);
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_of_coprime_linear_factors_is_one() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(gcd(&f, &[1, 1], &[2, 1]), vec![1]);
        // (x+1)(x+2) and (x+1)(x+3)
        let a = mul(&f, &[1, 1], &[2, 1]);
        let b = mul(&f, &[1, 1], &[3, 1]);
        assert_eq!(gcd(&f, &a, &b), vec![1, 1]);
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        // number of monic irreducibles of degree 2 over F_3 is (9-3)/2 = 3
        let f = PrimeField::new(3).unwrap();
        let n = (0..9).filter(|&i| is_irreducible(&f, &monic_of_degree(3, 2, i))).count();
        assert_eq!(n, 3);
        // degree 3 over F_2: (8-2)/3 = 2
        let f2 = PrimeField::new(2).unwrap();
        let n3 = (0..8).filter(|&i| is_irreducible(&f2, &monic_of_degree(2, 3, i))).count();
        assert_eq!(n3, 2);
    }

    #[test]
    fn extension_field_has_inverses() {
        let f = PrimeField::new(3).unwrap();
        let ext = ExtField::new(f, 2);
        for i in 1..ext.size() {
            let a = ext.element(i);
            let found = (1..ext.size()).any(|j| ext.mul(&a, &ext.element(j)) == ext.one());
            assert!(found);
        }
    }
}
