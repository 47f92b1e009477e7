//! Sections of O(r) on P^1 with jet coefficients, their dual functionals,
//! and effective divisors on P^1.
//!
//! A section of `P_{r,m}` is a polynomial of degree at most r in x whose
//! coefficients lie in F_p[t]/(t^{m+1}). Coefficients are stored layer by
//! layer: entry `layer * (r + 1) + deg` holds the coefficient of
//! `x^deg t^layer`. Dual functionals use the same layout, with layer i being
//! the functional alpha_i on P_r.

use crate::arith::field::PrimeField;
use crate::arith::jet::JetScalar;
use crate::arith::poly;
use crate::budget::Budget;
use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JetSection {
    pub field: PrimeField,
    pub r: usize,
    pub m: usize,
    pub data: Vec<u32>,
}

/// Decodes `index` in base p into `len` digits, least significant first.
pub fn digits(p: u32, mut index: u64, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = (index % p as u64) as u32;
            index /= p as u64;
            d
        })
        .collect()
}

pub fn undigits(p: u32, ds: &[u32]) -> u64 {
    ds.iter().rev().fold(0u64, |acc, &d| acc * p as u64 + d as u64)
}

impl JetSection {
    pub fn zero(field: PrimeField, r: usize, m: usize) -> Self {
        JetSection { field, r, m, data: vec![0; (r + 1) * (m + 1)] }
    }

    pub fn new(field: PrimeField, r: usize, m: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != (r + 1) * (m + 1) {
            return Err(Error::InvalidInput(format!(
                "section of P_{{{r},{m}}} needs {} coefficients, got {}",
                (r + 1) * (m + 1),
                data.len()
            )));
        }
        let p = field.p();
        Ok(JetSection { field, r, m, data: data.into_iter().map(|c| c % p).collect() })
    }

    /// Builds a section from its t-layers, each a polynomial in x.
    pub fn from_layers(field: PrimeField, r: usize, layers: &[Vec<u32>]) -> Result<Self> {
        let m = layers.len().checked_sub(1).ok_or_else(|| Error::InvalidInput("no layers".into()))?;
        let mut s = Self::zero(field, r, m);
        for (l, layer) in layers.iter().enumerate() {
            if layer.len() > r + 1 && layer[r + 1..].iter().any(|&c| c != 0) {
                return Err(Error::InvalidInput(format!("layer {l} has degree above {r}")));
            }
            for (a, &c) in layer.iter().take(r + 1).enumerate() {
                s.data[l * (r + 1) + a] = c % field.p();
            }
        }
        Ok(s)
    }

    pub fn from_index(field: PrimeField, r: usize, m: usize, index: u64) -> Self {
        JetSection { field, r, m, data: digits(field.p(), index, (r + 1) * (m + 1)) }
    }

    pub fn index(&self) -> u64 {
        undigits(self.field.p(), &self.data)
    }

    #[inline]
    pub fn get(&self, layer: usize, deg: usize) -> u32 {
        self.data[layer * (self.r + 1) + deg]
    }

    pub fn layer(&self, l: usize) -> &[u32] {
        &self.data[l * (self.r + 1)..(l + 1) * (self.r + 1)]
    }

    /// The reduction mod t, as a polynomial of degree at most r.
    pub fn mod_t(&self) -> Vec<u32> {
        self.layer(0).to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&c| c == 0)
    }

    /// Drops or pads t-layers to order `m`.
    pub fn truncate(&self, m: usize) -> Self {
        let mut s = Self::zero(self.field, self.r, m);
        let n = (self.r + 1) * (m.min(self.m) + 1);
        s.data[..n].copy_from_slice(&self.data[..n]);
        s
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.field != o.field {
            return Err(Error::FieldMismatch { left: self.field.p(), right: o.field.p() });
        }
        if self.m != o.m {
            return Err(Error::InvalidInput("jet orders differ".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        if self.r != o.r {
            return Err(Error::InvalidInput("degrees differ".into()));
        }
        let f = self.field;
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(JetSection { data, ..self.clone() })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        if self.r != o.r {
            return Err(Error::InvalidInput("degrees differ".into()));
        }
        let f = self.field;
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(JetSection { data, ..self.clone() })
    }

    pub fn scale(&self, c: u32) -> Self {
        let f = self.field;
        JetSection { data: self.data.iter().map(|&a| f.mul(a, c)).collect(), ..self.clone() }
    }

    /// Multiplies by t^k, discarding layers above m.
    pub fn shift_t(&self, k: usize) -> Self {
        let mut s = Self::zero(self.field, self.r, self.m);
        let w = self.r + 1;
        for l in 0..=self.m {
            if l + k <= self.m {
                s.data[(l + k) * w..(l + k + 1) * w].copy_from_slice(self.layer(l));
            }
        }
        s
    }

    /// Evaluation at a point x = c, giving an element of F_p[t]/(t^{m+1}).
    pub fn eval_at(&self, c: u32) -> JetScalar {
        let f = self.field;
        let coeffs = (0..=self.m)
            .map(|l| self.layer(l).iter().rev().fold(0, |acc, &a| f.add(f.mul(acc, c), a)))
            .collect();
        JetScalar { field: f, coeffs }
    }
}

/// Raw product of two layer-major coefficient arrays, truncated at t^{m+1}.
/// `out` must have room for `(ra + rb + 1) * (m + 1)` entries and is
/// overwritten.
#[inline]
pub fn mul_raw(f: &PrimeField, a: &[u32], ra: usize, b: &[u32], rb: usize, m: usize, out: &mut [u32]) {
    let wa = ra + 1;
    let wb = rb + 1;
    let wo = ra + rb + 1;
    let p = f.p() as u64;
    out.iter_mut().for_each(|x| *x = 0);
    for la in 0..=m {
        for lb in 0..=m - la {
            let lo = la + lb;
            for i in 0..wa {
                let x = a[la * wa + i];
                if x == 0 {
                    continue;
                }
                for j in 0..wb {
                    let y = b[lb * wb + j];
                    if y == 0 {
                        continue;
                    }
                    let idx = lo * wo + i + j;
                    out[idx] = ((out[idx] as u64 + x as u64 * y as u64) % p) as u32;
                }
            }
        }
    }
}

/// The product map P_{r1,m} x P_{r2,m} -> P_{r1+r2,m}.
pub fn mul_sections(a: &JetSection, b: &JetSection) -> Result<JetSection> {
    a.check(b)?;
    let mut out = JetSection::zero(a.field, a.r + b.r, a.m);
    mul_raw(&a.field, &a.data, a.r, &b.data, b.r, a.m, &mut out.data);
    Ok(out)
}

/// An F_p-linear functional on P_{r,m}, viewed as an F_p[t]/(t^{m+1})-linear
/// map P_{r,m} -> F_p[t]/(t^{m+1}) via alpha(y)_k = sum_{i+j=k} <alpha_i, y_j>.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DualFunctional {
    pub field: PrimeField,
    pub r: usize,
    pub m: usize,
    pub data: Vec<u32>,
}

impl DualFunctional {
    pub fn zero(field: PrimeField, r: usize, m: usize) -> Self {
        DualFunctional { field, r, m, data: vec![0; (r + 1) * (m + 1)] }
    }

    pub fn new(field: PrimeField, r: usize, m: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != (r + 1) * (m + 1) {
            return Err(Error::InvalidInput("dual functional has wrong length".into()));
        }
        let p = field.p();
        Ok(DualFunctional { field, r, m, data: data.into_iter().map(|c| c % p).collect() })
    }

    pub fn from_index(field: PrimeField, r: usize, m: usize, index: u64) -> Self {
        DualFunctional { field, r, m, data: digits(field.p(), index, (r + 1) * (m + 1)) }
    }

    pub fn index(&self) -> u64 {
        undigits(self.field.p(), &self.data)
    }

    pub fn layer(&self, i: usize) -> &[u32] {
        &self.data[i * (self.r + 1)..(i + 1) * (self.r + 1)]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&c| c == 0)
    }

    /// alpha_0, the reduction mod t.
    pub fn mod_t(&self) -> DualFunctional {
        self.truncate(0)
    }

    /// Keeps alpha_0, .., alpha_k.
    pub fn truncate(&self, k: usize) -> DualFunctional {
        let mut d = DualFunctional::zero(self.field, self.r, k);
        let n = (self.r + 1) * (k.min(self.m) + 1);
        d.data[..n].copy_from_slice(&self.data[..n]);
        d
    }

    fn pair(&self, i: usize, y: &[u32]) -> u32 {
        let f = self.field;
        self.layer(i).iter().zip(y).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
    }

    pub fn apply(&self, y: &JetSection) -> Result<JetScalar> {
        if y.field != self.field {
            return Err(Error::FieldMismatch { left: self.field.p(), right: y.field.p() });
        }
        if y.r != self.r || y.m != self.m {
            return Err(Error::InvalidInput("functional and section shapes differ".into()));
        }
        let f = self.field;
        let mut out = vec![0u32; self.m + 1];
        for i in 0..=self.m {
            for j in 0..=self.m - i {
                out[i + j] = f.add(out[i + j], self.pair(i, y.layer(j)));
            }
        }
        Ok(JetScalar { field: f, coeffs: out })
    }

    /// The trace of alpha(y), the exponent of psi_m(alpha(y)).
    pub fn trace_apply(&self, y: &JetSection) -> Result<u32> {
        Ok(self.apply(y)?.trace())
    }

    /// The vector alpha' with trace(alpha(y)) = <alpha', y>, where
    /// alpha'_j = alpha_0 + .. + alpha_{m-j}. The map alpha -> alpha' is a
    /// bijection.
    pub fn transformed(&self) -> Vec<u32> {
        transform_prefix(&self.field, &self.data, self.r, self.m)
    }

    pub fn from_transformed(field: PrimeField, r: usize, m: usize, t: &[u32]) -> Self {
        let w = r + 1;
        let mut data = vec![0u32; w * (m + 1)];
        // alpha'_{m-i} = sum_{k<=i} alpha_k, so alpha_i = alpha'_{m-i} - alpha'_{m-i+1}
        for i in 0..=m {
            for a in 0..w {
                let cur = t[(m - i) * w + a];
                let prev = if i == 0 { 0 } else { t[(m - i + 1) * w + a] };
                data[i * w + a] = field.sub(cur, prev);
            }
        }
        DualFunctional { field, r, m, data }
    }
}

pub(crate) fn transform_prefix(f: &PrimeField, data: &[u32], r: usize, m: usize) -> Vec<u32> {
    let w = r + 1;
    let mut out = vec![0u32; w * (m + 1)];
    let mut acc = vec![0u32; w];
    for i in 0..=m {
        for a in 0..w {
            acc[a] = f.add(acc[a], data[i * w + a]);
        }
        out[(m - i) * w..(m - i + 1) * w].copy_from_slice(&acc);
    }
    out
}

/// An effective divisor on P^1: the zero locus of the monic polynomial `h`
/// plus `k_inf` times the point at infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DivisorP1 {
    pub h: Vec<u32>,
    pub k_inf: usize,
}

impl DivisorP1 {
    pub fn zero() -> Self {
        DivisorP1 { h: vec![1], k_inf: 0 }
    }

    pub fn degree(&self) -> usize {
        self.h.len() - 1 + self.k_inf
    }

    pub fn finite_degree(&self) -> usize {
        self.h.len() - 1
    }
}

impl std::fmt::Display for DivisorP1 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if self.h.len() > 1 {
            let terms: Vec<String> = self
                .h
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| match (i, c) {
                    (0, c) => format!("{c}"),
                    (1, 1) => "x".into(),
                    (1, c) => format!("{c}x"),
                    (i, 1) => format!("x^{i}"),
                    (i, c) => format!("{c}x^{i}"),
                })
                .collect();
            parts.push(format!("({})", terms.join("+")));
        }
        if self.k_inf > 0 {
            parts.push(format!("{}inf", self.k_inf));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

/// All divisors of exact degree `degree`, ordered by k_inf, then by the
/// coefficients (c_0, .., c_{k-1}) of h.
pub fn enumerate_divisors(p: u32, degree: usize) -> impl Iterator<Item = DivisorP1> {
    (0..=degree).flat_map(move |k_inf| {
        let dh = degree - k_inf;
        let count = (p as u64).pow(dh as u32);
        (0..count).map(move |i| DivisorP1 { h: poly::monic_of_degree(p, dh, i), k_inf })
    })
}

/// Basis {h x^i : 0 <= i <= r - deg Z} of the sections of O(r) vanishing on Z.
pub fn vanishing_subspace(r: usize, z: &DivisorP1) -> Vec<Vec<u32>> {
    let dz = z.degree();
    if dz > r {
        return Vec::new();
    }
    (0..=r - dz)
        .map(|i| {
            let mut v = vec![0u32; r + 1];
            v[i..i + z.h.len()].copy_from_slice(&z.h);
            v
        })
        .collect()
}

/// Whether alpha mod t vanishes on the sections vanishing on Z.
pub fn factors_through(alpha: &DualFunctional, z: &DivisorP1) -> bool {
    let f = alpha.field;
    let a0 = alpha.layer(0);
    vanishing_subspace(alpha.r, z)
        .iter()
        .all(|v| v.iter().zip(a0).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y))) == 0)
}

fn factors_through_raw(f: &PrimeField, a0: &[u32], z: &DivisorP1) -> bool {
    let r = a0.len() - 1;
    let dz = z.degree();
    if dz > r {
        return true;
    }
    let hl = z.h.len();
    (0..=r - dz).all(|i| {
        let mut acc = 0;
        for (k, &c) in z.h.iter().enumerate().take(hl) {
            acc = f.add(acc, f.mul(c, a0[i + k]));
        }
        acc == 0
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimalDivisor {
    pub divisor: DivisorP1,
    pub degree: usize,
    pub unique_below_bound: bool,
}

/// The divisor of least degree through which alpha factors, first in
/// enumeration order among ties. Uniqueness of the minimiser is checked when
/// its degree is at most `bound` (always, if no bound is given).
pub fn minimal_divisor(alpha: &DualFunctional, bound: Option<usize>) -> MinimalDivisor {
    let f = alpha.field;
    let a0 = alpha.layer(0);
    for b in 0..=alpha.r + 1 {
        let mut found: Option<DivisorP1> = None;
        let check_unique = bound.map(|bd| b <= bd).unwrap_or(true);
        let mut count = 0usize;
        for z in enumerate_divisors(f.p(), b) {
            if factors_through_raw(&f, a0, &z) {
                count += 1;
                if found.is_none() {
                    found = Some(z);
                    if !check_unique {
                        break;
                    }
                } else {
                    break;
                }
            }
        }
        if let Some(z) = found {
            return MinimalDivisor { degree: b, divisor: z, unique_below_bound: check_unique && count == 1 };
        }
    }
    unreachable!("every functional factors through a divisor of degree r + 1")
}

/// Global generation test on reductions mod t: no common zero on P^1,
/// including the point at infinity (some x^e coefficient is nonzero).
pub fn globally_generates_polys(f: &PrimeField, polys: &[&[u32]], e: usize) -> bool {
    if !polys.iter().any(|q| q.get(e).copied().unwrap_or(0) != 0) {
        return false;
    }
    let mut g: Vec<u32> = Vec::new();
    for q in polys {
        g = poly::gcd(f, &g, q);
        if g.len() == 1 {
            return true;
        }
    }
    g.len() == 1
}

pub fn globally_generates(x: &[JetSection]) -> Result<bool> {
    let first = x.first().ok_or_else(|| Error::InvalidInput("empty tuple".into()))?;
    for s in x {
        if s.field != first.field {
            return Err(Error::FieldMismatch { left: first.field.p(), right: s.field.p() });
        }
        if s.r != first.r {
            return Err(Error::InvalidInput("sections of different degrees".into()));
        }
    }
    let polys: Vec<&[u32]> = x.iter().map(|s| s.layer(0)).collect();
    Ok(globally_generates_polys(&first.field, &polys, first.r))
}

/// All functionals on P_{r,m} in index order.
pub fn enumerate_duals(
    field: PrimeField,
    r: usize,
    m: usize,
    budget: &Budget,
) -> Result<impl Iterator<Item = DualFunctional>> {
    let dim = (r + 1) * (m + 1);
    budget.check_pow("dual enumeration", field.p(), dim, 1)?;
    let total = (field.p() as u64).pow(dim as u32);
    Ok((0..total).map(move |i| DualFunctional::from_index(field, r, m, i)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn product_truncates_at_jet_order() {
        let a = JetSection::from_layers(f(3), 1, &[vec![1, 1], vec![0, 1]]).unwrap();
        let b = JetSection::from_layers(f(3), 1, &[vec![1, 2], vec![1, 0]]).unwrap();
        let c = mul_sections(&a, &b).unwrap();
        // (1 + x + t x)(1 + 2x + t) = 1 + 3x + 2x^2 + t(1 + x + x + 2x^2) mod t^2
        assert_eq!(c.layer(0), &[1, 0, 2]);
        assert_eq!(c.layer(1), &[1, 2, 2]);
    }

    #[test]
    fn divisor_enumeration_order() {
        let ds: Vec<String> = enumerate_divisors(2, 2).map(|d| d.to_string()).collect();
        assert_eq!(ds, ["(x^2)", "(x^2+x)", "(x^2+1)", "(x^2+x+1)", "(x)+1inf", "(x+1)+1inf", "2inf"]);
        assert_eq!(enumerate_divisors(3, 1).count(), 4);
    }

    #[test]
    fn evaluation_at_zero_has_degree_one() {
        let mut alpha = DualFunctional::zero(f(3), 2, 0);
        alpha.data[0] = 1;
        let md = minimal_divisor(&alpha, None);
        assert_eq!(md.degree, 1);
        assert_eq!(md.divisor, DivisorP1 { h: vec![0, 1], k_inf: 0 });
        assert!(md.unique_below_bound);
    }

    #[test]
    fn zero_functional_has_zero_divisor() {
        let md = minimal_divisor(&DualFunctional::zero(f(5), 4, 1), Some(3));
        assert_eq!(md.degree, 0);
        assert_eq!(md.divisor, DivisorP1::zero());
        assert!(md.unique_below_bound);
    }

    #[test]
    fn middle_coefficient_on_quartics_has_three_minimal_divisors() {
        // alpha(c) = c_2 on P_4 kills h * P_1 exactly when h = x^3 + c
        let mut alpha = DualFunctional::zero(f(3), 4, 0);
        alpha.data[2] = 1;
        let md = minimal_divisor(&alpha, Some(3));
        assert_eq!(md.degree, 3);
        assert!(!md.unique_below_bound);
        let cubes: Vec<DivisorP1> = (0..3).map(|c| DivisorP1 { h: vec![c, 0, 0, 1], k_inf: 0 }).collect();
        assert!(cubes.iter().all(|z| factors_through(&alpha, z)));
    }

    #[test]
    fn minimal_divisor_unique_up_to_half_degree() {
        // two minimisers of degree b force a common one when 2b <= r + 1
        let fld = f(3);
        for idx in 0..3u64.pow(7) {
            let md = minimal_divisor(&DualFunctional::from_index(fld, 6, 0, idx), Some(3));
            assert!(md.degree > 3 || md.unique_below_bound, "alpha {idx}");
        }
    }

    #[test]
    fn leading_coefficient_functional_lives_at_infinity() {
        let mut alpha = DualFunctional::zero(f(5), 3, 0);
        alpha.data[3] = 2;
        let md = minimal_divisor(&alpha, None);
        assert_eq!(md.divisor, DivisorP1 { h: vec![1], k_inf: 1 });
    }

    #[test]
    fn global_generation() {
        let fp = f(3);
        let x = JetSection::from_layers(fp, 1, &[vec![0, 1]]).unwrap();
        let one = JetSection::from_layers(fp, 1, &[vec![1, 0]]).unwrap();
        assert!(globally_generates(&[x.clone(), one.clone()]).unwrap());
        // x and 2x share the zero at 0
        assert!(!globally_generates(&[x.clone(), x.scale(2)]).unwrap());
        // constants only: common zero at infinity
        assert!(!globally_generates(&[one.clone(), one.scale(2)]).unwrap());
    }

    #[test]
    fn transformed_roundtrip_and_trace() {
        let fp = f(5);
        let alpha = DualFunctional::new(fp, 2, 2, (0..9).map(|i| (i * 7 + 3) % 5).collect()).unwrap();
        let t = alpha.transformed();
        assert_eq!(DualFunctional::from_transformed(fp, 2, 2, &t), alpha);
        let y = JetSection::new(fp, 2, 2, (0..9).map(|i| (i * i + 1) % 5).collect()).unwrap();
        let dot = t.iter().zip(&y.data).fold(0, |a, (&x, &z)| fp.add(a, fp.mul(x, z)));
        assert_eq!(alpha.trace_apply(&y).unwrap(), dot);
    }

    #[test]
    fn dual_enumeration_respects_budget() {
        assert!(enumerate_duals(f(3), 4, 1, &Budget::new(100)).is_err());
        assert_eq!(enumerate_duals(f(3), 1, 0, &Budget::default()).unwrap().count(), 9);
    }
}
