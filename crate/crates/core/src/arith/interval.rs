//! Rigorous real enclosures for elements of Z[zeta_p].
//!
//! Numbers are balls `(mid ± rad) / 2^bits` over big integers, every
//! operation rounds outward, so the enclosures are valid at any precision.

use super::cyclo::CyclotomicSum;
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

#[derive(Debug, Clone)]
struct Ball {
    mid: BigInt,
    rad: BigInt,
    bits: u32,
}

impl Ball {
    fn exact_int(v: &BigInt, bits: u32) -> Ball {
        Ball { mid: v << bits, rad: BigInt::zero(), bits }
    }

    fn add(&self, o: &Ball) -> Ball {
        Ball { mid: &self.mid + &o.mid, rad: &self.rad + &o.rad, bits: self.bits }
    }

    fn neg(&self) -> Ball {
        Ball { mid: -&self.mid, rad: self.rad.clone(), bits: self.bits }
    }

    fn mul(&self, o: &Ball) -> Ball {
        let prod = &self.mid * &o.mid;
        let (mid, _) = prod.div_mod_floor(&(BigInt::one() << self.bits));
        let err = self.mid.abs() * &o.rad + o.mid.abs() * &self.rad + &self.rad * &o.rad;
        let rad = (err >> self.bits) + 2;
        Ball { mid, rad, bits: self.bits }
    }

    fn mul_int(&self, k: &BigInt) -> Ball {
        Ball { mid: &self.mid * k, rad: &self.rad * k.abs(), bits: self.bits }
    }

    fn div_int(&self, k: u64) -> Ball {
        let kk = BigInt::from(k);
        Ball { mid: self.mid.div_floor(&kk), rad: self.rad.div_floor(&kk) + 2, bits: self.bits }
    }

    fn magnitude_upper(&self) -> BigInt {
        self.mid.abs() + &self.rad
    }

    fn lower(&self) -> BigInt {
        &self.mid - &self.rad
    }

    fn upper(&self) -> BigInt {
        &self.mid + &self.rad
    }
}

fn atan_inv(x: u64, bits: u32) -> Ball {
    // atan(1/x) = sum (-1)^j / ((2j+1) x^{2j+1}), alternating and decreasing
    let one = BigInt::one() << bits;
    let xb = BigInt::from(x);
    let x2 = &xb * &xb;
    let mut power = xb.clone();
    let mut acc = BigInt::zero();
    let mut terms = 0i64;
    let mut j = 0u64;
    loop {
        let den = &power * BigInt::from(2 * j + 1);
        let t = one.div_floor(&den);
        if t.is_zero() {
            break;
        }
        if j.is_multiple_of(2) {
            acc += t;
        } else {
            acc -= t;
        }
        terms += 1;
        power *= &x2;
        j += 1;
    }
    Ball { mid: acc, rad: BigInt::from(terms + 2), bits }
}

fn pi_ball(bits: u32) -> Ball {
    let a = atan_inv(5, bits).mul_int(&BigInt::from(16));
    let b = atan_inv(239, bits).mul_int(&BigInt::from(4));
    a.add(&b.neg())
}

fn cos_ball(x: &Ball) -> Ball {
    let bits = x.bits;
    let x2 = x.mul(x);
    let mut term = Ball::exact_int(&BigInt::one(), bits);
    let mut sum = term.clone();
    let mut j = 1u64;
    loop {
        term = term.mul(&x2).div_int((2 * j - 1) * (2 * j));
        let tail = term.magnitude_upper();
        if tail <= BigInt::from(4) && j > 2 {
            // Lagrange remainder is bounded by the first omitted term
            sum.rad += tail;
            break;
        }
        sum = if j % 2 == 1 { sum.add(&term.neg()) } else { sum.add(&term) };
        j += 1;
    }
    sum
}

/// Enclosures of cos(2 pi k / p) for k = 0..p at a fixed working precision.
#[derive(Debug, Clone)]
pub struct CosTable {
    p: u32,
    bits: u32,
    balls: Vec<Ball>,
}

impl CosTable {
    pub fn new(p: u32, bits: u32) -> Self {
        let guard = bits + 16;
        let pi = pi_ball(guard);
        let balls = (0..p)
            .map(|k| {
                let kk = k.min(p - k) as u64;
                if kk == 0 {
                    return Ball::exact_int(&BigInt::one(), guard);
                }
                // angle 2 pi kk / p lies in [0, pi]
                let angle = pi.mul_int(&BigInt::from(2 * kk)).div_int(p as u64);
                cos_ball(&angle)
            })
            .collect();
        CosTable { p, bits: guard, balls }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Fixed-point enclosure (scale 2^bits) of the real part of `v`.
    fn real_part(&self, v: &CyclotomicSum) -> Ball {
        assert_eq!(v.p(), self.p);
        let mut acc = Ball::exact_int(&BigInt::zero(), self.bits);
        for (k, c) in v.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&self.balls[k].mul_int(c));
        }
        acc
    }

    /// Enclosure of the real part of `v`.
    pub fn real_interval(&self, v: &CyclotomicSum) -> RealInterval {
        let re = self.real_part(v);
        RealInterval { lo: fixed_to_rational(re.lower(), self.bits), hi: fixed_to_rational(re.upper(), self.bits) }
    }
}

/// A closed real interval with rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RealInterval {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        ((&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2)))
            .to_f64()
            .unwrap_or(f64::NAN)
    }
}

fn fixed_to_rational(v: BigInt, bits: u32) -> BigRational {
    BigRational::new(v, BigInt::one() << bits)
}

fn bit_length(v: &BigInt) -> u32 {
    v.bits() as u32
}

/// Enclosure of |v|, with width about 2^-precision_bits relative to |v|.
pub fn cyclo_magnitude(v: &CyclotomicSum, precision_bits: u32) -> RealInterval {
    let w = v.mul(&v.conj()).expect("same field");
    let size: BigInt = w.coeffs().iter().map(|c| c.abs()).sum();
    let bits = precision_bits + 32 + bit_length(&size);
    let (lo_fp, hi_fp) = match w.as_integer() {
        Some(n) => {
            let shifted: BigInt = n << (2 * bits);
            (shifted.clone(), shifted)
        }
        None => {
            let table = CosTable::new(v.p(), bits);
            let re = table.real_part(&w);
            let extra = table.bits() - bits;
            // rescale from table precision to 2*bits for the square root
            let lo = (re.lower() >> extra) << bits;
            let hi = ((re.upper() >> extra) + 1) << bits;
            (lo, hi)
        }
    };
    let lo_fp = if lo_fp.sign() == Sign::Minus { BigInt::zero() } else { lo_fp };
    let hi_fp = if hi_fp.sign() == Sign::Minus { BigInt::zero() } else { hi_fp };
    let lo = lo_fp.sqrt();
    let hi_floor = hi_fp.sqrt();
    let hi = if &hi_floor * &hi_floor == hi_fp { hi_floor } else { hi_floor + 1 };
    RealInterval { lo: fixed_to_rational(lo, bits), hi: fixed_to_rational(hi, bits) }
}

/// Compares the real number represented by `w` (assumed real, for example
/// `S * conj(S)`) against a rational bound. Returns `None` if the enclosure
/// at this precision straddles the bound.
pub fn compare_real(w: &CyclotomicSum, bound: &BigRational, table: &CosTable) -> Option<Ordering> {
    if let Some(n) = w.as_integer() {
        return Some(BigRational::from_integer(n).cmp(bound));
    }
    let re = table.real_part(w);
    let lo = fixed_to_rational(re.lower(), table.bits());
    let hi = fixed_to_rational(re.upper(), table.bits());
    if &hi < bound {
        Some(Ordering::Less)
    } else if &lo > bound {
        Some(Ordering::Greater)
    } else {
        None
    }
}

/// Enclosure of the real part of `w`.
pub fn real_enclosure(w: &CyclotomicSum, precision_bits: u32) -> RealInterval {
    let size: BigInt = w.coeffs().iter().map(|c| c.abs()).sum();
    let table = CosTable::new(w.p(), precision_bits + 32 + bit_length(&size));
    let re = table.real_part(w);
    RealInterval {
        lo: fixed_to_rational(re.lower(), table.bits()),
        hi: fixed_to_rational(re.upper(), table.bits()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn pi_enclosure_is_tight_and_correct() {
        let b = pi_ball(200);
        let lo = fixed_to_rational(b.lower(), 200).to_f64().unwrap();
        let hi = fixed_to_rational(b.upper(), 200).to_f64().unwrap();
        assert!(lo <= std::f64::consts::PI && std::f64::consts::PI <= hi);
        assert!(b.rad < BigInt::from(1000));
    }

    #[test]
    fn rational_magnitude_is_exact() {
        let v = CyclotomicSum::from_integer(5, 9);
        let iv = cyclo_magnitude(&v, 53);
        assert_eq!(iv.lo, BigRational::from_integer(BigInt::from(9)));
        assert_eq!(iv.hi, iv.lo);
    }

    #[test]
    fn unit_root_has_magnitude_one() {
        let v = CyclotomicSum::root_power(7, 2);
        let iv = cyclo_magnitude(&v, 64);
        assert!(iv.contains(&BigRational::one()));
    }

    #[test]
    fn magnitude_matches_floating_point() {
        // 1 + zeta_5: |1 + e^{2 pi i/5}| = 2 cos(pi/5)
        let mut v = CyclotomicSum::from_integer(5, 1);
        v.add_root_power(1, &BigInt::one());
        let iv = cyclo_magnitude(&v, 80);
        let expect = 2.0 * (std::f64::consts::PI / 5.0).cos();
        assert!((iv.midpoint_f64() - expect).abs() < 1e-12);
        let w = iv.width().to_f64().unwrap();
        assert!(w > 0.0 && w < 1e-20);
    }

    #[test]
    fn cos_table_matches_libm() {
        let t = CosTable::new(11, 64);
        for k in 0..11u32 {
            let b = &t.balls[k as usize];
            let lo = fixed_to_rational(b.lower(), t.bits()).to_f64().unwrap();
            let hi = fixed_to_rational(b.upper(), t.bits()).to_f64().unwrap();
            let c = (2.0 * std::f64::consts::PI * k as f64 / 11.0).cos();
            assert!(lo - 1e-15 <= c && c <= hi + 1e-15, "k={k}");
        }
    }
}
