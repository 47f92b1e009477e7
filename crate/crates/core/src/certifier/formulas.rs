//! Closed forms: f(g), s, A, M, A', the dimension counts and the
//! n-thresholds with their e_0. Everything is an exact rational.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn pow2(k: i64) -> Q {
    if k >= 0 {
        Q::from_integer(BigInt::one() << (k as usize))
    } else {
        Q::new(BigInt::one(), BigInt::one() << ((-k) as usize))
    }
}

/// "p/q" with both parts in decimal; integers print without a slash.
pub fn qstr(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn qf64(x: &Q) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn floor_i(x: &Q) -> i64 {
    x.floor().to_integer().to_i64().expect("floor fits i64")
}

pub fn ceil_i(x: &Q) -> i64 {
    x.ceil().to_integer().to_i64().expect("ceil fits i64")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Canonical,
    Terminal,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(Mode::Canonical),
            "terminal" => Ok(Mode::Terminal),
            other => Err(Error::InvalidInput(format!("unknown mode {other:?}"))),
        }
    }
}

/// f(g): 0 for g <= 1, (g+1)/2 otherwise.
pub fn f_g(g: i64) -> Q {
    if g <= 1 {
        Q::zero()
    } else {
        qr(g + 1, 2)
    }
}

/// Twice f(g), always an integer.
pub fn f2(g: i64) -> i64 {
    if g <= 1 {
        0
    } else {
        g + 1
    }
}

/// (mu, mu_bar): the expected dimension of the morphism space and the
/// heuristic dimension of the moduli space.
pub fn mu_dims(n: i64, d: i64, e: i64, g: i64) -> (i64, i64) {
    let mu = (n + 1) * (e - g + 1) - (d * e - g + 1) - 1;
    let mu_bar = (n + 1) * (e - g + 1) - (d * e - g + 1) + g - 1 + (3 * g - 3);
    (mu, mu_bar)
}

/// Floor division by a positive divisor.
pub fn fdiv(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

/// Ceiling division by a positive divisor.
pub fn cdiv(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

/// m' = ceil((m+1)/2).
pub fn m_prime(m: i64) -> i64 {
    fdiv(m + 2, 2)
}

/// The shrinking parameter s for a functional of minimal degree `big_d`.
pub fn s_value(d: i64, g: i64, e: i64, big_d: i64) -> i64 {
    let a = fdiv(big_d - e + 2 * g - 2, d - 1);
    let b = fdiv(e * (d - 1) - big_d, d - 1);
    let mut s = a.max(b);
    if g >= 1 {
        s = s.max(2 * g - 2).max(1);
    }
    s + 1
}

/// The largest integer D with D <= de/2 + 1.
pub fn d_cap(d: i64, e: i64) -> i64 {
    fdiv(d * e + 2, 2)
}

/// The largest integer D with D <= de/2 - g + 1, i.e. the end of the
/// range where the second term of s dominates.
pub fn d_split(d: i64, g: i64, e: i64) -> i64 {
    fdiv(d * e - 2 * g + 2, 2)
}

/// A = 2^(d-2) (2D + m(de+1-g)) / ((e-s-g+1)(floor((m-m')/(d-1))+1) - (m-m'+1) f(g)).
///
/// Fails when e - s < 2g - 1 or when the denominator is not positive.
pub fn a_quantity(d: i64, g: i64, e: i64, m: i64, big_d: i64) -> Result<Q> {
    let s = s_value(d, g, e, big_d);
    if e - s < 2 * g - 1 {
        return Err(Error::Precondition(format!(
            "e - s >= 2g - 1 fails: e={e}, s={s}, g={g} (d={d}, D={big_d})"
        )));
    }
    let mp = m_prime(m);
    let num = pow2(d - 2) * q(2 * big_d + m * (d * e + 1 - g));
    let den = q((e - s - g + 1) * (fdiv(m - mp, d - 1) + 1)) - q(m - mp + 1) * f_g(g);
    if !den.is_positive() {
        return Err(Error::Precondition(format!("A has non-positive denominator {} at d={d}, g={g}, e={e}, m={m}, D={big_d}", qstr(&den))));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MCase {
    /// only the alpha estimate applies
    Alpha,
    /// only the beta estimate applies
    Beta,
    /// both apply, M is the larger
    Both,
}

/// The two branch values of M: the alpha estimate
/// m' f(g) + (e-s_a-g+1) ceil((m-m'+1)/(d-1)) and the beta estimate
/// (e-s_b-g+1) ceil((m+1)/(d-1)).
pub fn m_branches(d: i64, g: i64, e: i64, m: i64, s_a: i64, s_b: i64) -> (Q, Q) {
    let mp = m_prime(m);
    let a = q(mp) * f_g(g) + q((e - s_a - g + 1) * cdiv(m - mp + 1, d - 1));
    let b = q((e - s_b - g + 1) * cdiv(m + 1, d - 1));
    (a, b)
}

/// M(alpha, beta) and the case that applied.
pub fn m_quantity(d: i64, g: i64, e: i64, m: i64, d_alpha: i64, d_beta: i64) -> Result<(Q, MCase)> {
    let s_a = s_value(d, g, e, d_alpha);
    let s_b = s_value(d, g, e, d_beta);
    let ok_a = e - s_a >= 2 * g - 1;
    let ok_b = e - s_b >= 2 * g - 1;
    let (ma, mb) = m_branches(d, g, e, m, s_a, s_b);
    match (ok_a, ok_b) {
        (true, false) => Ok((ma, MCase::Alpha)),
        (false, true) => Ok((mb, MCase::Beta)),
        (true, true) => Ok((ma.max(mb), MCase::Both)),
        (false, false) => Err(Error::Precondition(format!(
            "max(e - s_alpha, e - s_beta) >= 2g - 1 fails: s_alpha={s_a}, s_beta={s_b}, e={e}, g={g}"
        ))),
    }
}

/// A' = 2^(d-1) (D_a + D_b + m(de-g+1)) / (M - (m+1) f(g)).
pub fn a_prime(d: i64, g: i64, e: i64, m: i64, d_alpha: i64, d_beta: i64) -> Result<(Q, MCase)> {
    let (mq, case) = m_quantity(d, g, e, m, d_alpha, d_beta)?;
    let den = mq - q(m + 1) * f_g(g);
    if !den.is_positive() {
        return Err(Error::Precondition(format!(
            "A' has non-positive denominator {} at d={d}, g={g}, e={e}, m={m}, D_alpha={d_alpha}, D_beta={d_beta}",
            qstr(&den)
        )));
    }
    let num = pow2(d - 1) * q(d_alpha + d_beta + m * (d * e - g + 1));
    Ok((num / den, case))
}

/// e_0 from the tables: canonical or terminal, by (d, g).
pub fn e0(mode: Mode, d: i64, g: i64) -> Result<Q> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("degree d={d} is below 2")));
    }
    if g == 0 {
        return if d >= 3 {
            Ok(Q::zero())
        } else {
            Err(Error::InvalidInput("d=2 with g=0 is not covered".into()))
        };
    }
    let f = f_g(g);
    let dq = q(d);
    let gq = q(g);
    Ok(match (mode, d) {
        (Mode::Canonical, 2) => q(19 * g - 3) + q(7) * f,
        (Mode::Terminal, 2) => q(29 * g - 5) + q(14) * f,
        (Mode::Canonical, _) => {
            q(g - 1) * (pow2(d - 1) * q((d - 1) * (d - 1) * (2 * d - 1)) + q(2))
                + q(d - 1) * (gq + q(d - 1) * &f) * (pow2(d - 1) * q((d - 1) * (d * d - d + 1)) + q(1))
        }
        (Mode::Terminal, _) => {
            let inner = q(4 * d * d * g) + q(4 * d * d * d - 8 * d * d + 7 * d - 3) * &f + q(4 * d * (g - 2) - g + 4);
            pow2(d - 2) * q((d - 1) * (d - 1)) * inner - q(1) + (dq + q(1)) * gq + q((d - 1) * (d - 1)) * f
        }
    })
}

/// The small-e terminal bound B_2 = 2^(d-1)(d-1)(1 + (d-1)/(2d-1) + 2(d-1)(de+1)/d).
pub fn b2(d: i64, e: i64) -> Q {
    pow2(d - 1) * q(d - 1) * (q(1) + qr(d - 1, 2 * d - 1) + qr(2 * (d - 1) * (d * e + 1), d))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Threshold {
    /// which case row of the theorem applies
    pub row: &'static str,
    /// n + 1 must be strictly larger than this
    #[serde(serialize_with = "ser_q")]
    pub bound: Q,
    /// smallest integer n + 1 above the bound
    pub min_n_plus_1: i64,
    #[serde(serialize_with = "ser_q")]
    pub e0: Q,
}

pub fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&qstr(x))
}

/// The n-threshold of the applicable theorem row for (d, g, e), with e_0.
/// Errors on combinations no row covers, including e <= e_0.
pub fn thresholds(d: i64, g: i64, e: i64, mode: Mode) -> Result<Threshold> {
    let uncovered = |why: &str| Err(Error::InvalidInput(format!("{mode:?} d={d} g={g} e={e} is not covered: {why}")));
    if d < 2 || g < 0 || e < 1 {
        return uncovered("needs d >= 2, g >= 0, e >= 1");
    }
    let e0v = match e0(mode, d, g) {
        Ok(v) => v,
        Err(_) => return uncovered("d = 2 needs g >= 1"),
    };
    if q(e) <= e0v {
        return uncovered("e must exceed e_0");
    }
    let top_can = pow2(d - 1) * q((d - 1) * (d * d - d + 1));
    let top_term = pow2(d - 2) * q((d - 1) * (4 * d * d - 4 * d + 3));
    let (row, bound) = match (mode, g) {
        (_, 0) if e == 1 => {
            if d < 4 {
                return uncovered("e = 1 with g = 0 needs d >= 4");
            }
            ("g=0, e=1", pow2(d - 2) * q(d * (2 * d + 1)))
        }
        (Mode::Canonical, 0) if e <= d - 2 => ("g=0, 2<=e<=d-2", pow2(d - 1) * q((d - 1) * (d * e + 2))),
        (Mode::Canonical, 0) => ("g=0, e>=d-1", top_can - q(1)),
        (Mode::Terminal, 0) if e < d => ("g=0, 2<=e<=d-1", b2(d, e)),
        (Mode::Terminal, 0) => ("g=0, e>=d", top_term - q(1)),
        (Mode::Canonical, _) => ("g>=1", top_can),
        (Mode::Terminal, _) => ("g>=1", top_term),
    };
    let min_n_plus_1 = floor_i(&bound) + 1;
    Ok(Threshold { row, bound, min_n_plus_1, e0: e0v })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_values() {
        assert_eq!(f_g(0), q(0));
        assert_eq!(f_g(1), q(0));
        assert_eq!(f_g(2), qr(3, 2));
        for g in 0..20 {
            assert_eq!(q(f2(g)), q(2) * f_g(g));
        }
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu_dims(3, 2, 3, 0), (8, 5));
        assert_eq!(mu_dims(2, 2, 2, 0).0, 3);
    }

    #[test]
    fn s_examples() {
        assert_eq!(s_value(3, 0, 4, 6), 2);
        assert_eq!(s_value(2, 1, 10, 11), 2);
        assert_eq!(s_value(2, 2, 20, 20), 3);
        assert_eq!(s_value(2, 2, 20, 21), 4);
    }

    #[test]
    fn s_switches_branch_at_split() {
        // the first term of the max dominates exactly above de/2 - g + 1
        for d in 3..8i64 {
            for g in 0..3i64 {
                for e in 2 * d..2 * d + 10 {
                    let first = |dd: i64| fdiv(dd - e + 2 * g - 2, d - 1);
                    let second = |dd: i64| fdiv(e * (d - 1) - dd, d - 1);
                    let split = d_split(d, g, e);
                    assert!(second(split) >= first(split), "d={d} g={g} e={e}");
                    assert!(first(split + 1) >= second(split + 1), "d={d} g={g} e={e}");
                }
            }
        }
    }

    #[test]
    fn a_examples() {
        assert_eq!(a_quantity(3, 0, 4, 1, 6).unwrap(), qr(50, 3));
        assert_eq!(a_quantity(2, 1, 30, 1, 31).unwrap(), qr(61, 14));
    }

    #[test]
    fn a_reports_precondition() {
        // g=3, e small: e - s < 2g - 1
        let err = a_quantity(3, 3, 6, 1, 6).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn m_and_a_prime_examples() {
        let (m, case) = m_quantity(2, 1, 30, 1, 31, 31).unwrap();
        assert_eq!(m, q(56));
        assert_eq!(case, MCase::Both);
        assert_eq!(a_prime(2, 1, 30, 1, 31, 31).unwrap().0, qr(61, 14));
    }

    #[test]
    fn m_first_case() {
        // g=2: D_beta = 0 gives s_beta = e+1, so only alpha applies
        let (m, case) = m_quantity(3, 2, 40, 3, 60, 0).unwrap();
        assert_eq!(case, MCase::Alpha);
        let s_a = s_value(3, 2, 40, 60);
        let mp = m_prime(3);
        assert_eq!(m, q(mp) * f_g(2) + q((40 - s_a - 2 + 1) * cdiv(3 - mp + 1, 2)));
    }

    #[test]
    fn e0_examples() {
        assert_eq!(e0(Mode::Canonical, 2, 1).unwrap(), q(16));
        assert_eq!(e0(Mode::Terminal, 2, 1).unwrap(), q(24));
        assert_eq!(e0(Mode::Canonical, 3, 1).unwrap(), q(114));
        assert_eq!(e0(Mode::Canonical, 3, 0).unwrap(), q(0));
        assert!(e0(Mode::Canonical, 2, 0).is_err());
    }

    #[test]
    fn threshold_rows() {
        let t = thresholds(2, 1, 17, Mode::Canonical).unwrap();
        assert_eq!((t.bound.clone(), t.min_n_plus_1), (q(6), 7));
        let t = thresholds(2, 1, 25, Mode::Terminal).unwrap();
        assert_eq!((t.bound.clone(), t.min_n_plus_1), (q(11), 12));
        let t = thresholds(3, 0, 5, Mode::Canonical).unwrap();
        assert_eq!(t.min_n_plus_1, 56);
        assert!(thresholds(2, 1, 16, Mode::Canonical).is_err());
        assert!(thresholds(3, 0, 1, Mode::Canonical).is_err());
        assert_eq!(thresholds(4, 0, 1, Mode::Terminal).unwrap().bound, q(144));
    }
}
