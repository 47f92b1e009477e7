//! The displayed bound chains, transcribed term by term, and the case tree
//! that assigns each grid point to one of them.
//!
//! Every terminal bound is written twice: as the displayed fraction and
//! as the "constant - T / denominator" rewriting that accompanies it.

use super::formulas::{d_split, f_g, pow2, q, qr, Q};
use num_traits::Zero;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    /// canonical, g = 0 and e = 1: 2^(d-2) d (2d+1)
    CanSmallE1,
    /// canonical, g = 0 and 2 <= e <= d-2: 2^(d-1)(d-1)(de+2)
    CanSmallE,
    /// canonical case I, evaluated at D = e-2g+2
    Rain,
    /// canonical case II
    H,
    /// canonical d = 2: 2(3e+2-g)/(e-3g+1-f)
    H2,
    /// terminal e = 1, D_a + D_b >= d+1: 2^(d-1)(d+2+(d-2)(d+1))
    TermE1Wide,
    /// terminal e = 1, D_a + D_b < d+1: 2^(d-1)(d-1)(d+1)
    TermE1Narrow,
    B0,
    B1,
    B2,
    /// the m >= 2d-1 bound of the small-e terminal chain
    B3,
    S,
    SPrimeEq,
    SPrimeLt,
    C,
    CPrime,
    E1,
    E2,
    /// the III.2.2 bound for g >= 1 or d >= 4 and m > d-2
    L,
    /// terminal d = 2, D_beta >= e+2-2g: (4e+3-g)/(e-3g+1-f)
    T2I,
    /// terminal d = 2, 2g <= D_beta <= e+1-2g: (11e+7+12f-7g)/(e-3g+1-f)
    T2II,
    /// terminal d = 2, D_beta < 2g: 2(5e+2)/(e-3g+1-f)
    T2III,
}

impl Bound {
    pub fn name(self) -> &'static str {
        match self {
            Bound::CanSmallE1 => "can-small-e1",
            Bound::CanSmallE => "can-small-e",
            Bound::Rain => "rain",
            Bound::H => "h",
            Bound::H2 => "h-d2",
            Bound::TermE1Wide => "term-e1-wide",
            Bound::TermE1Narrow => "term-e1-narrow",
            Bound::B0 => "B0",
            Bound::B1 => "B1",
            Bound::B2 => "B2",
            Bound::B3 => "B3",
            Bound::S => "S",
            Bound::SPrimeEq => "S'-eq",
            Bound::SPrimeLt => "S'-lt",
            Bound::C => "C",
            Bound::CPrime => "C'",
            Bound::E1 => "E-III.2.1",
            Bound::E2 => "E-III.2.2",
            Bound::L => "III.2.2-last",
            Bound::T2I => "d2-I",
            Bound::T2II => "d2-II",
            Bound::T2III => "d2-III",
        }
    }

    /// Whether the bound shrinks as e grows. The tail arguments rely on
    /// this direction; only the g = 0 case I bound grows instead, towards
    /// its limit.
    pub fn decreasing_in_e(self, g: i64) -> Option<bool> {
        match self {
            Bound::CanSmallE1 | Bound::CanSmallE | Bound::TermE1Wide | Bound::TermE1Narrow => None,
            Bound::B0 | Bound::B1 | Bound::B2 | Bound::B3 => None,
            Bound::Rain => Some(g >= 1),
            Bound::SPrimeEq => Some(g >= 1),
            _ => {
                if g == 0 {
                    None
                } else {
                    Some(true)
                }
            }
        }
    }
}

/// Values shared by the chains.
struct P {
    d: i64,
    g: i64,
    f: Q,
    dq: Q,
    gq: Q,
    eq: Q,
    dm1: Q,
}

impl P {
    fn new(d: i64, g: i64, e: &Q) -> Self {
        P { d, g, f: f_g(g), dq: q(d), gq: q(g), eq: e.clone(), dm1: q(d - 1) }
    }
    /// a e + b
    fn lin(&self, a: i64, b: i64) -> Q {
        q(a) * &self.eq + q(b)
    }
    fn de(&self) -> Q {
        &self.dq * &self.eq
    }
    fn dm1sq_f(&self) -> Q {
        &self.dm1 * &self.dm1 * &self.f
    }
    /// e - 2g + 2 - (d-1) g - (d-1)^2 f
    fn den_low(&self) -> Q {
        self.lin(1, 2 - 2 * self.g) - &self.dm1 * &self.gq - self.dm1sq_f()
    }
    /// de/2 - g + 1 - gd - (d-1)^2 f
    fn den_mid(&self) -> Q {
        self.de() / q(2) - &self.gq + q(1) - &self.gq * &self.dq - self.dm1sq_f()
    }
    /// de - g + 1
    fn top(&self) -> Q {
        self.lin(self.d, 1 - self.g)
    }
}

/// A bound value; `None` when its denominator is not positive.
pub fn bound_value(b: Bound, d: i64, g: i64, e: i64) -> Option<Q> {
    bound_value_at(b, d, g, &q(e))
}

/// [`bound_value`] at a rational e, as needed at e_0.
pub fn bound_value_at(b: Bound, d: i64, g: i64, e: &Q) -> Option<Q> {
    let p = P::new(d, g, e);
    let (num, den) = fraction(b, &p);
    if den <= Q::zero() {
        None
    } else {
        Some(num / den)
    }
}

/// (numerator, denominator) of the displayed fraction form.
fn fraction(b: Bound, p: &P) -> (Q, Q) {
    let d = p.d;
    let g = p.g;
    let one = || q(1);
    let lead = pow2(d - 1) * &p.dm1;
    let low = p.lin(1, 2 - 2 * g);
    match b {
        Bound::CanSmallE1 => (pow2(d - 2) * q(d * (2 * d + 1)), one()),
        Bound::CanSmallE => (lead * p.lin(d, 2), one()),
        Bound::Rain => (
            lead * (low.clone() + &p.dm1 * p.lin(d, 1 - g)),
            low - q(g * (d - 1)) - p.dm1sq_f(),
        ),
        Bound::H => (
            pow2(d - 2) * &p.dm1 * (p.lin(d, 2) + q(2) * &p.dm1 * p.lin(d, 1 - g)),
            p.de() / q(2) - q(2 * g) + one() - q(g * (d - 1)) - &p.f * &p.dm1 * &p.dm1,
        ),
        Bound::H2 => (q(2) * p.lin(3, 2 - g), p.lin(1, 1 - 3 * g) - &p.f),
        Bound::TermE1Wide => (pow2(d - 1) * q(d + 2 + (d - 2) * (d + 1)), one()),
        Bound::TermE1Narrow => (pow2(d - 1) * q((d - 1) * (d + 1)), one()),
        Bound::B0 => (lead * p.lin(d, 1), one()),
        Bound::B1 => (lead * (q(2) + p.lin(d, 1) * qr(d - 2, d)), one()),
        Bound::B2 => (lead * (q(1) + qr(d - 1, 2 * d - 1) + p.lin(d, 1) * qr(2 * (d - 1), d)), one()),
        Bound::B3 => (
            pow2(d) * &p.dm1 * &p.dm1 * (p.dq.clone() * (q(1) + qr(2 * d - 1, 4 * d)) + q(2 * d - 1) * p.lin(d, 1)),
            q(d * (2 * d - 1)),
        ),
        Bound::S => (lead * (q(3) * &low + q(d - 2) * p.top()), p.den_low()),
        Bound::SPrimeEq => (
            q(3) * pow2(d - 1) * &p.dm1 * &p.dm1 * p.top(),
            p.top() - q(3) * &p.dm1 * &p.gq - q(3) * p.dm1sq_f(),
        ),
        Bound::SPrimeLt => (pow2(d - 1) * &p.dm1 * &p.dm1 * p.top(), p.den_low()),
        Bound::C => (
            pow2(d - 2) * &p.dm1 * (q(3) * (p.de() / q(2) + q(1)) + q(4) * &p.dm1 * p.top()),
            p.den_mid(),
        ),
        Bound::CPrime => (
            lead * (p.de() / q(2) + q(1) + p.lin(1, 1 - 2 * g) + q(2) * &p.dm1 * p.top()),
            p.de() / q(2) + q(1) - q((d + 1) * g) - p.dm1sq_f(),
        ),
        Bound::E1 => (lead * (qr(3, 2) * &low + q(2) * &p.dm1 * p.top()), p.den_low()),
        Bound::E2 => (
            lead * (q(3) * (p.eq.clone() / q(2) - &p.gq + q(1)) + q(d - 2) * p.top()),
            p.eq.clone() / q(2) - &p.gq + q(1) - &p.dm1 * &p.gq - p.dm1sq_f(),
        ),
        Bound::L => (lead * p.top(), p.eq.clone() / q(2) - &p.gq + q(1) - &p.dm1 * &p.gq - p.dm1sq_f()),
        Bound::T2I => (p.lin(4, 3 - g), p.lin(1, 1 - 3 * g) - &p.f),
        Bound::T2II => (p.lin(11, 7 - 7 * g) + q(12) * &p.f, p.lin(1, 1 - 3 * g) - &p.f),
        Bound::T2III => (p.lin(10, 4), p.lin(1, 1 - 3 * g) - &p.f),
    }
}

/// The rewriting `lead * (constant - T / den)` of a terminal bound, with
/// T as displayed. Returns (lead * constant, T, den, lead).
pub fn t_form(b: Bound, d: i64, g: i64, e: &Q) -> Option<(Q, Q, Q, Q)> {
    let p = P::new(d, g, e);
    let f = &p.f;
    let dq = &p.dq;
    let gq = &p.gq;
    let dm1 = &p.dm1;
    let lead = pow2(d - 1) * dm1;
    let (lead, c, t, den) = match b {
        Bound::S => (
            lead,
            q(3 + d * (d - 2)),
            -q((d - 2) * d + 3) * dm1 * dm1 * f + q(d * (d * (-d * g + g + 2) - 5) + g + 2),
            p.den_low(),
        ),
        Bound::SPrimeEq => {
            // 3 * 2^(d-1)(d-1)^2 (1 + T/(de-g+1-T)), i.e. constant 1 and -T
            let t = q(3) * dm1 * gq + q(3) * dm1 * dm1 * f;
            let den = p.top() - &t;
            (q(3) * pow2(d - 1) * dm1 * dm1, q(1), -t, den)
        }
        Bound::SPrimeLt => (
            pow2(d - 1) * dm1 * dm1,
            dq.clone(),
            q(g - 1 - 2 * d * g + 2 * d - d * (d - 1) * g) - dq * dm1 * dm1 * f,
            p.den_low(),
        ),
        Bound::C => (
            pow2(d - 2) * dm1,
            q(3 + 8 * (d - 1)),
            q(-4) + q(5) * f - q(8 * d * d * d) * f + q(d * d) * (q(21) * f - q(8 * g)) + gq + dq * (q(4) - q(18) * f + gq),
            p.den_mid(),
        ),
        Bound::CPrime => (
            lead,
            q(4 * d - 3) + qr(2, d),
            q(-3) + q(7) * f - q(4 * d * d * d) * f + q(d * d) * (q(11) * f - q(4 * g)) + gq + dq * (q(2) - q(12) * f - gq)
                - q(2) * (q(-1) + f + gq) / dq,
            p.de() / q(2) + q(1) - q((d + 1) * g) - p.dm1sq_f(),
        ),
        Bound::E1 => (
            lead,
            qr(3, 2) + q(2 * d * (d - 1)),
            -dm1 * (q(4 * d * d * g) + q(4 * d * d * d - 8 * d * d + 7 * d - 3) * f + q(4 * d * (g - 2) - g + 4)) / q(2),
            p.den_low(),
        ),
        Bound::E2 => (
            lead,
            q(3 + 2 * d * (d - 2)),
            q(-2)
                * (q(2 * d * d - 4 * d + 3) * dm1 * dm1 * f
                    + q(2 * d * d * d * g - 4 * d * d * g - 2 * d * d + 2 * d * g + 5 * d - g - 2)),
            p.lin(1, 2 - 2 * g) - q(2 * (d - 1) * g) - q(2) * p.dm1sq_f(),
        ),
        Bound::L => (
            lead,
            q(2 * d),
            q(-1) - q(2 * d) * (q(-1) + f) - q(2 * d * d * d) * f + q(d * d) * (q(4) * f - q(2 * g)) + gq,
            p.eq.clone() / q(2) - gq + q(1) - dm1 * gq - p.dm1sq_f(),
        ),
        _ => return None,
    };
    Some((&lead * c, t, den, lead))
}

/// The value of the T-form, when its denominator is nonzero.
pub fn t_form_value(b: Bound, d: i64, g: i64, e: &Q) -> Option<Q> {
    let (lc, t, den, lead) = t_form(b, d, g, e)?;
    if den.is_zero() {
        return None;
    }
    Some(lc - lead * t / den)
}

/// The expected sign of T in the rewriting: positive for g = 0, negative
/// for g >= 1. `None` where no sign is asserted.
pub fn t_sign_claim(b: Bound, d: i64, g: i64) -> Option<bool> {
    match b {
        Bound::S | Bound::SPrimeLt | Bound::C | Bound::CPrime | Bound::E1 | Bound::E2 => {
            if b == Bound::C || b == Bound::CPrime {
                // these cases only arise for g >= 1
                (g >= 1).then_some(false)
            } else {
                Some(g == 0)
            }
        }
        Bound::SPrimeEq => None,
        Bound::L => {
            if g == 0 && d >= 4 {
                Some(true)
            } else if g == 1 {
                Some(false)
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Canonical case tree for a grid point (e, m, D).
pub fn canonical_case(d: i64, g: i64, e: i64, big_d: i64) -> Bound {
    if d == 2 {
        return Bound::H2;
    }
    if g == 0 && e <= d - 2 {
        return if e == 1 { Bound::CanSmallE1 } else { Bound::CanSmallE };
    }
    if big_d <= d_split(d, g, e) {
        Bound::Rain
    } else {
        Bound::H
    }
}

/// Terminal case tree for a grid point (e, m, D_alpha, D_beta); the pair
/// must be minor, i.e. max(D_alpha, D_beta) >= e - 2g + 2.
pub fn terminal_case(d: i64, g: i64, e: i64, m: i64, da: i64, db: i64) -> Bound {
    let low = e - 2 * g + 2;
    if d == 2 {
        return if db >= low {
            Bound::T2I
        } else if db >= 2 * g {
            Bound::T2II
        } else {
            Bound::T2III
        };
    }
    if g == 0 && e < d {
        if e == 1 {
            return if da + db > d { Bound::TermE1Wide } else { Bound::TermE1Narrow };
        }
        return if da.max(db) < d {
            Bound::B0
        } else if m <= d - 2 {
            Bound::B1
        } else if m <= 2 * d - 2 {
            Bound::B2
        } else {
            Bound::B3
        };
    }
    let split = d_split(d, g, e);
    let top = d * e - g + 1;
    if db >= low && db <= split {
        // case I
        if 2 * db >= da {
            if m < d - 1 || 3 * db > top {
                Bound::S
            } else if 3 * db == top {
                Bound::SPrimeEq
            } else {
                Bound::SPrimeLt
            }
        } else if da <= split {
            Bound::E1
        } else {
            Bound::C
        }
    } else if db > split {
        Bound::C
    } else if da > split {
        Bound::CPrime
    } else if 2 * db < da {
        Bound::E1
    } else if m <= d - 2 || (g == 0 && d == 3) {
        Bound::E2
    } else {
        Bound::L
    }
}

/// Bounds a mode can assign at all, for the e_0 claims.
pub fn terminal_named() -> [Bound; 8] {
    [Bound::S, Bound::SPrimeEq, Bound::SPrimeLt, Bound::C, Bound::CPrime, Bound::E1, Bound::E2, Bound::L]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_forms_agree_except_c_prime() {
        for d in 3..9 {
            for g in 0..6 {
                for e in [200, 1000, 5001] {
                    for b in terminal_named() {
                        let (Some(x), Some(y)) = (bound_value(b, d, g, e), t_form_value(b, d, g, &q(e))) else {
                            continue;
                        };
                        if b == Bound::CPrime && g >= 1 {
                            assert_ne!(x, y, "d={d} g={g} e={e}");
                        } else {
                            assert_eq!(x, y, "{b:?} d={d} g={g} e={e}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn d2_canonical_bound_at_e0_is_seven() {
        for g in 1..30 {
            let e0 = super::super::formulas::e0(super::super::formulas::Mode::Canonical, 2, g).unwrap();
            assert_eq!(bound_value_at(Bound::H2, 2, g, &e0), Some(q(7)));
        }
    }

    #[test]
    fn case_tree_covers_known_points() {
        assert_eq!(terminal_case(3, 1, 300, 1, 10, 451), Bound::C);
        assert_eq!(terminal_case(3, 1, 300, 1, 10, 400), Bound::S);
        assert_eq!(terminal_case(3, 1, 300, 1, 451, 5), Bound::CPrime);
        assert_eq!(terminal_case(3, 1, 300, 1, 350, 100), Bound::E1);
        assert_eq!(terminal_case(3, 1, 300, 1, 350, 300), Bound::S);
        assert_eq!(terminal_case(3, 1, 300, 1, 350, 298), Bound::E2);
        assert_eq!(terminal_case(3, 1, 300, 2, 350, 298), Bound::L);
        assert_eq!(canonical_case(3, 1, 300, 300), Bound::Rain);
        assert_eq!(canonical_case(3, 1, 300, 451), Bound::H);
    }
}
