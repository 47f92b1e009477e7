//! Counts N^(k1,k2)(alpha), the Weyl differencing inequalities, the
//! shrinking bound and the audit of the vanishing lemma.

use super::expsum::{histogram, PairSpectrum, Spectrum};
use crate::arith::cyclo::CyclotomicSum;
use crate::arith::field::PrimeField;
use crate::arith::interval::CosTable;
use crate::arith::linalg;
use crate::budget::{pow_big, Budget};
use crate::counting::{psi_map_rows, psi_partial_coeffs, CountMode};
use crate::enumerate::upow;
use crate::error::{Error, Result};
use crate::geometry::form::SymmetricForm;
use crate::geometry::multilinear::multilinear_psi_or_zero;
use crate::report::{ratio_string, CheckReport, Verdict};
use crate::sections::{digits, minimal_divisor, mul_sections, DualFunctional, JetSection};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NMode {
    /// Enumerate d-2 arguments; the last one is a kernel.
    Kernel,
    /// Enumerate every tuple and test the definition directly.
    Definition,
}

/// #P_{r,k}^{n+1} raised to `times`, as an exponent of p.
fn tuple_exponent(n1: usize, r: usize, k: usize, times: usize) -> usize {
    n1 * (r + 1) * (k + 1) * times
}

/// N^(k1,k2)(alpha) with shrinking parameter s: (d-1)-tuples in
/// P_{e-s,k1}^{n+1} with alpha(Psi_i(..) y) = 0 mod t^k2 for every i and
/// every y in P_{e+(d-1)s,k2-1}.
#[allow(clippy::too_many_arguments)]
pub fn n_count(
    form: &SymmetricForm,
    e: usize,
    alpha: &DualFunctional,
    k1: usize,
    k2: usize,
    s: usize,
    mode: NMode,
    budget: &Budget,
) -> Result<BigUint> {
    let de = form.d * e;
    if alpha.r != de {
        return Err(Error::InvalidInput(format!("alpha must live on P_{de}")));
    }
    if k1 + 1 < k2 {
        return Err(Error::Precondition("need k1 >= k2 - 1".into()));
    }
    if k2 > alpha.m + 1 {
        return Err(Error::Precondition(format!("alpha has order {}, need at least k2 - 1 = {}", alpha.m, k2 as i64 - 1)));
    }
    if s > e {
        return Err(Error::Precondition("need 0 <= s <= e".into()));
    }
    let p = form.field.p();
    let n1 = form.n + 1;
    let r0 = e - s;
    if k2 == 0 {
        // P_{-1} = {0}: the condition is empty
        return Ok(pow_big(p, tuple_exponent(n1, r0, k1, form.d - 1)));
    }
    let big_k = k2 - 1;
    let a = alpha.truncate(big_k);
    match mode {
        NMode::Kernel => {
            let base = n_kernel(form, e, s, &a, big_k, budget)?;
            Ok(base * pow_big(p, n1 * (r0 + 1) * (k1 - big_k) * (form.d - 1)))
        }
        NMode::Definition => n_definition(form, e, s, &a, k1, big_k, budget),
    }
}

/// N^(k)(alpha) = N^(k,k+1)(alpha).
pub fn n_single(form: &SymmetricForm, e: usize, alpha: &DualFunctional, k: usize, budget: &Budget) -> Result<BigUint> {
    n_count(form, e, alpha, k, k + 1, 0, NMode::Kernel, budget)
}

/// Condition vector of rho in P_{(d-1)r0,K}: entry (a', delta) is
/// sum_{i+lambda=delta} sum_c alpha_{i,c+a'} rho_{lambda,c}; y ranges over a
/// basis x^a' t^l' of P_{rx,K}, and only delta = kappa - l' matters.
fn conditions(f: &PrimeField, alpha: &DualFunctional, rho: &[u32], wo: usize, rx: usize, big_k: usize, out: &mut Vec<u32>) {
    for ap in 0..=rx {
        for delta in 0..=big_k {
            let mut acc = 0;
            for i in 0..=delta {
                let al = alpha.layer(i);
                let lam = delta - i;
                let r = &rho[lam * wo..(lam + 1) * wo];
                for (c, &v) in r.iter().enumerate() {
                    if v != 0 {
                        acc = f.add(acc, f.mul(al[c + ap], v));
                    }
                }
            }
            out.push(acc);
        }
    }
}

fn n_kernel(form: &SymmetricForm, e: usize, s: usize, alpha: &DualFunctional, big_k: usize, budget: &Budget) -> Result<BigUint> {
    let f = form.field;
    let p = f.p();
    let n1 = form.n + 1;
    let nd = form.d - 2;
    let r0 = e - s;
    let rx = e + (form.d - 1) * s;
    let w = (r0 + 1) * (big_k + 1);
    let arg_dim = n1 * w;
    let wo = (form.d - 1) * r0 + 1;
    let block = wo * (big_k + 1);
    budget.check_pow("N count", p, nd * arg_dim, (arg_dim * arg_dim) as u64)?;
    let total = upow(p, nd * arg_dim);
    let acc = (0..total)
        .into_par_iter()
        .fold(BigUint::zero, |mut acc, idx| {
            let buf = digits(p, idx, nd * arg_dim);
            let first: Vec<Vec<&[u32]>> = (0..nd)
                .map(|t| (0..n1).map(|i| &buf[t * arg_dim + i * w..t * arg_dim + (i + 1) * w]).collect())
                .collect();
            let coeffs = psi_partial_coeffs(form, &first, r0, big_k);
            let images = psi_map_rows(&coeffs, nd * r0, r0, big_k);
            let rows: Vec<Vec<u32>> = images
                .iter()
                .map(|img| {
                    let mut v = Vec::with_capacity(n1 * (rx + 1) * (big_k + 1));
                    for j in 0..n1 {
                        conditions(&f, alpha, &img[j * block..(j + 1) * block], wo, rx, big_k, &mut v);
                    }
                    v
                })
                .collect();
            acc += pow_big(p, arg_dim - linalg::rank(&f, &rows));
            acc
        })
        .reduce(BigUint::zero, |a, b| a + b);
    Ok(acc)
}

/// The tuples of (P_{r0,k1}^{n+1})^{d-1} with index `idx`.
fn tuple_from_index(f: PrimeField, n1: usize, d1: usize, r0: usize, k1: usize, idx: u64) -> Vec<Vec<JetSection>> {
    let w = (r0 + 1) * (k1 + 1);
    let ds = digits(f.p(), idx, d1 * n1 * w);
    (0..d1)
        .map(|t| {
            (0..n1)
                .map(|i| {
                    let off = (t * n1 + i) * w;
                    JetSection::new(f, r0, k1, ds[off..off + w].to_vec()).expect("shape")
                })
                .collect()
        })
        .collect()
}

/// Psi_j of a tuple, truncated to order K.
fn psi_values(form: &SymmetricForm, args: &[Vec<JetSection>], big_k: usize) -> Result<Vec<JetSection>> {
    (0..=form.n).map(|j| Ok(multilinear_psi_or_zero(form, j, args)?.truncate(big_k))).collect()
}

fn satisfies_definition(alpha: &DualFunctional, psis: &[JetSection], basis: &[JetSection]) -> Result<bool> {
    for psi in psis {
        for y in basis {
            if !alpha.apply(&mul_sections(psi, y)?)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn monomial_basis(f: PrimeField, r: usize, k: usize) -> Vec<JetSection> {
    let len = (r + 1) * (k + 1);
    (0..len)
        .map(|i| {
            let mut v = vec![0u32; len];
            v[i] = 1;
            JetSection::new(f, r, k, v).expect("shape")
        })
        .collect()
}

fn n_definition(
    form: &SymmetricForm,
    e: usize,
    s: usize,
    alpha: &DualFunctional,
    k1: usize,
    big_k: usize,
    budget: &Budget,
) -> Result<BigUint> {
    let f = form.field;
    let p = f.p();
    let n1 = form.n + 1;
    let d1 = form.d - 1;
    let r0 = e - s;
    let rx = e + d1 * s;
    let exp = tuple_exponent(n1, r0, k1, d1);
    budget.check_pow("N count by definition", p, exp, 1)?;
    let basis = monomial_basis(f, rx, big_k);
    let count = (0..upow(p, exp))
        .into_par_iter()
        .map(|idx| -> Result<u64> {
            let args = tuple_from_index(f, n1, d1, r0, k1, idx);
            let psis = psi_values(form, &args, big_k)?;
            Ok(satisfies_definition(alpha, &psis, &basis)? as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(BigUint::from(count))
}

/// Outcome of comparing |X|^(2^(d-2)) with a rational bound R, decided on
/// W = (X conj X)^(2^(d-2)) against R^2.
struct Comparison {
    verdict: Verdict,
    precision: u32,
    lo: BigRational,
    hi: BigRational,
    tightness: Option<String>,
}

/// CosTables shared across many comparisons, keyed by working precision.
#[derive(Default)]
pub struct TableCache {
    tables: Mutex<HashMap<(u32, u32), Arc<CosTable>>>,
}

impl TableCache {
    fn get(&self, p: u32, bits: u32) -> Arc<CosTable> {
        let key = (p, bits.div_ceil(64) * 64);
        let mut t = self.tables.lock().expect("table cache");
        t.entry(key).or_insert_with(|| Arc::new(CosTable::new(p, key.1))).clone()
    }
}

fn compare_power(x: &CyclotomicSum, exponent: u32, bound: &BigRational, cap: u32, tables: &TableCache) -> Comparison {
    let w = x.mul(&x.conj()).expect("same field").pow(exponent);
    let bound2 = bound * bound;
    let tight = |mid: &BigRational| -> Option<String> {
        if bound2.is_zero() {
            return None;
        }
        (mid / &bound2).to_f64().map(|r| ratio_string(r.max(0.0).sqrt()))
    };
    if let Some(n) = w.as_integer() {
        let v = BigRational::from_integer(n);
        let verdict = if v <= bound2 { Verdict::Holds } else { Verdict::Fails };
        return Comparison { verdict, precision: 0, tightness: tight(&v), lo: v.clone(), hi: v };
    }
    let size: BigInt = w.coeffs().iter().map(|c| c.abs()).sum();
    let mut prec = 64u32.min(cap.max(1));
    loop {
        let table = tables.get(w.p(), prec + 32 + size.bits() as u32);
        let iv = table.real_interval(&w);
        let verdict = match (iv.hi.cmp(&bound2), iv.lo.cmp(&bound2)) {
            (Ordering::Less | Ordering::Equal, _) => Some(Verdict::Holds),
            (_, Ordering::Greater) => Some(Verdict::Fails),
            _ => None,
        };
        if verdict.is_some() || prec >= cap {
            let mid = (&iv.lo + &iv.hi) / BigRational::from_integer(BigInt::from(2));
            return Comparison {
                verdict: verdict.unwrap_or(Verdict::Undecided),
                precision: prec,
                tightness: tight(&mid),
                lo: iv.lo,
                hi: iv.hi,
            };
        }
        prec = (prec * 2).min(cap);
    }
}

fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Precision cap (in bits) for interval comparisons unless overridden.
pub const DEFAULT_PRECISION_CAP: u32 = 256;

/// State for checking the single-sum Weyl inequality at many alpha: the
/// spectrum at order m, cached N counts and cosine tables.
pub struct WeylSetup<'a> {
    form: &'a SymmetricForm,
    e: usize,
    m: usize,
    spectrum: Spectrum,
    precision_cap: u32,
    budget: Budget,
    n_cache: Mutex<HashMap<Vec<u32>, BigUint>>,
    tables: TableCache,
}

fn m_prime(m: usize) -> usize {
    (m + 2) / 2
}

impl<'a> WeylSetup<'a> {
    pub fn new(form: &'a SymmetricForm, e: usize, m: usize, precision_cap: u32, budget: &Budget) -> Result<Self> {
        if m == 0 {
            return Err(Error::Precondition("the Weyl inequality needs m >= 1".into()));
        }
        let spectrum = Spectrum::from_histogram(&histogram(form, e, m, CountMode::Auto, budget)?)?;
        Ok(WeylSetup {
            form,
            e,
            m,
            spectrum,
            precision_cap,
            budget: *budget,
            n_cache: Mutex::new(HashMap::new()),
            tables: TableCache::default(),
        })
    }

    fn n_cached(&self, alpha: &DualFunctional, k: usize) -> Result<BigUint> {
        let key = alpha.truncate(k).data;
        if let Some(v) = self.n_cache.lock().expect("cache").get(&key) {
            return Ok(v.clone());
        }
        let v = n_single(self.form, self.e, alpha, k, &self.budget)?;
        self.n_cache.lock().expect("cache").insert(key, v.clone());
        Ok(v)
    }

    pub fn check(&self, alpha: &DualFunctional) -> Result<CheckReport> {
        let form = self.form;
        let (e, m) = (self.e, self.m);
        if alpha.r != form.d * e || alpha.m != m {
            return Err(Error::InvalidInput("alpha has the wrong shape".into()));
        }
        let p = form.field.p();
        let n1 = form.n + 1;
        let mp = m_prime(m);
        let k = m - mp;
        let exponent = 1u32 << (form.d - 2);
        let s = self.spectrum.s_alpha(alpha);
        let n = self.n_cached(alpha, k)?;
        let total_m = pow_big(p, tuple_exponent(n1, e, m, 1)).pow(exponent);
        let shrink = pow_big(p, tuple_exponent(n1, e, k, form.d - 1));
        let rhs = BigRational::new(BigInt::from(total_m * &n), BigInt::from(shrink));
        let c = compare_power(&s, exponent, &rhs, self.precision_cap, &self.tables);
        Ok(CheckReport {
            check: "weyl".into(),
            params: json!({"p": p, "n": form.n, "d": form.d, "e": e, "m": m, "form": form.name,
                "alpha": alpha.data, "m_prime": mp}),
            lhs: json!({"s_alpha": s.to_json(), "power": exponent,
                "enclosure_squared": [rational_string(&c.lo), rational_string(&c.hi)]}),
            rhs: json!({"bound": rational_string(&rhs), "n_count": n.to_string(), "n_order": k}),
            verdict: c.verdict,
            tightness: c.tightness,
            details: json!({"precision_bits": c.precision}),
        })
    }
}

/// Single-alpha Weyl check.
pub fn check_weyl(form: &SymmetricForm, e: usize, m: usize, alpha: &DualFunctional, precision_cap: u32, budget: &Budget) -> Result<CheckReport> {
    WeylSetup::new(form, e, m, precision_cap, budget)?.check(alpha)
}

/// Pair Weyl check at many (alpha, beta).
pub struct WeylPairSetup<'a> {
    form: &'a SymmetricForm,
    e: usize,
    m: usize,
    spectrum: PairSpectrum,
    precision_cap: u32,
    budget: Budget,
    tables: TableCache,
}

impl<'a> WeylPairSetup<'a> {
    pub fn new(form: &'a SymmetricForm, e: usize, m: usize, precision_cap: u32, budget: &Budget) -> Result<Self> {
        if m == 0 {
            return Err(Error::Precondition("the Weyl inequality needs m >= 1".into()));
        }
        let spectrum = PairSpectrum::build(form, e, m, budget)?;
        Ok(WeylPairSetup { form, e, m, spectrum, precision_cap, budget: *budget, tables: TableCache::default() })
    }

    pub fn check(&self, alpha: &DualFunctional, beta: &DualFunctional) -> Result<CheckReport> {
        let form = self.form;
        let (e, m) = (self.e, self.m);
        for x in [alpha, beta] {
            if x.r != form.d * e || x.m != m {
                return Err(Error::InvalidInput("functional has the wrong shape".into()));
            }
        }
        let p = form.field.p();
        let n1 = form.n + 1;
        let mp = m_prime(m);
        let k = m - mp;
        let exponent = 1u32 << (form.d - 2);
        let s = self.spectrum.s_alpha_beta(alpha, beta);
        let n_alpha = n_single(form, e, alpha, k, &self.budget)?;
        let n_beta = n_single(form, e, beta, m, &self.budget)?;
        let alpha_branch = BigRational::from_integer(BigInt::from(n_alpha.clone()));
        let beta_branch = BigRational::new(
            BigInt::from(n_beta.clone()),
            BigInt::from(pow_big(p, tuple_exponent(n1, e, mp - 1, form.d - 1))),
        );
        let (branch, which) = if beta_branch < alpha_branch { (beta_branch, "beta") } else { (alpha_branch, "alpha") };
        let total = pow_big(p, tuple_exponent(n1, e, m, 2)).pow(exponent);
        let shrink = pow_big(p, tuple_exponent(n1, e, k, form.d - 1));
        let rhs = BigRational::from_integer(BigInt::from(total)) * branch / BigRational::from_integer(BigInt::from(shrink));
        let c = compare_power(&s, exponent, &rhs, self.precision_cap, &self.tables);
        Ok(CheckReport {
            check: "weyl-pair".into(),
            params: json!({"p": p, "n": form.n, "d": form.d, "e": e, "m": m, "form": form.name,
                "alpha": alpha.data, "beta": beta.data, "m_prime": mp}),
            lhs: json!({"s_alpha_beta": s.to_json(), "power": exponent,
                "enclosure_squared": [rational_string(&c.lo), rational_string(&c.hi)]}),
            rhs: json!({"bound": rational_string(&rhs), "n_alpha": n_alpha.to_string(),
                "n_beta": n_beta.to_string(), "min_branch": which}),
            verdict: c.verdict,
            tightness: c.tightness,
            details: json!({"precision_bits": c.precision}),
        })
    }
}

/// Deterministic sample of functionals on P_{r,m}: every alpha whose
/// reduction mod t has degree at most `max_degree`, plus `random` uniform
/// draws from a seeded generator. Sorted by index, without repeats.
pub fn alpha_sample(field: PrimeField, r: usize, m: usize, max_degree: usize, random: usize, seed: u64, budget: &Budget) -> Result<Vec<DualFunctional>> {
    let p = field.p();
    let base = upow(p, r + 1);
    let upper = upow(p, (r + 1) * m);
    let total = base.checked_mul(upper).ok_or_else(|| Error::Overflow("functional count".into()))?;
    let low: Vec<u64> = (0..base)
        .filter(|&i| minimal_divisor(&DualFunctional::from_index(field, r, 0, i), Some(max_degree)).degree <= max_degree)
        .collect();
    budget.check("functional sample", &(BigUint::from(low.len()) * BigUint::from(upper)))?;
    let mut set = BTreeSet::new();
    for &a0 in &low {
        for hi in 0..upper {
            set.insert(a0 + base * hi);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        set.insert(rng.gen_range(0..total));
    }
    Ok(set.into_iter().map(|i| DualFunctional::from_index(field, r, m, i)).collect())
}

/// N^(k)(alpha) <= p^((k+1)(d-1)(n+1)s) N_s^(k)(alpha), in exact integers.
pub fn check_shrink(form: &SymmetricForm, e: usize, alpha: &DualFunctional, k: usize, s: usize, budget: &Budget) -> Result<CheckReport> {
    let p = form.field.p();
    let n1 = form.n + 1;
    let lhs = n_count(form, e, alpha, k, k + 1, 0, NMode::Kernel, budget)?;
    let ns = n_count(form, e, alpha, k, k + 1, s, NMode::Kernel, budget)?;
    let factor = pow_big(p, (k + 1) * (form.d - 1) * n1 * s);
    let rhs = &factor * &ns;
    let verdict = if lhs <= rhs { Verdict::Holds } else { Verdict::Fails };
    let tightness = if rhs.is_zero() {
        None
    } else {
        BigRational::new(BigInt::from(lhs.clone()), BigInt::from(rhs.clone())).to_f64().map(ratio_string)
    };
    Ok(CheckReport {
        check: "shrink".into(),
        params: json!({"p": p, "n": form.n, "d": form.d, "e": e, "k": k, "s": s, "form": form.name,
            "alpha": alpha.data}),
        lhs: json!(lhs.to_string()),
        rhs: json!(rhs.to_string()),
        verdict,
        tightness,
        details: json!({"n_s": ns.to_string(), "factor_exponent": (k + 1) * (form.d - 1) * n1 * s}),
    })
}

/// Least s with s > max((D - e - 2)/(d-1), e - D/(d-1)), for g = 0 and a
/// minimal divisor of degree D. May be negative.
pub fn dioph_threshold(d: usize, e: usize, deg_z: usize) -> i64 {
    let d1 = (d - 1) as i64;
    let (e, dz) = (e as i64, deg_z as i64);
    let a = (dz - e - 2).div_euclid(d1);
    // floor(e - D/(d-1)) = e - ceil(D/(d-1))
    let b = e - (dz + d1 - 1).div_euclid(d1);
    a.max(b) + 1
}

#[derive(Debug, Clone, Serialize)]
pub struct DiophAudit {
    pub divisor_degree: usize,
    pub s: usize,
    pub s_threshold: i64,
    pub k: usize,
    /// Tuples counted by N_s^(k)(alpha).
    pub counted: u64,
    /// Of those, tuples with every Psi_j = 0 mod t^(k+1).
    pub vanish_full: u64,
    /// Of those, tuples with every Psi_j = 0 mod t^k.
    pub vanish_truncated: u64,
    /// Every counted tuple has Psi identically zero as a jet section.
    pub strong_form_holds: bool,
    /// The statement-level conclusion (mod t^k), which is weaker.
    pub weak_form_holds: bool,
}

/// Lists the tuples counted by N_s^(k)(alpha) and checks whether Psi
/// vanishes on each of them.
pub fn dioph_audit(form: &SymmetricForm, e: usize, alpha: &DualFunctional, k: usize, s: usize, budget: &Budget) -> Result<DiophAudit> {
    if k > alpha.m || s > e {
        return Err(Error::Precondition("need k <= order of alpha and s <= e".into()));
    }
    let f = form.field;
    let p = f.p();
    let n1 = form.n + 1;
    let d1 = form.d - 1;
    let r0 = e - s;
    let rx = e + d1 * s;
    let exp = tuple_exponent(n1, r0, k, d1);
    budget.check_pow("vanishing audit", p, exp, 1)?;
    let a = alpha.truncate(k);
    let basis = monomial_basis(f, rx, k);
    let (counted, full, trunc) = (0..upow(p, exp))
        .into_par_iter()
        .map(|idx| -> Result<(u64, u64, u64)> {
            let args = tuple_from_index(f, n1, d1, r0, k, idx);
            let psis = psi_values(form, &args, k)?;
            if !satisfies_definition(&a, &psis, &basis)? {
                return Ok((0, 0, 0));
            }
            let full = psis.iter().all(|x| x.is_zero());
            let trunc = k == 0 || psis.iter().all(|x| x.truncate(k - 1).is_zero());
            Ok((1, full as u64, trunc as u64))
        })
        .try_reduce(|| (0, 0, 0), |x, y| Ok((x.0 + y.0, x.1 + y.1, x.2 + y.2)))?;
    let md = minimal_divisor(&alpha.mod_t(), None);
    Ok(DiophAudit {
        divisor_degree: md.degree,
        s,
        s_threshold: dioph_threshold(form.d, e, md.degree),
        k,
        counted,
        vanish_full: full,
        vanish_truncated: trunc,
        strong_form_holds: full == counted,
        weak_form_holds: trunc == counted,
    })
}

/// Sum of |S(alpha)|^2 over the minor alpha (degree above e+1), exactly
/// in Z[zeta_p] together with a real enclosure. Reported only; no
/// asymptotic claim is attached to it.
pub fn minor_arc_mass(form: &SymmetricForm, e: usize, m: usize, budget: &Budget) -> Result<(CyclotomicSum, crate::arith::interval::RealInterval)> {
    let f = form.field;
    let de = form.d * e;
    let spec = Spectrum::from_histogram(&histogram(form, e, m, CountMode::Auto, budget)?)?;
    let table = super::arcs::MajorTable::new(f, de, e);
    let base = upow(f.p(), de + 1);
    let mut total = CyclotomicSum::zero(f.p());
    for ai in 0..upow(f.p(), (de + 1) * (m + 1)) {
        if table.flags[(ai % base) as usize] {
            continue;
        }
        let s = spec.s_alpha(&DualFunctional::from_index(f, de, m, ai));
        total = total.add(&s.mul(&s.conj())?)?;
    }
    let iv = crate::arith::interval::real_enclosure(&total, 64);
    Ok((total, iv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::form::FormSpec;

    fn conic(p: u32) -> SymmetricForm {
        FormSpec::conic().reduce(PrimeField::new(p).unwrap()).unwrap()
    }

    #[test]
    fn zero_functional_gives_full_space() {
        let c = conic(3);
        let b = Budget::default();
        let z = DualFunctional::zero(c.field, 4, 1);
        for (k1, k2) in [(0, 0), (0, 1), (1, 1), (1, 2)] {
            let n = n_count(&c, 2, &z, k1, k2, 0, NMode::Kernel, &b).unwrap();
            assert_eq!(n, pow_big(3, 3 * 3 * (k1 + 1)));
        }
    }

    #[test]
    fn kernel_matches_definition_and_factorization() {
        let c = conic(3);
        let b = Budget::default();
        let f = c.field;
        for idx in [1u64, 17, 100, 242, 500, 728] {
            let a = DualFunctional::from_index(f, 2, 1, idx);
            for (k1, k2) in [(0, 1), (1, 1), (1, 2), (2, 2), (3, 2)] {
                let kern = n_count(&c, 1, &a, k1, k2, 0, NMode::Kernel, &b).unwrap();
                if k1 <= 1 {
                    let def = n_count(&c, 1, &a, k1, k2, 0, NMode::Definition, &b).unwrap();
                    assert_eq!(kern, def, "alpha {idx} k1 {k1} k2 {k2}");
                }
                let base = n_count(&c, 1, &a, k2 - 1, k2, 0, NMode::Kernel, &b).unwrap();
                assert_eq!(kern, base * pow_big(3, (k1 + 1 - k2) * 3 * 2));
            }
        }
    }

    #[test]
    fn cubic_kernel_matches_definition() {
        let cubic = FormSpec::fermat(1, 3).reduce(PrimeField::new(5).unwrap()).unwrap();
        let b = Budget::default();
        for idx in [0u64, 7, 311, 624] {
            let a = DualFunctional::from_index(cubic.field, 3, 0, idx);
            let kern = n_count(&cubic, 1, &a, 0, 1, 0, NMode::Kernel, &b).unwrap();
            let def = n_count(&cubic, 1, &a, 0, 1, 0, NMode::Definition, &b).unwrap();
            assert_eq!(kern, def);
        }
    }

    #[test]
    fn threshold_examples() {
        // conic, e = 2, degree e + 1: the maximum is -1, so s = 0 suffices
        assert_eq!(dioph_threshold(2, 2, 3), 0);
        assert_eq!(dioph_threshold(3, 4, 6), 2);
    }

    #[test]
    fn shrink_zero_alpha_is_tight() {
        let c = conic(3);
        let z = DualFunctional::zero(c.field, 4, 0);
        let r = check_shrink(&c, 2, &z, 0, 1, &Budget::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.lhs, r.rhs);
    }

    #[test]
    fn weyl_zero_alpha_holds() {
        let c = conic(3);
        let z = DualFunctional::zero(c.field, 4, 1);
        let r = check_weyl(&c, 2, 1, &z, DEFAULT_PRECISION_CAP, &Budget::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn sample_is_deterministic() {
        let f = PrimeField::new(3).unwrap();
        let b = Budget::default();
        let a = alpha_sample(f, 4, 1, 1, 20, 7, &b).unwrap();
        let c = alpha_sample(f, 4, 1, 1, 20, 7, &b).unwrap();
        assert_eq!(a.iter().map(|x| x.index()).collect::<Vec<_>>(), c.iter().map(|x| x.index()).collect::<Vec<_>>());
    }
}
