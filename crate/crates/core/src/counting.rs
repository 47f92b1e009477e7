//! Exact counts of points on jet spaces of the space of rational curves of
//! degree e on a hypersurface, and of the zero loci of the multilinear
//! forms Psi_j.

use crate::arith::field::PrimeField;
use crate::arith::linalg;
use crate::budget::{pow_big, Budget};
use crate::enumerate::{advance, over_all_tuples, over_gg_base, upow, Evaluator, LinearPart, TupleLayout};
use crate::error::{Error, Result};
use crate::geometry::form::{FormSpec, SymmetricForm};
use crate::geometry::multilinear::multilinear_psi;
use crate::sections::{digits, mul_raw, JetSection};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMode {
    /// Layered for m >= 1, exhaustive for m = 0.
    Auto,
    /// Every tuple is evaluated.
    Exhaustive,
    /// Top layer handled by linear algebra.
    Layered,
}

fn resolve(mode: CountMode, m: usize) -> CountMode {
    match (mode, m) {
        (_, 0) => CountMode::Exhaustive,
        (CountMode::Auto, _) => CountMode::Layered,
        (x, _) => x,
    }
}

fn check_e(e: usize) -> Result<()> {
    if e == 0 {
        Err(Error::Precondition("curve degree e must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Walks the top-layer-free tuples y (layers 0..m-1, y0 globally
/// generating) and calls `visit(buf, F(y), linear part at y0)`.
fn over_layered<T, V>(form: &SymmetricForm, e: usize, m: usize, init: impl Fn() -> T + Sync + Send, visit: V, combine: impl Fn(T, T) -> T + Sync + Send) -> T
where
    T: Send,
    V: Fn(&mut T, &[u32], &[u32], &LinearPart) + Sync + Send,
{
    let layout = TupleLayout::new(form.n + 1, e, m);
    let p = form.field.p();
    let upper = layout.positions(1..m);
    over_gg_base(
        form,
        layout,
        init,
        |acc, buf| {
            let lp = LinearPart::new(form, &layout.layer0(buf), e);
            let mut ev = Evaluator::new(form, layout);
            loop {
                ev.eval(buf);
                visit(acc, buf, &ev.out, &lp);
                if !advance(buf, &upper, p) {
                    break;
                }
            }
        },
        combine,
    )
}

/// #M_m: tuples x in P_{e,m}^{n+1}, globally generating mod t, with
/// F(x) = 0 mod t^{m+1}.
pub fn count_mm(form: &SymmetricForm, e: usize, m: usize, mode: CountMode, budget: &Budget) -> Result<BigUint> {
    check_e(e)?;
    let p = form.field.p();
    let n1 = form.n + 1;
    let de1 = form.d * e + 1;
    match resolve(mode, m) {
        CountMode::Exhaustive => {
            budget.check_pow("exhaustive count", p, n1 * (e + 1) * (m + 1), 1)?;
            let layout = TupleLayout::new(n1, e, m);
            let total = over_all_tuples(
                p,
                layout,
                || (0u128, Evaluator::new(form, layout)),
                |(acc, ev), buf| {
                    ev.eval(buf);
                    if ev.out.iter().all(|&c| c == 0) && ev.is_gg(buf) {
                        *acc += 1;
                    }
                },
                |a, b| (a.0 + b.0, a.1),
            );
            Ok(BigUint::from(total.0))
        }
        _ => {
            budget.check_pow("layered count", p, n1 * (e + 1) * m, 1)?;
            let total = over_layered(
                form,
                e,
                m,
                || 0u128,
                |acc, _buf, out, lp| {
                    if out[..de1 * m].iter().all(|&c| c == 0) && lp.contains(&form.field, &out[de1 * m..]) {
                        *acc += upow(p, lp.kernel_dim) as u128;
                    }
                },
                |a, b| a + b,
            );
            Ok(BigUint::from(total))
        }
    }
}

/// Calls `visit` on every point of M_m (tuple buffers of P_{e,m}^{n+1}).
pub(crate) fn for_each_solution<T: Send>(
    form: &SymmetricForm,
    e: usize,
    m: usize,
    init: impl Fn() -> T + Sync + Send,
    visit: impl Fn(&mut T, &[u32]) + Sync + Send,
    combine: impl Fn(T, T) -> T + Sync + Send,
) -> T {
    let f = form.field;
    let p = f.p();
    let layout = TupleLayout::new(form.n + 1, e, m);
    let de1 = form.d * e + 1;
    if m == 0 {
        return over_all_tuples(
            p,
            layout,
            || (init(), Evaluator::new(form, layout)),
            |(acc, ev), buf| {
                ev.eval(buf);
                if ev.out.iter().all(|&c| c == 0) && ev.is_gg(buf) {
                    visit(acc, buf);
                }
            },
            |a, b| (combine(a.0, b.0), a.1),
        )
        .0;
    }
    let top: Vec<usize> = (0..layout.n1).flat_map(|j| (0..=e).map(move |a| layout.pos(j, m, a))).collect();
    over_layered(
        form,
        e,
        m,
        init,
        |acc, buf, out, lp| {
            if !out[..de1 * m].iter().all(|&c| c == 0) {
                return;
            }
            let target: Vec<u32> = out[de1 * m..].iter().map(|&c| f.neg(c)).collect();
            let Some(z0) = linalg::solve_columns(&f, &lp.cols, &target) else {
                return;
            };
            let col_rows: Vec<Vec<u32>> =
                (0..de1).map(|r| lp.cols.iter().map(|c| c[r]).collect()).collect();
            let kernel = linalg::nullspace(&f, &col_rows, lp.cols.len());
            let mut x = buf.to_vec();
            let mut coeffs = vec![0u32; kernel.len()];
            loop {
                for (i, &pos) in top.iter().enumerate() {
                    let mut v = z0[i];
                    for (c, kv) in coeffs.iter().zip(&kernel) {
                        v = f.add(v, f.mul(*c, kv[i]));
                    }
                    x[pos] = v;
                }
                visit(acc, &x);
                let all: Vec<usize> = (0..coeffs.len()).collect();
                if !advance(&mut coeffs, &all, p) {
                    break;
                }
            }
        },
        combine,
    )
}

/// Gradient of F at a tuple in P_{e,m}^{n+1}, each entry in P_{(d-1)e,m}.
pub(crate) fn gradient_raw(form: &SymmetricForm, layout: TupleLayout, buf: &[u32]) -> Vec<Vec<u32>> {
    let e = layout.e;
    let m = layout.m;
    let r = (form.d - 1) * e;
    let mut scratch = crate::geometry::form::ProductScratch::new(form.d, e, m);
    let xs = layout.sections(buf);
    (0..=form.n)
        .map(|j| {
            let mut out = vec![0u32; (r + 1) * (m + 1)];
            crate::geometry::form::eval_terms_raw(&form.field, form.grad_terms(j), form.d - 1, &xs, e, m, &mut out, &mut scratch);
            out
        })
        .collect()
}

/// Images of the basis vectors x^a t^l e_j under x1 -> x1 . grad F(x0),
/// as vectors of P_{de,m}.
pub(crate) fn tangent_images(form: &SymmetricForm, layout: TupleLayout, x0: &[u32]) -> Vec<Vec<u32>> {
    let e = layout.e;
    let m = layout.m;
    let r = (form.d - 1) * e;
    let de1 = form.d * e + 1;
    let grads = gradient_raw(form, layout, x0);
    let mut rows = Vec::with_capacity(layout.len());
    for g in &grads {
        for l in 0..=m {
            for a in 0..=e {
                let mut v = vec![0u32; de1 * (m + 1)];
                for lg in 0..=m - l {
                    for c in 0..=r {
                        v[(lg + l) * de1 + c + a] = g[lg * (r + 1) + c];
                    }
                }
                rows.push(v);
            }
        }
    }
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairMode {
    /// The x1 count is p^(dim kernel).
    Kernel,
    /// Every x1 is tried.
    Enumerate,
}

/// #M_{1,m}: pairs (x0, x1) with x0 in M_m and x1 . grad F(x0) = 0 in
/// P_{de,m}.
pub fn count_m1m(form: &SymmetricForm, e: usize, m: usize, mode: PairMode, budget: &Budget) -> Result<BigUint> {
    check_e(e)?;
    let f = form.field;
    let p = f.p();
    let n1 = form.n + 1;
    let dim = n1 * (e + 1) * (m + 1);
    let base = if m == 0 { dim } else { n1 * (e + 1) * m };
    let layout = TupleLayout::new(n1, e, m);
    match mode {
        PairMode::Kernel => {
            budget.check_pow("pair count", p, base, 1)?;
            let total = for_each_solution(
                form,
                e,
                m,
                BigUint::zero,
                |acc, x0| {
                    let rows = tangent_images(form, layout, x0);
                    let rank = linalg::rank(&f, &rows);
                    *acc += pow_big(p, dim - rank);
                },
                |a, b| a + b,
            );
            Ok(total)
        }
        PairMode::Enumerate => {
            budget.check_pow("pair enumeration", p, base + dim, 1)?;
            let de1 = form.d * e + 1;
            let all: Vec<usize> = (0..dim).collect();
            let total = for_each_solution(
                form,
                e,
                m,
                || 0u128,
                |acc, x0| {
                    let grads = gradient_raw(form, layout, x0);
                    let r = (form.d - 1) * e;
                    let mut x1 = vec![0u32; dim];
                    let mut prod = vec![0u32; de1 * (m + 1)];
                    let mut sum = vec![0u32; de1 * (m + 1)];
                    loop {
                        sum.iter_mut().for_each(|c| *c = 0);
                        for (j, g) in grads.iter().enumerate() {
                            mul_raw(&f, &x1[j * (e + 1) * (m + 1)..(j + 1) * (e + 1) * (m + 1)], e, g, r, m, &mut prod);
                            for (s, &v) in sum.iter_mut().zip(&prod) {
                                *s = f.add(*s, v);
                            }
                        }
                        if sum.iter().all(|&c| c == 0) {
                            *acc += 1;
                        }
                        if !advance(&mut x1, &all, p) {
                            break;
                        }
                    }
                },
                |a, b| a + b,
            );
            Ok(BigUint::from(total))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountKind {
    Mm,
    M1m,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountParams {
    pub p: u32,
    pub n: usize,
    pub d: usize,
    pub e: usize,
    pub m: usize,
    pub form: String,
    pub kind: CountKind,
}

/// A count with its normalisation raw / p^exponent, where the exponent is
/// the expected dimension (m+1)(mu+1), doubled for pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountRecord {
    pub params: CountParams,
    pub raw_count: BigUint,
    pub normalized: BigRational,
    pub exponent: i64,
}

impl Serialize for CountRecord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CountRecord", 4)?;
        st.serialize_field("params", &self.params)?;
        st.serialize_field("raw_count", &self.raw_count.to_string())?;
        st.serialize_field("normalized", &format!("{}/{}", self.normalized.numer(), self.normalized.denom()))?;
        st.serialize_field("exponent", &self.exponent)?;
        st.end()
    }
}

/// The expected dimension exponent for genus-zero curves:
/// (m+1)((n+1)(e+1) - (de+1)), doubled for pairs.
pub fn expected_exponent(n: usize, d: usize, e: usize, m: usize, kind: CountKind) -> i64 {
    let mu_plus_1 = ((n + 1) * (e + 1)) as i64 - (d * e + 1) as i64;
    let single = (m as i64 + 1) * mu_plus_1;
    match kind {
        CountKind::Mm => single,
        CountKind::M1m => 2 * single,
    }
}

pub fn normalize(raw: &BigUint, p: u32, exponent: i64) -> BigRational {
    let num = BigInt::from(raw.clone());
    let pe = BigInt::from(pow_big(p, exponent.unsigned_abs() as usize));
    if exponent >= 0 {
        BigRational::new(num, pe)
    } else {
        BigRational::from_integer(num * pe)
    }
}

pub fn count_record(
    form: &SymmetricForm,
    e: usize,
    m: usize,
    kind: CountKind,
    mode: CountMode,
    budget: &Budget,
) -> Result<CountRecord> {
    let raw = match kind {
        CountKind::Mm => count_mm(form, e, m, mode, budget)?,
        CountKind::M1m => count_m1m(form, e, m, PairMode::Kernel, budget)?,
    };
    let exponent = expected_exponent(form.n, form.d, e, m, kind);
    Ok(CountRecord {
        params: CountParams { p: form.field.p(), n: form.n, d: form.d, e, m, form: form.name.clone(), kind },
        normalized: normalize(&raw, form.field.p(), exponent),
        raw_count: raw,
        exponent,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TrendReport {
    pub records: Vec<CountRecord>,
    /// |normalized - 1| for each prime, as decimal strings.
    pub distance_to_one: Vec<String>,
    /// Whether the distances are non-increasing along the prime list.
    pub monotone_toward_one: bool,
}

/// Normalised counts over a list of primes, to watch them approach 1.
pub fn lw_trend(
    spec: &FormSpec,
    e: usize,
    m: usize,
    primes: &[u32],
    kind: CountKind,
    budget: &Budget,
) -> Result<TrendReport> {
    let mut records = Vec::new();
    for &p in primes {
        let form = spec.reduce(PrimeField::new(p)?)?;
        records.push(count_record(&form, e, m, kind, CountMode::Auto, budget)?);
    }
    let one = BigRational::one();
    let dists: Vec<BigRational> = records.iter().map(|r| (&r.normalized - &one).abs()).collect();
    let monotone = dists.windows(2).all(|w| w[1] <= w[0]);
    Ok(TrendReport {
        distance_to_one: dists.iter().map(|d| format!("{:.6}", d.to_f64().unwrap_or(f64::NAN))).collect(),
        records,
        monotone_toward_one: monotone,
    })
}

/// Coefficients c[j][i] in P_{(d-2)r0,k} with
/// Psi_j(u^(1), .., u^(d-2), y) = sum_i c[j][i] y_i.
pub(crate) fn psi_partial_coeffs(form: &SymmetricForm, first: &[Vec<&[u32]>], r0: usize, k: usize) -> Vec<Vec<Vec<u32>>> {
    let f = form.field;
    let n1 = form.n + 1;
    let nd = form.d - 2;
    let rc = nd * r0;
    let len_c = (rc + 1) * (k + 1);
    let df = form.d_factorial();
    let mut out = vec![vec![vec![0u32; len_c]; n1]; n1];
    let mut idx = vec![0usize; form.d];
    let total = n1.pow(nd as u32);
    let mut prod_a = vec![0u32; len_c];
    let mut prod_b = vec![0u32; len_c];
    for t in 0..total {
        let mut rest = t;
        for slot in idx.iter_mut().take(nd) {
            *slot = rest % n1;
            rest /= n1;
        }
        // product u^(1)_{i1} .. u^(d-2)_{i_{d-2}}
        prod_a.iter_mut().for_each(|c| *c = 0);
        prod_a[0] = 1;
        let mut cur_r = 0;
        for s in 0..nd {
            let next = cur_r + r0;
            mul_raw(&f, &prod_a[..(cur_r + 1) * (k + 1)], cur_r, first[s][idx[s]], r0, k, &mut prod_b[..(next + 1) * (k + 1)]);
            std::mem::swap(&mut prod_a, &mut prod_b);
            cur_r = next;
        }
        if prod_a.iter().all(|&c| c == 0) {
            continue;
        }
        for i in 0..n1 {
            for j in 0..n1 {
                idx[nd] = i;
                idx[nd + 1] = j;
                let a = form.tensor_coeff(&idx);
                if a == 0 {
                    continue;
                }
                let c = f.mul(a, df);
                for (o, &v) in out[j][i].iter_mut().zip(&prod_a) {
                    *o = f.add(*o, f.mul(c, v));
                }
            }
        }
    }
    out
}

/// Images of the basis vectors of P_{r0,k}^{n+1} under
/// y -> (sum_i c[j][i] y_i)_j, each a concatenation over j of elements of
/// P_{(d-1)r0,k}.
pub(crate) fn psi_map_rows(coeffs: &[Vec<Vec<u32>>], rc: usize, r0: usize, k: usize) -> Vec<Vec<u32>> {
    let n1 = coeffs.len();
    let ro = rc + r0;
    let wo = ro + 1;
    let block = wo * (k + 1);
    let mut rows = Vec::with_capacity(n1 * (r0 + 1) * (k + 1));
    for i in 0..n1 {
        for l in 0..=k {
            for a in 0..=r0 {
                let mut v = vec![0u32; n1 * block];
                for (j, cj) in coeffs.iter().enumerate() {
                    let c = &cj[i];
                    for lc in 0..=k - l {
                        for dc in 0..=rc {
                            v[j * block + (lc + l) * wo + dc + a] = c[lc * (rc + 1) + dc];
                        }
                    }
                }
                rows.push(v);
            }
        }
    }
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiMode {
    /// Enumerate d-2 arguments, count the last by its kernel.
    Kernel,
    /// Enumerate every argument.
    Enumerate,
}

/// Number of (d-1)-tuples in P_{r0,k}^{n+1} on which every Psi_j vanishes
/// (as an element of P_{(d-1)r0,k}).
fn psi_zero_count(form: &SymmetricForm, r0: usize, k: usize, mode: PsiMode, budget: &Budget) -> Result<BigUint> {
    let f = form.field;
    let p = f.p();
    let n1 = form.n + 1;
    let arg_dim = n1 * (r0 + 1) * (k + 1);
    let nd = form.d - 2;
    let w = (r0 + 1) * (k + 1);
    match mode {
        PsiMode::Kernel => {
            budget.check_pow("Psi zero count", p, nd * arg_dim, arg_dim as u64)?;
            let total = upow(p, nd * arg_dim);
            let mut acc = BigUint::zero();
            let mut buf = vec![0u32; nd * arg_dim];
            let all: Vec<usize> = (0..buf.len()).collect();
            for _ in 0..total {
                let first: Vec<Vec<&[u32]>> = (0..nd)
                    .map(|s| (0..n1).map(|i| &buf[s * arg_dim + i * w..s * arg_dim + (i + 1) * w]).collect())
                    .collect();
                let coeffs = psi_partial_coeffs(form, &first, r0, k);
                let rows = psi_map_rows(&coeffs, nd * r0, r0, k);
                let rank = linalg::rank(&f, &rows);
                acc += pow_big(p, arg_dim - rank);
                advance(&mut buf, &all, p);
            }
            Ok(acc)
        }
        PsiMode::Enumerate => {
            budget.check_pow("Psi zero enumeration", p, (form.d - 1) * arg_dim, 1)?;
            let total = upow(p, (form.d - 1) * arg_dim);
            let mut count = 0u64;
            for t in 0..total {
                let ds = digits(p, t, (form.d - 1) * arg_dim);
                let args: Vec<Vec<JetSection>> = (0..form.d - 1)
                    .map(|s| {
                        (0..n1)
                            .map(|i| {
                                let off = s * arg_dim + i * w;
                                JetSection::new(f, r0, k, ds[off..off + w].to_vec()).unwrap()
                            })
                            .collect()
                    })
                    .collect();
                let mut zero = true;
                for j in 0..n1 {
                    if let Some(v) = multilinear_psi(form, j, &args)? {
                        if !v.is_zero() {
                            zero = false;
                            break;
                        }
                    }
                }
                if zero {
                    count += 1;
                }
            }
            Ok(BigUint::from(count))
        }
    }
}

/// Tuples (x^(1), .., x^(d-1)) over (F_p[t]/t^{k+1})^{n+1} with
/// Psi_j(x^(1), .., x^(d-1)) = 0 for all j.
pub fn count_jet_multilinear(form: &SymmetricForm, k: usize, mode: PsiMode, budget: &Budget) -> Result<BigUint> {
    psi_zero_count(form, 0, k, mode, budget)
}

/// Tuples in (P_{e-s,k}^{n+1})^{d-1} on which every Psi_j vanishes.
pub fn count_psi_zero_sections(
    form: &SymmetricForm,
    e: usize,
    s: usize,
    k: usize,
    mode: PsiMode,
    budget: &Budget,
) -> Result<BigUint> {
    if s > e {
        return Err(Error::Precondition("need s <= e".into()));
    }
    psi_zero_count(form, e - s, k, mode, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conic(p: u32) -> SymmetricForm {
        FormSpec::conic().reduce(PrimeField::new(p).unwrap()).unwrap()
    }

    #[test]
    fn conic_degree_two_counts() {
        let b = Budget::default();
        assert_eq!(count_mm(&conic(3), 2, 0, CountMode::Auto, &b).unwrap(), BigUint::from(48u32));
        assert_eq!(count_mm(&conic(5), 2, 0, CountMode::Auto, &b).unwrap(), BigUint::from(480u32));
    }

    #[test]
    fn odd_degree_on_conic_is_empty() {
        let b = Budget::default();
        assert!(count_mm(&conic(3), 1, 0, CountMode::Auto, &b).unwrap().is_zero());
    }

    #[test]
    fn layered_agrees_with_exhaustive() {
        let b = Budget::default();
        // x0 x3 - x1 x2 contains lines, so degree-one curves exist
        let quadric = FormSpec::new("quadric", 3, 2, vec![(vec![1, 0, 0, 1], 1), (vec![0, 1, 1, 0], -1)])
            .unwrap()
            .reduce(PrimeField::new(3).unwrap())
            .unwrap();
        let a = count_mm(&quadric, 1, 1, CountMode::Exhaustive, &b).unwrap();
        let c = count_mm(&quadric, 1, 1, CountMode::Layered, &b).unwrap();
        assert!(!a.is_zero());
        assert_eq!(a, c);
    }

    #[test]
    fn pair_kernel_agrees_with_enumeration() {
        let b = Budget::default();
        let k = count_m1m(&conic(3), 2, 0, PairMode::Kernel, &b).unwrap();
        let n = count_m1m(&conic(3), 2, 0, PairMode::Enumerate, &b).unwrap();
        assert_eq!(k, n);
        assert_eq!(k, BigUint::from(3888u32));
    }

    #[test]
    fn solutions_enumeration_matches_count() {
        let c = conic(3);
        let b = Budget::default();
        let n = for_each_solution(&c, 1, 2, || 0u64, |a, _| *a += 1, |a, b| a + b);
        assert_eq!(BigUint::from(n), count_mm(&c, 1, 2, CountMode::Layered, &b).unwrap());
    }

    #[test]
    fn budget_refusal() {
        let f = FormSpec::fermat(4, 3).reduce(PrimeField::new(7).unwrap()).unwrap();
        let r = count_mm(&f, 3, 2, CountMode::Auto, &Budget::default());
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn record_serialisation() {
        let r = count_record(&conic(3), 2, 0, CountKind::Mm, CountMode::Auto, &Budget::default()).unwrap();
        assert_eq!(r.exponent, 4);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["raw_count"], "48");
        assert_eq!(v["normalized"], "16/27");
    }

    #[test]
    fn multilinear_kernel_agrees_with_enumeration() {
        let b = Budget::default();
        let fc = FormSpec::fermat(1, 3).reduce(PrimeField::new(5).unwrap()).unwrap();
        for k in 0..=1 {
            assert_eq!(
                count_jet_multilinear(&fc, k, PsiMode::Kernel, &b).unwrap(),
                count_jet_multilinear(&fc, k, PsiMode::Enumerate, &b).unwrap()
            );
        }
        assert_eq!(
            count_psi_zero_sections(&conic(3), 1, 0, 0, PsiMode::Kernel, &b).unwrap(),
            count_psi_zero_sections(&conic(3), 1, 0, 0, PsiMode::Enumerate, &b).unwrap()
        );
    }
}
