//! The exponential sums S(alpha) and S(alpha, beta).
//!
//! S(alpha) only depends on the histogram of F(x) over globally generating
//! x, so all of them at once are a discrete Fourier transform of that
//! histogram over (Z/p)^N, with values in Z[zeta_p].

use crate::arith::cyclo::{psi_m, CyclotomicSum};
use crate::arith::field::PrimeField;
use crate::arith::linalg;
use crate::budget::{pow_big, Budget};
use crate::counting::{tangent_images, CountMode};
use crate::enumerate::{advance, over_all_tuples, upow, Evaluator, LinearPart, TupleLayout};
use crate::error::{Error, Result};
use crate::geometry::form::{eval_form, SymmetricForm};
use crate::sections::{digits, DualFunctional, JetSection};
use num_bigint::BigInt;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Entries of the spectrum table above which we refuse to allocate.
const MAX_TABLE: u64 = 1 << 27;

fn check_alpha(form: &SymmetricForm, e: usize, m: usize, alpha: &DualFunctional) -> Result<()> {
    if alpha.field != form.field {
        return Err(Error::FieldMismatch { left: form.field.p(), right: alpha.field.p() });
    }
    if alpha.r != form.d * e || alpha.m != m {
        return Err(Error::InvalidInput(format!(
            "functional lives on P_{{{},{}}}, expected P_{{{},{}}}",
            alpha.r,
            alpha.m,
            form.d * e,
            m
        )));
    }
    Ok(())
}

/// Weighted counts of F(x) over globally generating x in P_{e,m}^{n+1},
/// indexed by the base-p digits of F(x) in P_{de,m}.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub p: u32,
    pub r: usize,
    pub m: usize,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn dim(&self) -> usize {
        (self.r + 1) * (self.m + 1)
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }
}

fn add_vecs(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

pub fn histogram(form: &SymmetricForm, e: usize, m: usize, mode: CountMode, budget: &Budget) -> Result<Histogram> {
    let p = form.field.p();
    let n1 = form.n + 1;
    let r = form.d * e;
    let dim = (r + 1) * (m + 1);
    let size = upow(p, dim);
    if size > MAX_TABLE {
        return Err(Error::BudgetExceeded { what: "histogram table".into(), required: pow_big(p, dim), ceiling: MAX_TABLE as u128 });
    }
    let layout = TupleLayout::new(n1, e, m);
    let layered = m > 0 && mode != CountMode::Exhaustive;
    let counts = if !layered {
        budget.check_pow("histogram", p, n1 * (e + 1) * (m + 1), 1)?;
        over_all_tuples(
            p,
            layout,
            || (vec![0u64; size as usize], Evaluator::new(form, layout)),
            |(h, ev), buf| {
                if ev.is_gg(buf) {
                    ev.eval(buf);
                    h[index_of(p, &ev.out)] += 1;
                }
            },
            |a, b| (add_vecs(a.0, b.0), a.1),
        )
        .0
    } else {
        budget.check_pow("layered histogram", p, n1 * (e + 1) * m, 1)?;
        let f = form.field;
        let upper = layout.positions(1..m);
        let top_stride = upow(p, (r + 1) * m) as usize;
        crate::enumerate::over_gg_base(
            form,
            layout,
            || vec![0u64; size as usize],
            |h, buf| {
                let lp = LinearPart::new(form, &layout.layer0(buf), e);
                let weight = upow(p, lp.kernel_dim);
                let rank = lp.image.len();
                let mut ev = Evaluator::new(form, layout);
                let mut w = vec![0u32; r + 1];
                let mut coeffs = vec![0u32; rank];
                loop {
                    ev.eval(buf);
                    let low = index_of(p, &ev.out[..(r + 1) * m]);
                    let top = &ev.out[(r + 1) * m..];
                    w.iter_mut().for_each(|c| *c = 0);
                    coeffs.iter_mut().for_each(|c| *c = 0);
                    loop {
                        let mut idx = 0usize;
                        for a in (0..=r).rev() {
                            idx = idx * p as usize + f.add(top[a], w[a]) as usize;
                        }
                        h[low + top_stride * idx] += weight;
                        // odometer over image coordinates; each step adds one basis row
                        let mut i = 0;
                        loop {
                            if i == rank {
                                break;
                            }
                            for (x, &y) in w.iter_mut().zip(&lp.image[i]) {
                                *x = f.add(*x, y);
                            }
                            coeffs[i] += 1;
                            if coeffs[i] < p {
                                break;
                            }
                            coeffs[i] = 0;
                            i += 1;
                        }
                        if i == rank {
                            break;
                        }
                    }
                    if !advance(buf, &upper, p) {
                        break;
                    }
                }
            },
            add_vecs,
        )
    };
    Ok(Histogram { p, r, m, counts })
}

#[inline]
fn index_of(p: u32, data: &[u32]) -> usize {
    data.iter().rev().fold(0usize, |acc, &d| acc * p as usize + d as usize)
}

/// The multi-dimensional transform of a histogram: entry beta holds the
/// coefficients of sum_y H[y] zeta^{<beta, y>}.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub p: u32,
    pub r: usize,
    pub m: usize,
    data: Vec<i64>,
}

impl Spectrum {
    pub fn from_histogram(h: &Histogram) -> Result<Self> {
        let p = h.p as usize;
        let n = h.counts.len();
        if h.total() > (i64::MAX / 2) as u128 {
            return Err(Error::Overflow("spectrum accumulation".into()));
        }
        let mut data = vec![0i64; n * p];
        for (y, &c) in h.counts.iter().enumerate() {
            data[y * p] = c as i64;
        }
        let dims = h.dim();
        let mut stride = 1usize;
        let mut tmp = vec![0i64; p * p];
        for _ in 0..dims {
            let block = stride * p;
            for base in (0..n).step_by(block) {
                for off in 0..stride {
                    let y0 = base + off;
                    tmp.iter_mut().for_each(|x| *x = 0);
                    for a in 0..p {
                        let src = &data[(y0 + a * stride) * p..(y0 + a * stride + 1) * p];
                        if src.iter().all(|&x| x == 0) {
                            continue;
                        }
                        for b in 0..p {
                            let shift = (a * b) % p;
                            let dst = &mut tmp[b * p..(b + 1) * p];
                            for (c, &v) in src.iter().enumerate() {
                                dst[(c + shift) % p] += v;
                            }
                        }
                    }
                    for b in 0..p {
                        data[(y0 + b * stride) * p..(y0 + b * stride + 1) * p].copy_from_slice(&tmp[b * p..(b + 1) * p]);
                    }
                }
            }
            stride = block;
        }
        Ok(Spectrum { p: h.p, r: h.r, m: h.m, data })
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.p as usize
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Coefficient vector at the transformed index beta = alpha'.
    pub fn raw(&self, beta_index: usize) -> &[i64] {
        let p = self.p as usize;
        &self.data[beta_index * p..(beta_index + 1) * p]
    }

    pub fn at_index(&self, beta_index: usize) -> CyclotomicSum {
        CyclotomicSum::from_counts(self.p, self.raw(beta_index))
    }

    /// Index of alpha' for a functional alpha.
    pub fn index_for(&self, alpha: &DualFunctional) -> usize {
        index_of(self.p, &alpha.transformed())
    }

    /// S(alpha).
    pub fn s_alpha(&self, alpha: &DualFunctional) -> CyclotomicSum {
        self.at_index(self.index_for(alpha))
    }
}

/// S_m(alpha) = sum over globally generating x in P_{e,m}^{n+1} of
/// psi_m(alpha(F(x))).
pub fn s_alpha(form: &SymmetricForm, e: usize, m: usize, alpha: &DualFunctional, budget: &Budget) -> Result<CyclotomicSum> {
    check_alpha(form, e, m, alpha)?;
    let h = histogram(form, e, m, CountMode::Auto, budget)?;
    let t = alpha.transformed();
    let f = form.field;
    let mut acc = vec![0i64; f.p() as usize];
    for (y, &c) in h.counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let ds = digits(f.p(), y as u64, h.dim());
        let k = t.iter().zip(&ds).fold(0, |a, (&x, &z)| f.add(a, f.mul(x, z)));
        acc[k as usize] += c as i64;
    }
    Ok(CyclotomicSum::from_counts(f.p(), &acc))
}

/// S_m(alpha) by literal enumeration, applying alpha and the character to
/// every tuple.
pub fn s_alpha_direct(form: &SymmetricForm, e: usize, m: usize, alpha: &DualFunctional, budget: &Budget) -> Result<CyclotomicSum> {
    check_alpha(form, e, m, alpha)?;
    let f = form.field;
    let n1 = form.n + 1;
    let w = (e + 1) * (m + 1);
    budget.check_pow("direct exponential sum", f.p(), n1 * w, 1)?;
    let total = upow(f.p(), n1 * w);
    let mut acc = CyclotomicSum::zero(f.p());
    let one = BigInt::from(1);
    for t in 0..total {
        let ds = digits(f.p(), t, n1 * w);
        let x: Vec<JetSection> = (0..n1).map(|j| JetSection::new(f, e, m, ds[j * w..(j + 1) * w].to_vec()).unwrap()).collect();
        if !crate::sections::globally_generates(&x)? {
            continue;
        }
        let v = eval_form(form, &x)?;
        acc.accumulate(&psi_m(&alpha.apply(&v)?), &one)?;
    }
    Ok(acc)
}

/// Spectra of F(x0) grouped by the image V of x1 -> x1 . grad F(x0); the
/// pair sum is S(alpha, beta) = p^X sum over V with beta' orthogonal to V of
/// the group spectrum at alpha'.
pub struct PairSpectrum {
    pub p: u32,
    pub r: usize,
    pub m: usize,
    /// p^((m+1)(n+1)(e+1)), the size of the x1 space.
    pub x1_weight: BigInt,
    pub groups: Vec<(Vec<Vec<u32>>, Spectrum)>,
}

impl PairSpectrum {
    pub fn build(form: &SymmetricForm, e: usize, m: usize, budget: &Budget) -> Result<Self> {
        let f = form.field;
        let p = f.p();
        let n1 = form.n + 1;
        let r = form.d * e;
        let dim = (r + 1) * (m + 1);
        let size = upow(p, dim);
        if size > MAX_TABLE {
            return Err(Error::BudgetExceeded { what: "pair spectrum".into(), required: pow_big(p, dim), ceiling: MAX_TABLE as u128 });
        }
        budget.check_pow("pair spectrum", p, n1 * (e + 1) * (m + 1), dim as u64)?;
        let layout = TupleLayout::new(n1, e, m);
        type Groups = BTreeMap<Vec<Vec<u32>>, Vec<u64>>;
        let merge = |mut a: Groups, b: Groups| {
            for (k, v) in b {
                match a.get_mut(&k) {
                    Some(x) => {
                        for (s, t) in x.iter_mut().zip(v) {
                            *s += t;
                        }
                    }
                    None => {
                        a.insert(k, v);
                    }
                }
            }
            a
        };
        let groups = over_all_tuples(
            p,
            layout,
            || (Groups::new(), Evaluator::new(form, layout)),
            |(g, ev), buf| {
                if !ev.is_gg(buf) {
                    return;
                }
                ev.eval(buf);
                let key = linalg::row_space(&f, &tangent_images(form, layout, buf));
                let h = g.entry(key).or_insert_with(|| vec![0u64; size as usize]);
                h[index_of(p, &ev.out)] += 1;
            },
            |a, b| (merge(a.0, b.0), a.1),
        )
        .0;
        let groups = groups
            .into_par_iter()
            .map(|(k, counts)| {
                let h = Histogram { p, r, m, counts };
                Spectrum::from_histogram(&h).map(|s| (k, s))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PairSpectrum {
            p,
            r,
            m,
            x1_weight: BigInt::from(pow_big(p, n1 * (e + 1) * (m + 1))),
            groups,
        })
    }

    /// Indices of the groups whose subspace is orthogonal to beta'.
    pub fn groups_for(&self, f: &PrimeField, beta_t: &[u32]) -> Vec<usize> {
        self.groups
            .iter()
            .enumerate()
            .filter(|(_, (basis, _))| {
                basis.iter().all(|row| row.iter().zip(beta_t).fold(0, |a, (&x, &y)| f.add(a, f.mul(x, y))) == 0)
            })
            .map(|(i, _)| i)
            .collect()
    }

    pub fn s_alpha_beta(&self, alpha: &DualFunctional, beta: &DualFunctional) -> CyclotomicSum {
        let f = alpha.field;
        let gs = self.groups_for(&f, &beta.transformed());
        let ai = index_of(self.p, &alpha.transformed());
        let mut acc = vec![0i64; self.p as usize];
        for g in gs {
            for (a, &v) in acc.iter_mut().zip(self.groups[g].1.raw(ai)) {
                *a += v;
            }
        }
        CyclotomicSum::from_counts(self.p, &acc).scale(&self.x1_weight)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSumMode {
    /// Inner x1 sum in closed form.
    Kernel,
    /// Inner x1 sum enumerated.
    Enumerate,
}

/// S_m(alpha, beta) = sum over globally generating x0 and all x1 in
/// P_{e,m}^{n+1} of psi_m(alpha(F(x0)) + beta(x1 . grad F(x0))).
pub fn s_alpha_beta(
    form: &SymmetricForm,
    e: usize,
    m: usize,
    alpha: &DualFunctional,
    beta: &DualFunctional,
    mode: PairSumMode,
    budget: &Budget,
) -> Result<CyclotomicSum> {
    check_alpha(form, e, m, alpha)?;
    check_alpha(form, e, m, beta)?;
    let f = form.field;
    let p = f.p();
    let n1 = form.n + 1;
    let dim_x = n1 * (e + 1) * (m + 1);
    let layout = TupleLayout::new(n1, e, m);
    let at = alpha.transformed();
    let bt = beta.transformed();
    let dot = |a: &[u32], b: &[u32]| a.iter().zip(b).fold(0, |s, (&x, &y)| f.add(s, f.mul(x, y)));
    match mode {
        PairSumMode::Kernel => {
            budget.check_pow("pair exponential sum", p, dim_x, 1)?;
            let counts = over_all_tuples(
                p,
                layout,
                || (vec![0i64; p as usize], Evaluator::new(form, layout)),
                |(acc, ev), buf| {
                    if !ev.is_gg(buf) {
                        return;
                    }
                    let images = tangent_images(form, layout, buf);
                    if images.iter().all(|v| dot(&bt, v) == 0) {
                        ev.eval(buf);
                        acc[dot(&at, &ev.out) as usize] += 1;
                    }
                },
                |mut a, b| {
                    for (x, y) in a.0.iter_mut().zip(b.0) {
                        *x += y;
                    }
                    a
                },
            )
            .0;
            Ok(CyclotomicSum::from_counts(p, &counts).scale(&BigInt::from(pow_big(p, dim_x))))
        }
        PairSumMode::Enumerate => {
            budget.check_pow("pair exponential sum enumeration", p, 2 * dim_x, 1)?;
            let all: Vec<usize> = (0..dim_x).collect();
            let counts = over_all_tuples(
                p,
                layout,
                || (vec![0i64; p as usize], Evaluator::new(form, layout)),
                |(acc, ev), buf| {
                    if !ev.is_gg(buf) {
                        return;
                    }
                    ev.eval(buf);
                    let a = dot(&at, &ev.out);
                    let images = tangent_images(form, layout, buf);
                    let mut x1 = vec![0u32; dim_x];
                    loop {
                        // beta(x1 . grad F(x0)) via the images of the basis vectors
                        let mut b = 0;
                        for (c, v) in x1.iter().zip(&images) {
                            if *c != 0 {
                                b = f.add(b, f.mul(*c, dot(&bt, v)));
                            }
                        }
                        acc[f.add(a, b) as usize] += 1;
                        if !advance(&mut x1, &all, p) {
                            break;
                        }
                    }
                },
                |mut a, b| {
                    for (x, y) in a.0.iter_mut().zip(b.0) {
                        *x += y;
                    }
                    a
                },
            )
            .0;
            Ok(CyclotomicSum::from_counts(p, &counts))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TMode {
    ClosedForm,
    Enumerate,
}

/// T(alpha_0) at y: sum over z in P_e^{n+1} of psi(alpha_0(z . grad F(y mod t))).
pub fn t_major(form: &SymmetricForm, e: usize, alpha0: &DualFunctional, y: &[JetSection], mode: TMode) -> Result<CyclotomicSum> {
    if alpha0.r != form.d * e {
        return Err(Error::InvalidInput("alpha_0 must be a functional on P_de".into()));
    }
    if y.len() != form.n + 1 || y.iter().any(|s| s.r != e) {
        return Err(Error::InvalidInput("y must be a tuple of n+1 sections of degree e".into()));
    }
    if !crate::sections::globally_generates(y)? {
        return Err(Error::Precondition("y is not globally generating mod t".into()));
    }
    let f = form.field;
    let p = f.p();
    let y0: Vec<&[u32]> = y.iter().map(|s| s.layer(0)).collect();
    let lp = LinearPart::new(form, &y0, e);
    let a0 = alpha0.layer(0);
    let dot = |v: &[u32]| v.iter().zip(a0).fold(0, |s, (&x, &c)| f.add(s, f.mul(x, c)));
    let functional: Vec<u32> = lp.cols.iter().map(|c| dot(c)).collect();
    let dim = functional.len();
    match mode {
        TMode::ClosedForm => {
            if functional.iter().all(|&c| c == 0) {
                Ok(CyclotomicSum::from_integer(p, BigInt::from(pow_big(p, dim))))
            } else {
                Ok(CyclotomicSum::zero(p))
            }
        }
        TMode::Enumerate => {
            let mut counts = vec![0i64; p as usize];
            let mut z = vec![0u32; dim];
            let all: Vec<usize> = (0..dim).collect();
            loop {
                let k = z.iter().zip(&functional).fold(0, |s, (&x, &c)| f.add(s, f.mul(x, c)));
                counts[k as usize] += 1;
                if !advance(&mut z, &all, p) {
                    break;
                }
            }
            Ok(CyclotomicSum::from_counts(p, &counts))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::form::FormSpec;

    fn conic(p: u32) -> SymmetricForm {
        FormSpec::conic().reduce(PrimeField::new(p).unwrap()).unwrap()
    }

    #[test]
    fn spectrum_matches_literal_sum() {
        let c = conic(3);
        let b = Budget::default();
        let h = histogram(&c, 2, 0, CountMode::Exhaustive, &b).unwrap();
        let spec = Spectrum::from_histogram(&h).unwrap();
        for idx in [0u64, 1, 5, 77, 121, 242] {
            let a = DualFunctional::from_index(c.field, 4, 0, idx);
            assert_eq!(spec.s_alpha(&a), s_alpha_direct(&c, 2, 0, &a, &b).unwrap(), "alpha {idx}");
        }
    }

    #[test]
    fn jet_spectrum_matches_literal_sum() {
        let c = conic(3);
        let b = Budget::default();
        for idx in [0u64, 3, 400, 728] {
            let a = DualFunctional::from_index(c.field, 2, 1, idx);
            assert_eq!(s_alpha(&c, 1, 1, &a, &b).unwrap(), s_alpha_direct(&c, 1, 1, &a, &b).unwrap());
        }
    }

    #[test]
    fn layered_histogram_matches_exhaustive() {
        let c = conic(3);
        let b = Budget::default();
        let x = histogram(&c, 1, 1, CountMode::Exhaustive, &b).unwrap();
        let y = histogram(&c, 1, 1, CountMode::Layered, &b).unwrap();
        assert_eq!(x.counts, y.counts);
    }

    #[test]
    fn zero_alpha_counts_generating_tuples() {
        let c = conic(3);
        let b = Budget::default();
        let z = DualFunctional::zero(c.field, 4, 0);
        let h = histogram(&c, 2, 0, CountMode::Exhaustive, &b).unwrap();
        assert_eq!(s_alpha(&c, 2, 0, &z, &b).unwrap().as_integer(), Some(BigInt::from(h.total())));
    }

    #[test]
    fn pair_sum_modes_agree() {
        let c = conic(3);
        let b = Budget::default();
        let ps = PairSpectrum::build(&c, 1, 0, &b).unwrap();
        for (ai, bi) in [(0u64, 0u64), (4, 0), (0, 7), (13, 22), (26, 9)] {
            let a = DualFunctional::from_index(c.field, 2, 0, ai);
            let be = DualFunctional::from_index(c.field, 2, 0, bi);
            let k = s_alpha_beta(&c, 1, 0, &a, &be, PairSumMode::Kernel, &b).unwrap();
            let n = s_alpha_beta(&c, 1, 0, &a, &be, PairSumMode::Enumerate, &b).unwrap();
            assert_eq!(k, n);
            assert_eq!(ps.s_alpha_beta(&a, &be), k);
        }
    }

    #[test]
    fn pair_sum_with_zero_beta() {
        let c = conic(3);
        let b = Budget::default();
        let a = DualFunctional::from_index(c.field, 2, 0, 11);
        let z = DualFunctional::zero(c.field, 2, 0);
        let pair = s_alpha_beta(&c, 1, 0, &a, &z, PairSumMode::Kernel, &b).unwrap();
        let single = s_alpha(&c, 1, 0, &a, &b).unwrap();
        assert_eq!(pair, single.scale(&BigInt::from(pow_big(3, 6))));
    }

    #[test]
    fn t_closed_form_matches_enumeration() {
        let c = conic(3);
        let f = c.field;
        let y = vec![
            JetSection::new(f, 2, 0, vec![1, 0, 0]).unwrap(),
            JetSection::new(f, 2, 0, vec![0, 1, 0]).unwrap(),
            JetSection::new(f, 2, 0, vec![0, 0, 1]).unwrap(),
        ];
        for idx in 0..243u64 {
            let a = DualFunctional::from_index(f, 4, 0, idx);
            let x = t_major(&c, 2, &a, &y, TMode::ClosedForm).unwrap();
            let z = t_major(&c, 2, &a, &y, TMode::Enumerate).unwrap();
            assert_eq!(x, z);
            assert_eq!(x.is_zero(), idx != 0);
        }
    }

    #[test]
    fn t_rejects_non_generating() {
        let c = conic(3);
        let f = c.field;
        let y = vec![JetSection::zero(f, 2, 0), JetSection::zero(f, 2, 0), JetSection::new(f, 2, 0, vec![0, 0, 1]).unwrap()];
        let a = DualFunctional::zero(f, 4, 0);
        assert!(matches!(t_major(&c, 2, &a, &y, TMode::ClosedForm), Err(Error::Precondition(_))));
    }
}
