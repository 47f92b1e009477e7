use crate::arith::field::PrimeField;
use crate::arith::jet::JetScalar;
use crate::error::{Error, Result};
use crate::sections::{mul_raw, JetSection};
use serde::Serialize;
use std::collections::BTreeMap;

/// A homogeneous form with integer coefficients, given by its monomials.
/// Reduced modulo a prime with [`FormSpec::reduce`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormSpec {
    pub name: String,
    pub n: usize,
    pub d: usize,
    pub terms: Vec<(Vec<u32>, i64)>,
}

impl FormSpec {
    pub fn new(name: impl Into<String>, n: usize, d: usize, terms: Vec<(Vec<u32>, i64)>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("degree must be positive".into()));
        }
        for (exps, _) in &terms {
            if exps.len() != n + 1 {
                return Err(Error::InvalidInput(format!(
                    "monomial {exps:?} has {} exponents, expected {}",
                    exps.len(),
                    n + 1
                )));
            }
            let deg: u32 = exps.iter().sum();
            if deg as usize != d {
                return Err(Error::InvalidInput(format!("monomial {exps:?} has degree {deg}, expected {d}")));
            }
        }
        Ok(FormSpec { name: name.into(), n, d, terms })
    }

    /// x_0 x_2 - x_1^2.
    pub fn conic() -> Self {
        FormSpec::new("conic", 2, 2, vec![(vec![1, 0, 1], 1), (vec![0, 2, 0], -1)]).unwrap()
    }

    /// x_0^d + .. + x_n^d.
    pub fn fermat(n: usize, d: usize) -> Self {
        let terms = (0..=n)
            .map(|i| {
                let mut e = vec![0u32; n + 1];
                e[i] = d as u32;
                (e, 1)
            })
            .collect();
        FormSpec::new(format!("fermat_n{n}_d{d}"), n, d, terms).unwrap()
    }

    /// Parses the line format `e_0 .. e_n c`; `#` starts a comment.
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut width: Option<usize> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() < 2 {
                return Err(Error::InvalidInput(format!("line {}: need exponents and a coefficient", lineno + 1)));
            }
            if let Some(w) = width {
                if w != toks.len() {
                    return Err(Error::InvalidInput(format!("line {}: inconsistent number of variables", lineno + 1)));
                }
            }
            width = Some(toks.len());
            let exps = toks[..toks.len() - 1]
                .iter()
                .map(|t| t.parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::InvalidInput(format!("line {}: {e}", lineno + 1)))?;
            let c = toks[toks.len() - 1]
                .parse::<i64>()
                .map_err(|e| Error::InvalidInput(format!("line {}: {e}", lineno + 1)))?;
            terms.push((exps, c));
        }
        let Some(w) = width else {
            return Err(Error::InvalidInput("form file has no monomials".into()));
        };
        let d = terms[0].0.iter().sum::<u32>() as usize;
        FormSpec::new(name, w - 2, d, terms)
    }

    pub fn reduce(&self, field: PrimeField) -> Result<SymmetricForm> {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), field.from_i64(*c))).collect();
        SymmetricForm::from_monomials(field, self.n, self.d, terms, &self.name)
    }
}

/// A degree-d form over F_p in n+1 variables, together with its symmetric
/// coefficient tensor a_{i_1..i_d} (F = sum over all index tuples of
/// a_{i_1..i_d} x_{i_1} .. x_{i_d}).
#[derive(Debug, Clone)]
pub struct SymmetricForm {
    pub field: PrimeField,
    pub n: usize,
    pub d: usize,
    pub name: String,
    monomials: Vec<(Vec<u32>, u32)>,
    tensor: BTreeMap<Vec<usize>, u32>,
    // monomials as (coefficient, variable list with multiplicity)
    mono_vars: Vec<(u32, Vec<usize>)>,
    grad_vars: Vec<Vec<(u32, Vec<usize>)>>,
    d_factorial: u32,
}

fn factorial_mod(f: &PrimeField, k: usize) -> u32 {
    (1..=k as u32).fold(1 % f.p(), |acc, i| f.mul(acc, i))
}

fn vars_of(exps: &[u32]) -> Vec<usize> {
    exps.iter().enumerate().flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize)).collect()
}

impl SymmetricForm {
    pub fn from_monomials(
        field: PrimeField,
        n: usize,
        d: usize,
        terms: Vec<(Vec<u32>, u32)>,
        name: &str,
    ) -> Result<Self> {
        if field.p() as usize <= d {
            return Err(Error::Precondition(format!("need p > d, got p = {}, d = {d}", field.p())));
        }
        let mut merged: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
        for (exps, c) in terms {
            if exps.len() != n + 1 || exps.iter().sum::<u32>() as usize != d {
                return Err(Error::InvalidInput(format!("bad monomial {exps:?}")));
            }
            let slot = merged.entry(exps).or_insert(0);
            *slot = field.add(*slot, c % field.p());
        }
        merged.retain(|_, c| *c != 0);
        if merged.is_empty() {
            return Err(Error::InvalidInput(format!("form vanishes identically mod {}", field.p())));
        }
        let monomials: Vec<(Vec<u32>, u32)> = merged.into_iter().collect();
        let d_fact = factorial_mod(&field, d);
        let d_fact_inv = field.inv(d_fact).unwrap();
        let mut tensor = BTreeMap::new();
        for (exps, c) in &monomials {
            // a monomial with exponents e appears d!/prod(e_i!) times among index tuples
            let denom = exps.iter().fold(1, |acc, &e| field.mul(acc, factorial_mod(&field, e as usize)));
            tensor.insert(vars_of(exps), field.mul(field.mul(*c, denom), d_fact_inv));
        }
        let mono_vars = monomials.iter().map(|(e, c)| (*c, vars_of(e))).collect();
        let grad_vars = (0..=n)
            .map(|j| {
                monomials
                    .iter()
                    .filter(|(e, _)| e[j] > 0)
                    .map(|(e, c)| {
                        let mut e2 = e.clone();
                        e2[j] -= 1;
                        (field.mul(*c, e[j] % field.p()), vars_of(&e2))
                    })
                    .filter(|(c, _)| *c != 0)
                    .collect()
            })
            .collect();
        Ok(SymmetricForm {
            field,
            n,
            d,
            name: name.to_string(),
            monomials,
            tensor,
            mono_vars,
            grad_vars,
            d_factorial: d_fact,
        })
    }

    pub fn monomials(&self) -> &[(Vec<u32>, u32)] {
        &self.monomials
    }

    /// a_{i_1..i_d}, symmetric in its indices.
    pub fn tensor_coeff(&self, idx: &[usize]) -> u32 {
        let mut key = idx.to_vec();
        key.sort_unstable();
        self.tensor.get(&key).copied().unwrap_or(0)
    }

    pub fn d_factorial(&self) -> u32 {
        self.d_factorial
    }

    pub(crate) fn grad_terms(&self, j: usize) -> &[(u32, Vec<usize>)] {
        &self.grad_vars[j]
    }

    pub(crate) fn mono_terms(&self) -> &[(u32, Vec<usize>)] {
        &self.mono_vars
    }

    /// Evaluates F at a point of F_p^{n+1}.
    pub fn eval_point(&self, x: &[u32]) -> u32 {
        let f = &self.field;
        self.mono_vars
            .iter()
            .fold(0, |acc, (c, vars)| f.add(acc, vars.iter().fold(*c, |a, &v| f.mul(a, x[v]))))
    }

    /// Gradient of F at a point of F_p^{n+1}.
    pub fn gradient_point(&self, x: &[u32]) -> Vec<u32> {
        let f = &self.field;
        self.grad_vars
            .iter()
            .map(|terms| {
                terms.iter().fold(0, |acc, (c, vars)| f.add(acc, vars.iter().fold(*c, |a, &v| f.mul(a, x[v]))))
            })
            .collect()
    }
}

/// Scratch buffers for evaluating products of sections without allocation.
pub struct ProductScratch {
    a: Vec<u32>,
    b: Vec<u32>,
}

impl ProductScratch {
    pub fn new(d: usize, e: usize, m: usize) -> Self {
        let cap = (d * e + 1) * (m + 1);
        ProductScratch { a: vec![0; cap], b: vec![0; cap] }
    }
}

/// sum over `terms` of c * prod x_v, for sections of degree e truncated at
/// order m; the result has degree `deg * e` and is written to `out`.
pub(crate) fn eval_terms_raw(
    f: &PrimeField,
    terms: &[(u32, Vec<usize>)],
    deg: usize,
    xs: &[&[u32]],
    e: usize,
    m: usize,
    out: &mut [u32],
    scratch: &mut ProductScratch,
) {
    let wo = deg * e + 1;
    let len = wo * (m + 1);
    out[..len].iter_mut().for_each(|x| *x = 0);
    let p = f.p() as u64;
    for (c, vars) in terms {
        if vars.is_empty() {
            out[0] = f.add(out[0], *c);
            continue;
        }
        // running product in scratch.a with degree cur_r
        let first = xs[vars[0]];
        let w0 = e + 1;
        scratch.a[..w0 * (m + 1)].copy_from_slice(&first[..w0 * (m + 1)]);
        let mut cur_r = e;
        for &v in &vars[1..] {
            let next_r = cur_r + e;
            mul_raw(f, &scratch.a[..(cur_r + 1) * (m + 1)], cur_r, xs[v], e, m, &mut scratch.b[..(next_r + 1) * (m + 1)]);
            std::mem::swap(&mut scratch.a, &mut scratch.b);
            cur_r = next_r;
        }
        debug_assert_eq!(cur_r, deg * e);
        let cc = *c as u64;
        for (o, &v) in out[..len].iter_mut().zip(&scratch.a[..len]) {
            if v != 0 {
                *o = ((*o as u64 + cc * v as u64) % p) as u32;
            }
        }
    }
}

fn check_tuple(form: &SymmetricForm, x: &[JetSection]) -> Result<(usize, usize)> {
    if x.len() != form.n + 1 {
        return Err(Error::InvalidInput(format!("expected {} sections, got {}", form.n + 1, x.len())));
    }
    let (e, m) = (x[0].r, x[0].m);
    for s in x {
        if s.field != form.field {
            return Err(Error::FieldMismatch { left: form.field.p(), right: s.field.p() });
        }
        if s.r != e || s.m != m {
            return Err(Error::InvalidInput("sections in a tuple must share degree and order".into()));
        }
    }
    Ok((e, m))
}

/// F(x) in P_{de,m}.
pub fn eval_form(form: &SymmetricForm, x: &[JetSection]) -> Result<JetSection> {
    let (e, m) = check_tuple(form, x)?;
    let mut out = JetSection::zero(form.field, form.d * e, m);
    let xs: Vec<&[u32]> = x.iter().map(|s| s.data.as_slice()).collect();
    let mut scratch = ProductScratch::new(form.d, e, m);
    eval_terms_raw(&form.field, form.mono_terms(), form.d, &xs, e, m, &mut out.data, &mut scratch);
    Ok(out)
}

/// The partial derivatives of F at x, each in P_{(d-1)e,m}.
pub fn gradient(form: &SymmetricForm, x: &[JetSection]) -> Result<Vec<JetSection>> {
    let (e, m) = check_tuple(form, x)?;
    let xs: Vec<&[u32]> = x.iter().map(|s| s.data.as_slice()).collect();
    let mut scratch = ProductScratch::new(form.d, e, m);
    Ok((0..=form.n)
        .map(|j| {
            let mut out = JetSection::zero(form.field, (form.d - 1) * e, m);
            eval_terms_raw(&form.field, form.grad_terms(j), form.d - 1, &xs, e, m, &mut out.data, &mut scratch);
            out
        })
        .collect())
}

/// Evaluates F on a point with coordinates in F_p[t]/(t^{m+1}).
pub fn eval_form_jet(form: &SymmetricForm, x: &[JetScalar]) -> Result<JetScalar> {
    let secs: Vec<JetSection> = x
        .iter()
        .map(|j| JetSection::new(form.field, 0, j.m(), j.coeffs.clone()))
        .collect::<Result<_>>()?;
    let v = eval_form(form, &secs)?;
    Ok(JetScalar { field: form.field, coeffs: v.data })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn conic_tensor() {
        let c = FormSpec::conic().reduce(f(5)).unwrap();
        // a_{02} = a_{20} = 1/2, a_{11} = -1
        assert_eq!(c.tensor_coeff(&[2, 0]), 3);
        assert_eq!(c.tensor_coeff(&[1, 1]), 4);
        assert_eq!(c.tensor_coeff(&[0, 0]), 0);
    }

    #[test]
    fn duplicates_merge_and_cancel() {
        let r = SymmetricForm::from_monomials(f(3), 1, 2, vec![(vec![2, 0], 1), (vec![2, 0], 2)], "z");
        assert!(r.is_err());
        let r = SymmetricForm::from_monomials(f(5), 1, 2, vec![(vec![2, 0], 1), (vec![2, 0], 2), (vec![1, 1], 1)], "z")
            .unwrap();
        assert_eq!(r.monomials().len(), 2);
    }

    #[test]
    fn small_prime_is_rejected() {
        assert!(FormSpec::fermat(2, 3).reduce(f(3)).is_err());
        assert!(FormSpec::fermat(2, 3).reduce(f(2)).is_err());
    }

    #[test]
    fn parser_reads_comments_and_negatives() {
        let text = "# the conic\n1 0 1 1\n0 2 0 -1   # minus x1^2\n\n";
        let spec = FormSpec::parse("c", text).unwrap();
        assert_eq!((spec.n, spec.d), (2, 2));
        assert_eq!(spec.terms, FormSpec::conic().terms);
        assert!(FormSpec::parse("bad", "1 1 1\n2 0 0 1\n").is_err());
        assert!(FormSpec::parse("bad", "2 1 1\n1 0 1\n").is_err());
        assert!(FormSpec::parse("empty", "# nothing\n").is_err());
    }

    #[test]
    fn evaluation_of_conic_on_sections() {
        let fp = f(7);
        let c = FormSpec::conic().reduce(fp).unwrap();
        // (1, x, x^2) lies on the conic
        let x = vec![
            JetSection::from_layers(fp, 2, &[vec![1, 0, 0]]).unwrap(),
            JetSection::from_layers(fp, 2, &[vec![0, 1, 0]]).unwrap(),
            JetSection::from_layers(fp, 2, &[vec![0, 0, 1]]).unwrap(),
        ];
        assert!(eval_form(&c, &x).unwrap().is_zero());
        let g = gradient(&c, &x).unwrap();
        assert_eq!(g[0].layer(0), &[0, 0, 1]);
        assert_eq!(g[1].layer(0), &[0, 5, 0]);
        assert_eq!(g[2].layer(0), &[1, 0, 0]);
    }

    #[test]
    fn point_evaluation_matches_section_evaluation() {
        let fp = f(5);
        let c = FormSpec::fermat(2, 3).reduce(fp).unwrap();
        assert_eq!(c.eval_point(&[1, 2, 3]), (1 + 8 + 27) % 5);
        assert_eq!(c.gradient_point(&[1, 2, 3]), vec![3, 12 % 5, 27 % 5]);
    }
}
