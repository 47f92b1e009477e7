use super::form::SymmetricForm;
use crate::arith::jet::JetScalar;
use crate::error::{Error, Result};
use crate::sections::{mul_sections, JetSection};

/// The coefficient rings the multilinear forms are evaluated over.
pub trait RingElem: Clone {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, c: u32) -> Self;
    fn is_zero(&self) -> bool;
}

impl RingElem for JetScalar {
    fn add(&self, o: &Self) -> Self {
        JetScalar::add(self, o).expect("matching jets")
    }
    fn sub(&self, o: &Self) -> Self {
        let f = self.field;
        JetScalar { field: f, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(&a, &b)| f.sub(a, b)).collect() }
    }
    fn mul(&self, o: &Self) -> Self {
        JetScalar::mul(self, o).expect("matching jets")
    }
    fn scale(&self, c: u32) -> Self {
        let f = self.field;
        JetScalar { field: f, coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect() }
    }
    fn is_zero(&self) -> bool {
        JetScalar::is_zero(self)
    }
}

impl RingElem for JetSection {
    fn add(&self, o: &Self) -> Self {
        JetSection::add(self, o).expect("matching sections")
    }
    fn sub(&self, o: &Self) -> Self {
        JetSection::sub(self, o).expect("matching sections")
    }
    fn mul(&self, o: &Self) -> Self {
        mul_sections(self, o).expect("matching sections")
    }
    fn scale(&self, c: u32) -> Self {
        JetSection::scale(self, c)
    }
    fn is_zero(&self) -> bool {
        JetSection::is_zero(self)
    }
}

/// Psi_j(x^(1), .., x^(d-1)) = d! sum a_{i_1..i_{d-1} j} x^(1)_{i_1} .. x^(d-1)_{i_{d-1}}.
///
/// Returns `None` when every term vanishes identically (the zero element
/// of the appropriate ring is then the caller's to build).
pub fn multilinear_psi<R: RingElem>(form: &SymmetricForm, j: usize, args: &[Vec<R>]) -> Result<Option<R>> {
    let k = form.d - 1;
    if args.len() != k {
        return Err(Error::InvalidInput(format!("Psi needs {k} arguments, got {}", args.len())));
    }
    if j > form.n || args.iter().any(|a| a.len() != form.n + 1) {
        return Err(Error::InvalidInput("argument tuples must have n+1 entries".into()));
    }
    let f = form.field;
    let n1 = form.n + 1;
    let mut acc: Option<R> = None;
    let mut idx = vec![0usize; k + 1];
    idx[k] = j;
    let total = n1.pow(k as u32);
    for t in 0..total {
        let mut rest = t;
        for slot in idx.iter_mut().take(k) {
            *slot = rest % n1;
            rest /= n1;
        }
        let a = form.tensor_coeff(&idx);
        if a == 0 {
            continue;
        }
        let c = f.mul(a, form.d_factorial());
        let mut term = args[0][idx[0]].clone();
        for (s, arg) in args.iter().enumerate().skip(1) {
            term = term.mul(&arg[idx[s]]);
        }
        let term = term.scale(c);
        acc = Some(match acc {
            None => term,
            Some(x) => x.add(&term),
        });
    }
    Ok(acc)
}

/// Psi_j with a zero fallback built from the first argument's shape.
pub fn multilinear_psi_or_zero(form: &SymmetricForm, j: usize, args: &[Vec<JetSection>]) -> Result<JetSection> {
    if let Some(v) = multilinear_psi(form, j, args)? {
        return Ok(v);
    }
    let r: usize = args.iter().map(|a| a[0].r).sum();
    Ok(JetSection::zero(form.field, r, args[0][0].m))
}

/// Iterated difference operator
/// D_{y_1..y_k} G(x) = sum over subsets S of (-1)^{k-|S|} G(x + sum_{i in S} y_i).
pub fn difference_apply<R, G>(g: &G, ys: &[Vec<R>], x: &[R]) -> R
where
    R: RingElem,
    G: Fn(&[R]) -> R,
{
    let k = ys.len();
    let mut acc: Option<R> = None;
    for mask in 0u64..(1u64 << k) {
        let mut pt: Vec<R> = x.to_vec();
        for (i, y) in ys.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for (c, yc) in pt.iter_mut().zip(y) {
                    *c = c.add(yc);
                }
            }
        }
        let v = g(&pt);
        let negative = (k - mask.count_ones() as usize) % 2 == 1;
        acc = Some(match (acc, negative) {
            (None, false) => v,
            (None, true) => v.scale(0).sub(&v),
            (Some(a), false) => a.add(&v),
            (Some(a), true) => a.sub(&v),
        });
    }
    acc.expect("at least one subset")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::field::PrimeField;
    use crate::geometry::form::{eval_form, gradient, FormSpec};

    #[test]
    fn quadric_psi_is_gradient() {
        let fp = PrimeField::new(5).unwrap();
        let c = FormSpec::conic().reduce(fp).unwrap();
        let y: Vec<JetSection> = (0..3)
            .map(|i| JetSection::from_layers(fp, 1, &[vec![i, 1], vec![2, i]]).unwrap())
            .collect();
        let grad = gradient(&c, &y).unwrap();
        for j in 0..3 {
            let psi = multilinear_psi_or_zero(&c, j, std::slice::from_ref(&y)).unwrap();
            assert_eq!(psi, grad[j]);
        }
    }

    #[test]
    fn full_difference_of_quadric_is_constant() {
        let fp = PrimeField::new(7).unwrap();
        let c = FormSpec::conic().reduce(fp).unwrap();
        let mk = |v: [u32; 3]| -> Vec<JetSection> {
            v.iter().map(|&a| JetSection::from_layers(fp, 1, &[vec![a, 1]]).unwrap()).collect()
        };
        let g = |pt: &[JetSection]| eval_form(&c, pt).unwrap();
        let y1 = mk([1, 2, 3]);
        let y2 = mk([4, 0, 6]);
        let a = difference_apply(&g, &[y1.clone(), y2.clone()], &mk([0, 0, 0]));
        let b = difference_apply(&g, &[y1.clone(), y2.clone()], &mk([5, 3, 1]));
        assert_eq!(a, b);
        // equals sum_j y2_j Psi_j(y1)
        let mut expect = JetSection::zero(fp, 2, 0);
        for j in 0..3 {
            let psi = multilinear_psi_or_zero(&c, j, std::slice::from_ref(&y1)).unwrap();
            expect = expect.add(&mul_sections(&y2[j], &psi).unwrap()).unwrap();
        }
        assert_eq!(a, expect);
    }
}
