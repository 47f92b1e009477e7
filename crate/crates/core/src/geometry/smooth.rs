use super::form::SymmetricForm;
use crate::arith::poly::ExtField;
use crate::budget::Budget;
use crate::error::Result;
use num_bigint::BigUint;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmoothnessReport {
    /// Every extension degree up to this one was searched exhaustively.
    pub verified_up_to: usize,
    /// The degree cap (d-1)^n.
    pub cap: usize,
    /// True when no singular point exists over any F_{p^k}, k <= cap.
    pub certified: bool,
    /// A singular point, as coordinate vectors over F_{p^k}.
    pub singular_witness: Option<Vec<Vec<u32>>>,
    pub witness_degree: Option<usize>,
    /// Set when the search stopped early because of the budget.
    pub budget_stop: bool,
}

/// Searches for points of P^n over F_{p^k}, k = 1..=k_max, where all partial
/// derivatives vanish. Since p > d, Euler's relation puts such a point on F.
pub fn smoothness_check(form: &SymmetricForm, k_max: Option<usize>, budget: &Budget) -> Result<SmoothnessReport> {
    let cap = (form.d - 1).pow(form.n as u32).max(1);
    let k_max = k_max.unwrap_or(cap).min(cap);
    let mut report = SmoothnessReport {
        verified_up_to: 0,
        cap,
        certified: false,
        singular_witness: None,
        witness_degree: None,
        budget_stop: false,
    };
    let mut spent = BigUint::from(0u32);
    for k in 1..=k_max {
        let ext = ExtField::new(form.field, k);
        let q = ext.size();
        let points = BigUint::from(q).pow(form.n as u32 + 1);
        spent += points;
        if budget.check("smoothness search", &spent).is_err() {
            report.budget_stop = true;
            break;
        }
        if let Some(w) = search_degree(form, &ext) {
            report.singular_witness = Some(w);
            report.witness_degree = Some(k);
            return Ok(report);
        }
        report.verified_up_to = k;
    }
    report.certified = report.verified_up_to == cap;
    Ok(report)
}

fn search_degree(form: &SymmetricForm, ext: &ExtField) -> Option<Vec<Vec<u32>>> {
    let n1 = form.n + 1;
    let q = ext.size();
    let grads: Vec<&[(u32, Vec<usize>)]> = (0..n1).map(|j| form.grad_terms(j)).collect();
    // projective points normalised so the first nonzero coordinate is 1
    for lead in 0..n1 {
        let free = n1 - lead - 1;
        let total = q.pow(free as u32);
        for t in 0..total {
            let mut pt = vec![ext.zero(); n1];
            pt[lead] = ext.one();
            let mut rest = t;
            for slot in pt.iter_mut().skip(lead + 1) {
                *slot = ext.element(rest % q);
                rest /= q;
            }
            let singular = grads.iter().all(|terms| {
                let mut acc = ext.zero();
                for (c, vars) in terms.iter() {
                    let mut term = ext.scale(*c, &ext.one());
                    for &v in vars {
                        term = ext.mul(&term, &pt[v]);
                    }
                    acc = ext.add(&acc, &term);
                }
                ext.is_zero(&acc)
            });
            if singular {
                return Some(pt);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::field::PrimeField;
    use crate::geometry::form::FormSpec;

    #[test]
    fn conic_and_fermat_are_smooth() {
        let c = FormSpec::conic().reduce(PrimeField::new(3).unwrap()).unwrap();
        let r = smoothness_check(&c, None, &Budget::default()).unwrap();
        assert!(r.certified && r.singular_witness.is_none());
        let fc = FormSpec::fermat(1, 3).reduce(PrimeField::new(5).unwrap()).unwrap();
        let r = smoothness_check(&fc, None, &Budget::default()).unwrap();
        assert_eq!(r.cap, 2);
        assert!(r.certified);
    }

    #[test]
    fn node_is_found() {
        // the cone x0^2 + x1^2 is singular at (0:0:1)
        let f = PrimeField::new(5).unwrap();
        let s = FormSpec::new("cone", 2, 2, vec![(vec![2, 0, 0], 1), (vec![0, 2, 0], 1)])
            .unwrap()
            .reduce(f)
            .unwrap();
        let r = smoothness_check(&s, None, &Budget::default()).unwrap();
        assert!(!r.certified);
        assert_eq!(r.singular_witness, Some(vec![vec![0], vec![0], vec![1]]));
    }

    #[test]
    fn singular_point_only_over_extension() {
        // (x0^2 + 2 x1^2) x2 + x2^3 is singular exactly where x2 = 0 and
        // x0^2 = 3 x1^2, and 3 is not a square mod 5
        let f = PrimeField::new(5).unwrap();
        let s = FormSpec::new(
            "split",
            2,
            3,
            vec![(vec![2, 0, 1], 1), (vec![0, 2, 1], 2), (vec![0, 0, 3], 1)],
        )
        .unwrap()
        .reduce(f)
        .unwrap();
        let r = smoothness_check(&s, None, &Budget::default()).unwrap();
        assert_eq!(r.witness_degree, Some(2));
    }
}
