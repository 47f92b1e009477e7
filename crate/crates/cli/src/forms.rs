//! Turning `--form` into a form spec.

use anyhow::{bail, Context, Result};
use jetcircle::arith::field::PrimeField;
use jetcircle::geometry::{smoothness_check, FormSpec};
use jetcircle::Budget;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RANDOM_RETRIES: u64 = 64;

/// Exponent vectors of all degree-d monomials in n+1 variables.
fn monomials(n: usize, d: usize) -> Vec<Vec<u32>> {
    fn rec(left: usize, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            cur.push(left as u32);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in (0..=left).rev() {
            cur.push(a as u32);
            rec(left - a, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, n + 1, &mut Vec::new(), &mut out);
    out
}

/// A form with small random integer coefficients, redrawn until it is
/// smooth modulo every prime in `primes`.
pub fn random_smooth(n: usize, d: usize, seed: u64, primes: &[u32], budget: &Budget) -> Result<FormSpec> {
    let monos = monomials(n, d);
    'attempt: for attempt in 0..RANDOM_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let terms: Vec<(Vec<u32>, i64)> = monos
            .iter()
            .map(|e| (e.clone(), rng.gen_range(-4i64..=4)))
            .filter(|(_, c)| *c != 0)
            .collect();
        if terms.is_empty() {
            continue;
        }
        let spec = FormSpec::new(format!("random_n{n}_d{d}_seed{seed}"), n, d, terms)?;
        for &p in primes {
            let form = spec.reduce(PrimeField::new(p)?)?;
            let report = smoothness_check(&form, None, budget)?;
            if report.budget_stop {
                bail!(jetcircle::Error::Precondition(format!(
                    "smoothness of the random form at p={p} cannot be certified within the budget"
                )));
            }
            if !report.certified {
                continue 'attempt;
            }
        }
        return Ok(spec);
    }
    bail!(jetcircle::Error::Precondition(format!("no smooth random form found in {RANDOM_RETRIES} attempts")))
}

pub fn resolve(name: &str, n: Option<usize>, d: Option<usize>, seed: u64, primes: &[u32], budget: &Budget) -> Result<FormSpec> {
    let spec = match name {
        "conic" => FormSpec::conic(),
        "fermat" => FormSpec::fermat(n.unwrap_or(2), d.unwrap_or(2)),
        "random" => random_smooth(n.unwrap_or(2), d.unwrap_or(2), seed, primes, budget)?,
        path => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading form file {path}"))?;
            let stem = std::path::Path::new(path).file_stem().and_then(|s| s.to_str()).unwrap_or("form");
            FormSpec::parse(stem, &text)?
        }
    };
    if let Some(n) = n {
        if n != spec.n {
            bail!(jetcircle::Error::InvalidInput(format!("--n {n} does not match the form ({} variables)", spec.n + 1)));
        }
    }
    if let Some(d) = d {
        if d != spec.d {
            bail!(jetcircle::Error::InvalidInput(format!("--d {d} does not match the form (degree {})", spec.d)));
        }
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_count_is_binomial() {
        assert_eq!(monomials(2, 2).len(), 6);
        assert_eq!(monomials(1, 3).len(), 4);
        assert_eq!(monomials(3, 3).len(), 20);
        assert!(monomials(2, 3).iter().all(|e| e.iter().sum::<u32>() == 3));
    }

    #[test]
    fn random_form_is_reproducible_and_smooth() {
        let b = Budget::default();
        let a = random_smooth(2, 2, 11, &[5, 7], &b).unwrap();
        let c = random_smooth(2, 2, 11, &[5, 7], &b).unwrap();
        assert_eq!(a, c);
        for p in [5, 7] {
            let f = a.reduce(PrimeField::new(p).unwrap()).unwrap();
            assert!(smoothness_check(&f, None, &b).unwrap().certified);
        }
    }

    #[test]
    fn mismatched_degree_is_rejected() {
        assert!(resolve("conic", None, Some(3), 0, &[3], &Budget::default()).is_err());
    }
}
