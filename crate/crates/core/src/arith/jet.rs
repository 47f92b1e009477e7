use super::field::PrimeField;
use crate::error::{Error, Result};

/// An element a_0 + a_1 t + .. + a_m t^m of F_p[t]/(t^{m+1}).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JetScalar {
    pub field: PrimeField,
    pub coeffs: Vec<u32>,
}

impl JetScalar {
    pub fn zero(field: PrimeField, m: usize) -> Self {
        JetScalar { field, coeffs: vec![0; m + 1] }
    }

    pub fn new(field: PrimeField, coeffs: Vec<u32>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("jet needs at least one coefficient".into()));
        }
        let p = field.p();
        Ok(JetScalar { field, coeffs: coeffs.into_iter().map(|c| c % p).collect() })
    }

    pub fn m(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.field != o.field {
            return Err(Error::FieldMismatch { left: self.field.p(), right: o.field.p() });
        }
        if self.coeffs.len() != o.coeffs.len() {
            return Err(Error::InvalidInput("jet orders differ".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        let f = self.field;
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(JetScalar { field: f, coeffs })
    }

    /// Product truncated at t^{m+1}.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        let f = self.field;
        let m = self.m();
        let mut out = vec![0u32; m + 1];
        for i in 0..=m {
            if self.coeffs[i] == 0 {
                continue;
            }
            for j in 0..=m - i {
                out[i + j] = f.add(out[i + j], f.mul(self.coeffs[i], o.coeffs[j]));
            }
        }
        Ok(JetScalar { field: f, coeffs: out })
    }

    /// Sum of coefficients, the exponent of the standard character.
    pub fn trace(&self) -> u32 {
        self.coeffs.iter().fold(0, |acc, &c| self.field.add(acc, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_product() {
        let f = PrimeField::new(5).unwrap();
        let a = JetScalar::new(f, vec![1, 1]).unwrap();
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq.coeffs, vec![1, 2]);
        assert_eq!(sq.trace(), 3);
    }

    #[test]
    fn mismatched_fields_are_refused() {
        let a = JetScalar::zero(PrimeField::new(3).unwrap(), 1);
        let b = JetScalar::zero(PrimeField::new(5).unwrap(), 1);
        assert!(matches!(a.add(&b), Err(Error::FieldMismatch { .. })));
    }
}
