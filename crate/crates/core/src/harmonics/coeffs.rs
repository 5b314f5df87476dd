use crate::error::{Error, Result};

/// Number of real harmonics of degree exactly `l` on the unit `n`-sphere
/// (`n` in {1, 2}).
pub fn degree_multiplicity(n: usize, l: usize) -> usize {
    match (n, l) {
        (_, 0) => 1,
        (1, _) => 2,
        _ => 2 * l + 1,
    }
}

/// Number of coefficients of degree `<= l_max`.
pub fn coeff_count(n: usize, l_max: usize) -> usize {
    match n {
        1 => 2 * l_max + 1,
        _ => (l_max + 1) * (l_max + 1),
    }
}

/// Expansion coefficients in the real harmonic basis that is orthonormal on
/// the sphere of radius `R`, ordered by degree ascending and then by `p`.
///
/// Within a degree (`n = 2`), `p = 1` is the zonal (`m = 0`) function and
/// `p = 2m, 2m + 1` are the `cos mφ`, `sin mφ` members. For `n = 1`, `p = 1`
/// is `cos lθ` and `p = 2` is `sin lθ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coeffs {
    n: usize,
    l_max: usize,
    data: Vec<f64>,
}

impl Coeffs {
    pub fn zeros(n: usize, l_max: usize) -> Self {
        Coeffs {
            n,
            l_max,
            data: vec![0.0; coeff_count(n, l_max)],
        }
    }

    pub fn from_vec(n: usize, l_max: usize, data: Vec<f64>) -> Result<Self> {
        let expected = coeff_count(n, l_max);
        if data.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                got: data.len(),
            });
        }
        Ok(Coeffs { n, l_max, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Flat index of `(l, p)`, `1 <= p <= M_l`.
    pub fn index(&self, l: usize, p: usize) -> Result<usize> {
        flat_index(self.n, self.l_max, l, p)
    }

    pub fn get(&self, l: usize, p: usize) -> Result<f64> {
        Ok(self.data[self.index(l, p)?])
    }

    pub fn set(&mut self, l: usize, p: usize, value: f64) -> Result<()> {
        let i = self.index(l, p)?;
        self.data[i] = value;
        Ok(())
    }

    /// Harmonic degree of the flat index `idx`.
    pub fn degree_of(&self, idx: usize) -> usize {
        degree_of(self.n, idx)
    }

    /// `(l, p)` pairs in storage order.
    pub fn labels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..=self.l_max).flat_map(move |l| (1..=degree_multiplicity(self.n, l)).map(move |p| (l, p)))
    }

    /// Sum of squared coefficients of degree `l`.
    pub fn degree_energy(&self, l: usize) -> f64 {
        if l > self.l_max {
            return 0.0;
        }
        let start = flat_index(self.n, self.l_max, l, 1).unwrap();
        self.data[start..start + degree_multiplicity(self.n, l)]
            .iter()
            .map(|a| a * a)
            .sum()
    }

    /// Multiply every degree-`l` coefficient by `factor(l)`.
    pub fn scale_by_degree(&self, factor: impl Fn(usize) -> f64) -> Coeffs {
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(i, a)| a * factor(degree_of(self.n, i)))
            .collect();
        Coeffs { data, ..*self }
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &Coeffs) -> Coeffs {
        debug_assert_eq!(self.data.len(), other.data.len());
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + alpha * b).collect();
        Coeffs { data, ..*self }
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    /// Copy into a (possibly different) truncation, zero-padding or truncating.
    pub fn retruncate(&self, l_max: usize) -> Coeffs {
        let mut out = Coeffs::zeros(self.n, l_max);
        let keep = coeff_count(self.n, l_max.min(self.l_max));
        out.data[..keep].copy_from_slice(&self.data[..keep]);
        out
    }
}

pub(crate) fn flat_index(n: usize, l_max: usize, l: usize, p: usize) -> Result<usize> {
    if l > l_max || p == 0 || p > degree_multiplicity(n, l) {
        return Err(Error::BadHarmonicIndex { n, l, p });
    }
    Ok(match (n, l) {
        (_, 0) => 0,
        (1, _) => 2 * l - 1 + (p - 1),
        _ => l * l + (p - 1),
    })
}

pub(crate) fn degree_of(n: usize, idx: usize) -> usize {
    match n {
        1 => idx.div_ceil(2),
        _ => (idx as f64).sqrt().floor() as usize,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_and_degree_agree() {
        for n in [1, 2] {
            let c = Coeffs::zeros(n, 9);
            for (i, (l, p)) in c.labels().enumerate() {
                assert_eq!(c.index(l, p).unwrap(), i);
                assert_eq!(c.degree_of(i), l);
            }
            assert_eq!(c.labels().count(), c.len());
        }
    }

    #[test]
    fn out_of_range_indices_are_rejected() {
        let c = Coeffs::zeros(2, 4);
        assert!(c.index(5, 1).is_err());
        assert!(c.index(2, 0).is_err());
        assert!(c.index(2, 6).is_err());
        let c1 = Coeffs::zeros(1, 4);
        assert!(c1.index(0, 2).is_err());
        assert!(c1.index(3, 3).is_err());
    }

    #[test]
    fn retruncate_keeps_low_degrees() {
        let mut c = Coeffs::zeros(2, 6);
        c.set(3, 2, 1.5).unwrap();
        c.set(6, 1, 2.0).unwrap();
        let t = c.retruncate(4);
        assert_eq!(t.get(3, 2).unwrap(), 1.5);
        assert_eq!(t.len(), 25);
        let back = t.retruncate(6);
        assert_eq!(back.get(6, 1).unwrap(), 0.0);
    }
}
