//! Deterministic summation helpers.

use num_complex::Complex64;

/// Neumaier-compensated running sum of complex values, applied to the real
/// and imaginary parts independently.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    re: (f64, f64),
    im: (f64, f64),
}

#[inline]
fn neumaier_step(acc: &mut (f64, f64), x: f64) {
    let (sum, comp) = *acc;
    let t = sum + x;
    let c = if sum.abs() >= x.abs() {
        (sum - t) + x
    } else {
        (x - t) + sum
    };
    *acc = (t, comp + c);
}

impl NeumaierSum {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        neumaier_step(&mut self.re, z.re);
        neumaier_step(&mut self.im, z.im);
    }

    pub fn total(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

impl FromIterator<Complex64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::default();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Compensated sum of a complex sequence in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = Complex64>>(iter: I) -> Complex64 {
    iter.into_iter().collect::<NeumaierSum>().total()
}

/// Sum by a fixed balanced binary tree over the slice (left half + right half).
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        n => {
            let (left, right) = values.split_at(n / 2);
            pairwise_sum(left) + pairwise_sum(right)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let xs = [1e16, 1.0, -1e16, 1.0].map(|x| Complex64::new(x, -x));
        let s = compensated_sum(xs);
        assert_eq!(s, Complex64::new(2.0, -2.0));
    }

    #[test]
    fn pairwise_tree_shape() {
        let xs: Vec<Complex64> = (1..=7).map(|k| Complex64::new(k as f64, 0.0)).collect();
        assert_eq!(pairwise_sum(&xs).re, 28.0);
        assert_eq!(pairwise_sum(&[]).re, 0.0);
    }
}
