//! Finite-difference weights on arbitrary (distinct) abscissae.

use crate::error::{Error, Result};

/// Weights `w` with `sum_k w[k] * f(abscissae[k]) ~ f^(order)(x0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneSidedWeights {
    pub abscissae: Vec<f64>,
    pub x0: f64,
    pub order: usize,
    pub weights: Vec<f64>,
}

impl OneSidedWeights {
    pub fn apply(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

/// Fornberg's recursion; exact for polynomials of degree below `abscissae.len()`.
pub fn fd_weights(abscissae: &[f64], x0: f64, order: usize) -> Result<OneSidedWeights> {
    let n = abscissae.len();
    if n < order + 1 {
        return Err(Error::InvalidInput(format!(
            "{} abscissae cannot resolve derivative order {order}",
            n
        )));
    }
    for a in 0..n {
        for b in a + 1..n {
            if abscissae[a] == abscissae[b] {
                return Err(Error::DuplicateAbscissae);
            }
        }
    }

    // c[k][m]: weight of node k for derivative m
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = abscissae[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = abscissae[i] - x0;
        for j in 0..i {
            let c3 = abscissae[i] - abscissae[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }

    Ok(OneSidedWeights {
        abscissae: abscissae.to_vec(),
        x0,
        order,
        weights: c.iter().map(|row| row[order]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Derivative of the Lagrange basis polynomials, evaluated term by term.
    fn lagrange_derivative(xs: &[f64], x0: f64) -> Vec<f64> {
        let n = xs.len();
        (0..n)
            .map(|k| {
                let denom: f64 = (0..n).filter(|&m| m != k).map(|m| xs[k] - xs[m]).product();
                let mut sum = 0.0;
                for skip in (0..n).filter(|&m| m != k) {
                    sum += (0..n)
                        .filter(|&m| m != k && m != skip)
                        .map(|m| x0 - xs[m])
                        .product::<f64>();
                }
                sum / denom
            })
            .collect()
    }

    #[test]
    fn standard_one_sided_first_derivative() {
        let h = 0.1;
        let w = fd_weights(&[0.0, h, 2.0 * h], 0.0, 1).unwrap();
        let expect = [-1.5 / h, 2.0 / h, -0.5 / h];
        for (a, b) in w.weights.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolation_at_sample_point() {
        let h = 0.3;
        let w = fd_weights(&[0.0, h, 2.0 * h], 0.0, 0).unwrap();
        assert_eq!(w.weights, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn four_point_derivative_matches_lagrange() {
        let h = 0.05;
        let xs = [0.0, h, 2.0 * h, 3.0 * h];
        let w = fd_weights(&xs, 0.4 * h, 1).unwrap();
        let oracle = lagrange_derivative(&xs, 0.4 * h);
        for (a, b) in w.weights.iter().zip(oracle) {
            assert!((a - b).abs() < 1e-12 * b.abs().max(1.0 / h), "{a} vs {b}");
        }
    }

    #[test]
    fn duplicate_abscissae_rejected() {
        assert!(matches!(
            fd_weights(&[0.0, 1.0, 1.0], 0.5, 1),
            Err(Error::DuplicateAbscissae)
        ));
        assert!(fd_weights(&[0.0], 0.0, 1).is_err());
    }

    proptest! {
        #[test]
        fn weight_sum_identities(
            x0 in -1.0f64..1.0,
            start in -2.0f64..0.0,
            gaps in proptest::collection::vec(0.05f64..1.0, 2..4),
        ) {
            let mut xs = vec![start];
            for g in &gaps {
                let last = *xs.last().unwrap();
                xs.push(last + g);
            }
            let w0 = fd_weights(&xs, x0, 0).unwrap();
            prop_assert!((w0.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            let w1 = fd_weights(&xs, x0, 1).unwrap();
            prop_assert!(w1.weights.iter().sum::<f64>().abs() < 1e-8);
            let moment: f64 = w1.weights.iter().zip(&xs).map(|(w, x)| w * (x - x0)).sum();
            prop_assert!((moment - 1.0).abs() < 1e-8);
        }

        #[test]
        fn exact_on_polynomials(
            x0 in -1.0f64..1.0,
            coeffs in proptest::collection::vec(-2.0f64..2.0, 4),
        ) {
            let xs = [-0.7, -0.2, 0.4, 0.9];
            let p = |x: f64| coeffs[0] + x * (coeffs[1] + x * (coeffs[2] + x * coeffs[3]));
            let dp = |x: f64| coeffs[1] + x * (2.0 * coeffs[2] + 3.0 * x * coeffs[3]);
            let vals: Vec<f64> = xs.iter().map(|&x| p(x)).collect();
            prop_assert!((fd_weights(&xs, x0, 0).unwrap().apply(&vals) - p(x0)).abs() < 1e-10);
            prop_assert!((fd_weights(&xs, x0, 1).unwrap().apply(&vals) - dp(x0)).abs() < 1e-9);
        }
    }
}
