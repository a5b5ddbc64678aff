use std::collections::BTreeMap;

use faer::Mat;
use num_complex::Complex64;

use super::word::ExpectationQuery;
use crate::error::{Error, Result};
use crate::matrix::{haar_unitary, SeededRng};

/// Sample mean and standard error of the real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub imag_mean: f64,
    pub imag_stderr: f64,
    pub samples: usize,
}

impl MonteCarloEstimate {
    /// `|imag_mean| <= 5 imag_stderr`, the sanity condition on the
    /// imaginary part.
    pub fn imaginary_part_consistent(&self) -> bool {
        self.imag_mean.abs() <= 5.0 * self.imag_stderr
    }
}

/// Averages the product of traces over independent Haar unitaries, one per
/// generator, `samples >= 100` times.
pub fn monte_carlo_expectation(
    query: &ExpectationQuery,
    n: usize,
    samples: usize,
    rng: &mut SeededRng,
) -> Result<MonteCarloEstimate> {
    if samples < 100 {
        return Err(Error::InvalidParameter(format!("need at least 100 samples, got {samples}")));
    }
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let generators: Vec<u32> = query.generators().into_iter().collect();
    let (mut sum_re, mut sum_re2, mut sum_im, mut sum_im2) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..samples {
        let mut mats: BTreeMap<u32, (Mat<Complex64>, Mat<Complex64>)> = BTreeMap::new();
        for &g in &generators {
            let u = haar_unitary(n, rng)?.to_faer();
            let ud = u.adjoint().to_owned();
            mats.insert(g, (u, ud));
        }
        let mut value = Complex64::new(1.0, 0.0);
        for t in query.traces() {
            let mut prod: Option<Mat<Complex64>> = None;
            for l in t.letters() {
                let (u, ud) = &mats[&l.generator];
                let f = if l.inverted { ud } else { u };
                prod = Some(match prod {
                    None => f.clone(),
                    Some(p) => &p * f,
                });
            }
            let p = prod.expect("traces are nonempty");
            value *= (0..n).map(|i| p[(i, i)]).sum::<Complex64>();
        }
        sum_re += value.re;
        sum_re2 += value.re * value.re;
        sum_im += value.im;
        sum_im2 += value.im * value.im;
    }
    let s = samples as f64;
    let stderr = |sum: f64, sum2: f64| {
        let mean = sum / s;
        let var = ((sum2 - s * mean * mean) / (s - 1.0)).max(0.0);
        (var / s).sqrt()
    };
    Ok(MonteCarloEstimate {
        estimate: sum_re / s,
        stderr: stderr(sum_re, sum_re2),
        imag_mean: sum_im / s,
        imag_stderr: stderr(sum_im, sum_im2),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sd::parse_trace_expr;

    #[test]
    fn too_few_samples() {
        let q = parse_trace_expr("tr(U1)").unwrap().query;
        assert!(monte_carlo_expectation(&q, 4, 99, &mut SeededRng::new(1, 0)).is_err());
    }

    #[test]
    fn trivial_query_is_one() {
        let q = parse_trace_expr("tr(U1 U1')").unwrap().query;
        let e = monte_carlo_expectation(&q, 3, 100, &mut SeededRng::new(1, 0)).unwrap();
        assert_eq!(e.estimate, 1.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn pair_of_traces_near_one() {
        let q = parse_trace_expr("tr(U1) tr(U1')").unwrap().query;
        let e = monte_carlo_expectation(&q, 8, 2000, &mut SeededRng::new(2, 0)).unwrap();
        assert!((e.estimate - 1.0).abs() <= 4.0 * e.stderr, "{e:?}");
        assert!(e.imaginary_part_consistent());
    }
}
