//! Cepstrum of a log power spectrum and low-pass liftering.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

fn check_symmetric(x: &[f64]) -> Result<()> {
    let n = x.len();
    for i in 1..n {
        let (a, b) = (x[i], x[n - i]);
        if (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1.0) {
            return Err(Error::invalid(format!(
                "log spectrum is not even-symmetric: x[{i}] = {a}, x[{}] = {b}",
                n - i
            )));
        }
    }
    Ok(())
}

/// Inverse DFT of a full-length, even-symmetric log power spectrum:
/// `c(d) = 1/N sum_n x(n) exp(j 2 pi d n / N)`.
pub fn cepstrum(log_power: &[f64]) -> Result<Vec<f64>> {
    let n = log_power.len();
    if n == 0 {
        return Err(Error::invalid("empty log spectrum"));
    }
    check_symmetric(log_power)?;
    let mut buf: Vec<Complex<f64>> = log_power.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let magnitude = log_power.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    buf.iter()
        .map(|c| {
            if (c.im * scale).abs() > 1e-9 * magnitude {
                Err(Error::invalid(format!(
                    "cepstrum has imaginary residue {}",
                    c.im * scale
                )))
            } else {
                Ok(c.re * scale)
            }
        })
        .collect()
}

/// Zeros every cepstral coefficient whose quefrency (folded, `min(d, N-d)`)
/// is `>= keep` and transforms back to the log-spectral domain.
///
/// `keep` ranges over `1..=N`; any `keep > N/2` retains everything.
pub fn cepstral_smooth(log_power: &[f64], keep: usize) -> Result<Vec<f64>> {
    let n = log_power.len();
    if keep == 0 || keep > n {
        return Err(Error::invalid(format!("keep must be in 1..={n}, got {keep}")));
    }
    let ceps = cepstrum(log_power)?;
    let mut buf: Vec<Complex<f64>> = ceps
        .iter()
        .enumerate()
        .map(|(d, &c)| {
            if d.min(n - d) < keep {
                Complex::new(c, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    Ok(buf.iter().map(|c| c.re).collect())
}

/// Cosine-transform cepstrum over the lower half of the spectrum, with
/// `N = 2 * half.len()`:
/// `c(0) = sqrt(2/N) sum x(n)`, `c(d) = sqrt(4/N) sum x(n) cos(pi d (2n+1) / N)`
/// for `d = 1..=N/2`.
///
/// Scale differs from [`cepstrum`]; only the shape is comparable.
pub fn cepstrum_cosine(half_log_power: &[f64]) -> Vec<f64> {
    let half = half_log_power.len();
    let n = (2 * half) as f64;
    (0..=half)
        .map(|d| {
            if d == 0 {
                (2.0 / n).sqrt() * half_log_power.iter().sum::<f64>()
            } else {
                (4.0 / n).sqrt()
                    * half_log_power
                        .iter()
                        .enumerate()
                        .map(|(i, x)| x * (PI * (d * (2 * i + 1)) as f64 / n).cos())
                        .sum::<f64>()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const N: usize = 512;

    /// Smooth envelope plus a cosine ripple with `cycles` periods over N bins.
    fn rippled(cycles: usize, amp: f64) -> Vec<f64> {
        (0..N)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / N as f64;
                2.0 + 0.8 * t.cos() + 0.3 * (2.0 * t).cos() + amp * (cycles as f64 * t).cos()
            })
            .collect()
    }

    fn direct_inverse_dft(x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|d| {
                x.iter()
                    .enumerate()
                    .map(|(i, v)| v * (2.0 * PI * (d * i) as f64 / n as f64).cos())
                    .sum::<f64>()
                    / n as f64
            })
            .collect()
    }

    fn ripple_amplitude(x: &[f64], cycles: usize) -> f64 {
        let n = x.len() as f64;
        2.0 / n
            * x.iter()
                .enumerate()
                .map(|(i, v)| v * (2.0 * PI * (cycles * i) as f64 / n).cos())
                .sum::<f64>()
    }

    #[test]
    fn constant_spectrum_is_dc_only() {
        let c = cepstrum(&vec![1.7; 64]).unwrap();
        assert!((c[0] - 1.7).abs() < 1e-12);
        assert!(c[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn matches_direct_inverse_dft() {
        let x = rippled(16, 0.5);
        let fast = cepstrum(&x).unwrap();
        let slow = direct_inverse_dft(&x);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn ripple_with_32_bin_period_peaks_at_16() {
        let x = rippled(N / 32, 0.5);
        let c = cepstrum(&x).unwrap();
        let peak = (2..N / 2).max_by(|&a, &b| c[a].abs().total_cmp(&c[b].abs())).unwrap();
        assert_eq!(peak, 16);
    }

    #[test]
    fn cosine_form_peaks_at_same_quefrency() {
        let x = rippled(16, 0.5);
        let c = cepstrum_cosine(&x[..N / 2]);
        assert_eq!(c.len(), N / 2 + 1);
        let peak = (3..=N / 2).max_by(|&a, &b| c[a].abs().total_cmp(&c[b].abs())).unwrap();
        assert_eq!(peak, 16);
    }

    #[test]
    fn liftering_removes_ripple() {
        let x = rippled(16, 0.5);
        let before = ripple_amplitude(&x, 16);
        let smooth = cepstral_smooth(&x, 16).unwrap();
        let after = ripple_amplitude(&smooth, 16);
        assert!((before - 0.5).abs() < 1e-9);
        assert!(after.abs() < 0.01 * before.abs());
        // envelope survives
        let env = rippled(16, 0.0);
        for (a, b) in smooth.iter().zip(&env) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn keep_one_is_mean() {
        let x = rippled(16, 0.5);
        let mean = x.iter().sum::<f64>() / N as f64;
        let s = cepstral_smooth(&x, 1).unwrap();
        assert!(s.iter().all(|v| (v - mean).abs() < 1e-9));
    }

    #[test]
    fn keep_out_of_range() {
        let x = rippled(16, 0.5);
        assert!(cepstral_smooth(&x, 0).is_err());
        assert!(cepstral_smooth(&x, N + 1).is_err());
    }

    #[test]
    fn asymmetric_input_rejected() {
        assert!(cepstrum(&[1.0, 2.0, 3.0, 4.0]).is_err());
    }

    fn symmetric(values: Vec<f64>) -> Vec<f64> {
        // build an even sequence of length 2 * (len - 1)
        let m = values.len();
        let mut x = values.clone();
        x.extend(values[1..m - 1].iter().rev());
        x
    }

    proptest! {
        #[test]
        fn full_keep_is_identity(values in proptest::collection::vec(-10.0f64..10.0, 2..40)) {
            let x = symmetric(values);
            let n = x.len();
            let s = cepstral_smooth(&x, n).unwrap();
            for (a, b) in s.iter().zip(&x) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn cepstrum_is_linear(
            a in proptest::collection::vec(-5.0f64..5.0, 17),
            b in proptest::collection::vec(-5.0f64..5.0, 17),
        ) {
            let (a, b) = (symmetric(a), symmetric(b));
            let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let (ca, cb, cs) = (cepstrum(&a).unwrap(), cepstrum(&b).unwrap(), cepstrum(&sum).unwrap());
            for i in 0..cs.len() {
                prop_assert!((cs[i] - ca[i] - cb[i]).abs() < 1e-9);
            }
        }
    }
}
