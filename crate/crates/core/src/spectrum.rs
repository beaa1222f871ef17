//! Discrete Fourier transform of real-valued RSS windows.
//!
//! Windows are tiny (10-60 samples), so the transform favors clarity and
//! bit-for-bit determinism over throughput: power-of-two lengths take an
//! iterative radix-2 FFT, everything else a direct O(n^2) evaluation.
//! No taper and no zero padding are applied.

use std::f64::consts::PI;

/// Magnitude spectrum of a real signal.
///
/// `bin_magnitudes[k]` is `|X_k|` for bin k in 0..n; bin k corresponds to
/// frequency `k * bin_width_hz`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub bin_magnitudes: Vec<f64>,
    pub bin_width_hz: f64,
}

/// Error from [`dft`]: the input signal was empty.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot transform an empty signal")]
pub struct EmptySignal;

/// Computes the magnitude spectrum of `signal` sampled at `sample_rate_hz`.
pub fn dft(signal: &[f64], sample_rate_hz: f64) -> Result<Spectrum, EmptySignal> {
    if signal.is_empty() {
        return Err(EmptySignal);
    }
    let n = signal.len();
    let (re, im) = if n.is_power_of_two() {
        let mut re = signal.to_vec();
        let mut im = vec![0.0; n];
        fft_radix2(&mut re, &mut im);
        (re, im)
    } else {
        direct_dft(signal)
    };
    let bin_magnitudes = re
        .iter()
        .zip(&im)
        .map(|(r, i)| r.hypot(*i))
        .collect();
    Ok(Spectrum {
        bin_magnitudes,
        bin_width_hz: sample_rate_hz / n as f64,
    })
}

/// In-place iterative radix-2 FFT. Lengths must be a power of two.
fn fft_radix2(re: &mut [f64], im: &mut [f64]) {
    let n = re.len();
    debug_assert!(n.is_power_of_two());

    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            re.swap(i, j);
            im.swap(i, j);
        }
    }

    let mut len = 2;
    while len <= n {
        let base = -2.0 * PI / len as f64;
        let half = len / 2;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                // Twiddles from sin_cos directly rather than a recurrence,
                // to keep rounding error flat across stages.
                let (tw_im, tw_re) = (base * k as f64).sin_cos();
                let (ur, ui) = (re[start + k], im[start + k]);
                let (xr, xi) = (re[start + k + half], im[start + k + half]);
                let vr = xr * tw_re - xi * tw_im;
                let vi = xr * tw_im + xi * tw_re;
                re[start + k] = ur + vr;
                im[start + k] = ui + vi;
                re[start + k + half] = ur - vr;
                im[start + k + half] = ui - vi;
            }
        }
        len <<= 1;
    }
}

/// Direct O(n^2) DFT for arbitrary lengths. The angle is reduced modulo n
/// before the trig call so precision does not degrade with k*i.
fn direct_dft(signal: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = signal.len();
    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    for (k, (rk, ik)) in re.iter_mut().zip(im.iter_mut()).enumerate() {
        let mut acc_re = 0.0;
        let mut acc_im = 0.0;
        for (i, &x) in signal.iter().enumerate() {
            let turns = ((k as u64 * i as u64) % n as u64) as f64 / n as f64;
            let (s, c) = (-2.0 * PI * turns).sin_cos();
            acc_re += x * c;
            acc_im += x * s;
        }
        *rk = acc_re;
        *ik = acc_im;
    }
    (re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent oracle: textbook DFT accumulating the unreduced angle.
    fn naive_dft_magnitudes(signal: &[f64]) -> Vec<f64> {
        let n = signal.len() as f64;
        (0..signal.len())
            .map(|k| {
                let mut re = 0.0;
                let mut im = 0.0;
                for (i, &x) in signal.iter().enumerate() {
                    let angle = -2.0 * PI * k as f64 * i as f64 / n;
                    re += x * angle.cos();
                    im += x * angle.sin();
                }
                (re * re + im * im).sqrt()
            })
            .collect()
    }

    #[test]
    fn empty_signal_is_an_error() {
        assert_eq!(dft(&[], 1.0), Err(EmptySignal));
    }

    #[test]
    fn constant_signal_is_pure_dc() {
        for n in [4usize, 7, 16, 60] {
            let signal = vec![2.5; n];
            let spectrum = dft(&signal, 1.0).unwrap();
            assert!((spectrum.bin_magnitudes[0] - 2.5 * n as f64).abs() < 1e-9);
            for &mag in &spectrum.bin_magnitudes[1..] {
                assert!(mag < 1e-9);
            }
        }
    }

    #[test]
    fn cosine_lands_on_its_bin() {
        let n = 16usize;
        let k0 = 3usize;
        let signal: Vec<f64> = (0..n)
            .map(|i| (2.0 * PI * k0 as f64 * i as f64 / n as f64).cos())
            .collect();
        let spectrum = dft(&signal, 1.0).unwrap();
        for (k, &mag) in spectrum.bin_magnitudes.iter().enumerate() {
            let expected = if k == k0 || k == n - k0 { n as f64 / 2.0 } else { 0.0 };
            assert!(
                (mag - expected).abs() < 1e-9,
                "bin {k}: got {mag}, expected {expected}"
            );
        }
    }

    #[test]
    fn bin_width_is_rate_over_n() {
        let spectrum = dft(&[1.0; 60], 1.0).unwrap();
        assert!((spectrum.bin_width_hz - 1.0 / 60.0).abs() < 1e-15);
    }

    #[test]
    fn matches_naive_oracle_for_all_lengths_up_to_64() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for n in 1..=64usize {
            let signal: Vec<f64> = (0..n).map(|_| rng.random_range(-100.0..-50.0)).collect();
            let spectrum = dft(&signal, 1.0).unwrap();
            let oracle = naive_dft_magnitudes(&signal);
            for (k, (&got, &want)) in spectrum.bin_magnitudes.iter().zip(&oracle).enumerate() {
                assert!(
                    (got - want).abs() < 1e-9,
                    "n={n} bin {k}: {got} vs oracle {want}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn random_signals_match_the_oracle(
            signal in proptest::collection::vec(-120.0f64..-40.0, 1..48)
        ) {
            let spectrum = dft(&signal, 1.0).unwrap();
            let oracle = naive_dft_magnitudes(&signal);
            for (&got, &want) in spectrum.bin_magnitudes.iter().zip(&oracle) {
                prop_assert!((got - want).abs() < 1e-9);
            }
        }
    }
}
