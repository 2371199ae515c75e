//! Spectral analysis of the origin trace `psi(0, t)`.
//!
//! Transforms use the kernel `e^{+i omega t}`, so a trace `e^{-i omega0 t}`
//! (the time dependence of a solitary wave) peaks at `+omega0`. Frequencies
//! are `omega_k = 2 pi k / (N h)` for `k = -N/2, ..., (N-1)/2`, ascending.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Minimum number of samples in a spectral window.
pub const MIN_WINDOW_SAMPLES: usize = 64;
/// Minimum trace length for the bound/dispersive split.
pub const MIN_SPLIT_SAMPLES: usize = 256;

/// Uniformly sampled complex time series.
#[derive(Debug, Clone, Copy)]
pub struct Trace<'a, T> {
    pub samples: &'a [Complex<T>],
    /// Time of `samples[0]`.
    pub t0: T,
    /// Sample step `h`.
    pub step: T,
}

impl<'a, T: Real> Trace<'a, T> {
    pub fn new(samples: &'a [Complex<T>], t0: T, step: T) -> Result<Self> {
        if !(step > T::zero()) {
            return Err(Error::Window(format!(
                "sample step must be positive, got {step}"
            )));
        }
        Ok(Self { samples, t0, step })
    }

    pub fn time(&self, i: usize) -> T {
        self.t0 + T::from_count(i) * self.step
    }

    /// Index range of samples with `t_start <= t <= t_end`.
    fn indices(&self, t_start: T, t_end: T) -> std::ops::Range<usize> {
        let slack = T::lit(1e-9);
        let first = ((t_start - self.t0) / self.step - slack)
            .ceil()
            .max(T::zero());
        let last = ((t_end - self.t0) / self.step + slack).floor();
        let first = first.to_usize().unwrap_or(0);
        if last < T::zero() {
            return first..first;
        }
        let end = (last.to_usize().unwrap_or(0) + 1).min(self.samples.len());
        first.min(end)..end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Taper {
    /// Periodic Hann window `sin^2(pi j / N)`.
    Hann,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralWindow<T> {
    /// Time of the first sample used.
    pub t_start: T,
    /// `t_start + N h`; the frequency spacing is `2 pi / (t_end - t_start)`.
    pub t_end: T,
    pub taper: Taper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub frequencies: Vec<T>,
    /// `|h sum_j w_j z_j e^{i omega_k (t_j - t_start)}|`.
    pub magnitudes: Vec<T>,
    pub window: SpectralWindow<T>,
}

impl<T: Real> Spectrum<T> {
    pub fn spacing(&self) -> T {
        T::TAU() / (self.window.t_end - self.window.t_start)
    }

    /// `sum_k |X_k|^2 * spacing / (2 pi)`, equal to `h sum_j |w_j z_j|^2`.
    pub fn power(&self) -> T {
        self.magnitudes.iter().map(|&a| a * a).sum::<T>() * self.spacing() / T::TAU()
    }
}

fn hann<T: Real>(j: usize, n: usize) -> T {
    let s = (T::PI() * T::from_count(j) / T::from_count(n)).sin();
    s * s
}

/// Unnormalized transform with the `e^{+2 pi i j k / N}` kernel.
fn plus_kernel<T: Real>(n: usize) -> Arc<dyn Fft<T>> {
    FftPlanner::new().plan_fft_inverse(n)
}

/// Unnormalized transform with the `e^{-2 pi i j k / N}` kernel.
fn minus_kernel<T: Real>(n: usize) -> Arc<dyn Fft<T>> {
    FftPlanner::new().plan_fft_forward(n)
}

/// Signed bin index of FFT output slot `k`.
fn signed_bin(k: usize, n: usize) -> isize {
    if k < n.div_ceil(2) {
        k as isize
    } else {
        k as isize - n as isize
    }
}

/// Hann-tapered spectrum of the samples with `t_start <= t <= t_end`.
pub fn windowed_spectrum<T: Real>(
    trace: &Trace<'_, T>,
    t_start: T,
    t_end: T,
) -> Result<Spectrum<T>> {
    let range = trace.indices(t_start, t_end);
    let n = range.len();
    if n < MIN_WINDOW_SAMPLES {
        return Err(Error::Window(format!(
            "window [{t_start}, {t_end}] holds {n} samples, at least {MIN_WINDOW_SAMPLES} required"
        )));
    }
    let h = trace.step;
    let mut buf: Vec<Complex<T>> = trace.samples[range.clone()]
        .iter()
        .enumerate()
        .map(|(j, z)| z * hann::<T>(j, n))
        .collect();
    plus_kernel(n).process(&mut buf);

    let spacing = T::TAU() / (T::from_count(n) * h);
    let mut bins: Vec<(isize, T)> = buf
        .iter()
        .enumerate()
        .map(|(k, z)| (signed_bin(k, n), z.norm() * h))
        .collect();
    bins.sort_by_key(|&(k, _)| k);
    let t0 = trace.time(range.start);
    Ok(Spectrum {
        frequencies: bins
            .iter()
            .map(|&(k, _)| T::from_isize(k).expect("bin index") * spacing)
            .collect(),
        magnitudes: bins.into_iter().map(|(_, a)| a).collect(),
        window: SpectralWindow {
            t_start: t0,
            t_end: t0 + T::from_count(n) * h,
            taper: Taper::Hann,
        },
    })
}

/// Fraction of spectral power (`|X|^2`) in bins with `lo <= omega <= hi`;
/// zero for an all-zero spectrum.
pub fn band_mass_fraction<T: Real>(sp: &Spectrum<T>, lo: T, hi: T) -> Result<T> {
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "band needs lo < hi, got [{lo}, {hi}]"
        )));
    }
    let (mut inside, mut total) = (T::zero(), T::zero());
    for (&w, &a) in sp.frequencies.iter().zip(&sp.magnitudes) {
        let p = a * a;
        total += p;
        if w >= lo && w <= hi {
            inside += p;
        }
    }
    Ok(if total == T::zero() {
        T::zero()
    } else {
        inside / total
    })
}

/// Sharp frequency-domain split of the whole trace: the bound part keeps the
/// bins with `|omega| <= m + margin`, the dispersive part is the exact
/// complement `trace - bound`.
pub fn bound_dispersive_split<T: Real>(
    trace: &Trace<'_, T>,
    m: T,
    margin: T,
) -> Result<(Vec<Complex<T>>, Vec<Complex<T>>)> {
    let n = trace.samples.len();
    if n < MIN_SPLIT_SAMPLES {
        return Err(Error::Window(format!(
            "split needs at least {MIN_SPLIT_SAMPLES} samples, got {n}"
        )));
    }
    let cutoff = m + margin;
    let spacing = T::TAU() / (T::from_count(n) * trace.step);
    let mut buf = trace.samples.to_vec();
    plus_kernel(n).process(&mut buf);
    for (k, z) in buf.iter_mut().enumerate() {
        let w = T::from_isize(signed_bin(k, n)).expect("bin index") * spacing;
        if w.abs() > cutoff {
            *z = Complex::new(T::zero(), T::zero());
        }
    }
    minus_kernel(n).process(&mut buf);
    let scale = T::one() / T::from_count(n);
    let bound: Vec<Complex<T>> = buf.into_iter().map(|z| z * scale).collect();
    let dispersive = trace
        .samples
        .iter()
        .zip(&bound)
        .map(|(z, b)| z - b)
        .collect();
    Ok((bound, dispersive))
}

/// Dominant frequency and spread of a late-time spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Concentration<T> {
    /// Peak bin refined by a parabola through the log-magnitudes of its neighbours.
    pub dominant: T,
    /// Root of the power-weighted second moment about `dominant`.
    pub width: T,
    /// Whether `|dominant| <= m`.
    pub in_gap: bool,
}

/// Locates the spectral peak of the windowed trace and measures its width.
pub fn spectral_concentration<T: Real>(
    trace: &Trace<'_, T>,
    m: T,
    t_start: T,
    t_end: T,
) -> Result<Concentration<T>> {
    concentration_of(&windowed_spectrum(trace, t_start, t_end)?, m)
}

pub fn concentration_of<T: Real>(sp: &Spectrum<T>, m: T) -> Result<Concentration<T>> {
    let mags = &sp.magnitudes;
    let (k, &peak) = mags
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite magnitudes"))
        .ok_or_else(|| Error::Window("empty spectrum".into()))?;
    if peak == T::zero() {
        return Err(Error::Window("spectrum is identically zero".into()));
    }
    let spacing = sp.spacing();
    let mut dominant = sp.frequencies[k];
    if k > 0 && k + 1 < mags.len() && mags[k - 1] > T::zero() && mags[k + 1] > T::zero() {
        let (l, c, r) = (mags[k - 1].ln(), peak.ln(), mags[k + 1].ln());
        let denom = l - T::lit(2.0) * c + r;
        if denom < T::zero() {
            dominant += T::lit(0.5) * (l - r) / denom * spacing;
        }
    }
    let (mut total, mut moment) = (T::zero(), T::zero());
    for (&w, &a) in sp.frequencies.iter().zip(mags) {
        let p = a * a;
        total += p;
        moment += p * (w - dominant) * (w - dominant);
    }
    Ok(Concentration {
        dominant,
        width: (moment / total).sqrt(),
        in_gap: dominant.abs() <= m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tone(n: usize, h: f64, omega: f64, amp: f64) -> Vec<Complex<f64>> {
        (0..n)
            .map(|j| Complex::from_polar(amp, -omega * j as f64 * h))
            .collect()
    }

    fn add(a: &[Complex<f64>], b: &[Complex<f64>]) -> Vec<Complex<f64>> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    // Direct quadrature of the tapered transform at one frequency.
    fn direct(samples: &[Complex<f64>], h: f64, omega: f64) -> f64 {
        let n = samples.len();
        let sum: Complex<f64> = samples
            .iter()
            .enumerate()
            .map(|(j, z)| z * hann::<f64>(j, n) * Complex::from_polar(1.0, omega * j as f64 * h))
            .sum();
        sum.norm() * h
    }

    fn peak(sp: &Spectrum<f64>) -> f64 {
        let k = (0..sp.magnitudes.len())
            .max_by(|&a, &b| sp.magnitudes[a].total_cmp(&sp.magnitudes[b]))
            .unwrap();
        sp.frequencies[k]
    }

    #[test]
    fn single_tone_peaks_at_positive_frequency() {
        let h = 0.1;
        let z = tone(2000, h, 0.5, 1.0);
        let tr = Trace::new(&z, 0.0, h).unwrap();
        let sp = windowed_spectrum(&tr, 0.0, 200.0).unwrap();
        assert!(
            (sp.spacing() - std::f64::consts::TAU / (sp.window.t_end - sp.window.t_start)).abs()
                < 1e-15
        );
        assert!((peak(&sp) - 0.5).abs() <= sp.spacing());
        assert!(sp.frequencies.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn zero_trace_spectrum() {
        let z = vec![Complex::new(0.0, 0.0); 128];
        let tr = Trace::new(&z, 0.0, 0.5).unwrap();
        let sp = windowed_spectrum(&tr, 0.0, 100.0).unwrap();
        assert!(sp.magnitudes.iter().all(|&a| a == 0.0));
        assert_eq!(band_mass_fraction(&sp, -1.0, 1.0).unwrap(), 0.0);
        assert!(concentration_of(&sp, 1.0).is_err());
    }

    #[test]
    fn short_window_rejected() {
        let z = tone(1000, 0.1, 0.5, 1.0);
        let tr = Trace::new(&z, 0.0, 0.1).unwrap();
        assert!(matches!(
            windowed_spectrum(&tr, 0.0, 6.0),
            Err(Error::Window(_))
        ));
    }

    #[test]
    fn two_tones_magnitude_ratio() {
        let h = 0.1;
        let z = add(&tone(2000, h, 0.5, 1.0), &tone(2000, h, -0.7, 0.5));
        let tr = Trace::new(&z, 0.0, h).unwrap();
        let sp = windowed_spectrum(&tr, 0.0, 200.0).unwrap();
        let near = |w0: f64| {
            sp.frequencies
                .iter()
                .zip(&sp.magnitudes)
                .filter(|(w, _)| (**w - w0).abs() < 2.0 * sp.spacing())
                .map(|(_, a)| *a)
                .fold(0.0, f64::max)
        };
        let ratio = near(0.5) / near(-0.7);
        assert!((ratio - 2.0).abs() < 0.1, "{ratio}");
        // FFT bins agree with the direct quadrature oracle
        let n = sp.magnitudes.len();
        let samples = &z[..n];
        for k in [0, n / 3, n / 2, n - 1] {
            let want = direct(samples, h, sp.frequencies[k]);
            assert!((sp.magnitudes[k] - want).abs() < 1e-9 * (1.0 + want));
        }
    }

    #[test]
    fn band_mass_examples() {
        let h = 0.1;
        let inside = tone(2000, h, 0.5, 1.0);
        let tr = Trace::new(&inside, 0.0, h).unwrap();
        let sp = windowed_spectrum(&tr, 0.0, 200.0).unwrap();
        assert!(band_mass_fraction(&sp, -1.0, 1.0).unwrap() > 0.99);

        let outside = tone(2000, h, 2.0, 1.0);
        let tr = Trace::new(&outside, 0.0, h).unwrap();
        let sp = windowed_spectrum(&tr, 0.0, 200.0).unwrap();
        assert!(band_mass_fraction(&sp, -1.0, 1.0).unwrap() < 0.05);
        assert!(band_mass_fraction(&sp, 1.0, -1.0).is_err());
    }

    // A tone completing an integer number of periods over the trace sits on a bin.
    fn aligned(n: usize, omega: f64, cycles: usize) -> f64 {
        std::f64::consts::TAU * cycles as f64 / (omega * n as f64)
    }

    #[test]
    fn split_examples_on_aligned_tones() {
        let n = 1024;
        let h = aligned(n, 0.5, 40); // 2.0 then completes 160 cycles
        let low = tone(n, h, 0.5, 1.0);
        let high = tone(n, h, 2.0, 1.0);
        let sup = |a: &[Complex<f64>], b: &[Complex<f64>]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max)
        };
        let zero = vec![Complex::new(0.0, 0.0); n];

        let (b, d) = bound_dispersive_split(&Trace::new(&low, 0.0, h).unwrap(), 1.0, 0.1).unwrap();
        assert!(sup(&b, &low) < 1e-6 && sup(&d, &zero) < 1e-6);
        let (b, d) = bound_dispersive_split(&Trace::new(&high, 0.0, h).unwrap(), 1.0, 0.1).unwrap();
        assert!(sup(&d, &high) < 1e-6 && sup(&b, &zero) < 1e-6);
    }

    #[test]
    fn split_of_off_bin_tones_in_interior() {
        let (n, h) = (32768, 0.1);
        let low = tone(n, h, 0.5, 1.0);
        let high = tone(n, h, 2.0, 1.0);
        let both = add(&low, &high);
        let (b, d) =
            bound_dispersive_split(&Trace::new(&both, 0.0, h).unwrap(), 1.0, 0.05).unwrap();
        let interior = n / 4..3 * n / 4;
        let err_b = interior
            .clone()
            .map(|j| (b[j] - low[j]).norm())
            .fold(0.0, f64::max);
        let err_d = interior
            .map(|j| (d[j] - high[j]).norm())
            .fold(0.0, f64::max);
        assert!(err_b < 1e-3 && err_d < 1e-3, "{err_b} {err_d}");
    }

    #[test]
    fn split_is_exact_partition() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let z: Vec<Complex<f64>> = (0..777)
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let (b, d) = bound_dispersive_split(&Trace::new(&z, 0.0, 0.2).unwrap(), 1.0, 0.05).unwrap();
        let err = z
            .iter()
            .zip(b.iter().zip(&d))
            .map(|(z, (b, d))| (z - (b + d)).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
        assert!(
            bound_dispersive_split(&Trace::new(&z[..100], 0.0, 0.2).unwrap(), 1.0, 0.05).is_err()
        );
    }

    #[test]
    fn parseval_on_random_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(64..600);
            let h = rng.gen_range(0.01..1.0);
            let z: Vec<Complex<f64>> = (0..n)
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let tr = Trace::new(&z, 0.0, h).unwrap();
            let sp = windowed_spectrum(&tr, 0.0, (n - 1) as f64 * h).unwrap();
            assert_eq!(sp.magnitudes.len(), n);
            let tapered: f64 = z
                .iter()
                .enumerate()
                .map(|(j, v)| v.norm_sqr() * hann::<f64>(j, n).powi(2))
                .sum::<f64>()
                * h;
            assert!((sp.power() - tapered).abs() < 1e-10 * tapered);
        }
    }

    #[test]
    fn concentration_examples() {
        let h = 0.1;
        let z = tone(2000, h, 0.6, 1.0);
        let tr = Trace::new(&z, 0.0, h).unwrap();
        let c = spectral_concentration(&tr, 1.0, 0.0, 200.0).unwrap();
        let spacing = std::f64::consts::TAU / 200.0;
        assert!((c.dominant - 0.6).abs() < 1e-3, "{c:?}");
        assert!(c.width <= 2.0 * spacing, "{c:?}");
        assert!(c.in_gap);

        let pair = add(&z, &tone(2000, h, -0.6, 1.0));
        let c =
            spectral_concentration(&Trace::new(&pair, 0.0, h).unwrap(), 1.0, 0.0, 200.0).unwrap();
        assert!(c.width > 0.3, "{c:?}");

        // zero padding beyond the window does not move the peak
        let mut padded = z.clone();
        padded.extend(std::iter::repeat_n(Complex::new(0.0, 0.0), 1000));
        let d =
            spectral_concentration(&Trace::new(&padded, 0.0, h).unwrap(), 1.0, 0.0, 299.9).unwrap();
        assert!((d.dominant - 0.6).abs() < std::f64::consts::TAU / 299.9);
    }
}
