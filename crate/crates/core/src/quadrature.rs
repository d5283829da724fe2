//! Globally adaptive Gauss-Kronrod (G10/K21) quadrature over a set of
//! initial panels, plus the tolerance configuration shared by the
//! Matsubara and real-frequency evaluators.

// Node and weight tables are kept at their published 30-digit precision.
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_223_052,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod abscissae.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and grid policy for every sum and integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Relative tolerance on each reported pressure.
    pub rel_tol: f64,
    /// Absolute tolerance on each reported pressure, Pa.
    pub abs_tol: f64,
    /// Maximum number of panel bisections per adaptive integral.
    pub max_subdivisions: usize,
    /// A Matsubara term counts as negligible below this fraction of the
    /// running sum.
    pub matsubara_tail_tol: f64,
    /// Hard cap on the number of Matsubara terms.
    pub max_matsubara_terms: usize,
    /// The real-frequency integral always extends at least down to this
    /// fraction of the relaxation parameter.
    pub omega_min_factor: f64,
    /// Upper end of the real-frequency integral as a multiple of the plasma
    /// frequency. The evanescent integrand of a Drude metal does not decay
    /// in ln ω above the plasma frequency, so this end is a fixed
    /// regularization rather than a convergence cutoff.
    pub omega_max_factor: f64,
    /// Width of the initial frequency panels, in decades.
    pub log_grid_decades_per_panel: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-22,
            max_subdivisions: 4000,
            matsubara_tail_tol: 1e-12,
            max_matsubara_terms: 100_000,
            omega_min_factor: 1e-6,
            omega_max_factor: 10.0,
            log_grid_decades_per_panel: 0.5,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("matsubara_tail_tol", self.matsubara_tail_tol),
            ("omega_min_factor", self.omega_min_factor),
            ("omega_max_factor", self.omega_max_factor),
            (
                "log_grid_decades_per_panel",
                self.log_grid_decades_per_panel,
            ),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::validation(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.rel_tol >= 1.0 {
            return Err(Error::validation("rel_tol must be below 1"));
        }
        if self.max_subdivisions == 0 || self.max_matsubara_terms < 3 {
            return Err(Error::validation(
                "max_subdivisions must be nonzero and max_matsubara_terms at least 3",
            ));
        }
        Ok(())
    }

    /// Same configuration with a different relative tolerance.
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
        converged: true,
    };

    pub(crate) fn require(self, what: &'static str) -> Result<Estimate> {
        if self.converged && self.value.is_finite() {
            Ok(self)
        } else {
            Err(Error::Convergence {
                what,
                value: self.value,
                est_error: self.error,
                work: self.evaluations,
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    l1: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// The 21 Kronrod abscissae on `[lo, hi]`: centre first, then the pairs
/// `centre ∓ dx_j` in the order of `XGK`.
fn nodes(lo: f64, hi: f64) -> [f64; 21] {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut x = [center; 21];
    for j in 0..10 {
        let dx = half * XGK[j];
        x[1 + 2 * j] = center - dx;
        x[2 + 2 * j] = center + dx;
    }
    x
}

/// Combines function values at [`nodes`] into (K21, |K21 − G10|, K21 of |f|).
fn combine(fx: &[f64], lo: f64, hi: f64) -> (f64, f64, f64) {
    let half = 0.5 * (hi - lo);
    let mut kronrod = WGK[10] * fx[0];
    let mut l1 = WGK[10] * fx[0].abs();
    let mut gauss = 0.0;
    for j in 0..10 {
        let (a, b) = (fx[1 + 2 * j], fx[2 + 2 * j]);
        kronrod += WGK[j] * (a + b);
        l1 += WGK[j] * (a.abs() + b.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (a + b);
        }
    }
    let kronrod = kronrod * half;
    (kronrod, (kronrod - gauss * half).abs(), l1 * half)
}

/// One 21-point Kronrod rule on `[lo, hi]`; the error is |K21 − G10|.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> (f64, f64) {
    let x = nodes(lo, hi);
    let fx = x.map(&mut *f);
    let (v, e, _) = combine(&fx, lo, hi);
    (v, e)
}

/// Integrates `f` over `[points[0], points[last]]`, starting from the panels
/// delimited by `points` and bisecting the panel with the largest error until
/// the summed error is at most `max(abs_tol, rel_tol·|value|)`.
///
/// Non-convergence is reported through [`Estimate::converged`], never by
/// panicking; the best estimate so far is still returned.
pub fn integrate_panels<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Estimate {
    let rule = |panels: &[(f64, f64)]| {
        panels
            .iter()
            .map(|&(lo, hi)| combine(&nodes(lo, hi).map(&mut f), lo, hi))
            .collect()
    };
    adaptive(rule, points, abs_tol, rel_tol, max_subdivisions, false)
}

/// Like [`integrate_panels`], but the relative tolerance refers to ∫|f|, so
/// integrands whose positive and negative parts nearly cancel still
/// terminate.
pub fn integrate_panels_l1<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Estimate {
    let rule = |panels: &[(f64, f64)]| {
        panels
            .iter()
            .map(|&(lo, hi)| combine(&nodes(lo, hi).map(&mut f), lo, hi))
            .collect()
    };
    adaptive(rule, points, abs_tol, rel_tol, max_subdivisions, true)
}

/// [`integrate_panels`] for expensive integrands: the nodes of every batch
/// of panels are evaluated in parallel. The result does not depend on the
/// thread count.
pub fn integrate_panels_par<F: Fn(f64) -> f64 + Sync>(
    f: F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Estimate {
    let rule = |panels: &[(f64, f64)]| {
        let xs: Vec<f64> = panels.iter().flat_map(|&(lo, hi)| nodes(lo, hi)).collect();
        let fx: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect();
        panels
            .iter()
            .zip(fx.chunks_exact(21))
            .map(|(&(lo, hi), v)| combine(v, lo, hi))
            .collect()
    };
    adaptive(rule, points, abs_tol, rel_tol, max_subdivisions, false)
}

fn adaptive<R>(
    mut rule: R,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
    relative_to_l1: bool,
) -> Estimate
where
    R: FnMut(&[(f64, f64)]) -> Vec<(f64, f64, f64)>,
{
    if points.len() < 2 {
        return Estimate::ZERO;
    }
    let panels: Vec<(f64, f64)> = points
        .windows(2)
        .filter(|w| w[1] != w[0])
        .map(|w| (w[0], w[1]))
        .collect();
    let mut evaluations = 21 * panels.len();
    let mut heap = BinaryHeap::with_capacity(panels.len() + 2 * max_subdivisions);
    for (&(lo, hi), (value, error, l1)) in panels.iter().zip(rule(&panels)) {
        heap.push(Segment {
            lo,
            hi,
            value,
            error,
            l1,
        });
    }

    let exact_totals = |heap: &BinaryHeap<Segment>| {
        heap.iter().fold((0.0, 0.0, 0.0), |(v, e, m), s| {
            (v + s.value, e + s.error, m + s.l1)
        })
    };
    let target = |value: f64, l1: f64| {
        let scale = if relative_to_l1 { l1 } else { value.abs() };
        abs_tol.max(rel_tol * scale)
    };
    let finish = |heap: &BinaryHeap<Segment>, evaluations: usize, splittable: bool| {
        let (v, e, m) = exact_totals(heap);
        Estimate {
            value: v,
            error: e,
            evaluations,
            converged: splittable && v.is_finite() && e <= target(v, m),
        }
    };
    let (mut value, mut error, mut l1) = exact_totals(&heap);

    let mut splits = 0;
    loop {
        if !value.is_finite() || !error.is_finite() {
            return Estimate {
                value,
                error,
                evaluations,
                converged: false,
            };
        }
        if error <= target(value, l1) || splits >= max_subdivisions {
            // Running sums drift; report the exact sums.
            return finish(&heap, evaluations, true);
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Panel cannot be split further in floating point.
            heap.push(worst);
            return finish(&heap, evaluations, false);
        }
        value -= worst.value;
        error -= worst.error;
        l1 -= worst.l1;
        let halves = [(worst.lo, mid), (mid, worst.hi)];
        for (&(lo, hi), (v, e, m)) in halves.iter().zip(rule(&halves)) {
            value += v;
            error += e;
            l1 += m;
            heap.push(Segment {
                lo,
                hi,
                value: v,
                error: e,
                l1: m,
            });
        }
        evaluations += 42;
        splits += 1;
        if splits % 64 == 0 {
            (value, error, l1) = exact_totals(&heap);
        }
    }
}

/// `n + 1` equally spaced points covering `[lo, hi]` with spacing at most
/// `width`.
pub fn uniform_breakpoints(lo: f64, hi: f64, width: f64) -> Vec<f64> {
    let n = (((hi - lo) / width).ceil() as usize).max(1);
    (0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / n as f64
            }
        })
        .collect()
}
