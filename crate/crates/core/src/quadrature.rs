//! Globally adaptive Gauss–Kronrod (10/21 point) integration.
//!
//! Endpoint singularities are never evaluated (Kronrod nodes are interior),
//! so integrable power singularities at the ends of an interval are fine as
//! long as the caller removes the worst of them by substitution. Infinite
//! ranges are handled by [`integrate_power_tail`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

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
    0.123_491_976_262_065_851_077_208_838_339_466,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances for [`integrate`]. The loop stops once the summed error
/// estimate is below `max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub const fn relative(rel: f64) -> Self {
        Tolerance { rel, abs: 0.0, max_intervals: 2000 }
    }

    pub const fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::relative(1e-10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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

fn kronrod21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Segment { a, b, value, error }
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Integrate over `[points[0], points[last]]`, starting from the given
/// subdivision. Use it to put known kinks or peaks on segment boundaries.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], tol: Tolerance) -> Result<Estimate> {
    if points.len() < 2 {
        return Err(Error::domain("need at least two integration points"));
    }
    let (lo, hi) = (points[0], points[points.len() - 1]);
    if lo == hi {
        return Ok(Estimate { value: 0.0, error: 0.0, evaluations: 0 });
    }
    if !(lo < hi) || points.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::domain(format!("integration points must be increasing, got {points:?}")));
    }

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod21(&mut f, w[0], w[1]));
            evaluations += 21;
        }
    }

    loop {
        let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        if !value.is_finite() {
            return Err(Error::Quadrature { a: lo, b: hi, estimate: value, error });
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(Estimate { value, error, evaluations });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        // Stop refining once the worst segment cannot be split in floating point.
        if heap.len() + 2 > tol.max_intervals || mid <= worst.a || mid >= worst.b {
            return Err(Error::Quadrature { a: lo, b: hi, estimate: value, error });
        }
        heap.push(kronrod21(&mut f, worst.a, mid));
        heap.push(kronrod21(&mut f, mid, worst.b));
        evaluations += 42;
    }
}

/// Integrate `f` over `[start, ∞)` when `f(r)` decays like `r^(-1-decay)`.
///
/// The substitution `r = start * w^(-1/decay)` maps the tail onto `(0, 1]`
/// with a bounded integrand.
pub fn integrate_power_tail<F: FnMut(f64) -> f64>(
    mut f: F,
    start: f64,
    decay: f64,
    tol: Tolerance,
) -> Result<Estimate> {
    if !(start > 0.0 && decay > 0.0) {
        return Err(Error::domain("power tail needs start > 0 and decay > 0"));
    }
    let inv = 1.0 / decay;
    integrate(
        |w| {
            let r = start * w.powf(-inv);
            f(r) * start * inv * w.powf(-inv - 1.0)
        },
        0.0,
        1.0,
        tol,
    )
}

/// Integrate `f` over `[0, end]` when `f(x)` behaves like `x^(power - 1)`
/// near zero (`power > 0`), via `x = end * w^(1/power)`.
pub fn integrate_power_origin<F: FnMut(f64) -> f64>(
    mut f: F,
    end: f64,
    power: f64,
    tol: Tolerance,
) -> Result<Estimate> {
    if !(end > 0.0 && power > 0.0) {
        return Err(Error::domain("power origin needs end > 0 and power > 0"));
    }
    let inv = 1.0 / power;
    integrate(
        |w| {
            let x = end * w.powf(inv);
            f(x) * end * inv * w.powf(inv - 1.0)
        },
        0.0,
        1.0,
        tol,
    )
}
