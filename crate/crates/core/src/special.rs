//! Special functions: the standard normal distribution and the logistic sigmoid.
//!
//! `erf`/`erfc` come from `libm` (a port of the FreeBSD msun routines, accurate
//! to about one ulp). Everything built on top stays in tail-safe form: the CDF
//! goes through `erfc` on both sides and the quantile works on the smaller of
//! `u` and `1 - u`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_2_SQRT_PI};

/// 1 / sqrt(2 pi), the peak of the standard normal density.
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Standard normal density.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// `1/sqrt(2) - FRAC_1_SQRT_2`.
const FRAC_1_SQRT_2_LO: f64 = -4.833_646_656_726_457e-17;

/// Standard normal CDF, `0.5 * erfc(-x / sqrt 2)`.
///
/// In the lower tail the rounding error of `-x / sqrt 2` is amplified by
/// roughly `x²` relative, so it is recovered exactly and folded back in to
/// first order.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    let t = -x * FRAC_1_SQRT_2;
    if t < 0.5 {
        return 0.5 * erfc(t);
    }
    let err = (-x).mul_add(FRAC_1_SQRT_2, -t) - x * FRAC_1_SQRT_2_LO;
    0.5 * (erfc(t) - FRAC_2_SQRT_PI * err * (-t * t).exp())
}

/// Standard normal quantile.
///
/// Acklam's rational approximation (relative error below 1.2e-9) followed by
/// one Newton step against [`normal_cdf`]. Returns `-inf` at 0, `+inf` at 1 and
/// NaN outside `[0, 1]`.
pub fn normal_quantile(u: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        return f64::NAN;
    }
    if u == 0.0 {
        return f64::NEG_INFINITY;
    }
    if u == 1.0 {
        return f64::INFINITY;
    }
    if u > 0.5 {
        // 1 - u is exact for u in (0.5, 1).
        return -lower_quantile(1.0 - u);
    }
    lower_quantile(u)
}

fn lower_quantile(u: f64) -> f64 {
    debug_assert!(u > 0.0 && u <= 0.5);
    if u == 0.5 {
        return 0.0;
    }
    let x = acklam(u);
    let err = normal_cdf(x) - u;
    x - err / normal_pdf(x)
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Logistic sigmoid `1 / (1 + e^-y)`, evaluated without overflow.
#[inline]
pub fn logistic(y: f64) -> f64 {
    if y >= 0.0 {
        1.0 / (1.0 + (-y).exp())
    } else {
        let e = y.exp();
        e / (1.0 + e)
    }
}

#[inline]
pub fn logistic_pdf(y: f64) -> f64 {
    let l = logistic(y);
    l * logistic(-y)
}

/// Inverse of [`logistic`]: `ln(u / (1 - u))`.
pub fn logit(u: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        return f64::NAN;
    }
    u.ln() - (-u).ln_1p()
}

/// `ln(1 + e^y)`.
#[inline]
pub fn softplus(y: f64) -> f64 {
    if y > 0.0 {
        y + (-y).exp().ln_1p()
    } else {
        y.exp().ln_1p()
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// 8-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// 8-point Gauss-Legendre rule over `[a, b]`.
pub fn gauss_legendre_8<F: Fn(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        acc += w * (f(mid - half * x) + f(mid + half * x));
    }
    acc * half
}
