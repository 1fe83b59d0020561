//! Soft-threshold transfer functions.
//!
//! Every update function in this crate has the form
//!
//! > F(x) = lo + (hi - lo) * D((x - center) / scale)
//!
//! where D is a continuous CDF (standard normal or logistic). This gives closed
//! forms for the inverse, for the integral of the inverse (the potential term),
//! and for the global slope bound.
//!
//! The potential change of moving one variable from `a` to `b` while its input
//! stays `L` is `∫_a^b (F⁻¹(t) - L) dt`. Near a fixed point this is a tiny
//! difference of large closed-form terms, so [`SoftStep::descent`] switches to
//! Gauss-Legendre quadrature in the standardized variable when the move is
//! short.

use crate::error::{Error, Result};
use crate::special::{
    gauss_legendre_8, logistic, logistic_pdf, logit, normal_cdf, normal_pdf, normal_quantile,
    INV_SQRT_2PI,
};

/// Standardized CDF shape behind a [`SoftStep`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Normal,
    Logistic,
}

impl Shape {
    #[inline]
    pub fn cdf(self, y: f64) -> f64 {
        match self {
            Shape::Normal => normal_cdf(y),
            Shape::Logistic => logistic(y),
        }
    }

    #[inline]
    pub fn pdf(self, y: f64) -> f64 {
        match self {
            Shape::Normal => normal_pdf(y),
            Shape::Logistic => logistic_pdf(y),
        }
    }

    pub fn quantile(self, u: f64) -> f64 {
        match self {
            Shape::Normal => normal_quantile(u),
            Shape::Logistic => logit(u),
        }
    }

    pub fn pdf_max(self) -> f64 {
        match self {
            Shape::Normal => INV_SQRT_2PI,
            Shape::Logistic => 0.25,
        }
    }

    /// Partial first moment `∫_{-∞}^y t dD(t)`; zero at both infinities.
    pub fn first_moment(self, y: f64) -> f64 {
        if !y.is_finite() {
            return 0.0;
        }
        match self {
            Shape::Normal => -normal_pdf(y),
            Shape::Logistic => {
                let a = y.abs();
                -a * logistic(-a) - (-a).exp().ln_1p()
            }
        }
    }

    /// `∫_{ya}^{yb} (y - y_input) dD(y)` where `mass = D(yb) - D(ya)`.
    fn moment_gap(self, ya: f64, yb: f64, y_input: f64, mass: f64) -> f64 {
        if ya == yb {
            return 0.0;
        }
        if ya.is_finite() && yb.is_finite() && (yb - ya).abs() <= 0.5 {
            gauss_legendre_8(ya, yb, |y| (y - y_input) * self.pdf(y))
        } else {
            (self.first_moment(yb) - self.first_moment(ya)) - y_input * mass
        }
    }
}

/// A strictly increasing, smooth map from the reals onto `(lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SoftStep {
    pub shape: Shape,
    pub center: f64,
    pub scale: f64,
    pub lo: f64,
    pub hi: f64,
}

impl SoftStep {
    pub fn new(shape: Shape, center: f64, scale: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "scale must be positive, got {scale}"
            )));
        }
        if !center.is_finite() {
            return Err(Error::InvalidParam(format!(
                "center must be finite, got {center}"
            )));
        }
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidParam(format!("empty range [{lo}, {hi}]")));
        }
        Ok(SoftStep {
            shape,
            center,
            scale,
            lo,
            hi,
        })
    }

    /// Normal CDF with mean `mu` and standard deviation `sigma` onto `(lo, hi)`.
    pub fn normal(mu: f64, sigma: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::new(Shape::Normal, mu, sigma, lo, hi)
    }

    /// Logistic sigmoid centered at `center` with slope parameter `steepness`.
    pub fn logistic(center: f64, steepness: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(steepness > 0.0 && steepness.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "steepness must be positive, got {steepness}"
            )));
        }
        Self::new(Shape::Logistic, center, 1.0 / steepness, lo, hi)
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    fn standardize(&self, x: f64) -> f64 {
        (x - self.center) / self.scale
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.lo + self.width() * self.shape.cdf(self.standardize(x))
    }

    /// Standardized preimage of an output value, infinite at the range ends.
    fn preimage(&self, t: f64) -> f64 {
        self.shape.quantile((t - self.lo) / self.width())
    }

    /// `F⁻¹(t)` for `t` in `[lo, hi]`; infinite at the ends, NaN outside.
    pub fn inverse(&self, t: f64) -> f64 {
        self.center + self.scale * self.preimage(t)
    }

    /// Global maximum of `F'`.
    pub fn max_slope(&self) -> f64 {
        self.width() * self.shape.pdf_max() / self.scale
    }

    /// Lower limit of the inverse integral: 0 clamped into `[lo, hi]`.
    pub fn reference(&self) -> f64 {
        0.0f64.clamp(self.lo, self.hi)
    }

    /// `∫_r^x F⁻¹(t) dt` with `r = reference()`. Finite on all of `[lo, hi]`.
    pub fn inverse_integral(&self, x: f64) -> f64 {
        if !(self.lo..=self.hi).contains(&x) {
            return f64::NAN;
        }
        let r = self.reference();
        let moment =
            self.shape.first_moment(self.preimage(x)) - self.shape.first_moment(self.preimage(r));
        self.center * (x - r) + self.width() * self.scale * moment
    }

    /// `∫_a^b (F⁻¹(t) - input) dt`: the potential change of moving one
    /// variable from `a` to `b` while its linear input stays `input`.
    pub fn descent(&self, a: f64, b: f64, input: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        let ya = self.preimage(a);
        let yb = self.preimage(b);
        let y_input = self.standardize(input);
        let mass = (b - a) / self.width();
        self.width() * self.scale * self.shape.moment_gap(ya, yb, y_input, mass)
    }
}

/// Which score a transfer function produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScoreKind {
    Celebrity,
    Spammer,
}

/// Normal-CDF soft threshold `x ↦ Φ((x - μ) / σ)` mapping a summed non-score
/// onto `(0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferFunction {
    mu: f64,
    sigma: f64,
    kind: ScoreKind,
    step: SoftStep,
}

impl TransferFunction {
    pub fn new(mu: f64, sigma: f64, kind: ScoreKind) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "mu must be a finite non-negative number, got {mu}"
            )));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        let step = SoftStep::normal(mu, sigma, 0.0, 1.0)?;
        Ok(TransferFunction {
            mu,
            sigma,
            kind,
            step,
        })
    }

    pub fn celebrity(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(mu, sigma, ScoreKind::Celebrity)
    }

    pub fn spammer(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(mu, sigma, ScoreKind::Spammer)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn kind(&self) -> ScoreKind {
        self.kind
    }

    pub fn soft_step(&self) -> &SoftStep {
        &self.step
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        normal_cdf((x - self.mu) / self.sigma)
    }

    /// `μ + σ Φ⁻¹(q)`, defined on `(0, 1)`.
    pub fn inverse(&self, q: f64) -> f64 {
        self.step.inverse(q)
    }

    /// `G(x) = ∫_0^x F⁻¹(t) dt = μx - σ φ(Φ⁻¹(x))`, with `G(0) = 0` and `G(1) = μ`.
    pub fn g(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::InvalidParam(format!(
                "G is defined on [0, 1], got {x}"
            )));
        }
        Ok(self.step.inverse_integral(x))
    }

    /// `α = 1 / (σ √(2π))`, the maximum of `F'`.
    pub fn lipschitz_bound(&self) -> f64 {
        self.step.max_slope()
    }

    /// Smallest value `G` takes on `[0, 1]`, attained at `F(0)`.
    pub fn g_min(&self) -> f64 {
        self.step.inverse_integral(self.eval(0.0))
    }

    #[inline]
    pub(crate) fn descent(&self, from: f64, to: f64, input: f64) -> f64 {
        self.step.descent(from, to, input)
    }
}

/// Transfer function assignment over vertices: one shared function or a
/// per-vertex override table.
#[derive(Clone, Debug, PartialEq)]
pub enum TransferMap {
    Uniform(TransferFunction),
    PerVertex(Vec<TransferFunction>),
}

impl TransferMap {
    #[inline]
    pub fn at(&self, v: usize) -> &TransferFunction {
        match self {
            TransferMap::Uniform(f) => f,
            TransferMap::PerVertex(fs) => &fs[v],
        }
    }

    /// Largest slope bound over all vertices.
    pub fn lipschitz_bound(&self) -> f64 {
        match self {
            TransferMap::Uniform(f) => f.lipschitz_bound(),
            TransferMap::PerVertex(fs) => {
                fs.iter().map(|f| f.lipschitz_bound()).fold(0.0, f64::max)
            }
        }
    }

    pub fn g_min_total(&self, n: usize) -> f64 {
        match self {
            TransferMap::Uniform(f) => n as f64 * f.g_min(),
            TransferMap::PerVertex(fs) => fs.iter().map(|f| f.g_min()).sum(),
        }
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        match self {
            TransferMap::PerVertex(fs) if fs.len() != n => Err(Error::LengthMismatch {
                expected: n,
                actual: fs.len(),
            }),
            _ => Ok(()),
        }
    }
}

impl From<TransferFunction> for TransferMap {
    fn from(f: TransferFunction) -> Self {
        TransferMap::Uniform(f)
    }
}
