//! Reference computations shared by the integration tests. Nothing here calls
//! into the crate's numerics.
#![allow(dead_code)]

use std::collections::VecDeque;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_677_94;

/// `φ(x)` with `x²` carried as an exact head/tail pair, so the tail stays
/// accurate to a few ulps.
pub fn phi_density(x: f64) -> f64 {
    let hi = x * x;
    let lo = x.mul_add(x, -hi);
    INV_SQRT_2PI * (-0.5 * hi).exp() * (1.0 - 0.5 * lo)
}

/// Upper tail `1 - Φ(t)` for `t ≥ 0`: power series near zero, where the
/// subtraction loses nothing, Laplace continued fraction beyond.
fn upper_tail(t: f64) -> f64 {
    if t < 0.5 {
        // Φ(t) - 1/2 = φ(t) Σ t^(2k+1) / (1·3·…·(2k+1))
        let mut term = t;
        let mut sum = t;
        let mut k = 0.0;
        while term.abs() > 1e-18 * sum.abs().max(1e-300) {
            k += 1.0;
            term *= t * t / (2.0 * k + 1.0);
            sum += term;
        }
        0.5 - phi_density(t) * sum
    } else {
        // φ(t) / (t + 1/(t + 2/(t + 3/(t + …)))) evaluated bottom-up
        let terms = if t >= 3.0 {
            100
        } else if t >= 2.0 {
            300
        } else if t >= 1.0 {
            900
        } else {
            2500
        };
        let mut frac = t;
        for k in (1..terms).rev() {
            frac = t + k as f64 / frac;
        }
        phi_density(t) / frac
    }
}

pub fn phi(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 - upper_tail(x)
    } else {
        upper_tail(-x)
    }
}

/// `Φ⁻¹(u)`: bisection on [`phi`] down to a narrow bracket, then Newton
/// steps kept inside it.
pub fn phi_inverse(u: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    while hi - lo > 1e-2 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..5 {
        let next = (x - (phi(x) - u) / phi_density(x)).clamp(lo, hi);
        if next == x {
            break;
        }
        x = next;
    }
    x
}

/// Adaptive Simpson quadrature.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `∫_0^x (μ + σ Φ⁻¹(t)) dt` at each point of an ascending grid in `[0, 1]`,
/// by quadrature accumulated between neighboring points. The logarithmic
/// endpoint singularities are removed with `t = e^{-w}` on `[0, 1/2]` and
/// `t = 1 - e^{-w}` on `[1/2, 1]`.
pub fn inverse_integral_grid(mu: f64, sigma: f64, xs: &[f64]) -> Vec<f64> {
    const W_MAX: f64 = 60.0;
    const TOL: f64 = 1e-12;
    let finv = |t: f64| mu + sigma * phi_inverse(t);
    let low = |w: f64| finv((-w).exp()) * (-w).exp();
    let high = |w: f64| finv(-(-w).exp_m1()) * (-w).exp();
    let w_of = |x: f64| -x.ln();
    let w_of_high = |x: f64| -(-x).ln_1p();
    let half = w_of(0.5);
    let lower_half = simpson(&low, half, W_MAX, TOL);
    let upper_half = simpson(&high, half, W_MAX, TOL);
    let mut out = vec![0.0; xs.len()];
    // lower part, walking up from 0
    let mut acc = 0.0;
    let mut w_prev = W_MAX;
    for (k, &x) in xs.iter().enumerate().filter(|(_, &x)| x <= 0.5) {
        if x <= 0.0 {
            continue;
        }
        let w = w_of(x).min(W_MAX);
        acc += simpson(&low, w, w_prev, TOL);
        w_prev = w;
        out[k] = acc;
    }
    // upper part, walking down from 1
    let mut acc = 0.0;
    let mut w_prev = W_MAX;
    for (k, &x) in xs.iter().enumerate().rev().filter(|(_, &x)| x > 0.5) {
        if x >= 1.0 {
            out[k] = lower_half + upper_half;
            continue;
        }
        let w = w_of_high(x).min(W_MAX);
        acc += simpson(&high, w, w_prev, TOL);
        w_prev = w;
        out[k] = lower_half + upper_half - acc;
    }
    out
}

pub fn inverse_integral(mu: f64, sigma: f64, x: f64) -> f64 {
    inverse_integral_grid(mu, sigma, &[x])[0]
}

/// Nodes reachable from `origin` along undirected edges.
pub fn bfs(n: usize, edges: &[(u32, u32)], origin: usize) -> Vec<bool> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u as usize].push(v as usize);
        adj[v as usize].push(u as usize);
    }
    let mut seen = vec![false; n];
    seen[origin] = true;
    let mut queue = VecDeque::from([origin]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Roots of `h` on `[a, b]`: sign changes on a uniform grid, refined by
/// bisection.
pub fn roots<H: Fn(f64) -> f64>(h: H, a: f64, b: f64, grid: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let xs: Vec<f64> = (0..=grid)
        .map(|k| a + (b - a) * k as f64 / grid as f64)
        .collect();
    for w in xs.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (hlo, hhi) = (h(lo), h(hi));
        if hlo == 0.0 {
            out.push(lo);
            continue;
        }
        if hhi == 0.0 || hlo.signum() == hhi.signum() {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid).signum() == hlo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    if h(b) == 0.0 {
        out.push(b);
    }
    out
}

/// Deterministic uniform stream for test inputs.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6_364_136_223_846_793_005)
            .wrapping_add(1_442_695_040_888_963_407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn below(&mut self, n: usize) -> usize {
        ((self.next_f64() * n as f64) as usize).min(n - 1)
    }
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        0.5 * (xs[k / 2 - 1] + xs[k / 2])
    }
}

#[test]
fn oracle_self_checks() {
    assert!((phi(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
    assert!((phi(-4.0) - 3.167_124_183_311_986e-5).abs() < 1e-18);
    assert!((phi(5.0) - 0.999_999_713_348_428_1).abs() < 1e-15);
    assert!((phi_inverse(0.841_344_746_068_542_9) - 1.0).abs() < 1e-12);
    // G(1) = μ and G(1/2) = μ/2 - σ φ(0)
    assert!((inverse_integral(100.0, 25.0, 1.0) - 100.0).abs() < 1e-9);
    assert!((inverse_integral(100.0, 25.0, 0.5) - (50.0 - 25.0 * INV_SQRT_2PI)).abs() < 1e-9);
}
