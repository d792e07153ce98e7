//! Orthonormal polynomials from the Stieltjes procedure and series in them.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::ChebPoly;
use crate::quad::gauss_legendre;
use crate::IntervalSystem;

/// Three-term recurrence `√β_{k+1} P_{k+1} = (x − α_k) P_k − √β_k P_{k−1}`
/// with `β_0 = ∫ dμ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoSystem {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

/// Nodes `x_i` and weights of the `θ`-midpoint rule on every band.
pub(crate) fn theta_rule(sys: &IntervalSystem, m: usize, dens: &dyn Fn(usize, f64) -> f64) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::with_capacity(m * sys.l());
    let mut ws = Vec::with_capacity(m * sys.l());
    let h = PI / m as f64;
    for k in 0..sys.l() {
        for i in 0..m {
            let t = (i as f64 + 0.5) * h;
            xs.push(sys.band_point(k, t));
            ws.push(h * dens(k, t));
        }
    }
    (xs, ws)
}

impl OrthoSystem {
    /// Stieltjes procedure for `dμ = f(k, θ) dθ` on band `k`.
    ///
    /// `f` must already include `dx/dθ`; it is smooth in `θ` for every
    /// density with inverse square root or square root behavior at the
    /// endpoints, so the midpoint rule converges geometrically.
    pub fn from_theta_density(
        sys: &IntervalSystem,
        n: usize,
        dens: &dyn Fn(usize, f64) -> f64,
    ) -> Result<Self> {
        let (xs, ws) = theta_rule(sys, 4 * n + 400, dens);
        Self::stieltjes(&xs, &ws, n)
    }

    /// Stieltjes procedure on a discrete measure.
    pub fn stieltjes(xs: &[f64], ws: &[f64], n: usize) -> Result<Self> {
        let mu0: f64 = ws.iter().sum();
        if !(mu0 > 0.0) || !mu0.is_finite() {
            return Err(Error::InvalidWeight("density must have positive finite mass".into()));
        }
        let mut alpha = Vec::with_capacity(n + 1);
        let mut beta = vec![mu0];
        let mut prev = vec![0.0; xs.len()];
        let mut cur = vec![1.0 / mu0.sqrt(); xs.len()];
        for k in 0..=n {
            let a: f64 = (0..xs.len()).map(|i| ws[i] * xs[i] * cur[i] * cur[i]).sum();
            alpha.push(a);
            if k == n {
                break;
            }
            let sb = beta[k].sqrt();
            let mut next: Vec<f64> = (0..xs.len())
                .map(|i| (xs[i] - a) * cur[i] - if k == 0 { 0.0 } else { sb * prev[i] })
                .collect();
            let b: f64 = (0..xs.len()).map(|i| ws[i] * next[i] * next[i]).sum();
            if !(b > 0.0) {
                return Err(Error::NoConvergence {
                    what: "Stieltjes procedure",
                    iterations: k,
                    residual: b,
                });
            }
            let s = b.sqrt();
            next.iter_mut().for_each(|v| *v /= s);
            beta.push(b);
            prev = std::mem::replace(&mut cur, next);
        }
        Ok(OrthoSystem { alpha, beta })
    }

    /// Orthonormal polynomials for `dx/(π √|H(x)|)`; well conditioned on `E`
    /// and in the gaps.
    pub fn equilibrium_like(sys: &IntervalSystem, n: usize) -> Result<Self> {
        Self::from_theta_density(sys, n, &|k, t| 1.0 / (PI * sys.sqrt_abs_other(2 * k, sys.band_point(k, t))))
    }

    /// Orthonormal polynomials for a density `w(x) dx` that is smooth on
    /// every closed band.
    pub fn from_density<F: Fn(f64) -> f64>(sys: &IntervalSystem, n: usize, w: F) -> Result<Self> {
        let (t, tw) = gauss_legendre(2 * n + 200);
        let mut xs = Vec::new();
        let mut ws = Vec::new();
        for k in 0..sys.l() {
            let (lo, hi) = sys.band(k);
            let (m, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for (ti, wi) in t.iter().zip(&tw) {
                let x = m + r * ti;
                xs.push(x);
                ws.push(r * wi * w(x));
            }
        }
        Self::stieltjes(&xs, &ws, n)
    }

    pub fn max_degree(&self) -> usize {
        self.alpha.len() - 1
    }

    /// `P_0(z), …, P_n(z)`.
    pub fn eval_all_c(&self, n: usize, z: Complex64) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(n + 1);
        let mut prev = Complex64::new(0.0, 0.0);
        let mut cur = Complex64::new(1.0 / self.beta[0].sqrt(), 0.0);
        out.push(cur);
        for k in 0..n {
            let next = ((z - self.alpha[k]) * cur - if k == 0 { prev } else { prev * self.beta[k].sqrt() })
                / self.beta[k + 1].sqrt();
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }

    pub fn eval_c(&self, n: usize, z: Complex64) -> Complex64 {
        *self.eval_all_c(n, z).last().unwrap()
    }

    pub fn eval(&self, n: usize, x: f64) -> f64 {
        *self.eval_all(n, x).last().unwrap()
    }

    /// `P_0(x), …, P_n(x)`.
    pub fn eval_all(&self, n: usize, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        let mut prev = 0.0;
        let mut cur = 1.0 / self.beta[0].sqrt();
        out.push(cur);
        for k in 0..n {
            let next = ((x - self.alpha[k]) * cur - if k == 0 { 0.0 } else { prev * self.beta[k].sqrt() })
                / self.beta[k + 1].sqrt();
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }

    /// `Σ c_k P_k(x)` by the Clenshaw recurrence.
    pub fn series(&self, c: &[f64], x: f64) -> f64 {
        let n = match c.len() {
            0 => return 0.0,
            m => m - 1,
        };
        // b_k = c_k + (x − α_k)/√β_{k+1} b_{k+1} − √β_{k+1}/√β_{k+2} b_{k+2}
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for k in (0..=n).rev() {
            let a = if k < n { (x - self.alpha[k]) / self.beta[k + 1].sqrt() } else { 0.0 };
            let g = if k + 1 < n { self.beta[k + 1].sqrt() / self.beta[k + 2].sqrt() } else { 0.0 };
            let b = c[k] + a * b1 - g * b2;
            b2 = b1;
            b1 = b;
        }
        b1 / self.beta[0].sqrt()
    }

    /// Hull Chebyshev coefficients of `Σ c_k P_k` in `u = (x − center)/scale`.
    pub fn to_cheb(&self, c: &[f64], center: f64, scale: f64) -> ChebPoly {
        let n = c.len().saturating_sub(1);
        let mut out = vec![0.0; n + 1];
        let mut prev = vec![0.0; n + 2];
        let mut cur = vec![0.0; n + 2];
        cur[0] = 1.0 / self.beta[0].sqrt();
        for k in 0..=n {
            for (o, v) in out.iter_mut().zip(&cur) {
                *o += c[k] * v;
            }
            if k == n {
                break;
            }
            // x T_i(u) = center T_i + scale (T_{i+1} + T_{|i−1|})/2
            let mut next = vec![0.0; n + 2];
            for i in 0..=k {
                let v = cur[i];
                next[i] += (center - self.alpha[k]) * v;
                if i == 0 {
                    next[1] += scale * v;
                } else {
                    next[i + 1] += 0.5 * scale * v;
                    next[i - 1] += 0.5 * scale * v;
                }
            }
            let sb = self.beta[k + 1].sqrt();
            let sp = if k == 0 { 0.0 } else { self.beta[k].sqrt() };
            for i in 0..=k + 1 {
                next[i] = (next[i] - sp * prev[i]) / sb;
            }
            prev = std::mem::replace(&mut cur, next);
        }
        ChebPoly::new(center, scale, out)
    }

    /// `min_q ∫ |x^n − q|² dμ = β_0 β_1 ⋯ β_n`.
    pub fn l2_deviation(&self, n: usize) -> f64 {
        self.beta[..=n].iter().product()
    }

    /// Leading coefficient of the orthonormal `P_n`.
    pub fn leading(&self, n: usize) -> f64 {
        1.0 / self.l2_deviation(n).sqrt()
    }

    /// `max |⟨P_i, P_j⟩ − δ_ij|` for `i, j ≤ n` on a finer independent rule.
    pub fn gram_residual(&self, sys: &IntervalSystem, n: usize, dens: &dyn Fn(usize, f64) -> f64) -> f64 {
        let m = 8 * n + 1003;
        let (xs, ws) = theta_rule(sys, m, dens);
        let mut g = DMatrix::<f64>::zeros(n + 1, n + 1);
        for (x, w) in xs.iter().zip(&ws) {
            let p = self.eval_all_c(n, Complex64::new(*x, 0.0));
            for i in 0..=n {
                for j in 0..=n {
                    g[(i, j)] += w * p[i].re * p[j].re;
                }
            }
        }
        let mut worst = 0.0f64;
        for i in 0..=n {
            for j in 0..=n {
                let d = g[(i, j)] - if i == j { 1.0 } else { 0.0 };
                worst = worst.max(d.abs());
            }
        }
        worst
    }
}

/// `factor · Σ c_k P_k(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoSeries {
    pub basis: OrthoSystem,
    pub coef: Vec<f64>,
    pub factor: f64,
}

impl OrthoSeries {
    pub fn eval(&self, x: f64) -> f64 {
        self.factor * self.basis.series(&self.coef, x)
    }

    pub fn to_cheb(&self, center: f64, scale: f64) -> ChebPoly {
        let mut p = self.basis.to_cheb(&self.coef, center, scale);
        p.coef.iter_mut().for_each(|v| *v *= self.factor);
        p
    }
}
