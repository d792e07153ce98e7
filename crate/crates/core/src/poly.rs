//! Small real polynomials stored in a shifted, scaled variable
//! `u = (x − center)/scale`, plus Chebyshev helpers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `p(x) = Σ coef[s]·u^s` with `u = (x − center)/scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalPoly {
    pub center: f64,
    pub scale: f64,
    pub coef: Vec<f64>,
}

impl LocalPoly {
    pub fn new(center: f64, scale: f64, coef: Vec<f64>) -> Self {
        LocalPoly { center, scale, coef }
    }

    pub fn zero(center: f64, scale: f64) -> Self {
        LocalPoly::new(center, scale, Vec::new())
    }

    pub fn u(&self, x: f64) -> f64 {
        (x - self.center) / self.scale
    }

    pub fn eval(&self, x: f64) -> f64 {
        let u = self.u(x);
        self.coef.iter().rev().fold(0.0, |acc, c| acc * u + c)
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        let u = (z - self.center) / self.scale;
        self.coef
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * u + c)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coef.iter().rposition(|c| *c != 0.0)
    }

    /// Coefficients in the plain monomial basis of `x`, ascending.
    pub fn to_monomial(&self) -> Vec<f64> {
        let n = self.coef.len();
        let mut out = vec![0.0; n];
        // Horner in polynomial arithmetic: p = c_{n-1}; p = p·u + c_s.
        // u = (x − center)/scale as a linear polynomial in x.
        let a1 = 1.0 / self.scale;
        let a0 = -self.center / self.scale;
        let mut p: Vec<f64> = Vec::new();
        for &c in self.coef.iter().rev() {
            let mut q = vec![0.0; p.len() + 1];
            for (i, &pi) in p.iter().enumerate() {
                q[i] += pi * a0;
                q[i + 1] += pi * a1;
            }
            q[0] += c;
            p = q;
        }
        out[..p.len().min(n)].copy_from_slice(&p[..p.len().min(n)]);
        out
    }

    /// `Σ_i w_i p_i` for polynomials sharing the same local variable.
    pub fn combine(parts: &[(f64, &LocalPoly)]) -> LocalPoly {
        let (center, scale) = parts
            .first()
            .map(|(_, p)| (p.center, p.scale))
            .unwrap_or((0.0, 1.0));
        let len = parts.iter().map(|(_, p)| p.coef.len()).max().unwrap_or(0);
        let mut coef = vec![0.0; len];
        for (w, p) in parts {
            for (i, c) in p.coef.iter().enumerate() {
                coef[i] += w * c;
            }
        }
        LocalPoly::new(center, scale, coef)
    }
}

/// `Σ c_k T_k(u)` by Clenshaw's recurrence.
pub fn chebyshev_eval(c: &[f64], u: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * u * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + u * b1 - b2
}

/// Complex-argument Clenshaw evaluation.
pub fn chebyshev_eval_c(c: &[f64], u: Complex64) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    let mut b1 = zero;
    let mut b2 = zero;
    for &ck in c.iter().skip(1).rev() {
        let b0 = u * b1 * 2.0 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    u * b1 - b2 + c.first().copied().unwrap_or(0.0)
}

/// Row `[T_0(u), …, T_{n}(u)]`.
pub fn chebyshev_row(u: f64, n: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(n + 1);
    t.push(1.0);
    if n >= 1 {
        t.push(u);
    }
    for k in 2..=n {
        let v = 2.0 * u * t[k - 1] - t[k - 2];
        t.push(v);
    }
    t
}

/// Polynomial `Σ coef[k]·T_k(u)` in the hull variable `u = (x − center)/scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebPoly {
    pub center: f64,
    pub scale: f64,
    pub coef: Vec<f64>,
}

impl ChebPoly {
    pub fn new(center: f64, scale: f64, coef: Vec<f64>) -> Self {
        ChebPoly { center, scale, coef }
    }

    pub fn u(&self, x: f64) -> f64 {
        (x - self.center) / self.scale
    }

    pub fn eval(&self, x: f64) -> f64 {
        chebyshev_eval(&self.coef, self.u(x))
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        chebyshev_eval_c(&self.coef, (z - self.center) / self.scale)
    }

    pub fn degree(&self) -> usize {
        self.coef.iter().rposition(|c| *c != 0.0).unwrap_or(0)
    }

    /// Leading coefficient with respect to `x`.
    pub fn leading(&self) -> f64 {
        let n = self.degree();
        let two = if n == 0 { 1.0 } else { 2f64.powi(n as i32 - 1) };
        self.coef[n] * two / self.scale.powi(n as i32)
    }

    /// Coefficients in the monomial basis of `x`, ascending.
    pub fn to_monomial(&self) -> Vec<f64> {
        let n = self.coef.len();
        // Monomial coefficients of T_k(u), then u ↦ (x − center)/scale.
        let mut in_u = vec![0.0; n];
        let mut tkm1: Vec<f64> = vec![1.0];
        let mut tk: Vec<f64> = vec![0.0, 1.0];
        for (k, &ck) in self.coef.iter().enumerate() {
            let t = match k {
                0 => tkm1.clone(),
                1 => tk.clone(),
                _ => {
                    let mut next = vec![0.0; k + 1];
                    for (i, v) in tk.iter().enumerate() {
                        next[i + 1] += 2.0 * v;
                    }
                    for (i, v) in tkm1.iter().enumerate() {
                        next[i] -= v;
                    }
                    tkm1 = std::mem::replace(&mut tk, next);
                    tk.clone()
                }
            };
            for (i, v) in t.iter().enumerate() {
                in_u[i] += ck * v;
            }
        }
        LocalPoly::new(self.center, self.scale, in_u).to_monomial()
    }

    /// Complex roots from the eigenvalues of the colleague matrix.
    pub fn roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let c = &self.coef;
        let us: Vec<Complex64> = if n == 1 {
            vec![Complex64::new(-c[0] / c[1], 0.0)]
        } else {
            let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
            m[(0, 1)] = 1.0;
            for i in 1..n {
                m[(i, i - 1)] = 0.5;
                if i + 1 < n {
                    m[(i, i + 1)] = 0.5;
                }
            }
            for j in 0..n {
                m[(n - 1, j)] -= c[j] / (2.0 * c[n]);
            }
            m.complex_eigenvalues().iter().copied().collect()
        };
        us.into_iter()
            .map(|u| u * self.scale + self.center)
            .collect()
    }
}
