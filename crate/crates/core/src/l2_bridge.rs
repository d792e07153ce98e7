//! Orthonormal polynomials for edge-class weights and the comparison of
//! `L∞` minimum deviations of `x^{2n}` with `L2` deviations of `x^n`.
//!
//! An edge-class weight has density `|R(x)|/(π √|H(x)| W(x))` on `E`, where
//! the monic `R` of degree `l − 1` vanishes at one endpoint of every gap and
//! optionally carries the extra factor `(a_R − x)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inversion::solve_for_n;
use crate::poly::ChebPoly;
use crate::ortho::OrthoSystem;
use crate::potential::PotentialTable;
use crate::remez::{minimax_monic, RemezConfig};
use crate::szego::{gamma_n, log_moments, Weight};
use crate::IntervalSystem;

/// `R` from the gap-end choice `mask` (bit `j` set: `R(a_{2j+2}) = 0`,
/// clear: `R(a_{2j+1}) = 0`), with the optional factor `(a_R − x)`.
#[derive(Debug, Clone)]
pub struct EdgeClassWeight {
    sys: IntervalSystem,
    mask: u32,
    right_factor: bool,
    zeros: Vec<f64>,
    weight: Weight,
}

impl EdgeClassWeight {
    pub fn new(sys: &IntervalSystem, mask: u32, right_factor: bool, weight: &Weight) -> Result<Self> {
        let m = sys.l() - 1;
        if m < 32 && mask >> m != 0 {
            return Err(Error::InvalidArgument(format!("mask {mask:#b} has more than {m} bits")));
        }
        let a = sys.endpoints();
        let zeros = (0..m)
            .map(|j| if mask >> j & 1 == 1 { a[2 * j + 2] } else { a[2 * j + 1] })
            .collect();
        Ok(EdgeClassWeight {
            sys: sys.clone(),
            mask,
            right_factor,
            zeros,
            weight: weight.clone(),
        })
    }

    /// The unique member whose zero count on band `k` has parity `σ_k`,
    /// `k = 0..l−2`.
    pub fn from_sigma(sys: &IntervalSystem, sigma: &[u8], right_factor: bool, weight: &Weight) -> Result<Self> {
        let m = sys.l() - 1;
        if sigma.len() != m {
            return Err(Error::InvalidArgument("σ length must be l − 1".into()));
        }
        let mut mask = 0u32;
        // Band k holds the right-end choice of gap k−1 and the left-end choice of gap k.
        let mut carry = 0u8;
        for (k, &s) in sigma.iter().enumerate() {
            let left_of_gap_k = (s + carry) % 2;
            if left_of_gap_k == 0 {
                mask |= 1 << k;
                carry = 1;
            } else {
                carry = 0;
            }
        }
        Self::new(sys, mask, right_factor, weight)
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn right_factor(&self) -> bool {
        self.right_factor
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    /// Degree of `R` including the optional factor.
    pub fn degree(&self) -> usize {
        self.zeros.len() + usize::from(self.right_factor)
    }

    pub fn r_c(&self, z: Complex64) -> Complex64 {
        let mut v = Complex64::new(1.0, 0.0);
        for &a in &self.zeros {
            v *= z - a;
        }
        if self.right_factor {
            v *= Complex64::new(self.sys.right(), 0.0) - z;
        }
        v
    }

    pub fn r(&self, x: f64) -> f64 {
        self.r_c(Complex64::new(x, 0.0)).re
    }

    /// Zeros of `R` on each closed band.
    pub fn band_zero_counts(&self) -> Vec<usize> {
        let l = self.sys.l();
        let mut out = vec![0; l];
        let mut all = self.zeros.clone();
        if self.right_factor {
            all.push(self.sys.right());
        }
        for z in all {
            for (k, o) in out.iter_mut().enumerate() {
                let (lo, hi) = self.sys.band(k);
                if z == lo || z == hi {
                    *o += 1;
                }
            }
        }
        out
    }

    /// Orthonormal polynomials up to degree `n`.
    pub fn ortho(&self, n: usize) -> Result<OrthoSystem> {
        OrthoSystem::from_theta_density(&self.sys, n, &|k, t| self.theta_density(k, t))
    }

    /// Density `|R|/(π √|H| W)` multiplied by `dx/dθ` at angle `θ` of band `k`.
    fn theta_density(&self, k: usize, theta: f64) -> f64 {
        let x = self.sys.band_point(k, theta);
        self.r(x).abs() / (PI * self.sys.sqrt_abs_other(2 * k, x) * self.weight.eval(x))
    }

    /// Polynomial weight `ρ` or an error for non-polynomial weights.
    fn rho_c(&self, z: Complex64) -> Result<Complex64> {
        match &self.weight {
            Weight::Unit => Ok(Complex64::new(1.0, 0.0)),
            Weight::Poly(p) => Ok(p.eval_c(z)),
            _ => Err(Error::InvalidWeight("a polynomial weight is required".into())),
        }
    }
}

/// `E_{n−1,2}(x^n; |R|/(π √|H| W))`.
pub fn l2_deviation(w: &EdgeClassWeight, n: usize) -> Result<f64> {
    Ok(w.ortho(n)?.l2_deviation(n))
}

/// Which degree pairing the comparison uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BridgePart {
    /// `x^{2n}` against `R` of degree `l − 1`.
    Even,
    /// `x^{2n+1}` against `(a_R − x) R`.
    Odd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeCandidate {
    pub mask: u32,
    pub value: f64,
    /// Pell signature at the zeros of `g`, when the reconstruction succeeds.
    pub delta: Option<Vec<i8>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeReport {
    pub n: usize,
    pub part: BridgePart,
    /// Monic `L∞` minimum deviation of degree `2n` or `2n + 1`.
    pub lhs: f64,
    /// Largest `L2` deviation over all edge-class choices.
    pub rhs: f64,
    pub ratio: f64,
    pub sigma: Vec<u8>,
    pub sigma_mask: u32,
    pub argmax_mask: u32,
    pub argmax_is_sigma: bool,
    /// Mask whose Pell signature is `−1` at every `x_j`.
    pub delta_mask: Option<u32>,
    pub candidates: Vec<BridgeCandidate>,
}

/// Compare `E_{2n−1,∞}(x^{2n}; W)` (or the odd variant) with the largest
/// edge-class `L2` deviation of `x^n`.
pub fn bridge_compare(table: &PotentialTable, w: &Weight, n: usize, part: BridgePart) -> Result<BridgeReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let sys = table.system();
    let m = sys.l() - 1;
    if m > 6 {
        return Err(Error::InvalidArgument("at most 6 gaps are enumerated".into()));
    }
    let w = w.prepare(sys)?;
    let deg = match part {
        BridgePart::Even => 2 * n,
        BridgePart::Odd => 2 * n + 1,
    };
    let lhs = minimax_monic(sys, &w, deg, table.omega_inf(), &RemezConfig::default())?.deviation;
    let right = part == BridgePart::Odd;
    let candidates = (0..1u32 << m)
        .map(|mask| {
            let e = EdgeClassWeight::new(sys, mask, right, &w)?;
            Ok(BridgeCandidate {
                mask,
                value: l2_deviation(&e, n)?,
                delta: pell_verify(&e, n).ok().map(|r| r.delta),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = candidates
        .iter()
        .fold(&candidates[0], |b, c| if c.value > b.value { c } else { b });
    let delta_mask = candidates
        .iter()
        .find(|c| c.delta.as_ref().is_some_and(|d| d.iter().all(|&v| v < 0)))
        .map(|c| c.mask);
    let lm = log_moments(table, &w)?;
    let sigma = gamma_n(table, &lm, deg).sigma;
    let sigma_mask = EdgeClassWeight::from_sigma(sys, &sigma, right, &w)?.mask();
    Ok(BridgeReport {
        n,
        part,
        lhs,
        rhs: best.value,
        ratio: lhs / best.value,
        sigma,
        sigma_mask,
        argmax_mask: best.mask,
        argmax_is_sigma: best.mask == sigma_mask,
        delta_mask,
        candidates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PellReport {
    pub n: usize,
    pub mask: u32,
    /// Points `x_{j,n}`, the zeros of `g`, ascending.
    pub x: Vec<f64>,
    /// `+1` when `R_1 + √H R_2` has a pole at `x_j`, `−1` for a zero.
    pub delta: Vec<i8>,
    pub g_leading: f64,
    /// Relative least squares defect of `R P² = 2ρg` at the zeros of `S`.
    pub g_fit_residual: f64,
    /// Relative size of the non-polynomial part of `Q`.
    pub q_tail: f64,
    /// `max |R_1² − H R_2² − 1|/(1 + |R_1|²)` on a complex grid near `E`.
    pub pell_residual: f64,
}

/// Reconstruct `g` and `Q` in `R P_n² − S Q² = 2ρg` with `S = H/R` and
/// check the normalized identity `R_1² − H R_2² = 1`.
pub fn pell_verify(w: &EdgeClassWeight, n: usize) -> Result<PellReport> {
    let sys = &w.sys;
    let l = sys.l();
    let ortho = w.ortho(n)?;
    let p = |z: Complex64| ortho.eval_c(n, z);

    // Zeros of S: endpoints that are not zeros of R.
    let mut rz: Vec<f64> = w.zeros.clone();
    if w.right_factor {
        rz.push(sys.right());
    }
    let alphas: Vec<f64> = sys
        .endpoints()
        .iter()
        .copied()
        .filter(|a| !rz.contains(a))
        .collect();
    let (center, scale) = (sys.center(), sys.half_width());
    let basis = |x: f64, s: usize| {
        let mut c = vec![0.0; s + 1];
        c[s] = 1.0;
        ChebPoly::new(center, scale, c).eval(x)
    };
    let mut a = DMatrix::<f64>::zeros(alphas.len(), l);
    let mut b = DVector::<f64>::zeros(alphas.len());
    for (i, &x) in alphas.iter().enumerate() {
        let rho = w.rho_c(Complex64::new(x, 0.0))?.re;
        for s in 0..l {
            a[(i, s)] = 2.0 * rho * basis(x, s);
        }
        b[i] = w.r(x) * p(Complex64::new(x, 0.0)).re.powi(2);
    }
    let svd = a.clone().svd(true, true);
    let coef = svd
        .solve(&b, 1e-14)
        .map_err(|_| Error::Singular("edge-class g fit"))?;
    let fit = &a * &coef - &b;
    let g_fit_residual = fit.amax() / b.amax().max(f64::MIN_POSITIVE);
    let g = ChebPoly::new(center, scale, coef.as_slice().to_vec());
    let g_leading = g.leading();
    let mut x: Vec<f64> = g.roots().iter().map(|r| r.re).collect();
    x.sort_by(|u, v| u.partial_cmp(v).unwrap());

    // Q = ±√(R (R P² − 2ρg)/H) sampled on the ellipse `u = (ϱe^{it} + e^{−it}/ϱ)/2`
    // with the sign continued along the contour; the Fourier coefficient of
    // `e^{ikt}` is `c_k ϱ^k/2` for the hull Chebyshev coefficients `c_k`.
    let qdeg = (n + w.degree()).checked_sub(l).ok_or_else(|| Error::InvalidArgument("n too small".into()))?;
    let kk = (8 * qdeg + 64).next_power_of_two().max(256);
    let varrho = 1.15f64;
    let mut samples = Vec::with_capacity(kk);
    let mut prev: Option<Complex64> = None;
    for i in 0..kk {
        let e = Complex64::from_polar(1.0, 2.0 * PI * i as f64 / kk as f64);
        let z = center + scale * 0.5 * (varrho * e + 1.0 / (varrho * e));
        let pz = p(z);
        let rz = w.r_c(z);
        let f = rz * (rz * pz * pz - 2.0 * w.rho_c(z)? * g.eval_c(z)) / sys.h_poly(z);
        let mut v = f.sqrt();
        if let Some(q) = prev {
            if (v - q).norm() > (v + q).norm() {
                v = -v;
            }
        }
        prev = Some(v);
        samples.push(v);
    }
    FftPlanner::<f64>::new().plan_fft_forward(kk).process(&mut samples);
    let fc: Vec<Complex64> = samples[..kk / 2].iter().map(|v| v / kk as f64).collect();
    let head: f64 = fc[..=qdeg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let q_tail = fc[qdeg + 1..].iter().map(|c| c.norm()).fold(0.0, f64::max) / head;
    let mut qcoef: Vec<f64> = fc[..=qdeg]
        .iter()
        .enumerate()
        .map(|(k, c)| if k == 0 { c.re } else { 2.0 * c.re / varrho.powi(k as i32) })
        .collect();
    // Sign: Q ~ R P/√H far to the right of E.
    let zf = Complex64::new(sys.right() + 4.0 * scale, 0.0);
    if (ChebPoly::new(center, scale, qcoef.clone()).eval_c(zf) * (w.r_c(zf) * p(zf) / sys.sqrt_h(zf)).conj()).re < 0.0 {
        qcoef.iter_mut().for_each(|c| *c = -*c);
    }
    let qpoly = ChebPoly::new(center, scale, qcoef);
    let q_eval = |z: Complex64| qpoly.eval_c(z);

    // Off E: the identity is exact there and free of the cancellation in
    // R_1 on the bands.
    let mut pell_residual = 0.0f64;
    let (lo, hi) = (sys.left(), sys.right());
    for i in 0..=400 {
        let xr = lo - 0.1 * scale + (hi - lo + 0.2 * scale) * i as f64 / 400.0;
        for im in [0.05 * scale, 0.3 * scale] {
            let z = Complex64::new(xr, im);
            let rg = w.rho_c(z)? * g.eval_c(z);
            let r1 = w.r_c(z) * p(z) * p(z) / rg - 1.0;
            let r2 = q_eval(z) * p(z) / rg;
            let d = r1 * r1 - sys.h_poly(z) * r2 * r2 - 1.0;
            pell_residual = pell_residual.max(d.norm() / (1.0 + r1.norm_sqr()));
        }
    }

    let delta = x
        .iter()
        .map(|&xj| {
            let z = Complex64::new(xj, 0.0);
            let s = w.r_c(z) * p(z) / (sys.sqrt_h(z) * q_eval(z));
            if s.re >= 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();

    Ok(PellReport {
        n,
        mask: w.mask,
        x,
        delta,
        g_leading,
        g_fit_residual,
        q_tail,
        pell_residual,
    })
}

/// `max_j |x_{j,n} − c_{j,2n}|` for the edge-class reconstruction of `w`.
pub fn gap_point_agreement(table: &PotentialTable, w: &EdgeClassWeight, n: usize) -> Result<f64> {
    let rep = pell_verify(w, n)?;
    let lm = log_moments(table, &w.weight)?;
    let deg = if w.right_factor { 2 * n + 1 } else { 2 * n };
    let sol = solve_for_n(table, &lm, deg)?;
    if rep.x.len() != sol.c.len() {
        return Err(Error::InvalidArgument("gap point counts differ".into()));
    }
    Ok(rep
        .x
        .iter()
        .zip(&sol.c)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
