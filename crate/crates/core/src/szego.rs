//! Weights on `E`, their log-moments, the phase data `γ_{k,n}`, `σ_{k,n}`,
//! and the multi-valued Szegő function `𝒲` with `|𝒲^±| = W` on `E`.
//!
//! `𝒲` is built as
//! `log 𝒲 = μ_0 + Σ_j μ_j [Log(z − ĉ_j) + G(z; ĉ_j) − G(z; ∞)] + F(z)`,
//! where `ĉ_j` are the gap midpoints and `F` is the single-valued Cauchy
//! transform `√H(z) ∫_E u(x) dx/((z − x) h(x))` of the residual log-weight
//! `u`. All values are continuous on the closed upper half-plane and real
//! to the right of `E`; lower values follow by conjugation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::domain::{IntervalSystem, Location};
use crate::error::{Error, Result};
use crate::poly::{chebyshev_row, ChebPoly};
use crate::potential::{Abelian, PoleGreen, PotentialTable};
use crate::quad::integrate;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// One root of a polynomial weight; non-real roots come in conjugate pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    #[serde(default = "one")]
    pub mult: u32,
}

fn one() -> u32 {
    1
}

fn plus_one() -> f64 {
    1.0
}

/// `ρ(x) = sign·scale·∏ (x − w_j)^{ν_j}`, positive on `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyWeight {
    sign: f64,
    scale: f64,
    roots: Vec<Root>,
}

impl PolyWeight {
    pub fn new(sign: f64, scale: f64, roots: Vec<Root>) -> Result<Self> {
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::InvalidWeight("sign must be ±1".into()));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidWeight("scale must be positive".into()));
        }
        for r in &roots {
            if r.mult == 0 || !r.re.is_finite() || !r.im.is_finite() {
                return Err(Error::InvalidWeight("bad root entry".into()));
            }
            if r.im != 0.0 {
                let partner: u32 = roots
                    .iter()
                    .filter(|q| q.re == r.re && q.im == -r.im)
                    .map(|q| q.mult)
                    .sum();
                let own: u32 = roots
                    .iter()
                    .filter(|q| q.re == r.re && q.im == r.im)
                    .map(|q| q.mult)
                    .sum();
                if partner != own {
                    return Err(Error::InvalidWeight(format!(
                        "root {}{:+}i lacks its conjugate",
                        r.re, r.im
                    )));
                }
            }
        }
        Ok(PolyWeight { sign, scale, roots })
    }

    /// Weight with all roots simple, from a root list.
    pub fn from_roots(lead: f64, roots: &[Complex64]) -> Result<Self> {
        let rs = roots
            .iter()
            .map(|z| Root { re: z.re, im: z.im, mult: 1 })
            .collect();
        PolyWeight::new(lead.signum(), lead.abs(), rs)
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    /// Total degree `ν`.
    pub fn degree(&self) -> u32 {
        self.roots.iter().map(|r| r.mult).sum()
    }

    pub fn leading(&self) -> f64 {
        self.sign * self.scale
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_c(c(x)).re
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        self.roots.iter().fold(c(self.leading()), |acc, r| {
            acc * (z - Complex64::new(r.re, r.im)).powu(r.mult)
        })
    }

    /// Real roots with multiplicities.
    pub fn real_roots(&self) -> Vec<(f64, u32)> {
        self.roots
            .iter()
            .filter(|r| r.im == 0.0)
            .map(|r| (r.re, r.mult))
            .collect()
    }

    /// Roots in the upper half-plane; each stands for a conjugate pair.
    pub fn upper_roots(&self) -> Vec<(Complex64, u32)> {
        self.roots
            .iter()
            .filter(|r| r.im > 0.0)
            .map(|r| (Complex64::new(r.re, r.im), r.mult))
            .collect()
    }
}

/// Sampled weight interpolated per band by Floater–Hormann rational
/// interpolation of order up to 3.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWeight {
    grid: Vec<f64>,
    values: Vec<f64>,
    segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq)]
struct Segment {
    lo: f64,
    hi: f64,
    x: Vec<f64>,
    y: Vec<f64>,
    w: Vec<f64>,
}

impl Segment {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len() - 1;
        let d = n.min(3);
        let w = (0..=n)
            .map(|k| {
                let lo = k.saturating_sub(d);
                let hi = k.min(n - d);
                let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                s * (lo..=hi)
                    .map(|i| {
                        (i..=i + d)
                            .filter(|&j| j != k)
                            .map(|j| 1.0 / (x[k] - x[j]).abs())
                            .product::<f64>()
                    })
                    .sum::<f64>()
            })
            .collect();
        Segment {
            lo: x[0],
            hi: x[n],
            x,
            y,
            w,
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((xk, yk), wk) in self.x.iter().zip(&self.y).zip(&self.w) {
            let d = t - xk;
            if d == 0.0 {
                return *yk;
            }
            num += wk / d * yk;
            den += wk / d;
        }
        num / den
    }
}

impl SampledWeight {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() || grid.len() < 2 {
            return Err(Error::InvalidWeight("grid and values must match, at least 2".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidWeight("grid must be strictly increasing".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidWeight("sampled values must be positive".into()));
        }
        let seg = Segment::new(grid.clone(), values.clone());
        Ok(SampledWeight {
            grid,
            values,
            segments: vec![seg],
        })
    }

    fn bind(&self, sys: &IntervalSystem) -> Result<Self> {
        let mut segments = Vec::new();
        for k in 0..sys.l() {
            let (lo, hi) = sys.band(k);
            let tol = 1e-12 * sys.diam();
            let idx: Vec<usize> = (0..self.grid.len())
                .filter(|&i| self.grid[i] >= lo - tol && self.grid[i] <= hi + tol)
                .collect();
            if idx.len() < 2 {
                return Err(Error::InvalidWeight(format!(
                    "band {k} holds fewer than two samples"
                )));
            }
            segments.push(Segment::new(
                idx.iter().map(|&i| self.grid[i]).collect(),
                idx.iter().map(|&i| self.values[i]).collect(),
            ));
        }
        Ok(SampledWeight {
            grid: self.grid.clone(),
            values: self.values.clone(),
            segments,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let seg = self
            .segments
            .iter()
            .min_by(|a, b| {
                let da = (a.lo - x).max(x - a.hi).max(0.0);
                let db = (b.lo - x).max(x - b.hi).max(0.0);
                da.total_cmp(&db)
            })
            .expect("at least one segment");
        seg.eval(x)
    }
}

/// Weight given by a closure, for programmatic use.
#[derive(Clone)]
pub struct FuncWeight {
    pub name: String,
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for FuncWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FuncWeight({})", self.name)
    }
}

/// Positive weight on `E`.
#[derive(Debug, Clone)]
pub enum Weight {
    Unit,
    Poly(PolyWeight),
    Sampled(SampledWeight),
    Func(FuncWeight),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum WeightSpec {
    Unit,
    Poly {
        roots: Vec<Root>,
        #[serde(default = "plus_one")]
        sign: f64,
        #[serde(default = "plus_one")]
        scale: f64,
    },
    Sampled {
        grid: Vec<f64>,
        values: Vec<f64>,
    },
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = WeightSpec::deserialize(d)?;
        let w = match spec {
            WeightSpec::Unit => Ok(Weight::Unit),
            WeightSpec::Poly { roots, sign, scale } => {
                PolyWeight::new(sign, scale, roots).map(Weight::Poly)
            }
            WeightSpec::Sampled { grid, values } => {
                SampledWeight::new(grid, values).map(Weight::Sampled)
            }
        };
        w.map_err(serde::de::Error::custom)
    }
}

impl Serialize for Weight {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let spec = match self {
            Weight::Unit => WeightSpec::Unit,
            Weight::Poly(p) => WeightSpec::Poly {
                roots: p.roots.clone(),
                sign: p.sign,
                scale: p.scale,
            },
            Weight::Sampled(w) => WeightSpec::Sampled {
                grid: w.grid.clone(),
                values: w.values.clone(),
            },
            Weight::Func(_) => {
                return Err(serde::ser::Error::custom("closure weights are not serializable"))
            }
        };
        spec.serialize(s)
    }
}

impl Weight {
    pub fn func(name: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Weight::Func(FuncWeight {
            name: name.to_string(),
            f: Arc::new(f),
        })
    }

    pub fn constant(v: f64) -> Self {
        Weight::func("const", move |_| v)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Weight::Unit => 1.0,
            Weight::Poly(p) => p.eval(x),
            Weight::Sampled(s) => s.eval(x),
            Weight::Func(f) => (f.f)(x),
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Weight::Unit)
    }

    /// Checks positivity on a dense grid of `E` and binds sampled weights
    /// to the bands.
    pub fn prepare(&self, sys: &IntervalSystem) -> Result<Weight> {
        let w = match self {
            Weight::Sampled(s) => Weight::Sampled(s.bind(sys)?),
            Weight::Poly(p) => {
                for (r, m) in p.real_roots() {
                    match sys.locate(r) {
                        Location::Band(_) | Location::Endpoint(_) => {
                            return Err(Error::InvalidWeight(format!("root {r} lies on E")))
                        }
                        Location::Gap(_) if m % 2 == 1 => {
                            return Err(Error::InvalidWeight(format!(
                                "odd-order root {r} in a gap changes sign on E"
                            )))
                        }
                        _ => {}
                    }
                }
                self.clone()
            }
            _ => self.clone(),
        };
        for k in 0..sys.l() {
            for i in 0..=400 {
                let x = sys.band_point(k, PI * i as f64 / 400.0);
                let v = w.eval(x);
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::InvalidWeight(format!(
                        "weight is not positive at x = {x} (value {v})"
                    )));
                }
            }
        }
        Ok(w)
    }
}

/// `L_k = ∫_E log W · dω_k`, `k = 0..l-2`, with the harmonic-measure
/// densities `p_k/h`.
pub fn log_moments(table: &PotentialTable, w: &Weight) -> Result<Vec<f64>> {
    let l = table.l();
    if w.is_unit() {
        return Ok(vec![0.0; l - 1]);
    }
    table.harmonic_differentials()[..l - 1]
        .iter()
        .map(|p| {
            let num = p.numerator();
            table.integrate_h(|x| w.eval(x).ln() * num.eval(x))
        })
        .collect()
}

/// Phase data `τ_k = n ω_k(∞) + L_k` and its reduction `γ_k ∈ [0, 1]`
/// with binary shift `σ_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseData {
    pub n: usize,
    pub tau: Vec<f64>,
    pub gamma: Vec<f64>,
    pub sigma: Vec<u8>,
}

pub fn gamma_n(table: &PotentialTable, log_moments: &[f64], n: usize) -> PhaseData {
    let l = table.l();
    let mut tau = Vec::with_capacity(l - 1);
    let mut gamma = Vec::with_capacity(l - 1);
    let mut sigma = Vec::with_capacity(l - 1);
    for k in 0..l - 1 {
        let mut t = n as f64 * table.omega_inf()[k] + log_moments[k];
        if (t - t.round()).abs() < 1e-10 {
            t = t.round();
        }
        let v = t.rem_euclid(2.0);
        let (g, s) = if v <= 1.0 { (v, 0) } else { (v - 1.0, 1) };
        tau.push(t);
        gamma.push(g);
        sigma.push(s);
    }
    PhaseData { n, tau, gamma, sigma }
}

/// Szegő function of a weight on `E`.
#[derive(Debug, Clone)]
pub struct SzegoData {
    table: PotentialTable,
    weight: Weight,
    log_moments: Vec<f64>,
    mu0: f64,
    mu: Vec<f64>,
    anchors: Vec<f64>,
    anchor_greens: Vec<PoleGreen>,
    w_inf: f64,
}

impl SzegoData {
    pub fn new(table: &PotentialTable, weight: &Weight) -> Result<Self> {
        let sys = table.system();
        let weight = weight.prepare(sys)?;
        let l = table.l();
        let log_moments = log_moments(table, &weight)?;
        let anchors: Vec<f64> = (0..l - 1)
            .map(|j| {
                let (lo, hi) = sys.gap(j);
                0.5 * (lo + hi)
            })
            .collect();
        let (mu0, mu) = if weight.is_unit() {
            (0.0, vec![0.0; l - 1])
        } else {
            let (cen, sc) = (sys.center(), sys.half_width());
            let mut a = DMatrix::zeros(l, l);
            let mut rhs = DVector::zeros(l);
            for s in 0..l {
                let us = |x: f64| ((x - cen) / sc).powi(s as i32);
                a[(s, 0)] = table.integrate_h(us)?;
                for (j, cj) in anchors.iter().enumerate() {
                    a[(s, j + 1)] = table.integrate_h(|x| us(x) * (x - cj).abs().ln())?;
                }
                rhs[s] = table.integrate_h(|x| us(x) * weight.eval(x).ln())?;
            }
            let sol = a.lu().solve(&rhs).ok_or(Error::Singular("Szegő moments"))?;
            (sol[0], sol.as_slice()[1..].to_vec())
        };
        let anchor_greens = anchors
            .iter()
            .map(|&cj| table.green_pole(cj))
            .collect::<Result<Vec<_>>>()?;
        let mut log_inf = mu0;
        for (j, &cj) in anchors.iter().enumerate() {
            log_inf += mu[j] * (table.capacity().ln() + table.green(c(cj))?);
        }
        Ok(SzegoData {
            table: table.clone(),
            weight,
            log_moments,
            mu0,
            mu,
            anchors,
            anchor_greens,
            w_inf: log_inf.exp(),
        })
    }

    pub fn table(&self) -> &PotentialTable {
        &self.table
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn log_moments(&self) -> &[f64] {
        &self.log_moments
    }

    /// `𝒲(∞) > 0`.
    pub fn w_inf(&self) -> f64 {
        self.w_inf
    }

    /// Anchor exponents `(μ_0, μ_1, …)`.
    pub fn anchor_exponents(&self) -> (f64, &[f64]) {
        (self.mu0, &self.mu)
    }

    /// Residual log-weight `u` on `E`.
    pub fn residual(&self, x: f64) -> f64 {
        if self.weight.is_unit() {
            return 0.0;
        }
        let mut u = self.weight.eval(x).ln() - self.mu0;
        for (j, cj) in self.anchors.iter().enumerate() {
            u -= self.mu[j] * (x - cj).abs().ln();
        }
        u
    }

    fn nearest_on_e(&self, x: f64) -> f64 {
        let sys = self.table.system();
        match sys.locate(x) {
            Location::Left => sys.left(),
            Location::Right => sys.right(),
            Location::Gap(j) => {
                let (lo, hi) = sys.gap(j);
                if x - lo < hi - x {
                    lo
                } else {
                    hi
                }
            }
            _ => x,
        }
    }

    /// Cauchy part `F(z)`; real `z` on `E` gives the upper boundary value.
    fn cauchy(&self, z: Complex64) -> Result<Complex64> {
        if self.weight.is_unit() {
            return Ok(c(0.0));
        }
        let sys = self.table.system();
        let x0 = self.nearest_on_e(z.re);
        let u0 = self.residual(x0);
        let on_e = z.im == 0.0 && sys.contains(z.re);
        let mut acc = c(0.0);
        for k in 0..sys.l() {
            let v = integrate(
                |t| {
                    let x = sys.band_point(k, t);
                    let d = z - x;
                    if on_e && d.re == 0.0 {
                        return c(0.0);
                    }
                    c(self.residual(x) - u0) / (d * sys.sqrt_abs_other(2 * k, x))
                },
                0.0,
                PI,
                self.table.config(),
            )?;
            acc += v * (sys.band_sign(k) / PI);
        }
        Ok(sys.sqrt_h(z) * acc + u0)
    }

    /// `log 𝒲(z)` on the closed upper half-plane, continued to the lower
    /// half-plane by conjugation.
    pub fn log_w(&self, z: Complex64) -> Result<Complex64> {
        if z.im < 0.0 {
            return Ok(self.log_w(z.conj())?.conj());
        }
        let z = Complex64::new(z.re, z.im.abs());
        if self.weight.is_unit() {
            return Ok(c(0.0));
        }
        let tiny = 1e-9 * self.table.system().diam();
        if z.im == 0.0 && self.anchors.iter().any(|a| (z.re - a).abs() < tiny) {
            // Removable singularity of the anchor factor: symmetric average.
            let h = 1e-5 * self.table.system().diam();
            return Ok((self.log_w(z + h)? + self.log_w(z - h)?) * 0.5);
        }
        let mut acc = c(self.mu0);
        if !self.mu.is_empty() {
            let g_inf = self.table.log_phi(z)?;
            for (j, cj) in self.anchors.iter().enumerate() {
                if self.mu[j] == 0.0 {
                    continue;
                }
                let lg = (z - cj).ln() + self.anchor_greens[j].log_phi(z)? - g_inf;
                acc += lg * self.mu[j];
            }
        }
        Ok(acc + self.cauchy(z)?)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.log_w(z)?.exp())
    }

    /// Upper boundary value `𝒲⁺(x)` on `E`.
    pub fn boundary(&self, x: f64) -> Result<Complex64> {
        self.eval(c(x))
    }

    /// `arg 𝒲⁺(x)` on `E`, continuous along the upper side from `+∞`.
    pub fn arg_plus(&self, x: f64) -> Result<f64> {
        Ok(self.log_w(c(x))?.im)
    }
}

/// `Ω(z) = ρ(z) ∏_j (φ(z, w_j)/φ(z, ∞))^{ν_j}` for a polynomial weight.
#[derive(Debug, Clone)]
pub struct OmegaProduct {
    table: PotentialTable,
    rho: PolyWeight,
    real: Vec<(f64, u32, PoleGreen)>,
    pairs: Vec<(Complex64, u32, Abelian)>,
    im_offset: f64,
    omega_inf: f64,
}

impl OmegaProduct {
    pub fn new(table: &PotentialTable, rho: &PolyWeight) -> Result<Self> {
        Weight::Poly(rho.clone()).prepare(table.system())?;
        let real = rho
            .real_roots()
            .into_iter()
            .map(|(w, m)| Ok((w, m, table.green_pole(w)?)))
            .collect::<Result<Vec<_>>>()?;
        let pairs = rho
            .upper_roots()
            .into_iter()
            .map(|(w, m)| Ok((w, m, table.pair_green(w)?)))
            .collect::<Result<Vec<_>>>()?;
        let ar = table.system().right();
        let right: u32 = real.iter().filter(|(w, _, _)| *w > ar).map(|(_, m, _)| *m).sum();
        let mut log_inf = rho.scale.ln() + rho.degree() as f64 * table.capacity().ln();
        for r in rho.roots() {
            log_inf += r.mult as f64 * table.green(Complex64::new(r.re, r.im))?;
        }
        Ok(OmegaProduct {
            table: table.clone(),
            rho: rho.clone(),
            real,
            pairs,
            im_offset: -PI * right as f64,
            omega_inf: log_inf.exp(),
        })
    }

    pub fn log_omega(&self, z: Complex64) -> Result<Complex64> {
        if z.im < 0.0 {
            return Ok(self.log_omega(z.conj())?.conj());
        }
        let g_inf = self.table.log_phi(z)?;
        let mut acc = Complex64::new(self.rho.scale.ln(), self.im_offset);
        for (w, m, g) in &self.real {
            let m = *m as f64;
            acc += ((z - w).ln() + g.log_phi(z)? - g_inf) * m;
        }
        for (w, m, g) in &self.pairs {
            let m = *m as f64;
            acc += ((z - w).ln() + (z - w.conj()).ln() + g.primitive(z)? - g_inf * 2.0) * m;
        }
        Ok(acc)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.log_omega(z)?.exp())
    }

    /// `Ω(∞) = |lc| cap^ν ∏ e^{ν_j g(w_j, ∞)}`.
    pub fn at_infinity(&self) -> f64 {
        self.omega_inf
    }

    pub fn pair_differentials(&self) -> impl Iterator<Item = (&Complex64, &Abelian)> {
        self.pairs.iter().map(|(w, _, a)| (w, a))
    }
}

/// `Σ_κ L_κ B_{kκ} − 2 ∫_E d_k log W dx/h` for each `k`.
pub fn moment_period_residuals(table: &PotentialTable, w: &Weight, moments: &[f64]) -> Result<Vec<f64>> {
    let b = table.period_matrix();
    let m = table.l() - 1;
    (0..m)
        .map(|k| {
            let lhs: f64 = (0..m).map(|kk| moments[kk] * b[(k, kk)]).sum();
            let num = table.normalized()[k].numerator();
            let rhs = 2.0 * table.integrate_h(|x| num.eval(x) * w.eval(x).ln())?;
            Ok(lhs - rhs)
        })
        .collect()
}

/// `∫_E d_k log|ρ| dx/h − Σ_j ν_j Re ∫_∞^{w_j} d_k/√H` for each `k`.
pub fn abelian_moment_residuals(table: &PotentialTable, rho: &PolyWeight) -> Result<Vec<f64>> {
    let m = table.l() - 1;
    (0..m)
        .map(|k| {
            let d = &table.normalized()[k];
            let num = d.numerator();
            let lhs = table.integrate_h(|x| num.eval(x) * rho.eval(x).abs().ln())?;
            let tail = d.tail()?.re;
            let mut rhs = 0.0;
            for r in rho.roots() {
                rhs += r.mult as f64 * (d.primitive(Complex64::new(r.re, r.im))?.re - tail);
            }
            Ok(lhs - rhs)
        })
        .collect()
}

/// Outcome of [`approx_weight_poly`].
#[derive(Debug, Clone)]
pub struct ApproxReport {
    pub rho: PolyWeight,
    pub cheb: ChebPoly,
    /// `max_E |ρ/W − 1|` on a dense grid.
    pub rel_error: f64,
    /// `∫_E x^s log(ρ/W) dx/h`, `s = 0..l-1` in the hull variable.
    pub moment_mismatch: Vec<f64>,
}

/// Positive polynomial `ρ_ν` close to `W` in relative sup-norm whose low
/// log-moments against `1/h` are driven toward those of `W`.
pub fn approx_weight_poly(table: &PotentialTable, w: &Weight, degree: usize) -> Result<ApproxReport> {
    let sys = table.system();
    let w = w.prepare(sys)?;
    let (cen, sc) = (sys.center(), sys.half_width());
    let l = table.l();
    let per_band = (8 * (degree + 1)).max(200);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for k in 0..sys.l() {
        for i in 0..per_band {
            let x = sys.band_point(k, PI * (i as f64 + 0.5) / per_band as f64);
            let wx = w.eval(x);
            rows.extend(chebyshev_row((x - cen) / sc, degree).into_iter().map(|v| v / wx));
            rhs.push(1.0);
        }
    }
    let a = DMatrix::from_row_slice(rhs.len(), degree + 1, &rows);
    let sol = a
        .svd(true, true)
        .solve(&DVector::from_vec(rhs), 1e-14)
        .map_err(|_| Error::Singular("weight approximation"))?;
    let mut p = ChebPoly::new(cen, sc, sol.as_slice().to_vec());

    let moments = |p: &ChebPoly| -> Result<Vec<f64>> {
        (0..l)
            .map(|s| {
                table.integrate_h(|x| {
                    let u = (x - cen) / sc;
                    u.powi(s as i32) * (p.eval(x) / w.eval(x)).abs().ln()
                })
            })
            .collect()
    };
    let free = l.min(degree + 1);
    let mut mis = moments(&p)?;
    for _ in 0..30 {
        if mis.iter().all(|m| m.abs() < 1e-14) {
            break;
        }
        let mut jac = DMatrix::zeros(l, free);
        for s in 0..l {
            for i in 0..free {
                jac[(s, i)] = table.integrate_h(|x| {
                    let u = (x - cen) / sc;
                    u.powi(s as i32) * chebyshev_row(u, i)[i] / p.eval(x)
                })?;
            }
        }
        let step = jac
            .svd(true, true)
            .solve(&DVector::from_vec(mis.clone()), 1e-14)
            .map_err(|_| Error::Singular("moment correction"))?;
        let before: f64 = mis.iter().map(|m| m.abs()).fold(0.0, f64::max);
        let mut t = 1.0;
        loop {
            let mut q = p.clone();
            for i in 0..free {
                q.coef[i] -= t * step[i];
            }
            let ok = (0..=2000).all(|i| {
                (0..sys.l()).all(|k| q.eval(sys.band_point(k, PI * i as f64 / 2000.0)) > 0.0)
            });
            if ok {
                let m2 = moments(&q)?;
                let after: f64 = m2.iter().map(|m| m.abs()).fold(0.0, f64::max);
                if after < before || t < 1e-3 {
                    p = q;
                    mis = m2;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-6 {
                break;
            }
        }
        if t < 1e-6 {
            break;
        }
    }

    let mut rel_error: f64 = 0.0;
    for k in 0..sys.l() {
        for i in 0..=4000 {
            let x = sys.band_point(k, PI * i as f64 / 4000.0);
            let v = p.eval(x);
            if v <= 0.0 {
                return Err(Error::InvalidWeight(format!(
                    "positivity unattainable at degree {degree}"
                )));
            }
            rel_error = rel_error.max((v / w.eval(x) - 1.0).abs());
        }
    }
    let roots = p.roots();
    let rho = PolyWeight::from_roots(p.leading(), &pair_up(&roots, sc))?;
    Ok(ApproxReport {
        rho,
        cheb: p,
        rel_error,
        moment_mismatch: mis,
    })
}

/// Snaps nearly real roots to the axis and makes complex roots exact
/// conjugates.
fn pair_up(roots: &[Complex64], scale: f64) -> Vec<Complex64> {
    let tol = 1e-10 * scale;
    let mut out = Vec::new();
    let mut upper: Vec<Complex64> = Vec::new();
    for z in roots {
        if z.im.abs() <= tol {
            out.push(c(z.re));
        } else if z.im > 0.0 {
            upper.push(*z);
        }
    }
    for z in upper {
        out.push(z);
        out.push(z.conj());
    }
    out
}
