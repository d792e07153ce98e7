//! Potential theory of the complement of `E`: the polynomial `r_∞`,
//! complex Green's functions, harmonic measures, capacity, normalized
//! first-kind differentials and their period matrix.
//!
//! Every quantity is an integral of a real differential
//! `N(t) dt / (D(t) √H(t))`, represented by [`Abelian`]. Integrals over a
//! band or a gap use the substitution `x = m − w cos θ`, which absorbs the
//! two inverse square-root endpoint singularities. Primitives are taken from
//! the base point `a_{2l-1}` (the right end of `E`) along the upper side of
//! the real axis, so boundary values on `E` are the `+` values.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::domain::{IntervalSystem, Location};
use crate::error::{Error, Result};
use crate::poly::LocalPoly;
use crate::quad::{integrate, integrate_real, QuadConfig};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Polar part of a differential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pole {
    /// Simple pole at infinity only.
    Infinity,
    /// Simple pole at a real point off `E`.
    Real(f64),
    /// Simple poles at `w` and `w̄`, stored with `Im w > 0`.
    Pair(Complex64),
    /// Holomorphic at every finite point and at infinity.
    None,
}

/// The real differential `N(t) dt / (D(t) √H(t))`.
#[derive(Debug, Clone)]
pub struct Abelian {
    sys: IntervalSystem,
    num: LocalPoly,
    pole: Pole,
    cfg: QuadConfig,
    band_full: Vec<f64>,
    gap_full: Vec<f64>,
}

fn solve(a: DMatrix<f64>, b: DVector<f64>, what: &'static str) -> Result<DVector<f64>> {
    if a.nrows() == 0 {
        return Ok(DVector::zeros(0));
    }
    a.lu().solve(&b).ok_or(Error::Singular(what))
}

impl Abelian {
    pub fn new(sys: &IntervalSystem, num: LocalPoly, pole: Pole, cfg: QuadConfig) -> Result<Self> {
        let mut ab = Abelian {
            sys: sys.clone(),
            num,
            pole,
            cfg,
            band_full: Vec::new(),
            gap_full: Vec::new(),
        };
        let l = sys.l();
        ab.band_full = (0..l)
            .map(|k| ab.band_part(k, 0.0, PI))
            .collect::<Result<_>>()?;
        ab.gap_full = (0..l.saturating_sub(1))
            .map(|j| ab.gap_part(j, 0.0, PI))
            .collect::<Result<_>>()?;
        Ok(ab)
    }

    pub fn system(&self) -> &IntervalSystem {
        &self.sys
    }

    pub fn numerator(&self) -> &LocalPoly {
        &self.num
    }

    pub fn pole(&self) -> Pole {
        self.pole
    }

    fn den(&self, x: f64) -> f64 {
        match self.pole {
            Pole::Real(p) => x - p,
            Pole::Pair(w) => (c(x) - w).norm_sqr(),
            _ => 1.0,
        }
    }

    fn den_c(&self, z: Complex64) -> Complex64 {
        match self.pole {
            Pole::Real(p) => z - p,
            Pole::Pair(w) => (z - w) * (z - w.conj()),
            _ => c(1.0),
        }
    }

    /// The differential's density `N/(D√H)` at complex `z` (upper-side branch).
    pub fn density(&self, z: Complex64) -> Complex64 {
        self.num.eval_c(z) / (self.den_c(z) * self.sys.sqrt_h(z))
    }

    /// Finite poles with their residues.
    pub fn residues(&self) -> Vec<(Complex64, Complex64)> {
        match self.pole {
            Pole::Real(p) => {
                let r = self.num.eval(p) / self.sys.sqrt_h(c(p)).re;
                vec![(c(p), c(r))]
            }
            Pole::Pair(w) => {
                let r = self.num.eval_c(w) / ((w - w.conj()) * self.sys.sqrt_h(w));
                vec![(w, r), (w.conj(), r.conj())]
            }
            _ => Vec::new(),
        }
    }

    fn real_pole_in_gap(&self, j: usize) -> Option<f64> {
        match self.pole {
            Pole::Real(p) if self.sys.locate(p) == Location::Gap(j) => Some(p),
            _ => None,
        }
    }

    /// `∫ N/(D √|Π'_k|) dθ` over `[θ1, θ2]` on band `k`; the band integral of
    /// the upper boundary value is `−i·sign_k` times the full value.
    pub fn band_part(&self, k: usize, th1: f64, th2: f64) -> Result<f64> {
        let sys = &self.sys;
        integrate_real(
            |t| {
                let x = sys.band_point(k, t);
                self.num.eval(x) / (self.den(x) * sys.sqrt_abs_other(2 * k, x))
            },
            th1,
            th2,
            &self.cfg,
        )
    }

    /// Real (principal value) integral `∫ N dx/(D √H)` over the gap-`j`
    /// portion with angles in `[θ1, θ2]`.
    pub fn gap_part(&self, j: usize, th1: f64, th2: f64) -> Result<f64> {
        let sys = &self.sys;
        let s = sys.gap_sign(j);
        let i0 = 2 * j + 1;
        match self.real_pole_in_gap(j) {
            None => integrate_real(
                |t| {
                    let x = sys.gap_point(j, t);
                    s * self.num.eval(x) / (self.den(x) * sys.sqrt_abs_other(i0, x))
                },
                th1,
                th2,
                &self.cfg,
            ),
            Some(p) => {
                let (lo, hi) = sys.gap(j);
                let w = 0.5 * (hi - lo);
                let tc = IntervalSystem::theta_of(lo, hi, p);
                let phi = |t: f64| {
                    let x = sys.gap_point(j, t);
                    s * self.num.eval(x) / (w * sys.sqrt_abs_other(i0, x))
                };
                let fc = phi(tc);
                let cc = tc.cos();
                let smooth = integrate_real(
                    |t| {
                        let d = cc - t.cos();
                        if d.abs() < 1e-15 {
                            0.0
                        } else {
                            (phi(t) - fc) / d
                        }
                    },
                    th1,
                    th2,
                    &self.cfg,
                )?;
                Ok(smooth + fc * (pv_kernel(th2, tc)? - pv_kernel(th1, tc)?))
            }
        }
    }

    /// Full-band values `J_k`.
    pub fn band_full(&self) -> &[f64] {
        &self.band_full
    }

    /// Full-gap (principal) values.
    pub fn gap_full(&self) -> &[f64] {
        &self.gap_full
    }

    /// `∫_{E_k} N/D · dx/h`.
    pub fn band_h_integral(&self, k: usize) -> f64 {
        self.sys.band_sign(k) * self.band_full[k] / PI
    }

    fn ext_right(&self, x: f64) -> Result<Complex64> {
        let sys = &self.sys;
        let ar = sys.right();
        let n = 2 * sys.l() - 1;
        let pole = match self.pole {
            Pole::Real(p) if p > ar => Some((p, self.residues()[0].1.re)),
            _ => None,
        };
        let sm = x.sub_ext(ar);
        let smooth = integrate_real(
            |s| {
                let t = ar + s * s;
                let other: f64 = sys.endpoints()[..n].iter().map(|a| t - a).product();
                let mut v = 2.0 * self.num.eval(t) / (self.den(t) * other.sqrt());
                if let Some((p, r)) = pole {
                    v -= r * 2.0 * s / (t - p);
                }
                v
            },
            0.0,
            sm,
            &self.cfg,
        )?;
        let mut out = c(smooth);
        if let Some((p, r)) = pole {
            if x == p {
                return Err(Error::OutsideDomain(format!("{x} is a pole")));
            }
            out += r * ((x - p).abs().ln() - (ar - p).abs().ln());
            if x > p {
                out -= I * PI * r;
            }
        }
        Ok(out)
    }

    fn ext_left(&self, x: f64) -> Result<Complex64> {
        let sys = &self.sys;
        let a0 = sys.left();
        let l = sys.l();
        let sgn = if l % 2 == 0 { 1.0 } else { -1.0 };
        let pole = match self.pole {
            Pole::Real(p) if p < a0 => Some((p, self.residues()[0].1.re)),
            _ => None,
        };
        let sm = (a0 - x).sqrt();
        let smooth = integrate_real(
            |s| {
                let t = a0 - s * s;
                let other: f64 = sys.endpoints()[1..].iter().map(|a| (t - a).abs()).product();
                let mut v = sgn * 2.0 * self.num.eval(t) / (self.den(t) * other.sqrt());
                if let Some((p, r)) = pole {
                    v -= r * 2.0 * s / (a0 - p - s * s);
                }
                v
            },
            0.0,
            sm,
            &self.cfg,
        )?;
        let mut out = c(-smooth);
        if let Some((p, r)) = pole {
            if x == p {
                return Err(Error::OutsideDomain(format!("{x} is a pole")));
            }
            out += r * ((x - p).abs().ln() - (a0 - p).abs().ln());
            if x < p {
                out += I * PI * r;
            }
        }
        Ok(out)
    }

    /// `∫_{a_{2l-1}}^{x} N dt/(D√H)` along the upper side of the real axis.
    pub fn walk(&self, x: f64) -> Result<Complex64> {
        let sys = &self.sys;
        if x >= sys.right() {
            return self.ext_right(x);
        }
        let l = sys.l();
        let mut acc = c(0.0);
        for k in (0..l).rev() {
            let (lo, hi) = sys.band(k);
            let sk = sys.band_sign(k);
            if x >= lo {
                let th = IntervalSystem::theta_of(lo, hi, x);
                acc += I * sk * self.band_part(k, th, PI)?;
                return Ok(acc);
            }
            acc += I * sk * self.band_full[k];
            if k == 0 {
                break;
            }
            let j = k - 1;
            let (glo, ghi) = sys.gap(j);
            let pole = self.real_pole_in_gap(j);
            let res = pole.map(|_| self.residues()[0].1.re);
            if x >= glo {
                let th = IntervalSystem::theta_of(glo, ghi, x);
                if let Some(p) = pole {
                    if x == p {
                        return Err(Error::OutsideDomain(format!("{x} is a pole")));
                    }
                    if x < p {
                        acc += I * PI * res.unwrap_or(0.0);
                    }
                }
                acc -= self.gap_part(j, th, PI)?;
                return Ok(acc);
            }
            acc -= self.gap_full[j];
            if let Some(r) = res {
                acc += I * PI * r;
            }
        }
        Ok(acc + self.ext_left(x)?)
    }

    fn segment(&self, from: Complex64, to: Complex64, sqrt_start: bool) -> Result<Complex64> {
        let poles = self.residues();
        let d = to - from;
        let mut out = integrate(
            |u| {
                let (t, dt) = if sqrt_start {
                    (from + d * (u * u), d * (2.0 * u))
                } else {
                    (from + d * u, d)
                };
                let mut v = self.density(t);
                for (p, r) in &poles {
                    v -= r / (t - p);
                }
                v * dt
            },
            0.0,
            1.0,
            &self.cfg,
        )?;
        for (p, r) in &poles {
            out += r * ((to - p) / (from - p)).ln();
        }
        Ok(out)
    }

    /// Primitive `∫_{a_{2l-1}}^{z} N dt/(D√H)` on the plane cut along
    /// `(−∞, a_{2l-1}]`, continuous from above onto the cut. For
    /// `Im z < 0` the conjugate-symmetric continuation is returned.
    pub fn primitive(&self, z: Complex64) -> Result<Complex64> {
        if z.im < 0.0 {
            return Ok(self.primitive(z.conj())?.conj());
        }
        if z.im == 0.0 {
            return self.walk(z.re);
        }
        let sys = &self.sys;
        let mut x0 = z.re;
        if let Pole::Real(p) = self.pole {
            if (x0 - p).abs() < 0.5 * z.im {
                x0 = if x0 >= p { p + z.im } else { p - z.im };
            }
        }
        let (e, de) = sys
            .endpoints()
            .iter()
            .map(|a| (*a, (x0 - a).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty endpoints");
        if de < z.im {
            Ok(self.walk(e)? + self.segment(c(e), z, true)?)
        } else {
            Ok(self.walk(x0)? + self.segment(c(x0), z, false)?)
        }
    }

    /// `∫_{a_{2l-1}}^{∞} N dt/(D√H)` for differentials regular at infinity.
    pub fn tail(&self) -> Result<Complex64> {
        if self.pole == Pole::Infinity {
            return Err(Error::InvalidArgument(
                "tail of a differential with a pole at infinity".into(),
            ));
        }
        let ar = self.sys.right();
        match self.pole {
            Pole::Real(p) if p > ar => {
                let x = p + (p - ar).max(self.sys.diam());
                Ok(self.ext_right(x)? + self.tail_from(x)?)
            }
            _ => Ok(self.ext_right(ar + self.sys.diam())? + self.tail_from(ar + self.sys.diam())?),
        }
    }

    fn tail_from(&self, x: f64) -> Result<Complex64> {
        let d = self.sys.diam();
        // The integrand in v stays bounded at v = 1 since N/(D√H) = O(t⁻²).
        integrate(
            |v| {
                let s = v / (1.0 - v);
                let t = x + d * s;
                self.density(c(t)) * (d / ((1.0 - v) * (1.0 - v)))
            },
            0.0,
            1.0,
            &self.cfg,
        )
    }
}

trait SubExt {
    fn sub_ext(self, a: f64) -> f64;
}

impl SubExt for f64 {
    fn sub_ext(self, a: f64) -> f64 {
        (self - a).max(0.0).sqrt()
    }
}

/// Antiderivative of `1/(cos θc − cos θ)`, vanishing at `0` and `π`.
fn pv_kernel(t: f64, tc: f64) -> Result<f64> {
    if t == tc {
        return Err(Error::OutsideDomain("principal value endpoint at the pole".into()));
    }
    let num = ((t + tc) / 2.0).sin();
    let den = ((t - tc) / 2.0).sin();
    if num == 0.0 {
        return Ok(0.0);
    }
    Ok(-(num / den).abs().ln() / tc.sin())
}

/// Complex Green's function with a finite real pole; degenerate at band
/// endpoints where the factor is the constant `1`.
#[derive(Debug, Clone)]
pub enum PoleGreen {
    Regular { pole: f64, diff: Abelian },
    Degenerate { pole: f64 },
}

impl PoleGreen {
    pub fn pole(&self) -> f64 {
        match self {
            PoleGreen::Regular { pole, .. } | PoleGreen::Degenerate { pole } => *pole,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, PoleGreen::Degenerate { .. })
    }

    /// `G(z; c) = log φ(z, c)` on the cut plane.
    pub fn log_phi(&self, z: Complex64) -> Result<Complex64> {
        match self {
            PoleGreen::Regular { diff, .. } => diff.primitive(z),
            PoleGreen::Degenerate { .. } => Ok(c(0.0)),
        }
    }

    /// `g(z, c)`.
    pub fn green(&self, z: Complex64) -> Result<f64> {
        Ok(self.log_phi(z)?.re)
    }

    /// `arg φ⁺(x, c)` for `x ∈ E`.
    pub fn phase_plus(&self, x: f64) -> Result<f64> {
        Ok(self.log_phi(c(x))?.im)
    }

    /// `G(∞; c)`, real for poles left of `a_{2l-1}`.
    pub fn at_infinity(&self) -> Result<Complex64> {
        match self {
            PoleGreen::Regular { diff, .. } => diff.tail(),
            PoleGreen::Degenerate { .. } => Ok(c(0.0)),
        }
    }

    pub fn numerator(&self) -> Option<&LocalPoly> {
        match self {
            PoleGreen::Regular { diff, .. } => Some(diff.numerator()),
            PoleGreen::Degenerate { .. } => None,
        }
    }
}

/// Precomputed first-kind data of an interval system.
#[derive(Debug, Clone)]
pub struct PotentialTable {
    sys: IntervalSystem,
    cfg: QuadConfig,
    r_inf: Abelian,
    /// Harmonic-measure differentials `p_k`, one per band.
    p: Vec<Abelian>,
    /// Normalized first-kind differentials.
    d: Vec<Abelian>,
    b: DMatrix<f64>,
    omega_inf: Vec<f64>,
    capacity: f64,
}

/// Serializable snapshot of a [`PotentialTable`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableExport {
    pub endpoints: Vec<f64>,
    pub r_inf: Vec<f64>,
    pub d: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub omega_inf: Vec<f64>,
    pub capacity: f64,
}

impl PotentialTable {
    pub fn new(sys: &IntervalSystem) -> Result<Self> {
        Self::with_config(sys, QuadConfig::default())
    }

    pub fn with_config(sys: &IntervalSystem, cfg: QuadConfig) -> Result<Self> {
        let l = sys.l();
        let (center, scale) = (sys.center(), sys.half_width());
        let basis = |s: usize| {
            let mut v = vec![0.0; s + 1];
            v[s] = 1.0;
            LocalPoly::new(center, scale, v)
        };
        // Gap moments of u^s/√H, s = 0..l-1.
        let mut gm = DMatrix::zeros(l.saturating_sub(1), l);
        let mut bm = DMatrix::zeros(l.saturating_sub(1), l.saturating_sub(1));
        for s in 0..l {
            let ab = Abelian::new(sys, basis(s), Pole::None, cfg)?;
            for j in 0..l - 1 {
                gm[(j, s)] = ab.gap_full()[j];
                if s + 1 < l {
                    bm[(j, s)] = ab.band_h_integral(j);
                }
            }
        }
        let m = l - 1;

        // r_∞: monic of degree l-1 in x.
        let mut r = vec![0.0; l];
        r[m] = 1.0;
        if m > 0 {
            let a = gm.columns(0, m).into_owned();
            let rhs = -gm.column(m).into_owned();
            let sol = solve(a, rhs, "r_inf")?;
            r[..m].copy_from_slice(sol.as_slice());
        }
        let lead = scale.powi(m as i32);
        let r = r.iter().map(|v| v * lead).collect();
        let r_inf = Abelian::new(sys, LocalPoly::new(center, scale, r), Pole::Infinity, cfg)?;
        let omega_inf: Vec<f64> = (0..l).map(|k| r_inf.band_h_integral(k)).collect();

        // Harmonic-measure differentials: gap increments e_{j+1} − e_j.
        let mut p = Vec::with_capacity(l);
        for k in 0..l {
            let coef = if m == 0 {
                Vec::new()
            } else {
                let a = gm.columns(0, m).into_owned();
                let rhs = DVector::from_fn(m, |j, _| {
                    (if k == j + 1 { 1.0 } else { 0.0 }) - (if k == j { 1.0 } else { 0.0 })
                });
                solve(a, rhs, "harmonic-measure differential")?.as_slice().to_vec()
            };
            p.push(Abelian::new(sys, LocalPoly::new(center, scale, coef), Pole::None, cfg)?);
        }

        // Normalized differentials: ∫_{E_j} d_k dx/h = −δ_{jk}.
        let mut d = Vec::with_capacity(m);
        let mut b = DMatrix::zeros(m, m);
        if m > 0 {
            for k in 0..m {
                let rhs = DVector::from_fn(m, |j, _| if j == k { -1.0 } else { 0.0 });
                let coef = solve(bm.clone(), rhs, "normalized differentials")?;
                d.push(Abelian::new(
                    sys,
                    LocalPoly::new(center, scale, coef.as_slice().to_vec()),
                    Pole::None,
                    cfg,
                )?);
            }
            for j in 0..m {
                for k in 0..m {
                    let s: f64 = (j..m).map(|i| d[k].gap_full()[i]).sum();
                    b[(j, k)] = -2.0 * s;
                }
            }
        }

        let capacity = log_capacity(sys, &r_inf, &cfg)?.exp();
        Ok(PotentialTable {
            sys: sys.clone(),
            cfg,
            r_inf,
            p,
            d,
            b,
            omega_inf,
            capacity,
        })
    }

    pub fn system(&self) -> &IntervalSystem {
        &self.sys
    }

    pub fn config(&self) -> &QuadConfig {
        &self.cfg
    }

    pub fn l(&self) -> usize {
        self.sys.l()
    }

    pub fn r_inf(&self) -> &LocalPoly {
        self.r_inf.numerator()
    }

    pub fn r_inf_differential(&self) -> &Abelian {
        &self.r_inf
    }

    /// Equilibrium masses `ω_k(∞)` of the bands.
    pub fn omega_inf(&self) -> &[f64] {
        &self.omega_inf
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn period_matrix(&self) -> &DMatrix<f64> {
        &self.b
    }

    /// Numerators `d_k` of the normalized differentials.
    pub fn normalized(&self) -> &[Abelian] {
        &self.d
    }

    /// Numerators `p_k` with `dω_k = Re(p_k dz/√H)`.
    pub fn harmonic_differentials(&self) -> &[Abelian] {
        &self.p
    }

    /// `G(z;∞) = log φ(z,∞)`.
    pub fn log_phi(&self, z: Complex64) -> Result<Complex64> {
        self.r_inf.primitive(z)
    }

    /// `g(z,∞)`; rejects points of `E`.
    pub fn green(&self, z: Complex64) -> Result<f64> {
        if z.im == 0.0 && self.sys.contains(z.re) {
            return Err(Error::OnSet(format!("{}", z.re)));
        }
        Ok(self.log_phi(z)?.re)
    }

    /// `arg φ⁺(x,∞)` on `E`, zero at `a_{2l-1}` and `π` at `a_0`.
    pub fn phase_on_e(&self, x: f64) -> Result<f64> {
        if !self.sys.contains(x) {
            return Err(Error::OutsideDomain(format!("{x} is not on E")));
        }
        Ok(self.log_phi(c(x))?.im)
    }

    /// Complex Green's function with real pole `c ∉ E`.
    pub fn green_pole(&self, pole: f64) -> Result<PoleGreen> {
        let sys = &self.sys;
        if sys.near_endpoint(pole) {
            return Ok(PoleGreen::Degenerate { pole });
        }
        if sys.contains(pole) {
            return Err(Error::OnSet(format!("{pole}")));
        }
        let l = sys.l();
        let (center, scale) = (sys.center(), sys.half_width());
        let mut a = DMatrix::zeros(l, l);
        let mut rhs = DVector::zeros(l);
        let u = (pole - center) / scale;
        for s in 0..l {
            a[(0, s)] = u.powi(s as i32);
            let mut v = vec![0.0; s + 1];
            v[s] = 1.0;
            let ab = Abelian::new(sys, LocalPoly::new(center, scale, v), Pole::Real(pole), self.cfg)?;
            for j in 0..l - 1 {
                a[(j + 1, s)] = ab.gap_full()[j];
            }
        }
        rhs[0] = -sys.sqrt_h(c(pole)).re;
        let coef = solve(a, rhs, "green_pole")?;
        let diff = Abelian::new(
            sys,
            LocalPoly::new(center, scale, coef.as_slice().to_vec()),
            Pole::Real(pole),
            self.cfg,
        )?;
        Ok(PoleGreen::Regular { pole, diff })
    }

    /// Differential of `G(z;w) + G(z;w̄)` for a non-real `w`.
    pub fn pair_green(&self, w: Complex64) -> Result<Abelian> {
        let w = if w.im < 0.0 { w.conj() } else { w };
        if w.im == 0.0 {
            return Err(Error::InvalidArgument("pair pole must be non-real".into()));
        }
        let sys = &self.sys;
        let l = sys.l();
        let (center, scale) = (sys.center(), sys.half_width());
        let n = l + 1;
        let mut a = DMatrix::zeros(n, n);
        let mut rhs = DVector::zeros(n);
        let uw = (w - center) / scale;
        let target = -(w - w.conj()) * sys.sqrt_h(w);
        for s in 0..n {
            let us = uw.powi(s as i32);
            a[(0, s)] = us.re;
            a[(1, s)] = us.im;
            let mut v = vec![0.0; s + 1];
            v[s] = 1.0;
            let ab = Abelian::new(sys, LocalPoly::new(center, scale, v), Pole::Pair(w), self.cfg)?;
            for j in 0..l - 1 {
                a[(j + 2, s)] = ab.gap_full()[j];
            }
        }
        rhs[0] = target.re;
        rhs[1] = target.im;
        let coef = solve(a, rhs, "pair_green")?;
        Abelian::new(
            sys,
            LocalPoly::new(center, scale, coef.as_slice().to_vec()),
            Pole::Pair(w),
            self.cfg,
        )
    }

    /// `ω_k(z)` for every band, by integrating `p_k dz/√H` from `a_{2l-1}`.
    pub fn omega_at(&self, z: Complex64) -> Result<Vec<f64>> {
        let l = self.l();
        self.p
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let base = if k == l - 1 { 1.0 } else { 0.0 };
                Ok(base + p.primitive(z)?.re)
            })
            .collect()
    }

    /// `ω_k(x)` for `x = gap_point(j, θ)`, all bands, integrating from the
    /// left end of gap `j`.
    pub fn omega_in_gap(&self, j: usize, theta: f64) -> Result<Vec<f64>> {
        let l = self.l();
        let s = self.sys.gap_sign(j);
        let i0 = 2 * j + 1;
        (0..l)
            .map(|k| {
                let base = if k == j { 1.0 } else { 0.0 };
                if theta == 0.0 {
                    return Ok(base);
                }
                let pk = self.p[k].numerator();
                let v = integrate_real(
                    |t| {
                        let x = self.sys.gap_point(j, t);
                        pk.eval(x) / self.sys.sqrt_abs_other(i0, x)
                    },
                    0.0,
                    theta,
                    &self.cfg,
                )?;
                Ok(base + s * v)
            })
            .collect()
    }

    /// `∂ω_k/∂θ` at `gap_point(j, θ)`, all bands.
    pub fn omega_in_gap_derivative(&self, j: usize, theta: f64) -> Vec<f64> {
        let x = self.sys.gap_point(j, theta);
        let s = self.sys.gap_sign(j);
        let den = self.sys.sqrt_abs_other(2 * j + 1, x);
        self.p
            .iter()
            .map(|p| s * p.numerator().eval(x) / den)
            .collect()
    }

    /// Harmonic measure of band `k` at a real pole `c ∉ E` (or at infinity),
    /// as the band mass of the Green's function's normal-derivative density.
    pub fn harmonic_measure(&self, pole: Option<f64>, k: usize) -> Result<f64> {
        match pole {
            None => Ok(self.omega_inf[k]),
            Some(p) => match self.green_pole(p)? {
                PoleGreen::Degenerate { .. } => {
                    let (lo, hi) = self.sys.band(k);
                    let tol = 1e-12 * self.sys.diam();
                    Ok(if (p - lo).abs() <= tol || (p - hi).abs() <= tol { 1.0 } else { 0.0 })
                }
                PoleGreen::Regular { diff, .. } => {
                    let num = diff.numerator();
                    let v = integrate_real(
                        |t| {
                            let x = self.sys.band_point(k, t);
                            (num.eval(x) / (x - p)).abs() / self.sys.sqrt_abs_other(2 * k, x)
                        },
                        0.0,
                        PI,
                        &self.cfg,
                    )?;
                    Ok(v / PI)
                }
            },
        }
    }

    /// Outward boundary densities `(∂ω_k/∂n⁺)(x)` for `k = 0..l-1`
    /// (upper side, normal pointing into the upper half-plane).
    pub fn boundary_density(&self, x: f64) -> Result<Vec<f64>> {
        match self.sys.locate(x) {
            Location::Band(k) => {
                let hx = -self.sys.h_poly(c(x)).re;
                let scale = self.sys.band_sign(k) / hx.sqrt();
                Ok(self.p[..self.l() - 1]
                    .iter()
                    .map(|p| scale * p.numerator().eval(x))
                    .collect())
            }
            _ => Err(Error::OutsideDomain(format!("{x} is not interior to E"))),
        }
    }

    /// `∮_{α_j} φ_k / (2πi)`, recomputed with the given quadrature.
    pub fn alpha_periods(&self, cfg: &QuadConfig) -> Result<DMatrix<f64>> {
        let m = self.l() - 1;
        let mut out = DMatrix::zeros(m, m);
        for k in 0..m {
            let num = self.d[k].numerator().clone();
            for j in 0..m {
                let v = integrate_real(
                    |t| {
                        let x = self.sys.band_point(j, t);
                        num.eval(x) / self.sys.sqrt_abs_other(2 * j, x)
                    },
                    0.0,
                    PI,
                    cfg,
                )?;
                // 2 ∫_{E_j} φ_k⁺ = 2·(−i s_j) v; divided by 2πi.
                out[(j, k)] = -self.sys.band_sign(j) * v / PI;
            }
        }
        Ok(out)
    }

    /// Integral `∫_E f(x) dx/h(x)` by the cosine substitution on every band.
    pub fn integrate_h<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let mut total = 0.0;
        for k in 0..self.l() {
            let v = integrate_real(
                |t| {
                    let x = self.sys.band_point(k, t);
                    f(x) / self.sys.sqrt_abs_other(2 * k, x)
                },
                0.0,
                PI,
                &self.cfg,
            )?;
            total += self.sys.band_sign(k) * v / PI;
        }
        Ok(total)
    }

    pub fn export(&self) -> TableExport {
        let rows = |m: &DMatrix<f64>| {
            (0..m.nrows())
                .map(|i| m.row(i).iter().copied().collect())
                .collect()
        };
        TableExport {
            endpoints: self.sys.endpoints().to_vec(),
            r_inf: self.r_inf().to_monomial(),
            d: self.d.iter().map(|d| d.numerator().to_monomial()).collect(),
            b: rows(&self.b),
            omega_inf: self.omega_inf.clone(),
            capacity: self.capacity,
        }
    }
}

/// `log cap = log d − ∫_{a_{2l-1}}^{∞} (r_∞/√H − 1/(t − a_{2l-1} + d)) dt`.
fn log_capacity(sys: &IntervalSystem, r_inf: &Abelian, cfg: &QuadConfig) -> Result<f64> {
    let ar = sys.right();
    let d = sys.diam();
    let n = 2 * sys.l() - 1;
    let num = r_inf.numerator();
    let vmax = 1.0 - 1e-7;
    let tail = integrate_real(
        |v| {
            let s = v / (1.0 - v);
            let t = ar + d * s * s;
            let other: f64 = sys.endpoints()[..n].iter().map(|a| t - a).product();
            let f1 = 2.0 * d.sqrt() * num.eval(t) / other.sqrt();
            let f2 = 2.0 * s / (s * s + 1.0);
            (f1 - f2) / ((1.0 - v) * (1.0 - v))
        },
        0.0,
        vmax,
        cfg,
    )?;
    Ok(d.ln() - tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(e: &[f64]) -> PotentialTable {
        PotentialTable::new(&IntervalSystem::new(e).unwrap()).unwrap()
    }

    #[test]
    fn chebyshev_interval() {
        let t = table(&[-1.0, 1.0]);
        assert!((t.capacity() - 0.5).abs() < 1e-12);
        let g = t.green(c(2.0)).unwrap();
        assert!((g - (2.0 + 3f64.sqrt()).ln()).abs() < 1e-12);
        // φ⁺(cos θ) = e^{iθ}
        for th in [0.3f64, 1.2, 2.9] {
            let ph = t.phase_on_e(th.cos()).unwrap();
            assert!((ph - th).abs() < 1e-12, "{ph} {th}");
        }
        let z = Complex64::new(0.3, 0.7);
        let exact = (z + (z * z - 1.0).sqrt()).ln();
        let got = t.log_phi(z).unwrap();
        assert!((got - exact).norm() < 1e-12, "{got} {exact}");
    }

    #[test]
    fn symmetric_two_band() {
        let t = table(&[-1.0, -0.5, 0.5, 1.0]);
        assert!((t.capacity() - 3f64.sqrt() / 4.0).abs() < 1e-12);
        assert!(t.r_inf().eval(0.0).abs() < 1e-13);
        assert!((t.omega_inf()[0] - 0.5).abs() < 1e-13);
        // g(z) = ½ g_{[-1,1]}(P(z)), P(x) = (2x² − 1.25)/0.75
        let z = Complex64::new(0.2, 0.4);
        let pz = (z * z * 2.0 - 1.25) / 0.75;
        let mut phi = pz + (pz * pz - 1.0).sqrt();
        if phi.norm() < 1.0 {
            phi = 1.0 / phi;
        }
        assert!((t.green(z).unwrap() - 0.5 * phi.norm().ln()).abs() < 1e-12);
        let g0 = t.green(c(0.0)).unwrap();
        let p0: f64 = -1.25 / 0.75;
        assert!((g0 - 0.5 * (-p0 + (p0 * p0 - 1.0).sqrt()).ln()).abs() < 1e-12);
    }

    #[test]
    fn pole_green_symmetry_and_measures() {
        let t = table(&[-1.0, -0.4, 0.2, 1.0]);
        let a = t.green_pole(-0.1).unwrap();
        let b = t.green_pole(1.7).unwrap();
        let gab = a.green(c(1.7)).unwrap();
        let gba = b.green(c(-0.1)).unwrap();
        assert!((gab - gba).abs() < 1e-10, "{gab} {gba}");
        let w = t.omega_at(c(-0.1)).unwrap();
        let h0 = t.harmonic_measure(Some(-0.1), 0).unwrap();
        let h1 = t.harmonic_measure(Some(-0.1), 1).unwrap();
        assert!((w[0] - h0).abs() < 1e-11 && (w[1] - h1).abs() < 1e-11);
        assert!((h0 + h1 - 1.0).abs() < 1e-11);
        // ω at infinity by the tail of p_k agrees with the equilibrium mass.
        let tail = t.harmonic_differentials()[0].tail().unwrap().re;
        assert!((tail - t.omega_inf()[0]).abs() < 1e-11, "{tail} {:?}", t.omega_inf());
        // g(∞, c) = g(c, ∞)
        let ginf = a.at_infinity().unwrap();
        assert!(ginf.im.abs() < 1e-12);
        assert!((ginf.re - t.green(c(-0.1)).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn period_matrix_relations() {
        let t = table(&[-1.0, -0.7, -0.3, 0.1, 0.4, 1.0]);
        let a = t.alpha_periods(&QuadConfig { abs_tol: 1e-15, rel_tol: 1e-14, max_panels: 8000 }).unwrap();
        for j in 0..2 {
            for k in 0..2 {
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((a[(j, k)] - want).abs() < 1e-10);
            }
        }
        let b = t.period_matrix();
        assert!((b[(0, 1)] - b[(1, 0)]).abs() < 1e-10);
        assert!(b[(0, 0)] > 0.0 && b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)] > 0.0);
        // Σ_κ B_{kκ} p_κ = 2 d_k pointwise
        for x in [-0.9, 0.0, 0.7] {
            for k in 0..2 {
                let lhs: f64 = (0..2)
                    .map(|kk| b[(k, kk)] * t.harmonic_differentials()[kk].numerator().eval(x))
                    .sum();
                let rhs = 2.0 * t.normalized()[k].numerator().eval(x);
                assert!((lhs - rhs).abs() < 1e-10, "{lhs} {rhs}");
            }
        }
    }
}
