//! Asymptotic model of the deviation-normalized minimal polynomial `M_n`:
//! `ψ_n`, values on and off `E`, the minimum deviation, zero counts, and
//! the exact phase representation for polynomial weights.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::inversion::{solve_for_n, InversionSolution};
use crate::poly::{chebyshev_row, ChebPoly};
use crate::potential::{Abelian, PoleGreen, PotentialTable};
use crate::szego::{PolyWeight, SzegoData, Weight};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `ψ_n(z) = φ(z,∞)^n 𝒲(z) / ∏_j φ(z, c_j)` over interior gap points.
#[derive(Debug, Clone)]
pub struct AsymptoticModel {
    szego: SzegoData,
    sol: InversionSolution,
    n: usize,
    greens: Vec<PoleGreen>,
}

/// Off-`E` prediction and which formula produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffPrediction {
    pub re: f64,
    pub im: f64,
    /// Both sheets were summed (true) or only the dominant one.
    pub both_branches: bool,
}

/// Predicted zeros per band and per gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCounts {
    pub per_band: Vec<i64>,
    pub raw: Vec<f64>,
    /// Largest distance of a raw count to an integer.
    pub defect: f64,
    /// Expected gap zero (the interior point `c_j`), if any.
    pub gap_zeros: Vec<Option<f64>>,
}

impl AsymptoticModel {
    pub fn new(szego: &SzegoData, n: usize) -> Result<Self> {
        let sol = solve_for_n(szego.table(), szego.log_moments(), n)?;
        Self::with_solution(szego, sol, n)
    }

    pub fn with_solution(szego: &SzegoData, sol: InversionSolution, n: usize) -> Result<Self> {
        let table = szego.table();
        if sol.c.len() + 1 != table.l() {
            return Err(Error::InvalidArgument("solution does not match the system".into()));
        }
        let greens = sol
            .c
            .iter()
            .zip(&sol.endpoint_flags)
            .filter(|(_, f)| !**f)
            .map(|(cj, _)| table.green_pole(*cj))
            .collect::<Result<Vec<_>>>()?;
        Ok(AsymptoticModel {
            szego: szego.clone(),
            sol,
            n,
            greens,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn solution(&self) -> &InversionSolution {
        &self.sol
    }

    pub fn szego(&self) -> &SzegoData {
        &self.szego
    }

    fn table(&self) -> &PotentialTable {
        self.szego.table()
    }

    /// Interior gap points, the ones that carry a factor.
    pub fn interior_points(&self) -> Vec<f64> {
        self.greens.iter().map(|g| g.pole()).collect()
    }

    pub fn log_psi(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = self.table().log_phi(z)? * self.n as f64 + self.szego.log_w(z)?;
        for g in &self.greens {
            acc -= g.log_phi(z)?;
        }
        Ok(acc)
    }

    pub fn psi(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 && self.table().system().contains(z.re) {
            return Err(Error::OnSet(format!("{}", z.re)));
        }
        Ok(self.log_psi(z)?.exp())
    }

    /// Phase `Θ_n(x) = arg ψ_n⁺(x)` on `E`.
    pub fn theta_on_e(&self, x: f64) -> Result<f64> {
        let table = self.table();
        let mut th = self.n as f64 * table.phase_on_e(x)? + self.szego.arg_plus(x)?;
        for g in &self.greens {
            th -= g.phase_plus(x)?;
        }
        Ok(th)
    }

    /// `ψ⁺ + ψ⁻ = 2 W(x) cos Θ_n(x)`, the prediction of `2 M_n(x)`.
    pub fn predict_on_e(&self, x: f64) -> Result<f64> {
        Ok(2.0 * self.szego.weight().eval(x) * self.theta_on_e(x)?.cos())
    }

    /// Prediction of `M_n(z)` off `E`.
    pub fn predict_off_e(&self, z: Complex64) -> Result<OffPrediction> {
        let lp = self.log_psi(z)?;
        let g = self.table().log_phi(z)?.re;
        let dominant = (2.0 * self.n as f64 * g) >= 1e6f64.ln();
        let poly_like = matches!(self.szego.weight(), Weight::Unit | Weight::Poly(_));
        let psi = lp.exp();
        let (v, both) = if dominant || !poly_like {
            (psi * 0.5, false)
        } else {
            let wz = match self.szego.weight() {
                Weight::Poly(p) => p.eval_c(z),
                _ => c(1.0),
            };
            ((psi + wz * wz / psi) * 0.5, true)
        };
        Ok(OffPrediction {
            re: v.re,
            im: v.im,
            both_branches: both,
        })
    }

    /// `2 cap^n ∏_j e^{g(c_j,∞)} / 𝒲(∞)`, the predicted `‖M̂_n/W‖_E`.
    pub fn predict_deviation(&self) -> Result<f64> {
        let table = self.table();
        let mut log = (2.0f64).ln() + self.n as f64 * table.capacity().ln() - self.szego.w_inf().ln();
        for cj in self.interior_points() {
            log += table.green(c(cj))?;
        }
        Ok(log.exp())
    }

    /// Zeros per band `n ω_k(∞) + L_k − Σ_j ω_k(c_j)` (interior `c_j`).
    pub fn zero_counts(&self) -> Result<ZeroCounts> {
        let table = self.table();
        let l = table.l();
        let interior = self.interior_points();
        let mut raw = vec![0.0; l];
        for k in 0..l - 1 {
            raw[k] = self.n as f64 * table.omega_inf()[k] + self.szego.log_moments()[k];
        }
        for cj in &interior {
            let w = table.omega_at(c(*cj))?;
            for k in 0..l - 1 {
                raw[k] -= w[k];
            }
        }
        raw[l - 1] = self.n as f64 - interior.len() as f64 - raw[..l - 1].iter().sum::<f64>();
        let per_band: Vec<i64> = raw.iter().map(|v| v.round() as i64).collect();
        let defect = raw
            .iter()
            .map(|v| (v - v.round()).abs())
            .fold(0.0, f64::max);
        let gap_zeros = self
            .sol
            .c
            .iter()
            .zip(&self.sol.endpoint_flags)
            .map(|(cj, f)| if *f { None } else { Some(*cj) })
            .collect();
        Ok(ZeroCounts {
            per_band,
            raw,
            defect,
            gap_zeros,
        })
    }
}

/// Exact phase representation `R_n = cos χ_n`, `S_n = sin χ_n/√(−H)` for
/// a polynomial weight `ρ`.
#[derive(Debug, Clone)]
pub struct RationalModel {
    model: AsymptoticModel,
    rho: PolyWeight,
    real: Vec<(u32, PoleGreen)>,
    pairs: Vec<(u32, Abelian)>,
}

impl RationalModel {
    pub fn new(model: &AsymptoticModel) -> Result<Self> {
        let rho = match model.szego().weight() {
            Weight::Poly(p) => p.clone(),
            Weight::Unit => PolyWeight::new(1.0, 1.0, Vec::new())?,
            _ => {
                return Err(Error::InvalidWeight(
                    "the phase representation needs a polynomial weight".into(),
                ))
            }
        };
        let table = model.table();
        let real = rho
            .real_roots()
            .into_iter()
            .map(|(w, m)| Ok((m, table.green_pole(w)?)))
            .collect::<Result<Vec<_>>>()?;
        let pairs = rho
            .upper_roots()
            .into_iter()
            .map(|(w, m)| Ok((m, table.pair_green(w)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(RationalModel {
            model: model.clone(),
            rho,
            real,
            pairs,
        })
    }

    pub fn rho(&self) -> &PolyWeight {
        &self.rho
    }

    /// `χ_n(x) = (n − ν) arg φ⁺(x,∞) + Σ ν_j arg φ⁺(x,w_j) − Σ arg φ⁺(x,c_j)`.
    pub fn chi(&self, x: f64) -> Result<f64> {
        let table = self.model.table();
        let nu = self.rho.degree() as f64;
        let mut chi = (self.model.n as f64 - nu) * table.phase_on_e(x)?;
        for (m, g) in &self.real {
            chi += *m as f64 * g.phase_plus(x)?;
        }
        for (m, a) in &self.pairs {
            chi += *m as f64 * a.primitive(c(x))?.im;
        }
        for g in &self.model.greens {
            chi -= g.phase_plus(x)?;
        }
        Ok(chi)
    }

    pub fn r_n(&self, x: f64) -> Result<f64> {
        Ok(self.chi(x)?.cos())
    }

    pub fn s_n(&self, x: f64) -> Result<f64> {
        let h = self.model.table().system().h_poly(c(x)).re;
        Ok(self.chi(x)?.sin() / (-h).sqrt())
    }

    /// `R_n² − H S_n² − 1` at `x ∈ E`.
    pub fn pell_defect(&self, x: f64) -> Result<f64> {
        let chi = self.chi(x)?;
        let h = self.model.table().system().h_poly(c(x)).re;
        let s = chi.sin() / (-h).sqrt();
        Ok(chi.cos().powi(2) - h * s * s - 1.0)
    }

    /// `g_{(n)}(x) = ∏_j (x − c_j)` over all gap points.
    pub fn g_n(&self, x: f64) -> f64 {
        self.model.sol.c.iter().map(|cj| x - cj).product()
    }

    /// Least-squares fit of `ρ g_{(n)} R_n` by a polynomial of degree
    /// `n + l − 1` on one node set; returns the relative residual on a
    /// disjoint node set.
    pub fn polynomial_residual(&self) -> Result<f64> {
        let table = self.model.table();
        let sys = table.system();
        let deg = self.model.n + sys.l() - 1;
        let (cen, sc) = (sys.center(), sys.half_width());
        let per_band = 2 * (deg + 1) + 20;
        let value = |x: f64| -> Result<f64> { Ok(self.rho.eval(x) * self.g_n(x) * self.r_n(x)?) };
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        let mut check = Vec::new();
        for k in 0..sys.l() {
            for i in 0..per_band {
                let t = PI * (i as f64 + 0.5) / per_band as f64;
                let x = sys.band_point(k, t);
                rows.extend(chebyshev_row((x - cen) / sc, deg));
                rhs.push(value(x)?);
                let y = sys.band_point(k, PI * (i as f64 + 0.25) / per_band as f64);
                check.push((y, value(y)?));
            }
        }
        let a = nalgebra::DMatrix::from_row_slice(rhs.len(), deg + 1, &rows);
        let sol = a
            .svd(true, true)
            .solve(&nalgebra::DVector::from_vec(rhs), 1e-15)
            .map_err(|_| Error::Singular("phase polynomial fit"))?;
        let p = ChebPoly::new(cen, sc, sol.as_slice().to_vec());
        let scale = check.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
        let err = check
            .iter()
            .map(|(x, v)| (p.eval(*x) - v).abs())
            .fold(0.0, f64::max);
        Ok(err / scale)
    }

    /// `2 cap^{n−ν} ∏ e^{g(c_j,∞)} / (|lc ρ| ∏ e^{ν_j g(w_j,∞)})`.
    pub fn rational_deviation(&self) -> Result<f64> {
        let table = self.model.table();
        let nu = self.rho.degree() as f64;
        let mut log = (2.0f64).ln() + (self.model.n as f64 - nu) * table.capacity().ln()
            - self.rho.leading().abs().ln();
        for cj in self.model.interior_points() {
            log += table.green(c(cj))?;
        }
        for r in self.rho.roots() {
            log -= r.mult as f64 * table.green(Complex64::new(r.re, r.im))?;
        }
        Ok(log.exp())
    }
}
