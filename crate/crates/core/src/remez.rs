//! Remez exchange for the monic polynomial of degree `n` minimizing
//! `‖M̂_n/W‖_E`, with an equioscillation certificate.

use nalgebra::{DMatrix, DVector};
use roots::{find_root_brent, SimpleConvergency};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::domain::{IntervalSystem, Location};
use crate::error::{Error, Result};
use crate::ortho::{OrthoSeries, OrthoSystem};
use crate::poly::ChebPoly;
use crate::szego::Weight;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemezConfig {
    /// Stop when `(max|e| − |h|)/max|e| ≤ tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Grid points per band per degree.
    pub grid_factor: usize,
    pub min_grid: usize,
}

impl Default for RemezConfig {
    fn default() -> Self {
        RemezConfig {
            tol: 1e-10,
            max_iter: 200,
            grid_factor: 30,
            min_grid: 200,
        }
    }
}

/// Reference point with the sign of the weighted error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Alternant {
    pub x: f64,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemezResult {
    pub n: usize,
    /// Monic `M̂_n` in the hull Chebyshev basis.
    pub poly: ChebPoly,
    /// `M̂_n` in the basis orthonormal for `dx/(π √|H|)`; used for evaluation.
    pub series: OrthoSeries,
    /// `max_E |M̂_n/W|` on the refined grid.
    pub deviation: f64,
    /// de la Vallée Poussin lower bound.
    pub vp_lower: f64,
    pub alternation: Vec<Alternant>,
    pub zeros_per_band: Vec<usize>,
    /// Zeros lying in gap `j`.
    pub gap_zeros: Vec<Vec<f64>>,
    pub zeros: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl RemezResult {
    /// `M̂_n(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        self.series.eval(x)
    }

    /// `M_n(x) = M̂_n(x)/deviation`.
    pub fn normalized(&self, x: f64) -> f64 {
        self.series.eval(x) / self.deviation
    }

    /// Relative certificate gap `(deviation − vp_lower)/deviation`.
    pub fn certificate_gap(&self) -> f64 {
        (self.deviation - self.vp_lower) / self.deviation
    }
}

struct Problem<'a> {
    sys: &'a IntervalSystem,
    w: &'a Weight,
    basis: OrthoSystem,
    scale: f64,
    n: usize,
}

impl Problem<'_> {
    /// Weighted error of `P_n + Σ a_k P_k`.
    fn err(&self, coef: &[f64], x: f64) -> f64 {
        self.basis.series(coef, x) / self.w.eval(x)
    }

    /// Levelled solution on a reference: `coef` with `coef[n] = 1` and `h`.
    fn level(&self, refs: &[f64]) -> Result<(Vec<f64>, f64)> {
        let n = self.n;
        let mut a = DMatrix::zeros(n + 1, n + 1);
        let mut b = DVector::zeros(n + 1);
        for (i, &x) in refs.iter().enumerate() {
            let row = self.basis.eval_all(n, x);
            for k in 0..n {
                a[(i, k)] = row[k];
            }
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            a[(i, n)] = -s * self.w.eval(x);
            b[i] = -row[n];
        }
        let sol = a.lu().solve(&b).ok_or(Error::Singular("Remez reference system"))?;
        let mut coef = sol.as_slice()[..n].to_vec();
        coef.push(1.0);
        Ok((coef, sol[n]))
    }

    fn initial_reference(&self, omega: &[f64]) -> Vec<f64> {
        let l = self.sys.l();
        let total = self.n + 1;
        let quota: Vec<f64> = omega.iter().map(|w| w * total as f64).collect();
        let mut counts: Vec<usize> = quota.iter().map(|q| q.floor() as usize).collect();
        let mut rest = total - counts.iter().sum::<usize>();
        let mut order: Vec<usize> = (0..l).collect();
        order.sort_by(|&a, &b| {
            let fa = quota[a] - quota[a].floor();
            let fb = quota[b] - quota[b].floor();
            fb.total_cmp(&fa).then(a.cmp(&b))
        });
        for &k in order.iter().cycle() {
            if rest == 0 {
                break;
            }
            counts[k] += 1;
            rest -= 1;
        }
        let mut refs = Vec::with_capacity(total);
        for k in 0..l {
            let m = counts[k];
            for i in 0..m {
                let t = if m == 1 { PI / 2.0 } else { PI * i as f64 / (m - 1) as f64 };
                refs.push(self.sys.band_point(k, t));
            }
        }
        refs
    }

    /// Local extrema of `|e|` over `E`, refined, in increasing order.
    fn extrema(&self, coef: &[f64], per_band: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for k in 0..self.sys.l() {
            let xs: Vec<f64> = (0..=per_band)
                .map(|i| self.sys.band_point(k, PI * i as f64 / per_band as f64))
                .collect();
            let es: Vec<f64> = xs.iter().map(|&x| self.err(coef, x)).collect();
            let m = xs.len();
            for i in 0..m {
                let a = es[i].abs();
                let left = if i > 0 { es[i - 1].abs() } else { f64::NEG_INFINITY };
                let right = if i + 1 < m { es[i + 1].abs() } else { f64::NEG_INFINITY };
                if !(a >= left && a >= right) || a == 0.0 {
                    continue;
                }
                if i == 0 || i + 1 == m {
                    // Endpoint maximum; refine inward when the interior rises.
                    out.push((xs[i], es[i]));
                    continue;
                }
                let s = es[i].signum();
                let (x, e) = golden(|x| s * self.err(coef, x), xs[i - 1], xs[i + 1]);
                out.push((x, s * e));
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-15 * self.scale);
        out
    }
}

/// Maximizes a unimodal `f` on `[a, b]`; returns the point and value.
fn golden<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Keeps one point per run of equal signs (the largest), then trims to
/// `want` points by dropping the weakest ones.
fn alternating_subset(cands: &[(f64, f64)], want: usize) -> Vec<(f64, f64)> {
    let mut alt: Vec<(f64, f64)> = Vec::new();
    for &(x, e) in cands {
        match alt.last_mut() {
            Some(last) if last.1.signum() == e.signum() => {
                if e.abs() > last.1.abs() {
                    *last = (x, e);
                }
            }
            _ => alt.push((x, e)),
        }
    }
    while alt.len() > want {
        if alt.len() == want + 1 {
            if alt[0].1.abs() < alt[alt.len() - 1].1.abs() {
                alt.remove(0);
            } else {
                alt.pop();
            }
            break;
        }
        let (i, _) = alt
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.abs().total_cmp(&b.1 .1.abs()))
            .expect("non-empty");
        if i == 0 || i + 1 == alt.len() {
            alt.remove(i);
        } else {
            // Removing an interior point makes its neighbours equal in sign.
            alt.remove(i);
            let (a, b) = (alt[i - 1], alt[i]);
            if a.1.abs() >= b.1.abs() {
                alt.remove(i);
            } else {
                alt.remove(i - 1);
            }
        }
    }
    alt
}

/// Single-point exchange: puts the global maximum into the reference.
fn single_exchange(refs: &[f64], signs: &[f64], xm: f64, em: f64) -> Vec<f64> {
    let mut r = refs.to_vec();
    let s = em.signum();
    let pos = r.partition_point(|&x| x < xm);
    if pos == 0 {
        if signs[0] == s {
            r[0] = xm;
        } else {
            r.insert(0, xm);
            r.pop();
        }
    } else if pos == r.len() {
        let last = r.len() - 1;
        if signs[last] == s {
            r[last] = xm;
        } else {
            r.push(xm);
            r.remove(0);
        }
    } else if signs[pos - 1] == s {
        r[pos - 1] = xm;
    } else {
        r[pos] = xm;
    }
    r
}

/// Monic weighted minimax polynomial of degree `n` on `E`.
pub fn minimax_monic(
    sys: &IntervalSystem,
    w: &Weight,
    n: usize,
    omega_inf: &[f64],
    cfg: &RemezConfig,
) -> Result<RemezResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    let w = w.prepare(sys)?;
    let p = Problem {
        sys,
        w: &w,
        basis: OrthoSystem::equilibrium_like(sys, n)?,
        scale: sys.half_width(),
        n,
    };
    let per_band = (cfg.grid_factor * n).max(cfg.min_grid);
    let mut refs = p.initial_reference(omega_inf);
    let mut best: Option<(Vec<f64>, f64, f64, Vec<(f64, f64)>)> = None;
    let mut iterations = 0;
    let mut converged = false;
    for it in 0..cfg.max_iter {
        iterations = it + 1;
        let (coef, h) = p.level(&refs)?;
        let ext = p.extrema(&coef, per_band);
        let (xm, em) = ext
            .iter()
            .copied()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap_or((refs[0], h));
        let emax = em.abs();
        let better = best.as_ref().map_or(true, |b| emax < b.1 || h.abs() > b.2);
        let alt = alternating_subset(&ext, n + 1);
        if better {
            best = Some((coef.clone(), emax, h.abs(), alt.clone()));
        }
        if (emax - h.abs()) / emax <= cfg.tol {
            best = Some((coef, emax, h.abs(), alt));
            converged = true;
            break;
        }
        refs = if alt.len() == n + 1 {
            alt.iter().map(|a| a.0).collect()
        } else {
            let signs: Vec<f64> = (0..=n)
                .map(|i| {
                    let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                    s * h.signum()
                })
                .collect();
            single_exchange(&refs, &signs, xm, em)
        };
    }
    let (coef, emax, h, alt) = best.expect("at least one iteration");
    let lead = 1.0 / p.basis.leading(n);
    let series = OrthoSeries {
        basis: p.basis,
        coef,
        factor: lead,
    };
    let poly = series.to_cheb(sys.center(), sys.half_width());
    let deviation = emax * lead;
    // Lower bound from any alternating set on which |e| ≥ vp.
    let vp = if alt.len() == n + 1 {
        alt.iter().map(|a| a.1.abs()).fold(f64::INFINITY, f64::min).max(h)
    } else {
        h
    } * lead;
    let alternation: Vec<Alternant> = alt
        .iter()
        .map(|a| Alternant {
            x: a.0,
            sign: if a.1 > 0.0 { 1 } else { -1 },
        })
        .collect();
    let (zeros, zeros_per_band, gap_zeros) = analyze_zeros(sys, |x| series.eval(x), &alternation, deviation);
    Ok(RemezResult {
        n,
        poly,
        series,
        deviation,
        vp_lower: vp.min(deviation),
        alternation,
        zeros_per_band,
        gap_zeros,
        zeros,
        iterations,
        converged,
    })
}

/// Zeros between consecutive alternation points, sorted into bands and gaps.
pub fn analyze_zeros<P: Fn(f64) -> f64>(
    sys: &IntervalSystem,
    poly: P,
    alternation: &[Alternant],
    deviation: f64,
) -> (Vec<f64>, Vec<usize>, Vec<Vec<f64>>) {
    let f = |x: f64| poly(x) / deviation;
    let mut zeros = Vec::new();
    for w in alternation.windows(2) {
        let mut conv = SimpleConvergency {
            eps: 1e-15,
            max_iter: 200,
        };
        if let Ok(z) = find_root_brent(w[0].x, w[1].x, f, &mut conv) {
            zeros.push(z);
        }
    }
    let mut per_band = vec![0; sys.l()];
    let mut gaps = vec![Vec::new(); sys.l() - 1];
    for &z in &zeros {
        match sys.locate(z) {
            Location::Band(k) => per_band[k] += 1,
            Location::Endpoint(i) => per_band[i / 2] += 1,
            Location::Gap(j) => gaps[j].push(z),
            Location::Left => per_band[0] += 1,
            Location::Right => per_band[sys.l() - 1] += 1,
        }
    }
    (zeros, per_band, gaps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(e: &[f64], n: usize, omega: &[f64]) -> RemezResult {
        let sys = IntervalSystem::new(e).unwrap();
        minimax_monic(&sys, &Weight::Unit, n, omega, &RemezConfig::default()).unwrap()
    }

    #[test]
    fn chebyshev_cubic() {
        let r = run(&[-1.0, 1.0], 3, &[1.0]);
        assert!(r.converged);
        assert!((r.deviation - 0.25).abs() < 1e-12);
        let m = r.poly.to_monomial();
        assert!((m[1] + 0.75).abs() < 1e-12 && (m[3] - 1.0).abs() < 1e-12);
        assert_eq!(r.alternation.len(), 4);
        assert_eq!(r.zeros_per_band, vec![3]);
    }

    #[test]
    fn symmetric_two_band_quadratic_and_cubic() {
        let r = run(&[-1.0, -0.5, 0.5, 1.0], 2, &[0.5, 0.5]);
        assert!((r.deviation - 0.375).abs() < 1e-12);
        let m = r.poly.to_monomial();
        assert!((m[0] + 0.625).abs() < 1e-12 && m[1].abs() < 1e-12);
        let r = run(&[-1.0, -0.5, 0.5, 1.0], 3, &[0.5, 0.5]);
        assert_eq!(r.zeros_per_band, vec![1, 1]);
        assert_eq!(r.gap_zeros[0].len(), 1);
        assert!(r.gap_zeros[0][0].abs() < 1e-10);
    }
}
