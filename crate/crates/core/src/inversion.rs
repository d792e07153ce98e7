//! Real Jacobi inversion: one point per gap with prescribed sums of
//! harmonic measures.
//!
//! Gap `j` is parametrized by `θ_j ∈ [0, π]`. Both gap ends change every
//! `ω_k` by an integer, so `F(c) = Σ_j ω(c_j)` is a well-defined map of the
//! torus `(ℝ/πℤ)^{l-1}` to `(ℝ/ℤ)^{l-1}`; the solver inverts it by damped
//! Newton and then picks the end of any gap point sitting on an endpoint so
//! that the `mod 2` condition holds whenever it can.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::domain::{IntervalSystem, Location};
use crate::error::{Error, Result};
use crate::potential::PotentialTable;
use crate::szego::{gamma_n, PhaseData};

/// Points `c_j` with flags for gap ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionSolution {
    pub n: Option<usize>,
    pub tau: Vec<f64>,
    pub gamma: Vec<f64>,
    pub sigma: Vec<u8>,
    pub c: Vec<f64>,
    pub theta: Vec<f64>,
    pub endpoint_flags: Vec<bool>,
    /// Torus defect of `Σ_j ω_k(c_j) − γ_k` modulo 2.
    pub residual: f64,
    /// Defect of the same relation modulo 1.
    pub residual_mod1: f64,
    /// Whether the relation also holds modulo 2 within `1e-8`.
    pub mod2_consistent: bool,
    pub iterations: usize,
}

/// Distance of `v` to the lattice `p·ℤ`.
pub fn torus_defect(v: f64, p: f64) -> f64 {
    let r = v.rem_euclid(p);
    r.min(p - r).abs()
}

/// `Σ_j ω_k(x_j)` for `k = 0..l-2`, points given by gap angles.
pub fn forward_theta(table: &PotentialTable, theta: &[f64]) -> Result<Vec<f64>> {
    let l = table.l();
    let mut out = vec![0.0; l - 1];
    for (j, &t) in theta.iter().enumerate() {
        let w = table.omega_in_gap(j, t)?;
        for k in 0..l - 1 {
            out[k] += w[k];
        }
    }
    Ok(out)
}

fn thetas_of(sys: &IntervalSystem, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() + 1 != sys.l() {
        return Err(Error::InvalidArgument(format!(
            "expected {} gap points, got {}",
            sys.l() - 1,
            x.len()
        )));
    }
    x.iter()
        .enumerate()
        .map(|(j, &xj)| {
            let (lo, hi) = sys.gap(j);
            match sys.locate(xj) {
                Location::Gap(g) if g == j => Ok(IntervalSystem::theta_of(lo, hi, xj)),
                Location::Endpoint(i) if i == 2 * j + 1 => Ok(0.0),
                Location::Endpoint(i) if i == 2 * j + 2 => Ok(PI),
                _ => Err(Error::OutsideDomain(format!("{xj} is not in gap {j}"))),
            }
        })
        .collect()
}

/// `F_k = Σ_j ω_k(x_j)`, one point per closed gap.
pub fn abel_forward(table: &PotentialTable, x: &[f64]) -> Result<Vec<f64>> {
    forward_theta(table, &thetas_of(table.system(), x)?)
}

/// `t_k = ½ Σ_j ω_k(x_j)`.
pub fn abel_tilde(table: &PotentialTable, x: &[f64]) -> Result<Vec<f64>> {
    Ok(abel_forward(table, x)?.into_iter().map(|v| 0.5 * v).collect())
}

fn jacobian(table: &PotentialTable, theta: &[f64]) -> DMatrix<f64> {
    let m = theta.len();
    let mut jac = DMatrix::zeros(m, m);
    for (j, &t) in theta.iter().enumerate() {
        let d = table.omega_in_gap_derivative(j, t);
        for k in 0..m {
            jac[(k, j)] = d[k];
        }
    }
    jac
}

fn mod1_residual(f: &[f64], target: &[f64]) -> Vec<f64> {
    f.iter()
        .zip(target)
        .map(|(a, b)| {
            let r = a - b;
            r - r.round()
        })
        .collect()
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Newton iteration from `theta0`; returns angles, defect and iterations.
fn newton(table: &PotentialTable, target: &[f64], theta0: &[f64]) -> Result<(Vec<f64>, f64, usize)> {
    let mut th = theta0.to_vec();
    let mut r = mod1_residual(&forward_theta(table, &th)?, target);
    let mut nr = norm_inf(&r);
    for it in 0..100 {
        if nr < 1e-14 {
            return Ok((th, nr, it));
        }
        let jac = jacobian(table, &th);
        let step = match jac.lu().solve(&DVector::from_column_slice(&r)) {
            Some(s) => s,
            None => return Ok((th, nr, it)),
        };
        let mut t = 1.0;
        let mut improved = false;
        while t > 1e-4 {
            let cand: Vec<f64> = th
                .iter()
                .zip(step.iter())
                .map(|(a, s)| (a - t * s).rem_euclid(PI))
                .collect();
            let rc = mod1_residual(&forward_theta(table, &cand)?, target);
            let nc = norm_inf(&rc);
            if nc < nr {
                th = cand;
                r = rc;
                nr = nc;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            return Ok((th, nr, it));
        }
    }
    Ok((th, nr, 100))
}

/// Solves `Σ_j ω_k(c_j) = target_k` modulo 2 (modulo 1 where that is all
/// the torus allows), starting from the gap midpoints.
pub fn solve_inversion(table: &PotentialTable, target: &[f64]) -> Result<InversionSolution> {
    let m = table.l() - 1;
    solve_inversion_from(table, target, &vec![PI / 2.0; m])
}

/// As [`solve_inversion`] with an explicit starting point in gap angles.
pub fn solve_inversion_from(
    table: &PotentialTable,
    target: &[f64],
    theta0: &[f64],
) -> Result<InversionSolution> {
    let sys = table.system();
    let m = sys.l() - 1;
    if target.len() != m || theta0.len() != m {
        return Err(Error::InvalidArgument(format!("expected {m} target values")));
    }
    let tol = 1e-12;
    let mut best = newton(table, target, theta0)?;
    if best.1 > tol {
        // Deterministic restarts: a coarse grid, then seeded random starts.
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for attempt in 0..40 {
            let start: Vec<f64> = if attempt < 8 {
                (0..m)
                    .map(|j| PI * ((attempt + j) % 8) as f64 / 8.0 + PI / 16.0)
                    .collect()
            } else {
                (0..m).map(|_| rng.gen_range(0.0..PI)).collect()
            };
            let cand = newton(table, target, &start)?;
            if cand.1 < best.1 {
                best = cand;
            }
            if best.1 <= tol {
                break;
            }
        }
    }
    let (mut th, res1, iters) = best;
    if res1 > 1e-9 {
        return Err(Error::NoConvergence {
            what: "Jacobi inversion",
            iterations: iters,
            residual: res1,
        });
    }

    // Points at a gap end: choose the end matching the relation modulo 2.
    let mut flags = vec![false; m];
    for j in 0..m {
        if sys.near_endpoint(sys.gap_point(j, th[j])) {
            flags[j] = true;
            th[j] = if th[j] < PI / 2.0 { 0.0 } else { PI };
        }
    }
    let flagged: Vec<usize> = (0..m).filter(|&j| flags[j]).collect();
    if !flagged.is_empty() && flagged.len() <= 12 {
        let mut best_choice = th.clone();
        let mut best_def = f64::INFINITY;
        for mask in 0..(1u32 << flagged.len()) {
            let mut cand = th.clone();
            for (b, &j) in flagged.iter().enumerate() {
                cand[j] = if mask >> b & 1 == 1 { PI } else { 0.0 };
            }
            let f = forward_theta(table, &cand)?;
            let def = f
                .iter()
                .zip(target)
                .map(|(a, b)| torus_defect(a - b, 2.0))
                .fold(0.0, f64::max);
            if def < best_def - 1e-12 {
                best_def = def;
                best_choice = cand;
            }
        }
        th = best_choice;
    }
    let f = forward_theta(table, &th)?;
    let residual = f
        .iter()
        .zip(target)
        .map(|(a, b)| torus_defect(a - b, 2.0))
        .fold(0.0, f64::max);
    let residual_mod1 = f
        .iter()
        .zip(target)
        .map(|(a, b)| torus_defect(a - b, 1.0))
        .fold(0.0, f64::max);
    let c = th
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let (lo, hi) = sys.gap(j);
            if flags[j] {
                if t == 0.0 {
                    lo
                } else {
                    hi
                }
            } else {
                sys.gap_point(j, t)
            }
        })
        .collect();
    Ok(InversionSolution {
        n: None,
        tau: target.to_vec(),
        gamma: target.to_vec(),
        sigma: vec![0; m],
        c,
        theta: th,
        endpoint_flags: flags,
        residual,
        residual_mod1,
        mod2_consistent: residual <= 1e-8,
        iterations: iters,
    })
}

/// Inversion for degree `n`: phase data from `n ω(∞) + L`, then
/// [`solve_inversion`] on `γ`.
pub fn solve_for_n(table: &PotentialTable, log_moments: &[f64], n: usize) -> Result<InversionSolution> {
    let PhaseData { tau, gamma, sigma, .. } = gamma_n(table, log_moments, n);
    let mut sol = solve_inversion(table, &gamma)?;
    // Equivalent modulo-1 form against the unreduced phase.
    let f = forward_theta(table, &sol.theta)?;
    sol.residual_mod1 = f
        .iter()
        .zip(&tau)
        .map(|(a, b)| torus_defect(a - b, 1.0))
        .fold(0.0, f64::max);
    sol.n = Some(n);
    sol.tau = tau;
    sol.gamma = gamma;
    sol.sigma = sigma;
    Ok(sol)
}

/// Gap points for `n = b + kN`, `b = 0..N`, when every `ω_k(∞)` is a
/// multiple of `1/N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicSchedule {
    pub period: usize,
    /// `c[b]` are the gap points for `n = b`.
    pub c: Vec<Vec<f64>>,
    /// Largest `|c_{j,b+kN} − c_{j,b}|` over the checked range.
    pub max_deviation: f64,
    pub periods_checked: usize,
}

pub fn periodic_schedule(
    table: &PotentialTable,
    log_moments: &[f64],
    period: usize,
    b_max: usize,
) -> Result<PeriodicSchedule> {
    if period == 0 {
        return Err(Error::InvalidArgument("period must be positive".into()));
    }
    for (k, w) in table.omega_inf().iter().enumerate() {
        let m = w * period as f64;
        if (m - m.round()).abs() > 1e-8 {
            return Err(Error::InvalidArgument(format!(
                "ω_{k}(∞) = {w} is not a multiple of 1/{period}"
            )));
        }
    }
    let mut c = Vec::with_capacity(period);
    let mut max_deviation: f64 = 0.0;
    for b in 0..period {
        let base = solve_for_n(table, log_moments, b)?;
        for k in 1..=b_max {
            let other = solve_for_n(table, log_moments, b + k * period)?;
            for j in 0..base.c.len() {
                // Either end of a gap stands for the same deleted factor.
                if base.endpoint_flags[j] && other.endpoint_flags[j] {
                    continue;
                }
                max_deviation = max_deviation.max((base.c[j] - other.c[j]).abs());
            }
        }
        c.push(base.c);
    }
    Ok(PeriodicSchedule {
        period,
        c,
        max_deviation,
        periods_checked: b_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(e: &[f64]) -> PotentialTable {
        PotentialTable::new(&IntervalSystem::new(e).unwrap()).unwrap()
    }

    #[test]
    fn symmetric_two_band_cases() {
        let t = table(&[-1.0, -0.5, 0.5, 1.0]);
        let tilde = abel_tilde(&t, &[0.0]).unwrap();
        assert!((tilde[0] - 0.25).abs() < 1e-12);
        let s = solve_inversion(&t, &[0.5]).unwrap();
        assert!(s.c[0].abs() < 1e-12 && !s.endpoint_flags[0]);
        let s = solve_inversion(&t, &[0.0]).unwrap();
        assert!(s.endpoint_flags[0]);
        assert!(s.residual < 1e-12);
        let odd = solve_for_n(&t, &[0.0], 3).unwrap();
        assert!(odd.c[0].abs() < 1e-12);
        let even = solve_for_n(&t, &[0.0], 4).unwrap();
        assert!(even.endpoint_flags[0]);
    }

    #[test]
    fn genus_two_round_trip() {
        let t = table(&[-1.0, -0.6, -0.3, 0.1, 0.35, 1.0]);
        let x = [-0.45, 0.2];
        let f = abel_forward(&t, &x).unwrap();
        let s = solve_inversion(&t, &f).unwrap();
        for (a, b) in s.c.iter().zip(&x) {
            assert!((a - b).abs() < 1e-10, "{a} {b}");
        }
        assert!(s.residual < 1e-12);
    }

    #[test]
    fn rational_measures_give_period() {
        let t = table(&[-1.0, -0.5, 0.5, 1.0]);
        let p = periodic_schedule(&t, &[0.0], 2, 3).unwrap();
        assert!(p.max_deviation < 1e-9);
        assert!(periodic_schedule(&table(&[-1.0, -0.4, 0.2, 1.0]), &[0.0], 2, 1).is_err());
    }
}
