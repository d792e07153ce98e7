//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 when a
//! criterion fails for a reason not listed in the decisions ledger.

use std::f64::consts::PI;
use std::process::ExitCode;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use chebband::asymptotics::{AsymptoticModel, RationalModel};
use chebband::inversion::{abel_forward, abel_tilde, periodic_schedule, solve_inversion, solve_inversion_from, torus_defect};
use chebband::l2_bridge::{bridge_compare, gap_point_agreement, pell_verify, BridgePart, EdgeClassWeight};
use chebband::potential::PotentialTable;
use chebband::quad::QuadConfig;
use chebband::remez::{minimax_monic, RemezConfig, RemezResult};
use chebband::szego::{approx_weight_poly, moment_period_residuals, abelian_moment_residuals, log_moments, PolyWeight, Root, SzegoData, Weight};
use chebband::IntervalSystem;

struct Check {
    pass: bool,
    detail: String,
    /// Failure analysed in the decisions ledger.
    documented: bool,
    /// Reported only; does not enter the verdict.
    info: bool,
}

fn check(pass: bool, detail: String) -> Check {
    Check {
        pass,
        detail,
        documented: false,
        info: false,
    }
}

fn info(detail: String) -> Check {
    Check {
        pass: true,
        detail,
        documented: false,
        info: true,
    }
}

fn documented(pass: bool, detail: String) -> Check {
    Check {
        pass,
        detail,
        documented: true,
        info: false,
    }
}

fn table(e: &[f64]) -> PotentialTable {
    PotentialTable::new(&IntervalSystem::new(e).unwrap()).unwrap()
}

fn remez(t: &PotentialTable, w: &Weight, n: usize) -> RemezResult {
    minimax_monic(t.system(), w, n, t.omega_inf(), &RemezConfig::default()).unwrap()
}

/// `x² + 1`.
fn rho_quadratic() -> Weight {
    let roots = vec![Root { re: 0.0, im: 1.0, mult: 1 }, Root { re: 0.0, im: -1.0, mult: 1 }];
    Weight::Poly(PolyWeight::new(1.0, 1.0, roots).unwrap())
}

/// Endpoints of `{x : −1/3 ≤ T_3(x) ≤ 1}`, the preimage of `[−1, 1]` under
/// `1.5 T_3 − 0.5`; the gap at `−1/2` is closed.
fn t3_shifted_preimage() -> Vec<f64> {
    let s: f64 = -1.0 / 3.0;
    let mut a: Vec<f64> = (0..3).map(|k| ((s.acos() + 2.0 * PI * k as f64) / 3.0).cos()).collect();
    a.push(1.0);
    a.sort_by(f64::total_cmp);
    a
}

/// Endpoints of `{x : |λ T_3(x)| ≤ 1}` from the cubic's trigonometric roots.
fn t3_preimage(lambda: f64) -> Vec<f64> {
    let mut a: Vec<f64> = [1.0 / lambda, -1.0 / lambda]
        .iter()
        .flat_map(|s: &f64| (0..3).map(move |k| ((s.acos() + 2.0 * PI * k as f64) / 3.0).cos()))
        .collect();
    a.sort_by(f64::total_cmp);
    a
}

fn band_grid(sys: &IntervalSystem, per_band: usize) -> Vec<f64> {
    (0..sys.l())
        .flat_map(|k| (0..per_band).map(move |i| (k, PI * (i as f64 + 0.5) / per_band as f64)))
        .map(|(k, t)| sys.band_point(k, t))
        .collect()
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn c1_chebyshev_anchor() -> Vec<Check> {
    let t = table(&[-1.0, 1.0]);
    let sz = SzegoData::new(&t, &Weight::Unit).unwrap();
    let (mut e_remez, mut e_pred, mut e_pt) = (0.0f64, 0.0f64, 0.0f64);
    for n in 1..=20 {
        let exact = 2f64.powi(1 - n as i32);
        e_remez = e_remez.max((remez(&t, &Weight::Unit, n).deviation / exact - 1.0).abs());
        let m = AsymptoticModel::new(&sz, n).unwrap();
        e_pred = e_pred.max((m.predict_deviation().unwrap() / exact - 1.0).abs());
        for i in 0..=200 {
            let th = PI * i as f64 / 200.0;
            let v = m.predict_on_e(th.cos()).unwrap();
            e_pt = e_pt.max((v - 2.0 * (n as f64 * th).cos()).abs());
        }
    }
    vec![
        check(e_remez <= 1e-8, format!("Remez rel err {e_remez:.1e}")),
        check(e_pred <= 1e-10, format!("predicted rel err {e_pred:.1e}")),
        check(e_pt <= 1e-8, format!("pointwise err {e_pt:.1e}")),
    ]
}

fn c2_capacity() -> Vec<Check> {
    let mut err = 0.0f64;
    let mut cov = 0.0f64;
    for a in [0.3, 0.5, 0.7] {
        let e = [-1.0, -a, a, 1.0];
        let cap = table(&e).capacity();
        err = err.max((cap - (1.0 - a * a).sqrt() / 2.0).abs());
        let sys = IntervalSystem::new(&e).unwrap();
        for (s, sh) in [(2.5, -0.7), (0.3, 4.0)] {
            let c2 = PotentialTable::new(&sys.affine(s, sh).unwrap()).unwrap().capacity();
            cov = cov.max((c2 - s * cap).abs());
        }
    }
    let gen = table(&[-1.0, -0.6, -0.3, 0.1, 0.35, 1.0]);
    let sys = gen.system().affine(1.7, 0.2).unwrap();
    cov = cov.max((PotentialTable::new(&sys).unwrap().capacity() - 1.7 * gen.capacity()).abs());
    vec![
        check(err <= 1e-8, format!("closed form err {err:.1e}")),
        check(cov <= 1e-8, format!("affine covariance err {cov:.1e}")),
    ]
}

fn c3_harmonic_measures() -> Vec<Check> {
    let mut sym = 0.0f64;
    for e in [vec![-1.0, -0.3, 0.3, 1.0], vec![-1.0, -0.5, 0.5, 1.0], vec![-1.0, -0.7, 0.7, 1.0], t3_preimage(1.2), t3_preimage(2.0)] {
        let t = table(&e);
        let l = t.l() as f64;
        sym = sym.max(max_abs(t.omega_inf().iter().map(|w| w - 1.0 / l)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut sum_err = 0.0f64;
    let mut cross = 0.0f64;
    for e in [vec![-1.0, -0.4, 0.2, 1.0], vec![-1.0, -0.6, -0.3, 0.1, 0.35, 1.0]] {
        let t = table(&e);
        let sys = t.system().clone();
        for i in 0..25 {
            let x = if i % 5 == 4 {
                sys.right() + rng.gen_range(0.05..2.0)
            } else {
                let j = rng.gen_range(0..sys.l() - 1);
                sys.gap_point(j, rng.gen_range(0.05..0.95) * PI)
            };
            let w: Vec<f64> = (0..sys.l()).map(|k| t.harmonic_measure(Some(x), k).unwrap()).collect();
            sum_err = sum_err.max((w.iter().sum::<f64>() - 1.0).abs());
            let alt = t.omega_at(Complex64::new(x, 0.0)).unwrap();
            cross = cross.max(max_abs(w.iter().zip(&alt).map(|(a, b)| a - b)));
        }
    }
    let fine = QuadConfig {
        abs_tol: 1e-15,
        rel_tol: 1e-14,
        max_panels: 8000,
    };
    let mut per = 0.0f64;
    for e in [vec![-1.0, -0.4, 0.2, 1.0], vec![-1.0, -0.6, -0.3, 0.1, 0.35, 1.0], vec![-2.0, -1.5, -1.0, 0.0, 0.4, 0.9, 1.3, 2.2]] {
        let p = table(&e).alpha_periods(&fine).unwrap();
        for j in 0..p.nrows() {
            for k in 0..p.ncols() {
                per = per.max((p[(j, k)] - if j == k { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    vec![
        check(sym <= 1e-9, format!("symmetric ω(∞) err {sym:.1e}")),
        check(sum_err <= 1e-10 && cross <= 1e-8, format!("Σω(c) err {sum_err:.1e} (50 poles, two evaluations agree {cross:.1e})")),
        check(per <= 1e-8, format!("α-period err {per:.1e}")),
    ]
}

fn random_system(rng: &mut ChaCha8Rng, l: usize) -> Vec<f64> {
    let mut lens: Vec<f64> = (0..2 * l - 1).map(|_| rng.gen_range(0.15..1.0)).collect();
    let total: f64 = lens.iter().sum();
    lens.iter_mut().for_each(|v| *v *= 2.0 / total);
    let mut a = vec![-1.0];
    for v in lens {
        let last = *a.last().unwrap();
        a.push(last + v);
    }
    a
}

fn c4_inversion() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut cases = Vec::new();
    for (i, l) in [2, 2, 3, 3, 4, 4].into_iter().enumerate() {
        let e = random_system(&mut rng, l);
        let count = if i < 4 { 17 } else { 16 };
        let seeds: Vec<u64> = (0..count).map(|_| rng.gen()).collect();
        cases.push((e, seeds));
    }
    let res: Vec<(f64, f64, f64, usize)> = cases
        .par_iter()
        .map(|(e, seeds)| {
            let t = table(e);
            let sys = t.system().clone();
            let m = sys.l() - 1;
            let (mut err, mut multi, mut equiv) = (0.0f64, 0.0f64, 0.0f64);
            for s in seeds {
                let mut r = ChaCha8Rng::seed_from_u64(*s);
                let c: Vec<f64> = (0..m).map(|j| sys.gap_point(j, r.gen_range(0.02..0.98) * PI)).collect();
                let target = abel_forward(&t, &c).unwrap();
                let sol = solve_inversion(&t, &target).unwrap();
                err = err.max(max_abs(sol.c.iter().zip(&c).map(|(a, b)| a - b)));
                let th0: Vec<f64> = (0..m).map(|_| r.gen_range(0.0..PI)).collect();
                let other = solve_inversion_from(&t, &target, &th0).unwrap();
                multi = multi.max(max_abs(other.c.iter().zip(&sol.c).map(|(a, b)| a - b)));
                let f = abel_forward(&t, &sol.c).unwrap();
                let tt = abel_tilde(&t, &sol.c).unwrap();
                for k in 0..m {
                    let d1 = torus_defect(f[k] - target[k], 2.0);
                    let d2 = torus_defect(tt[k] - 0.5 * target[k], 1.0);
                    equiv = equiv.max((d1 - 2.0 * d2).abs()).max(d1);
                }
            }
            (err, multi, equiv, seeds.len())
        })
        .collect();
    let n: usize = res.iter().map(|r| r.3).sum();
    let err = max_abs(res.iter().map(|r| r.0));
    let multi = max_abs(res.iter().map(|r| r.1));
    let equiv = max_abs(res.iter().map(|r| r.2));
    vec![
        check(err <= 1e-9, format!("{n} targets, round trip err {err:.1e}")),
        check(multi <= 1e-8, format!("multi-start spread {multi:.1e}")),
        check(equiv <= 1e-8, format!("mod-2 / halved mod-1 equivalence {equiv:.1e}")),
    ]
}

fn ratio_err(t: &PotentialTable, sz: &SzegoData, n: usize) -> f64 {
    let r = remez(t, sz.weight(), n);
    let p = AsymptoticModel::new(sz, n).unwrap().predict_deviation().unwrap();
    (r.deviation / p - 1.0).abs()
}

fn c5_widom() -> Vec<Check> {
    let t = table(&[-1.0, -0.4, 0.2, 1.0]);
    let unit = SzegoData::new(&t, &Weight::Unit).unwrap();
    let (u20, u40) = (ratio_err(&t, &unit, 20), ratio_err(&t, &unit, 40));
    let rat = SzegoData::new(&t, &rho_quadratic()).unwrap();
    let ns: Vec<usize> = (10..=40).step_by(5).collect();
    let errs: Vec<f64> = ns.par_iter().map(|&n| ratio_err(&t, &rat, n)).collect();
    let (r20, r40) = (errs[2], errs[6]);
    // Least squares slope of log err against n.
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 7.0, ys.iter().sum::<f64>() / 7.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let q = slope.exp();
    vec![
        check(u40 <= 0.05 && u40 < u20, format!("W≡1: |ratio−1| n=20 {u20:.2e}, n=40 {u40:.2e}")),
        check(r40 <= 0.05 && r40 < r20, format!("ρ=x²+1: n=20 {r20:.2e}, n=40 {r40:.2e}")),
        check(q < 1.0, format!("geometric fit q = {q:.3}")),
    ]
}

struct ZeroRun {
    mismatches: Vec<usize>,
    alternation_ok: bool,
    d20: Option<f64>,
    d40: Option<f64>,
    /// Distance of `c_1` to the nearest gap end at each mismatch.
    mismatch_dist: Vec<f64>,
}

fn zero_run(e: &[f64]) -> ZeroRun {
    let t = table(e);
    let sz = SzegoData::new(&t, &Weight::Unit).unwrap();
    let sys = t.system().clone();
    let rows: Vec<(usize, bool, bool, Option<f64>, f64)> = (10..=40)
        .into_par_iter()
        .map(|n| {
            let r = remez(&t, &Weight::Unit, n);
            let model = AsymptoticModel::new(&sz, n).unwrap();
            let zc = model.zero_counts().unwrap();
            let end = model
                .solution()
                .c
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let (lo, hi) = sys.gap(j);
                    (c - lo).min(hi - c)
                })
                .fold(f64::INFINITY, f64::min);
            let ok = zc.per_band.iter().zip(&r.zeros_per_band).all(|(a, b)| *a == *b as i64);
            let dist = zc.gap_zeros[0].and_then(|c| r.gap_zeros[0].iter().map(|z| (z - c).abs()).min_by(f64::total_cmp));
            (n, ok, r.alternation.len() == n + 1, dist, end)
        })
        .collect();
    let at = |n: usize| rows.iter().find(|r| r.0 == n).unwrap().3;
    ZeroRun {
        mismatches: rows.iter().filter(|r| !r.1).map(|r| r.0).collect(),
        mismatch_dist: rows.iter().filter(|r| !r.1).map(|r| r.4).collect(),
        alternation_ok: rows.iter().all(|r| r.2),
        d20: at(20),
        d40: at(40),
    }
}

fn c6_zeros(alternation: &mut bool) -> Vec<Check> {
    // Polynomial preimages: the gap points are periodic in n and stay away
    // from the gap ends, as the count formula requires.
    let exact = [vec![-1.0, -0.5, 0.5, 1.0], t3_shifted_preimage(), t3_preimage(1.2)];
    let generic = [vec![-1.0, -0.4, 0.2, 1.0], vec![-1.0, -0.2, 0.3, 1.0], vec![-1.0, -0.6, -0.3, 0.1, 0.35, 1.0]];
    let all: Vec<&Vec<f64>> = exact.iter().chain(&generic).collect();
    let runs: Vec<ZeroRun> = all.par_iter().map(|e| zero_run(e)).collect();
    *alternation = runs.iter().all(|r| r.alternation_ok);
    let mut out = Vec::new();
    for (e, r) in all.iter().zip(&runs).take(3) {
        out.push(check(
            r.mismatches.is_empty(),
            format!("genus {} preimage counts n=10..40, mismatches {:?}", e.len() / 2 - 1, r.mismatches),
        ));
    }
    for (e, r) in all.iter().zip(&runs).skip(3) {
        let d: Vec<String> = r.mismatch_dist.iter().map(|d| format!("{d:.0e}")).collect();
        out.push(info(format!(
            "generic genus {} mismatches {:?} at gap-end distances [{}]",
            e.len() / 2 - 1,
            r.mismatches,
            d.join(", ")
        )));
    }
    for r in &runs[3..5] {
        match (r.d20, r.d40) {
            (Some(a), Some(b)) => out.push(check(b <= 1e-2 && b < a, format!("gap zero dist n=20 {a:.1e}, n=40 {b:.1e}"))),
            _ => out.push(check(false, "gap point not interior at n = 20 or 40".into())),
        }
    }
    out
}

fn c7_pell(alternation: bool) -> Vec<Check> {
    let t = table(&[-1.0, -0.4, 0.2, 1.0]);
    let mut defect = 0.0f64;
    let mut fit = 0.0f64;
    for w in [Weight::Unit, rho_quadratic()] {
        let sz = SzegoData::new(&t, &w).unwrap();
        for n in [20, 30] {
            let m = RationalModel::new(&AsymptoticModel::new(&sz, n).unwrap()).unwrap();
            defect = defect.max(max_abs(band_grid(t.system(), 300).into_iter().map(|x| m.pell_defect(x).unwrap())));
            fit = fit.max(m.polynomial_residual().unwrap());
        }
    }
    vec![
        check(alternation, "n+1 alternation points in every Remez run of the zero sweep".into()),
        check(defect <= 1e-9, format!("R²−HS²−1 on E {defect:.1e}")),
        check(fit <= 1e-7, format!("ρ·g·R_n interpolation residual {fit:.1e}")),
    ]
}

fn c8_szego() -> Vec<Check> {
    let t = table(&[-1.0, -0.4, 0.2, 1.0]);
    let c0 = -0.1;
    let weights = [
        Weight::constant(2.5),
        Weight::func("abs", move |x| (x - c0).abs()),
        Weight::func("exp", f64::exp),
        Weight::func("inv", |x| 1.0 / (x * x + 1.0)),
    ];
    let grid = band_grid(t.system(), 1000);
    let mut fact = 0.0f64;
    let mut cross = 0.0f64;
    for w in &weights {
        let sz = SzegoData::new(&t, w).unwrap();
        let err = grid
            .par_iter()
            .map(|&x| {
                let b = sz.boundary(x).unwrap();
                ((b * b.conj()).re.sqrt() / w.eval(x) - 1.0).abs()
            })
            .reduce(|| 0.0, f64::max);
        fact = fact.max(err);
        let lm = log_moments(&t, w).unwrap();
        cross = cross.max(max_abs(moment_period_residuals(&t, w, &lm).unwrap()));
    }
    if let Weight::Poly(p) = rho_quadratic() {
        cross = cross.max(max_abs(abelian_moment_residuals(&t, &p).unwrap()));
    }
    vec![
        check(fact <= 1e-6, format!("√(𝒲⁺𝒲⁻)/W − 1 on 2000 points {fact:.1e}")),
        check(cross <= 1e-6, format!("cross-identity residual {cross:.1e}")),
    ]
}

/// Hull Chebyshev coefficients of `f` of degree `d` by discrete cosine sums.
fn cheb_coeffs(f: impl Fn(f64) -> f64, center: f64, scale: f64, d: usize) -> Vec<f64> {
    let m = d + 1;
    let vals: Vec<f64> = (0..m)
        .map(|i| f(center + scale * (PI * (i as f64 + 0.5) / m as f64).cos()))
        .collect();
    (0..=d)
        .map(|k| {
            let s: f64 = (0..m)
                .map(|i| vals[i] * (PI * k as f64 * (i as f64 + 0.5) / m as f64).cos())
                .sum();
            s * if k == 0 { 1.0 } else { 2.0 } / m as f64
        })
        .collect()
}

fn c9_periodicity() -> Vec<Check> {
    let lambda = 1.2;
    let t = table(&t3_preimage(lambda));
    let lm = vec![0.0; 2];
    let sched = periodic_schedule(&t, &lm, 3, 10).unwrap();
    let sys = t.system();
    let mut coef = 0.0f64;
    for m in 1..=8usize {
        let r = remez(&t, &Weight::Unit, 3 * m);
        let lead = 2f64.powi(m as i32 - 1) * (4.0 * lambda).powi(m as i32);
        let exact = cheb_coeffs(
            |x| {
                let y = lambda * (4.0 * x * x * x - 3.0 * x);
                let tm = if y.abs() <= 1.0 { (m as f64 * y.acos()).cos() } else { (m as f64 * y.abs().acosh()).cosh() * y.signum().powi(m as i32) };
                tm / lead
            },
            sys.center(),
            sys.half_width(),
            3 * m,
        );
        let norm = max_abs(exact.iter().copied());
        coef = coef.max(max_abs(r.poly.coef.iter().zip(&exact).map(|(a, b)| a - b)) / norm);
    }
    vec![
        check(sched.max_deviation <= 1e-8, format!("c_(b+3k) − c_b over k ≤ 10: {:.1e}", sched.max_deviation)),
        check(coef <= 1e-7, format!("composed Chebyshev coefficient err {coef:.1e}")),
    ]
}

fn c10_bridge() -> Vec<Check> {
    let mut out = Vec::new();
    let t1 = table(&[-1.0, 1.0]);
    let mut e1 = 0.0f64;
    let mut sides = 0.0f64;
    for n in [5, 10] {
        let r = bridge_compare(&t1, &Weight::Unit, n, BridgePart::Even).unwrap();
        e1 = e1.max((r.ratio - 1.0).abs());
        let exact = 2f64.powi(1 - 2 * n as i32);
        sides = sides.max((r.lhs / exact - 1.0).abs()).max((r.rhs / exact - 1.0).abs());
    }
    out.push(check(e1 <= 1e-6 && sides <= 1e-6, format!("[−1,1] |ratio−1| {e1:.1e}, sides vs 2^(1−2n) {sides:.1e}")));

    let t2 = table(&[-1.0, -0.5, 0.5, 1.0]);
    let r10 = bridge_compare(&t2, &Weight::Unit, 10, BridgePart::Even).unwrap();
    let r20 = bridge_compare(&t2, &Weight::Unit, 20, BridgePart::Even).unwrap();
    let (a, b) = ((r10.ratio - 1.0).abs(), (r20.ratio - 1.0).abs());
    out.push(documented(
        b < a,
        format!("symmetric two-band |ratio−1| n=10 {a:.1e}, n=20 {b:.1e} (both sides exact)"),
    ));
    let o10 = bridge_compare(&t2, &Weight::Unit, 10, BridgePart::Odd).unwrap();
    let o20 = bridge_compare(&t2, &Weight::Unit, 20, BridgePart::Odd).unwrap();
    out.push(info(format!(
        "odd part |ratio−1| n=10 {:.1e}, n=20 {:.1e}",
        (o10.ratio - 1.0).abs(),
        (o20.ratio - 1.0).abs()
    )));

    let mut agree = 0.0f64;
    let mut spread = 0.0f64;
    for e in [vec![-1.0, -0.4, 0.2, 1.0], vec![-1.0, -0.6, -0.3, 0.1, 0.35, 1.0], t3_preimage(1.2)] {
        let t = table(&e);
        for n in [5, 10, 20] {
            let r = bridge_compare(&t, &Weight::Unit, n, BridgePart::Even).unwrap();
            let mask = r.delta_mask.expect("a mask with Pell signature −1");
            let w = EdgeClassWeight::new(t.system(), mask, false, &Weight::Unit).unwrap();
            agree = agree.max(gap_point_agreement(&t, &w, n).unwrap());
            let xs: Vec<Vec<f64>> = r
                .candidates
                .iter()
                .map(|c| {
                    let w = EdgeClassWeight::new(t.system(), c.mask, false, &Weight::Unit).unwrap();
                    pell_verify(&w, n).unwrap().x
                })
                .collect();
            for x in &xs[1..] {
                spread = spread.max(max_abs(x.iter().zip(&xs[0]).map(|(p, q)| p - q)));
            }
        }
    }
    out.push(check(agree <= 1e-6, format!("x_(j,n) vs c_(j,2n) {agree:.1e}")));
    out.push(documented(spread <= 1e-6, format!("x_(j,n) spread across R ∈ 𝓔 {spread:.1e}")));
    out
}

fn c11_stability() -> Vec<Check> {
    let t = table(&[-1.0, -0.4, 0.2, 1.0]);
    let w = Weight::func("exp", f64::exp);
    let sys = t.system();
    let grid = band_grid(sys, 400);
    let mut worst_c = 0.0f64;
    let mut monotone = true;
    let mut lines = Vec::new();
    for n in [10usize, 20, 30] {
        let mw = remez(&t, &w, n);
        let mut prev = f64::INFINITY;
        for nu in [2usize, 4, 6, 8] {
            let rep = approx_weight_poly(&t, &w, nu).unwrap();
            let rho = Weight::Poly(rep.rho.clone());
            let mr = remez(&t, &rho, n);
            let d = max_abs(grid.iter().map(|&x| mw.normalized(x) / w.eval(x) - mr.normalized(x) / rho.eval(x)));
            worst_c = worst_c.max(d / (n as f64 * rep.rel_error));
            monotone &= d < prev;
            prev = d;
            if nu == 8 {
                lines.push(format!("n={n}: δ={:.1e} diff={d:.1e}", rep.rel_error));
            }
        }
    }
    vec![
        check(worst_c <= 1.0, format!("max diff/(n·δ) = {worst_c:.2e}; {}", lines.join(", "))),
        check(monotone, "difference shrinks with δ at every n".into()),
    ]
}

fn main() -> ExitCode {
    let mut alternation = false;
    let c6 = c6_zeros(&mut alternation);
    let results: Vec<(usize, &str, Vec<Check>)> = vec![
        (1, "Chebyshev anchor", c1_chebyshev_anchor()),
        (2, "capacity", c2_capacity()),
        (3, "harmonic measures", c3_harmonic_measures()),
        (4, "Jacobi inversion", c4_inversion()),
        (5, "Widom asymptotics", c5_widom()),
        (6, "zeros", c6),
        (7, "alternation and Pell", c7_pell(alternation)),
        (8, "Szegő factorization", c8_szego()),
        (9, "periodicity", c9_periodicity()),
        (10, "L∞–L2 bridge", c10_bridge()),
        (11, "stability under ρ_ν", c11_stability()),
    ];
    let mut hard_failure = false;
    for (k, name, checks) in &results {
        let pass = checks.iter().all(|c| c.pass);
        let details: Vec<String> = checks
            .iter()
            .map(|c| {
                let tag = match (c.pass, c.documented, c.info) {
                    (_, _, true) => " [info]",
                    (true, _, _) => "",
                    (false, true, _) => " [FAIL, see ledger]",
                    (false, false, _) => " [FAIL]",
                };
                format!("{}{tag}", c.detail)
            })
            .collect();
        hard_failure |= checks.iter().any(|c| !c.pass && !c.documented);
        println!("criterion {k:>2} {name}: {} | {}", if pass { "PASS" } else { "FAIL" }, details.join("; "));
    }
    if hard_failure {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
