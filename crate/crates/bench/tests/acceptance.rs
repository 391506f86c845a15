//! End-to-end acceptance run on the desk fixture. Prints one line per
//! criterion and exits nonzero if any fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use potgame_bench::metrics::{csv_bytes, simulation_config, to_records};
use potgame_bench::{
    desk_fixture, estimate_reference_optimum, fig1_suite, fig2_suite, fit_loglog_slope, running_minimum, CaseSpec,
    MetricsRecord,
};
use potgame_core::dynamics::{
    run_simulation, run_simulation_with, Algorithm, DelayModel, PotentialGame, StalenessMonitor,
};
use potgame_core::ingest::{parse_tntp, read_tntp};
use potgame_core::potential::{EntropyRegularizer, StepSchedule};
use potgame_core::routing::{BprParams, RoutingGame, DEFAULT_SUPPORT_TOL};

const SUITE_HORIZON: u64 = 100_000;
const CASE1_HORIZON: u64 = 10_000;
const ORACLE_BUDGET: u64 = 10 * SUITE_HORIZON;
const SEED: u64 = 7;

struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn check(&mut self, id: &str, ok: bool, detail: String) {
        let line = format!("[{}] {id}: {detail}", if ok { "PASS" } else { "FAIL" });
        println!("{line}");
        self.lines.push((ok, line));
    }
}

struct CaseRun {
    case: CaseSpec,
    records: Vec<MetricsRecord>,
    staleness: StalenessMonitor,
}

fn points(records: &[MetricsRecord]) -> Vec<(u64, f64)> {
    records.iter().map(|r| (r.k, r.gap)).collect()
}

fn run_monitored(game: &RoutingGame, case: &CaseSpec, phi_star: f64) -> CaseRun {
    let mut staleness = StalenessMonitor::new(case.delay);
    let trace = run_simulation_with(game, &simulation_config(case, SEED, phi_star), |v| staleness.observe(v))
        .unwrap_or_else(|e| panic!("case {} failed: {e}", case.label));
    CaseRun {
        records: to_records(&trace, case, SEED),
        case: case.clone(),
        staleness,
    }
}

fn slope(run: &CaseRun, k_min: u64, k_max: u64, eps: f64) -> f64 {
    fit_loglog_slope(&points(&run.records), k_min, k_max, eps).unwrap_or(f64::NAN)
}

fn gap_at(run: &CaseRun, k: u64) -> f64 {
    run.records[(k - 1) as usize].gap
}

/// Adaptive Simpson quadrature.
fn quad<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) + rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut report = Report { lines: Vec::new() };

    let game = desk_fixture().expect("desk fixture");
    let bundle = *game.smoothness();
    println!(
        "desk fixture: {} nodes, {} edges, {} players; L = {:.6} (analytic {:.6}), mu* = {:.6e}, D_X = {}",
        game.network().node_count(),
        game.network().edge_count(),
        game.player_count(),
        bundle.lipschitz,
        game.analytic_lipschitz(),
        bundle.mu_star,
        bundle.diameter
    );
    let oracle = estimate_reference_optimum(&game, ORACLE_BUDGET).expect("oracle");
    let eps = oracle.epsilon_oracle;
    println!("oracle: phi* = {}, eps_oracle = {eps:e}, budget {ORACLE_BUDGET}", oracle.phi_star);

    // Case 1 at the shorter horizon, with gradient and iterate bookkeeping.
    let case1 = CaseSpec::new("case1", DelayModel::None, &bundle, CASE1_HORIZON).unwrap();
    assert_eq!(case1.schedule, StepSchedule::default_power(1.0, &bundle).unwrap());
    let mut grad_checks = 0u64;
    let mut grad_violations = 0u64;
    let mut worst_grad_ratio: f64 = 0.0;
    let case1_config = simulation_config(&case1, SEED, oracle.phi_star);
    let initial_grad = game.pseudogradient(
        &(0..game.player_count())
            .map(|i| game.strategy_space(i).uniform_point())
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let mut prev_grad = initial_grad;
    let case1_trace = run_simulation_with(&game, &case1_config, |v| {
        // v.gradients is g_{k+1}; prev_grad is g_k
        let w = v.weights;
        let diff = prev_grad
            .iter()
            .flatten()
            .zip(v.gradients.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let bound = bundle.lipschitz * bundle.diameter * (w.a + w.a_next) / w.big_a_next;
        grad_checks += 1;
        worst_grad_ratio = worst_grad_ratio.max(diff / bound);
        if diff > bound {
            grad_violations += 1;
        }
        prev_grad = v.gradients.to_vec();
    })
    .expect("case 1");
    let case1_records = to_records(&case1_trace, &case1, SEED);

    // 1. pathwise bound
    let regs: Vec<EntropyRegularizer> = (0..game.player_count())
        .map(|i| EntropyRegularizer::new(game.strategy_space(i)).unwrap())
        .collect();
    let d_psi: f64 = regs
        .iter()
        .zip(&oracle.x_star)
        .zip(&case1_trace.initial)
        .map(|((r, xs), x0)| r.bregman(xs, x0).unwrap())
        .sum();
    let mut violations = 0;
    let mut worst: f64 = f64::NEG_INFINITY;
    for r in &case1_records {
        let bound = d_psi / r.big_a_k + eps;
        worst = worst.max(r.gap - bound);
        if r.gap > bound {
            violations += 1;
        }
    }
    report.check(
        "1 pathwise bound",
        violations == 0,
        format!("{violations} violations over k in [1, {CASE1_HORIZON}]; D_psi(x*, x0) = {d_psi:.6}, max(gap - bound) = {worst:.3e}"),
    );

    // 2. no-delay rate
    let s_case1 = fit_loglog_slope(&points(&case1_records), 100, 10_000, eps).unwrap_or(f64::NAN);
    report.check("2 no-delay rate", s_case1 <= -1.5, format!("slope over [1e2, 1e4] = {s_case1:.4} (need <= -1.5)"));

    // Delay suites.
    let fig1 = fig1_suite(&bundle, SUITE_HORIZON).unwrap();
    let fig2 = fig2_suite(&bundle, SUITE_HORIZON).unwrap();
    let det = |d, alpha| DelayModel::DeterministicPower { d, alpha };
    let extra = vec![
        CaseSpec::new("alpha0.5", det(1.0, 0.5), &bundle, SUITE_HORIZON).unwrap(),
        CaseSpec::new("alpha1.5", det(0.1, 1.5), &bundle, SUITE_HORIZON).unwrap(),
    ];
    let all_cases: Vec<CaseSpec> = fig1.iter().chain(&extra).chain(&fig2).cloned().collect();
    let runs: Vec<CaseRun> = std::thread::scope(|s| {
        let handles: Vec<_> = all_cases
            .iter()
            .map(|c| {
                let game = &game;
                let phi_star = oracle.phi_star;
                s.spawn(move || run_monitored(game, c, phi_star))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("case thread")).collect()
    });
    let (fig1_runs, rest) = runs.split_at(fig1.len());
    let (extra_runs, fig2_runs) = rest.split_at(extra.len());
    let by_label = |label: &str| {
        fig1_runs
            .iter()
            .chain(extra_runs)
            .find(|r| r.case.label == label)
            .unwrap_or_else(|| panic!("no case {label}"))
    };
    for r in fig1_runs.iter().chain(extra_runs) {
        println!(
            "  {:<9} {:?} / {:?}: gap(1e2) = {:.3e}, gap(1e5) = {:.3e}, slope[1e3,1e5] = {:.3}",
            r.case.label,
            r.case.delay,
            r.case.schedule,
            gap_at(r, 100),
            gap_at(r, SUITE_HORIZON),
            slope(r, 1_000, 100_000, eps)
        );
    }

    // 3. constant delay
    let c2 = by_label("case2");
    let c3 = by_label("case3");
    let s2 = slope(c2, 1_000, 100_000, eps);
    let t2 = slope(c2, 10_000, 100_000, eps);
    let t3 = slope(c3, 10_000, 100_000, eps);
    report.check(
        "3 constant delay",
        s2 <= -0.8 && (t3 - t2).abs() <= 0.3,
        format!("D=10 slope [1e3,1e5] = {s2:.4} (need <= -0.8); tail [1e4,1e5]: D=10 {t2:.4}, D=50 {t3:.4}, |diff| = {:.4} (need <= 0.3)", (t3 - t2).abs()),
    );

    // 4. sublinear delay
    let s05 = slope(by_label("alpha0.5"), 1_000, 100_000, eps);
    let s07 = slope(by_label("case5"), 1_000, 100_000, eps);
    report.check(
        "4 sublinear delay",
        s05 <= -0.4 && s07 <= -0.25,
        format!("alpha=0.5 slope = {s05:.4} (need <= -0.4); alpha=0.7 slope = {s07:.4} (need <= -0.25)"),
    );

    // 5. linear delay
    let c6 = by_label("case6");
    let (g_lo, g_hi) = (gap_at(c6, 100), gap_at(c6, SUITE_HORIZON));
    report.check(
        "5 linear delay",
        matches!(c6.case.schedule, StepSchedule::Inverse { .. }) && g_hi < g_lo,
        format!("Inverse schedule: gap(1e5) = {g_hi:.4e} < gap(1e2) = {g_lo:.4e}"),
    );

    // 6. superlinear delay
    let c15 = by_label("alpha1.5");
    let gaps: Vec<f64> = c15.records.iter().map(|r| r.gap).collect();
    let env = running_minimum(&gaps);
    let monotone = env.windows(2).all(|w| w[1] <= w[0]) && env.iter().all(|g| g.is_finite());
    let (first, last) = (gaps[0], *gaps.last().unwrap());
    report.check(
        "6 superlinear delay",
        matches!(c15.case.schedule, StepSchedule::InverseLog { .. }) && monotone && last < first,
        format!("InverseLog schedule: running minimum nonincreasing = {monotone}; final gap {last:.4e} < initial gap {first:.4e}"),
    );

    // 7. zero-delay reduction
    let instant = run_simulation(&game, &case1_config.clone().algorithm(Algorithm::Instant)).unwrap();
    let delayed = run_simulation(&game, &case1_config.clone().algorithm(Algorithm::Delayed)).unwrap();
    let csv1 = csv_bytes(&to_records(&instant, &case1, SEED)).unwrap();
    let csv2 = csv_bytes(&to_records(&delayed, &case1, SEED)).unwrap();
    report.check(
        "7 zero-delay reduction",
        csv1 == csv2 && instant.final_y == delayed.final_y && instant.records.len() == CASE1_HORIZON as usize,
        format!("delayed updates with no delay vs instantaneous updates: {} CSV bytes, identical = {}", csv1.len(), csv1 == csv2),
    );

    // 8. staleness bound
    let det_runs: Vec<&CaseRun> = fig1_runs
        .iter()
        .chain(extra_runs)
        .filter(|r| matches!(r.case.delay, DelayModel::DeterministicPower { .. }))
        .collect();
    let checked: u64 = det_runs.iter().map(|r| r.staleness.checked).sum();
    let stale_violations: u64 = det_runs.iter().map(|r| r.staleness.violations).sum();
    report.check(
        "8 staleness bound",
        stale_violations == 0 && checked > 0,
        format!("{stale_violations} violations over {checked} (player, k) pairs in {} deterministic cases", det_runs.len()),
    );

    // 9. gradient identity
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_rel: f64 = 0.0;
    for _ in 0..100 {
        let x: Vec<Vec<f64>> = (0..game.player_count())
            .map(|i| {
                let sp = game.strategy_space(i);
                let u = sp.uniform_point();
                sp.sample(&mut rng).iter().zip(&u).map(|(s, u)| 0.9 * s + 0.1 * u).collect()
            })
            .collect();
        let phi = |x: &[Vec<f64>]| game.potential_of_loads(&game.edge_loads_unchecked(x));
        for i in 0..game.player_count() {
            let g = game.partial_gradient(&x, i).unwrap();
            for p in 0..g.len() {
                let h = 1e-5;
                let mut xp = x.clone();
                xp[i][p] += h;
                let mut xm = x.clone();
                xm[i][p] -= h;
                let fd = (phi(&xp) - phi(&xm)) / (2.0 * h);
                worst_rel = worst_rel.max((fd - g[p]).abs() / g[p].abs());
            }
        }
    }
    report.check(
        "9 gradient identity",
        worst_rel <= 1e-6,
        format!("max relative error vs central differences (h = 1e-5) over 100 profiles = {worst_rel:.3e}"),
    );

    // 10. consecutive-gradient bound
    report.check(
        "10 gradient-difference bound",
        grad_violations == 0 && grad_checks == CASE1_HORIZON,
        format!("{grad_violations} violations over {grad_checks} steps; max ratio to bound = {worst_grad_ratio:.4}"),
    );

    // 11. mirror map Lipschitz
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut mm_violations = 0;
    let mut mm_worst: f64 = 0.0;
    for t in 0..10_000 {
        let r = &regs[rng.gen_range(0..regs.len())];
        let n = r.space().dimension();
        // half the pairs have entries in [-20, 20], half are close together
        let (z, zp): (Vec<f64>, Vec<f64>) = if t % 2 == 0 {
            (0..n).map(|_| (rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0))).unzip()
        } else {
            let scale = 10f64.powf(rng.gen_range(-3.0..1.0));
            (0..n).map(|_| (rng.gen_range(-1.0..1.0) * scale, rng.gen_range(-1.0..1.0) * scale)).unzip()
        };
        let dz = z.iter().zip(&zp).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let (v, vp) = (r.mirror_map(&z).unwrap(), r.mirror_map(&zp).unwrap());
        let dv: f64 = v.iter().zip(&vp).map(|(a, b)| (a - b).abs()).sum();
        let bound = dz / r.strong_convexity_mu();
        mm_worst = mm_worst.max(dv / bound);
        if dv > bound * (1.0 + 1e-12) {
            mm_violations += 1;
        }
    }
    report.check(
        "11 mirror-map Lipschitz",
        mm_violations == 0,
        format!("{mm_violations} violations over 10^4 dual pairs; max ratio to bound = {mm_worst:.4}"),
    );

    // 12. closed-form integral
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut q_worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = BprParams::new(
            rng.gen_range(2.0..3.0),
            rng.gen_range(3.0..13.0),
            rng.gen_range(60.0..80.0),
            rng.gen_range(1.0..1.5),
        )
        .unwrap();
        let load = rng.gen_range(0.0..300.0);
        let exact = p.integral(load);
        let numeric = quad(&|t| p.cost(t), 0.0, load, 1e-13 * exact.max(1.0));
        let rel = if exact == 0.0 { numeric.abs() } else { (exact - numeric).abs() / exact };
        q_worst = q_worst.max(rel);
    }
    report.check(
        "12 closed-form integral",
        q_worst <= 1e-9,
        format!("max relative error vs adaptive quadrature over 10^3 draws = {q_worst:.3e}"),
    );

    // 13. network files
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data");
    let good = ["two_node_net.tntp", "diamond_net.tntp"];
    let bad = ["malformed_net.tntp", "count_mismatch_net.tntp"];
    let good_ok = good.iter().all(|f| read_tntp(data.join(f)).is_ok());
    let bad_ok = bad.iter().all(|f| {
        let text = std::fs::read_to_string(data.join(f)).unwrap();
        matches!(
            parse_tntp(&text),
            Err(potgame_core::Error::Parse { .. }) | Err(potgame_core::Error::CountMismatch { .. })
        )
    });
    let ema_path = std::env::var_os("POTGAME_EMA_NET")
        .map(PathBuf::from)
        .unwrap_or_else(|| data.join("EMA_net.tntp"));
    let (ema_ok, ema_note) = if ema_path.exists() {
        match read_tntp(&ema_path) {
            Ok(net) => {
                let ok = net.metadata.node_count == 74 && net.links.len() == 258 && net.topology().is_ok();
                (ok, format!("{}: {} nodes, {} links", ema_path.display(), net.metadata.node_count, net.links.len()))
            }
            Err(e) => (false, format!("{}: {e}", ema_path.display())),
        }
    } else {
        (true, format!("{} not present, skipped", ema_path.display()))
    };
    report.check(
        "13 network files",
        good_ok && bad_ok && ema_ok,
        format!("bundled fixtures parse = {good_ok}, malformed fixtures rejected with errors = {bad_ok}; eastern Massachusetts: {ema_note}"),
    );

    // 14. Wardrop certificate
    let wardrop = game.wardrop_gap(&case1_trace.final_y, DEFAULT_SUPPORT_TOL).unwrap();
    let fft = game.network().free_flow_times();
    let route_costs: Vec<f64> = game
        .players()
        .iter()
        .flat_map(|p| p.routes.iter())
        .map(|r| r.iter().map(|&e| fft[e]).sum())
        .collect();
    let mean_fft = route_costs.iter().sum::<f64>() / route_costs.len() as f64;
    report.check(
        "14 Wardrop certificate",
        wardrop <= 1e-2 * mean_fft,
        format!("Wardrop gap at y_{CASE1_HORIZON} = {wardrop:.3e} <= 1e-2 x mean free-flow route cost {mean_fft:.4}"),
    );

    // 15. stochastic delays
    let mut fig2_ok = true;
    for (r, d) in fig2_runs.iter().zip(fig1_runs) {
        let gaps: Vec<f64> = r.records.iter().map(|x| x.gap).collect();
        let env = running_minimum(&gaps);
        let finite = gaps.iter().all(|g| g.is_finite());
        let descending = *env.last().unwrap() < gaps[0];
        fig2_ok &= finite && descending && r.records.len() == SUITE_HORIZON as usize;
        let det_min = running_minimum(&d.records.iter().map(|x| x.gap).collect::<Vec<_>>());
        let (sm, dm) = (*env.last().unwrap(), *det_min.last().unwrap());
        println!(
            "  {:<6} stochastic min gap {sm:.3e} vs deterministic {dm:.3e} ({})",
            r.case.label,
            match sm.total_cmp(&dm) {
                std::cmp::Ordering::Less => "stochastic lower",
                std::cmp::Ordering::Equal => "equal",
                std::cmp::Ordering::Greater => "deterministic lower",
            }
        );
    }
    report.check(
        "15 stochastic-delay suite",
        fig2_ok,
        format!("{} stochastic cases finite with descending running minimum = {fig2_ok}", fig2_runs.len()),
    );

    // Suite ordering invariant.
    let order: Vec<f64> = ["case1", "case4", "case5", "case6"]
        .iter()
        .map(|l| slope(by_label(l), 1_000, 100_000, eps))
        .collect();
    report.check(
        "suite rate ordering",
        order[0] <= order[1] && order[1] <= order[2] && order[2] <= order[3] + 0.1,
        format!(
            "slopes over [1e3,1e5]: case1 {:.3} <= case4 {:.3} <= case5 {:.3} <= case6 {:.3} + 0.1",
            order[0], order[1], order[2], order[3]
        ),
    );

    // Oracle sandwich.
    let min_gap = runs
        .iter()
        .flat_map(|r| r.records.iter().map(|x| x.gap))
        .chain(case1_records.iter().map(|x| x.gap))
        .fold(f64::INFINITY, f64::min);
    report.check(
        "oracle sandwich",
        min_gap >= -eps,
        format!("smallest gap over all runs = {min_gap:.3e} >= -eps_oracle"),
    );

    let failed = report.lines.iter().filter(|(ok, _)| !ok).count();
    println!(
        "{} of {} checks passed in {:.1} s",
        report.lines.len() - failed,
        report.lines.len(),
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
