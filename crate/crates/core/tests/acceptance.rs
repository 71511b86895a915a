//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits with status 0 unless `ACCEPTANCE_STRICT` is set, in which case any
//! failed criterion makes the process fail.

mod common;

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use relaysim::annealer::*;
use relaysim::load_solver::{BackhaulMethod, BackhaulModel, BackhaulOptions};
use relaysim::oracle_mc::{empirical_load, ks_distance, simulate_mqs, LocationLaw, McScene};
use relaysim::perf_metrics::{cell_delay, DelayWeighting, EvalReport};
use relaysim::scenario::build_association;
use relaysim::sinr_model::{normalization, sched_density_factor, GaussLegendre, LognormalParams, SchedSinrDist};
use relaysim::{Configuration, EvalOptions, Evaluation, Network, NetworkEvaluator};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

/// Paper and traffic-share evaluations from one report: both cell delays are
/// weighted sums of the same per-station delays.
fn dual(r: &EvalReport) -> (Evaluation, Evaluation) {
    if !r.feasible {
        return (Evaluation::INVALID, Evaluation::INVALID);
    }
    let items: Vec<(f64, f64, f64)> = r
        .stations
        .iter()
        .filter_map(|s| {
            s.access_delay
                .map(|d| (s.mass, s.area, d + s.backhaul_delay.unwrap_or(0.0)))
        })
        .collect();
    let ev = |delay| Evaluation {
        energy: r.energy_per_bit,
        delay,
        valid: true,
    };
    (
        ev(cell_delay(&items, DelayWeighting::Paper)),
        ev(cell_delay(&items, DelayWeighting::TrafficShare)),
    )
}

/// Memo of paper-mode evaluations shared by several searches.
struct DualCache<'a> {
    evaluator: &'a NetworkEvaluator,
    memo: Mutex<HashMap<Configuration, (Evaluation, Evaluation)>>,
}

impl<'a> DualCache<'a> {
    fn new(evaluator: &'a NetworkEvaluator) -> Self {
        assert_eq!(evaluator.options.weighting, DelayWeighting::Paper);
        Self {
            evaluator,
            memo: Mutex::new(HashMap::new()),
        }
    }

    fn get(&self, cfg: &Configuration) -> (Evaluation, Evaluation) {
        if let Some(v) = self.memo.lock().unwrap().get(cfg) {
            return *v;
        }
        let v = match self.evaluator.evaluate(cfg) {
            Ok(r) => dual(&r),
            Err(_) => (Evaluation::INVALID, Evaluation::INVALID),
        };
        self.memo.lock().unwrap().insert(cfg.clone(), v);
        v
    }

    fn len(&self) -> usize {
        self.memo.lock().unwrap().len()
    }
}

fn paper_evaluator(net: Network) -> NetworkEvaluator {
    NetworkEvaluator::new(net, EvalOptions::default())
}

fn c1_mqs_oracle() -> Verdict {
    let start = Instant::now();
    let base = LognormalParams::new(1.2, 1.1).unwrap();
    let mut worst: f64 = 0.0;
    let mut cases = Vec::new();
    for (i, w) in [5usize, 10, 20].into_iter().enumerate() {
        for (j, rho) in [0.2, 0.5, 0.8].into_iter().enumerate() {
            let dist = SchedSinrDist::new(base, w, rho).unwrap();
            let sim = simulate_mqs(&base, w, rho, 100_000, 100 + (3 * i + j) as u64).unwrap();
            let ks = ks_distance(&sim.sinr, |x| dist.normalized_cdf(x));
            worst = worst.max(ks);
            cases.push(format!("W{w}/ρ{rho}:{ks:.4}"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst < 0.02 && secs < 30.0,
        format!("max KS {worst:.4} (< 0.02) in {secs:.1} s (< 30 s); {}", cases.join(" ")),
    )
}

fn c2_normalization() -> Verdict {
    // ∫ p(z)·factor(F(z)) dz over z = exp(x), x = ±8σ around the median
    let gl = GaussLegendre::new(400);
    let base = LognormalParams::new(0.4, 1.3).unwrap();
    let (a, b) = (-8.0, 8.0);
    let mut worst: f64 = 0.0;
    for w in [5usize, 10, 20] {
        for rho in [0.2, 0.5, 0.8] {
            let integral = gl.integrate(|t| {
                let x = a + (b - a) * t;
                let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
                let u = base.cdf((base.mu + base.sigma * x).exp());
                (b - a) * density * sched_density_factor(u, w, rho).unwrap()
            });
            let target = normalization(w, rho);
            worst = worst.max((integral - target).abs());
        }
    }
    let large = normalization(1000, 0.5);
    verdict(
        worst < 1e-3 && (large - 1.0).abs() < 1e-3,
        format!("max |∫π − (1/W)ΣT| {worst:.2e} (< 1e-3); W=1000 ρ=0.5 sum {large:.6} (|·−1| < 1e-3)"),
    )
}

fn c3_load_cross_validation() -> Verdict {
    // the scene's own operating point: the relay-free baseline
    let ev = paper_evaluator(network("desk_two_station.toml"));
    let base = ev.baseline().unwrap();
    let full = ev.evaluate_full(&base.configuration).unwrap();
    let a = &full.loads.access;
    let scene = McScene::new(
        &full.deployment,
        &full.association,
        &full.tx,
        a.interferer_loads.clone(),
        a.loads.clone(),
        ev.network().scenario().backhaul_quota,
        LocationLaw::Traffic,
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for k in 0..scene.stations() {
        let est = empirical_load(&scene, k, 100_000, 31 + k as u64).unwrap();
        let gap = rel(a.loads[k], est.load);
        worst = worst.max(gap);
        parts.push(format!(
            "station {k}: analytic {:.4} vs MC {:.4}±{:.4}",
            a.loads[k], est.load, est.std_error
        ));
    }
    verdict(
        worst < 0.10,
        format!("at {}: max relative gap {:.1}% (< 10%); {}", base.configuration, 100.0 * worst, parts.join("; ")),
    )
}

fn c4_fixed_point() -> Verdict {
    let ev = paper_evaluator(network("seven_cell.toml"));
    let base = ev.baseline().unwrap();
    let space = ConfigSpace::new(ev.network(), 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut configs = vec![base.configuration.clone()];
    configs.extend((0..8).map(|_| space.random_state(&mut rng)));
    let (mut max_iter, mut dips, mut worst_dip, mut unconverged) = (0, 0, 0.0f64, 0);
    let mut dip_cases = Vec::new();
    for cfg in &configs {
        let a = ev.evaluate_full(cfg).unwrap().loads.access;
        max_iter = max_iter.max(a.iterations);
        if !a.converged {
            unconverged += 1;
        }
        let mut dipped = false;
        for w in a.history.windows(2) {
            for (x, y) in w[0].iter().zip(&w[1]) {
                if y < x {
                    dipped = true;
                    worst_dip = worst_dip.max((x - y) / x);
                }
            }
        }
        if dipped {
            dips += 1;
            dip_cases.push(cfg.to_string());
        }
    }
    verdict(
        dips == 0 && max_iter < 10 && unconverged == 0,
        format!(
            "{} configurations at ω̄=5: max iterations {max_iter} (< 10), unconverged {unconverged}, \
             non-monotone runs {dips} (worst dip {:.1}%){}",
            configs.len(),
            100.0 * worst_dip,
            if dip_cases.is_empty() { String::new() } else { format!(" [{}]", dip_cases.join("; ")) }
        ),
    )
}

fn c5_identities() -> Verdict {
    let base = scenario("desk_three_cell.toml");
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let (mut little, mut energy, mut total) = (0.0f64, 0.0f64, 0.0f64);
    let mut done = 0;
    let mut draws = 0;
    while done < 20 && draws < 200 {
        draws += 1;
        let seed: u64 = rng.random();
        let mean = rng.random_range(1.0..8.0);
        let sc = base
            .modified(|s| {
                s.rng_seed = seed;
                s.traffic.mean = mean;
            })
            .unwrap();
        let net = Network::new(sc).unwrap();
        let n_rn = rng.random_range(0..3usize);
        let cfg = ConfigSpace::new(&net, n_rn).unwrap().random_state(&mut rng);
        let ev = NetworkEvaluator::new(
            net,
            EvalOptions {
                pixel_detail: true,
                ..Default::default()
            },
        );
        let r = ev.evaluate(&cfg).unwrap();
        if !r.feasible {
            continue;
        }
        done += 1;
        let sc = ev.network().scenario();
        for st in &r.stations {
            if let (Some(d), Some(l)) = (st.access_delay, st.little_delay) {
                little = little.max(rel(d, l));
            }
        }
        let phi = ev.network().phi();
        let pa = ev.network().grid().pixel_area();
        let quota = sc.backhaul_quota;
        let mut sum = 0.0;
        for px in &r.pixels {
            let rho = r.stations[px.server].load;
            let e = px.tx_power * px.delay * (1.0 - quota) * (1.0 - rho) / sc.flow_size;
            energy = energy.max(rel(px.energy, e));
            sum += phi[px.pixel] * pa * px.energy;
        }
        total = total.max(rel(r.energy_per_bit, sum / r.cell_area));
    }
    verdict(
        done == 20 && little < 1e-6 && energy < 1e-9 && total < 1e-9,
        format!(
            "{done} feasible random scenarios ({draws} drawn): Little max rel {little:.1e} (< 1e-6), \
             per-pixel energy max rel {energy:.1e} (< 1e-9), cell energy sum max rel {total:.1e} (< 1e-9)"
        ),
    )
}

/// Candidate sites whose grid coordinates are both `offset` modulo `k`.
fn lattice_subset(net: &Network, k: i32, offset: i32) -> Vec<usize> {
    let cands = net.candidates();
    (0..cands.len())
        .filter(|&i| {
            let (a, b) = cands.grid_coord(i);
            a.rem_euclid(k) == offset && b.rem_euclid(k) == offset
        })
        .collect()
}

fn c6_exhaustive() -> Verdict {
    let start = Instant::now();
    let net = network("desk_three_cell.toml");
    let d0 = paper_evaluator(net.clone()).baseline().unwrap().cell_delay;
    let wide = lattice_subset(&net, 2, 0);
    let narrow = lattice_subset(&net, 4, 3);
    // (sites kept, relays, weighting, D_max/D0)
    let cases = [
        (&wide, 1, DelayWeighting::TrafficShare, 1.0),
        (&wide, 1, DelayWeighting::Paper, 5.0),
        (&narrow, 2, DelayWeighting::TrafficShare, 1.5),
    ];
    let mut tables: HashMap<(usize, usize), (Network, HashMap<Configuration, (Evaluation, Evaluation)>)> =
        HashMap::new();
    let mut parts = Vec::new();
    let mut ok = true;
    for (keep, n_rn, weighting, ratio) in cases {
        let key = (keep.len(), n_rn);
        let (sub, table) = tables.entry(key).or_insert_with(|| {
            let sub = net.with_candidates(keep).unwrap();
            let ev = paper_evaluator(sub.clone());
            let states = ConfigSpace::new(&sub, n_rn).unwrap().states().unwrap();
            let table = states
                .into_iter()
                .map(|s| {
                    let v = match ev.evaluate(&s) {
                        Ok(r) => dual(&r),
                        Err(_) => (Evaluation::INVALID, Evaluation::INVALID),
                    };
                    (s, v)
                })
                .collect();
            (sub, table)
        });
        let space = ConfigSpace::new(sub, n_rn).unwrap();
        let pick = |cfg: &Configuration| {
            let v = table[cfg];
            match weighting {
                DelayWeighting::Paper => v.0,
                DelayWeighting::TrafficShare => v.1,
            }
        };
        let penalty = PenaltyParams::new(ratio * d0, DEFAULT_ALPHA_C, PenaltyMode::ExteriorAdaptive).unwrap();
        let feasible = exhaustive(&space, &pick, &penalty).unwrap();
        let Some((_, best)) = exhaustive_best(&feasible) else {
            ok = false;
            parts.push(format!("{} states, nothing feasible", table.len()));
            continue;
        };
        let hits = (0..20u64)
            .filter(|&seed| {
                anneal(&space, &pick, &penalty, &SaSchedule::desk(), seed)
                    .is_ok_and(|o| o.best_eval.energy == best.energy)
            })
            .count();
        ok &= hits >= 19;
        parts.push(format!(
            "{} states/{} feasible, {weighting} D_max={ratio}·D0: {hits}/20",
            table.len(),
            feasible.len()
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        ok && secs < 120.0,
        format!("optimum hit rate ≥ 19/20 per space, {secs:.0} s (< 120 s); {}", parts.join("; ")),
    )
}

fn c7_gibbs() -> Verdict {
    let start = Instant::now();
    let mut points = Vec::new();
    for p in 0..4 {
        for s in 0..4 {
            let (p, s) = (p as f64, s as f64);
            points.push(ToyPoint {
                energy: (1.0 + p) * (1.0 + 0.3 * s),
                delay: 1.0 / (1.0 + p) + 0.2 * s,
            });
        }
    }
    let report = gibbs_concentration_check(&points, 0.55, 1.0, 1.0, 0.85, 45);
    let mass = report.final_mass().unwrap_or(0.0);
    let secs = start.elapsed().as_secs_f64();
    verdict(
        mass >= 0.99 && secs < 1.0 && !report.optimal.is_empty(),
        format!("final mass on feasible minimizer {mass:.6} (≥ 0.99) in {:.1} ms", secs * 1e3),
    )
}

fn best_or_inf(out: Result<AnnealOutcome<Configuration>, relaysim::Error>) -> f64 {
    out.map_or(f64::INFINITY, |o| o.best_eval.energy)
}

fn c8_exterior_vs_interior(cache: &DualCache, d0: f64) -> Verdict {
    let start = Instant::now();
    let space = ConfigSpace::new(cache.evaluator.network(), 1).unwrap();
    let share = |cfg: &Configuration| cache.get(cfg).1;
    let dmax = 0.6 * d0;
    let ext = PenaltyParams::new(dmax, DEFAULT_ALPHA_C, PenaltyMode::ExteriorAdaptive).unwrap();
    let int = PenaltyParams::new(dmax, DEFAULT_ALPHA_C, PenaltyMode::InteriorReject).unwrap();
    let mut wins = 0;
    let mut pairs = Vec::new();
    for seed in 0..10u64 {
        let e = best_or_inf(anneal(&space, &share, &ext, &SaSchedule::desk(), seed));
        let i = best_or_inf(anneal(&space, &share, &int, &SaSchedule::desk(), seed));
        if e <= i {
            wins += 1;
        }
        pairs.push(format!("{:.3}/{:.3}", e * 1e10, i * 1e10));
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        wins >= 7 && secs < 1800.0,
        format!(
            "traffic_share, n=1, D_max=0.6·D0: exterior ≤ interior in {wins}/10 (≥ 7), {secs:.0} s; \
             Π×1e10 ext/int {}",
            pairs.join(" ")
        ),
    )
}

fn c9_tradeoff(cache: &DualCache, d0: f64, e0: f64) -> Verdict {
    let space = ConfigSpace::new(cache.evaluator.network(), 1).unwrap();
    let paper = |cfg: &Configuration| cache.get(cfg).0;
    let ratios = [4.5, 5.0, 5.5, 6.0, 8.0, 10.0];
    let seed = cache.evaluator.network().scenario().rng_seed;
    let best: Vec<f64> = ratios
        .iter()
        .map(|&r| {
            let penalty = PenaltyParams::new(r * d0, DEFAULT_ALPHA_C, PenaltyMode::ExteriorAdaptive).unwrap();
            best_or_inf(anneal(&space, &paper, &penalty, &SaSchedule::desk(), seed)) / e0
        })
        .collect();
    // SA noise allowance between neighbouring points
    let monotone = best.windows(2).all(|w| w[1] <= w[0] * 1.02 || w[0].is_infinite());
    let loose = *best.last().unwrap();
    verdict(
        monotone && loose < 1.0,
        format!(
            "paper weighting, n=1, D_max/D0 {ratios:?} → Π*/Π0 [{}]; non-increasing within 2%: {monotone}, \
             loose end {loose:.3} (< 1)",
            best.iter().map(|b| format!("{b:.3}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn c10_backhaul() -> Verdict {
    let net = network("seven_cell.toml");
    let dep = net.deploy(&Configuration::new(vec![10, 80], 3, 3, 4), true).unwrap();
    let assoc = build_association(&dep);
    let model = BackhaulModel::new(&dep, &assoc);
    let relays: Vec<bool> = dep.stations.iter().map(|s| s.donor.is_some()).collect();
    let (mut mass_err, mut rate_err) = (0.0f64, 0.0f64);
    let mut combos = 0;
    for load in [0.02, 0.15, 0.3] {
        let partial: Vec<f64> = relays.iter().map(|&r| if r { load } else { 0.0 }).collect();
        let all = model.combos(&partial);
        combos = all.len();
        mass_err = mass_err.max((all.iter().map(|c| c.probability).sum::<f64>() - 1.0).abs());
        let exact = model.rates(&partial, &BackhaulOptions { method: BackhaulMethod::Exact, ..Default::default() });
        let mc = model.rates(
            &partial,
            &BackhaulOptions { method: BackhaulMethod::MonteCarlo, seed: 7, ..Default::default() },
        );
        for (e, m) in exact.iter().zip(&mc) {
            if let (Some(e), Some(m)) = (e, m) {
                rate_err = rate_err.max(rel(*m, *e));
            }
        }
    }
    verdict(
        mass_err < 1e-9 && rate_err < 0.01,
        format!("{combos} combinations: |ΣV − 1| {mass_err:.1e} (< 1e-9); MC vs exact R_BL max rel {:.3}% (< 1%)", rate_err * 100.0),
    )
}

fn main() {
    // ACCEPTANCE_ONLY=C6,C8 runs a subset
    let only: Option<Vec<String>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').map(|s| s.trim().to_string()).collect());
    let mut results: Vec<(&str, Verdict)> = Vec::new();
    let mut run = |name: &'static str, f: &dyn Fn() -> Verdict| {
        let id = name.split(' ').next().unwrap_or(name);
        if only.as_ref().is_some_and(|o| !o.iter().any(|x| x == id)) {
            return;
        }
        let t = Instant::now();
        let v = f();
        println!(
            "{} {name}: {} [{:.1} s]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t.elapsed().as_secs_f64()
        );
        results.push((name, v));
    };
    run("C1 mqs-oracle-equivalence", &c1_mqs_oracle);
    run("C2 normalization-identity", &c2_normalization);
    run("C3 load-cross-validation", &c3_load_cross_validation);
    run("C4 fixed-point-behaviour", &c4_fixed_point);
    run("C5 little-and-energy-identities", &c5_identities);
    run("C6 exhaustive-oracle-optimality", &c6_exhaustive);
    run("C7 gibbs-concentration", &c7_gibbs);

    let ev = paper_evaluator(network("desk_three_cell.toml"));
    let base = ev.baseline().unwrap();
    let cache = DualCache::new(&ev);
    run("C8 exterior-vs-interior", &|| c8_exterior_vs_interior(&cache, base.cell_delay));
    run("C9 trade-off-shape", &|| c9_tradeoff(&cache, base.cell_delay, base.energy_per_bit));
    println!("  ({} distinct configurations evaluated for C8/C9)", cache.len());
    run("C10 backhaul-enumeration", &c10_backhaul);

    let passed = results.iter().filter(|r| r.1.pass).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed < results.len() && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
