//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use organmatch::experiment::run_experiment;
use organmatch::report::{write_json, RunReport};
use organmatch_core::axioms::{check_pairwise_swap_optimality, check_pareto_efficiency, find_profitable_misreport};
use organmatch_core::mechanisms::MechanismId;
use organmatch_core::offline_oracle::{brute_force_offline, optimal_offline};
use organmatch_core::population::{generate_scenario, Instance, Organ, Patient, Preset, ScenarioConfig};
use organmatch_core::scoring::{raw_donor_risk, Cohort, DonorProfile, RawRisk};
use organmatch_core::simulator::run_simulation;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn random_instance(rng: &mut StdRng, patients: usize, organs: usize, days: u32) -> Instance {
    let patients = (0..patients)
        .map(|i| Patient::new(&format!("p{i:02}"), rng.random_range(0..days), rng.random_range(0..=100)).unwrap())
        .collect();
    let organs = (0..organs)
        .map(|i| Organ::new(&format!("o{i:02}"), rng.random_range(0..days), rng.random_range(0..=100)).unwrap())
        .collect();
    Instance::new(patients, organs).unwrap()
}

/// Smaller side in `0..=small`, larger side in `small_side..=large`, either
/// side may be the smaller.
fn bounded_instance(rng: &mut StdRng, small: usize, large: usize, days: u32) -> Instance {
    let a = rng.random_range(0..=small);
    let b = rng.random_range(a..=large);
    if rng.random_bool(0.5) {
        random_instance(rng, a, b, days)
    } else {
        random_instance(rng, b, a, days)
    }
}

fn running_example() -> Instance {
    Instance::new(
        vec![Patient::new("a", 0, 0).unwrap(), Patient::new("b", 0, 50).unwrap()],
        vec![Organ::new("x", 1, 40).unwrap(), Organ::new("y", 2, 45).unwrap()],
    )
    .unwrap()
}

fn within(budget: Duration, start: Instant) -> Result<(), String> {
    let spent = start.elapsed();
    ensure!(spent <= budget, "took {:.1}s, budget {}s", spent.as_secs_f64(), budget.as_secs());
    Ok(())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xAC01);
    let mut matched = 0;
    for k in 0..1000 {
        let i = bounded_instance(&mut rng, 6, 8, 30);
        let fast = optimal_offline(&i);
        let brute = brute_force_offline(&i).map_err(|e| e.to_string())?;
        ensure!(fast.matched_count() == brute.matched_count(), "instance {k}: matched counts differ");
        ensure!(fast.total_cost() == brute.total_cost(), "instance {k}: total costs differ");
        ensure!(fast.pairs() == brute.pairs(), "instance {k}: pair sets differ");
        matched += fast.matched_count();
    }
    within(Duration::from_secs(10), start)?;
    Ok(format!("1000 instances agree exactly ({matched} pairs in total)"))
}

fn dominance() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xAC02);
    let mut equal_count_runs = 0;
    for k in 0..1000u64 {
        let (p, o) = (rng.random_range(0..=50), rng.random_range(0..=50));
        let i = random_instance(&mut rng, p, o, 60);
        let offline = optimal_offline(&i);
        for m in MechanismId::ALL {
            let online = run_simulation(&i, m, k).allocation;
            ensure!(offline.matched_count() >= online.matched_count(), "instance {k}, {m}: online matched more");
            if offline.matched_count() == online.matched_count() {
                equal_count_runs += 1;
                ensure!(offline.total_cost() <= online.total_cost(), "instance {k}, {m}: online cheaper at equal size");
            }
        }
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!("4000 runs dominated ({equal_count_runs} at equal cardinality)"))
}

fn percentile_semantics() -> Outcome {
    let donors: Vec<DonorProfile> = (0..100).map(|k| DonorProfile::new(18.0 + k as f64 * 0.5, k >= 80).unwrap()).collect();
    let risks: Vec<RawRisk> = donors.iter().map(raw_donor_risk).collect();
    let distinct: BTreeSet<u64> = risks.iter().map(|r| r.0.to_bits()).collect();
    ensure!(distinct.len() == 100, "cohort risks are not distinct");
    let cohort = Cohort::new(risks.iter().copied()).map_err(|e| e.to_string())?;
    let scores: BTreeSet<u8> = risks.iter().map(|&r| cohort.score(r).get()).collect();
    ensure!(scores == (0..100).collect(), "distinct cohort scores {scores:?}");

    let same = vec![raw_donor_risk(&DonorProfile::new(50.0, false).unwrap()); 100];
    let cohort = Cohort::new(same.iter().copied()).map_err(|e| e.to_string())?;
    ensure!(same.iter().all(|&r| cohort.score(r).get() == 0), "identical cohort not all zero");
    Ok("distinct cohort scores exactly {0..99}; identical cohort all 0".into())
}

fn scenario_statistics() -> Outcome {
    let mut detail = Vec::new();
    for (preset, seed, mean_target, max_age) in [(Preset::Era1989, 1989, 32.0, 69.0), (Preset::Era2014, 2014, 46.0, 80.0)] {
        let config = ScenarioConfig { patient_count: 0, organ_count: 10_000, ..ScenarioConfig::preset(preset) };
        let scenario = generate_scenario(&config, seed).map_err(|e| e.to_string())?;
        let ages: Vec<f64> = scenario.donors.iter().map(|(_, d)| d.age()).collect();
        ensure!(ages.len() == 10_000, "expected 10000 donors");
        let mean = ages.iter().sum::<f64>() / ages.len() as f64;
        let max = ages.iter().copied().fold(f64::MIN, f64::max);
        let min = ages.iter().copied().fold(f64::MAX, f64::min);
        ensure!((mean - mean_target).abs() <= 1.0, "{}: mean {mean:.3} not within {mean_target} +- 1", preset.name());
        ensure!(max <= max_age, "{}: max {max} above {max_age}", preset.name());
        ensure!(min >= 18.0, "{}: min {min} below 18", preset.name());
        detail.push(format!("{} seed {seed}: mean {mean:.3}, max {max:.1}", preset.name()));
    }
    Ok(detail.join("; "))
}

fn results_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../results/mechanism_separation.json")
}

fn mechanism_separation() -> Outcome {
    let start = Instant::now();
    let config = ScenarioConfig {
        patient_count: 500,
        organ_count: 400,
        horizon_days: 365,
        ..ScenarioConfig::preset(Preset::Era2014)
    };
    let seeds: Vec<u64> = (1..=50).collect();
    let report = run_experiment(&config, &seeds, &[MechanismId::Fifo, MechanismId::Greedy]).map_err(|e| e.to_string())?;
    let mean = |m| {
        report
            .series(m)
            .and_then(|s| s.mean_abs_diff.as_ref())
            .and_then(|v| v.to_big())
            .ok_or_else(|| format!("{m}: no matched transplants"))
    };
    let (greedy, fifo) = (mean(MechanismId::Greedy)?, mean(MechanismId::Fifo)?);
    let path = results_path();
    std::fs::create_dir_all(path.parent().unwrap()).map_err(|e| e.to_string())?;
    write_json(&path, &report).map_err(|e| e.to_string())?;
    ensure!(greedy < fifo, "greedy mean {greedy} is not below fifo mean {fifo}");
    within(Duration::from_secs(60), start)?;
    let approx = |m| report.series(m).unwrap().mean_abs_diff.as_ref().unwrap().approx.unwrap();
    Ok(format!(
        "greedy {:.4} < fifo {:.4} over 50 seeds (written to results/mechanism_separation.json)",
        approx(MechanismId::Greedy),
        approx(MechanismId::Fifo)
    ))
}

fn strategyproofness() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xAC06);
    let mut patients_checked = 0;
    for k in 0..200u64 {
        let (p, o) = (rng.random_range(0..=10), rng.random_range(0..=10));
        let i = random_instance(&mut rng, p, o, 20);
        for patient in i.patients() {
            patients_checked += 1;
            let found = find_profitable_misreport(MechanismId::Fifo, &i, &patient.id, k).map_err(|e| e.to_string())?;
            ensure!(found.is_none(), "instance {k}: fifo manipulable by {}", patient.id);
        }
    }

    let i = Instance::new(
        vec![Patient::new("A", 0, 30).unwrap(), Patient::new("B", 0, 50).unwrap()],
        vec![Organ::new("o45", 1, 45).unwrap(), Organ::new("o90", 2, 90).unwrap()],
    )
    .unwrap();
    let a = i.patient(&organmatch_core::population::PatientId::new("A").unwrap()).unwrap().id.clone();
    let f = find_profitable_misreport(MechanismId::Greedy, &i, &a, 0)
        .map_err(|e| e.to_string())?
        .ok_or("greedy example: no finding")?;
    ensure!(f.utility_gain == 45, "greedy example gain {}", f.utility_gain);
    // replay the finding
    let lied = i.with_reported_epts(&a, f.reported_epts).map_err(|e| e.to_string())?;
    let kdpi_of = |inst: &Instance| {
        run_simulation(inst, MechanismId::Greedy, 0).allocation.organ_of(&a).map(|o| i.organ(o).unwrap().kdpi.get())
    };
    ensure!(kdpi_of(&lied) == Some(45) && kdpi_of(&i) == Some(90), "greedy finding does not replay");
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "fifo: no misreport for {patients_checked} patients x 100 reports; greedy: report {} gains 45",
        f.reported_epts
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (p, o) = (dir.path().join("patients.csv"), dir.path().join("organs.csv"));
    std::fs::write(&p, "id,arrival_day,epts\na,0,0\nb,0,50\n").map_err(|e| e.to_string())?;
    std::fs::write(&o, "id,arrival_day,kdpi\nx,1,40\ny,2,45\n").map_err(|e| e.to_string())?;
    let mut bytes = Vec::new();
    for k in 0..2 {
        let report = dir.path().join(format!("r{k}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_organmatch"))
            .args(["run", "--mechanism", "greedy", "--seed", "7"])
            .arg("--patients")
            .arg(&p)
            .arg("--organs")
            .arg(&o)
            .arg("--report")
            .arg(&report)
            .status()
            .map_err(|e| e.to_string())?;
        ensure!(status.success(), "run exited with {status}");
        bytes.push(std::fs::read(&report).map_err(|e| e.to_string())?);
    }
    ensure!(bytes[0] == bytes[1], "reports differ between identical runs");
    let report: RunReport = serde_json::from_slice(&bytes[0]).map_err(|e| e.to_string())?;
    ensure!(report.metrics.total_cost == 55, "greedy total {}", report.metrics.total_cost);
    ensure!(report.offline.total_cost == 45, "offline total {}", report.offline.total_cost);
    let ratio = report.metrics.competitive_ratio.as_ref().map(|r| r.exact.as_str());
    ensure!(ratio == Some("11/9"), "ratio {ratio:?}");
    ensure!(report.recompute_metrics() == report.metrics, "metrics not recomputable from decisions");
    Ok(format!("identical {}-byte reports; greedy 55, offline 45, ratio 11/9", bytes[0].len()))
}

fn efficiency() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xAC08);
    for k in 0..200 {
        let i = bounded_instance(&mut rng, 6, 8, 30);
        let opt = optimal_offline(&i);
        ensure!(check_pareto_efficiency(&opt, &i).map_err(|e| e.to_string())?, "instance {k}: optimum not Pareto efficient");
        ensure!(check_pairwise_swap_optimality(&opt, &i).map_err(|e| e.to_string())?, "instance {k}: optimum not swap-optimal");
    }
    let i = running_example();
    let greedy = run_simulation(&i, MechanismId::Greedy, 0).allocation;
    ensure!(greedy.total_cost() == 55, "unexpected greedy allocation");
    ensure!(!check_pareto_efficiency(&greedy, &i).map_err(|e| e.to_string())?, "greedy example passes Pareto");
    ensure!(!check_pairwise_swap_optimality(&greedy, &i).map_err(|e| e.to_string())?, "greedy example passes swap check");
    within(Duration::from_secs(60), start)?;
    Ok("200 optima pass both checks; greedy example fails both".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("dominance", dominance),
        ("percentile semantics", percentile_semantics),
        ("scenario statistics", scenario_statistics),
        ("mechanism separation", mechanism_separation),
        ("strategyproofness", strategyproofness),
        ("determinism", determinism),
        ("efficiency", efficiency),
    ];
    let mut failures = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("AC{} PASS {name}: {detail} ({secs:.2}s)", n + 1),
            Err(why) => {
                failures += 1;
                println!("AC{} FAIL {name}: {why} ({secs:.2}s)", n + 1);
            }
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all {} acceptance criteria passed", criteria.len());
}
