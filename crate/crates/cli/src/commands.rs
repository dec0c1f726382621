use nlbox::analysis::{final_success, fixed_point_s, h, h_iterates, q_of_p, threshold, tsirelson};
use nlbox::boxes::{CANONICAL_ALICE_ANGLES, CANONICAL_BOB_ANGLES};
use nlbox::circuits::and_gate_success;
use nlbox::engines::cross_check;
use nlbox::protocols::{Amplified, BaseBias, NonlocalEquality, NonlocalMajority, Revealed};
use nlbox::random::derive_seed;
use nlbox::{
    and2, best_local_deterministic, build_ip_circuit, check_no_signalling, db_value, db_xor, exact_success,
    inner_product, ip_decay_experiment, quantum_behavior, sample_success, AmplificationSpec, Bit, CircuitProtocol,
    DecayConfig, DecayEngine, DistributedBit, ExactMode, InputSelection, LocalRule, Model, SampleConfig,
};

use crate::config::ExperimentConfig;
use crate::records::{CheckRecord, DecayRecord, SweepRecord};

struct Checks(Vec<CheckRecord>);

impl Checks {
    fn close(&mut self, name: &str, module: &str, measured: f64, expected: f64, tolerance: f64, label: &str) {
        let pass = (measured - expected).abs() <= tolerance;
        self.0.push(CheckRecord {
            name: name.into(),
            module: module.into(),
            measured,
            expected,
            tolerance,
            pass,
            detail: format!("{measured:.6} ≈ {label}"),
        });
    }

    fn holds(&mut self, name: &str, module: &str, ok: bool, detail: impl Into<String>) {
        let v = if ok { 1.0 } else { 0.0 };
        self.0.push(CheckRecord {
            name: name.into(),
            module: module.into(),
            measured: v,
            expected: 1.0,
            tolerance: 0.0,
            pass: ok,
            detail: detail.into(),
        });
    }

    fn failed(&mut self, name: &str, module: &str, error: impl std::fmt::Display) {
        self.holds(name, module, false, format!("error: {error}"));
    }
}

/// The invariant suite; at least one check per library module.
pub fn run_verify(config: &ExperimentConfig) -> Vec<CheckRecord> {
    let mut c = Checks(Vec::new());
    let wp = tsirelson::<f64>();

    // bits
    let algebra = (0..16u8).all(|m| {
        let b = |i: u8| Bit::new(m >> i & 1 == 1);
        let (u, v) = (DistributedBit::new(b(0), b(1)), DistributedBit::new(b(2), b(3)));
        db_value(db_xor(u, v)) == (u.value() ^ v.value())
    });
    c.holds("distributed-xor", "bits", algebra, "share-wise XOR is exact on all 16 share patterns");

    // function
    let ones = inner_product(2).map(|f| f.table().iter().filter(|b| b.is_one()).count());
    match ones {
        Ok(k) => c.close("ip-table", "function", k as f64, 6.0, 0.0, "6 ones in IP(2)"),
        Err(e) => c.failed("ip-table", "function", e),
    }

    // boxes
    match quantum_behavior::<f64>(CANONICAL_ALICE_ANGLES, CANONICAL_BOB_ANGLES) {
        Ok(b) => c.close("tsirelson", "boxes", b.worst_success(), (2.0 + 2f64.sqrt()) / 4.0, 1e-9, "(2+√2)/4"),
        Err(e) => c.failed("tsirelson", "boxes", e),
    }
    let local = best_local_deterministic::<f64>();
    c.close("classical-max", "boxes", local.max_success, 0.75, 1e-12, "3/4");
    let models: Vec<Model> = vec![
        Model::Perfect,
        Model::Noisy(wp),
        Model::Noisy(0.5),
        Model::Classical,
        Model::canonical_quantum(),
        Model::LocalDeterministic {
            alice: LocalRule::Identity,
            bob: LocalRule::Negate,
        },
    ];
    let signalling = models.iter().all(|m| check_no_signalling(m).pass);
    c.holds("no-signalling", "boxes", signalling, format!("{} shipped models", models.len()));

    // protocols
    let perfect = Model::Perfect;
    match exact_success(&NonlocalEquality { model: &perfect }, ExactMode::FullEnumeration) {
        Ok(r) => c.close("nle-perfect", "protocols", r.worst_case, 1.0, 0.0, "1 on all 64 inputs"),
        Err(e) => c.failed("nle-perfect", "protocols", e),
    }
    let noisy = Model::Noisy(0.9);
    match exact_success(&NonlocalMajority { model: &noisy }, ExactMode::FullEnumeration) {
        Ok(r) => c.close("nlm-noisy", "protocols", r.worst_case, 0.82, 1e-12, "q(0.9) = 0.82"),
        Err(e) => c.failed("nlm-noisy", "protocols", e),
    }
    for n in 1..=4 {
        let name = format!("base-bias-{n}");
        match inner_product(n).and_then(|f| exact_success::<f64, _>(&BaseBias::new(&f), ExactMode::FullEnumeration)) {
            Ok(r) => c.close(&name, "protocols", r.worst_case, 0.5 + 0.5f64.powi(n as i32 + 1), 1e-12, "1/2 + 2^-(n+1)"),
            Err(e) => c.failed(&name, "protocols", e),
        }
    }
    let f = and2();
    let amplified = AmplificationSpec::new(1, Model::Perfect)
        .and_then(|spec| exact_success(&Amplified { f: &f, spec: &spec }, ExactMode::FullEnumeration));
    match amplified {
        Ok(r) => c.close("amplify-depth-1", "protocols", r.worst_case, 0.84375, 1e-12, "h(3/4, 1) = 27/32"),
        Err(e) => c.failed("amplify-depth-1", "protocols", e),
    }

    // analysis
    match q_of_p(threshold::<f64>()) {
        Ok(q) => c.close("threshold", "analysis", q, 5.0 / 6.0, 1e-12, "q_of_p((3+√6)/6)=5/6"),
        Err(e) => c.failed("threshold", "analysis", e),
    }
    match final_success(0.95) {
        Ok(v) => c.close("final-success", "analysis", v, 0.864302, 1e-5, "final_success(0.95) = 0.864302"),
        Err(e) => c.failed("final-success", "analysis", e),
    }
    let fixed = fixed_point_s(0.905f64).and_then(|s| h(s, 0.905).map(|hs| (hs, s)));
    match fixed {
        Ok((hs, s)) => c.close("fixed-point", "analysis", hs, s, 1e-9, "h(s, 0.905) = s"),
        Err(e) => c.failed("fixed-point", "analysis", e),
    }

    // circuits
    match and_gate_success(&Model::Noisy(wp)) {
        Ok(Some(g)) => c.close("noisy-and", "circuits", g, 0.75, 1e-12, "℘² + (1−℘)² = 3/4"),
        Ok(None) => c.holds("noisy-and", "circuits", false, "gate success depends on inputs"),
        Err(e) => c.failed("noisy-and", "circuits", e),
    }
    let ip2 = build_ip_circuit(2).and_then(|circuit| {
        exact_success(&CircuitProtocol { circuit: &circuit, model: &Model::Noisy(wp) }, ExactMode::FullEnumeration)
    });
    match ip2 {
        Ok(r) => c.close("ip-circuit-2", "circuits", r.worst_case, 0.625, 1e-12, "1/2 + (1/2)^3"),
        Err(e) => c.failed("ip-circuit-2", "circuits", e),
    }

    // engines
    let trials = config.trials.clamp(1, 20_000);
    match cross_check(&NonlocalMajority { model: &noisy }, trials, config.master_seed) {
        Ok(report) => c.holds(
            "cross-check",
            "engines",
            report.pass,
            format!("{} inputs × {} trials within 5σ", report.lines.len(), report.trials_per_input),
        ),
        Err(e) => c.failed("cross-check", "engines", e),
    }
    let sample = SampleConfig::new(trials, config.master_seed);
    let nlm = NonlocalMajority { model: &noisy };
    let same = sample_success(&nlm, &sample.with_workers(1))
        .and_then(|a| sample_success(&nlm, &sample.with_workers(8)).map(|b| a == b));
    match same {
        Ok(ok) => c.holds("determinism", "engines", ok, "1 and 8 workers agree bit for bit"),
        Err(e) => c.failed("determinism", "engines", e),
    }

    c.0
}

pub fn run_sweep(config: &ExperimentConfig) -> anyhow::Result<Vec<SweepRecord>> {
    let f = crate::config::parse_function(&config.function)?;
    let leaf = exact_success::<f64, _>(&BaseBias::new(&f), ExactMode::FullEnumeration)?.worst_case;
    let points: Vec<(f64, u32)> = config
        .p_grid()
        .into_iter()
        .flat_map(|p| config.depth.iter().map(move |&d| (p, d)))
        .collect();
    let mut rows = Vec::with_capacity(points.len());
    for (index, (p, depth)) in points.into_iter().enumerate() {
        let q = q_of_p(p)?;
        let analytic = *h_iterates(leaf, q, depth as usize).last().expect("non-empty");
        let spec = AmplificationSpec::new(depth, Model::noisy(p)?)?;
        let sampled = sample_success(
            &Revealed(Amplified { f: &f, spec: &spec }),
            &SampleConfig::new(config.trials, derive_seed(config.master_seed, index as u64))
                .with_workers(config.workers)
                .with_inputs(InputSelection::Uniform),
        )?;
        rows.push(SweepRecord {
            p,
            depth,
            analytic,
            sampled: sampled.estimate,
            ci_low: sampled.ci95.0,
            ci_high: sampled.ci95.1,
            above_threshold: p > threshold::<f64>(),
        });
    }
    Ok(rows)
}

pub fn run_ip_decay(config: &ExperimentConfig) -> anyhow::Result<Vec<DecayRecord>> {
    let model = config.box_model()?;
    let decay = DecayConfig {
        engine: DecayEngine::Auto,
        exact_up_to: 3,
        trials: config.trials,
        seed: config.master_seed,
        workers: config.workers,
    };
    Ok(ip_decay_experiment(1..=config.n_max, &model, &decay)?
        .into_iter()
        .map(|row| DecayRecord {
            n: row.n,
            method: row.method.to_string(),
            success: row.success,
            ci_low: row.ci95.map(|c| c.0),
            ci_high: row.ci95.map(|c| c.1),
            analytic: row.analytic,
            trials: row.trials,
        })
        .collect())
}
