use anyhow::{bail, ensure, Result};
use repeater_core::chain::{code_logical_error, max_connections, table1_report};
use repeater_core::codes::{build_code, Basis};
use repeater_core::mcsim::{simulate_chain, ChainConfig, Estimate};
use repeater_core::noise::{effective_error_probabilities, memory_error_prob, ErrorParams};
use repeater_core::purification::{
    cycle_time, failure_probability, key_rate, purification_schedule, required_pairs, LinkParams,
};

use crate::config::RunConfig;

/// `|z|` above which `simulate` reports a regression.
pub const Z_GATE: f64 = 4.0;

/// One CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Suffix for the output file when a command writes several tables.
    pub suffix: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(suffix: &'static str, header: &[&'static str]) -> Self {
        Self {
            suffix,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

/// Six significant digits in scientific notation.
pub fn sci(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        // Adding +0 turns a negative zero (e.g. an empty float sum) into +0.
        format!("{:.5e}", x + 0.0)
    }
}

fn error_params(cfg: &RunConfig) -> ErrorParams {
    ErrorParams {
        beta: cfg.beta,
        delta: cfg.delta,
        mu: 0.0,
        gamma: cfg.gamma,
        f0: cfg.f0,
    }
}

pub fn table1(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(
        "",
        &[
            "code",
            "n",
            "k",
            "t",
            "qubits_per_station",
            "Q",
            "L_star",
            "distance_km",
        ],
    );
    for r in table1_report(cfg.q, cfg.f_star, cfg.l0_km)? {
        t.rows.push(vec![
            r.code,
            r.n.to_string(),
            r.k.to_string(),
            r.t.to_string(),
            r.resources.to_string(),
            sci(r.logical_error),
            sci(r.max_connections),
            sci(r.distance_km),
        ]);
    }
    Ok(t)
}

/// Log-spaced grid from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Below this `q` the low-order binomial term dominates and `L*` follows a power law.
pub const POWER_LAW_Q: f64 = 0.03;

pub fn lstar(cfg: &RunConfig) -> Result<Table> {
    ensure!(!cfg.codes.is_empty(), "no codes selected");
    ensure!(
        cfg.q_min > 0.0 && cfg.q_max <= 1.0 && cfg.q_min < cfg.q_max && cfg.points >= 2,
        "need 0 < q_min < q_max <= 1 and at least 2 points"
    );
    let mut t = Table::new("", &["code", "t", "q", "Q", "L_star", "power_law"]);
    let grid = log_grid(cfg.q_min, cfg.q_max, cfg.points);
    for name in &cfg.codes {
        let code = build_code(name)?;
        for &q in &grid {
            let big_q = code_logical_error(&code, q)?;
            t.rows.push(vec![
                name.clone(),
                code.t().to_string(),
                sci(q),
                sci(big_q),
                sci(max_connections(big_q, cfg.f_star)?),
                (q < POWER_LAW_Q).to_string(),
            ]);
        }
    }
    Ok(t)
}

/// Returns the `N0` sweep and the minimal-`N0` table.
pub fn pfail(cfg: &RunConfig) -> Result<(Table, Table)> {
    ensure!(cfg.levels >= 1, "need at least one purification level");
    ensure!(!cfg.n_values.is_empty(), "no block sizes selected");
    ensure!(
        cfg.n_min >= 1 && cfg.n_min <= cfg.n_max,
        "need 1 <= n_min <= n_max"
    );
    let sched = purification_schedule(cfg.f0, cfg.beta, cfg.delta, cfg.levels)?;
    let r = &sched.success;

    let mut sweep = Table::new("", &["n", "N0", "P_fail"]);
    for &n in &cfg.n_values {
        let start = (n << cfg.levels).max(1) - 1;
        for n0 in start..=n * cfg.n0_ratio_max {
            let p = failure_probability(n0, n, r, cfg.levels)?;
            sweep.rows.push(vec![n.to_string(), n0.to_string(), sci(p)]);
        }
    }

    let mut minimal = Table::new("_targets", &["n", "target", "N0", "N0_per_n"]);
    for n in cfg.n_min..=cfg.n_max {
        for &target in &cfg.targets {
            let n0 = required_pairs(n, r, cfg.levels, target)?;
            minimal.rows.push(vec![
                n.to_string(),
                sci(target),
                n0.to_string(),
                sci(n0 as f64 / n as f64),
            ]);
        }
    }
    Ok((sweep, minimal))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateResult {
    pub table: Table,
    pub max_abs_z: f64,
}

impl SimulateResult {
    pub fn gate_failed(&self) -> bool {
        self.max_abs_z > Z_GATE
    }
}

pub fn simulate(cfg: &RunConfig) -> Result<SimulateResult> {
    let code = build_code(&cfg.sim_code)?;
    let sim_cfg = ChainConfig {
        code,
        stations: cfg.stations,
        q_b: cfg.q_b,
        q_p: cfg.q_p,
        trials: cfg.trials,
        master_seed: cfg.seed,
    };
    let single = sim_cfg.single_species();
    let out = if cfg.threads == 0 {
        simulate_chain(&sim_cfg)?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()?;
        pool.install(|| simulate_chain(&sim_cfg))?
    };

    let q_bit = code_logical_error(&sim_cfg.code, cfg.q_b)?;
    let q_phase = if single {
        q_bit
    } else {
        code_logical_error(&sim_cfg.code, cfg.q_p)?
    };
    let l = cfg.stations as i32;
    let block_rate_x = out.station_error_rate(Basis::X);
    let block_rate_z = out.station_error_rate(Basis::Z);
    let station_blocks = out.trials * out.station_errors.len() as u64;
    let metrics: [(&str, &Estimate, f64, u64); 5] = [
        (
            "error_free",
            &out.error_free,
            (1.0 - q_bit).powi(l - 1) * (1.0 - q_phase).powi(l - 1),
            out.trials,
        ),
        (
            "x_chain_correct",
            &out.x_chain_correct,
            (1.0 - q_phase).powi(l),
            out.trials,
        ),
        (
            "z_chain_correct",
            &out.z_chain_correct,
            (1.0 - q_bit).powi(l),
            out.trials,
        ),
        ("x_block_error", &block_rate_x, q_phase, station_blocks),
        ("z_block_error", &block_rate_z, q_bit, station_blocks),
    ];

    let mut t = Table::new(
        "",
        &[
            "code",
            "stations",
            "q_b",
            "q_p",
            "trials",
            "seed",
            "metric",
            "empirical",
            "std_err",
            "analytic",
            "z",
        ],
    );
    let mut max_abs_z: f64 = 0.0;
    for (name, est, analytic, n) in metrics {
        let z = est.z_score(analytic, n);
        max_abs_z = max_abs_z.max(z.abs());
        t.rows.push(vec![
            cfg.sim_code.clone(),
            cfg.stations.to_string(),
            sci(cfg.q_b),
            sci(cfg.q_p),
            cfg.trials.to_string(),
            cfg.seed.to_string(),
            name.to_string(),
            sci(est.fraction),
            sci(est.std_err),
            sci(analytic),
            format!("{z:.3}"),
        ]);
    }
    Ok(SimulateResult {
        table: t,
        max_abs_z,
    })
}

pub fn rate(cfg: &RunConfig) -> Result<Table> {
    let code = build_code(&cfg.rate_code)?;
    let n = code.n() as u64;
    let link = LinkParams {
        l0_km: cfg.l0_km,
        l_att_km: cfg.l_att_km,
        v_km_s: cfg.v_km_s,
        eta: cfg.eta,
        n_eng: cfg.n_eng.unwrap_or(4.0 * n as f64),
    };
    if cfg.rate_stations.iter().any(|&l| l < 2) {
        bail!("rate_stations entries must be at least 2");
    }
    let sched = purification_schedule(cfg.f0, cfg.beta, cfg.delta, cfg.levels)?;
    let n0 = required_pairs(n, &sched.success, cfg.levels, cfg.target)?;
    let cycle = cycle_time(&link, n0)?;
    let key = key_rate(cycle.tau_c)?;
    let mu = memory_error_prob(cfg.gamma, cycle.tau_c)?;
    let q = effective_error_probabilities(&ErrorParams {
        mu,
        ..error_params(cfg)
    })?
    .q;

    let mut t = Table::new(
        "",
        &[
            "code",
            "n",
            "N0",
            "kappa",
            "tau_c_s",
            "raw_rate_hz",
            "sifted_rate_hz",
            "mu",
            "q",
            "stations",
            "distance_km",
            "comm_limited_rate_hz",
        ],
    );
    for &l in &cfg.rate_stations {
        t.rows.push(vec![
            cfg.rate_code.clone(),
            n.to_string(),
            n0.to_string(),
            sci(cycle.kappa),
            sci(cycle.tau_c),
            sci(key.raw),
            sci(key.sifted),
            sci(mu),
            sci(q),
            l.to_string(),
            sci(l as f64 * cfg.l0_km),
            sci(cfg.v_km_s / (cfg.l0_km * l as f64)),
        ]);
    }
    Ok(t)
}
