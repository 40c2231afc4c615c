//! Grid sweeps: a line-oriented key-value config format, expansion of the
//! configured grid against both statement catalogs, and a runner that maps
//! the instances through [`grid_map`].
//!
//! Config grammar (one `key = value` pair per line, `#` starts a comment):
//!
//! ```text
//! statements    = all | all-proven | all-conjecture | comma-separated ids
//! q.n           = comma-separated integers        (default 3,5,7,9,13)
//! q.rmax        = integer >= 1                    (default 2)
//! q.d           = subset of 1,2                   (default 1,2)
//! q.m           = comma-separated integers        (default 1,2,3)
//! p.p           = comma-separated primes          (default 3,5,7,11,13)
//! p.rmax        = integer >= 1                    (default 3)
//! engine        = local | dense | both            (default local)
//! degree-budget = integer                         (default 200000)
//! json          = output path for the JSON array  (optional)
//! csv           = output path for the CSV summary (optional)
//! ```
//!
//! Tower statements skip grid points whose truncation length `n^r` (or `p^r`)
//! exceeds [`TRUNCATION_LIMIT`]; residue-class constraints silently filter
//! the grid, so one config can drive the whole catalog.

use std::collections::HashSet;

use crate::padic::{check_super, p_catalog, verify_super};
use crate::report::VerificationReport;
use crate::statements::{modulus_of, q_catalog, verify_q, Engine, QParams, VerifyOptions};
use crate::{grid_map, ExecMode, QdError};

/// Largest truncation length `n^r` / `p^r` a sweep will enqueue.
pub const TRUNCATION_LIMIT: u64 = 2197; // 13^3

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineChoice {
    Local,
    Dense,
    Both,
}

impl EngineChoice {
    fn engines(self) -> &'static [Engine] {
        match self {
            EngineChoice::Local => &[Engine::Local],
            EngineChoice::Dense => &[Engine::Dense],
            EngineChoice::Both => &[Engine::Local, Engine::Dense],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub statements: Vec<String>,
    pub q_n: Vec<u64>,
    pub q_r_max: u32,
    pub q_d: Vec<u64>,
    pub q_m: Vec<u64>,
    pub p_p: Vec<u64>,
    pub p_r_max: u32,
    pub engine: EngineChoice,
    pub degree_budget: u64,
    pub json_out: Option<String>,
    pub csv_out: Option<String>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            statements: resolve_statement_list("all").expect("class token"),
            q_n: vec![3, 5, 7, 9, 13],
            q_r_max: 2,
            q_d: vec![1, 2],
            q_m: vec![1, 2, 3],
            p_p: vec![3, 5, 7, 11, 13],
            p_r_max: 3,
            engine: EngineChoice::Local,
            degree_budget: 200_000,
            json_out: None,
            csv_out: None,
        }
    }
}

fn config_err(msg: impl Into<String>) -> QdError {
    QdError::Config(msg.into())
}

fn parse_u64_list(key: &str, value: &str) -> Result<Vec<u64>, QdError> {
    let items: Result<Vec<u64>, _> = value
        .split(',')
        .map(|t| t.trim().parse::<u64>())
        .collect();
    let items = items.map_err(|_| config_err(format!("{key}: expected integers, got {value:?}")))?;
    if items.is_empty() || value.trim().is_empty() {
        return Err(config_err(format!("{key}: empty list")));
    }
    Ok(items)
}

/// Expand a `statements =` value into concrete catalog ids, preserving order.
pub fn resolve_statement_list(value: &str) -> Result<Vec<String>, QdError> {
    let q = q_catalog();
    let p = p_catalog();
    let known: Vec<(&str, crate::statements::Status)> = q
        .iter()
        .map(|s| (s.id, s.status))
        .chain(p.iter().map(|s| (s.id, s.status)))
        .collect();
    let mut out: Vec<String> = Vec::new();
    let mut seen = HashSet::new();
    let push = |id: &str, seen: &mut HashSet<String>, out: &mut Vec<String>| {
        if seen.insert(id.to_string()) {
            out.push(id.to_string());
        }
    };
    for token in value.split(',') {
        let token = token.trim();
        match token {
            "" => return Err(config_err("statements: empty token")),
            "all" => {
                for (id, _) in &known {
                    push(id, &mut seen, &mut out);
                }
            }
            "all-proven" => {
                for (id, st) in &known {
                    if *st == crate::statements::Status::Proven {
                        push(id, &mut seen, &mut out);
                    }
                }
            }
            "all-conjecture" => {
                for (id, st) in &known {
                    if *st == crate::statements::Status::Conjecture {
                        push(id, &mut seen, &mut out);
                    }
                }
            }
            id => {
                if !known.iter().any(|(k, _)| *k == id) {
                    return Err(config_err(format!("statements: unknown id {id:?}")));
                }
                push(id, &mut seen, &mut out);
            }
        }
    }
    Ok(out)
}

/// Parse the key-value config format. Unknown or repeated keys are errors.
pub fn parse_sweep_config(text: &str) -> Result<SweepConfig, QdError> {
    let mut cfg = SweepConfig::default();
    let mut seen = HashSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(format!("line {}: expected key = value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_string()) {
            return Err(config_err(format!("line {}: duplicate key {key:?}", lineno + 1)));
        }
        match key {
            "statements" => cfg.statements = resolve_statement_list(value)?,
            "q.n" => cfg.q_n = parse_u64_list(key, value)?,
            "q.d" => {
                let d = parse_u64_list(key, value)?;
                if d.iter().any(|&x| x != 1 && x != 2) {
                    return Err(config_err("q.d: entries must be 1 or 2"));
                }
                cfg.q_d = d;
            }
            "q.m" => cfg.q_m = parse_u64_list(key, value)?,
            "p.p" => cfg.p_p = parse_u64_list(key, value)?,
            "q.rmax" => {
                cfg.q_r_max = value
                    .parse()
                    .map_err(|_| config_err(format!("q.rmax: bad integer {value:?}")))?
            }
            "p.rmax" => {
                cfg.p_r_max = value
                    .parse()
                    .map_err(|_| config_err(format!("p.rmax: bad integer {value:?}")))?
            }
            "engine" => {
                cfg.engine = match value {
                    "local" => EngineChoice::Local,
                    "dense" => EngineChoice::Dense,
                    "both" => EngineChoice::Both,
                    other => {
                        return Err(config_err(format!(
                            "engine: expected local|dense|both, got {other:?}"
                        )))
                    }
                }
            }
            "degree-budget" => {
                cfg.degree_budget = value
                    .parse()
                    .map_err(|_| config_err(format!("degree-budget: bad integer {value:?}")))?
            }
            "json" => cfg.json_out = Some(value.to_string()),
            "csv" => cfg.csv_out = Some(value.to_string()),
            other => return Err(config_err(format!("unknown key {other:?}"))),
        }
    }
    if cfg.q_r_max < 1 || cfg.p_r_max < 1 {
        return Err(config_err("rmax must be at least 1"));
    }
    Ok(cfg)
}

/// One instance to verify.
#[derive(Clone, Debug)]
pub enum Task {
    Q {
        id: String,
        params: QParams,
        engine: Engine,
    },
    P {
        id: String,
        p: u64,
        r: u32,
    },
}

impl Task {
    pub fn describe(&self) -> String {
        match self {
            Task::Q { id, params, engine } => format!(
                "{id} n={} r={} d={} m={} s={} k={} [{}]",
                params.n,
                params.r,
                params.d,
                params.m,
                params.s,
                params.k,
                engine.as_str()
            ),
            Task::P { id, p, r } => format!("{id} p={p} r={r}"),
        }
    }
}

fn pow_within(base: u64, exp: u32, limit: u64) -> bool {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = match acc.checked_mul(base) {
            Some(v) if v <= limit => v,
            _ => return false,
        };
    }
    true
}

/// Expand the configured grid against the catalogs, skipping instances that
/// violate residue constraints or the truncation cap.
pub fn expand_grid(cfg: &SweepConfig) -> Result<Vec<Task>, QdError> {
    let q_rows = q_catalog();
    let p_rows = p_catalog();
    let mut tasks = Vec::new();
    for id in &cfg.statements {
        if let Some(row) = q_rows.iter().find(|s| s.id == id) {
            let uses = |axis: &str| row.params.contains(&axis);
            let rs: Vec<u32> = if uses("r") || uses("s") {
                (1..=cfg.q_r_max).collect()
            } else {
                vec![1]
            };
            let ds: Vec<u64> = if uses("d") { cfg.q_d.clone() } else { vec![1] };
            let ms: Vec<u64> = if uses("m") || uses("k") {
                cfg.q_m.clone()
            } else {
                vec![1]
            };
            for &n in &cfg.q_n {
                for &r in &rs {
                    if !pow_within(n, r, TRUNCATION_LIMIT) {
                        continue;
                    }
                    let ss: Vec<u32> = if uses("s") {
                        (1..r.max(1)).collect()
                    } else {
                        vec![1]
                    };
                    for &d in &ds {
                        for &m in &ms {
                            for &s in &ss {
                                let params = QParams {
                                    n,
                                    r,
                                    d,
                                    m,
                                    s,
                                    k: if uses("k") { m } else { 0 },
                                };
                                if modulus_of(id, &params).is_err() {
                                    continue;
                                }
                                for &engine in cfg.engine.engines() {
                                    tasks.push(Task::Q {
                                        id: id.clone(),
                                        params,
                                        engine,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        } else if let Some(row) = p_rows.iter().find(|s| s.id == id) {
            let uses_r = row.params.contains(&"r");
            for &p in &cfg.p_p {
                let rs: Vec<u32> = if uses_r {
                    (1..=cfg.p_r_max).collect()
                } else {
                    vec![1]
                };
                for r in rs {
                    if !pow_within(p, r, TRUNCATION_LIMIT) {
                        continue;
                    }
                    if check_super(id, p, r).is_ok() {
                        tasks.push(Task::P {
                            id: id.clone(),
                            p,
                            r,
                        });
                    }
                }
            }
        } else {
            return Err(QdError::UnknownStatement(id.clone()));
        }
    }
    if tasks.is_empty() {
        return Err(config_err("grid expanded to zero instances"));
    }
    Ok(tasks)
}

/// Everything a sweep produces: per-instance reports in grid order plus the
/// aggregate verdict the CLI turns into an exit code.
#[derive(Debug, Default)]
pub struct SweepOutcome {
    pub reports: Vec<VerificationReport>,
    /// instances that could not be evaluated, with the error text
    pub errors: Vec<String>,
    /// gating (non-conjecture) instances whose verdict was fail
    pub proven_failures: Vec<String>,
    /// conjectured instances whose verdict was fail; surfaced, never gating
    pub conjecture_failures: Vec<String>,
}

impl SweepOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.errors.is_empty() && self.proven_failures.is_empty() {
            0
        } else {
            1
        }
    }

    pub fn csv(&self) -> String {
        let mut out = String::from(VerificationReport::csv_header());
        out.push('\n');
        for r in &self.reports {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(&self.reports).expect("reports serialize")
    }

    pub fn summary_lines(&self) -> Vec<String> {
        let passed = self.reports.iter().filter(|r| r.pass).count();
        let mut lines = vec![format!(
            "{} instances: {} passed, {} failed, {} errors",
            self.reports.len() + self.errors.len(),
            passed,
            self.reports.len() - passed,
            self.errors.len()
        )];
        for f in &self.conjecture_failures {
            lines.push(format!("CONJECTURE FALSIFIED: {f}"));
        }
        for f in &self.proven_failures {
            lines.push(format!("FAIL: {f}"));
        }
        for e in &self.errors {
            lines.push(format!("ERROR: {e}"));
        }
        lines
    }
}

/// Run every instance of the expanded grid. Report order equals grid order
/// regardless of `mode`.
pub fn run_sweep(cfg: &SweepConfig, mode: ExecMode) -> Result<SweepOutcome, QdError> {
    let tasks = expand_grid(cfg)?;
    let budget = cfg.degree_budget;
    let results = grid_map(mode, tasks, move |task| {
        let label = task.describe();
        let res = match &task {
            Task::Q { id, params, engine } => {
                let opts = VerifyOptions {
                    engine: *engine,
                    degree_budget: budget,
                    ..VerifyOptions::default()
                };
                verify_q(id, params, &opts)
            }
            Task::P { id, p, r } => verify_super(id, *p, *r),
        };
        (label, res)
    });
    let mut outcome = SweepOutcome::default();
    for (label, res) in results {
        match res {
            Ok(report) => {
                if !report.pass {
                    if report.status == "CONJECTURE" {
                        outcome.conjecture_failures.push(label);
                    } else {
                        outcome.proven_failures.push(label);
                    }
                }
                outcome.reports.push(report);
            }
            Err(e) => outcome.errors.push(format!("{label}: {e}")),
        }
    }
    Ok(outcome)
}
