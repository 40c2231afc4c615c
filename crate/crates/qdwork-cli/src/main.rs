//! `qdwork`: verify catalogued congruence statements from the command line.
//!
//! Exit codes: 0 when every gating verdict passes (conjectured statements
//! never gate), 1 when a gating verdict fails or an instance errors mid-sweep,
//! 2 for unknown ids, constraint violations, and malformed configs or flags.

use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use qdwork_core::padic::{
    all_p_ids, dwork_check, gamma_p, p_catalog, verify_super, DworkSeries,
};
use qdwork_core::report::VerificationReport;
use qdwork_core::statements::{all_q_ids, q_catalog, verify_q, Engine, QParams, VerifyOptions};
use qdwork_core::summand::ClassicalFamily;
use qdwork_core::sweep::{parse_sweep_config, run_sweep};
use qdwork_core::ExecMode;

#[derive(Parser)]
#[command(name = "qdwork", version, about = "Exact verifier for q-congruences and p-adic supercongruences")]
struct Cli {
    /// Worker threads for grid runs (default: one per core)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Local,
    Dense,
    Both,
}

impl EngineArg {
    fn engines(self) -> &'static [Engine] {
        match self {
            EngineArg::Local => &[Engine::Local],
            EngineArg::Dense => &[Engine::Dense],
            EngineArg::Both => &[Engine::Local, Engine::Dense],
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify one statement instance and print its report as a JSON line
    Verify {
        /// Catalog id, e.g. Q-MAIN1 or P-T12
        #[arg(long)]
        statement: String,
        /// q-side scale (required for Q-* ids)
        #[arg(long)]
        n: Option<u64>,
        /// Tower height (defaults to 1)
        #[arg(long)]
        r: Option<u32>,
        /// Modulus variant for the tower theorems
        #[arg(long)]
        d: Option<u64>,
        /// Range multiplier for the fixed-modulus lemmas
        #[arg(long)]
        m: Option<u64>,
        /// Descent level, constrained to r > s >= 1
        #[arg(long)]
        s: Option<u32>,
        /// Term index for single-term statements
        #[arg(long)]
        k: Option<u64>,
        /// Prime (required for P-* ids)
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, value_enum, default_value_t = EngineArg::Local)]
        engine: EngineArg,
        /// Dense-engine size cutoff
        #[arg(long, default_value_t = 200_000)]
        degree_budget: u64,
        /// Also write the JSON lines to this file
        #[arg(long)]
        out: Option<String>,
    },
    /// Run a parameter grid from a sweep config file
    Sweep {
        /// Path to the key-value config
        #[arg(long)]
        config: String,
        /// Write the report array here (overrides the config's json key)
        #[arg(long)]
        json: Option<String>,
        /// Write the CSV summary here (overrides the config's csv key)
        #[arg(long)]
        csv: Option<String>,
    },
    /// Print every catalogued statement
    Catalog,
    /// Evaluate the Morita p-adic Gamma function at a rational point
    Gamma {
        #[arg(long)]
        p: u64,
        /// Argument as an integer or a/b fraction, e.g. 1/4
        #[arg(long)]
        x: String,
        /// Number of p-adic digits
        #[arg(long)]
        precision: u32,
    },
    /// Check the Dwork quotient congruence for a coefficient family
    Dwork {
        /// Family id, e.g. H (see `catalog` footer for the list)
        #[arg(long)]
        family: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u32,
        /// Check coefficients up to this z-degree (default: full truncation)
        #[arg(long)]
        zdeg: Option<u64>,
    },
}

fn main() -> ExitCode {
    // die quietly when the output pipe closes, e.g. `qdwork catalog | head`
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    qdwork_core::configure_jobs(cli.jobs);
    let code = match cli.cmd {
        Cmd::Verify {
            statement,
            n,
            r,
            d,
            m,
            s,
            k,
            p,
            engine,
            degree_budget,
            out,
        } => cmd_verify(
            &statement,
            n,
            r,
            d,
            m,
            s,
            k,
            p,
            engine,
            degree_budget,
            out.as_deref(),
        ),
        Cmd::Sweep { config, json, csv } => cmd_sweep(&config, json, csv),
        Cmd::Catalog => cmd_catalog(),
        Cmd::Gamma { p, x, precision } => cmd_gamma(p, &x, precision),
        Cmd::Dwork { family, p, r, zdeg } => cmd_dwork(&family, p, r, zdeg),
    };
    ExitCode::from(code)
}

fn fail_usage(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    2
}

fn write_file(path: &str, content: &str) -> Result<(), u8> {
    if let Some(dir) = Path::new(path).parent() {
        if !dir.as_os_str().is_empty() {
            if let Err(e) = std::fs::create_dir_all(dir) {
                return Err(fail_usage(format!("{}: {e}", dir.display())));
            }
        }
    }
    std::fs::write(path, content).map_err(|e| fail_usage(format!("{path}: {e}")))
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    statement: &str,
    n: Option<u64>,
    r: Option<u32>,
    d: Option<u64>,
    m: Option<u64>,
    s: Option<u32>,
    k: Option<u64>,
    p: Option<u64>,
    engine: EngineArg,
    degree_budget: u64,
    out: Option<&str>,
) -> u8 {
    let mut reports: Vec<VerificationReport> = Vec::new();
    if all_q_ids().contains(&statement) {
        let Some(n) = n else {
            return fail_usage(format!("{statement} is a q-side statement; pass --n"));
        };
        let params = QParams {
            n,
            r: r.unwrap_or(1),
            d: d.unwrap_or(1),
            m: m.unwrap_or(1),
            s: s.unwrap_or(1),
            k: k.unwrap_or(0),
        };
        for &eng in engine.engines() {
            let opts = VerifyOptions {
                engine: eng,
                degree_budget,
                ..VerifyOptions::default()
            };
            match verify_q(statement, &params, &opts) {
                Ok(rep) => reports.push(rep),
                Err(e) => return fail_usage(e),
            }
        }
    } else if all_p_ids().contains(&statement) {
        let Some(p) = p else {
            return fail_usage(format!("{statement} is a p-side statement; pass --p"));
        };
        match verify_super(statement, p, r.unwrap_or(1)) {
            Ok(rep) => reports.push(rep),
            Err(e) => return fail_usage(e),
        }
    } else {
        return fail_usage(format!("unknown statement id: {statement}"));
    }

    let mut lines = String::new();
    for rep in &reports {
        let line = serde_json::to_string(rep).expect("report serializes");
        println!("{line}");
        lines.push_str(&line);
        lines.push('\n');
    }
    if let Some(path) = out {
        if let Err(code) = write_file(path, &lines) {
            return code;
        }
    }
    let gating_failure = reports.iter().any(|r| r.status != "CONJECTURE" && !r.pass);
    if gating_failure {
        1
    } else {
        0
    }
}

fn cmd_sweep(config: &str, json: Option<String>, csv: Option<String>) -> u8 {
    let text = match std::fs::read_to_string(config) {
        Ok(t) => t,
        Err(e) => return fail_usage(format!("{config}: {e}")),
    };
    let mut cfg = match parse_sweep_config(&text) {
        Ok(c) => c,
        Err(e) => return fail_usage(e),
    };
    if json.is_some() {
        cfg.json_out = json;
    }
    if csv.is_some() {
        cfg.csv_out = csv;
    }
    let outcome = match run_sweep(&cfg, ExecMode::Parallel) {
        Ok(o) => o,
        Err(e) => return fail_usage(e),
    };
    if let Some(path) = &cfg.json_out {
        if let Err(code) = write_file(path, &outcome.json()) {
            return code;
        }
    }
    if let Some(path) = &cfg.csv_out {
        if let Err(code) = write_file(path, &outcome.csv()) {
            return code;
        }
    }
    for line in outcome.summary_lines() {
        println!("{line}");
    }
    outcome.exit_code() as u8
}

fn cmd_catalog() -> u8 {
    struct Row {
        id: String,
        status: &'static str,
        params: String,
        constraint: String,
        modulus: String,
        summary: &'static str,
    }
    let q = q_catalog();
    let p = p_catalog();
    let rows: Vec<Row> = q
        .iter()
        .map(|s| Row {
            id: s.id.to_string(),
            status: s.status.as_str(),
            params: s.params.join(","),
            constraint: s.constraint.to_string(),
            modulus: s.modulus.to_string(),
            summary: s.summary,
        })
        .chain(p.iter().map(|s| Row {
            id: s.id.to_string(),
            status: s.status.as_str(),
            params: s.params.join(","),
            constraint: s.constraint.to_string(),
            modulus: s.modulus.to_string(),
            summary: s.summary,
        }))
        .collect();
    let width = |f: fn(&Row) -> usize, head: usize| rows.iter().map(f).max().unwrap().max(head);
    let (wi, ws, wp, wc, wm) = (
        width(|r| r.id.len(), 2),
        width(|r| r.status.len(), 6),
        width(|r| r.params.len(), 6),
        width(|r| r.constraint.len(), 10),
        width(|r| r.modulus.len(), 7),
    );
    println!(
        "{:wi$}  {:ws$}  {:wp$}  {:wc$}  {:wm$}  SUMMARY",
        "ID", "STATUS", "PARAMS", "CONSTRAINT", "MODULUS"
    );
    for r in &rows {
        println!(
            "{:wi$}  {:ws$}  {:wp$}  {:wc$}  {:wm$}  {}",
            r.id, r.status, r.params, r.constraint, r.modulus, r.summary
        );
    }
    let families: Vec<&str> = ClassicalFamily::all().iter().map(|f| f.id()).collect();
    println!(
        "{} statements ({} q-side, {} p-side); dwork families: {}",
        rows.len(),
        q.len(),
        p.len(),
        families.join(", ")
    );
    0
}

fn cmd_gamma(p: u64, x: &str, precision: u32) -> u8 {
    let x: BigRational = match x.parse() {
        Ok(v) => v,
        Err(_) => return fail_usage(format!("--x: expected an integer or a/b fraction, got {x:?}")),
    };
    match gamma_p(&x, p, precision) {
        Ok(v) => {
            let residue = v.residue(precision).expect("gamma values are units");
            let obj = serde_json::json!({
                "p": p,
                "x": x.to_string(),
                "precision": precision,
                "residue": residue.to_string(),
            });
            println!("{obj}");
            0
        }
        Err(e) => fail_usage(e),
    }
}

fn cmd_dwork(family: &str, p: u64, r: u32, zdeg: Option<u64>) -> u8 {
    let Some(series) = DworkSeries::by_id(family) else {
        let families: Vec<&str> = ClassicalFamily::all().iter().map(|f| f.id()).collect();
        return fail_usage(format!(
            "unknown family {family:?}; known: {}",
            families.join(", ")
        ));
    };
    match dwork_check(&series, p, r, zdeg) {
        Ok(rep) => {
            println!("{}", serde_json::to_string(&rep).expect("report serializes"));
            if rep.pass {
                0
            } else {
                1
            }
        }
        Err(e) => fail_usage(e),
    }
}
