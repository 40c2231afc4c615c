//! Verification reports: one record per (statement, parameter point, engine)
//! with per-modulus-factor verdicts, JSON serialization, and CSV summaries.

use serde::{Deserialize, Serialize};

/// Parameter values of one instance; only the fields a statement actually
/// uses are populated.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
}

/// Verdict for one modulus factor. Q-side factors compare against a
/// cyclotomic power `Phi_N^e`; p-side factors against a prime power.
/// `achieved: None` with no floor means the difference vanished identically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FactorRecord {
    Q {
        #[serde(rename = "N")]
        n: u64,
        e: u32,
        achieved: Option<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        achieved_floor: Option<i64>,
        pass: bool,
    },
    P {
        p: u64,
        target_exponent: u32,
        achieved_valuation: Option<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        achieved_floor: Option<i64>,
        pass: bool,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        informational: bool,
    },
}

impl FactorRecord {
    pub fn pass(&self) -> bool {
        match self {
            FactorRecord::Q { pass, .. } => *pass,
            FactorRecord::P { pass, .. } => *pass,
        }
    }

    /// Informational factors report conjectured strengths and never gate.
    pub fn gates(&self) -> bool {
        match self {
            FactorRecord::Q { .. } => true,
            FactorRecord::P { informational, .. } => !informational,
        }
    }

    fn csv_cell(&self) -> String {
        match self {
            FactorRecord::Q {
                n,
                e,
                achieved,
                achieved_floor,
                pass,
            } => {
                let a = match (achieved, achieved_floor) {
                    (Some(v), _) => v.to_string(),
                    (None, Some(f)) => format!(">={f}"),
                    (None, None) => "inf".to_string(),
                };
                format!("Phi_{n}^{e}:{a}:{}", if *pass { "ok" } else { "FAIL" })
            }
            FactorRecord::P {
                p,
                target_exponent,
                achieved_valuation,
                achieved_floor,
                pass,
                informational,
            } => {
                let a = match (achieved_valuation, achieved_floor) {
                    (Some(v), _) => v.to_string(),
                    (None, Some(f)) => format!(">={f}"),
                    (None, None) => "inf".to_string(),
                };
                format!(
                    "{p}^{target_exponent}{}:{a}:{}",
                    if *informational { "(info)" } else { "" },
                    if *pass { "ok" } else { "FAIL" }
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: String,
    pub status: String,
    pub params: Params,
    pub engine: String,
    pub factors: Vec<FactorRecord>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "u32_is_zero")]
    pub retries: u32,
    pub ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn u32_is_zero(x: &u32) -> bool {
    *x == 0
}

impl VerificationReport {
    /// Overall pass: every gating factor passed.
    pub fn compute_pass(factors: &[FactorRecord]) -> bool {
        factors.iter().all(|f| !f.gates() || f.pass())
    }

    pub fn csv_header() -> &'static str {
        "id,status,engine,n,r,d,m,s,k,p,pass,retries,ms,factors,note"
    }

    pub fn csv_row(&self) -> String {
        let opt = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
        let opt32 = |x: Option<u32>| x.map(|v| v.to_string()).unwrap_or_default();
        let factors = self
            .factors
            .iter()
            .map(FactorRecord::csv_cell)
            .collect::<Vec<_>>()
            .join("|");
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.id,
            self.status,
            self.engine,
            opt(self.params.n),
            opt32(self.params.r),
            opt(self.params.d),
            opt(self.params.m),
            opt32(self.params.s),
            opt(self.params.k),
            opt(self.params.p),
            self.pass,
            self.retries,
            self.ms,
            factors,
            self.note.as_deref().unwrap_or("")
        )
    }
}
