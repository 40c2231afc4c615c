//! The q-congruence catalog and the two verification engines.
//!
//! Every statement is encoded as a pair of side expressions (rational
//! constant, q-power, q-integer brackets, fixed-length Pochhammer factors,
//! and an optional truncated hypergeometric sum) plus a modulus given as a
//! list of cyclotomic factors `(N, e)` standing for `Phi_N(q)^e`.
//!
//! The dense engine expands both sides as rational functions and takes exact
//! `Phi_N`-adic valuations of the difference. The local engine works in the
//! localization at `Phi_N` with a finite precision window sized by a dry
//! valuation-counting pass; it never inverts a sum, comparing cross-multiplied
//! numerators instead, and escalates the window until the verdict is exact.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::QdError;
use crate::localring::{binomial_valuation, LocalCtx, LocalValue};
use crate::polyring::{phi_valuation, IntPoly, RatPoly};
use crate::qcomb::{kronecker, q_integer, q_pochhammer, PochFactorSpec};
use crate::report::{FactorRecord, Params, VerificationReport};
use crate::summand::{term_classical, term_q, ClassicalFamily, QFamily, QSummandSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Proven,
    Conjecture,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Proven => "PROVEN",
            Status::Conjecture => "CONJECTURE",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Dense,
    Local,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Dense => "dense",
            Engine::Local => "local",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub engine: Engine,
    /// Dense engine refuses instances whose cross-multiplied difference would
    /// exceed this numerator degree.
    pub degree_budget: u64,
    /// Local engine escalation cap per modulus factor.
    pub max_attempts: u32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            engine: Engine::Local,
            degree_budget: 200_000,
            max_attempts: 6,
        }
    }
}

/// Instance parameters. Statements read only the fields they declare; the
/// rest are ignored.
#[derive(Clone, Copy, Debug)]
pub struct QParams {
    pub n: u64,
    pub r: u32,
    pub d: u64,
    pub m: u64,
    pub s: u32,
    pub k: u64,
}

impl Default for QParams {
    fn default() -> Self {
        QParams {
            n: 0,
            r: 1,
            d: 1,
            m: 1,
            s: 1,
            k: 0,
        }
    }
}

impl QParams {
    pub fn n(n: u64) -> Self {
        QParams {
            n,
            ..QParams::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    H2A,
    Main1,
    Main3,
    H2B,
    Lem22,
    Equiv,
    Lem23,
    Diff,
    Gpz,
    T51,
    Gauss,
    T52,
    Tau,
    Lp,
    T53A,
    T53B,
    Pf11,
    Pf22,
    Pf33,
    Pf44,
    Old1,
    Old2,
    C61,
    C62,
    C63,
    C64,
    C65,
    C66,
    C67,
    C68,
    Reason,
    Main1Strong,
}

const ALL_KINDS: [Kind; 32] = [
    Kind::H2A,
    Kind::Main1,
    Kind::Main3,
    Kind::H2B,
    Kind::Lem22,
    Kind::Equiv,
    Kind::Lem23,
    Kind::Diff,
    Kind::Gpz,
    Kind::T51,
    Kind::Gauss,
    Kind::T52,
    Kind::Tau,
    Kind::Lp,
    Kind::T53A,
    Kind::T53B,
    Kind::Pf11,
    Kind::Pf22,
    Kind::Pf33,
    Kind::Pf44,
    Kind::Old1,
    Kind::Old2,
    Kind::C61,
    Kind::C62,
    Kind::C63,
    Kind::C64,
    Kind::C65,
    Kind::C66,
    Kind::C67,
    Kind::C68,
    Kind::Reason,
    Kind::Main1Strong,
];

/// Residue condition on `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Residue {
    Any,
    Odd,
    OneMod4,
    ThreeMod4,
}

impl Kind {
    fn id(self) -> &'static str {
        match self {
            Kind::H2A => "Q-H2A",
            Kind::Main1 => "Q-MAIN1",
            Kind::Main3 => "Q-MAIN3",
            Kind::H2B => "Q-H2B",
            Kind::Lem22 => "Q-LEM22",
            Kind::Equiv => "Q-EQUIV",
            Kind::Lem23 => "Q-LEM23",
            Kind::Diff => "Q-DIFF",
            Kind::Gpz => "Q-GPZ",
            Kind::T51 => "Q-T51",
            Kind::Gauss => "Q-GAUSS",
            Kind::T52 => "Q-T52",
            Kind::Tau => "Q-TAU",
            Kind::Lp => "Q-LP",
            Kind::T53A => "Q-T53a",
            Kind::T53B => "Q-T53b",
            Kind::Pf11 => "Q-PF11",
            Kind::Pf22 => "Q-PF22",
            Kind::Pf33 => "Q-PF33",
            Kind::Pf44 => "Q-PF44",
            Kind::Old1 => "Q-OLD1",
            Kind::Old2 => "Q-OLD2",
            Kind::C61 => "C-61",
            Kind::C62 => "C-62",
            Kind::C63 => "C-63",
            Kind::C64 => "C-64",
            Kind::C65 => "C-65",
            Kind::C66 => "C-66",
            Kind::C67 => "C-67",
            Kind::C68 => "C-68",
            Kind::Reason => "Q-REASON",
            Kind::Main1Strong => "C-MAIN1-STRONG",
        }
    }

    fn from_id(id: &str) -> Option<Kind> {
        ALL_KINDS.into_iter().find(|k| k.id() == id)
    }

    fn status(self) -> Status {
        match self {
            Kind::C61
            | Kind::C62
            | Kind::C63
            | Kind::C64
            | Kind::C65
            | Kind::C66
            | Kind::C67
            | Kind::C68
            | Kind::Main1Strong => Status::Conjecture,
            _ => Status::Proven,
        }
    }

    fn residue(self) -> Residue {
        match self {
            Kind::Main1 | Kind::Main3 | Kind::Lem22 | Kind::Equiv | Kind::Lem23 | Kind::Diff
            | Kind::Gauss | Kind::T52 | Kind::C61 | Kind::C62 | Kind::C63 | Kind::C64
            | Kind::C65 | Kind::Main1Strong => Residue::OneMod4,
            Kind::H2A | Kind::H2B | Kind::Gpz | Kind::T51 | Kind::Tau | Kind::T53A
            | Kind::Pf11 | Kind::Pf33 | Kind::Pf44 | Kind::C66 | Kind::C67 | Kind::C68
            | Kind::Reason => Residue::Odd,
            Kind::Old1 | Kind::Old2 => Residue::ThreeMod4,
            Kind::Lp | Kind::Pf22 | Kind::T53B => Residue::Any,
        }
    }

    fn param_names(self) -> &'static [&'static str] {
        match self {
            Kind::Main1 | Kind::Main3 | Kind::T51 | Kind::T52 | Kind::T53A | Kind::T53B
            | Kind::Main1Strong => &["n", "r", "d"],
            Kind::Lem23 | Kind::C63 | Kind::C64 => &["n", "r", "s"],
            Kind::Lem22 | Kind::Diff | Kind::Pf11 | Kind::Pf22 | Kind::Old1 | Kind::Old2
            | Kind::C61 | Kind::C62 | Kind::C65 | Kind::C66 | Kind::C67 | Kind::C68 => &["n", "m"],
            Kind::Reason => &["n", "k"],
            _ => &["n"],
        }
    }

    fn constraint_text(self) -> &'static str {
        match self.residue() {
            Residue::Any => {
                if self == Kind::T53B {
                    "n > 1 (odd n required when d = 2); r >= 1; d in {1, 2}"
                } else {
                    "n > 1"
                }
            }
            Residue::Odd => match self.param_names() {
                ["n", "r", "d"] => "odd n > 1; r >= 1; d in {1, 2}",
                ["n", "m"] => "odd n > 1; m >= 1",
                ["n", "k"] => "odd n > 1; k >= 0",
                _ => "odd n > 1",
            },
            Residue::OneMod4 => match self.param_names() {
                ["n", "r", "d"] => "n = 1 (mod 4), n > 1; r >= 1; d in {1, 2}",
                ["n", "r", "s"] => "n = 1 (mod 4), n > 1; r > s >= 1",
                ["n", "m"] => "n = 1 (mod 4), n > 1; m >= 1",
                _ => "n = 1 (mod 4), n > 1",
            },
            Residue::ThreeMod4 => "n = 3 (mod 4); m >= 1",
        }
    }

    fn summary(self) -> &'static str {
        match self {
            Kind::H2A => "half-range F1 sum equals a squared quarter-length ratio (or 0) mod Phi_n^2",
            Kind::Main1 => "F1 tower descent: [n] R(n,r) times the rescaled sum",
            Kind::Main3 => "F2 tower descent: [n]_{q^2} R(n,r) q^{(1-n)/2} times the rescaled sum",
            Kind::H2B => "half-range F2 sum equals a closed ratio (or 0) mod Phi_n^2",
            Kind::Lem22 => "F1 sum to mn-1 vs [n] ratio times the classical H sum, mod Phi_n",
            Kind::Equiv => "the two closed prefactor forms agree mod Phi_n^2",
            Kind::Lem23 => "[n] R(n,r) is independent of r mod Phi_{n^s}",
            Kind::Diff => "F2 sum to mn-1 vs the classical H sum, mod Phi_n",
            Kind::Gpz => "half-range F3 sum equals a signed q-power mod Phi_n^2",
            Kind::T51 => "F3 tower descent with a signed q-power prefactor",
            Kind::Gauss => "half-range F4 sum equals a Kronecker-signed quarter ratio mod Phi_n^2",
            Kind::T52 => "F4 tower descent with G(n,r) and a Kronecker sign",
            Kind::Tau => "full-range F5 sum equals a signed q-power mod Phi_n^2",
            Kind::Lp => "full-range F6 sum equals a Kronecker-signed q-power mod Phi_n^2",
            Kind::T53A => "F5 tower descent (central q-binomial over (-q;q)_k)",
            Kind::T53B => "F6 tower descent (plain central q-binomial)",
            Kind::Pf11 => "F5 sum to mn-1 vs the classical 2^-k central-binomial sum, mod Phi_n",
            Kind::Pf22 => "F6 sum to mn-1 vs the classical central-binomial sum, mod Phi_n",
            Kind::Pf33 => "half-range F5 sum equals a signed q-power mod Phi_n",
            Kind::Pf44 => "half-range F6 sum equals a Kronecker-signed q-power mod Phi_n",
            Kind::Old1 => "F1 sum to mn-1 vanishes mod Phi_n^2 when n = 3 (mod 4)",
            Kind::Old2 => "F2 sum to mn-1 vanishes mod Phi_n^2 when n = 3 (mod 4)",
            Kind::C61 => "Q-LEM22 strengthened to modulus Phi_n^2",
            Kind::C62 => "Q-DIFF strengthened to modulus Phi_n^2",
            Kind::C63 => "Q-LEM23 strengthened to modulus Phi_{n^s}^2",
            Kind::C64 => "W(n,r) is independent of r mod Phi_{n^s}^2",
            Kind::C65 => "F7 sum to mn-1 vs [n] squared-quarter ratio times the K5 sum, mod Phi_n^3",
            Kind::C66 => "F8 sum to mn-1 vs [n]_{q^2} signed ratio times the K3 sum, mod Phi_n^3",
            Kind::C67 => "F9 sum to mn-1 vs signed [n] q-power times the K8 sum, mod Phi_n^2",
            Kind::C68 => "F10 sum to mn-1 vs signed [n] q-power times the K3 sum, mod Phi_n^2",
            Kind::Reason => "one F1 term at scale n matches its classical value mod Phi_n^2",
            Kind::Main1Strong => "Q-MAIN1 with every tower factor squared",
        }
    }

    /// Modulus shape as a display formula; `modulus_factors` is the
    /// evaluated counterpart.
    fn modulus_text(self) -> &'static str {
        match self {
            Kind::Main1 | Kind::Main3 | Kind::T51 | Kind::T52 => {
                "Phi_{n^r}^2 prod_{j<r} Phi_{n^j}"
            }
            Kind::T53A | Kind::T53B => {
                "d=1: Phi_{n^r}^2 prod_{j<r} Phi_{n^j}; d=2: prod_{j<=r} Phi_{n^j}"
            }
            Kind::Main1Strong => "prod_{j<=r} Phi_{n^j}^2",
            Kind::Lem23 => "Phi_{n^s}",
            Kind::C63 | Kind::C64 => "Phi_{n^s}^2",
            Kind::C65 | Kind::C66 => "Phi_n^3",
            Kind::Lem22 | Kind::Diff | Kind::Pf11 | Kind::Pf22 | Kind::Pf33 | Kind::Pf44 => {
                "Phi_n"
            }
            _ => "Phi_n^2",
        }
    }
}

/// Catalog row exposed to the CLI.
#[derive(Clone, Copy, Debug)]
pub struct QStatement {
    pub id: &'static str,
    pub status: Status,
    pub summary: &'static str,
    pub constraint: &'static str,
    pub modulus: &'static str,
    pub params: &'static [&'static str],
}

pub fn q_catalog() -> Vec<QStatement> {
    ALL_KINDS
        .into_iter()
        .map(|k| QStatement {
            id: k.id(),
            status: k.status(),
            summary: k.summary(),
            constraint: k.constraint_text(),
            modulus: k.modulus_text(),
            params: k.param_names(),
        })
        .collect()
}

pub fn all_q_ids() -> Vec<&'static str> {
    ALL_KINDS.into_iter().map(Kind::id).collect()
}

fn check_params(kind: Kind, p: &QParams) -> Result<(), QdError> {
    let fail = |reason: &str| {
        Err(QdError::ConstraintViolation {
            id: kind.id().to_string(),
            reason: reason.to_string(),
        })
    };
    if p.n < 2 {
        return fail("n > 1 required");
    }
    match kind.residue() {
        Residue::Any => {}
        Residue::Odd => {
            if p.n % 2 == 0 {
                return fail("odd n required");
            }
        }
        Residue::OneMod4 => {
            if p.n % 4 != 1 {
                return fail("n = 1 (mod 4) required");
            }
        }
        Residue::ThreeMod4 => {
            if p.n % 4 != 3 {
                return fail("n = 3 (mod 4) required");
            }
        }
    }
    let names = kind.param_names();
    if names.contains(&"r") && p.r < 1 {
        return fail("r >= 1 required");
    }
    if names.contains(&"d") && !(p.d == 1 || p.d == 2) {
        return fail("d must be 1 or 2");
    }
    if names.contains(&"m") && p.m < 1 {
        return fail("m >= 1 required");
    }
    if names.contains(&"s") && !(1 <= p.s && p.s < p.r) {
        return fail("r > s >= 1 required");
    }
    if kind == Kind::T53B && p.d == 2 && p.n % 2 == 0 {
        return fail("d = 2 requires odd n");
    }
    Ok(())
}

fn dwork_tower(n: u64, r: u32) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = (1..r).map(|j| (n.pow(j), 1)).collect();
    out.push((n.pow(r), 2));
    out
}

fn modulus_factors(kind: Kind, p: &QParams) -> Vec<(u64, u32)> {
    let n = p.n;
    match kind {
        Kind::Main1 | Kind::Main3 | Kind::T51 | Kind::T52 => dwork_tower(n, p.r),
        Kind::T53A | Kind::T53B => {
            if p.d == 1 {
                dwork_tower(n, p.r)
            } else {
                (1..=p.r).map(|j| (n.pow(j), 1)).collect()
            }
        }
        Kind::Main1Strong => (1..=p.r).map(|j| (n.pow(j), 2)).collect(),
        Kind::Lem23 => vec![(n.pow(p.s), 1)],
        Kind::C63 | Kind::C64 => vec![(n.pow(p.s), 2)],
        Kind::C65 | Kind::C66 => vec![(n, 3)],
        Kind::Lem22 | Kind::Diff | Kind::Pf11 | Kind::Pf22 | Kind::Pf33 | Kind::Pf44 => {
            vec![(n, 1)]
        }
        _ => vec![(n, 2)],
    }
}

/// Public modulus lookup by statement id.
pub fn modulus_of(id: &str, params: &QParams) -> Result<Vec<(u64, u32)>, QdError> {
    let kind = Kind::from_id(id).ok_or_else(|| QdError::UnknownStatement(id.to_string()))?;
    check_params(kind, params)?;
    Ok(modulus_factors(kind, params))
}

// ---------------------------------------------------------------------------
// Side expressions

#[derive(Clone, Debug)]
struct SumPart {
    spec: QSummandSpec,
    limit: u64,
    scale: u64,
}

#[derive(Clone, Debug)]
struct TermPart {
    spec: QSummandSpec,
    k: u64,
    scale: u64,
}

/// One side of a congruence: `constant * q^qpow * prod [x]_{q^t} * prod
/// (Pochhammer)^e * (optional truncated sum or single term)`.
#[derive(Clone, Debug)]
struct SideExpr {
    constant: BigRational,
    qpow: i64,
    qints: Vec<(u64, u64)>,
    poch: Vec<(PochFactorSpec, u64)>,
    sum: Option<SumPart>,
    term: Option<TermPart>,
}

impl SideExpr {
    fn new() -> Self {
        SideExpr {
            constant: BigRational::one(),
            qpow: 0,
            qints: Vec::new(),
            poch: Vec::new(),
            sum: None,
            term: None,
        }
    }

    fn zero() -> Self {
        SideExpr {
            constant: BigRational::zero(),
            ..SideExpr::new()
        }
    }

    fn is_zero(&self) -> bool {
        self.constant.is_zero()
    }

    fn constant(mut self, c: BigRational) -> Self {
        self.constant *= c;
        self
    }

    fn int_constant(self, c: i64) -> Self {
        self.constant(BigRational::from_integer(BigInt::from(c)))
    }

    fn sign(self, negative: bool) -> Self {
        if negative {
            self.int_constant(-1)
        } else {
            self
        }
    }

    fn q_power(mut self, e: i64) -> Self {
        self.qpow += e;
        self
    }

    fn qint(mut self, x: u64, t: u64) -> Self {
        self.qints.push((x, t));
        self
    }

    fn poch(mut self, sign: i8, offset: u64, step: u64, exponent: i32, count: u64) -> Self {
        self.poch
            .push((PochFactorSpec::new(sign, offset, step, exponent), count));
        self
    }

    fn sum(mut self, fam: QFamily, limit: u64, scale: u64) -> Self {
        self.sum = Some(SumPart {
            spec: fam.spec(),
            limit,
            scale,
        });
        self
    }

    fn term(mut self, fam: QFamily, k: u64, scale: u64) -> Self {
        self.term = Some(TermPart {
            spec: fam.spec(),
            k,
            scale,
        });
        self
    }

    /// `R(n, r)`-shaped ratio: lengths `(hi - 1)/2` at base scale and
    /// `(lo - 1)/2` at scale `n`.
    fn r_ratio(self, n: u64, hi: u64, lo: u64) -> Self {
        let a = (hi - 1) / 2;
        let b = (lo - 1) / 2;
        self.poch(1, 3, 4, 1, a)
            .poch(1, 5 * n, 4 * n, 1, b)
            .poch(1, 5, 4, -1, a)
            .poch(1, 3 * n, 4 * n, -1, b)
    }

    /// `G(n, r)`-shaped ratio with quarter lengths.
    fn g_ratio(self, n: u64, hi: u64, lo: u64) -> Self {
        let a = (hi - 1) / 4;
        let b = (lo - 1) / 4;
        self.poch(1, 2, 4, 1, a)
            .poch(1, 4 * n, 4 * n, 1, b)
            .poch(1, 4, 4, -1, a)
            .poch(1, 2 * n, 4 * n, -1, b)
    }

    /// `W(n, r)`-shaped ratio with quarter lengths at step 2.
    fn w_ratio(self, n: u64, hi: u64, lo: u64) -> Self {
        let a = (hi - 1) / 4;
        let b = (lo - 1) / 4;
        self.poch(1, 1, 2, 1, a)
            .poch(1, 2 * n, 2 * n, 1, b)
            .poch(1, 2, 2, -1, a)
            .poch(1, n, 2 * n, -1, b)
    }
}

fn classical_sum(fam: ClassicalFamily, m: u64) -> BigRational {
    let spec = fam.spec();
    let mut acc = BigRational::zero();
    for k in 0..m {
        acc += term_classical(&spec, k);
    }
    acc
}

fn exp_i64(v: i128) -> i64 {
    i64::try_from(v).expect("q-power exponent fits in i64")
}

fn sides(kind: Kind, p: &QParams) -> (SideExpr, SideExpr) {
    let n = p.n;
    let ni = n as i128;
    let half = (n - 1) / 2;
    let half_neg = half % 2 == 1;
    match kind {
        Kind::H2A => {
            let lhs = SideExpr::new().sum(QFamily::F1, half, 1);
            let rhs = if n % 4 == 1 {
                let quarter = (n - 1) / 4;
                SideExpr::new()
                    .poch(1, 2, 4, 2, quarter)
                    .poch(1, 4, 4, -2, quarter)
                    .q_power(half as i64)
            } else {
                SideExpr::zero()
            };
            (lhs, rhs)
        }
        Kind::Main1 | Kind::Main1Strong => {
            let (hi, lo) = (n.pow(p.r), n.pow(p.r - 1));
            let lhs = SideExpr::new().sum(QFamily::F1, (hi - 1) / p.d, 1);
            let rhs = SideExpr::new()
                .qint(n, 1)
                .r_ratio(n, hi, lo)
                .sum(QFamily::F1, (lo - 1) / p.d, n);
            (lhs, rhs)
        }
        Kind::Main3 => {
            let (hi, lo) = (n.pow(p.r), n.pow(p.r - 1));
            let lhs = SideExpr::new().sum(QFamily::F2, (hi - 1) / p.d, 1);
            let rhs = SideExpr::new()
                .qint(n, 2)
                .r_ratio(n, hi, lo)
                .q_power(-(half as i64))
                .sum(QFamily::F2, (lo - 1) / p.d, n);
            (lhs, rhs)
        }
        Kind::H2B => {
            let lhs = SideExpr::new().sum(QFamily::F2, half, 1);
            let rhs = if n % 4 == 1 {
                SideExpr::new()
                    .qint(n, 2)
                    .poch(1, 3, 4, 1, half)
                    .poch(1, 5, 4, -1, half)
                    .q_power(-(half as i64))
            } else {
                SideExpr::zero()
            };
            (lhs, rhs)
        }
        Kind::Lem22 | Kind::C61 => {
            let lhs = SideExpr::new().sum(QFamily::F1, p.m * n - 1, 1);
            let rhs = SideExpr::new()
                .qint(n, 1)
                .poch(1, 3, 4, 1, half)
                .poch(1, 5, 4, -1, half)
                .constant(classical_sum(ClassicalFamily::H, p.m));
            (lhs, rhs)
        }
        Kind::Equiv => {
            let quarter = (n - 1) / 4;
            let lhs = SideExpr::new()
                .poch(1, 2, 4, 2, quarter)
                .poch(1, 4, 4, -2, quarter)
                .q_power(half as i64);
            let rhs = SideExpr::new()
                .qint(n, 1)
                .poch(1, 3, 4, 1, half)
                .poch(1, 5, 4, -1, half);
            (lhs, rhs)
        }
        Kind::Lem23 | Kind::C63 => {
            let lhs = SideExpr::new()
                .qint(n, 1)
                .r_ratio(n, n.pow(p.r), n.pow(p.r - 1));
            let rhs = SideExpr::new()
                .qint(n, 1)
                .r_ratio(n, n.pow(p.s), n.pow(p.s - 1));
            (lhs, rhs)
        }
        Kind::Diff | Kind::C62 => {
            let lhs = SideExpr::new().sum(QFamily::F2, p.m * n - 1, 1);
            let rhs = SideExpr::new()
                .qint(n, 2)
                .poch(1, 3, 4, 1, half)
                .poch(1, 5, 4, -1, half)
                .q_power(-(half as i64))
                .constant(classical_sum(ClassicalFamily::H, p.m));
            (lhs, rhs)
        }
        Kind::Gpz => {
            let lhs = SideExpr::new().sum(QFamily::F3, half, 1);
            let rhs = SideExpr::new()
                .sign(half_neg)
                .q_power(exp_i64((1 - ni * ni) / 4));
            (lhs, rhs)
        }
        Kind::T51 => {
            let (hi, lo) = (n.pow(p.r), n.pow(p.r - 1));
            let lhs = SideExpr::new().sum(QFamily::F3, (hi - 1) / p.d, 1);
            let tower = ni.pow(2 * p.r - 1);
            let rhs = SideExpr::new()
                .sign(half_neg)
                .q_power(exp_i64((1 - ni) * (1 + tower) / 4))
                .sum(QFamily::F3, (lo - 1) / p.d, n);
            (lhs, rhs)
        }
        Kind::Gauss => {
            let quarter = (n - 1) / 4;
            let lhs = SideExpr::new().sum(QFamily::F4, half, 1);
            let rhs = SideExpr::new()
                .int_constant(kronecker(-2, n as i64) as i64)
                .q_power(exp_i64((ni - 1) * (ni + 3) / 8))
                .poch(1, 2, 4, 1, quarter)
                .poch(1, 4, 4, -1, quarter);
            (lhs, rhs)
        }
        Kind::T52 => {
            let (hi, lo) = (n.pow(p.r), n.pow(p.r - 1));
            let lhs = SideExpr::new().sum(QFamily::F4, (hi - 1) / p.d, 1);
            let tower = ni.pow(2 * p.r - 1);
            let rhs = SideExpr::new()
                .int_constant(kronecker(-2, n as i64) as i64)
                .q_power(exp_i64((ni - 1) * (tower + 3) / 8))
                .g_ratio(n, hi, lo)
                .sum(QFamily::F4, (lo - 1) / p.d, n);
            (lhs, rhs)
        }
        Kind::Tau => {
            let lhs = SideExpr::new().sum(QFamily::F5, n - 1, 1);
            let rhs = SideExpr::new()
                .sign(half_neg)
                .q_power(exp_i64((ni * ni - 1) / 4));
            (lhs, rhs)
        }
        Kind::Lp => {
            let lhs = SideExpr::new().sum(QFamily::F6, n - 1, 1);
            let k3 = kronecker(-3, n as i64);
            let rhs = if k3 == 0 {
                SideExpr::zero()
            } else {
                SideExpr::new()
                    .int_constant(k3 as i64)
                    .q_power(exp_i64((ni * ni - 1) / 3))
            };
            (lhs, rhs)
        }
        Kind::T53A => {
            let (hi, lo) = (n.pow(p.r), n.pow(p.r - 1));
            let lhs = SideExpr::new().sum(QFamily::F5, (hi - 1) / p.d, 1);
            let tower = ni.pow(2 * p.r - 1);
            let rhs = SideExpr::new()
                .sign(half_neg)
                .q_power(exp_i64((ni - 1) * (1 + tower) / 4))
                .sum(QFamily::F5, (lo - 1) / p.d, n);
            (lhs, rhs)
        }
        Kind::T53B => {
            let (hi, lo) = (n.pow(p.r), n.pow(p.r - 1));
            let lhs = SideExpr::new().sum(QFamily::F6, (hi - 1) / p.d, 1);
            let k3 = kronecker(-3, n as i64);
            let rhs = if k3 == 0 {
                SideExpr::zero()
            } else {
                let tower = ni.pow(2 * p.r - 1);
                SideExpr::new()
                    .int_constant(k3 as i64)
                    .q_power(exp_i64((ni - 1) * (1 + tower) / 3))
                    .sum(QFamily::F6, (lo - 1) / p.d, n)
            };
            (lhs, rhs)
        }
        Kind::Pf11 => {
            let lhs = SideExpr::new().sum(QFamily::F5, p.m * n - 1, 1);
            let rhs = SideExpr::new()
                .sign(half_neg)
                .q_power(exp_i64((ni * ni - 1) / 4))
                .constant(classical_sum(ClassicalFamily::Cb2, p.m));
            (lhs, rhs)
        }
        Kind::Pf22 => {
            let lhs = SideExpr::new().sum(QFamily::F6, p.m * n - 1, 1);
            let k3 = kronecker(-3, n as i64);
            let rhs = if k3 == 0 {
                SideExpr::zero()
            } else {
                SideExpr::new()
                    .int_constant(k3 as i64)
                    .q_power(exp_i64((ni * ni - 1) / 3))
                    .constant(classical_sum(ClassicalFamily::Cb, p.m))
            };
            (lhs, rhs)
        }
        Kind::Pf33 => {
            let lhs = SideExpr::new().sum(QFamily::F5, half, 1);
            let rhs = SideExpr::new()
                .sign(half_neg)
                .q_power(exp_i64((ni * ni - 1) / 4));
            (lhs, rhs)
        }
        Kind::Pf44 => {
            let lhs = SideExpr::new().sum(QFamily::F6, half, 1);
            let k3 = kronecker(-3, n as i64);
            let rhs = if k3 == 0 {
                SideExpr::zero()
            } else {
                SideExpr::new()
                    .int_constant(k3 as i64)
                    .q_power(exp_i64((ni * ni - 1) / 3))
            };
            (lhs, rhs)
        }
        Kind::Old1 => (
            SideExpr::new().sum(QFamily::F1, p.m * n - 1, 1),
            SideExpr::zero(),
        ),
        Kind::Old2 => (
            SideExpr::new().sum(QFamily::F2, p.m * n - 1, 1),
            SideExpr::zero(),
        ),
        Kind::C64 => {
            let lhs = SideExpr::new().w_ratio(n, n.pow(p.r), n.pow(p.r - 1));
            let rhs = SideExpr::new().w_ratio(n, n.pow(p.s), n.pow(p.s - 1));
            (lhs, rhs)
        }
        Kind::C65 => {
            let quarter = (n - 1) / 4;
            let lhs = SideExpr::new().sum(QFamily::F7, p.m * n - 1, 1);
            let rhs = SideExpr::new()
                .qint(n, 1)
                .poch(1, 2, 4, 2, quarter)
                .poch(1, 4, 4, -2, quarter)
                .constant(classical_sum(ClassicalFamily::K5, p.m));
            (lhs, rhs)
        }
        Kind::C66 => {
            let lhs = SideExpr::new().sum(QFamily::F8, p.m * n - 1, 1);
            let rhs = SideExpr::new()
                .qint(n, 2)
                .poch(-1, 3, 4, 1, half)
                .poch(-1, 5, 4, -1, half)
                .sign(half_neg)
                .q_power(-(half as i64))
                .constant(classical_sum(ClassicalFamily::K3, p.m));
            (lhs, rhs)
        }
        Kind::C67 => {
            let lhs = SideExpr::new().sum(QFamily::F9, p.m * n - 1, 1);
            let rhs = SideExpr::new()
                .qint(n, 1)
                .sign(half_neg)
                .q_power((half * half) as i64)
                .constant(classical_sum(ClassicalFamily::K8, p.m));
            (lhs, rhs)
        }
        Kind::C68 => {
            let lhs = SideExpr::new().sum(QFamily::F10, p.m * n - 1, 1);
            let rhs = SideExpr::new()
                .qint(n, 1)
                .sign(half_neg)
                .q_power((half * half) as i64)
                .constant(classical_sum(ClassicalFamily::K3, p.m));
            (lhs, rhs)
        }
        Kind::Reason => {
            let h_term = term_classical(&ClassicalFamily::H.spec(), p.k);
            let lhs = SideExpr::new().constant(h_term);
            let rhs = SideExpr::new().term(QFamily::F1, p.k, n);
            (lhs, rhs)
        }
    }
}

// ---------------------------------------------------------------------------
// Shared term decomposition
//
// Each summand factors as  t_k = G * M_k * Pn_k / Pd_k  where G is constant
// across k (bracket base, slope-0 one-plus factors), M_k collects the
// non-telescoping per-k factors (bracket numerator, sloped one-plus factors,
// the explicit q-power, the alternating sign), and Pn/Pd are running
// Pochhammer products extended by one window per step. Denominator windows
// accumulate, so partial sums share the single denominator Pd_k.

fn term_negative(spec: &QSummandSpec, k: u64) -> bool {
    spec.alternating && k % 2 == 1
}

fn standalone_qexp(spec: &QSummandSpec, k: u64, scale: u64) -> u64 {
    let (c2, c1, c0) = spec.qexp;
    assert!(c2 >= 0 && c1 >= 0 && c0 == 0, "summand q-exponents are nonnegative with no constant part");
    scale * (c2 as u64 * k * k + c1 as u64 * k)
}

/// Per-k standalone binomial factors `(sign, exponent, multiplicity)`.
fn standalone_binomials(spec: &QSummandSpec, k: u64, scale: u64) -> Vec<(i8, u64, u32)> {
    let mut out = Vec::new();
    if let Some((alpha, beta, m0)) = spec.bracket {
        out.push((1, m0 * scale * (alpha * k + beta), 1));
    }
    for op in &spec.one_plus {
        if op.slope > 0 {
            assert!(op.exponent > 0, "sloped one-plus factors stay in numerators");
            out.push((-1, scale * (op.slope * k + op.intercept), op.exponent as u32));
        }
    }
    out
}

/// A `1 - s*q^t` factor as `(s, t)`, optionally with a multiplicity.
type SignedPow = (i8, u64);
type SignedPowMult = (i8, u64, u32);

/// Constant-across-k factors `(numerator, denominator)` lists.
fn global_binomials(spec: &QSummandSpec, scale: u64) -> (Vec<SignedPowMult>, Vec<SignedPowMult>) {
    let mut num = Vec::new();
    let mut den = Vec::new();
    if let Some((_, _, m0)) = spec.bracket {
        den.push((1i8, m0 * scale, 1u32));
    }
    for op in &spec.one_plus {
        if op.slope == 0 {
            let entry = (-1i8, scale * op.intercept, op.exponent.unsigned_abs());
            if op.exponent > 0 {
                num.push(entry);
            } else {
                den.push(entry);
            }
        }
    }
    (num, den)
}

/// New Pochhammer window factors when stepping from `k-1` to `k`.
fn window_binomials(spec: &QSummandSpec, k: u64, scale: u64) -> (Vec<SignedPow>, Vec<SignedPow>) {
    let mut num = Vec::new();
    let mut den = Vec::new();
    for pw in &spec.poch {
        let f = pw.factor;
        for j in pw.count_mul * (k - 1)..pw.count_mul * k {
            let m = scale * (f.offset + f.step * j);
            let copies = f.exponent.unsigned_abs();
            let target = if f.exponent > 0 { &mut num } else { &mut den };
            for _ in 0..copies {
                target.push((f.sign, m));
            }
        }
    }
    (num, den)
}

// ---------------------------------------------------------------------------
// Dense engine

fn binomial_product(list: &[(i8, u64)]) -> IntPoly {
    let mut acc = IntPoly::one();
    for &(sign, m) in list {
        acc = acc.mul(&IntPoly::one_minus_sign_q(sign, m));
    }
    acc
}

fn binomial_product_mult(list: &[(i8, u64, u32)]) -> IntPoly {
    let mut acc = IntPoly::one();
    for &(sign, m, e) in list {
        let b = IntPoly::one_minus_sign_q(sign, m);
        for _ in 0..e {
            acc = acc.mul(&b);
        }
    }
    acc
}

fn standalone_poly(spec: &QSummandSpec, k: u64, scale: u64) -> IntPoly {
    let mut p = IntPoly::monomial(BigInt::one(), standalone_qexp(spec, k, scale) as usize);
    for (sign, m, e) in standalone_binomials(spec, k, scale) {
        let b = IntPoly::one_minus_sign_q(sign, m);
        for _ in 0..e {
            p = p.mul(&b);
        }
    }
    if term_negative(spec, k) {
        p.neg()
    } else {
        p
    }
}

/// Truncated sum as `(numerator, denominator)` over the shared telescoping
/// denominator; no gcd reduction anywhere.
fn dense_sum(spec: &QSummandSpec, limit: u64, scale: u64) -> (IntPoly, IntPoly) {
    let mut pn = IntPoly::one();
    let mut pd = IntPoly::one();
    let mut acc = standalone_poly(spec, 0, scale);
    for k in 1..=limit {
        let (wn, wd) = window_binomials(spec, k, scale);
        let cd = binomial_product(&wd);
        pn = pn.mul(&binomial_product(&wn));
        pd = pd.mul(&cd);
        acc = acc.mul(&cd).add(&standalone_poly(spec, k, scale).mul(&pn));
    }
    let (gn, gd) = global_binomials(spec, scale);
    (
        acc.mul(&binomial_product_mult(&gn)),
        pd.mul(&binomial_product_mult(&gd)),
    )
}

fn eval_dense(side: &SideExpr) -> Result<RatPoly, QdError> {
    if side.is_zero() {
        return Ok(RatPoly::zero());
    }
    let mut num = IntPoly::constant(side.constant.numer().clone());
    let mut den = IntPoly::constant(side.constant.denom().clone());
    if side.qpow >= 0 {
        num = num.shift(side.qpow as usize);
    } else {
        den = den.shift((-side.qpow) as usize);
    }
    for &(x, t) in &side.qints {
        num = num.mul(&q_integer(x, t));
    }
    for (spec, count) in &side.poch {
        let f = q_pochhammer(spec, *count);
        num = num.mul(f.num());
        den = den.mul(f.den());
    }
    if let Some(sp) = &side.sum {
        let (sn, sd) = dense_sum(&sp.spec, sp.limit, sp.scale);
        num = num.mul(&sn);
        den = den.mul(&sd);
    }
    if let Some(tp) = &side.term {
        let t = term_q(&tp.spec, tp.k, tp.scale);
        num = num.mul(t.num());
        den = den.mul(t.den());
    }
    RatPoly::new(num, den)
}

/// Upper bound for the numerator and denominator degrees of a dense side.
fn side_degree_bound(side: &SideExpr) -> (u128, u128) {
    if side.is_zero() {
        return (0, 0);
    }
    let mut num = 0u128;
    let mut den = 0u128;
    if side.qpow >= 0 {
        num += side.qpow as u128;
    } else {
        den += (-side.qpow) as u128;
    }
    for &(x, t) in &side.qints {
        num += ((x - 1) * t) as u128;
    }
    for (spec, count) in &side.poch {
        let c = *count as u128;
        let sum_exps = c * spec.offset as u128 + spec.step as u128 * c.saturating_sub(1) * c / 2;
        if spec.exponent > 0 {
            num += sum_exps * spec.exponent as u128;
        } else {
            den += sum_exps * spec.exponent.unsigned_abs() as u128;
        }
    }
    let mut sum_degrees = |spec: &QSummandSpec, lo: u64, hi: u64, scale: u64| {
        let mut wn_total = 0u128;
        let mut wd_total = 0u128;
        for k in lo.max(1)..=hi {
            let (wn, wd) = window_binomials(spec, k, scale);
            wn_total += wn.iter().map(|&(_, m)| m as u128).sum::<u128>();
            wd_total += wd.iter().map(|&(_, m)| m as u128).sum::<u128>();
        }
        let top = hi;
        let m_deg = standalone_qexp(spec, top, scale) as u128
            + standalone_binomials(spec, top, scale)
                .iter()
                .map(|&(_, m, e)| m as u128 * e as u128)
                .sum::<u128>();
        let (gn, gd) = global_binomials(spec, scale);
        let g_num: u128 = gn.iter().map(|&(_, m, e)| m as u128 * e as u128).sum();
        let g_den: u128 = gd.iter().map(|&(_, m, e)| m as u128 * e as u128).sum();
        num += wd_total + wn_total + m_deg + g_num;
        den += wd_total + g_den;
    };
    if let Some(sp) = &side.sum {
        sum_degrees(&sp.spec, 1, sp.limit.max(1), sp.scale);
    }
    if let Some(tp) = &side.term {
        sum_degrees(&tp.spec, 1, tp.k.max(1), tp.scale);
    }
    (num, den)
}

fn dense_budget_check(lhs: &SideExpr, rhs: &SideExpr, budget: u64) -> Result<(), QdError> {
    let (ln, ld) = side_degree_bound(lhs);
    let (rn, rd) = side_degree_bound(rhs);
    let predicted = (ln + rd).max(rn + ld);
    if predicted > budget as u128 {
        return Err(QdError::DegreeBudget {
            predicted: predicted.min(u64::MAX as u128) as u64,
            budget,
        });
    }
    Ok(())
}

/// Dense comparator: exact per-factor valuations of `a - b`.
pub fn congruent(a: &RatPoly, b: &RatPoly, modulus: &[(u64, u32)]) -> Vec<FactorRecord> {
    let diff = a.sub(b);
    modulus
        .iter()
        .map(|&(nn, e)| {
            if diff.is_zero() {
                FactorRecord::Q {
                    n: nn,
                    e,
                    achieved: None,
                    achieved_floor: None,
                    pass: true,
                }
            } else {
                let v = phi_valuation(&diff, nn);
                FactorRecord::Q {
                    n: nn,
                    e,
                    achieved: Some(v),
                    achieved_floor: None,
                    pass: v >= e as i64,
                }
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Local engine

fn binomial_local(ctx: &LocalCtx, sign: i8, m: u64) -> LocalValue {
    let (v, u) = ctx.binomial_unit(sign, m);
    ctx.make_stripped(v, u)
}

fn standalone_local(ctx: &LocalCtx, spec: &QSummandSpec, k: u64, scale: u64) -> LocalValue {
    let mut v = ctx.q_power(standalone_qexp(spec, k, scale));
    for (sign, m, e) in standalone_binomials(spec, k, scale) {
        let b = binomial_local(ctx, sign, m);
        for _ in 0..e {
            v = ctx.mul(&v, &b);
        }
    }
    if term_negative(spec, k) {
        ctx.neg(&v)
    } else {
        v
    }
}

fn apply_binomials_mult(ctx: &LocalCtx, mut acc: LocalValue, list: &[(i8, u64, u32)]) -> LocalValue {
    for &(sign, m, e) in list {
        let b = binomial_local(ctx, sign, m);
        for _ in 0..e {
            acc = ctx.mul(&acc, &b);
        }
    }
    acc
}

/// Truncated sum in the localization, inversion-free: returns
/// `(numerator, denominator)` with the denominator a genuine unit value.
fn local_sum(ctx: &LocalCtx, spec: &QSummandSpec, limit: u64, scale: u64) -> (LocalValue, LocalValue) {
    let mut pn = ctx.one();
    let mut pd = ctx.one();
    let mut acc = standalone_local(ctx, spec, 0, scale);
    for k in 1..=limit {
        let (wn, wd) = window_binomials(spec, k, scale);
        for (sign, m) in wn {
            pn = ctx.mul(&pn, &binomial_local(ctx, sign, m));
        }
        let mut cd = ctx.one();
        for (sign, m) in wd {
            cd = ctx.mul(&cd, &binomial_local(ctx, sign, m));
        }
        pd = ctx.mul(&pd, &cd);
        let term = ctx.mul(&standalone_local(ctx, spec, k, scale), &pn);
        acc = ctx.add(&ctx.mul(&acc, &cd), &term);
    }
    let (gn, gd) = global_binomials(spec, scale);
    (
        apply_binomials_mult(ctx, acc, &gn),
        apply_binomials_mult(ctx, pd, &gd),
    )
}

fn local_term_split(
    ctx: &LocalCtx,
    spec: &QSummandSpec,
    k: u64,
    scale: u64,
) -> Result<(LocalValue, LocalValue), QdError> {
    let mut num = standalone_local(ctx, spec, k, scale);
    let mut den = ctx.one();
    for pw in &spec.poch {
        let f = pw.factor.scaled(scale);
        let pos = PochFactorSpec::new(f.sign, f.offset, f.step, f.exponent.abs());
        let v = ctx.pochhammer(&pos, pw.count_mul * k)?;
        if f.exponent >= 0 {
            num = ctx.mul(&num, &v);
        } else {
            den = ctx.mul(&den, &v);
        }
    }
    let (gn, gd) = global_binomials(spec, scale);
    Ok((
        apply_binomials_mult(ctx, num, &gn),
        apply_binomials_mult(ctx, den, &gd),
    ))
}

/// Whole side in the localization as a `(numerator, denominator)` pair; the
/// denominator is always a unit.
fn eval_local_split(ctx: &LocalCtx, side: &SideExpr) -> Result<(LocalValue, LocalValue), QdError> {
    if side.is_zero() {
        return Ok((ctx.zero(), ctx.one()));
    }
    let mut num = ctx.constant(&BigRational::from_integer(side.constant.numer().clone()));
    let mut den = ctx.constant(&BigRational::from_integer(side.constant.denom().clone()));
    if side.qpow >= 0 {
        num = ctx.mul(&num, &ctx.q_power(side.qpow as u64));
    } else {
        den = ctx.mul(&den, &ctx.q_power((-side.qpow) as u64));
    }
    for &(x, t) in &side.qints {
        num = ctx.mul(&num, &binomial_local(ctx, 1, t * x));
        den = ctx.mul(&den, &binomial_local(ctx, 1, t));
    }
    for (spec, count) in &side.poch {
        let pos = PochFactorSpec::new(spec.sign, spec.offset, spec.step, spec.exponent.abs());
        let v = ctx.pochhammer(&pos, *count)?;
        if spec.exponent >= 0 {
            num = ctx.mul(&num, &v);
        } else {
            den = ctx.mul(&den, &v);
        }
    }
    if let Some(sp) = &side.sum {
        let (sn, sd) = local_sum(ctx, &sp.spec, sp.limit, sp.scale);
        num = ctx.mul(&num, &sn);
        den = ctx.mul(&den, &sd);
    }
    if let Some(tp) = &side.term {
        let (tn, td) = local_term_split(ctx, &tp.spec, tp.k, tp.scale)?;
        num = ctx.mul(&num, &tn);
        den = ctx.mul(&den, &td);
    }
    Ok((num, den))
}

// ---------------------------------------------------------------------------
// Dry valuation counting: exact denominator valuation and a numerator floor,
// used to size the local precision window before any ring work.

struct SideProfile {
    zero: bool,
    den_val: i64,
    num_floor: i64,
}

fn sum_profile(spec: &QSummandSpec, limit: u64, scale: u64, nn: u64) -> (i64, i64) {
    let standalone_val = |k: u64| -> i64 {
        standalone_binomials(spec, k, scale)
            .iter()
            .map(|&(sign, m, e)| binomial_valuation(nn, sign, m) * e as i64)
            .sum()
    };
    let mut vpn = 0i64;
    let mut vpd = 0i64;
    let mut tmin = standalone_val(0);
    for k in 1..=limit {
        let (wn, wd) = window_binomials(spec, k, scale);
        vpn += wn
            .iter()
            .map(|&(sign, m)| binomial_valuation(nn, sign, m))
            .sum::<i64>();
        vpd += wd
            .iter()
            .map(|&(sign, m)| binomial_valuation(nn, sign, m))
            .sum::<i64>();
        tmin = tmin.min(standalone_val(k) + vpn - vpd);
    }
    let (gn, gd) = global_binomials(spec, scale);
    let gval = |list: &[(i8, u64, u32)]| -> i64 {
        list.iter()
            .map(|&(sign, m, e)| binomial_valuation(nn, sign, m) * e as i64)
            .sum()
    };
    // floor for the accumulated numerator: shared denominator plus the worst
    // term; exact value for the denominator
    (gval(&gd) + vpd, gval(&gn) + vpd + tmin)
}

fn side_profile(side: &SideExpr, nn: u64) -> SideProfile {
    if side.is_zero() {
        return SideProfile {
            zero: true,
            den_val: 0,
            num_floor: 0,
        };
    }
    let mut den = 0i64;
    let mut num = 0i64;
    for &(x, t) in &side.qints {
        num += binomial_valuation(nn, 1, t * x);
        den += binomial_valuation(nn, 1, t);
    }
    for (spec, count) in &side.poch {
        let mut v = 0i64;
        for j in 0..*count {
            v += binomial_valuation(nn, spec.sign, spec.offset + spec.step * j);
        }
        if spec.exponent >= 0 {
            num += v * spec.exponent as i64;
        } else {
            den += v * spec.exponent.unsigned_abs() as i64;
        }
    }
    if let Some(sp) = &side.sum {
        let (d, f) = sum_profile(&sp.spec, sp.limit, sp.scale, nn);
        den += d;
        num += f;
    }
    if let Some(tp) = &side.term {
        // single term: window valuations are exact, not just a floor
        let standalone: i64 = standalone_binomials(&tp.spec, tp.k, tp.scale)
            .iter()
            .map(|&(sign, m, e)| binomial_valuation(nn, sign, m) * e as i64)
            .sum();
        let mut vpn = 0i64;
        let mut vpd = 0i64;
        for k in 1..=tp.k {
            let (wn, wd) = window_binomials(&tp.spec, k, tp.scale);
            vpn += wn
                .iter()
                .map(|&(sign, m)| binomial_valuation(nn, sign, m))
                .sum::<i64>();
            vpd += wd
                .iter()
                .map(|&(sign, m)| binomial_valuation(nn, sign, m))
                .sum::<i64>();
        }
        let (gn, gd) = global_binomials(&tp.spec, tp.scale);
        num += standalone
            + vpn
            + gn.iter()
                .map(|&(sign, m, e)| binomial_valuation(nn, sign, m) * e as i64)
                .sum::<i64>();
        den += vpd
            + gd.iter()
                .map(|&(sign, m, e)| binomial_valuation(nn, sign, m) * e as i64)
                .sum::<i64>();
    }
    SideProfile {
        zero: false,
        den_val: den,
        num_floor: num,
    }
}

// ---------------------------------------------------------------------------
// Verdicts

fn local_factor(
    lhs: &SideExpr,
    rhs: &SideExpr,
    nn: u64,
    e: u32,
    max_attempts: u32,
) -> Result<(FactorRecord, u32), QdError> {
    let pl = side_profile(lhs, nn);
    let pr = side_profile(rhs, nn);
    if pl.zero && pr.zero {
        return Ok((
            FactorRecord::Q {
                n: nn,
                e,
                achieved: None,
                achieved_floor: None,
                pass: true,
            },
            0,
        ));
    }
    let deficit = [&pl, &pr]
        .into_iter()
        .filter(|p| !p.zero)
        .map(|p| p.den_val - p.num_floor)
        .max()
        .unwrap();
    let base = (e as i64 + 2 + deficit).max(1) as usize;
    let mut pad = 0usize;
    let mut attempts = 0u32;
    loop {
        let ctx = LocalCtx::new(nn, base + pad);
        let (ln, ld) = eval_local_split(&ctx, lhs)?;
        let (rn, rd) = eval_local_split(&ctx, rhs)?;
        let vden = ld.valuation().expect("side denominators are units")
            + rd.valuation().expect("side denominators are units");
        let delta = ctx.sub(&ctx.mul(&ln, &rd), &ctx.mul(&rn, &ld));
        match delta {
            LocalValue::Unit { val, .. } => {
                let achieved = val - vden;
                return Ok((
                    FactorRecord::Q {
                        n: nn,
                        e,
                        achieved: Some(achieved),
                        achieved_floor: None,
                        pass: achieved >= e as i64,
                    },
                    attempts,
                ));
            }
            LocalValue::Zero { known: None } => {
                return Ok((
                    FactorRecord::Q {
                        n: nn,
                        e,
                        achieved: None,
                        achieved_floor: None,
                        pass: true,
                    },
                    attempts,
                ));
            }
            LocalValue::Zero { known: Some(kv) } => {
                let floor = kv - vden;
                attempts += 1;
                if attempts >= max_attempts {
                    if floor >= e as i64 {
                        return Ok((
                            FactorRecord::Q {
                                n: nn,
                                e,
                                achieved: None,
                                achieved_floor: Some(floor),
                                pass: true,
                            },
                            attempts,
                        ));
                    }
                    return Err(QdError::PrecisionExhausted {
                        n: nn,
                        needed: e as i64,
                        have: floor,
                    });
                }
                pad = 2 * pad + 8;
            }
        }
    }
}

fn echo_params(kind: Kind, p: &QParams) -> Params {
    let mut out = Params {
        n: Some(p.n),
        ..Params::default()
    };
    for name in kind.param_names() {
        match *name {
            "r" => out.r = Some(p.r),
            "d" => out.d = Some(p.d),
            "m" => out.m = Some(p.m),
            "s" => out.s = Some(p.s),
            "k" => out.k = Some(p.k),
            _ => {}
        }
    }
    out
}

fn instance_note(kind: Kind, p: &QParams) -> Option<String> {
    match kind {
        Kind::Lp | Kind::Pf22 | Kind::Pf44 | Kind::T53B if p.n % 3 == 0 => {
            Some("kronecker(-3, n) = 0: right side is identically zero".to_string())
        }
        _ => None,
    }
}

/// Verify one statement instance with the selected engine.
pub fn verify_q(id: &str, params: &QParams, opts: &VerifyOptions) -> Result<VerificationReport, QdError> {
    let kind = Kind::from_id(id).ok_or_else(|| QdError::UnknownStatement(id.to_string()))?;
    check_params(kind, params)?;
    let start = Instant::now();
    let modulus = modulus_factors(kind, params);
    let (lhs, rhs) = sides(kind, params);
    let mut factors = Vec::with_capacity(modulus.len());
    let mut retries = 0u32;
    match opts.engine {
        Engine::Dense => {
            dense_budget_check(&lhs, &rhs, opts.degree_budget)?;
            let l = eval_dense(&lhs)?;
            let r = eval_dense(&rhs)?;
            factors = congruent(&l, &r, &modulus);
        }
        Engine::Local => {
            for &(nn, e) in &modulus {
                let (rec, att) = local_factor(&lhs, &rhs, nn, e, opts.max_attempts)?;
                retries += att;
                factors.push(rec);
            }
        }
    }
    let pass = VerificationReport::compute_pass(&factors);
    Ok(VerificationReport {
        id: id.to_string(),
        status: kind.status().as_str().to_string(),
        params: echo_params(kind, params),
        engine: opts.engine.as_str().to_string(),
        factors,
        pass,
        retries,
        ms: start.elapsed().as_millis() as u64,
        note: instance_note(kind, params),
    })
}
