//! Data-driven summand families: each term is described once as structured
//! data and evaluated three ways (dense rational function, localized value,
//! classical rational number at the q -> 1 limit).
//!
//! A q-side term at index `k` and scale `m` (scale 1 on the left side of a
//! congruence, scale `n` inside a right-hand sum) is the product of
//!
//! * `(-1)^k` when alternating,
//! * an optional bracket `[alpha k + beta]` in base `q^(m_0 m)`,
//! * Pochhammer factors `(sign q^(a m); q^(c m))_(mu k)^e`,
//! * binomial factors `(1 + q^(m (a k + b)))^e`,
//! * a power `q^(m (c2 k^2 + c1 k + c0))`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::QdError;
use crate::localring::{LocalCtx, LocalValue};
use crate::polyring::RatPoly;
use crate::qcomb::{q_integer, q_pochhammer, PochFactorSpec};

/// Pochhammer factor together with its count multiplier: the factor runs to
/// `mu * k` at term index `k` (`mu = 2` encodes central q-binomials).
#[derive(Clone, Copy, Debug)]
pub struct PochWithMul {
    pub factor: PochFactorSpec,
    pub count_mul: u64,
}

/// `(1 + q^(a k + b))^e`.
#[derive(Clone, Copy, Debug)]
pub struct OnePlusFactor {
    pub slope: u64,
    pub intercept: u64,
    pub exponent: i32,
}

#[derive(Clone, Debug)]
pub struct QSummandSpec {
    pub alternating: bool,
    /// `(alpha, beta, m0)`: the factor `[alpha k + beta]` in base `q^(m0 scale)`
    pub bracket: Option<(u64, u64, u64)>,
    pub poch: Vec<PochWithMul>,
    pub one_plus: Vec<OnePlusFactor>,
    /// exponent polynomial `(c2, c1, c0)` for `q^(c2 k^2 + c1 k + c0)`
    pub qexp: (i64, i64, i64),
}

/// The ten q-hypergeometric families under verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QFamily {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
    F8,
    F9,
    F10,
}

/// Classical (q -> 1) term families; denominators are powers of small primes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassicalFamily {
    H,
    J,
    Rv,
    Rv2,
    Cb2,
    Cb,
    K5,
    K3,
    K8,
    One,
}

#[derive(Clone, Debug)]
pub struct ClassicalTermSpec {
    pub alternating: bool,
    /// linear prefactor `alpha k + beta`
    pub linear: Option<(i64, i64)>,
    /// rising-factorial factors `(a)_k^e`
    pub rising: Vec<(BigRational, i32)>,
    /// `k!^e` in the denominator
    pub factorial_exponent: i32,
    /// geometric factor `c^k`
    pub geometric: BigRational,
}

fn pf(sign: i8, offset: u64, step: u64, mul: u64, exponent: i32) -> PochWithMul {
    PochWithMul {
        factor: PochFactorSpec::new(sign, offset, step, exponent),
        count_mul: mul,
    }
}

impl QFamily {
    pub fn all() -> [QFamily; 10] {
        use QFamily::*;
        [F1, F2, F3, F4, F5, F6, F7, F8, F9, F10]
    }

    pub fn id(self) -> &'static str {
        match self {
            QFamily::F1 => "F1",
            QFamily::F2 => "F2",
            QFamily::F3 => "F3",
            QFamily::F4 => "F4",
            QFamily::F5 => "F5",
            QFamily::F6 => "F6",
            QFamily::F7 => "F7",
            QFamily::F8 => "F8",
            QFamily::F9 => "F9",
            QFamily::F10 => "F10",
        }
    }

    /// Classical family reached in the q -> 1 limit.
    pub fn classical_limit(self) -> ClassicalFamily {
        match self {
            QFamily::F1 | QFamily::F2 => ClassicalFamily::H,
            QFamily::F3 => ClassicalFamily::Rv,
            QFamily::F4 => ClassicalFamily::Rv2,
            QFamily::F5 => ClassicalFamily::Cb2,
            QFamily::F6 => ClassicalFamily::Cb,
            QFamily::F7 => ClassicalFamily::K5,
            QFamily::F8 | QFamily::F10 => ClassicalFamily::K3,
            QFamily::F9 => ClassicalFamily::K8,
        }
    }

    pub fn spec(self) -> QSummandSpec {
        let plain = |poch: Vec<PochWithMul>, qexp: (i64, i64, i64)| QSummandSpec {
            alternating: false,
            bracket: None,
            poch,
            one_plus: vec![],
            qexp,
        };
        match self {
            // (q;q^2)_k^2 (q^2;q^4)_k / ((q^2;q^2)_k^2 (q^4;q^4)_k) q^(2k)
            QFamily::F1 => plain(
                vec![
                    pf(1, 1, 2, 1, 2),
                    pf(1, 2, 4, 1, 1),
                    pf(1, 2, 2, 1, -2),
                    pf(1, 4, 4, 1, -1),
                ],
                (0, 2, 0),
            ),
            // (1+q^(4k+1)) (q^2;q^4)_k^3 / ((1+q) (q^4;q^4)_k^3) q^k
            QFamily::F2 => QSummandSpec {
                alternating: false,
                bracket: None,
                poch: vec![pf(1, 2, 4, 1, 3), pf(1, 4, 4, 1, -3)],
                one_plus: vec![
                    OnePlusFactor {
                        slope: 4,
                        intercept: 1,
                        exponent: 1,
                    },
                    OnePlusFactor {
                        slope: 0,
                        intercept: 1,
                        exponent: -1,
                    },
                ],
                qexp: (0, 1, 0),
            },
            // (q;q^2)_k^2 / (q^2;q^2)_k^2
            QFamily::F3 => plain(vec![pf(1, 1, 2, 1, 2), pf(1, 2, 2, 1, -2)], (0, 0, 0)),
            // (q;q^2)_k^2 / ((q^2;q^2)_k (q^4;q^4)_k) q^(2k)
            QFamily::F4 => plain(
                vec![pf(1, 1, 2, 1, 2), pf(1, 2, 2, 1, -1), pf(1, 4, 4, 1, -1)],
                (0, 2, 0),
            ),
            // q^k (q;q)_(2k) / ((q;q)_k^2 (-q;q)_k): central q-binomial over (-q;q)_k
            QFamily::F5 => plain(
                vec![pf(1, 1, 1, 2, 1), pf(1, 1, 1, 1, -2), pf(-1, 1, 1, 1, -1)],
                (0, 1, 0),
            ),
            // q^k (q;q)_(2k) / (q;q)_k^2: central q-binomial
            QFamily::F6 => plain(vec![pf(1, 1, 1, 2, 1), pf(1, 1, 1, 1, -2)], (0, 1, 0)),
            // (-1)^k [4k+1] (q;q^2)_k^4 (q^2;q^4)_k / ((q^2;q^2)_k^4 (q^4;q^4)_k) q^k
            QFamily::F7 => QSummandSpec {
                alternating: true,
                bracket: Some((4, 1, 1)),
                poch: vec![
                    pf(1, 1, 2, 1, 4),
                    pf(1, 2, 4, 1, 1),
                    pf(1, 2, 2, 1, -4),
                    pf(1, 4, 4, 1, -1),
                ],
                one_plus: vec![],
                qexp: (0, 1, 0),
            },
            // (-1)^k [4k+1] (q^2;q^4)_k^3 / (q^4;q^4)_k^3 q^k
            QFamily::F8 => QSummandSpec {
                alternating: true,
                bracket: Some((4, 1, 1)),
                poch: vec![pf(1, 2, 4, 1, 3), pf(1, 4, 4, 1, -3)],
                one_plus: vec![],
                qexp: (0, 1, 0),
            },
            // (-1)^k [3k+1] (q;q^2)_k^3 / (q;q)_k^3
            QFamily::F9 => QSummandSpec {
                alternating: true,
                bracket: Some((3, 1, 1)),
                poch: vec![pf(1, 1, 2, 1, 3), pf(1, 1, 1, 1, -3)],
                one_plus: vec![],
                qexp: (0, 0, 0),
            },
            // (-1)^k [4k+1] (q;q^2)_k^3 / (q^2;q^2)_k^3 q^(k^2)
            QFamily::F10 => QSummandSpec {
                alternating: true,
                bracket: Some((4, 1, 1)),
                poch: vec![pf(1, 1, 2, 1, 3), pf(1, 2, 2, 1, -3)],
                one_plus: vec![],
                qexp: (1, 0, 0),
            },
        }
    }
}

impl ClassicalFamily {
    pub fn all() -> [ClassicalFamily; 10] {
        use ClassicalFamily::*;
        [H, J, Rv, Rv2, Cb2, Cb, K5, K3, K8, One]
    }

    pub fn id(self) -> &'static str {
        match self {
            ClassicalFamily::H => "H",
            ClassicalFamily::J => "J",
            ClassicalFamily::Rv => "RV",
            ClassicalFamily::Rv2 => "RV2",
            ClassicalFamily::Cb2 => "CB2",
            ClassicalFamily::Cb => "CB",
            ClassicalFamily::K5 => "K5",
            ClassicalFamily::K3 => "K3",
            ClassicalFamily::K8 => "K8",
            ClassicalFamily::One => "ONE",
        }
    }

    pub fn spec(self) -> ClassicalTermSpec {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let ratio = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let base = ClassicalTermSpec {
            alternating: false,
            linear: None,
            rising: vec![],
            factorial_exponent: 0,
            geometric: BigRational::one(),
        };
        match self {
            // (1/2)_k^3 / k!^3
            ClassicalFamily::H => ClassicalTermSpec {
                rising: vec![(half, 3)],
                factorial_exponent: 3,
                ..base
            },
            // (6k+1) (1/2)_k^3 / (k!^3 4^k)
            ClassicalFamily::J => ClassicalTermSpec {
                linear: Some((6, 1)),
                rising: vec![(half, 3)],
                factorial_exponent: 3,
                geometric: ratio(1, 4),
                ..base
            },
            // (1/2)_k^2 / k!^2
            ClassicalFamily::Rv => ClassicalTermSpec {
                rising: vec![(half, 2)],
                factorial_exponent: 2,
                ..base
            },
            // (1/2)_k^2 / (2^k k!^2)
            ClassicalFamily::Rv2 => ClassicalTermSpec {
                rising: vec![(half, 2)],
                factorial_exponent: 2,
                geometric: ratio(1, 2),
                ..base
            },
            // binom(2k,k) / 2^k = 2^k (1/2)_k / k!
            ClassicalFamily::Cb2 => ClassicalTermSpec {
                rising: vec![(half, 1)],
                factorial_exponent: 1,
                geometric: ratio(2, 1),
                ..base
            },
            // binom(2k,k) = 4^k (1/2)_k / k!
            ClassicalFamily::Cb => ClassicalTermSpec {
                rising: vec![(half, 1)],
                factorial_exponent: 1,
                geometric: ratio(4, 1),
                ..base
            },
            // (-1)^k (4k+1) (1/2)_k^5 / k!^5
            ClassicalFamily::K5 => ClassicalTermSpec {
                alternating: true,
                linear: Some((4, 1)),
                rising: vec![(half, 5)],
                factorial_exponent: 5,
                ..base
            },
            // (-1)^k (4k+1) (1/2)_k^3 / k!^3
            ClassicalFamily::K3 => ClassicalTermSpec {
                alternating: true,
                linear: Some((4, 1)),
                rising: vec![(half, 3)],
                factorial_exponent: 3,
                ..base
            },
            // (-1)^k (3k+1) 8^k (1/2)_k^3 / k!^3
            ClassicalFamily::K8 => ClassicalTermSpec {
                alternating: true,
                linear: Some((3, 1)),
                rising: vec![(half, 3)],
                factorial_exponent: 3,
                geometric: ratio(8, 1),
            },
            ClassicalFamily::One => base,
        }
    }
}

/// Dense k-th summand with q replaced by q^scale.
pub fn term_q(spec: &QSummandSpec, k: u64, scale: u64) -> RatPoly {
    assert!(scale >= 1);
    let mut acc = RatPoly::one();
    if spec.alternating && k % 2 == 1 {
        acc = acc.neg();
    }
    if let Some((alpha, beta, m0)) = spec.bracket {
        let x = alpha * k + beta;
        acc = acc.mul(&RatPoly::from_int(q_integer(x, m0 * scale)));
    }
    for p in &spec.poch {
        acc = acc.mul(&q_pochhammer(&p.factor.scaled(scale), p.count_mul * k));
    }
    for op in &spec.one_plus {
        let m = scale * (op.slope * k + op.intercept);
        assert!(m >= 1);
        let base = RatPoly::from_int(crate::polyring::IntPoly::one_minus_sign_q(-1, m));
        let powered = base.pow(op.exponent as i64).expect("1 + q^m is nonzero");
        acc = acc.mul(&powered);
    }
    let (c2, c1, c0) = spec.qexp;
    let e = c2 * (k * k) as i64 + c1 * k as i64 + c0;
    acc.mul(&RatPoly::q_power(e * scale as i64))
}

/// Localized k-th summand, computed factor by factor: valuations come from
/// the divisibility counting rule, never from polynomial factoring.
pub fn term_local(
    spec: &QSummandSpec,
    k: u64,
    scale: u64,
    ctx: &LocalCtx,
) -> Result<LocalValue, QdError> {
    assert!(scale >= 1);
    let mut acc = ctx.one();
    if spec.alternating && k % 2 == 1 {
        acc = ctx.neg(&acc);
    }
    if let Some((alpha, beta, m0)) = spec.bracket {
        // [x]_(q^b) = (1 - q^(b x)) / (1 - q^b)
        let x = alpha * k + beta;
        let b = m0 * scale;
        let num = unit_of_binomial(ctx, 1, b * x);
        let den = unit_of_binomial(ctx, 1, b);
        acc = ctx.mul(&acc, &ctx.mul(&num, &ctx.inv(&den)?));
    }
    for p in &spec.poch {
        let v = ctx.pochhammer(&p.factor.scaled(scale), p.count_mul * k)?;
        acc = ctx.mul(&acc, &v);
    }
    for op in &spec.one_plus {
        let m = scale * (op.slope * k + op.intercept);
        let base = unit_of_binomial(ctx, -1, m);
        let base = if op.exponent < 0 {
            ctx.inv(&base)?
        } else {
            base
        };
        for _ in 0..op.exponent.unsigned_abs() {
            acc = ctx.mul(&acc, &base);
        }
    }
    let (c2, c1, c0) = spec.qexp;
    let e = (c2 * (k * k) as i64 + c1 * k as i64 + c0) * scale as i64;
    let qp = if e >= 0 {
        ctx.q_power(e as u64)
    } else {
        ctx.inv(&ctx.q_power((-e) as u64))?
    };
    Ok(ctx.mul(&acc, &qp))
}

fn unit_of_binomial(ctx: &LocalCtx, sign: i8, m: u64) -> LocalValue {
    let (val, num) = ctx.binomial_unit(sign, m);
    ctx.make_stripped(val, num)
}

/// Exact rational value of the k-th classical term.
pub fn term_classical(spec: &ClassicalTermSpec, k: u64) -> BigRational {
    let mut acc = BigRational::one();
    if spec.alternating && k % 2 == 1 {
        acc = -acc;
    }
    if let Some((alpha, beta)) = spec.linear {
        acc *= BigRational::from_integer(BigInt::from(alpha * k as i64 + beta));
    }
    for (a, e) in &spec.rising {
        let mut rise = BigRational::one();
        for j in 0..k {
            rise *= a.clone() + BigRational::from_integer(BigInt::from(j));
        }
        assert!(!rise.is_zero());
        acc *= rise.pow(*e);
    }
    if spec.factorial_exponent != 0 {
        let mut fact = BigRational::one();
        for j in 1..=k {
            fact *= BigRational::from_integer(BigInt::from(j));
        }
        acc *= fact.pow(-spec.factorial_exponent);
    }
    if !spec.geometric.is_one() {
        acc *= spec.geometric.pow(k as i32);
    }
    acc
}
