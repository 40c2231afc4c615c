//! Localization of `Q(q)` at a cyclotomic prime `Phi_N`.
//!
//! A [`LocalValue`] is `Phi_N^val * (num/scale + O(Phi_N^prec))` with the
//! valuation tracked exactly and `num/scale` a unit (not divisible by
//! `Phi_N`). Working precision is capped by the context exponent `w`.
//!
//! Residue representatives are kept modulo `(q^N - 1)^w` rather than
//! `Phi_N^w`: the former is a multiple of the latter, so every ring
//! operation still projects onto the intended quotient, and its `w + 1`
//! binomial coefficients make reduction much cheaper than division by the
//! dense `Phi_N^w`. Valuation stripping and inversion go through the dense
//! `Phi_N` itself.
//!
//! Pochhammer factors embed without any polynomial factoring: the valuation
//! of `1 - q^m` at `Phi_N` is 1 exactly when `N | m`, and the valuation of
//! `1 + q^m` is `[N | 2m] - [N | m]` (via `1 + q^m = (1-q^2m)/(1-q^m)`), so
//! unit parts come from single exact divisions by `Phi_N`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::QdError;
use crate::polyring::{cyclotomic, IntPoly, RatPoly};
use crate::qcomb::PochFactorSpec;

/// Shared state for arithmetic in the localization at `Phi_N` with working
/// exponent `w`.
pub struct LocalCtx {
    n: u64,
    w: usize,
    phi: IntPoly,
    /// ascending coefficients of `(q^N - 1)^w`, indexed by `i` for `q^(N i)`
    sparse: Vec<BigInt>,
    cap_deg: usize,
}

/// Element of the localization at available precision.
#[derive(Clone, Debug)]
pub enum LocalValue {
    /// `O(Phi^known)`; `known = None` marks an exact zero.
    Zero { known: Option<i64> },
    /// `Phi^val * (num/scale + O(Phi^prec))` with `num/scale` a unit.
    Unit {
        val: i64,
        num: IntPoly,
        scale: BigInt,
        prec: usize,
    },
}

impl LocalValue {
    pub fn is_zero_class(&self) -> bool {
        matches!(self, LocalValue::Zero { .. })
    }

    /// Exact valuation for unit values, `None` for zero classes.
    pub fn valuation(&self) -> Option<i64> {
        match self {
            LocalValue::Unit { val, .. } => Some(*val),
            LocalValue::Zero { .. } => None,
        }
    }

    /// Absolute precision: the value is known modulo `Phi^k` for this `k`
    /// (`None` = known exactly).
    pub fn known_mod(&self) -> Option<i64> {
        match self {
            LocalValue::Zero { known } => *known,
            LocalValue::Unit { val, prec, .. } => Some(val + *prec as i64),
        }
    }

    /// Unit part as a rational function (constant denominator).
    pub fn unit_ratpoly(&self) -> Option<RatPoly> {
        match self {
            LocalValue::Zero { .. } => None,
            LocalValue::Unit { num, scale, .. } => Some(
                RatPoly::new(num.clone(), IntPoly::constant(scale.clone()))
                    .expect("scale is nonzero"),
            ),
        }
    }
}

/// Valuation of the Pochhammer factor `1 - sign * q^m` at `Phi_N` by the
/// divisibility counting rule. Requires `m >= 1`.
pub fn binomial_valuation(n: u64, sign: i8, m: u64) -> i64 {
    debug_assert!(m >= 1 && n >= 2);
    match sign {
        1 => i64::from(m % n == 0),
        -1 => i64::from((2 * m) % n == 0) - i64::from(m % n == 0),
        _ => panic!("sign must be +1 or -1"),
    }
}

/// Working exponent for verifying a congruence with target exponent `e`
/// when single terms can carry denominator valuation up to `max_den_val`.
pub fn precision_plan(target_exponent: u32, max_den_val: i64) -> usize {
    target_exponent as usize + max_den_val.max(0) as usize
}

impl LocalCtx {
    pub fn new(n: u64, w: usize) -> Self {
        assert!(n >= 2 && w >= 1);
        let phi = cyclotomic(n);
        let mut sparse = Vec::with_capacity(w + 1);
        for i in 0..=w {
            let mut c = crate::qcomb::binomial_int(w as u64, i as u64);
            if (w - i) % 2 == 1 {
                c = -c;
            }
            sparse.push(c);
        }
        LocalCtx {
            n,
            w,
            phi,
            sparse,
            cap_deg: n as usize * w,
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn phi(&self) -> &IntPoly {
        &self.phi
    }

    /// Reduce a representative modulo `(q^N - 1)^w` (sparse steps).
    pub fn reduce(&self, p: IntPoly) -> IntPoly {
        let deg = match p.deg() {
            Some(d) if d >= self.cap_deg => d,
            _ => return p,
        };
        let n = self.n as usize;
        let mut c: Vec<BigInt> = p.coeffs().to_vec();
        for i in (self.cap_deg..=deg).rev() {
            if c[i].is_zero() {
                continue;
            }
            let top = std::mem::replace(&mut c[i], BigInt::zero());
            let base = i - self.cap_deg;
            for (j, coef) in self.sparse[..self.w].iter().enumerate() {
                let t = coef * &top;
                c[base + j * n] -= t;
            }
        }
        c.truncate(self.cap_deg);
        IntPoly::new(c)
    }

    /// Multiply two representatives and reduce.
    fn mul_repr(&self, a: &IntPoly, b: &IntPoly) -> IntPoly {
        self.reduce(a.mul(b))
    }

    /// Divide out `Phi^t` from a representative, stripping at most
    /// `max_digits` factors; returns `(t, remaining)`.
    fn strip(&self, mut p: IntPoly, max_digits: usize) -> (usize, IntPoly) {
        let mut t = 0;
        while t < max_digits && !p.is_zero() {
            match p.divrem(&self.phi) {
                Ok((q, r)) if r.is_zero() => {
                    p = q;
                    t += 1;
                }
                _ => break,
            }
        }
        (t, p)
    }

    fn make_unit(&self, val: i64, num: IntPoly, scale: BigInt, prec: usize) -> LocalValue {
        debug_assert!(!scale.is_zero());
        if num.is_zero() || prec == 0 {
            return LocalValue::Zero {
                known: Some(val + prec as i64),
            };
        }
        let (num, scale) = normalize_scaled(num, scale);
        LocalValue::Unit {
            val,
            num,
            scale,
            prec,
        }
    }

    /// Exact zero.
    pub fn zero(&self) -> LocalValue {
        LocalValue::Zero { known: None }
    }

    /// Wrap an already-stripped integer unit at full precision. The caller
    /// guarantees `num` is not divisible by `Phi_N`.
    pub fn make_stripped(&self, val: i64, num: IntPoly) -> LocalValue {
        debug_assert!(!num.is_zero());
        debug_assert!({
            let (_, r) = num.divrem(&self.phi).unwrap();
            !r.is_zero()
        });
        LocalValue::Unit {
            val,
            num,
            scale: BigInt::one(),
            prec: self.w,
        }
    }

    pub fn one(&self) -> LocalValue {
        LocalValue::Unit {
            val: 0,
            num: IntPoly::one(),
            scale: BigInt::one(),
            prec: self.w,
        }
    }

    /// Embed a rational constant (full precision).
    pub fn constant(&self, c: &BigRational) -> LocalValue {
        if c.is_zero() {
            return self.zero();
        }
        self.make_unit(
            0,
            IntPoly::constant(c.numer().clone()),
            c.denom().clone(),
            self.w,
        )
    }

    /// Embed `q^e` for `e >= 0` (a unit: `q` is invertible mod `Phi_N`).
    pub fn q_power(&self, e: u64) -> LocalValue {
        let num = self.reduce(IntPoly::monomial(BigInt::one(), e as usize));
        LocalValue::Unit {
            val: 0,
            num,
            scale: BigInt::one(),
            prec: self.w,
        }
    }

    /// Embed an integer polynomial: strip the exact `Phi`-multiplicity, then
    /// reduce the unit part.
    pub fn embed_int(&self, p: &IntPoly) -> LocalValue {
        if p.is_zero() {
            return self.zero();
        }
        let v = p.factor_multiplicity(&self.phi);
        let mut unit = p.clone();
        for _ in 0..v {
            unit = unit.div_exact(&self.phi);
        }
        self.make_unit(v, self.reduce(unit), BigInt::one(), self.w)
    }

    /// Embed a rational function, inverting the denominator's unit part.
    pub fn embed(&self, f: &RatPoly) -> Result<LocalValue, QdError> {
        let num = self.embed_int(f.num());
        let den = self.embed_int(f.den());
        let den_inv = self.inv(&den)?;
        Ok(self.mul(&num, &den_inv))
    }

    /// Unit part of the factor `1 - sign * q^m` after dividing out its exact
    /// `Phi_N`-multiplicity; returns `(valuation, unit representative)`.
    pub fn binomial_unit(&self, sign: i8, m: u64) -> (i64, IntPoly) {
        let v = binomial_valuation(self.n, sign, m);
        let raw = IntPoly::one_minus_sign_q(sign, m);
        match v {
            0 => (0, self.reduce(raw)),
            1 => (1, self.reduce(raw.div_exact(&self.phi))),
            _ => unreachable!("binomial factors are squarefree"),
        }
    }

    /// Pochhammer factor `(sign q^a; q^c)_count^exponent` with combinatorial
    /// valuation; a single inversion handles negative exponents.
    pub fn pochhammer(&self, spec: &PochFactorSpec, count: u64) -> Result<LocalValue, QdError> {
        let mut val = 0i64;
        let mut unit = IntPoly::one();
        for j in 0..count {
            let m = spec.offset + spec.step * j;
            assert!(m >= 1, "pochhammer factor 1 - q^0 vanishes");
            let (v, u) = self.binomial_unit(spec.sign, m);
            val += v;
            unit = self.mul_repr(&unit, &u);
        }
        let e = spec.exponent;
        let base = LocalValue::Unit {
            val,
            num: unit,
            scale: BigInt::one(),
            prec: self.w,
        };
        let base = if e < 0 { self.inv(&base)? } else { base };
        let mut acc = self.one();
        for _ in 0..e.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        Ok(acc)
    }

    pub fn mul(&self, a: &LocalValue, b: &LocalValue) -> LocalValue {
        match (a, b) {
            (LocalValue::Zero { known: ka }, LocalValue::Zero { known: kb }) => {
                LocalValue::Zero {
                    known: match (ka, kb) {
                        (None, _) | (_, None) => None,
                        (Some(x), Some(y)) => Some(x + y),
                    },
                }
            }
            (LocalValue::Zero { known }, LocalValue::Unit { val, .. })
            | (LocalValue::Unit { val, .. }, LocalValue::Zero { known }) => LocalValue::Zero {
                known: known.map(|k| k + val),
            },
            (
                LocalValue::Unit {
                    val: v1,
                    num: n1,
                    scale: s1,
                    prec: p1,
                },
                LocalValue::Unit {
                    val: v2,
                    num: n2,
                    scale: s2,
                    prec: p2,
                },
            ) => self.make_unit(v1 + v2, self.mul_repr(n1, n2), s1 * s2, *p1.min(p2)),
        }
    }

    /// Add with exact precision bookkeeping. Both operands carry at least one
    /// digit of relative precision, so the result always has at least one
    /// representable digit above the common valuation.
    pub fn add(&self, a: &LocalValue, b: &LocalValue) -> LocalValue {
        match (a, b) {
            (LocalValue::Zero { known: ka }, LocalValue::Zero { known: kb }) => {
                LocalValue::Zero {
                    known: match (ka, kb) {
                        (None, k) | (k, None) => *k,
                        (Some(x), Some(y)) => Some(*x.min(y)),
                    },
                }
            }
            (LocalValue::Zero { known }, u @ LocalValue::Unit { .. })
            | (u @ LocalValue::Unit { .. }, LocalValue::Zero { known }) => {
                let (val, num, scale, prec) = match u {
                    LocalValue::Unit {
                        val,
                        num,
                        scale,
                        prec,
                    } => (*val, num, scale, *prec),
                    _ => unreachable!(),
                };
                match known {
                    None => u.clone(),
                    Some(k) if *k <= val => LocalValue::Zero { known: Some(*k) },
                    Some(k) => {
                        let digits = ((*k - val) as usize).min(prec);
                        self.make_unit(val, num.clone(), scale.clone(), digits)
                    }
                }
            }
            (
                LocalValue::Unit {
                    val: v1,
                    num: n1,
                    scale: s1,
                    prec: p1,
                },
                LocalValue::Unit {
                    val: v2,
                    num: n2,
                    scale: s2,
                    prec: p2,
                },
            ) => {
                let vm = *v1.min(v2);
                let known = (v1 + *p1 as i64).min(v2 + *p2 as i64);
                let digits = ((known - vm) as usize).min(self.w);
                debug_assert!(digits >= 1);
                let known = vm + digits as i64;
                // common scale s1*s2; offsets above the precision window
                // contribute nothing visible
                let shift = |num: &IntPoly, delta: i64| -> IntPoly {
                    if delta >= digits as i64 {
                        return IntPoly::zero();
                    }
                    let mut p = num.clone();
                    for _ in 0..delta {
                        p = self.reduce(p.mul(&self.phi));
                    }
                    p
                };
                let t1 = shift(n1, v1 - vm).scale(s2);
                let t2 = shift(n2, v2 - vm).scale(s1);
                let sum = t1.add(&t2);
                if sum.is_zero() {
                    return LocalValue::Zero { known: Some(known) };
                }
                let (t, unit) = self.strip(sum, digits);
                if t >= digits {
                    return LocalValue::Zero { known: Some(known) };
                }
                self.make_unit(vm + t as i64, unit, s1 * s2, digits - t)
            }
        }
    }

    pub fn sub(&self, a: &LocalValue, b: &LocalValue) -> LocalValue {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &LocalValue) -> LocalValue {
        match a {
            LocalValue::Zero { .. } => a.clone(),
            LocalValue::Unit {
                val,
                num,
                scale,
                prec,
            } => LocalValue::Unit {
                val: *val,
                num: num.neg(),
                scale: scale.clone(),
                prec: *prec,
            },
        }
    }

    /// Invert a unit; zero classes cannot be inverted.
    pub fn inv(&self, a: &LocalValue) -> Result<LocalValue, QdError> {
        match a {
            LocalValue::Zero { .. } => Err(QdError::NonUnitInversion {
                n: self.n,
                w: self.w,
            }),
            LocalValue::Unit {
                val,
                num,
                scale,
                prec,
            } => {
                // (Phi^v num/scale)^-1 = Phi^-v scale*inv(num)
                let (inum, iscale) = self.invert_repr(num, *prec)?;
                Ok(self.make_unit(-val, inum.scale(scale), iscale, *prec))
            }
        }
    }

    /// Invert an integer-polynomial unit modulo `Phi^prec`: extended Euclid
    /// modulo `Phi` for the base inverse, then Newton lifting.
    fn invert_repr(&self, num: &IntPoly, prec: usize) -> Result<(IntPoly, BigInt), QdError> {
        let base_rem = num.divrem(&self.phi).expect("phi nonzero").1;
        let (mut x, mut xs) = invert_mod_irreducible(&base_rem, &self.phi).ok_or(
            QdError::NonUnitInversion {
                n: self.n,
                w: self.w,
            },
        )?;
        let mut cur = 1usize;
        while cur < prec {
            cur = (cur * 2).min(prec);
            let modulus = self.phi.pow(cur as u32);
            let red = |p: IntPoly| p.divrem(&modulus).expect("modulus nonzero").1;
            // x' = x (2 - d x), with x = xp/xs
            let dx = red(num.mul(&x));
            let two_xs_minus_dx = IntPoly::constant(BigInt::from(2) * &xs).sub(&dx);
            x = red(x.mul(&two_xs_minus_dx));
            xs = &xs * &xs;
            let (nx, nxs) = normalize_scaled(x, xs);
            x = nx;
            xs = nxs;
        }
        Ok((x, xs))
    }
}

/// Strip the common integer content of a scaled polynomial `p/s`, keeping
/// `s > 0`.
fn normalize_scaled(p: IntPoly, s: BigInt) -> (IntPoly, BigInt) {
    debug_assert!(!s.is_zero());
    if p.is_zero() {
        return (p, BigInt::one());
    }
    let mut g = p.content().gcd(&s);
    if s.is_negative() {
        g = -g;
    }
    if g.is_one() {
        return (p, s);
    }
    (
        IntPoly::new(p.coeffs().iter().map(|c| c / &g).collect()),
        s / g,
    )
}

/// Extended Euclid over `Q[q]`: the inverse of `a` modulo the irreducible
/// `phi`, as a scaled integer polynomial `(p, s)` with `a p / s = 1 mod phi`.
/// `None` when `a = 0 mod phi`.
fn invert_mod_irreducible(a: &IntPoly, phi: &IntPoly) -> Option<(IntPoly, BigInt)> {
    if a.is_zero() {
        return None;
    }
    let to_q = |p: &IntPoly| -> Vec<BigRational> {
        p.coeffs()
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect()
    };
    let mut r0 = to_q(phi);
    let mut r1 = to_q(a);
    let mut s0: Vec<BigRational> = vec![];
    let mut s1 = vec![BigRational::one()];
    while qdeg(&r1) > 0 {
        let (quot, rem) = qdivrem(&r0, &r1);
        let s2 = qsub(&s0, &qmul(&quot, &s1));
        r0 = r1;
        r1 = rem;
        s0 = s1;
        s1 = s2;
        if r1.iter().all(Zero::is_zero) {
            return None; // common factor with phi
        }
    }
    let c = r1[0].clone();
    debug_assert!(!c.is_zero());
    // inverse = s1 / c: clear all rational denominators into one scale
    let mut lcm = BigInt::one();
    for x in &s1 {
        lcm = lcm.lcm(x.denom());
    }
    let coeffs: Vec<BigInt> = s1
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()) * c.denom())
        .collect();
    Some(normalize_scaled(IntPoly::new(coeffs), lcm * c.numer()))
}

fn qdeg(p: &[BigRational]) -> i64 {
    for i in (0..p.len()).rev() {
        if !p[i].is_zero() {
            return i as i64;
        }
    }
    -1
}

fn qsub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let get = |p: &[BigRational], i: usize| p.get(i).cloned().unwrap_or_else(BigRational::zero);
    (0..n).map(|i| get(a, i) - get(b, i)).collect()
}

fn qmul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn qdivrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let db = qdeg(b);
    assert!(db >= 0);
    let lc = b[db as usize].clone();
    let mut rem = a.to_vec();
    let da = qdeg(&rem);
    if da < db {
        return (vec![], rem);
    }
    let mut quot = vec![BigRational::zero(); (da - db + 1) as usize];
    for i in (db as usize..rem.len()).rev() {
        if rem[i].is_zero() {
            continue;
        }
        let c = &rem[i] / &lc;
        for j in 0..db as usize {
            let t = &b[j] * &c;
            rem[i - db as usize + j] -= t;
        }
        rem[i] = BigRational::zero();
        quot[i - db as usize] = c;
    }
    (quot, rem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::phi_valuation;
    use crate::qcomb::q_pochhammer;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_same_class(ctx: &LocalCtx, a: &LocalValue, b: &LocalValue) {
        let diff = ctx.sub(a, b);
        assert!(diff.is_zero_class(), "classes differ: {a:?} vs {b:?}");
    }

    #[test]
    fn inverse_of_one_plus_q_mod_phi3() {
        let ctx = LocalCtx::new(3, 1);
        let one_plus_q = IntPoly::from_i64(&[1, 1]);
        let f = RatPoly::new(IntPoly::one(), one_plus_q.clone()).unwrap();
        let v = ctx.embed(&f).unwrap();
        assert_eq!(v.valuation(), Some(0));
        let minus_q = ctx.embed_int(&IntPoly::from_i64(&[0, -1]));
        assert_same_class(&ctx, &v, &minus_q);
        let back = ctx.mul(&v, &ctx.embed_int(&one_plus_q));
        assert_same_class(&ctx, &back, &ctx.one());
    }

    #[test]
    fn newton_lift_inverts_at_higher_precision() {
        let ctx = LocalCtx::new(5, 4);
        let den = IntPoly::from_i64(&[3, 1, 0, 2, 0, 0, 7]);
        let f = RatPoly::new(IntPoly::one(), den.clone()).unwrap();
        let v = ctx.embed(&f).unwrap();
        let back = ctx.mul(&v, &ctx.embed_int(&den));
        assert_same_class(&ctx, &back, &ctx.one());
    }

    #[test]
    fn pochhammer_valuations_match_counting_rule() {
        // (q; q^2)_10 at Phi_5: factors 1 - q^(2j+1), j < 10; 5 | 2j+1 for
        // j in {2, 7}
        let ctx = LocalCtx::new(5, 2);
        let spec = PochFactorSpec::new(1, 1, 2, 1);
        let v = ctx.pochhammer(&spec, 10).unwrap();
        assert_eq!(v.valuation(), Some(2));
        let dense = q_pochhammer(&spec, 10);
        assert_eq!(phi_valuation(&dense, 5), 2);

        // (q^2; q^2)_13 at Phi_5: multiples of 5 among 2, 4, ..., 26
        let spec = PochFactorSpec::new(1, 2, 2, 1);
        let v = ctx.pochhammer(&spec, 13).unwrap();
        assert_eq!(v.valuation(), Some(2));

        // (-q; q)_5 at Phi_6: 1 + q^3 is divisible by Phi_6
        let ctx6 = LocalCtx::new(6, 2);
        let spec = PochFactorSpec::new(-1, 1, 1, 1);
        let v = ctx6.pochhammer(&spec, 5).unwrap();
        assert_eq!(v.valuation(), Some(1));
        assert_eq!(phi_valuation(&q_pochhammer(&spec, 5), 6), 1);
    }

    #[test]
    fn q_power_reduces_by_period() {
        let ctx = LocalCtx::new(5, 1);
        let v = ctx.q_power(23);
        let q3 = ctx.embed_int(&IntPoly::monomial(BigInt::one(), 3));
        assert_same_class(&ctx, &v, &q3);
    }

    #[test]
    fn embed_strips_full_phi_multiplicity() {
        let ctx = LocalCtx::new(5, 2);
        let p = cyclotomic(5).pow(3).mul(&IntPoly::from_i64(&[1, 1]));
        let v = ctx.embed_int(&p);
        assert_eq!(v.valuation(), Some(3));
        assert_eq!(v.known_mod(), Some(5));

        let f = RatPoly::new(IntPoly::one(), cyclotomic(5)).unwrap();
        let v = ctx.embed(&f).unwrap();
        assert_eq!(v.valuation(), Some(-1));
        assert_eq!(v.known_mod(), Some(1));
    }

    #[test]
    fn add_cancellation_yields_zero_class_with_known_precision() {
        let ctx = LocalCtx::new(3, 2);
        let a = ctx.embed_int(&IntPoly::from_i64(&[2, 5, 1]));
        let sum = ctx.add(&a, &ctx.neg(&a));
        match sum {
            LocalValue::Zero { known: Some(k) } => assert_eq!(k, 2),
            other => panic!("expected finitely-known zero, got {other:?}"),
        }
    }

    #[test]
    fn precision_plan_adds_denominator_budget() {
        assert_eq!(precision_plan(2, 0), 2);
        assert_eq!(precision_plan(2, 12), 14);
        assert_eq!(precision_plan(3, -1), 3);
    }

    #[test]
    fn random_pochhammer_agrees_with_dense_embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x517c_c1b7);
        let ns = [2u64, 3, 5, 6, 9, 12];
        for _ in 0..60 {
            let n = ns[rng.gen_range(0..ns.len())];
            let w = rng.gen_range(1..=3);
            let ctx = LocalCtx::new(n, w);
            let spec = PochFactorSpec::new(
                if rng.gen_bool(0.5) { 1 } else { -1 },
                rng.gen_range(1..=6),
                rng.gen_range(1..=4),
                rng.gen_range(-2..=2),
            );
            let count = rng.gen_range(0..=10);
            let local = ctx.pochhammer(&spec, count).unwrap();
            let dense = q_pochhammer(&spec, count);
            let embedded = ctx.embed(&dense).unwrap();
            assert_eq!(local.valuation(), embedded.valuation());
            assert_same_class(&ctx, &local, &embedded);
        }
    }

    #[test]
    fn random_embedding_is_a_ring_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9);
        for _ in 0..40 {
            let n = [2u64, 3, 4, 5, 9][rng.gen_range(0..5)];
            let w = rng.gen_range(1..=3);
            let ctx = LocalCtx::new(n, w);
            let rand_poly = |rng: &mut ChaCha8Rng| {
                let len = rng.gen_range(1..=8);
                IntPoly::new((0..len).map(|_| BigInt::from(rng.gen_range(-4i64..=4))).collect())
            };
            let a = rand_poly(&mut rng);
            let b = rand_poly(&mut rng);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let (ea, eb) = (ctx.embed_int(&a), ctx.embed_int(&b));
            assert_same_class(&ctx, &ctx.mul(&ea, &eb), &ctx.embed_int(&a.mul(&b)));
            assert_same_class(&ctx, &ctx.add(&ea, &eb), &ctx.embed_int(&a.add(&b)));
        }
    }
}
