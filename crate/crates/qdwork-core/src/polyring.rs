//! Dense polynomials over `Z` and the rational functions they generate.
//!
//! [`IntPoly`] stores ascending coefficients with no trailing zero, so the
//! zero polynomial is the empty vector and `deg` is `coeffs.len() - 1`.
//! [`RatPoly`] is a quotient `num/den` of two integer polynomials; it is the
//! working representation of every q-side quantity in the dense engine,
//! including rational constants and negative powers of `q`.
//!
//! Cyclotomic polynomials come out of the Moebius product
//! `Phi_n = prod_{d | n} (q^d - 1)^{mu(n/d)}` evaluated with exact divisions
//! only, and `Phi_n`-adic valuations of rational functions are counted by
//! trial division of numerator and denominator separately (no gcd needed:
//! the count difference is well defined on unreduced fractions).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{divisors, mobius};
use crate::error::QdError;

const KARATSUBA_MIN: usize = 32;

/// Dense polynomial in `Z[q]`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    /// Build from ascending coefficients; trailing zeros are stripped.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::new(vec![c])
    }

    /// `c * q^d`.
    pub fn monomial(c: BigInt, d: usize) -> Self {
        if c.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); d + 1];
        coeffs[d] = c;
        IntPoly { coeffs }
    }

    /// `q^d - 1`.
    pub fn q_pow_minus_one(d: u64) -> Self {
        let mut coeffs = vec![BigInt::zero(); d as usize + 1];
        coeffs[0] = -BigInt::one();
        coeffs[d as usize] = BigInt::one();
        IntPoly { coeffs }
    }

    /// `1 - sign * q^m` with `sign = +-1`; the generic q-Pochhammer factor.
    pub fn one_minus_sign_q(sign: i8, m: u64) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        if m == 0 {
            return IntPoly::constant(BigInt::from(1 - sign as i64));
        }
        let mut coeffs = vec![BigInt::zero(); m as usize + 1];
        coeffs[0] = BigInt::one();
        coeffs[m as usize] = BigInt::from(-(sign as i64));
        IntPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        IntPoly::new(out)
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - other.coeff(i));
        }
        IntPoly::new(out)
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        if c.is_zero() {
            return IntPoly::zero();
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiply by `q^m`.
    pub fn shift(&self, m: usize) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); m];
        coeffs.extend_from_slice(&self.coeffs);
        IntPoly { coeffs }
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        IntPoly::new(mul_slices(&self.coeffs, &other.coeffs))
    }

    pub fn pow(&self, e: u32) -> IntPoly {
        let mut acc = IntPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Euclidean division `self = quot * div + rem` with `deg rem < deg div`.
    ///
    /// Defined over `Z[q]` only when every reduction step divides exactly,
    /// which holds for monic divisors (the only divisors the engines use).
    ///
    /// # Panics
    ///
    /// Panics if a reduction step is not integer-divisible.
    pub fn divrem(&self, div: &IntPoly) -> Result<(IntPoly, IntPoly), QdError> {
        if div.is_zero() {
            return Err(QdError::ZeroDivisor);
        }
        let dd = div.deg().unwrap();
        let lc = div.leading().unwrap();
        if self.deg().map_or(true, |d| d < dd) {
            return Ok((IntPoly::zero(), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let (c, r) = rem[i].div_rem(lc);
            assert!(r.is_zero(), "divrem: leading step not divisible over Z");
            for j in 0..dd {
                let t = &div.coeffs[j] * &c;
                rem[i - dd + j] -= t;
            }
            rem[i] = BigInt::zero();
            quot[i - dd] = c;
        }
        Ok((IntPoly::new(quot), IntPoly::new(rem)))
    }

    /// Exact division; panics if the remainder is nonzero.
    pub fn div_exact(&self, div: &IntPoly) -> IntPoly {
        let (q, r) = self.divrem(div).expect("div_exact by zero");
        assert!(r.is_zero(), "div_exact: nonzero remainder");
        q
    }

    /// How often `phi` divides `self`; `self` must be nonzero.
    pub fn factor_multiplicity(&self, phi: &IntPoly) -> i64 {
        assert!(!self.is_zero(), "factor multiplicity of zero polynomial");
        let mut v = 0;
        let mut cur = self.clone();
        loop {
            match cur.divrem(phi) {
                Ok((q, r)) if r.is_zero() => {
                    v += 1;
                    cur = q;
                }
                _ => return v,
            }
        }
    }

    /// Substitute `q -> q^m`.
    pub fn subst_power(&self, m: u64) -> IntPoly {
        assert!(m >= 1);
        if self.is_zero() || m == 1 {
            return self.clone();
        }
        let m = m as usize;
        let mut coeffs = vec![BigInt::zero(); (self.coeffs.len() - 1) * m + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * m] = c.clone();
        }
        IntPoly { coeffs }
    }

    /// Sum of coefficients, i.e. the value at `q = 1`.
    pub fn eval_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Positive gcd of the coefficients; 0 for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divide out the content and make the leading coefficient positive.
    pub fn primitive(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut g = self.content();
        if self.leading().unwrap().is_negative() {
            g = -g;
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| c / &g).collect(),
        }
    }

    /// Polynomial gcd over `Z[q]` via the subresultant remainder sequence
    /// (fraction-free); result is primitive with positive leading coefficient.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() {
            return other.primitive();
        }
        if other.is_zero() {
            return self.primitive();
        }
        let content = self.content().gcd(&other.content());
        let (mut a, mut b) = if self.deg() >= other.deg() {
            (self.primitive(), other.primitive())
        } else {
            (other.primitive(), self.primitive())
        };
        let mut g = BigInt::one();
        let mut h = BigInt::one();
        loop {
            let delta = a.deg().unwrap() - b.deg().unwrap();
            let rem = pseudo_rem(&a, &b);
            if rem.is_zero() {
                break;
            }
            if rem.deg() == Some(0) {
                b = IntPoly::one();
                break;
            }
            let divisor = &g * h.pow(delta as u32);
            a = b;
            b = IntPoly {
                coeffs: rem.coeffs.iter().map(|c| c / &divisor).collect(),
            };
            g = a.leading().unwrap().clone();
            h = if delta == 0 {
                h
            } else {
                // h <- g^delta / h^(delta-1), exact by subresultant theory
                let num = g.pow(delta as u32);
                let den = h.pow(delta as u32 - 1);
                num / den
            };
        }
        b.primitive().scale(&content)
    }
}

/// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) * a  mod  b` over `Z[q]`.
fn pseudo_rem(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let db = b.deg().unwrap();
    let lc = b.leading().unwrap();
    let mut rem = a.coeffs.clone();
    let mut scale_left = a.deg().unwrap() - db + 1;
    let mut top = rem.len();
    while top > db {
        let c = rem[top - 1].clone();
        if c.is_zero() {
            top -= 1;
            continue;
        }
        for x in rem[..top - 1].iter_mut() {
            *x *= lc;
        }
        for j in 0..db {
            let t = &b.coeffs[j] * &c;
            rem[top - 1 - db + j] -= t;
        }
        rem[top - 1] = BigInt::zero();
        top -= 1;
        scale_left -= 1;
    }
    rem.truncate(top);
    let mut out = IntPoly::new(rem);
    if scale_left > 0 {
        out = out.scale(&lc.pow(scale_left as u32));
    }
    out
}

fn mul_slices(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.len().min(b.len()) < KARATSUBA_MIN {
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
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
        return out;
    }
    // Karatsuba split at half the shorter length's scale
    let half = a.len().max(b.len()) / 2;
    let (a0, a1) = split_at_most(a, half);
    let (b0, b1) = split_at_most(b, half);
    let low = mul_slices(a0, b0);
    let high = if a1.is_empty() || b1.is_empty() {
        Vec::new()
    } else {
        mul_slices(a1, b1)
    };
    let asum = add_slices(a0, a1);
    let bsum = add_slices(b0, b1);
    let mut mid = mul_slices(&asum, &bsum);
    for (i, c) in low.iter().enumerate() {
        mid[i] -= c;
    }
    for (i, c) in high.iter().enumerate() {
        mid[i] -= c;
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, c) in low.into_iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in mid.into_iter().enumerate() {
        if !c.is_zero() {
            out[i + half] += c;
        }
    }
    for (i, c) in high.into_iter().enumerate() {
        out[i + 2 * half] += c;
    }
    out
}

fn split_at_most(a: &[BigInt], at: usize) -> (&[BigInt], &[BigInt]) {
    if a.len() <= at {
        (a, &[])
    } else {
        a.split_at(at)
    }
}

fn add_slices(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut c = BigInt::zero();
        if let Some(x) = a.get(i) {
            c += x;
        }
        if let Some(y) = b.get(i) {
            c += y;
        }
        out.push(c);
    }
    out
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if i == 1 {
                        write!(f, "q")?;
                    } else {
                        write!(f, "q^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

/// Quotient of two integer polynomials; `den` is never zero and carries a
/// positive leading coefficient. `reduced` records whether `num/den` is known
/// to be in lowest terms (polynomial and content gcd both trivial).
#[derive(Clone, Debug)]
pub struct RatPoly {
    num: IntPoly,
    den: IntPoly,
    reduced: bool,
}

impl RatPoly {
    pub fn new(num: IntPoly, den: IntPoly) -> Result<Self, QdError> {
        if den.is_zero() {
            return Err(QdError::ZeroDivisor);
        }
        if num.is_zero() {
            return Ok(RatPoly {
                num: IntPoly::zero(),
                den: IntPoly::one(),
                reduced: true,
            });
        }
        let (num, den) = if den.leading().unwrap().is_negative() {
            (num.neg(), den.neg())
        } else {
            (num, den)
        };
        let reduced = den.is_one();
        Ok(RatPoly { num, den, reduced })
    }

    pub fn from_int(p: IntPoly) -> Self {
        RatPoly {
            num: p,
            den: IntPoly::one(),
            reduced: true,
        }
    }

    pub fn from_rational(x: &BigRational) -> Self {
        RatPoly::new(
            IntPoly::constant(x.numer().clone()),
            IntPoly::constant(x.denom().clone()),
        )
        .expect("rational denominator nonzero")
    }

    pub fn zero() -> Self {
        RatPoly::from_int(IntPoly::zero())
    }

    pub fn one() -> Self {
        RatPoly::from_int(IntPoly::one())
    }

    /// `q^e` for any integer `e`; negative exponents go to the denominator.
    pub fn q_power(e: i64) -> Self {
        if e >= 0 {
            RatPoly::from_int(IntPoly::monomial(BigInt::one(), e as usize))
        } else {
            RatPoly {
                num: IntPoly::one(),
                den: IntPoly::monomial(BigInt::one(), (-e) as usize),
                reduced: true,
            }
        }
    }

    pub fn num(&self) -> &IntPoly {
        &self.num
    }

    pub fn den(&self) -> &IntPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn add(&self, other: &RatPoly) -> RatPoly {
        RatPoly::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
        .expect("nonzero denominators")
    }

    pub fn sub(&self, other: &RatPoly) -> RatPoly {
        RatPoly::new(
            self.num.mul(&other.den).sub(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
        .expect("nonzero denominators")
    }

    pub fn neg(&self) -> RatPoly {
        RatPoly {
            num: self.num.neg(),
            den: self.den.clone(),
            reduced: self.reduced,
        }
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        RatPoly::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominators")
    }

    pub fn div(&self, other: &RatPoly) -> Result<RatPoly, QdError> {
        if other.is_zero() {
            return Err(QdError::ZeroDivisor);
        }
        RatPoly::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn inv(&self) -> Result<RatPoly, QdError> {
        RatPoly::one().div(self)
    }

    pub fn pow(&self, e: i64) -> Result<RatPoly, QdError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = RatPoly::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &BigRational) -> RatPoly {
        RatPoly::new(
            self.num.scale(c.numer()),
            self.den.scale(c.denom()),
        )
        .expect("nonzero denominator")
    }

    pub fn subst_power(&self, m: u64) -> RatPoly {
        RatPoly {
            num: self.num.subst_power(m),
            den: self.den.subst_power(m),
            reduced: self.reduced,
        }
    }

    /// Cancel the polynomial gcd and the common integer content.
    pub fn reduce(&self) -> RatPoly {
        if self.reduced || self.num.is_zero() {
            let mut r = self.clone();
            r.reduced = true;
            return r;
        }
        let g = self.num.gcd(&self.den);
        let (mut num, mut den) = (self.num.div_exact(&g), self.den.div_exact(&g));
        let c = num.content().gcd(&den.content());
        if !c.is_one() {
            num = IntPoly {
                coeffs: num.coeffs.iter().map(|x| x / &c).collect(),
            };
            den = IntPoly {
                coeffs: den.coeffs.iter().map(|x| x / &c).collect(),
            };
        }
        if den.leading().unwrap().is_negative() {
            num = num.neg();
            den = den.neg();
        }
        RatPoly {
            num,
            den,
            reduced: true,
        }
    }

    /// Exact value at `q = 1` after cancelling the removable `(q-1)`-power.
    ///
    /// Errors with `ZeroDivisor` if the denominator vanishes to higher order
    /// than the numerator (a genuine pole).
    pub fn limit_at_one(&self) -> Result<BigRational, QdError> {
        if self.num.is_zero() {
            return Ok(BigRational::zero());
        }
        let q_minus_one = IntPoly::from_i64(&[-1, 1]);
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        while den.eval_one().is_zero() {
            if !num.eval_one().is_zero() {
                return Err(QdError::ZeroDivisor);
            }
            num = num.div_exact(&q_minus_one);
            den = den.div_exact(&q_minus_one);
        }
        Ok(BigRational::new(num.eval_one(), den.eval_one()))
    }

    /// Structural equality as rational functions (cross-multiplied).
    pub fn equivalent(&self, other: &RatPoly) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

/// The modulus of a q-congruence: a product `prod Phi_{N_i}^{e_i}` with
/// distinct indices, kept sorted by `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicModulus {
    factors: Vec<(u64, u32)>,
}

impl CyclotomicModulus {
    pub fn new(mut factors: Vec<(u64, u32)>) -> Self {
        factors.sort_unstable();
        for w in factors.windows(2) {
            assert_ne!(w[0].0, w[1].0, "duplicate cyclotomic index {}", w[0].0);
        }
        assert!(factors.iter().all(|&(n, e)| n >= 2 && e >= 1));
        CyclotomicModulus { factors }
    }

    pub fn single(n: u64, e: u32) -> Self {
        CyclotomicModulus::new(vec![(n, e)])
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Expanded modulus polynomial (testing / display use only).
    pub fn poly(&self) -> IntPoly {
        let mut acc = IntPoly::one();
        for &(n, e) in &self.factors {
            acc = acc.mul(&cyclotomic(n).pow(e));
        }
        acc
    }
}

impl fmt::Display for CyclotomicModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for &(n, e) in &self.factors {
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            if e == 1 {
                write!(f, "Phi_{n}")?;
            } else {
                write!(f, "Phi_{n}^{e}")?;
            }
        }
        Ok(())
    }
}

/// The `n`-th cyclotomic polynomial via the Moebius product
/// `prod_{d | n} (q^d - 1)^{mu(n/d)}`, computed with exact divisions.
pub fn cyclotomic(n: u64) -> IntPoly {
    assert!(n >= 1, "cyclotomic index must be positive");
    let mut num = IntPoly::one();
    let mut den = IntPoly::one();
    for d in divisors(n) {
        match mobius(n / d) {
            1 => num = num.mul(&IntPoly::q_pow_minus_one(d)),
            -1 => den = den.mul(&IntPoly::q_pow_minus_one(d)),
            _ => {}
        }
    }
    num.div_exact(&den)
}

/// `Phi_n`-adic valuation of a nonzero rational function: multiplicity in the
/// numerator minus multiplicity in the denominator, counted by trial
/// division (well defined without reducing the fraction).
///
/// # Panics
///
/// Panics when `f` is zero; the callers treat zero separately (its valuation
/// is `+infinity`).
pub fn phi_valuation(f: &RatPoly, n: u64) -> i64 {
    assert!(!f.is_zero(), "phi_valuation of the zero function");
    let phi = cyclotomic(n);
    f.num().factor_multiplicity(&phi) - f.den().factor_multiplicity(&phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn qp(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_i64(coeffs)
    }

    #[test]
    fn divrem_example() {
        // (q^4 - 1) / (q^2 + 1) = q^2 - 1 rem 0
        let (q, r) = qp(&[-1, 0, 0, 0, 1]).divrem(&qp(&[1, 0, 1])).unwrap();
        assert_eq!(q, qp(&[-1, 0, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn divrem_zero_divisor() {
        assert!(matches!(
            qp(&[1, 1]).divrem(&IntPoly::zero()),
            Err(QdError::ZeroDivisor)
        ));
    }

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic(1), qp(&[-1, 1]));
        assert_eq!(cyclotomic(2), qp(&[1, 1]));
        assert_eq!(cyclotomic(3), qp(&[1, 1, 1]));
        assert_eq!(cyclotomic(4), qp(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), qp(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), qp(&[1, 0, -1, 0, 1]));
        // first index with a coefficient other than 0, +-1
        assert_eq!(cyclotomic(105).coeff(7), BigInt::from(-2));
    }

    #[test]
    fn cyclotomic_degree_is_totient() {
        for n in [5, 9, 13, 25, 81, 169, 200] {
            assert_eq!(
                cyclotomic(n).deg().unwrap() as u64,
                crate::arith::euler_phi(n),
                "deg Phi_{n}"
            );
        }
    }

    #[test]
    fn cyclotomic_product_identity_small() {
        for m in 1..=40u64 {
            let mut prod = IntPoly::one();
            for d in crate::arith::divisors(m) {
                prod = prod.mul(&cyclotomic(d));
            }
            assert_eq!(prod, IntPoly::q_pow_minus_one(m), "prod over d | {m}");
        }
    }

    #[test]
    fn subst_power_factors() {
        // 5 divides 5, so Phi_5(q^5) is exactly Phi_25
        assert_eq!(cyclotomic(5).subst_power(5), cyclotomic(25));
        // 2 does not divide 3: Phi_3(q^2) = Phi_6 * Phi_3
        assert_eq!(
            cyclotomic(3).subst_power(2),
            cyclotomic(6).mul(&cyclotomic(3))
        );
    }

    #[test]
    fn phi_valuation_example() {
        // (q^4 + 2q^3 + 3q^2 + 2q + 1) / (q^2 (1+q)^2) = Phi_3^2 / (q^2 (1+q)^2)
        let f = RatPoly::new(qp(&[1, 2, 3, 2, 1]), qp(&[0, 0, 1, 2, 1])).unwrap();
        assert_eq!(phi_valuation(&f, 3), 2);
        assert_eq!(phi_valuation(&f, 2), -2);
        assert_eq!(phi_valuation(&f, 5), 0);
    }

    #[test]
    fn gcd_structured() {
        let a = cyclotomic(3).mul(&cyclotomic(4)).mul(&qp(&[-2, 1]));
        let b = cyclotomic(3).mul(&qp(&[-2, 1]).pow(2)).scale(&BigInt::from(6));
        let g = a.gcd(&b);
        assert_eq!(g, cyclotomic(3).mul(&qp(&[-2, 1])));
    }

    #[test]
    fn ratpoly_reduce() {
        let f = RatPoly::new(qp(&[-1, 0, 1]), qp(&[-1, 1])).unwrap(); // (q^2-1)/(q-1)
        let r = f.reduce();
        assert!(r.is_reduced());
        assert_eq!(r.num(), &qp(&[1, 1]));
        assert!(r.den().is_one());
    }

    #[test]
    fn limit_at_one_cancels() {
        // (1-q^3)(1-q^2) / (1-q)^2 -> 6 at q=1
        let num = IntPoly::q_pow_minus_one(3).mul(&IntPoly::q_pow_minus_one(2));
        let den = IntPoly::q_pow_minus_one(1).pow(2);
        let f = RatPoly::new(num, den).unwrap();
        assert_eq!(f.limit_at_one().unwrap(), BigRational::from_integer(6.into()));
    }

    #[test]
    fn limit_at_one_detects_pole() {
        let f = RatPoly::new(IntPoly::one(), IntPoly::q_pow_minus_one(2)).unwrap();
        assert!(f.limit_at_one().is_err());
    }

    #[test]
    fn modulus_display() {
        let m = CyclotomicModulus::new(vec![(25, 2), (5, 1)]);
        assert_eq!(m.to_string(), "Phi_5 * Phi_25^2");
        assert_eq!(m.poly().deg().unwrap(), 4 + 40);
    }

    fn small_poly() -> impl Strategy<Value = IntPoly> {
        proptest::collection::vec(-9i64..=9, 0..6).prop_map(|v| IntPoly::from_i64(&v))
    }

    fn small_nonzero_poly() -> impl Strategy<Value = IntPoly> {
        small_poly().prop_filter("nonzero", |p| !p.is_zero())
    }

    proptest! {
        #[test]
        fn mul_matches_schoolbook_on_large(a in proptest::collection::vec(-50i64..=50, 40..70),
                                           b in proptest::collection::vec(-50i64..=50, 40..70)) {
            // exercise the Karatsuba path against the direct definition
            let pa = IntPoly::from_i64(&a);
            let pb = IntPoly::from_i64(&b);
            let fast = pa.mul(&pb);
            let mut slow = vec![BigInt::zero(); a.len() + b.len()];
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    slow[i + j] += BigInt::from(x) * BigInt::from(y);
                }
            }
            prop_assert_eq!(fast, IntPoly::new(slow));
        }

        #[test]
        fn divrem_roundtrip_monic(a in small_poly(), b_low in small_poly()) {
            let mut coeffs: Vec<BigInt> = b_low.coeffs().to_vec();
            coeffs.push(BigInt::one());
            let b = IntPoly::new(coeffs);
            let (q, r) = a.divrem(&b).unwrap();
            prop_assert_eq!(q.mul(&b).add(&r), a.clone());
            prop_assert!(r.deg().map_or(true, |d| d < b.deg().unwrap()));
        }

        #[test]
        fn valuation_additive(a in small_nonzero_poly(), b in small_nonzero_poly(),
                              i in 0u32..3, j in 0u32..3) {
            let phi = cyclotomic(3);
            let fa = a.mul(&phi.pow(i));
            let fb = b.mul(&phi.pow(j));
            let f = RatPoly::new(fa.clone(), fb.clone()).unwrap();
            let va = fa.factor_multiplicity(&phi);
            let vb = fb.factor_multiplicity(&phi);
            prop_assert_eq!(phi_valuation(&f, 3), va - vb);
        }

        #[test]
        fn gcd_divides_both_and_common_factor(a in small_nonzero_poly(),
                                              b in small_nonzero_poly(),
                                              c in small_nonzero_poly()) {
            let x = a.mul(&c);
            let y = b.mul(&c);
            let g = x.gcd(&y);
            let (_, r1) = x.divrem(&g).unwrap();
            prop_assert!(r1.is_zero(), "gcd must divide the first argument");
            let (_, r2) = y.divrem(&g).unwrap();
            prop_assert!(r2.is_zero(), "gcd must divide the second argument");
            let (_, r3) = g.divrem(&c.primitive()).unwrap();
            prop_assert!(r3.is_zero(), "gcd must contain the planted common factor");
        }
    }
}
