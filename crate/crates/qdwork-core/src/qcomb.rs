//! q-combinatorics: q-integers, q-Pochhammer symbols, Gaussian binomial
//! coefficients, the Kronecker symbol, and reduction checks modulo `Phi_n`.
//!
//! Conventions: `[n]_{q^m} = 1 + q^m + ... + q^{m(n-1)}`, and the Pochhammer
//! factor family `(sign * q^a; q^c)_count` expands to
//! `prod_{j=0}^{count-1} (1 - sign * q^(a + c j))`.

use num_bigint::BigInt;
use num_traits::One;

use crate::polyring::{cyclotomic, IntPoly, RatPoly};

/// Parameters of one Pochhammer factor `(sign * q^offset; q^step)^exponent`.
///
/// The running count is supplied at evaluation time (summands use `mu * k`,
/// prefactors use fixed truncation lengths). A negative `exponent` places the
/// expanded product in the denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PochFactorSpec {
    pub sign: i8,
    pub offset: u64,
    pub step: u64,
    pub exponent: i32,
}

impl PochFactorSpec {
    pub const fn new(sign: i8, offset: u64, step: u64, exponent: i32) -> Self {
        PochFactorSpec {
            sign,
            offset,
            step,
            exponent,
        }
    }

    /// Substitute `q -> q^m`: all exponents scale by `m`.
    pub fn scaled(&self, m: u64) -> Self {
        PochFactorSpec {
            sign: self.sign,
            offset: self.offset * m,
            step: self.step * m,
            exponent: self.exponent,
        }
    }
}

/// `[n]_{q^m}`; zero for `n = 0`.
pub fn q_integer(n: u64, m: u64) -> IntPoly {
    assert!(m >= 1);
    let mut coeffs = vec![BigInt::from(0); ((n.max(1) - 1) * m + 1) as usize];
    if n == 0 {
        return IntPoly::zero();
    }
    for i in 0..n {
        coeffs[(i * m) as usize] = BigInt::one();
    }
    IntPoly::new(coeffs)
}

/// Expanded product `prod_{j < count} (1 - sign * q^(a + c j))`.
pub fn poch_poly(sign: i8, offset: u64, step: u64, count: u64) -> IntPoly {
    let mut acc = IntPoly::one();
    for j in 0..count {
        acc = acc.mul(&IntPoly::one_minus_sign_q(sign, offset + step * j));
    }
    acc
}

/// Pochhammer factor with its exponent applied, as a rational function.
pub fn q_pochhammer(spec: &PochFactorSpec, count: u64) -> RatPoly {
    let base = poch_poly(spec.sign, spec.offset, spec.step, count);
    let p = base.pow(spec.exponent.unsigned_abs());
    if spec.exponent >= 0 {
        RatPoly::from_int(p)
    } else {
        RatPoly::new(IntPoly::one(), p).expect("pochhammer base vanishes only at offset 0 with sign +1")
    }
}

/// Gaussian binomial `[m, k]` in the base `q^t`, via the Pascal recurrence
/// `[M, K] = [M-1, K-1] + q^K [M-1, K]`.
pub fn q_binomial(m: u64, k: u64, t: u64) -> IntPoly {
    assert!(t >= 1);
    if k > m {
        return IntPoly::zero();
    }
    let kk = k as usize;
    let mut row: Vec<IntPoly> = vec![IntPoly::one()];
    for mm in 1..=m {
        let cols = (mm.min(k) + 1) as usize;
        let mut next = Vec::with_capacity(cols);
        for j in 0..cols {
            let up_left = if j == 0 {
                IntPoly::zero()
            } else {
                row[j - 1].clone()
            };
            let up = if j < row.len() {
                row[j].shift(j)
            } else {
                IntPoly::zero()
            };
            next.push(up_left.add(&up));
        }
        row = next;
    }
    row[kk].subst_power(t)
}

/// Full Kronecker symbol `(a | b)` for arbitrary integers, extending the
/// Jacobi symbol by `(a | 2)` (0 for even `a`, +1 for `a = +-1 mod 8`,
/// -1 for `a = +-3 mod 8`), `(a | -1) = sign(a)`, and `(a | 0) = [|a| = 1]`.
pub fn kronecker(a0: i64, b0: i64) -> i32 {
    fn tab2(x: i128) -> i32 {
        match x.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        }
    }
    let (mut a, mut b) = (a0 as i128, b0 as i128);
    if b == 0 {
        return i32::from(a == 1 || a == -1);
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    let mut k = 1i32;
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    let mut v = 0u32;
    while b % 2 == 0 {
        b /= 2;
        v += 1;
    }
    if v % 2 == 1 {
        k *= tab2(a);
    }
    a = a.rem_euclid(b);
    while a != 0 {
        let mut v = 0u32;
        while a % 2 == 0 {
            a /= 2;
            v += 1;
        }
        if v % 2 == 1 {
            k *= tab2(b);
        }
        if a % 4 == 3 && b % 4 == 3 {
            k = -k;
        }
        let t = b % a;
        b = a;
        a = t;
    }
    if b > 1 {
        0
    } else {
        k
    }
}

/// Gaussian binomial `[m, k]_q` reduced modulo `Phi_n`, computed by the
/// Pascal recurrence directly on residues (`q^n = 1` keeps shifts short).
fn q_binomial_mod_phi(m: u64, k: u64, n: u64, phi: &IntPoly) -> IntPoly {
    if k > m {
        return IntPoly::zero();
    }
    let reduce = |p: IntPoly| -> IntPoly { p.divrem(phi).expect("Phi_n nonzero").1 };
    let mut row: Vec<IntPoly> = vec![IntPoly::one()];
    for mm in 1..=m {
        let cols = (mm.min(k) + 1) as usize;
        let mut next = Vec::with_capacity(cols);
        for j in 0..cols {
            let up_left = if j == 0 {
                IntPoly::zero()
            } else {
                row[j - 1].clone()
            };
            let up = if j < row.len() {
                reduce(row[j].shift(j % n as usize))
            } else {
                IntPoly::zero()
            };
            next.push(up_left.add(&up));
        }
        row = next;
    }
    row[k as usize].clone()
}

/// Check the q-Lucas reduction
/// `[a n + b, r n + s]_q = binom(a, r) * [b, s]_q (mod Phi_n)`
/// for digits `b, s < n`. The left side is computed by the Pascal recurrence
/// on residues, independent of the identity under test.
pub fn q_lucas_check(n: u64, a: u64, b: u64, r: u64, s: u64) -> bool {
    assert!(n >= 2, "need a cyclotomic index of at least 2");
    assert!(b < n && s < n, "digits must already be reduced");
    let phi = cyclotomic(n);
    let lhs = q_binomial_mod_phi(a * n + b, r * n + s, n, &phi);
    let c = binomial_int(a, r);
    let rhs = q_binomial(b, s, 1).scale(&c).divrem(&phi).expect("Phi_n nonzero").1;
    lhs == rhs
}

/// Check the reduction `(-q; q)_{r n + s} = 2^r * (-q; q)_s (mod Phi_n)`
/// for odd `n`, multiplying factors incrementally with short residues.
pub fn neg_poch_reduction_check(n: u64, r: u64, s: u64) -> bool {
    assert!(n >= 3 && n % 2 == 1 && s < n);
    let phi = cyclotomic(n);
    let reduce = |p: IntPoly| -> IntPoly { p.divrem(&phi).expect("Phi_n nonzero").1 };
    let mut acc = IntPoly::one();
    for j in 1..=(r * n + s) {
        acc = reduce(acc.mul(&IntPoly::one_minus_sign_q(-1, j % n)));
    }
    let mut small = IntPoly::constant(BigInt::from(2).pow(r as u32));
    for j in 1..=s {
        small = small.mul(&IntPoly::one_minus_sign_q(-1, j));
    }
    acc == reduce(small)
}

/// Ordinary binomial coefficient as a `BigInt` (zero when `k > n`).
pub fn binomial_int(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let mut acc = BigInt::one();
    for i in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};

    #[test]
    fn q_integer_values() {
        assert!(q_integer(0, 1).is_zero());
        assert_eq!(q_integer(1, 1), IntPoly::one());
        assert_eq!(q_integer(3, 1), IntPoly::from_i64(&[1, 1, 1]));
        assert_eq!(q_integer(3, 2), IntPoly::from_i64(&[1, 0, 1, 0, 1]));
        assert_eq!(q_integer(7, 1).eval_one(), BigInt::from(7));
    }

    #[test]
    fn poch_products() {
        // (q; q^2)_2 = (1-q)(1-q^3)
        assert_eq!(
            poch_poly(1, 1, 2, 2),
            IntPoly::from_i64(&[1, -1]).mul(&IntPoly::from_i64(&[1, 0, 0, -1]))
        );
        // (-q; q)_3 = (1+q)(1+q^2)(1+q^3)
        let expect = IntPoly::from_i64(&[1, 1])
            .mul(&IntPoly::from_i64(&[1, 0, 1]))
            .mul(&IntPoly::from_i64(&[1, 0, 0, 1]));
        assert_eq!(poch_poly(-1, 1, 1, 3), expect);
        assert_eq!(poch_poly(1, 1, 1, 0), IntPoly::one());
    }

    #[test]
    fn q_pochhammer_negative_exponent() {
        let spec = PochFactorSpec::new(1, 2, 2, -2);
        let f = q_pochhammer(&spec, 1);
        assert!(f.num().is_one());
        assert_eq!(f.den(), &IntPoly::from_i64(&[1, 0, -1]).pow(2));
    }

    #[test]
    fn q_binomial_frozen() {
        assert_eq!(q_binomial(4, 2, 1), IntPoly::from_i64(&[1, 1, 2, 1, 1]));
        assert_eq!(q_binomial(3, 5, 1), IntPoly::zero());
        assert_eq!(q_binomial(5, 0, 1), IntPoly::one());
    }

    #[test]
    fn q_binomial_specializes_to_binomial() {
        for m in 0..=12u64 {
            for k in 0..=m {
                assert_eq!(
                    q_binomial(m, k, 1).eval_one(),
                    binomial_int(m, k),
                    "[{m},{k}] at q=1"
                );
            }
        }
    }

    #[test]
    fn q_binomial_symmetric_and_positive() {
        for m in 1..=10u64 {
            for k in 0..=m {
                let a = q_binomial(m, k, 1);
                assert_eq!(a, q_binomial(m, m - k, 1));
                assert!(a.coeffs().iter().all(|c| c >= &BigInt::zero()));
            }
        }
    }

    #[test]
    fn q_binomial_base_change() {
        assert_eq!(q_binomial(6, 3, 2), q_binomial(6, 3, 1).subst_power(2));
    }

    #[test]
    fn kronecker_odd_primes_match_euler_criterion() {
        for p in [3i64, 5, 7, 11, 13, 17] {
            for a in -25..=25i64 {
                let e = ((p - 1) / 2) as u32;
                let pow = BigInt::from(a.rem_euclid(p)).modpow(&BigInt::from(e), &BigInt::from(p));
                let expect = if pow.is_zero() {
                    0
                } else if pow == BigInt::one() {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(a, p), expect, "({a}|{p})");
            }
        }
    }

    #[test]
    fn kronecker_even_and_edge_cases() {
        assert_eq!(kronecker(-3, 5), -1);
        assert_eq!(kronecker(-2, 7), -1);
        assert_eq!(kronecker(-3, 9), 0);
        assert_eq!(kronecker(-3, 2), -1); // -3 = 5 mod 8
        assert_eq!(kronecker(-3, 4), 1);
        assert_eq!(kronecker(7, 8), 1);
        assert_eq!(kronecker(3, 8), -1);
        assert_eq!(kronecker(5, 0), 0);
        assert_eq!(kronecker(-1, 0), 1);
        assert_eq!(kronecker(0, 3), 0);
        assert_eq!(kronecker(0, 1), 1);
        assert_eq!(kronecker(-3, -5), 1);
        assert_eq!(kronecker(10, 6), 0);
    }

    #[test]
    fn kronecker_multiplicative_in_bottom() {
        for a in [-7i64, -3, -1, 2, 5, 9] {
            for b in 1..=12i64 {
                for c in 1..=12i64 {
                    if (a % 2 == 0 && (b * c) % 2 == 0) || (a % 2 == 0 && (b % 2 == 0 || c % 2 == 0)) {
                        continue;
                    }
                    assert_eq!(
                        kronecker(a, b * c),
                        kronecker(a, b) * kronecker(a, c),
                        "({a}|{b}*{c})"
                    );
                }
            }
        }
    }

    #[test]
    fn q_lucas_frozen_cases() {
        // [4,1] mod Phi_3: 1+q+q^2+q^3 = Phi_3 + (1+q^3), and q^3 = 1
        assert!(q_lucas_check(3, 1, 1, 0, 1));
        // [10,5] mod Phi_5 should be binom(2,1) = 2
        assert!(q_lucas_check(5, 2, 0, 1, 0));
    }

    #[test]
    fn q_lucas_randomized_small() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x9d2c5680);
        for _ in 0..60 {
            let n = rng.gen_range(3..=12u64);
            let a = rng.gen_range(0..=3u64);
            let r = rng.gen_range(0..=3u64);
            let b = rng.gen_range(0..n);
            let s = rng.gen_range(0..n);
            assert!(q_lucas_check(n, a, b, r, s), "n={n} a={a} b={b} r={r} s={s}");
        }
    }

    #[test]
    fn neg_poch_reduction_examples() {
        for (n, r, s) in [(3, 1, 0), (3, 2, 2), (5, 1, 3), (7, 2, 0), (9, 1, 4), (13, 2, 5)] {
            assert!(neg_poch_reduction_check(n, r, s), "n={n} r={r} s={s}");
        }
    }

    #[test]
    fn binomial_int_values() {
        assert_eq!(binomial_int(6, 3), BigInt::from(20));
        assert_eq!(binomial_int(5, 7), BigInt::zero());
        assert_eq!(binomial_int(0, 0), BigInt::one());
    }
}
