//! Small integer number theory: factorization, divisors, Moebius, totient.
//!
//! Arguments stay in `u64` range; everything here is trial division on
//! desk-scale inputs (cyclotomic indices, prime powers).

/// Prime factorization as `(prime, multiplicity)` pairs, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factorize(0)");
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let prev = divs.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            divs.extend(prev.iter().map(|d| d * pk));
        }
    }
    divs.sort_unstable();
    divs
}

/// Moebius function; 0 when `n` has a square factor.
pub fn mobius(n: u64) -> i32 {
    let fac = factorize(n);
    if fac.iter().any(|&(_, e)| e > 1) {
        return 0;
    }
    if fac.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Euler totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut phi = n;
    for (p, _) in factorize(n) {
        phi = phi / p * (p - 1);
    }
    phi
}

/// `true` when `n` is prime. `n = 0, 1` are not.
pub fn is_prime(n: u64) -> bool {
    n > 1 && factorize(n).len() == 1 && factorize(n)[0].1 == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_small() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(12), vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(169), vec![(13, 2)]);
        assert_eq!(factorize(97), vec![(97, 1)]);
    }

    #[test]
    fn divisors_of_12() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn mobius_values() {
        let expect = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1];
        for (i, &m) in expect.iter().enumerate() {
            assert_eq!(mobius(i as u64 + 1), m, "mu({})", i + 1);
        }
    }

    #[test]
    fn phi_values() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(13), 12);
        assert_eq!(euler_phi(169), 156);
        assert_eq!(euler_phi(81), 54);
        assert_eq!(euler_phi(100), 40);
    }

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(13));
        assert!(!is_prime(1));
        assert!(!is_prime(169));
    }
}
