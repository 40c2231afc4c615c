//! Acceptance grid: one test per criterion, each printing a PASS line once
//! its whole grid has been checked. Every congruence here is decided in
//! exact arithmetic; a single missed valuation fails the criterion.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qdwork_core::padic::{
    dwork_check, gamma_identities_check, gamma_p, theorem12_check, verify_super, DworkSeries,
};
use qdwork_core::polyring::{cyclotomic, IntPoly};
use qdwork_core::qcomb::{neg_poch_reduction_check, q_lucas_check};
use qdwork_core::report::{FactorRecord, VerificationReport};
use qdwork_core::statements::{all_q_ids, modulus_of, verify_q, Engine, QParams, VerifyOptions};
use qdwork_core::summand::ClassicalFamily;
use qdwork_core::sweep::{parse_sweep_config, run_sweep};
use qdwork_core::ExecMode;

fn q_factor(f: &FactorRecord) -> (u64, u32, Option<i64>, bool) {
    match f {
        FactorRecord::Q {
            n,
            e,
            achieved,
            pass,
            ..
        } => (*n, *e, *achieved, *pass),
        FactorRecord::P { .. } => panic!("expected a cyclotomic factor"),
    }
}

/// Run one q-instance under the localization engine and require every factor
/// of the declared modulus to pass.
fn assert_q_passes(id: &str, params: &QParams) -> VerificationReport {
    let rep = verify_q(id, params, &VerifyOptions::default())
        .unwrap_or_else(|e| panic!("{id} {params:?}: {e}"));
    let declared = modulus_of(id, params).unwrap();
    let got: Vec<(u64, u32)> = rep
        .factors
        .iter()
        .map(|f| {
            let (n, e, _, _) = q_factor(f);
            (n, e)
        })
        .collect();
    assert_eq!(got, declared, "{id} {params:?}: factor shape");
    assert!(rep.pass, "{id} {params:?}: {:?}", rep.factors);
    rep
}

fn tower_grid(id: &str, ns: &[u64], rs: &[u32], ds: &[u64]) -> usize {
    let mut count = 0;
    for &n in ns {
        for &r in rs {
            for &d in ds {
                let params = QParams {
                    n,
                    r,
                    d,
                    ..QParams::n(n)
                };
                assert_q_passes(id, &params);
                count += 1;
            }
        }
    }
    count
}

#[test]
fn criterion_01_main_tower_descent() {
    let count = tower_grid("Q-MAIN1", &[5, 9, 13], &[1, 2], &[1, 2]);
    // the r = 2 modulus is Phi_n * Phi_{n^2}^2, checked inside assert_q_passes
    println!("ACCEPTANCE 01 PASS: Q-MAIN1 on {count} instances");
}

#[test]
fn criterion_02_main_tower_descent_squared_variant() {
    let count = tower_grid("Q-MAIN3", &[5, 9, 13], &[1, 2], &[1, 2]);
    println!("ACCEPTANCE 02 PASS: Q-MAIN3 on {count} instances");
}

#[test]
fn criterion_03_gamma_ratio_tower() {
    for p in [5u64, 13] {
        for r in 1..=3u32 {
            let rep = theorem12_check(p, r).unwrap();
            assert!(rep.pass, "p={p} r={r}: {:?}", rep.factors);
        }
    }
    // smallest instance pins the value: both sides are 19 mod 25
    let g = gamma_p(&BigRational::new(BigInt::from(1), BigInt::from(4)), 5, 2).unwrap();
    let minus_g4 = g.pow(4).neg();
    assert_eq!(minus_g4.residue(2), Some(BigInt::from(19)));
    println!("ACCEPTANCE 03 PASS: P-T12 on {{5,13}} x r<=3, value 19 mod 25 at (5,1)");
}

#[test]
fn criterion_04_descent_pair_with_informational_strength() {
    for id in ["P-DIS1", "P-DIS2"] {
        for p in [5u64, 13] {
            for r in 1..=3u32 {
                let rep = verify_super(id, p, r).unwrap();
                assert!(rep.pass, "{id} p={p} r={r}: {:?}", rep.factors);
                let has_info = rep.factors.iter().any(|f| {
                    matches!(f, FactorRecord::P { informational, .. } if *informational)
                });
                if id == "P-DIS2" && p == 13 && r == 3 {
                    // conjectured 13^9 strength sits over the precision cap
                    assert!(!has_info);
                    assert!(rep.note.as_deref().unwrap_or("").contains("skipped"));
                } else {
                    assert!(has_info, "{id} p={p} r={r}: informational factor missing");
                }
            }
        }
    }
    println!("ACCEPTANCE 04 PASS: P-DIS1/P-DIS2 gates on {{5,13}} x r<=3, conjectured strengths recorded");
}

#[test]
fn criterion_05_scaled_tower_theorems() {
    let mut count = 0;
    count += tower_grid("Q-T51", &[3, 5, 7, 9, 13], &[1, 2], &[1, 2]);
    count += tower_grid("Q-T52", &[5, 9, 13], &[1, 2], &[1, 2]);
    count += tower_grid("Q-T53a", &[3, 5, 7, 9, 13], &[1, 2], &[1, 2]);
    count += tower_grid("Q-T53b", &[2, 3, 4, 5, 7, 9, 13], &[1, 2], &[1]);
    count += tower_grid("Q-T53b", &[3, 5, 7, 9, 13], &[1, 2], &[2]);
    println!("ACCEPTANCE 05 PASS: Q-T51/Q-T52/Q-T53a/Q-T53b on {count} instances");
}

#[test]
fn criterion_06_base_congruences_and_lemmas() {
    let cfg = parse_sweep_config(
        "statements = Q-H2A, Q-H2B, Q-LEM22, Q-EQUIV, Q-LEM23, Q-DIFF, Q-GPZ, Q-GAUSS, \
         Q-TAU, Q-LP, Q-PF11, Q-PF22, Q-PF33, Q-PF44, Q-OLD1, Q-OLD2, Q-REASON\n\
         q.n = 2,3,4,5,6,7,8,9,10,11,12,13\n\
         q.rmax = 2\n\
         q.m = 1,2,3\n",
    )
    .unwrap();
    let outcome = run_sweep(&cfg, ExecMode::Parallel).unwrap();
    assert!(outcome.errors.is_empty(), "{:?}", outcome.errors);
    assert!(
        outcome.proven_failures.is_empty(),
        "{:?}",
        outcome.proven_failures
    );
    assert!(outcome.reports.iter().all(|r| r.pass));
    println!(
        "ACCEPTANCE 06 PASS: 17 base statements on {} instances (n <= 13, m <= 3)",
        outcome.reports.len()
    );
}

#[test]
fn criterion_07_classical_supercongruences() {
    let mut count = 0;
    let mut run = |id: &str, p: u64, r: u32| {
        let rep = verify_super(id, p, r).unwrap_or_else(|e| panic!("{id} p={p} r={r}: {e}"));
        assert!(rep.pass, "{id} p={p} r={r}: {:?}", rep.factors);
        count += 1;
    };
    for p in [3u64, 5, 7, 11, 13, 17] {
        run("P-H2", p, 1);
    }
    for p in [3u64, 5, 7, 11, 13] {
        run("P-RV", p, 1);
        run("P-H2LIU", p, 1);
    }
    for p in [5u64, 7, 11, 13] {
        run("P-J2", p, 1);
    }
    for (p, r) in [(5u64, 1u32), (5, 2), (7, 1), (11, 1), (13, 1)] {
        run("P-J3", p, r);
    }
    for (p, r) in [(3u64, 2u32), (3, 3), (7, 2)] {
        run("P-H3b", p, r);
    }
    for p in [3u64, 5, 7] {
        for r in [1u32, 2] {
            run("P-SUN55", p, r);
            run("P-SUN66", p, r);
        }
    }
    for r in [1u32, 2] {
        run("P-SUN66", 2, r);
    }
    println!("ACCEPTANCE 07 PASS: classical supercongruence grid, {count} instances");
}

#[test]
fn criterion_08_dwork_quotient_congruence() {
    let points = [(3u64, 1u32), (3, 2), (3, 3), (5, 1), (5, 2)];
    for (p, r) in points {
        let rep = dwork_check(&DworkSeries::new(ClassicalFamily::H), p, r, None).unwrap();
        assert!(rep.pass, "H p={p} r={r}: {:?}", rep.factors);
        match &rep.factors[0] {
            FactorRecord::P {
                target_exponent, ..
            } => assert_eq!(*target_exponent, r),
            _ => panic!(),
        }
        // constant coefficients: the quotient telescopes identically
        let one = dwork_check(&DworkSeries::new(ClassicalFamily::One), p, r, None).unwrap();
        assert!(one.pass);
        match &one.factors[0] {
            FactorRecord::P {
                achieved_valuation,
                achieved_floor,
                ..
            } => assert_eq!((achieved_valuation, achieved_floor), (&None, &None)),
            _ => panic!(),
        }
    }
    println!("ACCEPTANCE 08 PASS: Dwork quotient for H at 5 points, constant family exact");
}

#[test]
fn criterion_09_engine_equivalence() {
    let mut instances = 0;
    for id in all_q_ids() {
        for n in [3u64, 5] {
            for d in [1u64, 2] {
                for m in [1u64, 2, 3] {
                    let params = QParams {
                        n,
                        r: 1,
                        d,
                        m,
                        s: 1,
                        k: m,
                    };
                    if modulus_of(id, &params).is_err() {
                        continue; // residue or shape constraint
                    }
                    let local = verify_q(
                        id,
                        &params,
                        &VerifyOptions {
                            engine: Engine::Local,
                            ..VerifyOptions::default()
                        },
                    )
                    .unwrap();
                    let dense = verify_q(
                        id,
                        &params,
                        &VerifyOptions {
                            engine: Engine::Dense,
                            ..VerifyOptions::default()
                        },
                    )
                    .unwrap();
                    assert_eq!(local.factors.len(), dense.factors.len(), "{id} {params:?}");
                    for (lf, df) in local.factors.iter().zip(&dense.factors) {
                        let (ln, le, la, lp) = q_factor(lf);
                        let (dn, de, da, dp) = q_factor(df);
                        assert_eq!((ln, le, lp), (dn, de, dp), "{id} {params:?}");
                        assert_eq!(la, da, "{id} {params:?}: achieved valuation");
                    }
                    assert_eq!(local.pass, dense.pass, "{id} {params:?}");
                    instances += 1;
                }
            }
        }
    }
    assert!(instances > 50, "grid unexpectedly small: {instances}");
    println!("ACCEPTANCE 09 PASS: engines agree on {instances} instances at n in {{3,5}}, r = 1");
}

#[test]
fn criterion_10_property_suites() {
    // cyclotomic factorization of q^m - 1
    for m in 1..=200u64 {
        let mut prod = IntPoly::one();
        for d in 1..=m {
            if m % d == 0 {
                prod = prod.mul(&cyclotomic(d));
            }
        }
        assert_eq!(prod, IntPoly::q_pow_minus_one(m), "m = {m}");
    }

    // q-binomial digit factorization, randomized
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_ac5e);
    for _ in 0..500 {
        let n = rng.gen_range(3..=12u64);
        let a = rng.gen_range(0..=3u64);
        let r = rng.gen_range(0..=3u64);
        let b = rng.gen_range(0..n);
        let s = rng.gen_range(0..n);
        assert!(q_lucas_check(n, a, b, r, s), "n={n} a={a} b={b} r={r} s={s}");
    }

    // negative-index Pochhammer reduction, randomized
    for _ in 0..200 {
        let n = [3u64, 5, 7, 9, 11, 13][rng.gen_range(0..6)];
        let r = rng.gen_range(1..=2u64);
        let s = rng.gen_range(0..n);
        assert!(neg_poch_reduction_check(n, r, s), "n={n} r={r} s={s}");
    }

    // single-term classical matching on its grid
    for n in [3u64, 5, 7, 9, 11, 13] {
        for k in 0..=3u64 {
            let params = QParams { k, ..QParams::n(n) };
            assert_q_passes("Q-REASON", &params);
        }
    }

    // Gamma identity battery: shift, reflection, linearity, quarter product
    for p in [3u64, 5, 7, 13] {
        let rep = gamma_identities_check(p, 2).unwrap();
        assert!(rep.pass, "p = {p}: {:?}", rep.factors);
    }
    // stability: extra working precision never changes settled digits
    for p in [3u64, 5, 7, 13] {
        for (num, den) in [(1i64, 4i64), (3, 4), (1, 2), (2, 3), (7, 1)] {
            let x = BigRational::new(BigInt::from(num), BigInt::from(den));
            if den % p as i64 == 0 {
                continue;
            }
            let lo = gamma_p(&x, p, 4).unwrap();
            let hi = gamma_p(&x, p, 6).unwrap();
            assert_eq!(lo.residue(4), hi.residue(4), "p={p} x={num}/{den}");
        }
    }
    println!("ACCEPTANCE 10 PASS: cyclotomic, q-Lucas (500), reduction (200), single-term grid, Gamma suite");
}

#[test]
fn criterion_11_conjecture_ledger() {
    let cfg = parse_sweep_config(
        "statements = all-conjecture\n\
         q.n = 2,3,4,5,6,7,8,9,10,11,12,13\n\
         q.rmax = 2\n\
         q.m = 1,2,3\n\
         p.p = 5,13\n\
         p.rmax = 2\n",
    )
    .unwrap();
    let outcome = run_sweep(&cfg, ExecMode::Parallel).unwrap();
    assert!(outcome.errors.is_empty(), "{:?}", outcome.errors);
    assert!(!outcome.reports.is_empty());
    for want in [
        "C-61", "C-62", "C-63", "C-64", "C-65", "C-66", "C-67", "C-68", "C-MAIN1-STRONG",
    ] {
        assert!(
            outcome.reports.iter().any(|r| r.id == want),
            "{want} missing from the grid"
        );
    }
    // every verdict is recorded with at least one factor
    assert!(outcome.reports.iter().all(|r| !r.factors.is_empty()));
    // falsifications may exist, but they surface without gating
    assert_eq!(outcome.exit_code(), 0);
    assert!(outcome.proven_failures.is_empty());
    if !outcome.conjecture_failures.is_empty() {
        assert!(outcome
            .summary_lines()
            .iter()
            .any(|l| l.starts_with("CONJECTURE FALSIFIED")));
    }
    println!(
        "ACCEPTANCE 11 PASS: conjecture ledger evaluated on {} instances, {} falsified",
        outcome.reports.len(),
        outcome.conjecture_failures.len()
    );
}
