//! Every catalog statement at its smallest valid instance, on both engines.
//!
//! Conjectures are numerical claims too: at desk scale they must hold, so the
//! smoke test asserts pass for all 32 ids and exact agreement of the achieved
//! valuations between the dense oracle and the localization engine.

use qdwork_core::report::FactorRecord;
use qdwork_core::statements::{all_q_ids, verify_q, Engine, QParams, VerifyOptions};

fn smallest_params(id: &str) -> QParams {
    let one_mod4 = QParams::n(5);
    let odd = QParams::n(3);
    match id {
        "Q-MAIN1" | "Q-MAIN3" | "C-MAIN1-STRONG" => QParams { r: 1, d: 1, ..one_mod4 },
        "Q-T51" | "Q-T53a" => QParams { r: 1, d: 1, ..odd },
        "Q-T52" => QParams { r: 1, d: 1, ..one_mod4 },
        "Q-T53b" => QParams { n: 2, r: 1, d: 1, ..QParams::default() },
        "Q-LEM23" | "C-63" | "C-64" => QParams { r: 2, s: 1, ..one_mod4 },
        "Q-LEM22" | "Q-DIFF" | "C-61" | "C-62" | "C-65" => QParams { m: 1, ..one_mod4 },
        "Q-PF11" | "Q-PF22" | "C-66" | "C-67" | "C-68" => QParams { m: 1, ..odd },
        "Q-OLD1" | "Q-OLD2" => QParams { m: 1, ..QParams::n(3) },
        "Q-REASON" => QParams { k: 1, ..odd },
        "Q-H2A" | "Q-H2B" | "Q-EQUIV" | "Q-GAUSS" => one_mod4,
        _ => odd,
    }
}

fn achieved(f: &FactorRecord) -> (Option<i64>, Option<i64>, bool) {
    match f {
        FactorRecord::Q {
            achieved,
            achieved_floor,
            pass,
            ..
        } => (*achieved, *achieved_floor, *pass),
        _ => panic!("q factor expected"),
    }
}

#[test]
fn all_statements_pass_smallest_instances_on_both_engines() {
    let dense = VerifyOptions {
        engine: Engine::Dense,
        ..VerifyOptions::default()
    };
    let local = VerifyOptions::default();
    for id in all_q_ids() {
        let p = smallest_params(id);
        let a = verify_q(id, &p, &dense).unwrap_or_else(|e| panic!("{id} dense: {e}"));
        let b = verify_q(id, &p, &local).unwrap_or_else(|e| panic!("{id} local: {e}"));
        assert!(a.pass, "{id} dense failed: {:?}", a.factors);
        assert!(b.pass, "{id} local failed: {:?}", b.factors);
        assert_eq!(a.factors.len(), b.factors.len(), "{id} factor count");
        for (fa, fb) in a.factors.iter().zip(&b.factors) {
            let (va, _, _) = achieved(fa);
            let (vb, floor_b, _) = achieved(fb);
            match (va, vb) {
                // dense exact vs local exact must match
                (Some(x), Some(y)) => assert_eq!(x, y, "{id} achieved mismatch"),
                // identical zero on both is fine
                (None, None) => (),
                // dense exact vs local floor: floor must not exceed the truth
                (Some(x), None) => {
                    if let Some(fl) = floor_b {
                        assert!(fl <= x, "{id} local floor {fl} above dense value {x}");
                    } else {
                        panic!("{id}: local says identically zero, dense disagrees");
                    }
                }
                (None, Some(_)) => panic!("{id}: dense says identically zero, local disagrees"),
            }
        }
    }
}
