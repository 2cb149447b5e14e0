use proptest::prelude::*;
use stabsat::cert::{check_lrat, parse_lrat};
use stabsat::encode::{Cnf, Model};
use stabsat::solver::{solve, verify_model, Backend, SolveOutcome, SolverConfig};

fn brute_force_sat(cnf: &Cnf) -> bool {
    let n = cnf.num_vars;
    (0u32..1 << n).any(|bits| {
        cnf.clauses.iter().all(|c| {
            c.iter().any(|&l| {
                let v = bits >> (l.unsigned_abs() - 1) & 1 == 1;
                v == (l > 0)
            })
        })
    })
}

fn random_cnf() -> impl Strategy<Value = Cnf> {
    (1u32..=18, 1usize..=90).prop_flat_map(|(n, m)| {
        let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
        prop::collection::vec(prop::collection::vec(lit, 1..=3), m).prop_map(move |clauses| Cnf { num_vars: n, clauses })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn internal_solver_matches_truth_table(cnf in random_cnf(), seed in 0u64..4) {
        let cfg = SolverConfig { seed, ..SolverConfig::default() };
        match solve(&cnf, &cfg) {
            SolveOutcome::Sat(m) => {
                prop_assert!(brute_force_sat(&cnf));
                prop_assert!(verify_model(&cnf, &m).unwrap());
            }
            SolveOutcome::Unsat(proof) => {
                prop_assert!(!brute_force_sat(&cnf));
                let proof = parse_lrat(&proof.unwrap().to_text().unwrap(), cnf.num_clauses()).unwrap();
                let report = check_lrat(&cnf, &proof);
                prop_assert!(report.accepted, "{:?}", report.rejection);
            }
            SolveOutcome::Unknown(r) => prop_assert!(false, "unknown: {r}"),
        }
    }

    #[test]
    fn model_check_matches_direct_evaluation(cnf in random_cnf(), bits in any::<u32>()) {
        let values: Vec<bool> = (0..cnf.num_vars).map(|v| bits >> v & 1 == 1).collect();
        let direct = cnf.clauses.iter().all(|c| c.iter().any(|&l| values[l.unsigned_abs() as usize - 1] == (l > 0)));
        prop_assert_eq!(verify_model(&cnf, &Model::new(values)).unwrap(), direct);
    }
}

#[test]
fn external_backend_agrees_when_configured() {
    let Some(backend) = Backend::from_env() else {
        eprintln!("skipping: STABSAT_SOLVER not set");
        return;
    };
    let cfg = SolverConfig { backend, ..SolverConfig::default() };
    let unsat = Cnf { num_vars: 2, clauses: vec![vec![1, 2], vec![-1, 2], vec![1, -2], vec![-1, -2]] };
    match solve(&unsat, &cfg) {
        SolveOutcome::Unsat(Some(p)) => {
            let r = check_lrat(&unsat, &parse_lrat(&p.to_text().unwrap(), 4).unwrap());
            assert!(r.accepted, "{:?}", r.rejection);
        }
        other => panic!("{other:?}"),
    }
    let sat = Cnf { num_vars: 2, clauses: vec![vec![1, 2], vec![-1]] };
    assert!(matches!(solve(&sat, &cfg), SolveOutcome::Sat(_)));
}
