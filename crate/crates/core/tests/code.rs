mod common;

use common::*;
use proptest::prelude::*;
use stabsat::code::{certify_kernel, css_bsm, independent_row_subset, BbSpec, BinSympMatrix, CssCode, KernelVerdict, Sector};
use stabsat::gf2::{BitString, Gf2Matrix};
use stabsat::pauli::BinSympPauli;

fn mono() -> impl Strategy<Value = (usize, usize)> {
    (0usize..8, 0usize..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn css_commuting_iff_orthogonal((hx, hz) in (1usize..=8).prop_flat_map(|n| (random_matrix(0..=4, n..=n), random_matrix(0..=4, n..=n)))) {
        prop_assert_eq!(css_bsm(&hx, &hz).unwrap().is_commuting(), hx.mutually_orth(&hz).unwrap());
    }

    #[test]
    fn css_commuting_on_valid_pairs((hx, hz) in random_css(2..=10)) {
        prop_assert!(css_bsm(&hx, &hz).unwrap().is_commuting());
    }

    #[test]
    fn bb_codes_are_valid(l in 1usize..=6, m in 1usize..=6, a in [mono(), mono(), mono()], b in [mono(), mono(), mono()]) {
        let code = BbSpec::new(l, m, a, b).unwrap().build();
        prop_assert_eq!(code.n, 2 * l * m);
        prop_assert!(code.is_dual_containing());
        prop_assert_eq!(code.hx.rank(), code.hz.rank());
        prop_assert_eq!(code.compute_k().unwrap() % 2, 0);
    }

    #[test]
    fn certified_kernel_spans_the_kernel(m in random_matrix(0..=8, 1..=12), extra in random_matrix(0..=3, 12..=12)) {
        let n = m.num_cols();
        let r = m.rank();
        // the computed kernel, possibly padded with redundant combinations
        let mut k = m.kernel_basis();
        if k.num_rows() > 0 && extra.num_rows() > 0 {
            let combos: Vec<BitString> = extra.rows().iter().map(|e| {
                k.rows().iter().enumerate().filter(|(i, _)| e.get(i % 12)).fold(BitString::zeros(n), |a, (_, r)| &a ^ r)
            }).collect();
            k = k.vstack(&Gf2Matrix::from_rows(combos, n).unwrap()).unwrap();
        }
        let cert = certify_kernel(&m, &k, r, n - r).unwrap();
        prop_assert!(cert.is_certified());
        let expected: std::collections::HashSet<u64> = kernel_by_enumeration(&masks(&m), n).into_iter().collect();
        prop_assert_eq!(span(&masks(&k)), expected);
        for row in k.rows() {
            prop_assert!(m.kernel_basis().row_space_contains(row).unwrap());
        }
        for row in m.kernel_basis().rows() {
            prop_assert!(k.row_space_contains(row).unwrap());
        }
    }

    #[test]
    fn undetectable_is_invariant_under_stabilizers((hx, hz) in random_css(2..=8), ex in any::<u16>(), ez in any::<u16>(), pick in any::<prop::sample::Index>()) {
        let b = css_bsm(&hx, &hz).unwrap();
        let n = b.num_qubits();
        let mask = (1u64 << n) - 1;
        let e = BinSympPauli::new(BitString::from_u64(n, ex as u64 & mask), BitString::from_u64(n, ez as u64 & mask)).unwrap();
        if b.num_rows() > 0 {
            let s = b.row(pick.index(b.num_rows()));
            prop_assert_eq!(b.undetectable(&e.xor(&s).unwrap()).unwrap(), b.undetectable(&e).unwrap());
        }
    }

    #[test]
    fn independent_subset_is_independent(m in random_matrix(0..=10, 1..=10)) {
        let r = m.rank();
        let rows = independent_row_subset(&m, r).unwrap();
        prop_assert_eq!(rows.len(), r);
        prop_assert_eq!(rank_by_span(&masks(&m.select_rows(&rows))), r);
        prop_assert!(independent_row_subset(&m, r + 1).is_none());
    }

    #[test]
    fn code_json_round_trip((hx, hz) in random_css(1..=12)) {
        let code = CssCode::new("r", hx, hz).unwrap().with_claimed(1, 2);
        prop_assert_eq!(CssCode::from_json(&code.to_json()).unwrap(), code);
    }
}

#[test]
fn steane_kernel_certificate() {
    let h = steane_h();
    assert!(certify_kernel(&h, &h.kernel_basis(), 3, 4).unwrap().is_certified());
    // one bad bit in the kernel
    let mut rows = h.kernel_basis().rows().to_vec();
    rows[0].flip(0);
    let bad = Gf2Matrix::from_rows(rows, 7).unwrap();
    assert!(matches!(certify_kernel(&h, &bad, 3, 4).unwrap().verdict, KernelVerdict::Rejected(_)));
    assert!(!certify_kernel(&h, &h.kernel_basis(), 3, 3).unwrap().is_certified());
    assert_eq!(independent_row_subset(&Gf2Matrix::identity(4), 4), Some(vec![0, 1, 2, 3]));
    assert_eq!(independent_row_subset(&Gf2Matrix::zeros(3, 4), 1), None);
}

#[test]
fn sector_conventions() {
    let shor = fixture("shor");
    let (checks, excluded) = shor.sector_matrices(Sector::X);
    assert_eq!((checks, excluded), (&shor.hz, &shor.hx));
    assert_eq!(shor.hz.num_rows(), 6);
    // supplied ker(hx) is the 7-row generator matrix of the worked example
    assert_eq!(shor.sector_kernel(Sector::X).num_rows(), 7);
    let bsm: BinSympMatrix = shor.to_bsm();
    assert_eq!(bsm.num_rows(), 8);
    // Z-type rows (from hz) first, then X-type rows (from hx)
    for i in 0..6 {
        assert!(bsm.x().row(i).is_zero());
        assert_eq!(bsm.z().row(i), shor.hz.row(i));
    }
    for i in 0..2 {
        assert_eq!(bsm.x().row(6 + i), shor.hx.row(i));
        assert!(bsm.z().row(6 + i).is_zero());
    }
}

#[test]
fn fixtures_have_their_claimed_dimension() {
    for (name, k) in [("steane", 1), ("shor", 1), ("golay", 1), ("bb72", 12), ("bb90", 8), ("bb108", 8), ("bb144", 12)] {
        let code = fixture(name);
        assert!(code.is_dual_containing(), "{name}");
        assert_eq!(code.compute_k().unwrap(), k, "{name}");
        assert_eq!(code.claimed_params.unwrap().k, k, "{name}");
    }
}

#[test]
fn bb_fixture_matches_builder() {
    let spec = BbSpec::new(15, 3, [(9, 0), (0, 1), (0, 2)], [(0, 0), (2, 0), (7, 0)]).unwrap();
    let built = spec.build();
    let file = fixture("bb90");
    assert_eq!((built.hx, built.hz), (file.hx, file.hz));
}
