use proptest::prelude::*;

use enbrauer::algebra::span_enhanced;
use enbrauer::forms::{lift_lie_to_enhanced, make_group, FormKind};
use enbrauer::linalg::{Rational, SparseOperator, SparseVec};
use enbrauer::scenario::{run_all, Check, ScenarioConfig};
use enbrauer::tensor::{dphi, TensorSpace};

fn kind_strategy() -> impl Strategy<Value = (FormKind, usize)> {
    prop_oneof![
        Just((FormKind::Orthogonal, 4)),
        Just((FormKind::Symplectic, 4))
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Random combinations of the enhanced algebra's basis commute with the
    /// Lie algebra and keep every level.
    #[test]
    fn enhanced_elements_are_levi_invariant((kind, n) in kind_strategy(), coeffs in prop::collection::vec(-3i64..=3, 8)) {
        let (span, _, _) = span_enhanced(kind, n, 2).unwrap();
        let space = TensorSpace::enhanced(n, 2);
        let a = SparseVec::from_entries(span.dim(), coeffs.iter().enumerate().map(|(k, &c)| (k, Rational::from_integer(c))));
        let x = SparseOperator::from_vectorized(space.dim(), space.dim(), &span.combine(&a)).unwrap();
        let g = make_group(kind, n).unwrap();
        for y in &g.lie_basis {
            let d = dphi(&lift_lie_to_enhanced(y), &space).unwrap();
            prop_assert!(x.commutator(&d).unwrap().is_zero());
        }
        prop_assert!(x.triplets().all(|(i, j, _)| space.level_of(i) == space.level_of(j)));
    }

    /// Any subset of checks reproduces the matching entries of the full run.
    #[test]
    fn check_subsets_match_full_run(mask in 1u16..(1 << 9), seed in 0u64..4) {
        let subset: Vec<Check> = Check::ALL.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, c)| *c).collect();
        let full = ScenarioConfig::new(FormKind::Orthogonal, 4, 2, Check::ALL.to_vec(), seed);
        let part = ScenarioConfig { checks: subset.clone(), ..full.clone() };
        let full = run_all(&[full], seed).unwrap();
        let part = run_all(&[part], seed).unwrap();
        let names: Vec<&str> = subset.iter().map(|c| c.name()).collect();
        let expected: Vec<_> = full.reports.iter().filter(|r| {
            names.contains(&r.check.as_str()) || (r.check == "rho_decomposition" && names.contains(&"mulformula"))
        }).cloned().collect();
        prop_assert_eq!(part.reports, expected);
    }
}
