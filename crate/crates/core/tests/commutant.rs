use enbrauer::forms::{make_group, FormKind};
use enbrauer::linalg::{Matrix, Rational, SparseOperator};
use enbrauer::tensor::{phi, ComponentIndex, TensorSpace};
use enbrauer::verify::{
    commutant, commutes_with_all, hom_space, spot_check_elements, verify_gl_sanity, ConstraintSet,
    SolveMode, TorusForm,
};

fn levi_constraints(kind: FormKind, n: usize, r: usize) -> ConstraintSet {
    let g = make_group(kind, n).unwrap();
    ConstraintSet::for_group(&g, TensorSpace::enhanced(n, r))
        .unwrap()
        .with_torus(TorusForm::Derivation)
        .unwrap()
}

#[test]
fn gl_commutant_is_symmetric_group_span() {
    for r in 1..=3 {
        let rep = verify_gl_sanity(2, r, FormKind::Orthogonal).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.sides[0].dim, (1..=r).product::<usize>());
    }
}

#[test]
fn plain_commutant_dims() {
    for (kind, n) in [
        (FormKind::Orthogonal, 4),
        (FormKind::Orthogonal, 6),
        (FormKind::Symplectic, 6),
    ] {
        let g = make_group(kind, n).unwrap();
        let cs = ConstraintSet::for_group(&g, TensorSpace::plain(n, 2)).unwrap();
        assert_eq!(commutant(&cs, SolveMode::Restricted).unwrap().0.dim(), 3);
    }
}

#[test]
fn restricted_and_unrestricted_agree_on_levi() {
    for (kind, n) in [
        (FormKind::Orthogonal, 4),
        (FormKind::Symplectic, 6),
        (FormKind::Orthogonal, 2),
    ] {
        let cs = levi_constraints(kind, n, 2);
        let (a, sa) = commutant(&cs, SolveMode::Restricted).unwrap();
        let (b, sb) = commutant(&cs, SolveMode::Unrestricted).unwrap();
        assert!(a.equal(&b).unwrap());
        assert!(sa.unknowns < sb.unknowns);
    }
}

#[test]
fn odd_hom_spaces_vanish() {
    let g = make_group(FormKind::Symplectic, 6).unwrap();
    let cs = ConstraintSet::for_group(&g, TensorSpace::enhanced(6, 2)).unwrap();
    for i in ComponentIndex::all(2) {
        for j in ComponentIndex::all(2) {
            let dim = hom_space(&i, &j, &cs, SolveMode::Restricted)
                .unwrap()
                .0
                .dim();
            match (i.len() + j.len()) % 2 {
                1 => assert_eq!(dim, 0, "{i} -> {j}"),
                _ if i.len() == j.len() => assert_eq!(dim, [1, 1, 3][i.len()], "{i} -> {j}"),
                _ => assert_eq!(dim, 1, "{i} -> {j}"),
            }
        }
    }
}

/// A fixed unimodular upper-triangular change of basis on the letters.
fn letter_change(d: usize) -> (Matrix, Matrix) {
    let mut p = Matrix::identity(d);
    for i in 0..d {
        for j in i + 1..d {
            p.set(i, j, Rational::from_integer(((i + 2 * j) % 3) as i64 - 1));
        }
    }
    let inv = p.inverse().unwrap();
    (p, inv)
}

#[test]
fn dimensions_invariant_under_conjugation() {
    for (kind, n) in [(FormKind::Orthogonal, 4), (FormKind::Symplectic, 4)] {
        let cs = levi_constraints(kind, n, 2);
        let (p, p_inv) = letter_change(n + 1);
        let space = cs.space;
        let conj = cs
            .conjugated(&phi(&p, &space).unwrap(), &phi(&p_inv, &space).unwrap())
            .unwrap();
        let a = commutant(&cs, SolveMode::Unrestricted).unwrap().0.dim();
        let b = commutant(&conj, SolveMode::Unrestricted).unwrap().0.dim();
        assert_eq!(a, b);
    }
}

#[test]
fn commutant_commutes_with_group_elements() {
    let g = make_group(FormKind::Orthogonal, 4).unwrap();
    let space = TensorSpace::enhanced(4, 2);
    let cs = levi_constraints(FormKind::Orthogonal, 4, 2)
        .with_nilpotents()
        .unwrap();
    let (sol, _) = commutant(&cs, SolveMode::Restricted).unwrap();
    let gs = spot_check_elements(&g, &space, true, true, 7).unwrap();
    assert!(commutes_with_all(&sol, space.dim(), &gs).unwrap());
    // Dropping the nilpotents makes e^v fail for some element.
    let (levi, _) = commutant(
        &levi_constraints(FormKind::Orthogonal, 4, 2),
        SolveMode::Restricted,
    )
    .unwrap();
    assert!(!commutes_with_all(&levi, space.dim(), &gs).unwrap());
}

#[test]
fn identity_always_in_commutant() {
    let cs = levi_constraints(FormKind::Symplectic, 2, 2);
    let (sol, _) = commutant(&cs, SolveMode::Restricted).unwrap();
    let id = SparseOperator::identity(cs.space.dim()).vectorize();
    assert!(sol.contains(&id).unwrap());
}
