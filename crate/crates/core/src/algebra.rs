//! The Brauer algebra on `V^⊗r` and the enhanced algebra on `V̄^⊗r`, built
//! as operator spans.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diagrams::{
    binomial, build, compose_counting, enumerate_all, enumerate_normalized, factorize,
    matchings_count, NormalizedDiagram, Permutation,
};
use crate::error::{Error, Result};
use crate::forms::{FormKind, FormSpec};
use crate::linalg::{direct_sum, echelonize_in, OperatorSubspace, Rational, SparseOperator};
use crate::report::{DualityReport, LevelRow, Status};
use crate::tensor::{
    contract_pi, embed_sigma, expand_pi, pairings, projection, psi, psi_tau, rho_i, transfer,
    BrauerElement, ComponentIndex, LabeledOperator, TensorSpace,
};

/// A spanning family together with its span.
#[derive(Clone, Debug)]
pub struct AlgebraHandle {
    pub kind: FormKind,
    pub n: usize,
    pub r: usize,
    pub spanning: Vec<LabeledOperator>,
    pub span: OperatorSubspace,
}

impl AlgebraHandle {
    fn from_spanning(
        kind: FormKind,
        n: usize,
        r: usize,
        dim: usize,
        spanning: Vec<LabeledOperator>,
    ) -> Result<Self> {
        let vecs: Vec<_> = spanning.iter().map(|o| o.op.vectorize()).collect();
        let span = echelonize_in(dim * dim, &vecs)?;
        Ok(AlgebraHandle {
            kind,
            n,
            r,
            spanning,
            span,
        })
    }

    pub fn epsilon(&self) -> i64 {
        self.kind.epsilon()
    }

    pub fn dim(&self) -> usize {
        self.span.dim()
    }
}

/// Whether the basis statements for the Brauer algebra apply (`n ≥ 2r`).
pub fn above_threshold(n: usize, r: usize) -> bool {
    n >= 2 * r
}

/// `C(r,l)²·(2l−1)!!`; the level-0 value is 1.
pub fn expected_level_dim(r: usize, l: usize) -> usize {
    (binomial(r, l).pow(2) * matchings_count(l)) as usize
}

pub fn expected_total_dim(r: usize) -> usize {
    (0..=r).map(|l| expected_level_dim(r, l)).sum()
}

/// One `(s, z)` per Brauer diagram on `2r` dots.
pub fn canonical_pairs(r: usize) -> Vec<(Permutation, NormalizedDiagram)> {
    enumerate_all(r).iter().map(factorize).collect()
}

/// `𝓑_r(εn)` on `V^⊗r`: the span of `Ψ(s)τ_z`, one pair per diagram.
pub fn span_plain_brauer(kind: FormKind, n: usize, r: usize) -> Result<AlgebraHandle> {
    let form = FormSpec::new(kind, n)?;
    let space = TensorSpace::plain(n, r);
    let spanning = canonical_pairs(r)
        .into_iter()
        .map(|(s, z)| {
            Ok(LabeledOperator::new(
                psi_tau(&s, &z, &form, &space)?,
                format!("Psi({s}) tau_{z}"),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    AlgebraHandle::from_spanning(kind, n, r, space.dim(), spanning)
}

/// Span of all `Ψ(s)τ_z` with `s ∈ S_r`, `z ∈ Z_r` (not one per diagram).
pub fn span_plain_brauer_full(form: &FormSpec, r: usize) -> Result<OperatorSubspace> {
    let space = TensorSpace::plain(form.n, r);
    let vecs = BrauerElement::spanning_pairs(r)
        .iter()
        .map(|(s, z)| Ok(psi_tau(s, z, form, &space)?.vectorize()))
        .collect::<Result<Vec<_>>>()?;
    echelonize_in(space.dim() * space.dim(), &vecs)
}

/// `(Ψ_l(s)τ_z)^J`.
fn embedded_brauer(
    s: &Permutation,
    z: &NormalizedDiagram,
    j: &ComponentIndex,
    form: &FormSpec,
    space: &TensorSpace,
) -> Result<SparseOperator> {
    let small = TensorSpace::plain(form.n, j.len());
    embed_sigma(&psi_tau(s, z, form, &small)?, j, space)
}

/// `𝓑(ε,n,r)_l`, spanned by `E_{I,J}(Ψ_l(s))^J(τ_z)^J` over `♯I = ♯J = l`.
pub fn span_enhanced_level(kind: FormKind, n: usize, r: usize, l: usize) -> Result<AlgebraHandle> {
    if l > r {
        return Err(Error::OutOfRange(format!("level {l} with r = {r}")));
    }
    let form = FormSpec::new(kind, n)?;
    let space = TensorSpace::enhanced(n, r);
    let mut spanning = Vec::new();
    if l == 0 {
        let e = ComponentIndex::empty(r);
        spanning.push(LabeledOperator::new(projection(&e, &space), "E_{∅,∅}").between(e, e));
    } else {
        let subsets = ComponentIndex::of_size(r, l);
        let pairs = canonical_pairs(l);
        for j in &subsets {
            let inner: Vec<(String, SparseOperator)> = pairs
                .iter()
                .map(|(s, z)| {
                    Ok((
                        format!("Psi_{l}({s}) tau_{z}"),
                        embedded_brauer(s, z, j, &form, &space)?,
                    ))
                })
                .collect::<Result<_>>()?;
            for i in &subsets {
                let e = transfer(i, j, &space)?;
                for (label, op) in &inner {
                    let op = e.compose(op)?;
                    spanning.push(
                        LabeledOperator::new(op, format!("E_{{{i},{j}}} ({label})^{j}"))
                            .between(*j, *i),
                    );
                }
            }
        }
    }
    AlgebraHandle::from_spanning(kind, n, r, space.dim(), spanning)
}

/// Dimension bookkeeping for the whole enhanced algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionTable {
    pub epsilon: i64,
    pub n: usize,
    pub r: usize,
    pub levels: Vec<LevelRow>,
    pub total: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_total: Option<usize>,
    pub direct: bool,
}

impl DimensionTable {
    pub fn all_match(&self) -> bool {
        self.direct
            && self.levels.iter().all(|l| l.matches != Some(false))
            && self.expected_total.is_none_or(|e| e == self.total)
    }
}

/// `𝓑(ε,n,r) = ⊕_l 𝓑(ε,n,r)_l`, with the direct-sum check.
pub fn span_enhanced(
    kind: FormKind,
    n: usize,
    r: usize,
) -> Result<(OperatorSubspace, Vec<AlgebraHandle>, DimensionTable)> {
    let levels: Vec<AlgebraHandle> = (0..=r)
        .map(|l| span_enhanced_level(kind, n, r, l))
        .collect::<Result<_>>()?;
    let parts: Vec<&OperatorSubspace> = levels.iter().map(|h| &h.span).collect();
    let (total, check) = direct_sum(&parts)?;
    let asserted = above_threshold(n, r);
    let rows = levels
        .iter()
        .enumerate()
        .map(|(l, h)| {
            let expected = asserted.then(|| expected_level_dim(r, l));
            LevelRow {
                l,
                dim: h.dim(),
                expected,
                matches: expected.map(|e| e == h.dim()),
            }
        })
        .collect();
    let table = DimensionTable {
        epsilon: kind.epsilon(),
        n,
        r,
        levels: rows,
        total: total.dim(),
        expected_total: asserted.then(|| expected_total_dim(r)),
        direct: check.direct,
    };
    Ok((total, levels, table))
}

/// `𝓑_{IJ}`: intertwiners `V̄_I^⊗r → V̄_J^⊗r` from the three spanning recipes.
pub fn span_b_ij(
    kind: FormKind,
    n: usize,
    r: usize,
    i: &ComponentIndex,
    j: &ComponentIndex,
) -> Result<OperatorSubspace> {
    echelonize_in(
        TensorSpace::enhanced(n, r).dim().pow(2),
        &spanning_b_ij(kind, n, r, i, j)?
            .iter()
            .map(|o| o.op.vectorize())
            .collect::<Vec<_>>(),
    )
}

pub fn spanning_b_ij(
    kind: FormKind,
    n: usize,
    r: usize,
    i: &ComponentIndex,
    j: &ComponentIndex,
) -> Result<Vec<LabeledOperator>> {
    let form = FormSpec::new(kind, n)?;
    let space = TensorSpace::enhanced(n, r);
    let (s, t) = (i.len(), j.len());
    let mut out = Vec::new();
    if (s + t) % 2 == 1 {
        return Ok(out);
    }
    if s == t {
        let e = transfer(j, i, &space)?;
        for (p, z) in canonical_pairs(s) {
            let op = e.compose(&embedded_brauer(&p, &z, i, &form, &space)?)?;
            out.push(
                LabeledOperator::new(op, format!("E_{{{j},{i}}} (Psi({p}) tau_{z})^{i}"))
                    .between(*i, *j),
            );
        }
    } else if s < t {
        // E_{J,J'} (Ψ_t(p))^{J'} 𝒟_U^{IJ'} (τ_z)^I
        let small_l = TensorSpace::plain(n, s);
        let taus: Vec<(NormalizedDiagram, SparseOperator)> = enumerate_normalized(s)
            .into_iter()
            .map(|z| {
                let tz = crate::tensor::tau_z(&z, &form, &small_l)?;
                Ok((z, embed_sigma(&tz, i, &space)?))
            })
            .collect::<Result<_>>()?;
        for jp in ComponentIndex::of_size(r, t)
            .into_iter()
            .filter(|x| i.is_subset(x))
        {
            let e = transfer(j, &jp, &space)?;
            let small_t = TensorSpace::plain(n, t);
            let perms: Vec<(Permutation, SparseOperator)> = Permutation::all(t)
                .into_iter()
                .map(|p| Ok((p.clone(), embed_sigma(&psi(&p, &small_t)?, &jp, &space)?)))
                .collect::<Result<_>>()?;
            for u in pairings(i, &jp)? {
                let d = expand_pi(&u, i, &jp, &form, &space)?;
                for (p, pp) in &perms {
                    let left = e.compose(pp)?.compose(&d)?;
                    for (z, tz) in &taus {
                        let op = left.compose(tz)?;
                        out.push(
                            LabeledOperator::new(
                                op,
                                format!("E_{{{j},{jp}}} Psi({p})^{jp} D_{u:?} tau_{z}^{i}"),
                            )
                            .between(*i, *j),
                        );
                    }
                }
            }
        }
    } else {
        // E_{J,J'} (Ψ_t(p))^{J'} (τ_z)^{J'} 𝒞_U^{J'I}
        let small_t = TensorSpace::plain(n, t);
        for jp in ComponentIndex::of_size(r, t)
            .into_iter()
            .filter(|x| x.is_subset(i))
        {
            let e = transfer(j, &jp, &space)?;
            let inner: Vec<(String, SparseOperator)> = BrauerElement::spanning_pairs(t)
                .iter()
                .map(|(p, z)| {
                    Ok((
                        format!("Psi({p}) tau_{z}"),
                        embed_sigma(&psi_tau(p, z, &form, &small_t)?, &jp, &space)?,
                    ))
                })
                .collect::<Result<_>>()?;
            for u in pairings(&jp, i)? {
                let c = contract_pi(&u, &jp, i, &form, &space)?;
                for (label, op) in &inner {
                    let op = e.compose(op)?.compose(&c)?;
                    out.push(
                        LabeledOperator::new(op, format!("E_{{{j},{jp}}} ({label})^{jp} C_{u:?}"))
                            .between(*i, *j),
                    );
                }
            }
        }
    }
    Ok(out)
}

/// `𝓑_{st} = ⊕ 𝓑_{IJ}` over `♯I = s`, `♯J = t`, with the directness check.
pub fn span_b_st(
    kind: FormKind,
    n: usize,
    r: usize,
    s: usize,
    t: usize,
) -> Result<(OperatorSubspace, bool)> {
    let amb = TensorSpace::enhanced(n, r).dim().pow(2);
    let mut parts = Vec::new();
    for i in ComponentIndex::of_size(r, s) {
        for j in ComponentIndex::of_size(r, t) {
            parts.push(span_b_ij(kind, n, r, &i, &j)?);
        }
    }
    if parts.is_empty() {
        return Ok((OperatorSubspace::zero(amb), true));
    }
    let refs: Vec<&OperatorSubspace> = parts.iter().collect();
    let (total, check) = direct_sum(&refs)?;
    Ok((total, check.direct))
}

fn sample_brauer(
    form: &FormSpec,
    l: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(String, SparseOperator)> {
    let pairs = BrauerElement::spanning_pairs(l);
    let (s, z) = pairs.choose(rng).expect("nonempty");
    Ok((
        format!("Psi({s}) tau_{z}"),
        psi_tau(s, z, form, &TensorSpace::plain(form.n, l))?,
    ))
}

/// Checks `(E_{IJ}σ^J)(E_{KL}λ^L) = δ_{JK} E_{IL}(σλ)^L` exactly: every
/// combination at `r ≤ 2`, `samples` seeded draws otherwise.
pub fn verify_multiplication_formula(
    kind: FormKind,
    n: usize,
    r: usize,
    samples: usize,
    seed: u64,
) -> Result<DualityReport> {
    let form = FormSpec::new(kind, n)?;
    let space = TensorSpace::enhanced(n, r);
    let mut report = DualityReport::new("mulformula", kind, n, r);
    let mut checked = 0usize;
    let mut violations: Vec<String> = Vec::new();
    let mut check = |i: &ComponentIndex,
                     j: &ComponentIndex,
                     k: &ComponentIndex,
                     l: &ComponentIndex,
                     sigma: &SparseOperator,
                     lambda: &SparseOperator,
                     label: String|
     -> Result<()> {
        let lhs = transfer(i, j, &space)?
            .compose(&embed_sigma(sigma, j, &space)?)?
            .compose(&transfer(k, l, &space)?.compose(&embed_sigma(lambda, l, &space)?)?)?;
        let rhs = if j == k {
            transfer(i, l, &space)?.compose(&embed_sigma(&sigma.compose(lambda)?, l, &space)?)?
        } else {
            SparseOperator::zero(space.dim(), space.dim())
        };
        checked += 1;
        if lhs != rhs {
            violations.push(label);
        }
        Ok(())
    };
    if r <= 2 {
        for lvl in 0..=r {
            let subsets = ComponentIndex::of_size(r, lvl);
            let small = TensorSpace::plain(n, lvl);
            let ops: Vec<(String, SparseOperator)> = BrauerElement::spanning_pairs(lvl)
                .iter()
                .map(|(s, z)| Ok((format!("Psi({s}) tau_{z}"), psi_tau(s, z, &form, &small)?)))
                .collect::<Result<_>>()?;
            for i in &subsets {
                for j in &subsets {
                    for k in &subsets {
                        for l in &subsets {
                            for (ls, s) in &ops {
                                for (ll, lam) in &ops {
                                    check(
                                        i,
                                        j,
                                        k,
                                        l,
                                        s,
                                        lam,
                                        format!("I={i} J={j} K={k} L={l} sigma={ls} lambda={ll}"),
                                    )?;
                                }
                            }
                        }
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let lvl = rng.gen_range(1..=r);
            let subsets = ComponentIndex::of_size(r, lvl);
            let pick = |rng: &mut ChaCha8Rng| *subsets.choose(rng).expect("nonempty");
            let (i, j, l) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            // Half the draws force J = K so the nonzero branch is exercised.
            let k = if rng.gen_bool(0.5) { j } else { pick(&mut rng) };
            let (ls, s) = sample_brauer(&form, lvl, &mut rng)?;
            let (ll, lam) = sample_brauer(&form, lvl, &mut rng)?;
            check(
                &i,
                &j,
                &k,
                &l,
                &s,
                &lam,
                format!("I={i} J={j} K={k} L={l} sigma={ls} lambda={ll}"),
            )?;
        }
    }
    report.detail("products_checked", checked);
    report.detail("violations", &violations);
    report.require(violations.is_empty(), "multiplication formula");
    Ok(report)
}

/// Level by level, compares the `E`/`Ψ`/`τ` construction with `⊕_I ρ_I(𝓑_r)`.
pub fn verify_rho_decomposition(kind: FormKind, n: usize, r: usize) -> Result<DualityReport> {
    if !above_threshold(n, r) {
        return Err(Error::Precondition(format!(
            "needs n >= 2r, got n = {n}, r = {r}"
        )));
    }
    let form = FormSpec::new(kind, n)?;
    let space = TensorSpace::enhanced(n, r);
    let amb = space.dim().pow(2);
    let mut report = DualityReport::new("rho_decomposition", kind, n, r);
    let pairs = BrauerElement::spanning_pairs(r);
    let mut all_levels_rho = OperatorSubspace::zero(amb);
    let mut all_levels_e = OperatorSubspace::zero(amb);
    for l in 0..=r {
        let built = span_enhanced_level(kind, n, r, l)?;
        let mut parts = Vec::new();
        for c in ComponentIndex::of_size(r, l) {
            let vecs = pairs
                .iter()
                .map(|(s, z)| {
                    Ok(rho_i(
                        &BrauerElement::term(s.clone(), z.clone(), Rational::one()),
                        &c,
                        &form,
                        r,
                    )?
                    .vectorize())
                })
                .collect::<Result<Vec<_>>>()?;
            parts.push(echelonize_in(amb, &vecs)?);
        }
        let refs: Vec<&OperatorSubspace> = parts.iter().collect();
        let (rho_level, check) = direct_sum(&refs)?;
        let equal = rho_level.equal(&built.span)?;
        report.per_level.push(LevelRow {
            l,
            dim: rho_level.dim(),
            expected: Some(built.dim()),
            matches: Some(equal),
        });
        report.require(
            equal,
            format!("level {l}: rho image equals the E-construction"),
        );
        report.require(
            check.direct,
            format!("level {l}: rho_I images are independent"),
        );
        all_levels_rho = all_levels_rho.sum(&rho_level)?;
        all_levels_e = all_levels_e.sum(&built.span)?;
    }
    let equal = all_levels_rho.equal(&all_levels_e)?;
    report.side("sum_I rho_I(B_r)", all_levels_rho.dim());
    report.side("B(eps,n,r)", all_levels_e.dim());
    report.equal = Some(equal);
    report.require(equal, "total rho image equals the enhanced algebra");
    Ok(report)
}

/// Dimension and direct-sum report for the enhanced algebra.
pub fn dims_report(kind: FormKind, n: usize, r: usize) -> Result<(DualityReport, DimensionTable)> {
    let mut report = DualityReport::new("dims", kind, n, r);
    let plain = span_plain_brauer(kind, n, r)?;
    let (_, _, table) = span_enhanced(kind, n, r)?;
    report.side("B_r(eps n)", plain.dim());
    report.side("B(eps,n,r)", table.total);
    report.per_level = table.levels.clone();
    report.detail("direct_sum", table.direct);
    if above_threshold(n, r) {
        report.detail("expected_brauer", matchings_count(r));
        report.detail("expected_total", table.expected_total);
        report.require(
            plain.dim() as u64 == matchings_count(r),
            "Brauer algebra dimension",
        );
        report.require(table.all_match(), "level dimensions and total");
    } else {
        report.status = Status::NotApplicable;
        report.note("n < 2r: dimension formulas not asserted");
        report.require(table.direct, "levels form a direct sum");
    }
    Ok((report, table))
}

/// Products of sampled spanning operators stay inside `span`.
pub fn closure_violations(
    handles: &[AlgebraHandle],
    span: &OperatorSubspace,
    samples: usize,
    seed: u64,
) -> Result<usize> {
    let ops: Vec<&LabeledOperator> = handles.iter().flat_map(|h| h.spanning.iter()).collect();
    let mut bad = 0;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    if ops.len() * ops.len() <= samples {
        for a in 0..ops.len() {
            for b in 0..ops.len() {
                pairs.push((a, b));
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            pairs.push((rng.gen_range(0..ops.len()), rng.gen_range(0..ops.len())));
        }
    }
    for (a, b) in pairs {
        let prod = ops[a].op.compose(&ops[b].op)?;
        if !span.contains(&prod.vectorize())? {
            bad += 1;
        }
    }
    Ok(bad)
}

/// How the concrete product `op(d1)∘op(d2)` relates to `op(d1·d2)` for every
/// pair of diagrams: the scalar `c` with `op(d1)op(d2) = c·op(d1 d2)`, keyed by
/// `(loops, c)`. With one canonical `(s, z)` per diagram.
pub fn diagram_coefficient_survey(
    form: &FormSpec,
    r: usize,
) -> Result<BTreeMap<(usize, String), usize>> {
    let space = TensorSpace::plain(form.n, r);
    let diagrams = enumerate_all(r);
    let ops: Vec<SparseOperator> = diagrams
        .iter()
        .map(|d| {
            let (s, z) = factorize(d);
            debug_assert_eq!(&build(&s, &z)?, d);
            psi_tau(&s, &z, form, &space)
        })
        .collect::<Result<_>>()?;
    let index: BTreeMap<_, _> = diagrams.iter().cloned().zip(0..).collect();
    let mut out = BTreeMap::new();
    for (a, da) in diagrams.iter().enumerate() {
        for (b, db) in diagrams.iter().enumerate() {
            let (d, loops) = compose_counting(da, db)?;
            let prod = ops[a].compose(&ops[b])?;
            let target = &ops[index[&d]];
            let key = match scalar_ratio(&prod, target) {
                Some(c) => c.to_string(),
                None => "not proportional".to_string(),
            };
            *out.entry((loops, key)).or_insert(0) += 1;
        }
    }
    Ok(out)
}

/// `c` with `a = c·b`, if it exists (`b ≠ 0`).
pub fn scalar_ratio(a: &SparseOperator, b: &SparseOperator) -> Option<Rational> {
    let (va, vb) = (a.vectorize(), b.vectorize());
    let (k, lead) = vb.leading()?;
    let c = va.get(k) / lead;
    (va == vb.scale(&c)).then_some(c)
}
