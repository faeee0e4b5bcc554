//! Operators on `V^⊗r` and `V̄^⊗r = (V ⊕ Qη)^⊗r`.
//!
//! Basis tuples `j = (j_0, …, j_{r-1})` are flattened lexicographically,
//! `flat = Σ_k j_k·d^(r-1-k)` with `d = n` (plain) or `d = n + 1` (enhanced).
//! In the enhanced space letter `n` is `η`. All operators are built column by
//! column from their action on basis tuples.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::diagrams::{NormalizedDiagram, Permutation};
use crate::error::{Error, Result};
use crate::forms::{enhanced_group_element, FormSpec};
use crate::linalg::{Matrix, Rational, SparseOperator, SparseVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TensorSpace {
    pub n: usize,
    pub r: usize,
    pub enhanced: bool,
}

impl TensorSpace {
    pub fn plain(n: usize, r: usize) -> Self {
        TensorSpace {
            n,
            r,
            enhanced: false,
        }
    }

    pub fn enhanced(n: usize, r: usize) -> Self {
        TensorSpace {
            n,
            r,
            enhanced: true,
        }
    }

    /// Letters per slot.
    pub fn d(&self) -> usize {
        if self.enhanced {
            self.n + 1
        } else {
            self.n
        }
    }

    pub fn dim(&self) -> usize {
        self.d().pow(self.r as u32)
    }

    /// The letter index of `η`.
    pub fn eta(&self) -> usize {
        self.n
    }

    pub fn index(&self, tuple: &[usize]) -> usize {
        let d = self.d();
        tuple.iter().fold(0, |acc, &j| acc * d + j)
    }

    pub fn tuple(&self, mut flat: usize) -> Vec<usize> {
        let d = self.d();
        let mut t = vec![0; self.r];
        for k in (0..self.r).rev() {
            t[k] = flat % d;
            flat /= d;
        }
        t
    }

    /// Which slots of a basis tuple carry a `V` letter.
    pub fn component_of(&self, flat: usize) -> ComponentIndex {
        let t = self.tuple(flat);
        let mask = t
            .iter()
            .enumerate()
            .filter(|(_, &j)| j < self.n)
            .fold(0u64, |m, (k, _)| m | 1 << k);
        ComponentIndex { r: self.r, mask }
    }

    pub fn level_of(&self, flat: usize) -> usize {
        self.tuple(flat).iter().filter(|&&j| j < self.n).count()
    }

    /// Flat indices of the basis of `V̄_I^⊗r`, increasing.
    pub fn component_basis(&self, c: &ComponentIndex) -> Vec<usize> {
        if !self.enhanced {
            return if c.is_full() {
                (0..self.dim()).collect()
            } else {
                Vec::new()
            };
        }
        (0..self.dim())
            .filter(|&f| self.component_of(f) == *c)
            .collect()
    }

    fn check_letter_dim(&self, m: &Matrix) -> Result<()> {
        if m.nrows() != self.d() || m.ncols() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                found: m.nrows(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for TensorSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = if self.enhanced { "V̄" } else { "V" };
        write!(f, "{base}^{} (n = {})", self.r, self.n)
    }
}

/// A subset `I ⊆ {0, …, r-1}` as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentIndex {
    r: usize,
    mask: u64,
}

impl ComponentIndex {
    pub fn new(r: usize, positions: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &p in positions {
            if p >= r {
                return Err(Error::OutOfRange(format!("position {p} with r = {r}")));
            }
            mask |= 1 << p;
        }
        Ok(ComponentIndex { r, mask })
    }

    pub fn from_mask(r: usize, mask: u64) -> Self {
        assert!(r >= 64 || mask >> r == 0, "mask has bits beyond r");
        ComponentIndex { r, mask }
    }

    pub fn empty(r: usize) -> Self {
        ComponentIndex { r, mask: 0 }
    }

    pub fn full(r: usize) -> Self {
        ComponentIndex {
            r,
            mask: (1u64 << r) - 1,
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_full(&self) -> bool {
        self.mask == (1u64 << self.r) - 1
    }

    pub fn contains(&self, p: usize) -> bool {
        self.mask >> p & 1 == 1
    }

    pub fn is_subset(&self, other: &ComponentIndex) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn positions(&self) -> Vec<usize> {
        (0..self.r).filter(|&p| self.contains(p)).collect()
    }

    pub fn complement(&self) -> ComponentIndex {
        ComponentIndex {
            r: self.r,
            mask: !self.mask & ((1u64 << self.r) - 1),
        }
    }

    pub fn union(&self, other: &ComponentIndex) -> ComponentIndex {
        ComponentIndex {
            r: self.r,
            mask: self.mask | other.mask,
        }
    }

    pub fn minus(&self, other: &ComponentIndex) -> ComponentIndex {
        ComponentIndex {
            r: self.r,
            mask: self.mask & !other.mask,
        }
    }

    /// The image `s(I)`.
    pub fn image(&self, s: &Permutation) -> ComponentIndex {
        let mask = self
            .positions()
            .iter()
            .fold(0u64, |m, &p| m | 1 << s.apply(p));
        ComponentIndex { r: self.r, mask }
    }

    /// Subsets of size `l`, in lexicographic order of their position lists.
    pub fn of_size(r: usize, l: usize) -> Vec<ComponentIndex> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(
            r: usize,
            l: usize,
            start: usize,
            cur: &mut Vec<usize>,
            out: &mut Vec<ComponentIndex>,
        ) {
            if cur.len() == l {
                out.push(ComponentIndex::new(r, cur).expect("in range"));
                return;
            }
            for p in start..r {
                cur.push(p);
                rec(r, l, p + 1, cur, out);
                cur.pop();
            }
        }
        rec(r, l, 0, &mut cur, &mut out);
        out
    }

    /// All subsets, by size and then lexicographically.
    pub fn all(r: usize) -> Vec<ComponentIndex> {
        (0..=r).flat_map(|l| Self::of_size(r, l)).collect()
    }
}

impl fmt::Display for ComponentIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        let parts: Vec<String> = self
            .positions()
            .iter()
            .map(|p| (p + 1).to_string())
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// An operator together with where it came from and, optionally, the
/// component blocks it is meant to map between.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledOperator {
    pub op: SparseOperator,
    pub label: String,
    pub domain: Option<ComponentIndex>,
    pub codomain: Option<ComponentIndex>,
}

impl LabeledOperator {
    pub fn new(op: SparseOperator, label: impl Into<String>) -> Self {
        LabeledOperator {
            op,
            label: label.into(),
            domain: None,
            codomain: None,
        }
    }

    pub fn between(mut self, domain: ComponentIndex, codomain: ComponentIndex) -> Self {
        self.domain = Some(domain);
        self.codomain = Some(codomain);
        self
    }

    /// Every stored entry sits in the declared `codomain × domain` block.
    pub fn respects_blocks(&self, space: &TensorSpace) -> bool {
        self.op.triplets().all(|(i, j, _)| {
            self.domain.is_none_or(|d| space.component_of(j) == d)
                && self.codomain.is_none_or(|c| space.component_of(i) == c)
        })
    }
}

type Image = Vec<(Vec<usize>, Rational)>;

/// Builds the operator `domain → codomain` sending basis tuple `t` to
/// `Σ c·e_u` for `(u, c)` in `f(t)`.
pub fn from_action(
    domain: &TensorSpace,
    codomain: &TensorSpace,
    f: impl Fn(&[usize]) -> Image + Sync,
) -> SparseOperator {
    let cols: Vec<SparseVec> = (0..domain.dim())
        .into_par_iter()
        .map(|flat| {
            let t = domain.tuple(flat);
            let entries = f(&t).into_iter().map(|(u, c)| (codomain.index(&u), c));
            SparseVec::from_entries(codomain.dim(), entries)
        })
        .collect();
    SparseOperator::from_columns(codomain.dim(), cols)
}

fn sparse_columns(g: &Matrix) -> Vec<Vec<(usize, Rational)>> {
    (0..g.ncols())
        .map(|j| {
            (0..g.nrows())
                .filter_map(|i| {
                    let c = g.get(i, j);
                    (!c.is_zero()).then(|| (i, c.clone()))
                })
                .collect()
        })
        .collect()
}

/// `Φ(g)`: `g` applied to every slot.
pub fn phi(g: &Matrix, space: &TensorSpace) -> Result<SparseOperator> {
    space.check_letter_dim(g)?;
    let cols = sparse_columns(g);
    Ok(from_action(space, space, |t| {
        let mut acc: Image = vec![(Vec::with_capacity(t.len()), Rational::one())];
        for &j in t {
            let mut next = Vec::with_capacity(acc.len() * cols[j].len());
            for (u, c) in &acc {
                for (i, gij) in &cols[j] {
                    let mut u2 = u.clone();
                    u2.push(*i);
                    next.push((u2, c * gij));
                }
            }
            acc = next;
        }
        acc
    }))
}

/// `dΦ(X) = Σ_k 1^⊗k ⊗ X ⊗ 1^⊗(r-k-1)`.
pub fn dphi(x: &Matrix, space: &TensorSpace) -> Result<SparseOperator> {
    space.check_letter_dim(x)?;
    let cols = sparse_columns(x);
    Ok(from_action(space, space, |t| {
        let mut out = Image::new();
        for k in 0..t.len() {
            for (i, c) in &cols[t[k]] {
                let mut u = t.to_vec();
                u[k] = *i;
                out.push((u, c.clone()));
            }
        }
        out
    }))
}

/// `Ψ(s)`: the letter in slot `k` moves to slot `s(k)`.
pub fn psi(s: &Permutation, space: &TensorSpace) -> Result<SparseOperator> {
    if s.r() != space.r {
        return Err(Error::DimensionMismatch {
            expected: space.r,
            found: s.r(),
        });
    }
    Ok(from_action(space, space, |t| {
        let mut u = vec![0; t.len()];
        for (k, &j) in t.iter().enumerate() {
            u[s.apply(k)] = j;
        }
        vec![(u, Rational::one())]
    }))
}

fn check_pair(space: &TensorSpace, i: usize, j: usize) -> Result<()> {
    if i >= j || j >= space.r {
        return Err(Error::OutOfRange(format!(
            "slot pair ({i}, {j}) needs i < j < r = {}",
            space.r
        )));
    }
    Ok(())
}

/// Contraction `C_ij: V^⊗r → V^⊗(r-2)`, `ω(v_i, v_j)` times the remaining slots.
pub fn contraction(i: usize, j: usize, form: &FormSpec, r: usize) -> Result<SparseOperator> {
    let dom = TensorSpace::plain(form.n, r);
    check_pair(&dom, i, j)?;
    let cod = TensorSpace::plain(form.n, r - 2);
    Ok(from_action(&dom, &cod, |t| {
        let c = form.omega_basis(t[i], t[j]);
        if c.is_zero() {
            return Vec::new();
        }
        let u: Vec<usize> = t
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i && *k != j)
            .map(|(_, &x)| x)
            .collect();
        vec![(u, c.clone())]
    }))
}

/// Expansion `D_ij: V^⊗(r-2) → V^⊗r`, inserting `Σ_p f_p ⊗ f^p` at slots `i, j`.
pub fn expansion(i: usize, j: usize, form: &FormSpec, r: usize) -> Result<SparseOperator> {
    let cod = TensorSpace::plain(form.n, r);
    check_pair(&cod, i, j)?;
    let dom = TensorSpace::plain(form.n, r - 2);
    let pairs = form.casimir_pairs();
    Ok(from_action(&dom, &cod, |t| {
        pairs
            .iter()
            .map(|(p, q, c)| {
                let mut u = Vec::with_capacity(t.len() + 2);
                let mut rest = t.iter();
                for k in 0..t.len() + 2 {
                    u.push(if k == i {
                        *p
                    } else if k == j {
                        *q
                    } else {
                        *rest.next().expect("enough letters")
                    });
                }
                (u, c.clone())
            })
            .collect()
    }))
}

/// `τ_ij` on `space`. On `V^⊗r` this is `D_ij∘C_ij`. On `V̄^⊗r` a tuple with
/// `η` in slot `i` or `j` is sent to zero, so the result is `Σ_I ρ_I(τ_ij)`.
pub fn tau(i: usize, j: usize, form: &FormSpec, space: &TensorSpace) -> Result<SparseOperator> {
    check_pair(space, i, j)?;
    if form.n != space.n {
        return Err(Error::DimensionMismatch {
            expected: space.n,
            found: form.n,
        });
    }
    let pairs = form.casimir_pairs();
    let n = space.n;
    Ok(from_action(space, space, |t| {
        if t[i] >= n || t[j] >= n {
            return Vec::new();
        }
        let c = form.omega_basis(t[i], t[j]);
        if c.is_zero() {
            return Vec::new();
        }
        pairs
            .iter()
            .map(|(p, q, c2)| {
                let mut u = t.to_vec();
                u[i] = *p;
                u[j] = *q;
                (u, c * c2)
            })
            .collect()
    }))
}

/// `τ_z`, the product of `τ` over the bars of `z`.
pub fn tau_z(
    z: &NormalizedDiagram,
    form: &FormSpec,
    space: &TensorSpace,
) -> Result<SparseOperator> {
    if z.r() != space.r {
        return Err(Error::DimensionMismatch {
            expected: space.r,
            found: z.r(),
        });
    }
    let mut out = SparseOperator::identity(space.dim());
    for &(i, j) in z.bars() {
        out = out.compose(&tau(i, j, form, space)?)?;
    }
    Ok(out)
}

/// `Ψ(s)·τ_z` on `space`.
pub fn psi_tau(
    s: &Permutation,
    z: &NormalizedDiagram,
    form: &FormSpec,
    space: &TensorSpace,
) -> Result<SparseOperator> {
    psi(s, space)?.compose(&tau_z(z, form, space)?)
}

/// `Pr_I`, the projection of `V̄^⊗r` onto `V̄_I^⊗r`.
pub fn projection(c: &ComponentIndex, space: &TensorSpace) -> SparseOperator {
    let diag = (0..space.dim()).filter(|&f| space.component_of(f) == *c);
    SparseOperator::from_triplets(
        space.dim(),
        space.dim(),
        diag.map(|f| (f, f, Rational::one())),
    )
}

/// Projection onto `W_l = ⊕_{t ≥ l} V̄_t^⊗r`.
pub fn level_projection(l: usize, space: &TensorSpace) -> SparseOperator {
    let diag = (0..space.dim()).filter(|&f| space.level_of(f) >= l);
    SparseOperator::from_triplets(
        space.dim(),
        space.dim(),
        diag.map(|f| (f, f, Rational::one())),
    )
}

/// `σ^{[I]}`: `σ` on `V̄_I^⊗r`, zero on the other components.
pub fn restrict(sigma: &SparseOperator, c: &ComponentIndex, space: &TensorSpace) -> SparseOperator {
    sigma.mask(|_, col| space.component_of(col) == *c)
}

/// `σ^I`: `σ` (on `V^⊗l`, `l = ♯I`) acting on the `V` slots of `I` in
/// increasing order, with `η` fixed elsewhere; zero on other components.
pub fn embed_sigma(
    sigma: &SparseOperator,
    c: &ComponentIndex,
    space: &TensorSpace,
) -> Result<SparseOperator> {
    if !space.enhanced {
        return Err(Error::Precondition(
            "embedding needs the enhanced space".into(),
        ));
    }
    let l = c.len();
    let small = TensorSpace::plain(space.n, l);
    if sigma.nrows() != small.dim() || sigma.ncols() != small.dim() {
        return Err(Error::DimensionMismatch {
            expected: small.dim(),
            found: sigma.nrows(),
        });
    }
    let pos = c.positions();
    let cols = sigma.columns();
    let eta = space.eta();
    Ok(from_action(space, space, |t| {
        let in_component = (0..t.len()).all(|k| (t[k] < eta) == c.contains(k));
        if !in_component {
            return Vec::new();
        }
        let sub: Vec<usize> = pos.iter().map(|&p| t[p]).collect();
        cols[small.index(&sub)]
            .iter()
            .map(|(out, v)| {
                let letters = small.tuple(out);
                let mut u = vec![eta; t.len()];
                for (k, &p) in pos.iter().enumerate() {
                    u[p] = letters[k];
                }
                (u, v.clone())
            })
            .collect()
    }))
}

/// The order-preserving representative `ε_{J,I}`: the k-th element of `I`
/// goes to the k-th element of `J`, and likewise for the complements.
pub fn epsilon_perm(j: &ComponentIndex, i: &ComponentIndex) -> Result<Permutation> {
    epsilon_perm_with(j, i, None)
}

/// As [`epsilon_perm`], but the complement of `I` is sent to the complement
/// of `J` through `twist` (a permutation of the complement positions) when given.
pub fn epsilon_perm_with(
    j: &ComponentIndex,
    i: &ComponentIndex,
    twist: Option<&Permutation>,
) -> Result<Permutation> {
    if i.len() != j.len() || i.r() != j.r() {
        return Err(Error::DimensionMismatch {
            expected: i.len(),
            found: j.len(),
        });
    }
    let mut images = vec![0; i.r()];
    for (a, b) in i.positions().iter().zip(j.positions()) {
        images[*a] = b;
    }
    let (ci, cj) = (i.complement().positions(), j.complement().positions());
    for (k, a) in ci.iter().enumerate() {
        let k2 = twist.map_or(k, |t| t.apply(k));
        images[*a] = cj[k2];
    }
    Permutation::new(images)
}

/// `E_{J,I} = Ψ(ε_{J,I})^{[I]}`, carrying `V̄_I^⊗r` onto `V̄_J^⊗r`.
pub fn transfer(
    j: &ComponentIndex,
    i: &ComponentIndex,
    space: &TensorSpace,
) -> Result<SparseOperator> {
    let eps = epsilon_perm(j, i)?;
    Ok(restrict(&psi(&eps, space)?, i, space))
}

/// A formal combination `Σ c·Ψ(s)τ_z` over the spanning pairs of the Brauer
/// algebra.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BrauerElement {
    pub terms: BTreeMap<(Permutation, NormalizedDiagram), Rational>,
}

impl BrauerElement {
    pub fn term(s: Permutation, z: NormalizedDiagram, c: Rational) -> Self {
        let mut e = BrauerElement::default();
        e.add_term(s, z, c);
        e
    }

    pub fn add_term(&mut self, s: Permutation, z: NormalizedDiagram, c: Rational) {
        let key = (s, z);
        let v = self.terms.remove(&key).unwrap_or_default() + c;
        if !v.is_zero() {
            self.terms.insert(key, v);
        }
    }

    /// All pairs `(s, z)` with `s ∈ S_r`, `z ∈ Z_r`.
    pub fn spanning_pairs(r: usize) -> Vec<(Permutation, NormalizedDiagram)> {
        let zs = crate::diagrams::enumerate_normalized(r);
        Permutation::all(r)
            .into_iter()
            .flat_map(|s| zs.iter().map(move |z| (s.clone(), z.clone())))
            .collect()
    }

    /// The operator on `V^⊗r`.
    pub fn realize(&self, form: &FormSpec, r: usize) -> Result<SparseOperator> {
        let space = TensorSpace::plain(form.n, r);
        let mut out = SparseOperator::zero(space.dim(), space.dim());
        for ((s, z), c) in &self.terms {
            out = out.axpy(c, &psi_tau(s, z, form, &space)?)?;
        }
        Ok(out)
    }
}

/// `ρ_I(x) = Σ c·Ψ(s)·ρ_I(τ_z)` on `V̄^⊗r`; `ρ_I(τ_z)` vanishes unless every
/// bar of `z` lies inside `I`.
pub fn rho_i(
    x: &BrauerElement,
    c: &ComponentIndex,
    form: &FormSpec,
    r: usize,
) -> Result<SparseOperator> {
    let space = TensorSpace::enhanced(form.n, r);
    let pr = projection(c, &space);
    let mut out = SparseOperator::zero(space.dim(), space.dim());
    for ((s, z), coeff) in &x.terms {
        if z.support_mask() & !c.mask() != 0 {
            continue;
        }
        let op = psi_tau(s, z, form, &space)?.compose(&pr)?;
        out = out.axpy(coeff, &op)?;
    }
    Ok(out)
}

/// `ρ(x) = Σ_I ρ_I(x)`.
pub fn rho(x: &BrauerElement, form: &FormSpec, r: usize) -> Result<SparseOperator> {
    let space = TensorSpace::enhanced(form.n, r);
    let mut out = SparseOperator::zero(space.dim(), space.dim());
    for ((s, z), coeff) in &x.terms {
        out = out.axpy(coeff, &psi_tau(s, z, form, &space)?)?;
    }
    Ok(out)
}

fn check_step(i: usize, j: usize, small: &ComponentIndex, big: &ComponentIndex) -> Result<()> {
    let diff = big.minus(small);
    if !small.is_subset(big) || i >= j || diff.positions() != vec![i, j] {
        return Err(Error::Precondition(format!(
            "need {big} minus {small} = {{{},{}}}",
            i + 1,
            j + 1
        )));
    }
    Ok(())
}

/// `𝒟_{ij}^{IJ}: V̄_I^⊗r → V̄_J^⊗r`, replacing the `η`s in slots `i, j` by
/// `Σ_p f_p ⊗ f^p`. Requires `J − I = {i, j}`.
pub fn expand(
    i: usize,
    j: usize,
    small: &ComponentIndex,
    big: &ComponentIndex,
    form: &FormSpec,
    space: &TensorSpace,
) -> Result<SparseOperator> {
    check_step(i, j, small, big)?;
    let pairs = form.casimir_pairs();
    let eta = space.eta();
    Ok(from_action(space, space, |t| {
        if (0..t.len()).any(|k| (t[k] < eta) != small.contains(k)) {
            return Vec::new();
        }
        pairs
            .iter()
            .map(|(p, q, c)| {
                let mut u = t.to_vec();
                u[i] = *p;
                u[j] = *q;
                (u, c.clone())
            })
            .collect()
    }))
}

/// `𝒞_{ij}^{IJ}: V̄_J^⊗r → V̄_I^⊗r`, pairing slots `i, j` by `ω` and putting
/// `η` in both. Requires `J − I = {i, j}`.
pub fn contract(
    i: usize,
    j: usize,
    small: &ComponentIndex,
    big: &ComponentIndex,
    form: &FormSpec,
    space: &TensorSpace,
) -> Result<SparseOperator> {
    check_step(i, j, small, big)?;
    let eta = space.eta();
    Ok(from_action(space, space, |t| {
        if (0..t.len()).any(|k| (t[k] < eta) != big.contains(k)) {
            return Vec::new();
        }
        let c = form.omega_basis(t[i], t[j]);
        if c.is_zero() {
            return Vec::new();
        }
        let mut u = t.to_vec();
        u[i] = eta;
        u[j] = eta;
        vec![(u, c.clone())]
    }))
}

/// `P(K, L)`: the perfect matchings of `L − K`, each as a sorted bar list.
pub fn pairings(k: &ComponentIndex, l: &ComponentIndex) -> Result<Vec<Vec<(usize, usize)>>> {
    if !k.is_subset(l) {
        return Err(Error::Precondition(format!("{k} is not inside {l}")));
    }
    let rest = l.minus(k).positions();
    if rest.len() % 2 == 1 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    fn rec(rest: &[usize], cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let Some((&a, tail)) = rest.split_first() else {
            let mut v = cur.clone();
            v.sort();
            out.push(v);
            return;
        };
        for x in 0..tail.len() {
            let mut t = tail.to_vec();
            let b = t.remove(x);
            cur.push((a, b));
            rec(&t, cur, out);
            cur.pop();
        }
    }
    rec(&rest, &mut Vec::new(), &mut out);
    Ok(out)
}

/// `𝒟_Π^{IJ}`: the single-step expansions along the bars of `pi`, applied in
/// the given order. The empty pairing gives `Pr_I`.
pub fn expand_pi(
    pi: &[(usize, usize)],
    small: &ComponentIndex,
    big: &ComponentIndex,
    form: &FormSpec,
    space: &TensorSpace,
) -> Result<SparseOperator> {
    check_pairing(pi, small, big)?;
    let mut cur = *small;
    let mut out = projection(small, space);
    for &(i, j) in pi {
        let next = cur.union(&ComponentIndex::new(space.r, &[i, j])?);
        out = expand(i, j, &cur, &next, form, space)?.compose(&out)?;
        cur = next;
    }
    Ok(out)
}

/// `𝒞_Π^{IJ}`: contractions along the bars of `pi` taking `V̄_J^⊗r` down to
/// `V̄_I^⊗r`, in the given order. The empty pairing gives `Pr_I`.
pub fn contract_pi(
    pi: &[(usize, usize)],
    small: &ComponentIndex,
    big: &ComponentIndex,
    form: &FormSpec,
    space: &TensorSpace,
) -> Result<SparseOperator> {
    check_pairing(pi, small, big)?;
    let mut cur = *big;
    let mut out = projection(big, space);
    for &(i, j) in pi {
        let next = cur.minus(&ComponentIndex::new(space.r, &[i, j])?);
        out = contract(i, j, &next, &cur, form, space)?.compose(&out)?;
        cur = next;
    }
    Ok(out)
}

fn check_pairing(
    pi: &[(usize, usize)],
    small: &ComponentIndex,
    big: &ComponentIndex,
) -> Result<()> {
    let mut covered = ComponentIndex::empty(small.r());
    for &(i, j) in pi {
        let bar = ComponentIndex::new(small.r(), &[i, j])?;
        if i >= j || bar.mask() & covered.mask() != 0 {
            return Err(Error::Precondition(format!("malformed pairing {pi:?}")));
        }
        covered = covered.union(&bar);
    }
    if !small.is_subset(big) || covered != big.minus(small) {
        return Err(Error::Precondition(format!(
            "{pi:?} does not pair {big} minus {small}"
        )));
    }
    Ok(())
}

/// `D_v^w = Φ(e^w)(v) − v` for `v ∈ V̄^⊗r`, `w ∈ V`.
pub fn difference_vector(v: &SparseVec, w: &[Rational], space: &TensorSpace) -> Result<SparseVec> {
    if w.len() != space.n {
        return Err(Error::DimensionMismatch {
            expected: space.n,
            found: w.len(),
        });
    }
    let g = phi(&enhanced_group_element(w), space)?;
    Ok(g.apply(v)?.sub(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::enumerate_normalized;
    use crate::forms::{make_orthogonal, make_symplectic, torus_element, FormKind};
    use proptest::prelude::*;

    fn q(x: i64) -> Rational {
        Rational::from_integer(x)
    }

    fn forms() -> Vec<FormSpec> {
        vec![
            FormSpec::new(FormKind::Orthogonal, 4).unwrap(),
            FormSpec::new(FormKind::Symplectic, 4).unwrap(),
            FormSpec::new(FormKind::Symplectic, 6).unwrap(),
        ]
    }

    #[test]
    fn index_round_trip() {
        for space in [TensorSpace::plain(3, 3), TensorSpace::enhanced(3, 3)] {
            for f in 0..space.dim() {
                assert_eq!(space.index(&space.tuple(f)), f);
            }
        }
        assert_eq!(TensorSpace::enhanced(4, 2).dim(), 25);
        assert_eq!(TensorSpace::plain(6, 3).dim(), 216);
    }

    #[test]
    fn components_partition_the_basis() {
        let space = TensorSpace::enhanced(2, 3);
        let total: usize = ComponentIndex::all(3)
            .iter()
            .map(|c| space.component_basis(c).len())
            .sum();
        assert_eq!(total, space.dim());
        let c = ComponentIndex::new(3, &[0, 2]).unwrap();
        for f in space.component_basis(&c) {
            let t = space.tuple(f);
            assert!(t[0] < 2 && t[1] == 2 && t[2] < 2);
        }
        assert_eq!(ComponentIndex::all(3).len(), 8);
        assert_eq!(c.to_string(), "{1,3}");
    }

    #[test]
    fn psi_swaps_letters() {
        let space = TensorSpace::enhanced(4, 2);
        let s = Permutation::transposition(2, 0, 1).unwrap();
        let p = psi(&s, &space).unwrap();
        let v = SparseVec::unit(space.dim(), space.index(&[0, 1]));
        assert_eq!(
            p.apply(&v).unwrap(),
            SparseVec::unit(space.dim(), space.index(&[1, 0]))
        );
        assert_eq!(
            psi(&Permutation::identity(2), &space).unwrap(),
            SparseOperator::identity(25)
        );
    }

    #[test]
    fn psi_is_a_homomorphism() {
        let space = TensorSpace::plain(2, 3);
        for s in Permutation::all(3) {
            for t in Permutation::all(3) {
                let lhs = psi(&s, &space)
                    .unwrap()
                    .compose(&psi(&t, &space).unwrap())
                    .unwrap();
                assert_eq!(lhs, psi(&s.compose(&t).unwrap(), &space).unwrap());
            }
        }
    }

    #[test]
    fn torus_scales_by_level() {
        let space = TensorSpace::enhanced(3, 3);
        let g = phi(&torus_element(3, q(5)), &space).unwrap();
        for f in 0..space.dim() {
            let l = space.level_of(f);
            assert_eq!(g.get(f, f), q(5).pow((3 - l) as u32));
        }
        assert!(g.is_diagonal());
    }

    #[test]
    fn tau_identities() {
        for form in forms() {
            let n = q(form.n as i64);
            for r in 2..=3 {
                let space = TensorSpace::plain(form.n, r);
                for i in 0..r {
                    for j in i + 1..r {
                        let t = tau(i, j, &form, &space).unwrap();
                        assert_eq!(t.compose(&t).unwrap(), t.scale(&n));
                        let p = t.scale(&n.recip());
                        assert_eq!(p.compose(&p).unwrap(), p);
                        let c = contraction(i, j, &form, r).unwrap();
                        let d = expansion(i, j, &form, r).unwrap();
                        assert_eq!(d.compose(&c).unwrap(), t);
                        let small = TensorSpace::plain(form.n, r - 2).dim();
                        assert_eq!(
                            c.compose(&d).unwrap(),
                            SparseOperator::identity(small).scale(&n)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn tau_rejects_bad_slots() {
        let form = &forms()[0];
        let space = TensorSpace::plain(4, 2);
        assert!(tau(1, 0, form, &space).is_err());
        assert!(tau(0, 2, form, &space).is_err());
    }

    #[test]
    fn disjoint_bars_commute() {
        for form in forms().into_iter().take(2) {
            let space = TensorSpace::plain(form.n, 4);
            for z in enumerate_normalized(4).into_iter().filter(|z| z.t() == 2) {
                let (a, b) = (z.bars()[0], z.bars()[1]);
                let ta = tau(a.0, a.1, &form, &space).unwrap();
                let tb = tau(b.0, b.1, &form, &space).unwrap();
                assert_eq!(ta.compose(&tb).unwrap(), tb.compose(&ta).unwrap());
                assert_eq!(tau_z(&z, &form, &space).unwrap(), tb.compose(&ta).unwrap());
            }
            assert_eq!(
                tau_z(&NormalizedDiagram::empty(4), &form, &space).unwrap(),
                SparseOperator::identity(space.dim())
            );
        }
    }

    #[test]
    fn psi_commutes_with_phi() {
        let g = Matrix::from_i64(&[&[1, 2, 0], &[0, 1, -1], &[3, 0, 1]]).unwrap();
        let space = TensorSpace::plain(3, 3);
        let pg = phi(&g, &space).unwrap();
        for s in Permutation::all(3) {
            let ps = psi(&s, &space).unwrap();
            assert_eq!(ps.compose(&pg).unwrap(), pg.compose(&ps).unwrap());
        }
    }

    #[test]
    fn dphi_small_cases() {
        let x = Matrix::from_i64(&[&[1, 2], &[3, 4]]).unwrap();
        assert_eq!(dphi(&x, &TensorSpace::plain(2, 1)).unwrap(), x.to_sparse());
        assert!(dphi(&Matrix::zeros(2, 2), &TensorSpace::plain(2, 3))
            .unwrap()
            .is_zero());
        assert!(dphi(&x, &TensorSpace::plain(3, 2)).is_err());
    }

    #[test]
    fn embed_identity_is_projection() {
        let space = TensorSpace::enhanced(3, 3);
        for c in ComponentIndex::all(3) {
            let id = SparseOperator::identity(TensorSpace::plain(3, c.len()).dim());
            assert_eq!(
                embed_sigma(&id, &c, &space).unwrap(),
                projection(&c, &space)
            );
            let restricted = restrict(&SparseOperator::identity(space.dim()), &c, &space);
            assert_eq!(restricted, projection(&c, &space));
        }
    }

    #[test]
    fn restriction_blocks_sum_back() {
        let space = TensorSpace::enhanced(2, 2);
        let g = lift(&Matrix::from_i64(&[&[1, 1], &[0, 2]]).unwrap());
        let op = phi(&g, &space).unwrap();
        let mut total = SparseOperator::zero(space.dim(), space.dim());
        for c in ComponentIndex::all(2) {
            total = total.add(&restrict(&op, &c, &space)).unwrap();
        }
        assert_eq!(total, op);
    }

    fn lift(m: &Matrix) -> Matrix {
        crate::forms::lift_to_enhanced(m)
    }

    #[test]
    fn transfer_is_representative_independent() {
        let space = TensorSpace::enhanced(2, 4);
        let i = ComponentIndex::new(4, &[0, 2]).unwrap();
        let j = ComponentIndex::new(4, &[1, 3]).unwrap();
        let base = transfer(&j, &i, &space).unwrap();
        let twist = Permutation::transposition(2, 0, 1).unwrap();
        let alt = epsilon_perm_with(&j, &i, Some(&twist)).unwrap();
        assert_ne!(alt, epsilon_perm(&j, &i).unwrap());
        assert_eq!(restrict(&psi(&alt, &space).unwrap(), &i, &space), base);
        assert_eq!(transfer(&i, &i, &space).unwrap(), projection(&i, &space));
        let lab = LabeledOperator::new(base, "E").between(i, j);
        assert!(lab.respects_blocks(&space));
    }

    #[test]
    fn rho_basics() {
        let form = FormSpec::new(FormKind::Orthogonal, 4).unwrap();
        let r = 2;
        let space = TensorSpace::enhanced(4, r);
        for s in Permutation::all(r) {
            let x = BrauerElement::term(s.clone(), NormalizedDiagram::empty(r), q(1));
            assert_eq!(rho(&x, &form, r).unwrap(), psi(&s, &space).unwrap());
        }
        let bar = NormalizedDiagram::new(r, [(0, 1)]).unwrap();
        let x = BrauerElement::term(Permutation::identity(r), bar, q(1));
        for c in ComponentIndex::all(r).into_iter().filter(|c| !c.is_full()) {
            assert!(rho_i(&x, &c, &form, r).unwrap().is_zero());
        }
        // On the top component ρ reproduces the plain operator.
        let full = ComponentIndex::full(r);
        let top = rho_i(&x, &full, &form, r).unwrap();
        let plain = x.realize(&form, r).unwrap();
        assert_eq!(top, embed_sigma(&plain, &full, &space).unwrap());
    }

    #[test]
    fn rho_i_keeps_the_level_not_the_component() {
        for form in forms().into_iter().take(2) {
            let r = 2;
            let space = TensorSpace::enhanced(form.n, r);
            for c in ComponentIndex::all(r) {
                for (s, z) in BrauerElement::spanning_pairs(r) {
                    let x = BrauerElement::term(s, z, q(1));
                    let op = rho_i(&x, &c, &form, r).unwrap();
                    for (row, col, _) in op.triplets() {
                        assert_eq!(space.component_of(col), c);
                        assert_eq!(space.level_of(row), c.len());
                    }
                }
            }
            // Ψ(s) moves V̄_{1} onto V̄_{2}.
            let one = ComponentIndex::new(r, &[0]).unwrap();
            let swap = Permutation::transposition(r, 0, 1).unwrap();
            let x = BrauerElement::term(swap, NormalizedDiagram::empty(r), q(1));
            let op = rho_i(&x, &one, &form, r).unwrap();
            assert!(op
                .triplets()
                .all(|(row, _, _)| space.component_of(row) != one));
        }
    }

    #[test]
    fn expand_contract_trace() {
        for form in forms().into_iter().take(2) {
            let space = TensorSpace::enhanced(form.n, 3);
            let small = ComponentIndex::new(3, &[1]).unwrap();
            let big = ComponentIndex::full(3);
            let d = expand(0, 2, &small, &big, &form, &space).unwrap();
            let c = contract(0, 2, &small, &big, &form, &space).unwrap();
            let n = q(form.n as i64);
            assert_eq!(c.compose(&d).unwrap(), projection(&small, &space).scale(&n));
            assert!(LabeledOperator::new(d, "D")
                .between(small, big)
                .respects_blocks(&space));
            assert!(LabeledOperator::new(c, "C")
                .between(big, small)
                .respects_blocks(&space));
            assert!(expand(0, 1, &small, &big, &form, &space).is_err());
        }
    }

    #[test]
    fn pairing_products_are_order_independent() {
        let form = FormSpec::new(FormKind::Orthogonal, 2).unwrap();
        let space = TensorSpace::enhanced(2, 4);
        let small = ComponentIndex::empty(4);
        let big = ComponentIndex::full(4);
        let ps = pairings(&small, &big).unwrap();
        assert_eq!(ps.len(), 3);
        for p in &ps {
            let mut rev = p.clone();
            rev.reverse();
            assert_eq!(
                expand_pi(p, &small, &big, &form, &space).unwrap(),
                expand_pi(&rev, &small, &big, &form, &space).unwrap()
            );
            assert_eq!(
                contract_pi(p, &small, &big, &form, &space).unwrap(),
                contract_pi(&rev, &small, &big, &form, &space).unwrap()
            );
        }
        assert_eq!(
            expand_pi(&[], &big, &big, &form, &space).unwrap(),
            projection(&big, &space)
        );
        assert!(expand_pi(&[(0, 1)], &small, &big, &form, &space).is_err());
    }

    #[test]
    fn difference_vector_examples() {
        let space = TensorSpace::enhanced(4, 2);
        let eta = space.eta();
        let v = SparseVec::unit(space.dim(), space.index(&[eta, eta]));
        let zero = vec![q(0); 4];
        assert!(difference_vector(&v, &zero, &space).unwrap().is_zero());
        let w = vec![q(1), q(0), q(0), q(0)];
        let got = difference_vector(&v, &w, &space).unwrap();
        let expect = SparseVec::from_entries(
            space.dim(),
            [
                (space.index(&[0, 0]), q(1)),
                (space.index(&[0, eta]), q(1)),
                (space.index(&[eta, 0]), q(1)),
            ],
        );
        assert_eq!(got, expect);
    }

    #[test]
    fn groups_preserve_tau() {
        let g = make_orthogonal(3).unwrap();
        let h = make_symplectic(4).unwrap();
        for grp in [g, h] {
            let space = TensorSpace::plain(grp.n(), 2);
            let t = tau(0, 1, &grp.form, &space).unwrap();
            for x in &grp.lie_basis {
                let dx = dphi(x, &space).unwrap();
                assert!(dx.commutator(&t).unwrap().is_zero());
            }
        }
    }

    fn small_int_matrix(d: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec(-2i64..3, d * d).prop_map(move |v| {
            let rows: Vec<Vec<Rational>> = v
                .chunks(d)
                .map(|c| c.iter().map(|&x| q(x)).collect())
                .collect();
            Matrix::from_rows(&rows).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn phi_is_multiplicative(g in small_int_matrix(3), h in small_int_matrix(3)) {
            let space = TensorSpace::plain(3, 2);
            let lhs = phi(&g, &space).unwrap().compose(&phi(&h, &space).unwrap()).unwrap();
            prop_assert_eq!(lhs, phi(&g.mul(&h).unwrap(), &space).unwrap());
            prop_assert_eq!(phi(&Matrix::identity(3), &space).unwrap(), SparseOperator::identity(9));
        }

        #[test]
        fn dphi_is_a_lie_map(x in small_int_matrix(3), y in small_int_matrix(3)) {
            let space = TensorSpace::enhanced(2, 2);
            let dx = dphi(&x, &space).unwrap();
            let dy = dphi(&y, &space).unwrap();
            let lhs = dphi(&x.commutator(&y).unwrap(), &space).unwrap();
            prop_assert_eq!(lhs, dx.commutator(&dy).unwrap());
        }

        #[test]
        fn embedding_is_multiplicative(
            a in small_int_matrix(2), b in small_int_matrix(2), mask in 1u64..8,
        ) {
            let space = TensorSpace::enhanced(2, 3);
            let c = ComponentIndex::from_mask(3, mask);
            let small = TensorSpace::plain(2, c.len());
            let sa = phi(&a, &small).unwrap();
            let sb = phi(&b, &small).unwrap();
            let ea = embed_sigma(&sa, &c, &space).unwrap();
            let eb = embed_sigma(&sb, &c, &space).unwrap();
            prop_assert_eq!(
                ea.compose(&eb).unwrap(),
                embed_sigma(&sa.compose(&sb).unwrap(), &c, &space).unwrap()
            );
            let lab = LabeledOperator::new(ea, "sigma^I").between(c, c);
            prop_assert!(lab.respects_blocks(&space));
        }
    }
}
