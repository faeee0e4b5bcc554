//! Bilinear forms, classical Lie algebras and the enhanced-group generators.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    Orthogonal,
    Symplectic,
}

impl FormKind {
    /// `+1` for a symmetric form, `-1` for a skew one.
    pub fn epsilon(self) -> i64 {
        match self {
            FormKind::Orthogonal => 1,
            FormKind::Symplectic => -1,
        }
    }

    pub fn from_epsilon(eps: i64) -> Result<Self> {
        match eps {
            1 => Ok(FormKind::Orthogonal),
            -1 => Ok(FormKind::Symplectic),
            _ => Err(Error::Precondition(format!(
                "epsilon must be +1 or -1, got {eps}"
            ))),
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            FormKind::Orthogonal => "O",
            FormKind::Symplectic => "Sp",
        }
    }
}

impl fmt::Display for FormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormKind::Orthogonal => "orthogonal",
            FormKind::Symplectic => "symplectic",
        })
    }
}

impl FromStr for FormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orthogonal" | "O" | "o" => Ok(FormKind::Orthogonal),
            "symplectic" | "Sp" | "sp" => Ok(FormKind::Symplectic),
            _ => Err(Error::Parse(format!("unknown form {s:?}"))),
        }
    }
}

/// The form `ω(u, v) = uᵀ·gram·v` on `V = Q^n` and its dual basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormSpec {
    pub kind: FormKind,
    pub n: usize,
    pub gram: Matrix,
    /// Column `p` holds the coordinates of `f^p`.
    pub dual: Matrix,
}

impl FormSpec {
    pub fn new(kind: FormKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("n must be at least 1".into()));
        }
        let gram = match kind {
            FormKind::Orthogonal => Matrix::identity(n),
            FormKind::Symplectic => {
                if !n.is_multiple_of(2) {
                    return Err(Error::InvalidDimension(format!(
                        "symplectic forms need even n, got {n}"
                    )));
                }
                let m = n / 2;
                let mut j = Matrix::zeros(n, n);
                for i in 0..m {
                    j.set(i, m + i, Rational::one());
                    j.set(m + i, i, -Rational::one());
                }
                j
            }
        };
        // ω(f_p, f^q) = (gram · dual)_pq = δ_pq.
        let dual = gram.inverse().expect("gram matrices are invertible");
        Ok(FormSpec {
            kind,
            n,
            gram,
            dual,
        })
    }

    pub fn epsilon(&self) -> i64 {
        self.kind.epsilon()
    }

    /// `ω(f_p, f_q)`.
    pub fn omega_basis(&self, p: usize, q: usize) -> &Rational {
        self.gram.get(p, q)
    }

    pub fn omega(&self, u: &[Rational], v: &[Rational]) -> Result<Rational> {
        let gv = self.gram.mul_vec(v)?;
        Ok(u.iter().zip(&gv).map(|(a, b)| a * b).sum())
    }

    /// Nonzero coordinates of `f^p`.
    pub fn dual_vector(&self, p: usize) -> Vec<(usize, Rational)> {
        (0..self.n)
            .filter_map(|q| {
                let c = self.dual.get(q, p);
                (!c.is_zero()).then(|| (q, c.clone()))
            })
            .collect()
    }

    /// Nonzero coefficients of `Σ_p f_p ⊗ f^p` as `(a, b, c)` meaning `c·f_a⊗f_b`.
    pub fn casimir_pairs(&self) -> Vec<(usize, usize, Rational)> {
        let mut out = Vec::new();
        for p in 0..self.n {
            for (q, c) in self.dual_vector(p) {
                out.push((p, q, c));
            }
        }
        out
    }
}

/// A classical group given by its form, a Lie algebra basis and component
/// representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    pub form: FormSpec,
    pub lie_basis: Vec<Matrix>,
    pub component_reps: Vec<Matrix>,
}

impl GroupSpec {
    pub fn kind(&self) -> FormKind {
        self.form.kind
    }

    pub fn n(&self) -> usize {
        self.form.n
    }

    /// `Xᵀ·gram + gram·X = 0`.
    pub fn is_lie_element(&self, x: &Matrix) -> bool {
        let g = &self.form.gram;
        let lhs = x.transpose().mul(g).and_then(|a| a.add(&g.mul(x)?));
        matches!(lhs, Ok(m) if m.is_zero())
    }

    /// `gᵀ·gram·g = gram`.
    pub fn is_group_element(&self, x: &Matrix) -> bool {
        let g = &self.form.gram;
        matches!(x.transpose().mul(g).and_then(|a| a.mul(x)), Ok(m) if &m == g)
    }

    /// Diagonal group elements, usable as cheap grading constraints: the
    /// coordinate sign flips for the orthogonal group, nothing for the
    /// symplectic group (whose diagonal Lie elements already do that job).
    pub fn diagonal_elements(&self) -> Vec<Matrix> {
        match self.kind() {
            FormKind::Orthogonal => (0..self.n())
                .map(|k| {
                    let mut d = vec![Rational::one(); self.n()];
                    d[k] = -Rational::one();
                    Matrix::diag(&d)
                })
                .collect(),
            FormKind::Symplectic => Vec::new(),
        }
    }

    /// A group element `(I − X)^{-1}(I + X)` for a random small integer
    /// combination `X` of the Lie basis.
    pub fn random_group_element(&self, rng: &mut impl Rng) -> Matrix {
        let n = self.n();
        loop {
            let mut x = Matrix::zeros(n, n);
            for b in &self.lie_basis {
                let c = Rational::from_integer(rng.gen_range(-2..=2));
                x = x.add(&b.scale(&c)).expect("square");
            }
            let id = Matrix::identity(n);
            if let Some(inv) = id.sub(&x).expect("square").inverse() {
                let g = inv.mul(&id.add(&x).expect("square")).expect("square");
                debug_assert!(self.is_group_element(&g));
                return g;
            }
        }
    }
}

pub fn make_orthogonal(n: usize) -> Result<GroupSpec> {
    let form = FormSpec::new(FormKind::Orthogonal, n)?;
    let mut lie_basis = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            let x = Matrix::unit(n, n, p, q).sub(&Matrix::unit(n, n, q, p))?;
            lie_basis.push(x);
        }
    }
    let mut d = vec![Rational::one(); n];
    d[0] = -Rational::one();
    Ok(GroupSpec {
        form,
        lie_basis,
        component_reps: vec![Matrix::diag(&d)],
    })
}

pub fn make_symplectic(n: usize) -> Result<GroupSpec> {
    let form = FormSpec::new(FormKind::Symplectic, n)?;
    let m = n / 2;
    let e = |i, j| Matrix::unit(n, n, i, j);
    let mut lie_basis = Vec::new();
    for i in 0..m {
        for j in 0..m {
            lie_basis.push(e(i, j).sub(&e(m + j, m + i))?);
        }
    }
    for i in 0..m {
        for j in i..m {
            lie_basis.push(if i == j {
                e(i, m + i)
            } else {
                e(i, m + j).add(&e(j, m + i))?
            });
        }
    }
    for i in 0..m {
        for j in i..m {
            lie_basis.push(if i == j {
                e(m + i, i)
            } else {
                e(m + i, j).add(&e(m + j, i))?
            });
        }
    }
    Ok(GroupSpec {
        form,
        lie_basis,
        component_reps: Vec::new(),
    })
}

pub fn make_group(kind: FormKind, n: usize) -> Result<GroupSpec> {
    match kind {
        FormKind::Orthogonal => make_orthogonal(n),
        FormKind::Symplectic => make_symplectic(n),
    }
}

/// `diag(g, 1)`: a group element of `V` acting on `V ⊕ Qη`.
pub fn lift_to_enhanced(g: &Matrix) -> Matrix {
    let n = g.nrows();
    let mut out = Matrix::identity(n + 1);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, g.get(i, j).clone());
        }
    }
    out
}

/// `diag(X, 0)`: a Lie algebra element of `V` acting on `V ⊕ Qη`.
pub fn lift_lie_to_enhanced(x: &Matrix) -> Matrix {
    let n = x.nrows();
    let mut out = Matrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, x.get(i, j).clone());
        }
    }
    out
}

/// The matrix of `e^v`: identity on `V`, `η ↦ v + η`.
pub fn enhanced_group_element(v: &[Rational]) -> Matrix {
    let n = v.len();
    let mut out = Matrix::identity(n + 1);
    for (i, c) in v.iter().enumerate() {
        out.set(i, n, c.clone());
    }
    out
}

/// `diag(1, …, 1, c)`.
pub fn torus_element(n: usize, c: Rational) -> Matrix {
    let mut out = Matrix::identity(n + 1);
    out.set(n, n, c);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnhancedGenerators {
    /// `N_i` has a single 1 at row `i`, column `n`.
    pub nilpotents: Vec<Matrix>,
    /// Single 1 at `(n, n)`.
    pub torus: Matrix,
}

impl EnhancedGenerators {
    pub fn new(n: usize) -> Self {
        EnhancedGenerators {
            nilpotents: (0..n).map(|i| Matrix::unit(n + 1, n + 1, i, n)).collect(),
            torus: Matrix::unit(n + 1, n + 1, n, n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(x: i64) -> Rational {
        Rational::from_integer(x)
    }

    fn check_dual(form: &FormSpec) {
        let prod = form.gram.mul(&form.dual).unwrap();
        assert_eq!(prod, Matrix::identity(form.n));
    }

    #[test]
    fn orthogonal_construction() {
        for n in 1..=6 {
            let g = make_orthogonal(n).unwrap();
            assert_eq!(g.lie_basis.len(), n * (n - 1) / 2);
            check_dual(&g.form);
            for x in &g.lie_basis {
                assert!(x.transpose().add(x).unwrap().is_zero());
                assert!(g.is_lie_element(x));
            }
            let s = &g.component_reps[0];
            assert_eq!(s.transpose().mul(s).unwrap(), Matrix::identity(n));
            assert_eq!(s.det().unwrap(), q(-1));
            for d in g.diagonal_elements() {
                assert!(g.is_group_element(&d));
            }
        }
        assert_eq!(make_orthogonal(4).unwrap().lie_basis.len(), 6);
        assert_eq!(make_orthogonal(6).unwrap().lie_basis.len(), 15);
    }

    #[test]
    fn symplectic_construction() {
        let g = make_symplectic(6).unwrap();
        assert_eq!(g.lie_basis.len(), 21);
        assert!(g.component_reps.is_empty());
        check_dual(&g.form);
        for x in &g.lie_basis {
            assert!(g.is_lie_element(x));
        }
        // f^p = f_{p+m} for p < m and f^p = -f_{p-m} for p >= m.
        let m = 3;
        for p in 0..6 {
            let expect = if p < m {
                vec![(p + m, q(1))]
            } else {
                vec![(p - m, q(-1))]
            };
            assert_eq!(g.form.dual_vector(p), expect);
        }
        assert!(matches!(
            make_symplectic(5),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn lie_bases_are_independent() {
        for g in [make_orthogonal(5).unwrap(), make_symplectic(6).unwrap()] {
            let n = g.n();
            let vecs: Vec<_> = g
                .lie_basis
                .iter()
                .map(|x| x.to_sparse().vectorize())
                .collect();
            assert_eq!(
                crate::linalg::echelonize_in(n * n, &vecs).unwrap().dim(),
                g.lie_basis.len()
            );
        }
    }

    #[test]
    fn cayley_elements_preserve_the_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for g in [make_orthogonal(4).unwrap(), make_symplectic(4).unwrap()] {
            for _ in 0..3 {
                assert!(g.is_group_element(&g.random_group_element(&mut rng)));
            }
        }
    }

    #[test]
    fn enhanced_elements() {
        let n = 4;
        assert_eq!(
            lift_to_enhanced(&Matrix::identity(n)),
            Matrix::identity(n + 1)
        );
        let gens = EnhancedGenerators::new(n);
        for (i, nil) in gens.nilpotents.iter().enumerate() {
            assert!(nil.mul(nil).unwrap().is_zero());
            let mut v = vec![q(0); n];
            v[i] = q(1);
            assert_eq!(
                enhanced_group_element(&v),
                Matrix::identity(n + 1).add(nil).unwrap()
            );
        }
        assert_eq!(
            enhanced_group_element(&vec![q(0); n]),
            Matrix::identity(n + 1)
        );
        let v = vec![q(1), q(-2), q(0), q(3)];
        let w = vec![q(2), q(5), q(-1), q(0)];
        let vw: Vec<_> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
        assert_eq!(
            enhanced_group_element(&v)
                .mul(&enhanced_group_element(&w))
                .unwrap(),
            enhanced_group_element(&vw)
        );
        let a = Matrix::from_i64(&[&[1, 2], &[0, 1]]).unwrap();
        let b = Matrix::from_i64(&[&[3, 0], &[1, -1]]).unwrap();
        assert_eq!(
            lift_to_enhanced(&a.mul(&b).unwrap()),
            lift_to_enhanced(&a).mul(&lift_to_enhanced(&b)).unwrap()
        );
        let eta = lift_to_enhanced(&a).column(2);
        assert_eq!(eta, vec![q(0), q(0), q(1)]);
    }
}
