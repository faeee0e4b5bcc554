//! Brauer diagrams, normalized bar diagrams and permutations.
//!
//! Positions are 0-based internally. Text output uses 1-based columns, e.g.
//! `T1-B1 T2-T3 B2-B3`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::Rational;

/// `(2r-1)!!`, the number of perfect matchings on `2r` points.
pub fn matchings_count(r: usize) -> u64 {
    (1..=r as u64).map(|k| 2 * k - 1).product()
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k as u64).fold(1, |acc, i| acc * (n as u64 - i) / (i + 1))
}

/// A bijection of `{0, …, r-1}`; `images[k]` is the image of `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(Error::Precondition(format!(
                    "{images:?} is not a bijection"
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(r: usize) -> Self {
        Permutation {
            images: (0..r).collect(),
        }
    }

    pub fn transposition(r: usize, i: usize, j: usize) -> Result<Self> {
        if i >= r || j >= r {
            return Err(Error::OutOfRange(format!(
                "transposition ({i} {j}) in S_{r}"
            )));
        }
        let mut images: Vec<usize> = (0..r).collect();
        images.swap(i, j);
        Ok(Permutation { images })
    }

    pub fn r(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, k: usize) -> usize {
        self.images[k]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, &i)| k == i)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.r() != other.r() {
            return Err(Error::DimensionMismatch {
                expected: self.r(),
                found: other.r(),
            });
        }
        Ok(Permutation {
            images: other.images.iter().map(|&k| self.images[k]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.r()];
        for (k, &i) in self.images.iter().enumerate() {
            inv[i] = k;
        }
        Permutation { images: inv }
    }

    /// All of `S_r` in lexicographic order of the image arrays.
    pub fn all(r: usize) -> Vec<Permutation> {
        let mut cur: Vec<usize> = (0..r).collect();
        let mut out = vec![Permutation {
            images: cur.clone(),
        }];
        // Standard next-permutation step.
        loop {
            let Some(i) = (1..r).rev().find(|&i| cur[i - 1] < cur[i]) else {
                return out;
            };
            let j = (i..r)
                .rev()
                .find(|&j| cur[j] > cur[i - 1])
                .expect("pivot has a successor");
            cur.swap(i - 1, j);
            cur[i..].reverse();
            out.push(Permutation {
                images: cur.clone(),
            });
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Row {
    Top,
    Bottom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dot {
    pub row: Row,
    pub col: usize,
}

impl Dot {
    pub fn top(col: usize) -> Self {
        Dot { row: Row::Top, col }
    }

    pub fn bottom(col: usize) -> Self {
        Dot {
            row: Row::Bottom,
            col,
        }
    }

    /// Label in the odd/even numbering: top columns get odd labels, bottom
    /// columns even ones.
    pub fn numbered(&self) -> usize {
        match self.row {
            Row::Top => 2 * self.col + 1,
            Row::Bottom => 2 * self.col + 2,
        }
    }
}

impl fmt::Display for Dot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.row {
            Row::Top => 'T',
            Row::Bottom => 'B',
        };
        write!(f, "{c}{}", self.col + 1)
    }
}

impl FromStr for Dot {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let row = match s.chars().next() {
            Some('T') => Row::Top,
            Some('B') => Row::Bottom,
            _ => return Err(Error::Parse(format!("bad dot {s:?}"))),
        };
        let col: usize = s[1..]
            .parse()
            .map_err(|_| Error::Parse(format!("bad dot {s:?}")))?;
        if col == 0 {
            return Err(Error::Parse(format!("columns are 1-based: {s:?}")));
        }
        Ok(Dot { row, col: col - 1 })
    }
}

/// A perfect matching on the `2r` dots of two rows.
///
/// Edges are stored with the smaller dot first and sorted, so derived
/// equality and ordering are the canonical ones. As an operator the bottom
/// row is the input and the top row the output.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BrauerDiagram {
    r: usize,
    edges: Vec<(Dot, Dot)>,
    // partner[dot index], top dots first.
    partner: Vec<Dot>,
}

impl BrauerDiagram {
    fn slot(r: usize, d: Dot) -> usize {
        match d.row {
            Row::Top => d.col,
            Row::Bottom => r + d.col,
        }
    }

    pub fn from_edges(r: usize, edges: impl IntoIterator<Item = (Dot, Dot)>) -> Result<Self> {
        let mut partner: Vec<Option<Dot>> = vec![None; 2 * r];
        let mut list = Vec::with_capacity(r);
        for (a, b) in edges {
            if a.col >= r || b.col >= r {
                return Err(Error::OutOfRange(format!("edge {a}-{b} with r = {r}")));
            }
            if a == b {
                return Err(Error::Precondition(format!("loop edge at {a}")));
            }
            for (x, y) in [(a, b), (b, a)] {
                let s = &mut partner[Self::slot(r, x)];
                if s.is_some() {
                    return Err(Error::Precondition(format!("dot {x} has two edges")));
                }
                *s = Some(y);
            }
            list.push(if a < b { (a, b) } else { (b, a) });
        }
        let partner: Vec<Dot> = partner
            .into_iter()
            .enumerate()
            .map(|(k, p)| {
                p.ok_or_else(|| {
                    let d = if k < r {
                        Dot::top(k)
                    } else {
                        Dot::bottom(k - r)
                    };
                    Error::Precondition(format!("dot {d} is unmatched"))
                })
            })
            .collect::<Result<_>>()?;
        list.sort();
        Ok(BrauerDiagram {
            r,
            edges: list,
            partner,
        })
    }

    pub fn identity(r: usize) -> Self {
        Self::from_permutation(&Permutation::identity(r))
    }

    /// Bottom dot `k` is joined to top dot `s(k)`.
    pub fn from_permutation(s: &Permutation) -> Self {
        Self::from_edges(
            s.r(),
            (0..s.r()).map(|k| (Dot::top(s.apply(k)), Dot::bottom(k))),
        )
        .expect("a permutation gives a perfect matching")
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn edges(&self) -> &[(Dot, Dot)] {
        &self.edges
    }

    pub fn partner(&self, d: Dot) -> Dot {
        self.partner[Self::slot(self.r, d)]
    }

    /// Edges within the top row, as column pairs.
    pub fn top_bars(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .filter(|(a, b)| a.row == Row::Top && b.row == Row::Top)
            .map(|(a, b)| (a.col, b.col))
            .collect()
    }

    pub fn bottom_bars(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .filter(|(a, b)| a.row == Row::Bottom && b.row == Row::Bottom)
            .map(|(a, b)| (a.col, b.col))
            .collect()
    }

    /// Rendering with the odd/even dot numbers, e.g. `1-2 3-5 4-6`.
    pub fn to_numbered_text(&self) -> String {
        let mut pairs: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|(a, b)| {
                let (x, y) = (a.numbered(), b.numbered());
                (x.min(y), x.max(y))
            })
            .collect();
        pairs.sort();
        pairs
            .iter()
            .map(|(x, y)| format!("{x}-{y}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for BrauerDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for BrauerDiagram {
    type Err = Error;

    /// Parses `T1-B1 T2-T3 B2-B3`; `r` is inferred from the edge count.
    fn from_str(s: &str) -> Result<Self> {
        let edges = s
            .split_whitespace()
            .map(|tok| {
                let (a, b) = tok
                    .split_once('-')
                    .ok_or_else(|| Error::Parse(format!("bad edge {tok:?}")))?;
                Ok((a.parse::<Dot>()?, b.parse::<Dot>()?))
            })
            .collect::<Result<Vec<_>>>()?;
        let r = edges.len();
        BrauerDiagram::from_edges(r, edges)
    }
}

/// A set of disjoint bars `{i, j}` on `r` columns, `i < j`, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalizedDiagram {
    r: usize,
    bars: Vec<(usize, usize)>,
}

impl NormalizedDiagram {
    pub fn new(r: usize, bars: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut used = vec![false; r];
        let mut list = Vec::new();
        for (i, j) in bars {
            let (i, j) = (i.min(j), i.max(j));
            if j >= r {
                return Err(Error::OutOfRange(format!("bar {{{i},{j}}} with r = {r}")));
            }
            if i == j || used[i] || used[j] {
                return Err(Error::Precondition(format!("bars overlap at {{{i},{j}}}")));
            }
            used[i] = true;
            used[j] = true;
            list.push((i, j));
        }
        list.sort();
        Ok(NormalizedDiagram { r, bars: list })
    }

    /// The bar-free diagram `x_0`.
    pub fn empty(r: usize) -> Self {
        NormalizedDiagram {
            r,
            bars: Vec::new(),
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn bars(&self) -> &[(usize, usize)] {
        &self.bars
    }

    pub fn t(&self) -> usize {
        self.bars.len()
    }

    /// The set of columns touched by a bar, as a bitmask.
    pub fn support_mask(&self) -> u64 {
        self.bars.iter().fold(0, |m, (i, j)| m | 1 << i | 1 << j)
    }

    /// Columns touched by a bar, sorted.
    pub fn support(&self) -> Vec<usize> {
        let m = self.support_mask();
        (0..self.r).filter(|k| m >> k & 1 == 1).collect()
    }

    /// Each bar appears in both rows; other columns are vertical.
    pub fn to_diagram(&self) -> BrauerDiagram {
        let m = self.support_mask();
        let mut edges: Vec<(Dot, Dot)> = Vec::new();
        for &(i, j) in &self.bars {
            edges.push((Dot::top(i), Dot::top(j)));
            edges.push((Dot::bottom(i), Dot::bottom(j)));
        }
        for k in (0..self.r).filter(|k| m >> k & 1 == 0) {
            edges.push((Dot::top(k), Dot::bottom(k)));
        }
        BrauerDiagram::from_edges(self.r, edges).expect("disjoint bars give a matching")
    }

    /// The single-bar diagrams, one per bar.
    pub fn bar_diagrams(&self) -> Vec<BrauerDiagram> {
        self.bars
            .iter()
            .map(|&b| {
                NormalizedDiagram {
                    r: self.r,
                    bars: vec![b],
                }
                .to_diagram()
            })
            .collect()
    }
}

impl fmt::Display for NormalizedDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bars.is_empty() {
            return f.write_str("x0");
        }
        let parts: Vec<String> = self
            .bars
            .iter()
            .map(|(i, j)| format!("{{{},{}}}", i + 1, j + 1))
            .collect();
        f.write_str(&parts.join(""))
    }
}

/// All perfect matchings on `2r` dots, in lexicographic order of the sorted
/// edge lists. `r = 0` gives the single empty diagram.
pub fn enumerate_all(r: usize) -> Vec<BrauerDiagram> {
    let dots: Vec<Dot> = (0..r)
        .map(Dot::top)
        .chain((0..r).map(Dot::bottom))
        .collect();
    let mut out = Vec::new();
    let mut edges = Vec::with_capacity(r);
    matchings(&dots, &mut edges, &mut |e| {
        out.push(BrauerDiagram::from_edges(r, e.iter().copied()).expect("valid matching"));
    });
    out
}

fn matchings(rest: &[Dot], edges: &mut Vec<(Dot, Dot)>, emit: &mut impl FnMut(&[(Dot, Dot)])) {
    let Some((&first, tail)) = rest.split_first() else {
        emit(edges);
        return;
    };
    for k in 0..tail.len() {
        let mut remaining = tail.to_vec();
        let mate = remaining.remove(k);
        edges.push((first, mate));
        matchings(&remaining, edges, emit);
        edges.pop();
    }
}

/// All normalized diagrams with exactly `t` bars, in lexicographic order of
/// the bar lists.
pub fn enumerate_normalized_t(r: usize, t: usize) -> Vec<NormalizedDiagram> {
    let mut out = Vec::new();
    let mut bars = Vec::new();
    partial_matchings(r, 0, t, 0, &mut bars, &mut out);
    out
}

fn partial_matchings(
    r: usize,
    start: usize,
    t: usize,
    used: u64,
    bars: &mut Vec<(usize, usize)>,
    out: &mut Vec<NormalizedDiagram>,
) {
    if bars.len() == t {
        out.push(NormalizedDiagram {
            r,
            bars: bars.clone(),
        });
        return;
    }
    for i in start..r {
        if used >> i & 1 == 1 {
            continue;
        }
        for j in i + 1..r {
            if used >> j & 1 == 1 {
                continue;
            }
            bars.push((i, j));
            partial_matchings(r, i + 1, t, used | 1 << i | 1 << j, bars, out);
            bars.pop();
        }
    }
}

/// `Z_r`, grouped by bar count `t = 0, …, ⌊r/2⌋`.
pub fn enumerate_normalized(r: usize) -> Vec<NormalizedDiagram> {
    (0..=r / 2)
        .flat_map(|t| enumerate_normalized_t(r, t))
        .collect()
}

/// Stacks `d2` below `d1` (so `d2` acts first) and erases closed loops.
/// Returns the composite and `delta^loops`.
pub fn compose(
    d1: &BrauerDiagram,
    d2: &BrauerDiagram,
    delta: &Rational,
) -> Result<(BrauerDiagram, Rational)> {
    let (diagram, loops) = compose_counting(d1, d2)?;
    Ok((diagram, delta.pow(loops as u32)))
}

/// Composite diagram together with the number of closed loops.
pub fn compose_counting(d1: &BrauerDiagram, d2: &BrauerDiagram) -> Result<(BrauerDiagram, usize)> {
    if d1.r != d2.r {
        return Err(Error::DimensionMismatch {
            expected: d1.r,
            found: d2.r,
        });
    }
    let r = d1.r;
    // Middle row: d1's bottom glued to d2's top.
    let mut visited = vec![false; r];
    let mut edges: Vec<(Dot, Dot)> = Vec::with_capacity(r);
    let mut done = vec![false; 2 * r];

    // Walk from an endpoint inside d1 (`in_d1`) until leaving the middle row.
    let walk = |mut at: Dot, mut in_d1: bool, visited: &mut Vec<bool>| -> Dot {
        loop {
            let next = if in_d1 {
                d1.partner(at)
            } else {
                d2.partner(at)
            };
            match (in_d1, next.row) {
                (true, Row::Top) => return Dot::top(next.col),
                (false, Row::Bottom) => return Dot::bottom(next.col),
                (true, Row::Bottom) => {
                    visited[next.col] = true;
                    at = Dot::top(next.col);
                    in_d1 = false;
                }
                (false, Row::Top) => {
                    visited[next.col] = true;
                    at = Dot::bottom(next.col);
                    in_d1 = true;
                }
            }
        }
    };

    for c in 0..r {
        for (start, in_d1) in [(Dot::top(c), true), (Dot::bottom(c), false)] {
            let key = BrauerDiagram::slot(r, start);
            if done[key] {
                continue;
            }
            let end = walk(start, in_d1, &mut visited);
            done[key] = true;
            done[BrauerDiagram::slot(r, end)] = true;
            edges.push((start, end));
        }
    }

    let mut loops = 0;
    for c in 0..r {
        if visited[c] {
            continue;
        }
        loops += 1;
        let mut at = c;
        loop {
            visited[at] = true;
            // Down through d2 from the middle, then back up through d1.
            let p = d2.partner(Dot::top(at));
            debug_assert_eq!(p.row, Row::Top);
            visited[p.col] = true;
            let q = d1.partner(Dot::bottom(p.col));
            debug_assert_eq!(q.row, Row::Bottom);
            if q.col == c {
                break;
            }
            at = q.col;
        }
    }
    Ok((BrauerDiagram::from_edges(r, edges)?, loops))
}

/// The diagram of `Ψ(s)·τ_z`: `z` below the permutation diagram of `s`.
pub fn build(s: &Permutation, z: &NormalizedDiagram) -> Result<BrauerDiagram> {
    let (d, loops) = compose_counting(&BrauerDiagram::from_permutation(s), &z.to_diagram())?;
    debug_assert_eq!(loops, 0);
    Ok(d)
}

/// Splits `d` into a permutation and the bars of its bottom row.
///
/// Many permutations give the same diagram once bars are present; the one
/// returned sends the p-th bottom bar `{a, b}` (a < b) to the p-th top bar
/// `{c, d}` (c < d) with `a ↦ c`, `b ↦ d`, and follows the through-edges
/// elsewhere.
pub fn factorize(d: &BrauerDiagram) -> (Permutation, NormalizedDiagram) {
    let r = d.r();
    let bottom = d.bottom_bars();
    let top = d.top_bars();
    let mut images = vec![usize::MAX; r];
    for (&(a, b), &(c, e)) in bottom.iter().zip(&top) {
        images[a] = c;
        images[b] = e;
    }
    for k in 0..r {
        if images[k] == usize::MAX {
            let p = d.partner(Dot::bottom(k));
            debug_assert_eq!(p.row, Row::Top);
            images[k] = p.col;
        }
    }
    let s = Permutation::new(images).expect("factorization yields a bijection");
    (s, NormalizedDiagram { r, bars: bottom })
}

/// Whether `(s, z)` is the pair [`factorize`] would return for its diagram.
pub fn is_canonical_pair(s: &Permutation, z: &NormalizedDiagram) -> bool {
    let images: Vec<(usize, usize)> = z
        .bars()
        .iter()
        .map(|&(a, b)| (s.apply(a), s.apply(b)))
        .collect();
    images.iter().all(|(c, d)| c < d) && images.windows(2).all(|w| w[0] < w[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(s: &str) -> BrauerDiagram {
        s.parse().unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_all(0).len(), 1);
        assert_eq!(enumerate_all(1).len(), 1);
        assert_eq!(enumerate_all(2).len(), 3);
        assert_eq!(enumerate_all(3).len(), 15);
        for r in 0..=5 {
            assert_eq!(enumerate_all(r).len() as u64, matchings_count(r));
        }
        assert_eq!(enumerate_normalized(2).len(), 2);
        assert_eq!(enumerate_normalized(3).len(), 4);
        assert_eq!(enumerate_normalized_t(5, 2).len(), 15);
    }

    #[test]
    fn enumeration_is_sorted_and_distinct() {
        for r in 1..=4 {
            let all = enumerate_all(r);
            assert!(all.windows(2).all(|w| w[0].edges() < w[1].edges()));
            let z = enumerate_normalized(r);
            assert!(z
                .windows(2)
                .all(|w| (w[0].t(), w[0].bars()) < (w[1].t(), w[1].bars())));
        }
    }

    #[test]
    fn text_round_trip() {
        let x = d("T1-B1 T2-T3 B2-B3");
        assert_eq!(x.to_string(), "T1-B1 T2-T3 B2-B3");
        assert_eq!(d(&x.to_string()), x);
        assert_eq!(x.to_numbered_text(), "1-2 3-5 4-6");
        assert!("T1-T1".parse::<BrauerDiagram>().is_err());
        assert!("T1-B1 T1-B2".parse::<BrauerDiagram>().is_err());
        assert!("T0-B1".parse::<BrauerDiagram>().is_err());
        assert!("Q1-B1".parse::<BrauerDiagram>().is_err());
    }

    #[test]
    fn bar_squared_gives_one_loop() {
        let e = NormalizedDiagram::new(2, [(0, 1)]).unwrap().to_diagram();
        let delta = Rational::from_integer(4);
        assert_eq!(compose(&e, &e, &delta).unwrap(), (e.clone(), delta));
    }

    #[test]
    fn identity_is_neutral() {
        let delta = Rational::from_integer(7);
        for x in enumerate_all(3) {
            let id = BrauerDiagram::identity(3);
            assert_eq!(
                compose(&id, &x, &delta).unwrap(),
                (x.clone(), Rational::one())
            );
            assert_eq!(
                compose(&x, &id, &delta).unwrap(),
                (x.clone(), Rational::one())
            );
        }
    }

    #[test]
    fn permutation_diagrams_compose_like_permutations() {
        let delta = Rational::from_integer(3);
        for s in Permutation::all(3) {
            for t in Permutation::all(3) {
                let (x, c) = compose(
                    &BrauerDiagram::from_permutation(&s),
                    &BrauerDiagram::from_permutation(&t),
                    &delta,
                )
                .unwrap();
                assert_eq!(x, BrauerDiagram::from_permutation(&s.compose(&t).unwrap()));
                assert!(c.is_one());
            }
        }
    }

    #[test]
    fn permutations_enumerate_lexicographically() {
        let all = Permutation::all(4);
        assert_eq!(all.len(), 24);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(Permutation::all(0).len(), 1);
    }

    #[test]
    fn factorize_examples() {
        for r in 1..=4 {
            let (s, z) = factorize(&BrauerDiagram::identity(r));
            assert!(s.is_identity());
            assert_eq!(z, NormalizedDiagram::empty(r));
            for p in Permutation::all(r) {
                assert_eq!(
                    factorize(&BrauerDiagram::from_permutation(&p)),
                    (p.clone(), NormalizedDiagram::empty(r))
                );
            }
        }
    }

    #[test]
    fn build_factorize_round_trips() {
        for r in 1..=4 {
            for x in enumerate_all(r) {
                let (s, z) = factorize(&x);
                assert!(is_canonical_pair(&s, &z));
                assert_eq!(build(&s, &z).unwrap(), x);
            }
            let mut canonical = 0;
            for s in Permutation::all(r) {
                for z in enumerate_normalized(r) {
                    if is_canonical_pair(&s, &z) {
                        canonical += 1;
                        assert_eq!(factorize(&build(&s, &z).unwrap()), (s.clone(), z.clone()));
                    }
                }
            }
            assert_eq!(canonical as u64, matchings_count(r));
        }
    }

    #[test]
    fn bars_commute() {
        for r in 2..=5 {
            for z in enumerate_normalized(r).into_iter().filter(|z| z.t() >= 2) {
                let parts = z.bar_diagrams();
                let mut forward = BrauerDiagram::identity(r);
                for p in &parts {
                    forward = compose_counting(&forward, p).unwrap().0;
                }
                let mut backward = BrauerDiagram::identity(r);
                for p in parts.iter().rev() {
                    backward = compose_counting(&backward, p).unwrap().0;
                }
                assert_eq!(forward, backward);
                assert_eq!(forward, z.to_diagram());
            }
        }
    }

    fn diagram(r: usize) -> impl Strategy<Value = BrauerDiagram> {
        let all = enumerate_all(r);
        (0..all.len()).prop_map(move |k| all[k].clone())
    }

    proptest! {
        #[test]
        fn composition_is_associative(
            (a, b, c) in (1usize..=4).prop_flat_map(|r| (diagram(r), diagram(r), diagram(r))),
            delta in -5i64..6,
        ) {
            let delta = Rational::from_integer(delta);
            let (ab, c1) = compose(&a, &b, &delta).unwrap();
            let (left, c2) = compose(&ab, &c, &delta).unwrap();
            let (bc, c3) = compose(&b, &c, &delta).unwrap();
            let (right, c4) = compose(&a, &bc, &delta).unwrap();
            prop_assert_eq!(left, right);
            prop_assert_eq!(c1 * c2, c3 * c4);
        }

        #[test]
        fn permutation_group_laws(
            (s, t) in (1usize..=5).prop_flat_map(|r| {
                let all = Permutation::all(r);
                let n = all.len();
                (0..n, 0..n).prop_map(move |(i, j)| (all[i].clone(), all[j].clone()))
            })
        ) {
            let st = s.compose(&t).unwrap();
            prop_assert_eq!(st.compose(&t.inverse()).unwrap(), s.clone());
            prop_assert!(s.compose(&s.inverse()).unwrap().is_identity());
        }
    }
}
