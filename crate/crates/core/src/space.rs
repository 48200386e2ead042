//! Finite topological spaces.
//!
//! A finite topology is determined by the minimal open neighbourhood of
//! each point, so that is what [`FiniteSpace`] stores.  The user-facing
//! basis is kept alongside because [`crate::borel::SetExpr::Basic`] leaves
//! index into it.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{ClosureAxiom, QtopError, Result};
use crate::pointset::{PointSet, MAX_POINTS};

#[derive(Debug)]
pub struct FiniteSpace {
    labels: Vec<String>,
    basis: Vec<PointSet>,
    nbhd: Vec<PointSet>,
    opens: OnceLock<Vec<PointSet>>,
}

impl Clone for FiniteSpace {
    fn clone(&self) -> Self {
        FiniteSpace {
            labels: self.labels.clone(),
            basis: self.basis.clone(),
            nbhd: self.nbhd.clone(),
            opens: OnceLock::new(),
        }
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

impl FiniteSpace {
    /// Build a space from an explicit open family, checking the closure axioms.
    /// The family becomes the basis, in the given order.
    pub fn from_opens(labels: Vec<String>, opens: Vec<PointSet>) -> Result<FiniteSpace> {
        let n = labels.len();
        if n > MAX_POINTS {
            return Err(QtopError::TooLarge(n, MAX_POINTS));
        }
        let whole = PointSet::full(n);
        for u in &opens {
            if !u.is_subset(whole) {
                let bad = u.minus(whole).first().unwrap_or(0);
                return Err(QtopError::BadPoint(bad));
            }
        }
        let fam: BTreeSet<PointSet> = opens.iter().copied().collect();
        if !fam.contains(&PointSet::EMPTY) {
            return Err(QtopError::NotAClosedFamily {
                axiom: ClosureAxiom::ContainsEmpty,
                witness: vec![],
            });
        }
        if !fam.contains(&whole) {
            return Err(QtopError::NotAClosedFamily {
                axiom: ClosureAxiom::ContainsWhole,
                witness: vec![],
            });
        }
        for &a in &fam {
            for &b in &fam {
                if !fam.contains(&a.union(b)) {
                    return Err(QtopError::NotAClosedFamily {
                        axiom: ClosureAxiom::UnionClosed,
                        witness: vec![a.to_vec(), b.to_vec()],
                    });
                }
                if !fam.contains(&a.intersect(b)) {
                    return Err(QtopError::NotAClosedFamily {
                        axiom: ClosureAxiom::IntersectionClosed,
                        witness: vec![a.to_vec(), b.to_vec()],
                    });
                }
            }
        }
        let space = FiniteSpace::from_basis(labels, opens)?;
        let _ = space.opens.set(fam.into_iter().collect());
        Ok(space)
    }

    /// The topology generated by an arbitrary family (used as a subbasis).
    /// `∅` and the whole space are appended to the basis if missing.
    pub fn from_basis(labels: Vec<String>, mut basis: Vec<PointSet>) -> Result<FiniteSpace> {
        let n = labels.len();
        if n > MAX_POINTS {
            return Err(QtopError::TooLarge(n, MAX_POINTS));
        }
        let whole = PointSet::full(n);
        if let Some(b) = basis.iter().find(|b| !b.is_subset(whole)) {
            return Err(QtopError::BadPoint(b.minus(whole).first().unwrap_or(0)));
        }
        if !basis.contains(&PointSet::EMPTY) {
            basis.push(PointSet::EMPTY);
        }
        if !basis.contains(&whole) {
            basis.push(whole);
        }
        let nbhd = (0..n)
            .map(|x| {
                basis
                    .iter()
                    .filter(|b| b.contains(x))
                    .fold(whole, |acc, b| acc.intersect(*b))
            })
            .collect();
        Ok(FiniteSpace { labels, basis, nbhd, opens: OnceLock::new() })
    }

    /// Alexandroff topology of a preorder: the opens are the up-sets.
    pub fn alexandroff(labels: Vec<String>, le: impl Fn(usize, usize) -> bool) -> Result<FiniteSpace> {
        let n = labels.len();
        if n > MAX_POINTS {
            return Err(QtopError::TooLarge(n, MAX_POINTS));
        }
        let ups = (0..n).map(|x| (0..n).filter(|&y| le(x, y)).collect()).collect();
        FiniteSpace::from_basis(labels, ups)
    }

    pub fn discrete(n: usize) -> FiniteSpace {
        FiniteSpace::alexandroff(default_labels(n), |x, y| x == y).expect("size checked by caller")
    }

    pub fn indiscrete(n: usize) -> FiniteSpace {
        FiniteSpace::from_basis(default_labels(n), vec![]).expect("size checked by caller")
    }

    /// `{bot, top}` with opens `∅, {top}, X`.
    pub fn sierpinski() -> FiniteSpace {
        FiniteSpace::from_opens(
            vec!["bot".into(), "top".into()],
            vec![PointSet::EMPTY, PointSet::singleton(1), PointSet::full(2)],
        )
        .expect("valid family")
    }

    /// The chain `0 < 1 < .. < n-1` with its up-sets as opens.
    pub fn chain(n: usize) -> FiniteSpace {
        FiniteSpace::alexandroff(default_labels(n), |x, y| x <= y).expect("size checked by caller")
    }

    /// `P({0..k-1})` ordered by inclusion with the up-sets as opens.
    /// Point `i` is the set whose bit mask is `i`.
    pub fn powerset(k: usize) -> FiniteSpace {
        let n = 1usize << k;
        let labels = (0..n)
            .map(|m| {
                let elems: Vec<String> = PointSet(m as u64).iter().map(|e| e.to_string()).collect();
                format!("{{{}}}", elems.join(","))
            })
            .collect();
        FiniteSpace::alexandroff(labels, |x, y| x & !y == 0).expect("k <= 6")
    }

    /// Product space.  Point `(i, j)` has index `i * b.len() + j`; basic open
    /// `U_p × V_q` has index `p * b.basis().len() + q`.
    pub fn product(a: &FiniteSpace, b: &FiniteSpace) -> Result<FiniteSpace> {
        let (na, nb) = (a.len(), b.len());
        if na * nb > MAX_POINTS {
            return Err(QtopError::TooLarge(na * nb, MAX_POINTS));
        }
        let mut labels = Vec::with_capacity(na * nb);
        for i in 0..na {
            for j in 0..nb {
                labels.push(format!("({},{})", a.labels[i], b.labels[j]));
            }
        }
        let mut basis = Vec::with_capacity(a.basis.len() * b.basis.len());
        for u in &a.basis {
            for v in &b.basis {
                let mut r = PointSet::EMPTY;
                for i in u.iter() {
                    for j in v.iter() {
                        r.insert(i * nb + j);
                    }
                }
                basis.push(r);
            }
        }
        FiniteSpace::from_basis(labels, basis)
    }

    /// Disjoint union: `b`'s points are shifted by `a.len()`; basic open
    /// `U_p ⊔ V_q` has index `p * b.basis().len() + q`.
    pub fn disjoint_union(a: &FiniteSpace, b: &FiniteSpace) -> Result<FiniteSpace> {
        let na = a.len();
        if na + b.len() > MAX_POINTS {
            return Err(QtopError::TooLarge(na + b.len(), MAX_POINTS));
        }
        let labels = a
            .labels
            .iter()
            .map(|l| format!("0:{l}"))
            .chain(b.labels.iter().map(|l| format!("1:{l}")))
            .collect();
        let mut basis = Vec::new();
        for u in &a.basis {
            for v in &b.basis {
                basis.push(PointSet(u.0 | (v.0 << na)));
            }
        }
        FiniteSpace::from_basis(labels, basis)
    }

    /// Subspace on `s`; points are renumbered in ascending order.
    pub fn subspace(&self, s: PointSet) -> FiniteSpace {
        let pts = s.to_vec();
        let labels = pts.iter().map(|&p| self.labels[p].clone()).collect();
        let restrict = |u: PointSet| -> PointSet {
            pts.iter().enumerate().filter(|(_, &p)| u.contains(p)).map(|(i, _)| i).collect()
        };
        let basis = self.basis.iter().map(|&b| restrict(b)).collect();
        FiniteSpace::from_basis(labels, basis).expect("subspace is no larger")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn whole(&self) -> PointSet {
        PointSet::full(self.len())
    }

    pub fn basis(&self) -> &[PointSet] {
        &self.basis
    }

    pub fn basis_index(&self, u: PointSet) -> Option<usize> {
        self.basis.iter().position(|&b| b == u)
    }

    /// Smallest open set containing `x`.
    pub fn nbhd(&self, x: usize) -> PointSet {
        self.nbhd[x]
    }

    pub fn is_open(&self, u: PointSet) -> bool {
        u.is_subset(self.whole()) && u.iter().all(|x| self.nbhd[x].is_subset(u))
    }

    pub fn is_closed(&self, c: PointSet) -> bool {
        c.is_subset(self.whole()) && self.is_open(c.complement(self.len()))
    }

    /// Specialization order: `x ≤ y` iff `x ∈ cl{y}`.
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.nbhd[x].contains(y)
    }

    /// `order[x][y]` is `x ≤ y`.
    pub fn specialization_order(&self) -> Vec<Vec<bool>> {
        (0..self.len()).map(|x| (0..self.len()).map(|y| self.leq(x, y)).collect()).collect()
    }

    pub fn closure(&self, s: PointSet) -> PointSet {
        (0..self.len()).filter(|&x| !self.nbhd[x].intersect(s).is_empty()).collect()
    }

    pub fn interior(&self, s: PointSet) -> PointSet {
        (0..self.len()).filter(|&x| self.nbhd[x].is_subset(s)).collect()
    }

    /// Two distinct points with the same neighbourhoods, if any.
    pub fn t0_violation(&self) -> Option<(usize, usize)> {
        for x in 0..self.len() {
            for y in x + 1..self.len() {
                if self.nbhd[x] == self.nbhd[y] {
                    return Some((x, y));
                }
            }
        }
        None
    }

    pub fn is_t0(&self) -> bool {
        self.t0_violation().is_none()
    }

    pub fn require_t0(&self) -> Result<()> {
        match self.t0_violation() {
            Some((x, y)) => Err(QtopError::NotT0(x, y)),
            None => Ok(()),
        }
    }

    pub fn is_t1(&self) -> bool {
        (0..self.len()).all(|x| self.nbhd[x] == PointSet::singleton(x))
    }

    /// Every singleton is the intersection of an open and a closed set.
    pub fn is_td(&self) -> bool {
        (0..self.len()).all(|x| {
            let s = PointSet::singleton(x);
            self.nbhd[x].intersect(self.closure(s)) == s
        })
    }

    /// Every open set, in ascending bit order.  Cost is proportional to the
    /// number of opens, which can be exponential in the number of points.
    pub fn opens(&self) -> &[PointSet] {
        self.opens.get_or_init(|| {
            let mut out = Vec::new();
            let down: Vec<PointSet> =
                (0..self.len()).map(|x| (0..self.len()).filter(|&y| self.leq(y, x)).collect()).collect();
            enumerate_upsets(&self.nbhd, &down, PointSet::EMPTY, PointSet::EMPTY, self.len(), &mut out);
            out.sort();
            out
        })
    }

    pub fn closed_sets(&self) -> Vec<PointSet> {
        let mut v: Vec<PointSet> = self.opens().iter().map(|u| u.complement(self.len())).collect();
        v.sort();
        v
    }

    /// An irreducible closed set without exactly one generic point, if any.
    pub fn sobriety_violation(&self) -> Option<PointSet> {
        for c in self.closed_sets() {
            if c.is_empty() {
                continue;
            }
            let irreducible = c.iter().all(|x| {
                c.iter().all(|y| !self.nbhd[x].intersect(self.nbhd[y]).intersect(c).is_empty())
            });
            if !irreducible {
                continue;
            }
            let generic = c.iter().filter(|&g| self.closure(PointSet::singleton(g)) == c).count();
            if generic != 1 {
                return Some(c);
            }
        }
        None
    }

    pub fn is_sober(&self) -> bool {
        self.sobriety_violation().is_none()
    }

    /// Points isolated in the subspace `s`.
    pub fn isolated_in(&self, s: PointSet) -> PointSet {
        s.iter().filter(|&x| self.nbhd[x].intersect(s) == PointSet::singleton(x)).collect()
    }

    /// Cantor–Bendixson derivative: drop the isolated points of `s`.
    pub fn cb_derivative(&self, s: PointSet) -> PointSet {
        s.minus(self.isolated_in(s))
    }

    /// `X = X^0 ⊇ X^1 ⊇ ..` up to and including the first repeated term.
    pub fn cb_sequence(&self) -> Vec<PointSet> {
        let mut seq = vec![self.whole()];
        loop {
            let last = *seq.last().unwrap();
            let next = self.cb_derivative(last);
            seq.push(next);
            if next == last {
                return seq;
            }
        }
    }

    /// Least `α` with `X^α = X^(α+1)`.
    pub fn cb_rank(&self) -> usize {
        self.cb_sequence().len() - 2
    }

    pub fn perfect_kernel(&self) -> PointSet {
        *self.cb_sequence().last().unwrap()
    }

    pub fn is_scattered(&self) -> bool {
        self.perfect_kernel().is_empty()
    }

    /// `α` with `x ∈ X^α \ X^(α+1)`, or `None` for points of the perfect kernel.
    pub fn cb_level(&self, x: usize) -> Option<usize> {
        let seq = self.cb_sequence();
        (0..seq.len() - 1).find(|&a| seq[a].contains(x) && !seq[a + 1].contains(x))
    }

    /// `{x | ∀y. x ≤ y ⇒ x = y}`.
    pub fn max_elements(&self) -> PointSet {
        (0..self.len()).filter(|&x| self.nbhd[x] == PointSet::singleton(x)).collect()
    }

    /// Is `f: self → other` continuous?  `f[x]` is the image of `x`.
    pub fn is_continuous(&self, other: &FiniteSpace, f: &[usize]) -> Result<()> {
        for &b in other.basis() {
            let pre: PointSet = (0..self.len()).filter(|&x| b.contains(f[x])).collect();
            if !self.is_open(pre) {
                return Err(QtopError::NotContinuous(b.to_vec()));
            }
        }
        Ok(())
    }

    pub fn same_topology(&self, other: &FiniteSpace) -> bool {
        self.nbhd == other.nbhd
    }

    /// A homeomorphism `self → other` as a point map, if one exists.
    /// Brute force over permutations; intended for at most 8 points.
    pub fn homeomorphism(&self, other: &FiniteSpace) -> Option<Vec<usize>> {
        let n = self.len();
        if n != other.len() {
            return None;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut found = None;
        permute(&mut perm, 0, &mut |p| {
            let ok = (0..n).all(|x| (0..n).all(|y| self.leq(x, y) == other.leq(p[x], p[y])));
            if ok {
                found = Some(p.to_vec());
            }
            ok
        });
        found
    }
}

fn enumerate_upsets(
    up: &[PointSet],
    down: &[PointSet],
    inc: PointSet,
    exc: PointSet,
    n: usize,
    out: &mut Vec<PointSet>,
) {
    let undecided = PointSet::full(n).minus(inc).minus(exc);
    let Some(x) = undecided.first() else {
        out.push(inc);
        return;
    };
    if up[x].intersect(exc).is_empty() {
        enumerate_upsets(up, down, inc.union(up[x]), exc, n, out);
    }
    if down[x].intersect(inc).is_empty() {
        enumerate_upsets(up, down, inc, exc.union(down[x]), n, out);
    }
}

/// Calls `f` on each permutation until it returns `true`.
fn permute(p: &mut [usize], k: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if k == p.len() {
        return f(p);
    }
    for i in k..p.len() {
        p.swap(k, i);
        if permute(p, k + 1, f) {
            p.swap(k, i);
            return true;
        }
        p.swap(k, i);
    }
    false
}

/// A random finite T0 space: the Alexandroff topology of a random partial
/// order with comparability density roughly `p`.
pub fn random_t0_space<R: Rng>(rng: &mut R, n: usize, p: f64) -> FiniteSpace {
    let mut le = vec![vec![false; n]; n];
    for (i, row) in le.iter_mut().enumerate() {
        row[i] = true;
        for cell in row.iter_mut().skip(i + 1) {
            *cell = rng.gen_bool(p);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if le[i][k] && le[k][j] {
                    le[i][j] = true;
                }
            }
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut inv = vec![0; n];
    for (i, &q) in perm.iter().enumerate() {
        inv[q] = i;
    }
    FiniteSpace::alexandroff(default_labels(n), |x, y| le[inv[x]][inv[y]]).expect("n <= 64")
}

/// All T0 topologies on `n` points up to homeomorphism, as Alexandroff
/// topologies of naturally labelled partial orders.  Feasible for `n <= 6`.
pub fn enumerate_t0_spaces(n: usize) -> Vec<FiniteSpace> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let perms = all_permutations(n);
    for mask in 0u64..(1u64 << pairs.len()) {
        let rel = |i: usize, j: usize| -> bool {
            i == j || (i < j && mask >> pair_index(n, i, j) & 1 == 1)
        };
        let transitive = pairs.iter().all(|&(i, j)| {
            !rel(i, j) || (j + 1..n).all(|k| !rel(j, k) || rel(i, k))
        });
        if !transitive {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                let mut code = 0u64;
                for i in 0..n {
                    for j in 0..n {
                        if rel(i, j) {
                            code |= 1 << (p[i] * n + p[j]);
                        }
                    }
                }
                code
            })
            .min()
            .unwrap_or(0);
        if seen.insert(canon) {
            out.push(FiniteSpace::alexandroff(default_labels(n), rel).expect("n small"));
        }
    }
    out
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    // position of (i, j), i < j, in row-major upper-triangular order
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    permute(&mut p, 0, &mut |q| {
        out.push(q.to_vec());
        false
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ps(v: &[usize]) -> PointSet {
        PointSet::from_points(v.iter().copied())
    }

    #[test]
    fn rejects_family_not_closed_under_union() {
        let err = FiniteSpace::from_opens(
            default_labels(3),
            vec![PointSet::EMPTY, ps(&[0]), ps(&[1]), ps(&[0, 1, 2])],
        )
        .unwrap_err();
        match err {
            QtopError::NotAClosedFamily { axiom, .. } => assert_eq!(axiom, ClosureAxiom::UnionClosed),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn rejects_family_missing_whole_space() {
        let err = FiniteSpace::from_opens(default_labels(2), vec![PointSet::EMPTY, ps(&[0])]).unwrap_err();
        assert!(matches!(err, QtopError::NotAClosedFamily { axiom: ClosureAxiom::ContainsWhole, .. }));
    }

    #[test]
    fn powerset_specialization_is_inclusion() {
        let p2 = FiniteSpace::powerset(2);
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(p2.leq(x, y), x & !y == 0, "{x} {y}");
            }
        }
        // cl{{0}} = {∅, {0}}
        assert_eq!(p2.closure(PointSet::singleton(1)), ps(&[0, 1]));
    }

    #[test]
    fn separation_axioms() {
        let s = FiniteSpace::sierpinski();
        assert!(s.is_t0() && s.is_td() && !s.is_t1());
        let c = FiniteSpace::chain(3);
        assert!(c.is_t0() && c.is_td() && !c.is_t1());
        assert!(FiniteSpace::discrete(3).is_t1());
        let i = FiniteSpace::indiscrete(2);
        assert_eq!(i.t0_violation(), Some((0, 1)));
        assert!(!i.is_td());
        assert!(!i.is_sober());
    }

    #[test]
    fn cantor_bendixson_on_chain() {
        let c = FiniteSpace::chain(3);
        assert_eq!(c.cb_sequence(), vec![ps(&[0, 1, 2]), ps(&[0, 1]), ps(&[0]), ps(&[]), ps(&[])]);
        assert_eq!(c.cb_rank(), 3);
        assert!(c.is_scattered());
        assert_eq!(FiniteSpace::discrete(4).cb_rank(), 1);
        assert_eq!(FiniteSpace::powerset(1).cb_rank(), 2);
        assert_eq!(FiniteSpace::sierpinski().cb_rank(), 2);
        assert_eq!(FiniteSpace::indiscrete(3).perfect_kernel(), ps(&[0, 1, 2]));
    }

    #[test]
    fn products_and_sums() {
        let s = FiniteSpace::sierpinski();
        let sq = FiniteSpace::product(&s, &s).unwrap();
        assert!(sq.homeomorphism(&FiniteSpace::powerset(2)).is_some());
        let du = FiniteSpace::disjoint_union(&s, &s).unwrap();
        assert_eq!(du.len(), 4);
        assert_eq!(du.opens().len(), 9);
    }

    #[test]
    fn opens_of_small_spaces() {
        assert_eq!(FiniteSpace::sierpinski().opens(), &[ps(&[]), ps(&[1]), ps(&[0, 1])]);
        assert_eq!(FiniteSpace::discrete(4).opens().len(), 16);
        assert_eq!(FiniteSpace::chain(4).opens().len(), 5);
        // Dedekind number M(3) counts up-sets of P(3)
        assert_eq!(FiniteSpace::powerset(3).opens().len(), 20);
    }

    #[test]
    fn t0_space_counts_up_to_homeomorphism() {
        let counts: Vec<usize> = (1..=5).map(|n| enumerate_t0_spaces(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 16, 63]);
    }

    #[test]
    fn random_spaces_are_t0_sober_scattered() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(1..=7);
            let s = random_t0_space(&mut rng, n, 0.4);
            assert!(s.is_t0() && s.is_sober() && s.is_scattered() && s.is_td());
        }
    }

    #[test]
    fn max_elements_of_powerset() {
        assert_eq!(FiniteSpace::powerset(2).max_elements(), ps(&[3]));
        assert_eq!(FiniteSpace::discrete(3).max_elements(), ps(&[0, 1, 2]));
    }
}
