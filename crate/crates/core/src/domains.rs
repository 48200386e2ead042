//! Finite posets as domains, and the `F×ω` construction on truncated
//! presentations of `Π⁰₂` subsets of `P(ω)`.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::borel::SetExpr;
use crate::error::{QtopError, Result};
use crate::pointset::PointSet;
use crate::space::FiniteSpace;

/// Largest poset for which ideals are enumerated.
pub const MAX_IDEAL_POSET: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinPoset {
    pub elements: Vec<String>,
    pub le: Vec<Vec<bool>>,
}

impl FinPoset {
    pub fn new(elements: Vec<String>, le: Vec<Vec<bool>>) -> Result<FinPoset> {
        let n = elements.len();
        if le.len() != n || le.iter().any(|r| r.len() != n) {
            return Err(QtopError::Parse(format!("order matrix must be {n}×{n}")));
        }
        for x in 0..n {
            if !le[x][x] {
                return Err(QtopError::PreconditionFailed(format!("not reflexive at {x}")));
            }
            for y in 0..n {
                if x != y && le[x][y] && le[y][x] {
                    return Err(QtopError::PreconditionFailed(format!("not antisymmetric at ({x},{y})")));
                }
                for z in 0..n {
                    if le[x][y] && le[y][z] && !le[x][z] {
                        return Err(QtopError::PreconditionFailed(format!("not transitive at ({x},{y},{z})")));
                    }
                }
            }
        }
        Ok(FinPoset { elements, le })
    }

    pub fn from_fn(n: usize, le: impl Fn(usize, usize) -> bool) -> Result<FinPoset> {
        FinPoset::new(
            (0..n).map(|i| i.to_string()).collect(),
            (0..n).map(|x| (0..n).map(|y| le(x, y)).collect()).collect(),
        )
    }

    pub fn chain(n: usize) -> FinPoset {
        FinPoset::from_fn(n, |x, y| x <= y).expect("chain is a poset")
    }

    pub fn antichain(n: usize) -> FinPoset {
        FinPoset::from_fn(n, |x, y| x == y).expect("antichain is a poset")
    }

    /// `bottom < left, right < top`.
    pub fn diamond() -> FinPoset {
        let le = |x: usize, y: usize| x == y || x == 0 || y == 3;
        let mut p = FinPoset::from_fn(4, le).expect("diamond is a poset");
        p.elements = ["bottom", "left", "right", "top"].map(String::from).to_vec();
        p
    }

    /// Two minimal elements below one top.
    pub fn vee() -> FinPoset {
        let mut p = FinPoset::from_fn(3, |x, y| x == y || y == 2).expect("vee is a poset");
        p.elements = ["a", "b", "top"].map(String::from).to_vec();
        p
    }

    /// The specialization order of a T0 space.
    pub fn from_space(space: &FiniteSpace) -> Result<FinPoset> {
        space.require_t0()?;
        FinPoset::new(space.labels().to_vec(), space.specialization_order())
    }

    /// A random poset: a random DAG on a random order, transitively closed.
    pub fn random<R: Rng>(rng: &mut R, n: usize, p: f64) -> FinPoset {
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
        FinPoset::new((0..n).map(|i| i.to_string()).collect(), le).expect("closure of a DAG")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.le[x][y]
    }

    pub fn up(&self, x: usize) -> PointSet {
        (0..self.len()).filter(|&y| self.le[x][y]).collect()
    }

    pub fn down(&self, x: usize) -> PointSet {
        (0..self.len()).filter(|&y| self.le[y][x]).collect()
    }

    /// Least upper bound of `s`, if any.
    pub fn sup(&self, s: PointSet) -> Option<usize> {
        let ubs: Vec<usize> = (0..self.len()).filter(|&u| s.iter().all(|d| self.le[d][u])).collect();
        ubs.iter().copied().find(|&u| ubs.iter().all(|&v| self.le[u][v]))
    }

    /// Non-empty, and every pair has an upper bound inside.
    pub fn is_directed(&self, d: PointSet) -> bool {
        !d.is_empty() && d.iter().all(|a| d.iter().all(|b| d.iter().any(|c| self.le[a][c] && self.le[b][c])))
    }

    pub fn is_down_set(&self, s: PointSet) -> bool {
        s.iter().all(|x| self.down(x).is_subset(s))
    }

    pub fn is_maximal(&self, x: usize) -> bool {
        self.up(x) == PointSet::singleton(x)
    }
}

fn check_size(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(QtopError::TooLarge(n, limit))
    } else {
        Ok(())
    }
}

/// `x ≪ y` by brute force over every directed subset with a supremum.
pub fn way_below(p: &FinPoset, x: usize, y: usize) -> bool {
    let n = p.len();
    assert!(n <= 20, "way_below enumerates 2^n subsets");
    (1u64..1 << n).map(PointSet).filter(|&d| p.is_directed(d)).all(|d| match p.sup(d) {
        Some(s) if p.leq(y, s) => d.iter().any(|e| p.leq(x, e)),
        _ => true,
    })
}

pub fn way_below_matrix(p: &FinPoset) -> Vec<Vec<bool>> {
    (0..p.len()).map(|x| (0..p.len()).map(|y| way_below(p, x, y)).collect()).collect()
}

/// Scott topology: on a finite poset the opens are the up-sets.
pub fn scott_space(p: &FinPoset) -> FiniteSpace {
    FiniteSpace::alexandroff(p.elements.clone(), |x, y| p.leq(x, y)).expect("poset within point limit")
}

/// `↟b₀ ∖ (↑b₁ ∪ .. ∪ ↑b_n)`.
pub fn lawson_basic(p: &FinPoset, b0: usize, blockers: &[usize]) -> PointSet {
    let above: PointSet = (0..p.len()).filter(|&y| way_below(p, b0, y)).collect();
    blockers.iter().fold(above, |acc, &b| acc.minus(p.up(b)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealCompletion {
    /// Each ideal as a set of elements of the input.
    pub ideals: Vec<PointSet>,
    pub order: FinPoset,
    pub compact: Vec<bool>,
    /// Principal generator of each ideal, if any.
    pub principal: Vec<Option<usize>>,
}

/// All ideals (directed down-sets) ordered by inclusion.
pub fn ideal_completion(p: &FinPoset) -> Result<IdealCompletion> {
    let n = p.len();
    check_size(n, MAX_IDEAL_POSET)?;
    let ideals: Vec<PointSet> =
        (1u64..1 << n).map(PointSet).filter(|&s| p.is_down_set(s) && p.is_directed(s)).collect();
    let m = ideals.len();
    let labels = ideals
        .iter()
        .map(|s| format!("{{{}}}", s.iter().map(|i| p.elements[i].clone()).collect::<Vec<_>>().join(",")))
        .collect();
    let order = FinPoset::new(labels, (0..m).map(|i| (0..m).map(|j| ideals[i].is_subset(ideals[j])).collect()).collect())?;
    let principal: Vec<Option<usize>> = ideals.iter().map(|&s| (0..n).find(|&x| p.down(x) == s)).collect();
    let compact = (0..m).map(|i| way_below(&order, i, i)).collect();
    Ok(IdealCompletion { ideals, order, compact, principal })
}

/// Is `x ↦ ↓x` an order isomorphism onto the ideal completion?
pub fn completion_is_isomorphic(p: &FinPoset, c: &IdealCompletion) -> bool {
    let n = p.len();
    if c.ideals.len() != n {
        return false;
    }
    let image: Vec<Option<usize>> = (0..n).map(|x| c.ideals.iter().position(|&s| s == p.down(x))).collect();
    image.iter().all(Option::is_some)
        && (0..n).all(|x| (0..n).all(|y| p.leq(x, y) == c.order.leq(image[x].unwrap(), image[y].unwrap())))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementKind {
    pub element: String,
    pub compact: bool,
    pub maximal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealModelReport {
    pub elements: Vec<ElementKind>,
    /// Every element is compact or maximal.
    pub holds: bool,
}

pub fn omega_ideal_model_check(p: &FinPoset) -> IdealModelReport {
    let elements: Vec<ElementKind> = (0..p.len())
        .map(|x| ElementKind { element: p.elements[x].clone(), compact: way_below(p, x, x), maximal: p.is_maximal(x) })
        .collect();
    let holds = elements.iter().all(|e| e.compact || e.maximal);
    IdealModelReport { elements, holds }
}

/// `Max(X) = ⋂_y ((X ∖ ↓y) ∪ {y})`, with `X ∖ ↓y` the union of the basic
/// opens missing `y` and `{y}` the basics containing `y` minus that union.
pub fn max_expr(space: &FiniteSpace) -> Result<SetExpr> {
    space.require_t0()?;
    let basis = space.basis();
    let parts = (0..space.len())
        .map(|y| {
            let outside: Vec<SetExpr> =
                (0..basis.len()).filter(|&i| !basis[i].contains(y)).map(SetExpr::Basic).collect();
            let inside: Vec<SetExpr> =
                (0..basis.len()).filter(|&i| basis[i].contains(y)).map(SetExpr::Basic).collect();
            let not_below = SetExpr::Union(outside);
            SetExpr::Union(vec![not_below.clone(), SetExpr::diff(SetExpr::Intersect(inside), not_below)])
        })
        .collect();
    Ok(SetExpr::Intersect(parts))
}

// ---------------------------------------------------------------- F × ω

/// An open of `P(ω)` as the up-closure of finitely many finite generators,
/// coded as bit masks over `{0..63}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<Vec<u32>>", into = "Vec<Vec<u32>>")]
pub struct GenOpen(pub Vec<u64>);

impl From<Vec<Vec<u32>>> for GenOpen {
    fn from(v: Vec<Vec<u32>>) -> GenOpen {
        GenOpen(v.into_iter().map(|g| g.into_iter().fold(0u64, |m, i| m | 1 << i)).collect())
    }
}

impl From<GenOpen> for Vec<Vec<u32>> {
    fn from(g: GenOpen) -> Vec<Vec<u32>> {
        g.0.into_iter().map(|m| PointSet(m).iter().map(|i| i as u32).collect()).collect()
    }
}

impl GenOpen {
    pub fn from_sets(gens: &[&[u32]]) -> GenOpen {
        GenOpen::from(gens.iter().map(|g| g.to_vec()).collect::<Vec<_>>())
    }

    /// `F ∈ U` iff some generator is contained in `F`.
    pub fn contains(&self, f: u64) -> bool {
        self.0.iter().any(|&g| g & !f == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationPair {
    #[serde(rename = "U")]
    pub u: GenOpen,
    #[serde(rename = "V")]
    pub v: GenOpen,
}

/// `P(ω) ∖ X = ⋃ U_i ∖ V_i`, truncated: generators live in `{0..depth-1}`
/// and pairs past the list are empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pi02Presentation {
    pub pairs: Vec<PresentationPair>,
    pub depth: usize,
}

impl Pi02Presentation {
    pub fn new(pairs: Vec<(GenOpen, GenOpen)>, depth: usize) -> Result<Pi02Presentation> {
        let p = Pi02Presentation { pairs: pairs.into_iter().map(|(u, v)| PresentationPair { u, v }).collect(), depth };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth > 63 {
            return Err(QtopError::TooLarge(self.depth, 63));
        }
        let bound = !((1u64 << self.depth) - 1);
        for pr in &self.pairs {
            if pr.u.0.iter().chain(&pr.v.0).any(|g| g & bound != 0) {
                return Err(QtopError::DepthExceeded(self.depth));
            }
        }
        Ok(())
    }

    fn in_u(&self, m: usize, f: u64) -> bool {
        self.pairs.get(m).is_some_and(|p| p.u.contains(f))
    }

    fn in_v(&self, m: usize, f: u64) -> bool {
        self.pairs.get(m).is_some_and(|p| p.v.contains(f))
    }

    /// First pair `i` with `x ∈ U_i ∖ V_i`.
    pub fn violation(&self, x: u64) -> Option<usize> {
        (0..self.pairs.len()).find(|&i| self.in_u(i, x) && !self.in_v(i, x))
    }

    /// Finite-set points of `X`.
    pub fn contains(&self, x: u64) -> bool {
        self.violation(x).is_none()
    }

    fn universe(&self) -> u64 {
        (1u64 << self.depth) - 1
    }
}

/// Random pairs with one or two non-empty generators each, inside
/// `{0..depth-1}`.
pub fn random_presentation<R: Rng>(rng: &mut R, pairs: usize, depth: usize) -> Pi02Presentation {
    let universe = (1u64 << depth) - 1;
    let gens = |r: &mut R| GenOpen((0..r.gen_range(1..=2)).map(|_| r.gen_range(1..=universe)).collect());
    let pairs = (0..pairs).map(|_| (gens(rng), gens(rng))).collect();
    Pi02Presentation::new(pairs, depth).expect("generators inside the universe")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FxOmegaElem {
    pub f: u64,
    pub n: usize,
}

impl fmt::Display for FxOmegaElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?},{}>", PointSet(self.f), self.n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdealRep {
    Principal(FxOmegaElem),
    /// A strictly ascending chain, certified to extend at every depth up to
    /// the one given.
    ChainGenerated(Vec<FxOmegaElem>, usize),
}

fn check_elem(e: &FxOmegaElem, pres: &Pi02Presentation) -> Result<()> {
    if e.n > pres.depth || e.f & !pres.universe() != 0 {
        Err(QtopError::DepthExceeded(pres.depth))
    } else {
        Ok(())
    }
}

/// `⟨F₁,n₁⟩ ⊑ ⟨F₂,n₂⟩` iff equal, or `F₁ ⊆ F₂`, `n₁ < n₂` and for all
/// `m ≤ n₁`, `F₁ ∈ U_m ⇒ F₂ ∈ V_m`.
pub fn fxomega_order(a: &FxOmegaElem, b: &FxOmegaElem, pres: &Pi02Presentation) -> Result<bool> {
    check_elem(a, pres)?;
    check_elem(b, pres)?;
    Ok(fx_le(a, b, pres))
}

fn fx_le(a: &FxOmegaElem, b: &FxOmegaElem, pres: &Pi02Presentation) -> bool {
    a == b || (a.f & !b.f == 0 && a.n < b.n && (0..=a.n).all(|m| !pres.in_u(m, a.f) || pres.in_v(m, b.f)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMembership {
    /// A finite point of `X` containing `F`, if one was found.
    pub witness: Option<u64>,
    /// The search was greedy rather than exhaustive.
    pub approximate: bool,
}

/// Is `F ∈ 𝓕`, i.e. `F ⊆ x` for some `x ∈ X`?  Searches the finite points of
/// `X` inside `{0..depth-1}`: exhaustively when at most 2^16 supersets remain,
/// greedily otherwise.
pub fn family_member(f: u64, pres: &Pi02Presentation) -> FamilyMembership {
    let free = pres.universe() & !f;
    if free.count_ones() <= 16 {
        let bits: Vec<usize> = PointSet(free).iter().collect();
        let witness = (0u64..1 << bits.len())
            .map(|m| bits.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).fold(f, |acc, (_, &b)| acc | 1 << b))
            .find(|&x| pres.contains(x));
        return FamilyMembership { witness, approximate: false };
    }
    let mut x = f;
    for _ in 0..=pres.pairs.len() {
        match pres.violation(x) {
            None => return FamilyMembership { witness: Some(x), approximate: true },
            Some(i) => match pres.pairs[i].v.0.iter().min_by_key(|&&g| (g & !x).count_ones()) {
                Some(&g) => x |= g,
                None => break,
            },
        }
    }
    FamilyMembership { witness: None, approximate: true }
}

/// The truncated poset `𝓕×ω`: elements `⟨F,n⟩` with `F ∈ 𝓕`, `F ⊆ {0..depth-1}`
/// and `n ≤ depth`.
pub fn fxomega_poset(pres: &Pi02Presentation, limit: usize) -> Result<(Vec<FxOmegaElem>, FinPoset)> {
    pres.validate()?;
    let fs: Vec<u64> = (0..=pres.universe()).filter(|&f| family_member(f, pres).witness.is_some()).collect();
    let elems: Vec<FxOmegaElem> =
        fs.iter().flat_map(|&f| (0..=pres.depth).map(move |n| FxOmegaElem { f, n })).collect();
    check_size(elems.len(), limit)?;
    let le = elems.iter().map(|a| elems.iter().map(|b| fx_le(a, b, pres)).collect()).collect();
    let poset = FinPoset::new(elems.iter().map(|e| e.to_string()).collect(), le)?;
    Ok((elems, poset))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectednessWitness {
    pub a: FxOmegaElem,
    pub b: FxOmegaElem,
    pub upper: FxOmegaElem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiReport {
    pub x: u64,
    pub depth: usize,
    pub elements: Vec<FxOmegaElem>,
    pub lower_set: bool,
    pub directed: bool,
    pub witnesses: Vec<DirectednessWitness>,
    /// A strictly ascending chain in `φ(x)` of length `depth+1`.
    pub ideal: IdealRep,
}

/// The upper bound from the directedness argument: `n = max(n₁,n₂)+1`, and
/// for each `m ≤ n` add a generator of `V_m` inside `x` whenever `F₁` or
/// `F₂` lies in `U_m`.
pub fn directedness_witness(a: &FxOmegaElem, b: &FxOmegaElem, x: u64, pres: &Pi02Presentation) -> Result<FxOmegaElem> {
    let n = a.n.max(b.n) + 1;
    let base = a.f | b.f;
    let mut f = base;
    for m in 0..=n {
        if pres.in_u(m, a.f) || pres.in_u(m, b.f) {
            let g = pres.pairs[m]
                .v
                .0
                .iter()
                .find(|&&g| g & !x == 0)
                .ok_or(QtopError::PointNotInX(m))?;
            f |= base | g;
        }
    }
    Ok(FxOmegaElem { f, n })
}

/// `φ(x) = {⟨F,n⟩ | F ⊆ x}` to depth, with its lower-set and directedness
/// certificates.  Pairs are sampled up to `max_pairs`.
pub fn phi_map(x: u64, pres: &Pi02Presentation, depth: usize, max_pairs: usize) -> Result<PhiReport> {
    pres.validate()?;
    if let Some(i) = pres.violation(x) {
        return Err(QtopError::PointNotInX(i));
    }
    let subsets: Vec<u64> = {
        let bits: Vec<usize> = PointSet(x).iter().collect();
        (0u64..1 << bits.len())
            .map(|m| bits.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).fold(0u64, |acc, (_, &b)| acc | 1 << b))
            .collect()
    };
    let elements: Vec<FxOmegaElem> =
        subsets.iter().flat_map(|&f| (0..=depth).map(move |n| FxOmegaElem { f, n })).collect();
    let members: BTreeSet<FxOmegaElem> = elements.iter().copied().collect();
    let lower_set = elements.iter().all(|e| {
        (0..e.n).all(|n| subsets.iter().filter(|&&f| f & !e.f == 0).all(|&f| {
            let d = FxOmegaElem { f, n };
            !fx_le(&d, e, pres) || members.contains(&d)
        }))
    });
    let mut witnesses = Vec::new();
    let mut directed = true;
    'outer: for a in &elements {
        for b in &elements {
            if witnesses.len() >= max_pairs {
                break 'outer;
            }
            let w = directedness_witness(a, b, x, pres)?;
            if !(w.f & !x == 0 && fx_le(a, &w, pres) && fx_le(b, &w, pres)) {
                directed = false;
            }
            witnesses.push(DirectednessWitness { a: *a, b: *b, upper: w });
        }
    }
    let mut chain = vec![FxOmegaElem { f: 0, n: 0 }];
    for _ in 0..depth {
        let last = *chain.last().unwrap();
        chain.push(directedness_witness(&last, &last, x, pres)?);
    }
    Ok(PhiReport { x, depth, elements, lower_set, directed, witnesses, ideal: IdealRep::ChainGenerated(chain, depth) })
}

// ------------------------------------------------ locally compact sober

/// Relation tables over basis indices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcSoberTables {
    pub nonempty: Vec<bool>,
    /// `subset[m][n]`: `B_m ⊆ B_n`.
    pub subset: Vec<Vec<bool>>,
    /// `meet[m][n] = k` with `B_k = B_m ∩ B_n`.
    pub meet: Vec<Vec<Option<usize>>>,
    /// `way_below[n][m]`: `B_n ≪ B_m`.
    pub way_below: Vec<Vec<bool>>,
    /// Triples `(k, m, n)` with `B_k = B_m ∪ B_n`.
    pub unions: Vec<(usize, usize, usize)>,
}

impl LcSoberTables {
    pub fn len(&self) -> usize {
        self.nonempty.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nonempty.is_empty()
    }

    pub fn check_consistent(&self) -> Result<()> {
        let n = self.len();
        let bad = |s: String| Err(QtopError::TableInconsistent(s));
        if self.subset.len() != n || self.meet.len() != n || self.way_below.len() != n {
            return bad("tables disagree on the index bound".into());
        }
        for m in 0..n {
            if !self.subset[m][m] {
                return bad(format!("⊆ is not reflexive at {m}"));
            }
            for k in 0..n {
                if self.way_below[m][k] && !self.subset[m][k] {
                    return bad(format!("B_{m} ≪ B_{k} without B_{m} ⊆ B_{k}"));
                }
                if self.subset[m][k] && self.nonempty[m] && !self.nonempty[k] {
                    return bad(format!("B_{m} ⊆ B_{k} but only B_{m} is non-empty"));
                }
                if let Some(w) = self.meet[m][k] {
                    if w >= n || !self.subset[w][m] || !self.subset[w][k] {
                        return bad(format!("meet witness of ({m},{k}) is not below both"));
                    }
                }
                for j in 0..n {
                    if self.subset[m][k] && self.subset[k][j] && !self.subset[m][j] {
                        return bad(format!("⊆ is not transitive at ({m},{k},{j})"));
                    }
                }
            }
        }
        for &(k, a, b) in &self.unions {
            if k.max(a).max(b) >= n || !self.subset[a][k] || !self.subset[b][k] {
                return bad(format!("union triple ({k},{a},{b}) is not an upper bound"));
            }
        }
        Ok(())
    }
}

/// Tables for a finite space using all of its opens as the basis (closed
/// under finite unions and intersections).  On a finite space `≪` is `⊆`.
pub fn lc_tables_from_space(space: &FiniteSpace) -> (LcSoberTables, Vec<PointSet>) {
    let opens = space.opens().to_vec();
    let n = opens.len();
    let idx = |s: PointSet| opens.iter().position(|&o| o == s);
    let subset: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| opens[a].is_subset(opens[b])).collect()).collect();
    let meet = (0..n).map(|a| (0..n).map(|b| idx(opens[a].intersect(opens[b]))).collect()).collect();
    let mut unions = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if let Some(k) = idx(opens[a].union(opens[b])) {
                unions.push((k, a, b));
            }
        }
    }
    let tables = LcSoberTables {
        nonempty: opens.iter().map(|o| !o.is_empty()).collect(),
        way_below: subset.clone(),
        subset,
        meet,
        unions,
    };
    (tables, opens)
}

/// `φ(x) = {n | x ∈ B_n}`.
pub fn basis_filter(opens: &[PointSet], x: usize) -> BTreeSet<usize> {
    (0..opens.len()).filter(|&n| opens[n].contains(x)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub name: String,
    pub pass: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcSoberReport {
    pub conditions: Vec<ConditionResult>,
    /// `F` is non-empty.  The five conditions hold vacuously for `∅`, whose
    /// filter `𝒰(∅)` is empty and names no point.
    pub nonempty_family: bool,
}

impl LcSoberReport {
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }
}

fn cond(name: &str, witness: Option<String>) -> ConditionResult {
    ConditionResult { name: name.into(), pass: witness.is_none(), witness }
}

/// Check the five membership conditions of `𝓕` for the index set `F`.
pub fn lc_sober_filter_check(f: &BTreeSet<usize>, t: &LcSoberTables) -> Result<LcSoberReport> {
    t.check_consistent()?;
    let n = t.len();
    if let Some(&m) = f.iter().find(|&&m| m >= n) {
        return Err(QtopError::TableInconsistent(format!("index {m} beyond the tables")));
    }
    let c1 = f.iter().find(|&&m| !t.nonempty[m]).map(|m| format!("B_{m} is empty"));
    let c2 = f
        .iter()
        .flat_map(|&m| (0..n).map(move |k| (m, k)))
        .find(|&(m, k)| t.subset[m][k] && !f.contains(&k))
        .map(|(m, k)| format!("B_{m} ⊆ B_{k} but {k} ∉ F"));
    let c3 = f
        .iter()
        .flat_map(|&m| f.iter().map(move |&k| (m, k)))
        .find(|&(m, k)| !t.meet[m][k].is_some_and(|w| f.contains(&w)))
        .map(|(m, k)| format!("no k ∈ F with B_k = B_{m} ∩ B_{k}"));
    let c4 = f
        .iter()
        .find(|&&m| !f.iter().any(|&k| t.way_below[k][m]))
        .map(|m| format!("no n ∈ F with B_n ≪ B_{m}; m = {m}"));
    let c5 = t
        .unions
        .iter()
        .find(|&&(k, a, b)| f.contains(&k) && !f.contains(&a) && !f.contains(&b))
        .map(|(k, a, b)| format!("B_{k} = B_{a} ∪ B_{b} with neither in F"));
    Ok(LcSoberReport {
        conditions: vec![
            cond("non-empty basics", c1),
            cond("upward closure", c2),
            cond("intersection witness", c3),
            cond("way-below interpolation", c4),
            cond("union primality", c5),
        ],
        nonempty_family: !f.is_empty(),
    })
}
