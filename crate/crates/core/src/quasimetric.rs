//! Quasi-metrics on finite domains with exact rational distances, and the
//! concrete constructions built from them.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{BOT1, BOT2, OMEGA};
use crate::error::{QtopError, Result};
use crate::pointset::PointSet;
use crate::rat::{ExtRat, Rat};
use crate::space::FiniteSpace;

/// A distance table on points `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QMetric {
    pub labels: Vec<String>,
    pub table: Vec<Vec<Rat>>,
}

impl QMetric {
    pub fn new(labels: Vec<String>, table: Vec<Vec<Rat>>) -> Result<QMetric> {
        let n = labels.len();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(QtopError::Parse(format!("distance table must be {n}×{n}")));
        }
        if let Some((x, y)) = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).find(|&(x, y)| table[x][y].is_negative()) {
            return Err(QtopError::NotAQuasiMetric(format!("negative distance at ({x},{y})")));
        }
        Ok(QMetric { labels, table })
    }

    pub fn from_fn(labels: Vec<String>, f: impl Fn(usize, usize) -> Rat) -> QMetric {
        let n = labels.len();
        let table = (0..n).map(|x| (0..n).map(|y| f(x, y)).collect()).collect();
        QMetric { labels, table }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn d(&self, x: usize, y: usize) -> &Rat {
        &self.table[x][y]
    }

    /// Open ball `{y | d(x,y) < r}`.
    pub fn ball(&self, x: usize, r: &Rat) -> PointSet {
        (0..self.len()).filter(|&y| self.table[x][y] < *r).collect()
    }

    /// Closed ball `{y | d(x,y) ≤ r}`.
    pub fn closed_ball(&self, x: usize, r: &Rat) -> PointSet {
        (0..self.len()).filter(|&y| self.table[x][y] <= *r).collect()
    }

    /// Restriction to the listed points, in the given order.
    pub fn restrict(&self, pts: &[usize]) -> QMetric {
        QMetric {
            labels: pts.iter().map(|&p| self.labels[p].clone()).collect(),
            table: pts.iter().map(|&x| pts.iter().map(|&y| self.table[x][y].clone()).collect()).collect(),
        }
    }

    /// `d⁻¹(x, y) = d(y, x)`.
    pub fn transpose(&self) -> QMetric {
        QMetric::from_fn(self.labels.clone(), |x, y| self.table[y][x].clone())
    }
}

/// The topology generated by the open balls of `d`.
pub fn ball_topology(d: &QMetric) -> FiniteSpace {
    let n = d.len();
    let mut basis = Vec::new();
    for x in 0..n {
        for v in &d.table[x] {
            basis.push(d.closed_ball(x, v));
        }
    }
    basis.sort();
    basis.dedup();
    FiniteSpace::from_basis(d.labels.clone(), basis).expect("metric domain within point limit")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    Separation(usize, usize),
    NonzeroSelf(usize),
    Triangle(usize, usize, usize),
    Asymmetric(usize, usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Separation(a, b) => write!(f, "separation at ({a},{b})"),
            Violation::NonzeroSelf(a) => write!(f, "nonzero self-distance at {a}"),
            Violation::Triangle(a, b, c) => write!(f, "triangle at ({a},{b},{c})"),
            Violation::Asymmetric(a, b) => write!(f, "asymmetric at ({a},{b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub points: usize,
    pub triples: usize,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every violation of the quasi-metric axioms, by brute force.
pub fn qm_axioms_check(d: &QMetric) -> AxiomReport {
    let n = d.len();
    let mut violations = Vec::new();
    for x in 0..n {
        if !d.d(x, x).is_zero() {
            violations.push(Violation::NonzeroSelf(x));
        }
        for y in x + 1..n {
            if d.d(x, y).is_zero() && d.d(y, x).is_zero() {
                violations.push(Violation::Separation(x, y));
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            let dxy = d.d(x, y);
            for z in 0..n {
                if *d.d(x, z) > dxy + d.d(y, z) {
                    violations.push(Violation::Triangle(x, y, z));
                }
            }
        }
    }
    AxiomReport { points: n, triples: n * n * n, violations }
}

/// Metric axioms: the quasi-metric axioms plus symmetry.
pub fn metric_axioms_check(d: &QMetric) -> AxiomReport {
    let mut r = qm_axioms_check(d);
    for x in 0..d.len() {
        for y in x + 1..d.len() {
            if d.d(x, y) != d.d(y, x) {
                r.violations.push(Violation::Asymmetric(x, y));
            }
        }
    }
    r
}

/// `d̂(x,y) = max{d(x,y), d(y,x)}`.
pub fn sym_metrize(d: &QMetric) -> QMetric {
    QMetric::from_fn(d.labels.clone(), |x, y| d.d(x, y).clone().max(d.d(y, x).clone()))
}

/// `2^{-min(X∖Y)}`, or 0 when `X ⊆ Y`; sets given as bit masks.
pub fn pomega_bits(x: u64, y: u64) -> Rat {
    let diff = x & !y;
    if diff == 0 {
        Rat::zero()
    } else {
        Rat::pow2_neg(diff.trailing_zeros())
    }
}

pub fn pomega_qm(x: &std::collections::BTreeSet<u64>, y: &std::collections::BTreeSet<u64>) -> Rat {
    match x.difference(y).next() {
        Some(&m) => Rat::pow2_neg(m as u32),
        None => Rat::zero(),
    }
}

/// The `P(ω)` quasi-metric restricted to `P({0..k-1})`; point `i` is the
/// set with bit mask `i`.
pub fn powerset_qm(k: usize) -> QMetric {
    let labels = FiniteSpace::powerset(k).labels().to_vec();
    QMetric::from_fn(labels, |x, y| pomega_bits(x as u64, y as u64))
}

/// `d₁` on `ω+1`: 0 if `x ≤ y`, else `1/(y+1)`.  `ω` is [`OMEGA`].
pub fn omega_d1(x: usize, y: usize) -> Rat {
    if x <= y {
        Rat::zero()
    } else {
        Rat::frac(1, y as i64 + 1)
    }
}

/// `d₂` on `ω+1`: 0 if `x ≤ y`, else 1.
pub fn omega_d2(x: usize, y: usize) -> Rat {
    if x <= y {
        Rat::zero()
    } else {
        Rat::one()
    }
}

/// `ω+1` truncated to `points` points: `0..points-1` then `ω`.
pub fn omega_points(points: usize) -> Vec<usize> {
    assert!(points >= 1);
    (0..points - 1).chain([OMEGA]).collect()
}

pub fn omega_label(p: usize) -> String {
    if p == OMEGA {
        "omega".into()
    } else {
        p.to_string()
    }
}

/// A quasi-metric on a truncation of `ω+1` from a distance function.
pub fn omega_qm(points: usize, d: fn(usize, usize) -> Rat) -> QMetric {
    let pts = omega_points(points);
    QMetric::from_fn(pts.iter().map(|&p| omega_label(p)).collect(), |x, y| d(pts[x], pts[y]))
}

/// `d(x,y) = 0` if `x ≤ y` else `1`: compatible with any finite topology.
pub fn specialization_qm(space: &FiniteSpace) -> QMetric {
    QMetric::from_fn(space.labels().to_vec(), |x, y| if space.leq(x, y) { Rat::zero() } else { Rat::one() })
}

/// `d(x,y) = |{B ∈ basis | x ∈ B, y ∉ B}| / |basis|`: another compatible
/// quasi-metric, with more distinct values.
pub fn counting_basis_qm(space: &FiniteSpace) -> QMetric {
    let basis = space.basis().to_vec();
    let m = basis.len() as i64;
    QMetric::from_fn(space.labels().to_vec(), |x, y| {
        Rat::frac(basis.iter().filter(|b| b.contains(x) && !b.contains(y)).count() as i64, m)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CauchyStatus {
    ConfirmedToHorizon,
    ViolatedAt { n: usize, m: usize, eps: Rat },
}

/// Cauchy and convergence checks on a finite prefix.  For each `ε` a
/// witness `n₀` must be found in the first half of the prefix; the
/// remaining half is the evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauchyVerdict {
    pub status: CauchyStatus,
    pub horizon: usize,
}

impl CauchyVerdict {
    pub fn confirmed(&self) -> bool {
        self.status == CauchyStatus::ConfirmedToHorizon
    }
}

pub fn default_schedule() -> Vec<Rat> {
    (0..4).map(Rat::pow2_neg).collect()
}

/// Is `d(x_n, x_m) < ε` for all `m ≥ n ≥ n₀`, for some `n₀` in the first
/// half of `seq`?
pub fn cauchy_check<P>(seq: &[P], d: impl Fn(&P, &P) -> Rat, schedule: &[Rat]) -> CauchyVerdict {
    let len = seq.len();
    let window = len / 2;
    for eps in schedule {
        let bad = |n0: usize| -> Option<(usize, usize)> {
            (n0..len).flat_map(|n| (n..len).map(move |m| (n, m))).find(|&(n, m)| d(&seq[n], &seq[m]) >= *eps)
        };
        if (0..=window).all(|n0| bad(n0).is_some()) {
            let (n, m) = bad(window).expect("checked above");
            return CauchyVerdict { status: CauchyStatus::ViolatedAt { n, m, eps: eps.clone() }, horizon: len };
        }
    }
    CauchyVerdict { status: CauchyStatus::ConfirmedToHorizon, horizon: len }
}

/// Is `d̂(c, x_n) < ε` for all `n ≥ n₀`, for some `n₀` in the first half?
/// A violation reports `(n, n)` with the offending index.
pub fn limit_check<P>(seq: &[P], candidate: &P, dhat: impl Fn(&P, &P) -> Rat, schedule: &[Rat]) -> CauchyVerdict {
    let len = seq.len();
    let window = len / 2;
    for eps in schedule {
        let bad = |n0: usize| (n0..len).find(|&n| dhat(candidate, &seq[n]) >= *eps);
        if (0..=window).all(|n0| bad(n0).is_some()) {
            let n = bad(window).expect("checked above");
            return CauchyVerdict { status: CauchyStatus::ViolatedAt { n, m: n, eps: eps.clone() }, horizon: len };
        }
    }
    CauchyVerdict { status: CauchyStatus::ConfirmedToHorizon, horizon: len }
}

fn dist_to_set(d: &QMetric, x: usize, f: PointSet) -> ExtRat {
    f.iter().map(|z| ExtRat::Finite(d.d(x, z).clone())).min().unwrap_or(ExtRat::Infinite)
}

fn recip(v: &ExtRat) -> Rat {
    match v {
        ExtRat::Finite(r) => r.recip(),
        ExtRat::Infinite => Rat::zero(),
    }
}

/// `d′` restricted to `Y`, together with the carrier ids of `Y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceMetric {
    pub points: Vec<usize>,
    pub metric: QMetric,
}

/// `d′ = d + Σ d_i` on `Y = ⋂(U_i ∪ A_i)` with
/// `d_i(x,y) = min{2^{-i-1}, max{0, 1/d(y,F_i) − 1/d(x,F_i)}}` for `x,y ∈ U_i`,
/// `2^{-i-1}` for `x ∈ U_i, y ∈ A_i`, and `0` for `x ∈ A_i`.
pub fn pi2_subspace_qm(d: &QMetric, pairs: &[(PointSet, PointSet)]) -> Result<SubspaceMetric> {
    let top = ball_topology(d);
    let n = d.len();
    let mut y_set = PointSet::full(n);
    for (i, &(u, a)) in pairs.iter().enumerate() {
        if !top.is_open(u) {
            return Err(QtopError::NotOpen(u.to_vec()));
        }
        if !top.is_closed(a) {
            return Err(QtopError::NotClosed(a.to_vec()));
        }
        if !u.intersect(a).is_empty() {
            return Err(QtopError::PairNotDisjoint(i));
        }
        y_set = y_set.intersect(u.union(a));
    }
    let pts = y_set.to_vec();
    // 1/d(x, F_i) for every point of Y inside U_i
    let mut inv: Vec<BTreeMap<usize, Rat>> = Vec::with_capacity(pairs.len());
    for (i, &(u, _)) in pairs.iter().enumerate() {
        let f = u.complement(n);
        let mut m = BTreeMap::new();
        for &x in &pts {
            if u.contains(x) {
                let dx = dist_to_set(d, x, f);
                if dx == ExtRat::Finite(Rat::zero()) {
                    return Err(QtopError::PointOnBoundary { pair: i, point: x });
                }
                m.insert(x, recip(&dx));
            }
        }
        inv.push(m);
    }
    let table = pts
        .iter()
        .map(|&x| {
            pts.iter()
                .map(|&y| {
                    let mut acc = d.d(x, y).clone();
                    for (i, &(u, _)) in pairs.iter().enumerate() {
                        let cap = Rat::pow2_neg(i as u32 + 1);
                        if !u.contains(x) {
                            continue;
                        }
                        acc = acc
                            + if u.contains(y) {
                                inv[i][&y].monus(&inv[i][&x]).min(cap)
                            } else {
                                cap
                            };
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let labels = pts.iter().map(|&p| d.labels[p].clone()).collect();
    Ok(SubspaceMetric { points: pts, metric: QMetric { labels, table } })
}

/// `σ ⊑ σ′` iff `σ = σ′`, or `(σ∧σ′)⋄0 ⪯ σ`, or `(σ∧σ′)⋄1 ⪯ σ′`.
pub fn tree_le(a: &[u8], b: &[u8]) -> bool {
    if a == b {
        return true;
    }
    let c = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    (c < a.len() && a[c] == 0) || (c < b.len() && b[c] == 1)
}

/// All binary strings of length at most `k`, shortest first.
pub fn binary_strings(k: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &layer {
            for bit in [0u8, 1] {
                let mut t: Vec<u8> = s.clone();
                t.push(bit);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeMetric {
    /// Non-empty blocks `A_σ` in carrier ids.
    pub blocks: BTreeMap<Vec<u8>, PointSet>,
    pub points: Vec<usize>,
    pub rho: QMetric,
}

/// Partition `Y = ⋃(U_i∖V_i)` into blocks `A_σ` and build
/// `ρ(x,y) = d(x,y) + 1` when `σ_y ⊑ σ_x` and `σ_y ≠ σ_x`, else `d(x,y)`.
pub fn sigma2_tree_qm(d: &QMetric, pairs: &[(PointSet, PointSet)]) -> Result<TreeMetric> {
    let top = ball_topology(d);
    for (i, &(u, v)) in pairs.iter().enumerate() {
        for s in [u, v] {
            if !top.is_open(s) {
                return Err(QtopError::NotOpen(s.to_vec()));
            }
        }
        if !v.is_subset(u) {
            return Err(QtopError::VNotInU(i));
        }
    }
    let n = d.len();
    let mut blocks = BTreeMap::new();
    let mut frontier = vec![(Vec::<u8>::new(), PointSet::full(n))];
    for &(u, v) in pairs {
        let mut next = Vec::new();
        for (sigma, b) in frontier {
            let a = b.intersect(u.minus(v));
            if !a.is_empty() {
                blocks.insert(sigma.clone(), a);
            }
            let mut s0 = sigma.clone();
            s0.push(0);
            let mut s1 = sigma;
            s1.push(1);
            next.push((s0, b.minus(u)));
            next.push((s1, b.intersect(v)));
        }
        frontier = next;
    }
    let mut owner: BTreeMap<usize, Vec<u8>> = BTreeMap::new();
    for (sigma, a) in &blocks {
        for x in a.iter() {
            owner.insert(x, sigma.clone());
        }
    }
    let pts: Vec<usize> = owner.keys().copied().collect();
    let table = pts
        .iter()
        .map(|&x| {
            pts.iter()
                .map(|&y| {
                    let (sx, sy) = (&owner[&x], &owner[&y]);
                    let base = d.d(x, y).clone();
                    if sx != sy && tree_le(sy, sx) {
                        base + Rat::one()
                    } else {
                        base
                    }
                })
                .collect()
        })
        .collect();
    let labels = pts.iter().map(|&p| d.labels[p].clone()).collect();
    Ok(TreeMetric { blocks, points: pts, rho: QMetric { labels, table } })
}

/// `Σ 2^{-i} d_i(x_i,y_i) / (1 + d_i(x_i,y_i))`.
pub fn product_qm(ds: &[&QMetric], xs: &[usize], ys: &[usize]) -> Result<Rat> {
    if ds.len() != xs.len() {
        return Err(QtopError::ArityMismatch(ds.len(), xs.len()));
    }
    if ds.len() != ys.len() {
        return Err(QtopError::ArityMismatch(ds.len(), ys.len()));
    }
    Ok(ds
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let v = d.d(xs[i], ys[i]);
            Rat::pow2_neg(i as u32) * (v / &(v + &Rat::one()))
        })
        .sum())
}

/// The product quasi-metric as a table over all tuples, in lexicographic
/// order of component indices.
pub fn product_table(ds: &[&QMetric]) -> QMetric {
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for d in ds {
        tuples = tuples
            .into_iter()
            .flat_map(|t| (0..d.len()).map(move |i| [t.clone(), vec![i]].concat()))
            .collect();
    }
    let labels = tuples
        .iter()
        .map(|t| format!("({})", t.iter().enumerate().map(|(i, &c)| ds[i].labels[c].clone()).collect::<Vec<_>>().join(",")))
        .collect();
    QMetric::from_fn(labels, |x, y| product_qm(ds, &tuples[x], &tuples[y]).expect("arity fixed"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PMetric {
    pub labels: Vec<String>,
    pub table: Vec<Vec<Rat>>,
}

impl PMetric {
    pub fn from_fn(labels: Vec<String>, f: impl Fn(usize, usize) -> Rat) -> PMetric {
        let n = labels.len();
        PMetric { labels, table: (0..n).map(|x| (0..n).map(|y| f(x, y)).collect()).collect() }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn p(&self, x: usize, y: usize) -> &Rat {
        &self.table[x][y]
    }
}

/// All violated partial-metric axioms, as readable strings.
pub fn pmetric_violations(p: &PMetric) -> Vec<String> {
    let n = p.len();
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if p.p(x, y).is_negative() {
                out.push(format!("negative value at ({x},{y})"));
            }
            if p.p(x, y) != p.p(y, x) {
                out.push(format!("asymmetric at ({x},{y})"));
            }
            if p.p(x, x) > p.p(x, y) {
                out.push(format!("p({x},{x}) > p({x},{y})"));
            }
            if x < y && p.p(x, x) == p.p(x, y) && p.p(x, y) == p.p(y, y) {
                out.push(format!("separation at ({x},{y})"));
            }
            for z in 0..n {
                if *p.p(x, z) > &(p.p(x, y) + p.p(y, z)) - p.p(y, y) {
                    out.push(format!("triangle at ({x},{y},{z})"));
                }
            }
        }
    }
    out
}

/// `d_p(x,y) = p(x,y) − p(x,x)`.
pub fn partial_to_quasi(p: &PMetric) -> Result<QMetric> {
    if let Some(v) = pmetric_violations(p).into_iter().next() {
        return Err(QtopError::PMetricAxiomViolation(v));
    }
    Ok(QMetric::from_fn(p.labels.clone(), |x, y| p.p(x, y) - p.p(x, x)))
}

/// Ladder labels in catalog order: the two bottoms, then rungs `0..depth`.
pub fn ladder_labels(depth: usize) -> Vec<String> {
    ["bot1".to_string(), "bot2".to_string()].into_iter().chain((0..depth).map(|n| n.to_string())).collect()
}

fn ladder_le(x: usize, y: usize) -> bool {
    crate::catalog::CatalogSpace::new(crate::catalog::CatalogTag::TwoBottomLadder, 0).ladder_le(x, y)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub depth: usize,
    /// `d_p(x,y) = 0` exactly when `x ⊑ y`.
    pub respects_order: bool,
    /// `p(n,n)` for `n = 0..depth`.
    pub chain: Vec<Rat>,
    pub strictly_increasing: bool,
    /// Every `p(n,n)` is below `p(⊥₁,⊥₁)` and `p(⊥₂,⊥₂)`.
    pub bounded_by_bottoms: bool,
    /// `p(⊥₁,⊥₂) ≤ p(⊥₁,⊥₁) + p(⊥₂,⊥₂) − p(n,n)` for every `n`.
    pub inequality_chain: bool,
    /// `p(⊥₁,⊥₁) + p(⊥₂,⊥₂) − p(⊥₁,⊥₂)`: an upper bound on every `p(n,n)`.
    pub gap_bound: Rat,
    /// The gap bound lies strictly below both bottom weights, so no bottom
    /// can carry the limit of the chain.
    pub gap_below_bottoms: bool,
    /// All of the above hold: the forced pattern is present.
    pub contradiction_pattern: bool,
}

/// Examine a partial metric on the ladder truncated to `depth` rungs.
pub fn two_bottom_obstruction(p: &PMetric) -> Result<ObstructionReport> {
    if p.len() < 2 {
        return Err(QtopError::PreconditionFailed("ladder needs both bottoms".into()));
    }
    let d = partial_to_quasi(p)?;
    let depth = p.len() - 2;
    let n = p.len();
    let respects_order = (0..n).all(|x| (0..n).all(|y| d.d(x, y).is_zero() == ladder_le(x, y)));
    let chain: Vec<Rat> = (0..depth).map(|k| p.p(k + 2, k + 2).clone()).collect();
    let strictly_increasing = chain.windows(2).all(|w| w[0] < w[1]);
    let (b1, b2, b12) = (p.p(BOT1, BOT1), p.p(BOT2, BOT2), p.p(BOT1, BOT2));
    let bounded_by_bottoms = chain.iter().all(|c| c < b1 && c < b2);
    let inequality_chain = chain.iter().all(|c| *b12 <= &(b1 + b2) - c);
    let gap_bound = &(b1 + b2) - b12;
    let gap_below_bottoms = gap_bound < *b1 && gap_bound < *b2;
    let contradiction_pattern =
        respects_order && strictly_increasing && bounded_by_bottoms && inequality_chain && gap_below_bottoms;
    Ok(ObstructionReport {
        depth,
        respects_order,
        chain,
        strictly_increasing,
        bounded_by_bottoms,
        inequality_chain,
        gap_bound,
        gap_below_bottoms,
        contradiction_pattern,
    })
}

/// A random candidate partial metric on the ladder: comparable pairs get
/// the weight of the lower point, the bottoms meet at a random value.
/// Candidates are not guaranteed to satisfy the axioms.
pub fn random_ladder_pmetric<R: Rng>(rng: &mut R, depth: usize) -> PMetric {
    let mut w = vec![Rat::zero(); depth + 2];
    let mut acc = Rat::frac(rng.gen_range(0..4), 4);
    for k in 0..depth {
        acc = acc + Rat::frac(rng.gen_range(1..=3), rng.gen_range(1..=8));
        w[k + 2] = acc.clone();
    }
    w[BOT1] = &acc + &Rat::frac(rng.gen_range(0..=6), rng.gen_range(1..=4));
    w[BOT2] = &acc + &Rat::frac(rng.gen_range(0..=6), rng.gen_range(1..=4));
    // mostly inside the window the triangle law allows, sometimes past it
    let room = w[BOT1].clone().min(w[BOT2].clone()) - acc.clone();
    let meet = w[BOT1].clone().max(w[BOT2].clone()) + room * Rat::frac(rng.gen_range(0..=5), 4);
    PMetric::from_fn(ladder_labels(depth), |x, y| {
        if (x == BOT1 && y == BOT2) || (x == BOT2 && y == BOT1) {
            meet.clone()
        } else if ladder_le(x, y) {
            w[x].clone()
        } else {
            w[y].clone()
        }
    })
}

/// `Q(f,ε)`: points `x` such that every open `U ∋ x` contains an open
/// `V ∋ x` whose image lies in some ball `B(y,ε)` with `y ∈ f(V)`.  An
/// empty image satisfies the condition.  `f[x] = None` outside `dom(f)`.
pub fn oscillation_set(domain: &FiniteSpace, f: &[Option<usize>], codomain: &QMetric, eps: &Rat) -> PointSet {
    let opens = domain.opens();
    let good = |v: PointSet| -> bool {
        let img: PointSet = v.iter().filter_map(|x| f[x]).collect();
        img.is_empty() || img.iter().any(|y| img.is_subset(codomain.ball(y, eps)))
    };
    (0..domain.len())
        .filter(|&x| {
            opens
                .iter()
                .filter(|u| u.contains(x))
                .all(|&u| opens.iter().any(|&v| v.contains(x) && v.is_subset(u) && good(v)))
        })
        .collect()
}

/// `Q(f) = ⋂ Q(f,ε)` over the schedule.
pub fn q_set(domain: &FiniteSpace, f: &[Option<usize>], codomain: &QMetric, schedule: &[Rat]) -> PointSet {
    schedule
        .iter()
        .fold(domain.whole(), |acc, e| acc.intersect(oscillation_set(domain, f, codomain, e)))
}

/// A random quasi-metric on a random subset of `P({0..k-1})`:
/// `d(X,Y) = max{w_n | n ∈ X∖Y}` for random positive weights.
pub fn random_carrier<R: Rng>(rng: &mut R, k: usize, min_points: usize) -> QMetric {
    let weights: Vec<Rat> = (0..k).map(|_| Rat::frac(rng.gen_range(1..=8), rng.gen_range(1..=8))).collect();
    let mut pts: Vec<usize> = (0..1usize << k).filter(|_| rng.gen_bool(0.6)).collect();
    let mut extra = 0;
    while pts.len() < min_points.min(1 << k) {
        if !pts.contains(&extra) {
            pts.push(extra);
        }
        extra += 1;
    }
    pts.sort();
    let labels = pts.iter().map(|p| format!("{p:b}")).collect();
    QMetric::from_fn(labels, |x, y| {
        PointSet((pts[x] & !pts[y]) as u64).iter().map(|i| weights[i].clone()).max().unwrap_or_else(Rat::zero)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn set(v: &[u64]) -> BTreeSet<u64> {
        v.iter().copied().collect()
    }

    #[test]
    fn pomega_examples() {
        assert_eq!(pomega_qm(&set(&[0, 2]), &set(&[2])), Rat::one());
        assert_eq!(pomega_qm(&set(&[1]), &set(&[1, 2])), Rat::zero());
        assert_eq!(pomega_qm(&set(&[1, 3]), &set(&[1])), Rat::frac(1, 8));
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega_d1(3, 5), Rat::zero());
        assert_eq!(omega_d1(5, 3), Rat::frac(1, 4));
        assert_eq!(omega_d2(OMEGA, 7), Rat::one());
        assert_eq!(omega_d2(7, OMEGA), Rat::zero());
    }

    #[test]
    fn axioms_of_named_metrics() {
        let p3 = qm_axioms_check(&powerset_qm(3));
        assert!(p3.passed());
        assert_eq!(p3.triples, 512);
        assert!(qm_axioms_check(&omega_qm(10, omega_d2)).passed());
        assert!(qm_axioms_check(&omega_qm(10, omega_d1)).passed());
    }

    #[test]
    fn broken_metric_reports_separation() {
        let d = QMetric::new(vec!["a".into(), "b".into()], vec![vec![Rat::zero(); 2]; 2]).unwrap();
        let r = qm_axioms_check(&d);
        assert_eq!(r.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(), vec!["separation at (0,1)"]);
    }

    #[test]
    fn symmetrization_examples() {
        let d = powerset_qm(3);
        let h = sym_metrize(&d);
        assert_eq!(h.d(1, 2), &Rat::one());
        assert!(metric_axioms_check(&h).passed());
        let w = omega_qm(8, omega_d1);
        let h1 = sym_metrize(&w);
        assert_eq!(h1.d(3, 5), &Rat::frac(1, 4));
    }

    #[test]
    fn d2_sequence_is_cauchy_without_limit() {
        let seq: Vec<usize> = (0..=20).collect();
        let sched = default_schedule();
        assert!(cauchy_check(&seq, |&a, &b| omega_d2(a, b), &sched).confirmed());
        let dhat2 = |a: &usize, b: &usize| omega_d2(*a, *b).max(omega_d2(*b, *a));
        for c in (0..=25).chain([OMEGA]) {
            let v = limit_check(&seq, &c, dhat2, &sched);
            assert!(!v.confirmed(), "candidate {c}");
        }
        let dhat1 = |a: &usize, b: &usize| omega_d1(*a, *b).max(omega_d1(*b, *a));
        assert!(cauchy_check(&seq, |&a, &b| omega_d1(a, b), &sched).confirmed());
        assert!(limit_check(&seq, &OMEGA, dhat1, &sched).confirmed());
    }

    #[test]
    fn constant_sequence_converges() {
        let seq = vec![4usize; 10];
        let dhat = |a: &usize, b: &usize| omega_d1(*a, *b).max(omega_d1(*b, *a));
        assert!(cauchy_check(&seq, |&a, &b| omega_d1(a, b), &default_schedule()).confirmed());
        assert!(limit_check(&seq, &4, dhat, &default_schedule()).confirmed());
    }

    #[test]
    fn reverse_sequence_is_not_cauchy_under_d2() {
        let seq: Vec<usize> = (0..=20).rev().collect();
        let v = cauchy_check(&seq, |&a, &b| omega_d2(a, b), &default_schedule());
        match v.status {
            CauchyStatus::ViolatedAt { n, m, eps } => {
                assert!(m >= n && omega_d2(seq[n], seq[m]) >= eps);
            }
            s => panic!("unexpected {s:?}"),
        }
    }

    #[test]
    fn pi2_hand_example() {
        let d = powerset_qm(1);
        let r = pi2_subspace_qm(&d, &[(PointSet::from_points([1]), PointSet::from_points([0]))]).unwrap();
        assert_eq!(r.points, vec![0, 1]);
        assert_eq!(r.metric.d(1, 0), &Rat::frac(3, 2));
        assert_eq!(r.metric.d(0, 1), &Rat::zero());
        let same = pi2_subspace_qm(&d, &[]).unwrap();
        assert_eq!(same.metric, d);
    }

    #[test]
    fn pi2_rejects_bad_pairs() {
        let d = powerset_qm(1);
        let both = PointSet::from_points([0, 1]);
        assert_eq!(pi2_subspace_qm(&d, &[(both, both)]), Err(QtopError::PairNotDisjoint(0)));
        assert!(matches!(
            pi2_subspace_qm(&d, &[(PointSet::from_points([0]), PointSet::EMPTY)]),
            Err(QtopError::NotOpen(_))
        ));
    }

    #[test]
    fn tree_order_examples() {
        // ⟨0⟩ lies to the left of ⟨⟩, which lies to the left of ⟨1⟩
        assert!(tree_le(&[0], &[]));
        assert!(!tree_le(&[], &[0]));
        assert!(tree_le(&[], &[1]));
        assert!(tree_le(&[0, 1], &[1, 0]));
        assert_eq!(binary_strings(3).len(), 15);
    }

    #[test]
    fn sigma2_single_pair_is_one_block() {
        let d = powerset_qm(2);
        let u = PointSet::from_points([1, 3]);
        let v = PointSet::from_points([3]);
        let r = sigma2_tree_qm(&d, &[(u, v)]).unwrap();
        assert_eq!(r.blocks.len(), 1);
        assert_eq!(r.blocks[&vec![]], PointSet::from_points([1]));
        assert_eq!(r.rho, d.restrict(&[1]));
        assert_eq!(sigma2_tree_qm(&d, &[(v, u)]), Err(QtopError::VNotInU(0)));
    }

    #[test]
    fn sigma2_two_pairs_penalty_direction() {
        // P(2): U₀ = ↑{0}, V₀ = {{0,1}}; U₁ = X, V₁ = ∅
        let d = powerset_qm(2);
        let u0 = PointSet::from_points([1, 3]);
        let v0 = PointSet::from_points([3]);
        let r = sigma2_tree_qm(&d, &[(u0, v0), (PointSet::full(4), PointSet::EMPTY)]).unwrap();
        assert_eq!(r.blocks[&vec![]], PointSet::from_points([1]));
        assert_eq!(r.blocks[&vec![0]], PointSet::from_points([0, 2]));
        let ix = |p: usize| r.points.iter().position(|&q| q == p).unwrap();
        // x = ∅ in A_⟨0⟩, y = {0} in A_⟨⟩: ⟨0⟩ ⊑ ⟨⟩, so the penalty lands on ρ(y,x)
        let (x, y) = (ix(0), ix(1));
        assert_eq!(r.rho.d(x, y), d.d(0, 1));
        assert_eq!(r.rho.d(y, x), &(d.d(1, 0) + &Rat::one()));
        assert!(qm_axioms_check(&r.rho).passed());
    }

    #[test]
    fn product_examples() {
        let d = powerset_qm(1);
        assert_eq!(product_qm(&[&d, &d], &[1, 0], &[0, 0]).unwrap(), Rat::frac(1, 2));
        assert_eq!(product_qm(&[&d, &d], &[1, 1], &[1, 1]).unwrap(), Rat::zero());
        assert_eq!(product_qm(&[&d], &[1, 1], &[1]), Err(QtopError::ArityMismatch(1, 2)));
        let p2 = powerset_qm(2);
        assert!(qm_axioms_check(&product_table(&[&p2, &p2])).passed());
    }

    #[test]
    fn partial_metric_examples() {
        let p = PMetric::from_fn(vec!["0".into(), "1".into(), "2".into()], |x, y| Rat::int(x.max(y) as i64));
        let d = partial_to_quasi(&p).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(d.d(x, y), &Rat::int((x.max(y) - x) as i64));
            }
        }
        assert!(qm_axioms_check(&d).passed());
        let m = PMetric::from_fn(vec!["a".into(), "b".into()], |x, y| if x == y { Rat::zero() } else { Rat::one() });
        let dm = partial_to_quasi(&m).unwrap();
        assert_eq!(dm.table, m.table);
    }

    #[test]
    fn ladder_obstruction_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut passing = 0;
        while passing < 20 {
            let p = random_ladder_pmetric(&mut rng, 10);
            if !pmetric_violations(&p).is_empty() {
                continue;
            }
            let r = two_bottom_obstruction(&p).unwrap();
            if !r.respects_order {
                continue;
            }
            passing += 1;
            assert!(r.contradiction_pattern, "{r:?}");
        }
    }

    #[test]
    fn swap_on_sierpinski_has_full_q_set() {
        let s = FiniteSpace::sierpinski();
        let d = QMetric::from_fn(s.labels().to_vec(), |x, y| if x == 1 && y == 0 { Rat::one() } else { Rat::zero() });
        assert!(ball_topology(&d).same_topology(&s));
        let f = [Some(1), Some(0)];
        assert_eq!(q_set(&s, &f, &d, &default_schedule()), s.whole());
        assert!(s.is_continuous(&s, &[1, 0]).is_err());
    }

    #[test]
    fn identity_on_omega_plus_one_has_full_q_set() {
        use crate::catalog::{CatalogSpace, CatalogTag};
        let cat = CatalogSpace::new(CatalogTag::OmegaPlusOneScott, 8);
        let dom = cat.to_finite();
        let cod = omega_qm(9, omega_d2);
        let f: Vec<Option<usize>> = (0..9).map(|i| if i < 8 { Some(i) } else { None }).collect();
        assert_eq!(q_set(&dom, &f, &cod, &default_schedule()), dom.whole());
    }

    #[test]
    fn ball_topology_of_specialization_metric() {
        let p = FiniteSpace::powerset(2);
        assert!(ball_topology(&specialization_qm(&p)).same_topology(&p));
        assert!(ball_topology(&counting_basis_qm(&p)).same_topology(&p));
        assert!(ball_topology(&powerset_qm(2)).same_topology(&p));
    }

    #[test]
    fn random_carriers_are_quasi_metrics() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let d = random_carrier(&mut rng, 3, 3);
            assert!(qm_axioms_check(&d).passed());
        }
    }
}
