//! Baire-space machinery at prefix scale: cylinders, the enumeration
//! representation `δ`, the translation `g` with `f = δ∘g`, and the
//! membership conditions for families coded by an open surjection.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QtopError, Result};
use crate::pointset::PointSet;
use crate::space::FiniteSpace;

pub type Seq = Vec<u64>;

/// `↑σ`: all infinite extensions of `σ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cylinder {
    pub sigma: Seq,
}

impl Cylinder {
    pub fn new(sigma: Seq) -> Cylinder {
        Cylinder { sigma }
    }

    /// Does `↑σ` meet the finite prefix `p` (as an initial segment)?
    pub fn contains_prefix(&self, p: &[u64]) -> bool {
        p.len() >= self.sigma.len() && p.starts_with(&self.sigma)
    }

    pub fn is_subset(&self, other: &Cylinder) -> bool {
        self.sigma.starts_with(&other.sigma)
    }
}

/// `{x | ∃m < |σ|: σ(m) = x+1}`.
pub fn delta_prefix(sigma: &[u64]) -> BTreeSet<u64> {
    sigma.iter().filter(|&&v| v > 0).map(|v| v - 1).collect()
}

/// All sequences over `{0..alphabet-1}` of length at most `depth`, shortest
/// first then lexicographic.
pub fn all_prefixes(alphabet: u64, depth: usize) -> Vec<Seq> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..depth {
        layer = layer
            .iter()
            .flat_map(|s: &Seq| (0..alphabet).map(move |a| [s.as_slice(), &[a]].concat()))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// A monotone finite approximation of a continuous `f: ω^ω → P(ω)`:
/// `value(σ)` holds the `n` with `f(↑σ) ⊆ ↑{n}`.  Past `depth` the value of
/// the truncated prefix is used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixFun {
    pub alphabet: u64,
    pub depth: usize,
    pub values: BTreeMap<Seq, BTreeSet<u64>>,
}

impl PrefixFun {
    pub fn from_fn(alphabet: u64, depth: usize, f: impl Fn(&[u64]) -> BTreeSet<u64>) -> PrefixFun {
        let values = all_prefixes(alphabet, depth).into_iter().map(|s| {
            let v = f(&s);
            (s, v)
        });
        PrefixFun { alphabet, depth, values: values.collect() }
    }

    pub fn value(&self, sigma: &[u64]) -> BTreeSet<u64> {
        let cut = &sigma[..sigma.len().min(self.depth)];
        self.values.get(cut).cloned().unwrap_or_default()
    }

    /// `σ ⪯ σ′ ⇒ value(σ) ⊆ value(σ′)`; checked on one-step extensions.
    pub fn check_monotone(&self) -> Result<()> {
        for (s, v) in &self.values {
            for a in 0..self.alphabet {
                let t = [s.as_slice(), &[a]].concat();
                if let Some(w) = self.values.get(&t) {
                    if !v.is_subset(w) {
                        return Err(QtopError::PreconditionFailed(format!("value shrinks from {s:?} to {t:?}")));
                    }
                }
            }
        }
        Ok(())
    }
}

pub const FIXTURE_NAMES: &[&str] = &["empty", "delta", "first-parity", "prefix-sums", "doubled"];

/// Named test functions over the given alphabet and depth.
pub fn fixture(name: &str, alphabet: u64, depth: usize) -> Result<PrefixFun> {
    let f: fn(&[u64]) -> BTreeSet<u64> = match name {
        "empty" => |_| BTreeSet::new(),
        "delta" => delta_prefix,
        "first-parity" => |s| s.first().map(|a| a % 2).into_iter().collect(),
        "prefix-sums" => |s| (1..=s.len()).map(|i| s[..i].iter().sum()).collect(),
        "doubled" => |s| s.iter().map(|a| 2 * a).collect(),
        other => return Err(QtopError::Parse(format!("unknown fixture function {other:?}"))),
    };
    Ok(PrefixFun::from_fn(alphabet, depth, f))
}

/// A finite prefix of a surjection `r: ω → ω` with infinite fibres.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RTable {
    pub values: Vec<u64>,
}

impl RTable {
    /// First projection of the Cantor unpairing.
    pub fn cantor(len: usize) -> RTable {
        let mut values = Vec::with_capacity(len);
        let mut w = 0u64;
        'outer: loop {
            for b in 0..=w {
                if values.len() == len {
                    break 'outer;
                }
                values.push(w - b);
            }
            w += 1;
        }
        RTable { values }
    }

    pub fn r(&self, i: usize) -> Result<u64> {
        self.values.get(i).copied().ok_or(QtopError::RTableTooShort(i))
    }
}

/// `g(p)(i) = r(i)+1` if `r(i) ∈ value(p[i])`, else `0`, for `i < |p|`.
pub fn translate_prefix(f: &PrefixFun, r: &RTable, p: &[u64]) -> Result<Seq> {
    (0..p.len())
        .map(|i| {
            let ri = r.r(i)?;
            Ok(if f.value(&p[..i]).contains(&ri) { ri + 1 } else { 0 })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationMismatch {
    pub prefix: Seq,
    pub f_value: BTreeSet<u64>,
    pub delta_g: BTreeSet<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslateReport {
    pub alphabet: u64,
    pub depth: usize,
    pub prefixes_tested: usize,
    /// Length of `g(p)` read for each prefix.
    pub g_length: usize,
    pub mismatches: Vec<FactorizationMismatch>,
    /// `δ(g(p[i])) ⊆ value(p[i])` at every length read.
    pub sound: bool,
    pub samples: Vec<(Seq, Seq)>,
}

impl TranslateReport {
    pub fn holds(&self) -> bool {
        self.sound && self.mismatches.is_empty()
    }
}

/// Check `f = δ∘g` on every prefix to depth.  Each prefix `σ` is padded with
/// zeros to the point `p = σ0^ω`, whose value is fixed from `depth` on; `g(p)`
/// is read far enough that `r` revisits every element of that value.
pub fn admissible_translate(f: &PrefixFun, r: &RTable) -> Result<TranslateReport> {
    f.check_monotone()?;
    let prefixes = all_prefixes(f.alphabet, f.depth);
    let wanted: BTreeSet<u64> = f.values.values().flatten().copied().collect();
    let mut g_length = f.depth;
    for &n in &wanted {
        let hit = (f.depth..r.values.len()).find(|&i| r.values[i] == n).ok_or(QtopError::RTableTooShort(n as usize))?;
        g_length = g_length.max(hit + 1);
    }
    let mut mismatches = Vec::new();
    let mut sound = true;
    let mut samples = Vec::new();
    for sigma in &prefixes {
        let mut p = sigma.clone();
        p.resize(g_length, 0);
        let g = translate_prefix(f, r, &p)?;
        for i in 0..=g_length {
            if !delta_prefix(&g[..i]).is_subset(&f.value(&p[..i])) {
                sound = false;
            }
        }
        let f_value = f.value(&p);
        let delta_g = delta_prefix(&g);
        if f_value != delta_g {
            mismatches.push(FactorizationMismatch { prefix: sigma.clone(), f_value, delta_g });
        }
        if samples.len() < 8 && sigma.len() == f.depth {
            samples.push((sigma.clone(), g[..f.depth].to_vec()));
        }
    }
    Ok(TranslateReport {
        alphabet: f.alphabet,
        depth: f.depth,
        prefixes_tested: prefixes.len(),
        g_length,
        mismatches,
        sound,
        samples,
    })
}

// ------------------------------------------------------ open surjections

/// Enumeration `σ_0, σ_1, ..` of the prefixes over an alphabet to depth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixTable {
    pub alphabet: u64,
    pub depth: usize,
    pub seqs: Vec<Seq>,
}

impl PrefixTable {
    pub fn new(alphabet: u64, depth: usize) -> PrefixTable {
        PrefixTable { alphabet, depth, seqs: all_prefixes(alphabet, depth) }
    }

    pub fn len(&self) -> usize {
        self.seqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seqs.is_empty()
    }

    pub fn index(&self, s: &[u64]) -> Option<usize> {
        self.seqs.iter().position(|t| t == s)
    }

    /// Strict prefix relation `σ_m ≺ σ_n`.
    pub fn strict_prefix(&self, m: usize, n: usize) -> bool {
        self.seqs[n].len() > self.seqs[m].len() && self.seqs[n].starts_with(&self.seqs[m])
    }
}

/// An open continuous surjection `ω^ω → Y` for a finite T0 space `Y`.  Read
/// `p` left to right from `U = Y`: entry `a` picks the `(a mod |U|)`-th point
/// `x` of `U` and replaces `U` by the minimal neighbourhood of `x`.  The image
/// of `↑σ` is the `U` reached after `σ`, and `f(p)` is the generator of the
/// eventual `U`.
#[derive(Clone, Debug)]
pub struct NbhdSurjection {
    pub space: FiniteSpace,
}

impl NbhdSurjection {
    pub fn new(space: FiniteSpace) -> Result<NbhdSurjection> {
        space.require_t0()?;
        Ok(NbhdSurjection { space })
    }

    /// `f(↑σ)`.
    pub fn image(&self, sigma: &[u64]) -> PointSet {
        sigma.iter().fold(self.space.whole(), |u, &a| {
            let pts = u.to_vec();
            self.space.nbhd(pts[(a as usize) % pts.len()])
        })
    }

    /// The least point of `f(↑σ)`, which is `f(σ·c^ω)` for the entry `c`
    /// that keeps choosing it.
    pub fn point(&self, sigma: &[u64]) -> usize {
        let u = self.image(sigma);
        u.iter().find(|&x| self.space.nbhd(x) == u).expect("minimal neighbourhoods have a generator")
    }
}

/// Relation tables over prefix indices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FTables {
    pub depth: usize,
    /// `|σ_m|`.
    pub lengths: Vec<usize>,
    /// `prefix[m][n]`: `σ_m ≺ σ_n`.
    pub prefix: Vec<Vec<bool>>,
    /// `incl[m][n]`: `f(B_m) ⊆ f(B_n)`.
    pub incl: Vec<Vec<bool>>,
    /// `meets[m][n]`: the `k` with `f(B_k) ⊆ f(B_m) ∩ f(B_n)`.
    pub meets: Vec<Vec<Vec<usize>>>,
}

impl FTables {
    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn check_consistent(&self) -> Result<()> {
        let n = self.len();
        let bad = |s: String| Err(QtopError::TableInconsistent(s));
        if self.prefix.len() != n || self.incl.len() != n || self.meets.len() != n {
            return bad("tables disagree on the index bound".into());
        }
        for m in 0..n {
            if self.lengths[m] > self.depth {
                return bad(format!("σ_{m} is longer than the depth"));
            }
            if !self.incl[m][m] || self.prefix[m][m] {
                return bad(format!("⊆ must be reflexive and ≺ irreflexive at {m}"));
            }
            for k in 0..n {
                if self.prefix[m][k] && (self.lengths[m] >= self.lengths[k] || !self.incl[k][m]) {
                    return bad(format!("σ_{m} ≺ σ_{k} disagrees with lengths or images"));
                }
                for &w in &self.meets[m][k] {
                    if w >= n || !self.incl[w][m] || !self.incl[w][k] {
                        return bad(format!("meet witness {w} for ({m},{k}) is not below both"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Tables for an open surjection over the given prefix enumeration.
    pub fn from_surjection(f: &NbhdSurjection, t: &PrefixTable) -> (FTables, Vec<PointSet>) {
        let images: Vec<PointSet> = t.seqs.iter().map(|s| f.image(s)).collect();
        let n = t.len();
        let incl: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| images[a].is_subset(images[b])).collect()).collect();
        let meets = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let both = images[a].intersect(images[b]);
                        (0..n).filter(|&k| images[k].is_subset(both)).collect()
                    })
                    .collect()
            })
            .collect();
        let tables = FTables {
            depth: t.depth,
            lengths: t.seqs.iter().map(Vec::len).collect(),
            prefix: (0..n).map(|a| (0..n).map(|b| t.strict_prefix(a, b)).collect()).collect(),
            incl,
            meets,
        };
        (tables, images)
    }
}

/// `φ(y) = {n | y ∈ f(B_n)}`.
pub fn phi_point(images: &[PointSet], y: usize) -> BTreeSet<usize> {
    (0..images.len()).filter(|&n| images[n].contains(y)).collect()
}

/// Boolean combinations of `U_m = {S | m ∈ S}` and `N_m = {S | m ∉ S}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SetFormula {
    NonEmpty,
    U(usize),
    N(usize),
    Union(Vec<SetFormula>),
    Inter(Vec<SetFormula>),
}

impl SetFormula {
    pub fn eval(&self, s: &BTreeSet<usize>) -> bool {
        match self {
            SetFormula::NonEmpty => !s.is_empty(),
            SetFormula::U(m) => s.contains(m),
            SetFormula::N(m) => !s.contains(m),
            SetFormula::Union(v) => v.iter().any(|f| f.eval(s)),
            SetFormula::Inter(v) => v.iter().all(|f| f.eval(s)),
        }
    }

    /// An atom responsible for a false value: the first false conjunct of an
    /// intersection, the last disjunct of a union.
    pub fn failing_atom(&self, s: &BTreeSet<usize>) -> Option<&SetFormula> {
        if self.eval(s) {
            return None;
        }
        match self {
            SetFormula::Inter(v) => v.iter().find_map(|f| f.failing_atom(s)),
            SetFormula::Union(v) => v.last().and_then(|f| f.failing_atom(s)).or(Some(self)),
            atom => Some(atom),
        }
    }
}

/// An intersection of clauses, each tagged with the indices it quantifies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseFamily {
    pub keys: Vec<Vec<usize>>,
    pub clauses: Vec<SetFormula>,
    /// Append the failing `U_n` atom to the key in witnesses.
    pub atom_witness: bool,
}

impl ClauseFamily {
    fn first_failure(&self, s: &BTreeSet<usize>) -> Option<Vec<usize>> {
        let i = self.clauses.iter().position(|c| !c.eval(s))?;
        let mut w = self.keys[i].clone();
        if self.atom_witness {
            if let Some(SetFormula::U(n)) = self.clauses[i].failing_atom(s) {
                w.push(*n);
            }
        }
        Some(w)
    }
}

/// The four families as formulas.  Clauses for `σ_m` of full depth are left
/// out of the second family, since the table lists no extensions for them.
pub fn f_formulas(t: &FTables) -> [ClauseFamily; 4] {
    let n = t.len();
    let f1 = ClauseFamily { keys: vec![vec![]], clauses: vec![SetFormula::NonEmpty], atom_witness: false };
    let open = (0..n).filter(|&m| t.lengths[m] < t.depth);
    let f2 = ClauseFamily {
        keys: open.clone().map(|m| vec![m]).collect(),
        clauses: open
            .map(|m| {
                let mut v = vec![SetFormula::N(m)];
                v.extend((0..n).filter(|&k| t.prefix[m][k]).map(SetFormula::U));
                SetFormula::Union(v)
            })
            .collect(),
        atom_witness: false,
    };
    let f3 = ClauseFamily {
        keys: (0..n).map(|m| vec![m]).collect(),
        clauses: (0..n)
            .map(|m| {
                let j = (0..n).filter(|&k| t.incl[m][k]).map(SetFormula::U).collect();
                SetFormula::Union(vec![SetFormula::N(m), SetFormula::Inter(j)])
            })
            .collect(),
        atom_witness: true,
    };
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    let f4 = ClauseFamily {
        keys: pairs.iter().map(|&(a, b)| vec![a, b]).collect(),
        clauses: pairs
            .iter()
            .map(|&(a, b)| {
                let mut v = vec![SetFormula::N(a), SetFormula::N(b)];
                v.extend(t.meets[a][b].iter().map(|&k| SetFormula::U(k)));
                SetFormula::Union(v)
            })
            .collect(),
        atom_witness: false,
    };
    [f1, f2, f3, f4]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FCondition {
    pub name: String,
    pub pass: bool,
    pub witness: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FConditionsReport {
    pub depth: usize,
    pub relational: Vec<FCondition>,
    pub formulas: Vec<FCondition>,
    /// Pass/fail and witnesses coincide condition by condition.
    pub agree: bool,
}

impl FConditionsReport {
    pub fn all_pass(&self) -> bool {
        self.relational.iter().all(|c| c.pass)
    }
}

const F_NAMES: [&str; 4] = ["non-empty", "prefix extension", "inclusion closure", "intersection interpolation"];

fn fcond(name: &str, witness: Option<Vec<usize>>) -> FCondition {
    FCondition { name: name.into(), pass: witness.is_none(), witness }
}

/// Evaluate the four conditions directly and as formulas.  `σ_m` of full
/// depth is exempt from the extension condition.
pub fn f_conditions_check(f: &BTreeSet<usize>, t: &FTables) -> Result<FConditionsReport> {
    t.check_consistent()?;
    let n = t.len();
    if let Some(&m) = f.iter().find(|&&m| m >= n) {
        return Err(QtopError::TableInconsistent(format!("index {m} beyond the tables")));
    }
    let c1 = f.is_empty().then(Vec::new);
    let c2 = f
        .iter()
        .find(|&&m| t.lengths[m] < t.depth && !f.iter().any(|&k| t.prefix[m][k]))
        .map(|&m| vec![m]);
    let c3 = f.iter().find_map(|&m| (0..n).find(|&k| t.incl[m][k] && !f.contains(&k)).map(|k| vec![m, k]));
    let c4 = f
        .iter()
        .flat_map(|&a| f.iter().map(move |&b| (a, b)))
        .find(|&(a, b)| !t.meets[a][b].iter().any(|k| f.contains(k)))
        .map(|(a, b)| vec![a, b]);
    let relational: Vec<FCondition> =
        F_NAMES.iter().zip([c1, c2, c3, c4]).map(|(name, w)| fcond(name, w)).collect();
    let formulas: Vec<FCondition> =
        F_NAMES.iter().zip(f_formulas(t)).map(|(name, fam)| fcond(name, fam.first_failure(f))).collect();
    let agree = relational == formulas;
    Ok(FConditionsReport { depth: t.depth, relational, formulas, agree })
}

/// A random index set: a point filter with a few indices toggled, or a
/// uniformly random subset.
pub fn random_index_set<R: Rng>(rng: &mut R, images: &[PointSet], points: usize) -> BTreeSet<usize> {
    let n = images.len();
    if rng.gen_bool(0.5) {
        let mut f = phi_point(images, rng.gen_range(0..points));
        for _ in 0..rng.gen_range(0..3) {
            let k = rng.gen_range(0..n);
            if !f.remove(&k) {
                f.insert(k);
            }
        }
        f
    } else {
        (0..n).filter(|_| rng.gen_bool(0.3)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrunedTreeSample {
    pub depth: usize,
    /// Sequences of full depth with every prefix index in `F`.
    pub points: Vec<Seq>,
    pub truncated: bool,
}

/// Walk the tree coded by `F`, failing at the first prefix in `F` with no
/// extension in `F`.
pub fn pruned_tree_points(f: &BTreeSet<usize>, t: &PrefixTable, depth: usize, limit: usize) -> Result<PrunedTreeSample> {
    let depth = depth.min(t.depth);
    let in_f = |s: &[u64]| t.index(s).is_some_and(|i| f.contains(&i));
    let mut points = Vec::new();
    let mut truncated = false;
    if !in_f(&[]) {
        return Ok(PrunedTreeSample { depth, points, truncated });
    }
    let mut stack: Vec<Seq> = vec![Vec::new()];
    while let Some(s) = stack.pop() {
        if s.len() == depth {
            if points.len() == limit {
                truncated = true;
                break;
            }
            points.push(s);
            continue;
        }
        let children: Vec<Seq> =
            (0..t.alphabet).map(|a| [s.as_slice(), &[a]].concat()).filter(|c| in_f(c)).collect();
        if children.is_empty() {
            return Err(QtopError::NotPruned(s));
        }
        stack.extend(children.into_iter().rev());
    }
    Ok(PrunedTreeSample { depth, points, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(v: &[u64]) -> BTreeSet<u64> {
        v.iter().copied().collect()
    }

    #[test]
    fn delta_examples() {
        assert!(delta_prefix(&[]).is_empty());
        assert_eq!(delta_prefix(&[0, 3, 1]), set(&[0, 2]));
        assert_eq!(delta_prefix(&[1, 1, 1]), set(&[0]));
    }

    #[test]
    fn cylinders() {
        let c = Cylinder::new(vec![1, 2]);
        assert!(c.contains_prefix(&[1, 2, 0]));
        assert!(!c.contains_prefix(&[1]));
        assert!(Cylinder::new(vec![1, 2, 3]).is_subset(&c));
        assert!(!c.is_subset(&Cylinder::new(vec![2])));
    }

    #[test]
    fn cantor_table() {
        let r = RTable::cantor(10);
        assert_eq!(r.values, vec![0, 1, 0, 2, 1, 0, 3, 2, 1, 0]);
        assert_eq!(r.r(10), Err(QtopError::RTableTooShort(10)));
    }

    #[test]
    fn factorization_fixtures() {
        let r = RTable::cantor(2000);
        for name in FIXTURE_NAMES {
            let f = fixture(name, 4, 5).unwrap();
            let rep = admissible_translate(&f, &r).unwrap();
            assert_eq!(rep.prefixes_tested, 1365);
            assert!(rep.holds(), "{name}: {:?}", rep.mismatches.first());
        }
        let empty = admissible_translate(&fixture("empty", 4, 3).unwrap(), &r).unwrap();
        assert!(empty.samples.iter().all(|(_, g)| g.iter().all(|&v| v == 0)));
    }

    #[test]
    fn short_r_table_and_non_monotone() {
        let f = fixture("doubled", 4, 5).unwrap();
        assert!(matches!(admissible_translate(&f, &RTable::cantor(20)), Err(QtopError::RTableTooShort(_))));
        let bad = PrefixFun::from_fn(2, 2, |s| if s.len() == 1 { set(&[0]) } else { BTreeSet::new() });
        assert!(matches!(admissible_translate(&bad, &RTable::cantor(100)), Err(QtopError::PreconditionFailed(_))));
    }

    fn instance(space: FiniteSpace, depth: usize) -> (NbhdSurjection, PrefixTable, FTables, Vec<PointSet>) {
        let f = NbhdSurjection::new(space).unwrap();
        let t = PrefixTable::new(f.space.len() as u64, depth);
        let (tables, images) = FTables::from_surjection(&f, &t);
        (f, t, tables, images)
    }

    #[test]
    fn surjection_is_open_onto() {
        let (f, t, _, images) = instance(FiniteSpace::powerset(2), 3);
        assert_eq!(images[0], f.space.whole());
        assert!(images.iter().all(|&u| f.space.is_open(u)));
        for (s, &u) in t.seqs.iter().zip(&images) {
            assert!(u.contains(f.point(s)));
            let reached: PointSet = (0..4).map(|a| f.point(&[s.as_slice(), &[a; 4]].concat())).collect();
            assert!(reached.is_subset(u));
        }
    }

    #[test]
    fn forward_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let s = crate::space::random_t0_space(&mut rng, 3, 0.4);
            let (_, _, tables, images) = instance(s, 3);
            for y in 0..3 {
                let r = f_conditions_check(&phi_point(&images, y), &tables).unwrap();
                assert!(r.all_pass() && r.agree, "{r:?}");
            }
        }
    }

    #[test]
    fn empty_and_missing_successor() {
        let (_, _, tables, images) = instance(FiniteSpace::sierpinski(), 3);
        let r = f_conditions_check(&BTreeSet::new(), &tables).unwrap();
        assert!(!r.relational[0].pass && !r.formulas[0].pass && r.agree);
        let mut f = phi_point(&images, 1);
        // drop the index of the whole space; every member's image is inside it
        f.remove(&0);
        let r = f_conditions_check(&f, &tables).unwrap();
        let m = *f.iter().next().unwrap();
        assert_eq!(r.relational[2].witness, Some(vec![m, 0]));
        assert_eq!(r.formulas[2].witness, Some(vec![m, 0]));
        assert!(r.agree);
    }

    #[test]
    fn random_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (_, _, tables, images) = instance(FiniteSpace::powerset(2), 2);
        for _ in 0..100 {
            let f = random_index_set(&mut rng, &images, 4);
            assert!(f_conditions_check(&f, &tables).unwrap().agree);
        }
    }

    #[test]
    fn pruned_trees() {
        let (_, t, _, images) = instance(FiniteSpace::sierpinski(), 4);
        let all: BTreeSet<usize> = (0..t.len()).collect();
        assert_eq!(pruned_tree_points(&all, &t, 4, 100).unwrap().points.len(), 16);
        let zeros: BTreeSet<usize> = (0..=4).map(|k| t.index(&vec![0; k]).unwrap()).collect();
        assert_eq!(pruned_tree_points(&zeros, &t, 4, 100).unwrap().points, vec![vec![0; 4]]);
        let phi = phi_point(&images, 0);
        assert!(!pruned_tree_points(&phi, &t, 4, 100).unwrap().points.is_empty());
        let stuck: BTreeSet<usize> = [0, t.index(&[1]).unwrap()].into();
        assert_eq!(pruned_tree_points(&stuck, &t, 4, 100), Err(QtopError::NotPruned(vec![1])));
    }

    #[test]
    fn table_consistency() {
        let (_, _, mut tables, _) = instance(FiniteSpace::sierpinski(), 2);
        tables.incl[1][1] = false;
        assert!(matches!(f_conditions_check(&BTreeSet::new(), &tables), Err(QtopError::TableInconsistent(_))));
    }
}
