//! The acceptance suite: eleven finite-scale checks, each returning a
//! status with a witness.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::borel::{diagonal_expr, diff_hier_eval, equalizer_expr, eval_set, hk_decompose};
use crate::catalog::OMEGA;
use crate::domains::{
    family_member, fxomega_order, phi_map, random_presentation, way_below_matrix, FinPoset, FxOmegaElem,
};
use crate::games::{
    play, qm_strategy, ChainArena, ChainMetric, ChainWalker, PlayerOne, PointSticker, RandomLegal, VerdictStatus,
};
use crate::pointset::PointSet;
use crate::quasimetric::{
    ball_topology, binary_strings, cauchy_check, default_schedule, limit_check, omega_d1, omega_d2, omega_qm,
    pi2_subspace_qm, pmetric_violations, powerset_qm, product_table, qm_axioms_check, random_carrier,
    random_ladder_pmetric, sigma2_tree_qm, specialization_qm, tree_le, two_bottom_obstruction, QMetric,
};
use crate::representations::{
    admissible_translate, f_conditions_check, fixture, phi_point, random_index_set, FTables, NbhdSurjection,
    PrefixTable, RTable, FIXTURE_NAMES,
};
use crate::space::{enumerate_t0_spaces, random_t0_space, FiniteSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    UndecidedAtDepth,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: usize,
    pub name: String,
    pub status: Status,
    /// What was checked on a pass; the counterexample otherwise.
    pub witness: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Overrides every game horizon.
    pub horizon: Option<usize>,
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        SuiteConfig { seed: 2012, horizon: None, timing: false }
    }
}

pub const CHECK_NAMES: [&str; 11] = [
    "qm-axioms",
    "pi2-remetrization",
    "sigma2-tree",
    "incompleteness",
    "game-characterization",
    "difference-hierarchy",
    "diagonal-equalizer",
    "domain-layer",
    "f-conditions",
    "factorization",
    "pmetric-obstruction",
];

type Outcome = (Status, String, Option<usize>);

fn pass(w: impl Into<String>) -> Outcome {
    (Status::Pass, w.into(), None)
}

fn fail(w: impl Into<String>) -> Outcome {
    (Status::Fail, w.into(), None)
}

/// Run one check by number (1..=11).
pub fn run_check(id: usize, cfg: &SuiteConfig) -> CheckResult {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(1000).wrapping_add(id as u64));
    let (status, witness, horizon) = match id {
        1 => qm_axioms(),
        2 => pi2_remetrization(&mut rng),
        3 => sigma2_tree(&mut rng),
        4 => incompleteness(),
        5 => game_characterization(&mut rng, cfg.horizon),
        6 => difference_hierarchy(&mut rng),
        7 => diagonal_equalizer(&mut rng),
        8 => domain_layer(&mut rng),
        9 => f_conditions(&mut rng),
        10 => factorization(),
        11 => pmetric_obstruction(&mut rng),
        _ => fail(format!("no check numbered {id}")),
    };
    let elapsed = start.elapsed().as_millis() as u64;
    CheckResult {
        id,
        name: CHECK_NAMES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown").to_string(),
        status,
        witness,
        horizon,
        millis: cfg.timing.then_some(elapsed),
    }
}

/// All checks, run in parallel and reported in order.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let mut out: Vec<CheckResult> = (1..=CHECK_NAMES.len()).into_par_iter().map(|id| run_check(id, cfg)).collect();
    out.sort_by_key(|r| r.id);
    out
}

/// 0 all pass, 1 some failure, 2 undecided but no failure.
pub fn exit_code(results: &[CheckResult]) -> i32 {
    if results.iter().any(|r| r.status == Status::Fail) {
        1
    } else if results.iter().any(|r| r.status == Status::UndecidedAtDepth) {
        2
    } else {
        0
    }
}

fn axioms_or(name: &str, d: &QMetric) -> Option<String> {
    let r = qm_axioms_check(d);
    (!r.passed()).then(|| format!("{name}: {}", r.violations[0]))
}

fn random_open<R: Rng>(rng: &mut R, opens: &[PointSet]) -> PointSet {
    opens[rng.gen_range(0..opens.len())]
}

fn qm_axioms() -> Outcome {
    let start = Instant::now();
    let p4 = powerset_qm(4);
    let d1 = omega_qm(12, omega_d1);
    let d2 = omega_qm(12, omega_d2);
    let p2 = powerset_qm(2);
    let sub = match pi2_subspace_qm(&p2, &[(PointSet::from_points([1, 3]), PointSet::from_points([0]))]) {
        Ok(s) => s.metric,
        Err(e) => return fail(format!("d′: {e}")),
    };
    let tree = match sigma2_tree_qm(&p2, &[(PointSet::from_points([1, 3]), PointSet::from_points([3])), (p2_whole(), PointSet::EMPTY)]) {
        Ok(t) => t.rho,
        Err(e) => return fail(format!("ρ: {e}")),
    };
    let d1_small = omega_qm(4, omega_d1);
    let prod = product_table(&[&p2, &d1_small]);
    let named = [("P(4)", &p4), ("d1", &d1), ("d2", &d2), ("d′", &sub), ("ρ", &tree), ("product", &prod)];
    for (name, d) in named {
        if let Some(w) = axioms_or(name, d) {
            return fail(w);
        }
    }
    let triples = qm_axioms_check(&p4).triples;
    let ms = start.elapsed().as_millis();
    if ms >= 5000 {
        return fail(format!("axiom checks took {ms} ms"));
    }
    pass(format!("P(4) {} points {triples} triples, d1/d2 on 12 points, d′, ρ, product: no violations", p4.len()))
}

fn p2_whole() -> PointSet {
    PointSet::full(4)
}

fn pi2_remetrization<R: Rng>(rng: &mut R) -> Outcome {
    let mut instances = 0;
    while instances < 20 {
        let d = random_carrier(rng, 3, 4);
        let top = ball_topology(&d);
        let opens = top.opens();
        let k = rng.gen_range(1..=3);
        let pairs: Vec<(PointSet, PointSet)> = (0..k)
            .map(|_| {
                let u = random_open(rng, opens);
                let supersets: Vec<PointSet> = opens.iter().copied().filter(|w| u.is_subset(*w)).collect();
                (u, top.whole().minus(random_open(rng, &supersets)))
            })
            .collect();
        let sub = match pi2_subspace_qm(&d, &pairs) {
            Ok(s) => s,
            Err(e) => return fail(format!("carrier {:?} pairs {pairs:?}: {e}", d.labels)),
        };
        if sub.points.is_empty() {
            continue;
        }
        instances += 1;
        let y: PointSet = sub.points.iter().copied().collect();
        if !ball_topology(&sub.metric).same_topology(&top.subspace(y)) {
            return fail(format!("carrier {:?} pairs {pairs:?}: d′ balls differ from the subspace topology", d.labels));
        }
        if let Some(w) = axioms_or("d′", &sub.metric) {
            return fail(w);
        }
    }
    pass(format!("{instances} random carriers with 1-3 pairs: d′ balls give the subspace topology"))
}

fn sigma2_tree<R: Rng>(rng: &mut R) -> Outcome {
    let strings = binary_strings(4);
    if strings.len() != 31 {
        return fail(format!("2^≤4 has {} nodes", strings.len()));
    }
    for a in &strings {
        for b in &strings {
            if !tree_le(a, b) && !tree_le(b, a) {
                return fail(format!("⊑ not total at {a:?}, {b:?}"));
            }
            if a != b && tree_le(a, b) && tree_le(b, a) {
                return fail(format!("⊑ not antisymmetric at {a:?}, {b:?}"));
            }
            for c in &strings {
                if tree_le(a, b) && tree_le(b, c) && !tree_le(a, c) {
                    return fail(format!("⊑ not transitive at {a:?}, {b:?}, {c:?}"));
                }
            }
        }
    }
    let mut instances = 0;
    while instances < 20 {
        let d = random_carrier(rng, 3, 4);
        let opens = ball_topology(&d).opens().to_vec();
        let k = rng.gen_range(1..=3);
        let pairs: Vec<(PointSet, PointSet)> = (0..k)
            .map(|_| {
                let u = random_open(rng, &opens);
                let inner: Vec<PointSet> = opens.iter().copied().filter(|v| v.is_subset(u)).collect();
                (u, random_open(rng, &inner))
            })
            .collect();
        let t = match sigma2_tree_qm(&d, &pairs) {
            Ok(t) => t,
            Err(e) => return fail(format!("pairs {pairs:?}: {e}")),
        };
        let y = pairs.iter().fold(PointSet::EMPTY, |acc, (u, v)| acc.union(u.minus(*v)));
        if y.is_empty() {
            continue;
        }
        instances += 1;
        let blocks: Vec<PointSet> = t.blocks.values().copied().collect();
        let union = blocks.iter().fold(PointSet::EMPTY, |a, &b| a.union(b));
        let total: usize = blocks.iter().map(|b| b.len()).sum();
        if union != y || total != y.len() {
            return fail(format!("pairs {pairs:?}: blocks {:?} do not partition {y:?}", t.blocks));
        }
        if let Some(w) = axioms_or("ρ", &t.rho) {
            return fail(w);
        }
    }
    pass(format!("⊑ total order on 31 nodes; {instances} random partitions with ρ passing the axioms"))
}

fn incompleteness() -> Outcome {
    let seq: Vec<usize> = (0..=20).collect();
    let sched = default_schedule();
    let v = cauchy_check(&seq, |&a, &b| omega_d2(a, b), &sched);
    if !v.confirmed() {
        return fail(format!("0..20 not Cauchy under d2: {:?}", v.status));
    }
    let dhat2 = |a: &usize, b: &usize| omega_d2(*a, *b).max(omega_d2(*b, *a));
    if let Some(c) = (0..=40).chain([OMEGA]).find(|c| limit_check(&seq, c, dhat2, &sched).confirmed()) {
        return fail(format!("d2 limit found at {c}"));
    }
    let dhat1 = |a: &usize, b: &usize| omega_d1(*a, *b).max(omega_d1(*b, *a));
    if !cauchy_check(&seq, |&a, &b| omega_d1(a, b), &sched).confirmed() {
        return fail("0..20 not Cauchy under d1");
    }
    let l = limit_check(&seq, &OMEGA, dhat1, &sched);
    if !l.confirmed() {
        return fail(format!("d1 limit ω not confirmed: {:?}", l.status));
    }
    pass("0..20 Cauchy under d2 with no limit among 0..40, ω; converges to ω under d1")
}

fn game_characterization<R: Rng>(rng: &mut R, horizon: Option<usize>) -> Outcome {
    let mut spaces: Vec<FiniteSpace> = (1..=5).flat_map(enumerate_t0_spaces).collect();
    let catalog = spaces.len();
    for _ in 0..100 {
        let n = rng.gen_range(2..=6);
        let density = rng.gen_range(0.2..0.6);
        spaces.push(random_t0_space(rng, n, density));
    }
    let mut games = 0;
    let mut undecided: Option<String> = None;
    for (i, s) in spaces.iter().enumerate() {
        let n = s.len();
        let h = horizon.unwrap_or(2 * n);
        let p2 = qm_strategy(specialization_qm(s));
        let seed = rng.gen();
        let mut ones: Vec<Box<dyn PlayerOne<FiniteSpace>>> = vec![
            Box::new(PointSticker { point: None }),
            Box::new(ChainWalker),
            Box::new(RandomLegal::settling(seed, h.saturating_sub(2))),
        ];
        for p1 in ones.iter_mut() {
            let (t, v) = play(s, p1.as_mut(), &p2, h);
            games += 1;
            match v.status {
                VerdictStatus::WonByRefinement { .. } => {}
                VerdictStatus::Undecided => {
                    undecided.get_or_insert_with(|| {
                        format!("space #{i} basis {:?} vs {}: undecided, points {:?}", s.basis(), p1.name(), t.points())
                    });
                }
                VerdictStatus::MalformedRun { round, reason } => {
                    return fail(format!("space #{i} vs {}: malformed at round {round}: {reason}", p1.name()));
                }
            }
        }
    }
    for h in horizon.map_or(vec![10, 50, 100], |h| vec![h]) {
        for m in [ChainMetric::D1, ChainMetric::D2] {
            let arena = ChainArena::omega_scott(10);
            let (_, v) = play(&arena, &mut ChainWalker, &qm_strategy(m), h);
            if v.status != VerdictStatus::Undecided {
                return fail(format!("OmegaScott with {m:?} at horizon {h}: {:?}", v.status));
            }
        }
    }
    if let Some(w) = undecided {
        return (Status::UndecidedAtDepth, w, horizon);
    }
    pass(format!(
        "{catalog} catalog spaces + 100 random, {games} games won within 2n rounds; OmegaScott undecided at 10/50/100"
    ))
}

/// Independent oracle: `x` is in the result iff the first set containing it
/// has index of parity opposite to the length.
fn diff_hier_oracle(sets: &[PointSet], n: usize) -> PointSet {
    (0..n)
        .filter(|&x| sets.iter().position(|s| s.contains(x)).is_some_and(|b| b % 2 != sets.len() % 2))
        .collect()
}

fn difference_hierarchy<R: Rng>(rng: &mut R) -> Outcome {
    let mut subsets = 0;
    for n in 1..=4 {
        for s in enumerate_t0_spaces(n) {
            for m in 0u64..1 << n {
                match hk_decompose(&s, PointSet(m), 4) {
                    Some((alpha, seq)) if alpha <= 4 && diff_hier_eval(&seq) == Ok(PointSet(m)) => subsets += 1,
                    other => return fail(format!("space {:?} subset {:?}: {other:?}", s.basis(), PointSet(m))),
                }
            }
        }
    }
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=12);
        let len = rng.gen_range(0..=6);
        let mut acc = PointSet::EMPTY;
        let sets: Vec<PointSet> = (0..len)
            .map(|_| {
                acc = acc.union((0..n).filter(|_| rng.gen_bool(0.3)).collect());
                acc
            })
            .collect();
        let got = diff_hier_eval(&sets);
        if got != Ok(diff_hier_oracle(&sets, n)) {
            return fail(format!("sets {sets:?}: {got:?}"));
        }
    }
    pass(format!("{subsets} subsets of T0 spaces ≤ 4 points decomposed with α ≤ 4; 10^4 oracle comparisons"))
}

fn random_continuous<R: Rng>(rng: &mut R, x: &FiniteSpace, y: &FiniteSpace) -> Vec<usize> {
    for _ in 0..200 {
        let f: Vec<usize> = (0..x.len()).map(|_| rng.gen_range(0..y.len())).collect();
        if x.is_continuous(y, &f).is_ok() {
            return f;
        }
    }
    vec![rng.gen_range(0..y.len()); x.len()]
}

fn diagonal_equalizer<R: Rng>(rng: &mut R) -> Outcome {
    for i in 0..100 {
        let (nx, ny) = (rng.gen_range(1..=5), rng.gen_range(1..=4));
        let x = random_t0_space(rng, nx, 0.4);
        let y = random_t0_space(rng, ny, 0.4);
        let sq = match FiniteSpace::product(&x, &x) {
            Ok(p) => p,
            Err(e) => return fail(e.to_string()),
        };
        let n = x.len();
        let diag: PointSet = (0..n).map(|a| a * n + a).collect();
        let got = diagonal_expr(&x).and_then(|e| eval_set(&e, &sq));
        if got != Ok(diag) {
            return fail(format!("instance {i}: diagonal of {:?} evaluates to {got:?}", x.basis()));
        }
        let f = random_continuous(rng, &x, &y);
        let g = if rng.gen_bool(0.3) { f.clone() } else { random_continuous(rng, &x, &y) };
        let eq: PointSet = (0..n).filter(|&a| f[a] == g[a]).collect();
        let got = equalizer_expr(&f, &g, &x, &y).and_then(|e| eval_set(&e, &x));
        if got != Ok(eq) {
            return fail(format!("instance {i}: equalizer of {f:?}, {g:?} evaluates to {got:?}"));
        }
    }
    pass("100 random spaces and continuous map pairs: diagonal and equalizer exact")
}

fn domain_layer<R: Rng>(rng: &mut R) -> Outcome {
    let mut posets = 0;
    for n in 1..=5 {
        for s in enumerate_t0_spaces(n) {
            let p = match FinPoset::from_space(&s) {
                Ok(p) => p,
                Err(e) => return fail(e.to_string()),
            };
            if way_below_matrix(&p) != p.le {
                return fail(format!("way-below differs from the order on {:?}", p.le));
            }
            posets += 1;
        }
    }
    let mut triples = 0;
    while triples < 10_000 {
        let k = rng.gen_range(0..=3);
        let pres = random_presentation(rng, k, 4);
        let elems: Vec<FxOmegaElem> = (0..16u64)
            .filter(|&f| family_member(f, &pres).witness.is_some())
            .flat_map(|f| (0..=4).map(move |n| FxOmegaElem { f, n }))
            .collect();
        for _ in 0..500 {
            let pick = |r: &mut R| elems[r.gen_range(0..elems.len())];
            let (a, b, c) = (pick(rng), pick(rng), pick(rng));
            let le = |x: &FxOmegaElem, y: &FxOmegaElem| fxomega_order(x, y, &pres);
            let (ab, ba, bc, ac) = match (le(&a, &b), le(&b, &a), le(&b, &c), le(&a, &c)) {
                (Ok(w), Ok(x), Ok(y), Ok(z)) => (w, x, y, z),
                _ => return fail("order evaluation failed"),
            };
            if le(&a, &a) != Ok(true) || (ab && ba && a != b) || (ab && bc && !ac) {
                return fail(format!("{pres:?}: order fails on {a}, {b}, {c}"));
            }
            triples += 1;
        }
    }
    let mut presentations = 0;
    let mut pairs = 0;
    while presentations < 10 {
        let k = rng.gen_range(1..=3);
        let pres = random_presentation(rng, k, 4);
        let Some(x) = family_member(rng.gen_range(0..16), &pres).witness else { continue };
        match phi_map(x, &pres, 3, 5_000) {
            Ok(r) if r.directed && r.lower_set => pairs += r.witnesses.len(),
            Ok(r) => return fail(format!("{pres:?} x={x:b}: directed {} lower {}", r.directed, r.lower_set)),
            Err(e) => return fail(format!("{pres:?} x={x:b}: {e}")),
        }
        presentations += 1;
    }
    pass(format!(
        "{posets} posets ≤ 5 elements; {triples} order triples; {pairs} directedness witnesses over 10 presentations"
    ))
}

fn f_conditions<R: Rng>(rng: &mut R) -> Outcome {
    let mut forward = 0;
    let mut agreements = 0;
    for i in 0..20 {
        let n = rng.gen_range(1..=3);
        let s = random_t0_space(rng, n, 0.4);
        let f = match NbhdSurjection::new(s) {
            Ok(f) => f,
            Err(e) => return fail(e.to_string()),
        };
        let t = PrefixTable::new(n as u64, 3);
        let (tables, images) = FTables::from_surjection(&f, &t);
        for y in 0..n {
            match f_conditions_check(&phi_point(&images, y), &tables) {
                Ok(r) if r.all_pass() && r.agree => forward += 1,
                Ok(r) => return fail(format!("instance {i} point {y}: {:?}", r.relational)),
                Err(e) => return fail(e.to_string()),
            }
        }
        for _ in 0..5 {
            let fam: BTreeSet<usize> = random_index_set(rng, &images, n);
            match f_conditions_check(&fam, &tables) {
                Ok(r) if r.agree => agreements += 1,
                Ok(r) => return fail(format!("instance {i} F={fam:?}: {:?} vs {:?}", r.relational, r.formulas)),
                Err(e) => return fail(e.to_string()),
            }
        }
    }
    pass(format!("{agreements} random index sets agree; {forward} point filters pass over 20 spaces"))
}

fn factorization() -> Outcome {
    let r = RTable::cantor(4096);
    for name in FIXTURE_NAMES {
        let f = match fixture(name, 4, 5) {
            Ok(f) => f,
            Err(e) => return fail(e.to_string()),
        };
        match admissible_translate(&f, &r) {
            Ok(rep) if rep.holds() => {}
            Ok(rep) => return fail(format!("{name}: {:?}", rep.mismatches.first())),
            Err(e) => return fail(format!("{name}: {e}")),
        }
    }
    pass(format!("f = δ∘g on all prefixes over {{0..3}} to depth 5 for {}", FIXTURE_NAMES.join(", ")))
}

fn pmetric_obstruction<R: Rng>(rng: &mut R) -> Outcome {
    let mut passing = 0;
    for i in 0..50 {
        let p = random_ladder_pmetric(rng, 8);
        if !pmetric_violations(&p).is_empty() {
            continue;
        }
        let r = match two_bottom_obstruction(&p) {
            Ok(r) => r,
            Err(e) => return fail(e.to_string()),
        };
        if !r.respects_order {
            continue;
        }
        passing += 1;
        if !r.contradiction_pattern {
            return fail(format!("sample {i}: {r:?}"));
        }
    }
    if passing == 0 {
        return fail("no sample passed the axioms");
    }
    pass(format!("{passing} of 50 samples pass the axioms and respect the order; each shows p(0,0) < p(1,1) < .. below both bottoms"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_check_fails() {
        assert_eq!(run_check(99, &SuiteConfig::default()).status, Status::Fail);
    }

    #[test]
    fn oracle_agrees_on_small_example() {
        let sets = [PointSet::from_points([0]), PointSet::from_points([0, 1]), PointSet::from_points([0, 1, 2])];
        assert_eq!(diff_hier_oracle(&sets, 3), diff_hier_eval(&sets).unwrap());
    }

    #[test]
    fn exit_codes() {
        let mk = |status| CheckResult { id: 1, name: "x".into(), status, witness: String::new(), horizon: None, millis: None };
        assert_eq!(exit_code(&[mk(Status::Pass)]), 0);
        assert_eq!(exit_code(&[mk(Status::Pass), mk(Status::UndecidedAtDepth)]), 2);
        assert_eq!(exit_code(&[mk(Status::UndecidedAtDepth), mk(Status::Fail)]), 1);
    }
}
