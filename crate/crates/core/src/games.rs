//! Bounded-horizon simulation of the point-and-open game `G(X)`.
//!
//! Each round Player I plays a point `x_n` and an open `U_n ∋ x_n` inside the
//! previous response, and Player II answers with an open `V_n` with
//! `x_n ∈ V_n ⊆ U_n`.  II wins when the `V_n` form a neighbourhood basis of
//! some point.  At a finite horizon that can only be certified, never refuted.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::borel::diff_hier_eval;
use crate::catalog::OMEGA;
use crate::error::{QtopError, Result};
use crate::pointset::PointSet;
use crate::quasimetric::{omega_d1, omega_d2, omega_label, QMetric};
use crate::rat::Rat;
use crate::space::FiniteSpace;

/// Default resolution floor for radius halving: `2^-32`.
pub const DEFAULT_FLOOR: u32 = 32;

/// A space on which the game can be played.
pub trait Arena {
    type Open: Clone + PartialEq + fmt::Debug + Serialize;

    fn whole(&self) -> Self::Open;
    fn contains(&self, u: &Self::Open, x: usize) -> bool;
    fn subset(&self, a: &Self::Open, b: &Self::Open) -> bool;
    fn is_open(&self, u: &Self::Open) -> bool;
    fn is_empty_open(&self, u: &Self::Open) -> bool;
    /// The single point of `u`, if it has exactly one.
    fn singleton(&self, u: &Self::Open) -> Option<usize>;
    fn leq(&self, x: usize, y: usize) -> bool;
    /// Basic opens containing `x`.  Points with infinitely many are cut at
    /// the arena's basis depth.
    fn basic_nbhds(&self, x: usize) -> Vec<Self::Open>;
    /// Up to `limit` points of `u`, in a fixed order.
    fn points_in(&self, u: &Self::Open, limit: usize) -> Vec<usize>;
    /// Points worth testing as the limit of a run that visited `played`.
    fn candidates(&self, played: &[usize]) -> Vec<usize>;
    fn point_label(&self, x: usize) -> String;
    fn describe(&self, u: &Self::Open) -> String;
}

impl Arena for FiniteSpace {
    type Open = PointSet;

    fn whole(&self) -> PointSet {
        FiniteSpace::whole(self)
    }

    fn contains(&self, u: &PointSet, x: usize) -> bool {
        u.contains(x)
    }

    fn subset(&self, a: &PointSet, b: &PointSet) -> bool {
        a.is_subset(*b)
    }

    fn is_open(&self, u: &PointSet) -> bool {
        FiniteSpace::is_open(self, *u)
    }

    fn is_empty_open(&self, u: &PointSet) -> bool {
        u.is_empty()
    }

    fn singleton(&self, u: &PointSet) -> Option<usize> {
        (u.len() == 1).then(|| u.first().unwrap())
    }

    fn leq(&self, x: usize, y: usize) -> bool {
        FiniteSpace::leq(self, x, y)
    }

    fn basic_nbhds(&self, x: usize) -> Vec<PointSet> {
        self.basis().iter().copied().filter(|b| b.contains(x)).collect()
    }

    fn points_in(&self, u: &PointSet, limit: usize) -> Vec<usize> {
        u.iter().take(limit).collect()
    }

    fn candidates(&self, _played: &[usize]) -> Vec<usize> {
        (0..self.len()).collect()
    }

    fn point_label(&self, x: usize) -> String {
        self.labels()[x].clone()
    }

    fn describe(&self, u: &PointSet) -> String {
        let l: Vec<&str> = u.iter().map(|x| self.labels()[x].as_str()).collect();
        format!("{{{}}}", l.join(","))
    }
}

/// Opens of a Scott-style chain on `ω` or `ω+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainOpen {
    Empty,
    /// `↑k`, including `ω` when present.
    Up(usize),
    /// `{ω}`.
    Top,
}

/// `ω` or `ω+1` ordered as a chain, with opens `↑k`, optionally `{ω}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainArena {
    pub with_top: bool,
    pub top_isolated: bool,
    /// Basic neighbourhoods of `ω` are cut at this index.
    pub depth: usize,
}

impl ChainArena {
    /// `ω+1` with the Scott topology.
    pub fn omega_plus_one_scott(depth: usize) -> ChainArena {
        ChainArena { with_top: true, top_isolated: false, depth }
    }

    /// `ω+1` with `{ω}` also open.
    pub fn omega_plus_one_alexandroff(depth: usize) -> ChainArena {
        ChainArena { with_top: true, top_isolated: true, depth }
    }

    /// `ω` with the Scott topology.
    pub fn omega_scott(depth: usize) -> ChainArena {
        ChainArena { with_top: false, top_isolated: false, depth }
    }
}

fn chain_le(x: usize, y: usize) -> bool {
    x <= y
}

impl Arena for ChainArena {
    type Open = ChainOpen;

    fn whole(&self) -> ChainOpen {
        ChainOpen::Up(0)
    }

    fn contains(&self, u: &ChainOpen, x: usize) -> bool {
        if x == OMEGA && !self.with_top {
            return false;
        }
        match *u {
            ChainOpen::Empty => false,
            ChainOpen::Up(k) => x >= k,
            ChainOpen::Top => x == OMEGA,
        }
    }

    fn subset(&self, a: &ChainOpen, b: &ChainOpen) -> bool {
        match (*a, *b) {
            (ChainOpen::Empty, _) => true,
            (_, ChainOpen::Empty) => false,
            (ChainOpen::Up(i), ChainOpen::Up(j)) => i >= j,
            (ChainOpen::Top, ChainOpen::Up(_)) => true,
            (ChainOpen::Top, ChainOpen::Top) => true,
            (ChainOpen::Up(_), ChainOpen::Top) => false,
        }
    }

    fn is_open(&self, u: &ChainOpen) -> bool {
        match u {
            ChainOpen::Top => self.with_top && self.top_isolated,
            _ => true,
        }
    }

    fn is_empty_open(&self, u: &ChainOpen) -> bool {
        matches!(u, ChainOpen::Empty) || (matches!(u, ChainOpen::Top) && !self.with_top)
    }

    fn singleton(&self, u: &ChainOpen) -> Option<usize> {
        (matches!(u, ChainOpen::Top) && self.with_top).then_some(OMEGA)
    }

    fn leq(&self, x: usize, y: usize) -> bool {
        chain_le(x, y)
    }

    fn basic_nbhds(&self, x: usize) -> Vec<ChainOpen> {
        if x == OMEGA {
            let mut v: Vec<ChainOpen> = (0..self.depth).map(ChainOpen::Up).collect();
            if self.top_isolated {
                v.push(ChainOpen::Top);
            }
            v
        } else {
            (0..=x).map(ChainOpen::Up).collect()
        }
    }

    fn points_in(&self, u: &ChainOpen, limit: usize) -> Vec<usize> {
        match *u {
            ChainOpen::Empty => vec![],
            ChainOpen::Top => {
                if self.with_top {
                    vec![OMEGA]
                } else {
                    vec![]
                }
            }
            ChainOpen::Up(k) => {
                let mut v: Vec<usize> = (k..k + limit).collect();
                if self.with_top {
                    v.push(OMEGA);
                }
                v
            }
        }
    }

    fn candidates(&self, played: &[usize]) -> Vec<usize> {
        let top = played.iter().filter(|&&p| p != OMEGA).max().map_or(0, |m| m + 1);
        let mut v: Vec<usize> = (0..=top.max(self.depth)).collect();
        if self.with_top {
            v.push(OMEGA);
        }
        v
    }

    fn point_label(&self, x: usize) -> String {
        omega_label(x)
    }

    fn describe(&self, u: &ChainOpen) -> String {
        match u {
            ChainOpen::Empty => "{}".into(),
            ChainOpen::Up(k) => format!("up({k})"),
            ChainOpen::Top => "{omega}".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Round<O> {
    pub x: usize,
    pub u: O,
    pub v: O,
    /// Radius used by a metric strategy.
    pub radius: Option<Rat>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript<O> {
    pub rounds: Vec<Round<O>>,
}

impl<O> Default for Transcript<O> {
    fn default() -> Self {
        Transcript { rounds: Vec::new() }
    }
}

impl<O: Clone> Transcript<O> {
    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn points(&self) -> Vec<usize> {
        self.rounds.iter().map(|r| r.x).collect()
    }

    fn with(&self, r: Round<O>) -> Transcript<O> {
        let mut t = self.clone();
        t.rounds.push(r);
        t
    }
}

pub struct Response<O> {
    pub v: O,
    pub radius: Option<Rat>,
}

impl<O> Response<O> {
    pub fn plain(v: O) -> Response<O> {
        Response { v, radius: None }
    }
}

pub trait PlayerOne<A: Arena> {
    fn name(&self) -> String;
    /// The next point and open; `allowed` is `V_{n-1}`, or the whole space.
    fn play(&mut self, arena: &A, t: &Transcript<A::Open>, allowed: &A::Open) -> (usize, A::Open);
}

/// Player II strategies are functions of the transcript so far.
pub trait PlayerTwo<A: Arena> {
    fn name(&self) -> String;
    fn respond(&self, arena: &A, t: &Transcript<A::Open>, x: usize, u: &A::Open) -> Result<Response<A::Open>>;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictStatus {
    WonByRefinement { point: usize, round: usize },
    Undecided,
    MalformedRun { round: usize, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub horizon: usize,
    /// A candidate point in every `U_n`, if any.
    pub choquet_point: Option<usize>,
    /// Certifying with the `U_n` instead of the `V_n` gives the same answer.
    pub u_certificate_agrees: bool,
}

impl Verdict {
    pub fn won(&self) -> bool {
        matches!(self.status, VerdictStatus::WonByRefinement { .. })
    }
}

/// A candidate `x` is certified at round `k` when it lies in every set,
/// every basic neighbourhood of `x` contains one of the first `k+1` sets,
/// and either a later round confirms it or the `k`-th set is `{x}`.
pub fn certify<A: Arena>(arena: &A, sets: &[A::Open], played: &[usize]) -> Option<(usize, usize)> {
    let h = sets.len();
    if h == 0 {
        return None;
    }
    let mut best: Option<(usize, usize)> = None;
    for x in arena.candidates(played) {
        if !sets.iter().all(|s| arena.contains(s, x)) {
            continue;
        }
        let mut k = 0;
        let mut ok = true;
        for b in arena.basic_nbhds(x) {
            match sets.iter().position(|s| arena.subset(s, &b)) {
                Some(i) => k = k.max(i),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && (k + 2 <= h || arena.singleton(&sets[k]) == Some(x)) && best.is_none_or(|(_, bk)| k < bk) {
            best = Some((x, k));
        }
    }
    best
}

pub fn verdict<A: Arena>(arena: &A, t: &Transcript<A::Open>) -> Verdict {
    let played = t.points();
    let vs: Vec<A::Open> = t.rounds.iter().map(|r| r.v.clone()).collect();
    let us: Vec<A::Open> = t.rounds.iter().map(|r| r.u.clone()).collect();
    let by_v = certify(arena, &vs, &played);
    let by_u = certify(arena, &us, &played);
    let choquet_point = arena.candidates(&played).into_iter().find(|&x| us.iter().all(|u| arena.contains(u, x)));
    Verdict {
        status: match by_v {
            Some((point, round)) => VerdictStatus::WonByRefinement { point, round },
            None => VerdictStatus::Undecided,
        },
        horizon: t.len(),
        choquet_point,
        u_certificate_agrees: by_v.map(|p| p.0) == by_u.map(|p| p.0),
    }
}

/// Play up to `rounds` rounds, enforcing legality every move.
pub fn play<A: Arena>(
    arena: &A,
    p1: &mut dyn PlayerOne<A>,
    p2: &dyn PlayerTwo<A>,
    rounds: usize,
) -> (Transcript<A::Open>, Verdict) {
    let mut t = Transcript::default();
    for n in 0..rounds {
        let allowed = t.rounds.last().map_or_else(|| arena.whole(), |r: &Round<A::Open>| r.v.clone());
        let (x, u) = p1.play(arena, &t, &allowed);
        let bad_one = if !arena.is_open(&u) {
            Some("Player I played a set that is not open")
        } else if !arena.contains(&u, x) {
            Some("Player I's point is not in its open")
        } else if !arena.subset(&u, &allowed) {
            Some("Player I's open is not inside the previous response")
        } else {
            None
        };
        if let Some(reason) = bad_one {
            return malformed(t, n, reason.to_string());
        }
        let resp = match p2.respond(arena, &t, x, &u) {
            Ok(r) => r,
            Err(e) => return malformed(t, n, e.to_string()),
        };
        let bad_two = if !arena.is_open(&resp.v) {
            Some("Player II played a set that is not open")
        } else if !arena.contains(&resp.v, x) {
            Some("Player II's open misses the point")
        } else if !arena.subset(&resp.v, &u) {
            Some("Player II's open is not inside U")
        } else {
            None
        };
        if let Some(reason) = bad_two {
            return malformed(t, n, reason.to_string());
        }
        t.rounds.push(Round { x, u, v: resp.v, radius: resp.radius });
    }
    let v = verdict(arena, &t);
    (t, v)
}

fn malformed<O: Clone>(t: Transcript<O>, round: usize, reason: String) -> (Transcript<O>, Verdict) {
    let horizon = t.len();
    (
        t,
        Verdict {
            status: VerdictStatus::MalformedRun { round, reason },
            horizon,
            choquet_point: None,
            u_certificate_agrees: true,
        },
    )
}

/// Check `U_0 ⊇ V_0 ⊇ U_1 ⊇ ..` and `x_n ∈ V_n`.
pub fn nesting_holds<A: Arena>(arena: &A, t: &Transcript<A::Open>) -> bool {
    let mut prev = arena.whole();
    for r in &t.rounds {
        if !(arena.subset(&r.u, &prev) && arena.subset(&r.v, &r.u) && arena.contains(&r.v, r.x)) {
            return false;
        }
        prev = r.v.clone();
    }
    true
}

// ---------------------------------------------------------------- Player I

/// Keeps playing one point, with `U_n = V_{n-1}`.
pub struct PointSticker {
    pub point: Option<usize>,
}

impl<A: Arena> PlayerOne<A> for PointSticker {
    fn name(&self) -> String {
        "sticker".into()
    }

    fn play(&mut self, arena: &A, _t: &Transcript<A::Open>, allowed: &A::Open) -> (usize, A::Open) {
        let x = match self.point {
            Some(p) if arena.contains(allowed, p) => p,
            _ => arena.points_in(allowed, 1)[0],
        };
        self.point = Some(x);
        (x, allowed.clone())
    }
}

/// Moves strictly up the specialization order whenever it can.
pub struct ChainWalker;

impl<A: Arena> PlayerOne<A> for ChainWalker {
    fn name(&self) -> String {
        "walker".into()
    }

    fn play(&mut self, arena: &A, t: &Transcript<A::Open>, allowed: &A::Open) -> (usize, A::Open) {
        let pts = arena.points_in(allowed, 4);
        let x = match t.rounds.last() {
            None => pts[0],
            Some(r) => pts
                .iter()
                .copied()
                .find(|&y| y != r.x && arena.leq(r.x, y))
                .unwrap_or(r.x),
        };
        (x, allowed.clone())
    }
}

/// Random legal moves: keeps its point with probability `stick`, otherwise
/// picks a fresh one, and plays a random basic neighbourhood inside the
/// previous response about a third of the time.  With `settle_after` set it
/// stops changing points from that round on.
pub struct RandomLegal {
    pub rng: ChaCha8Rng,
    pub stick: f64,
    pub settle_after: Option<usize>,
}

impl RandomLegal {
    pub fn new(seed: u64) -> RandomLegal {
        RandomLegal { rng: ChaCha8Rng::seed_from_u64(seed), stick: 0.5, settle_after: None }
    }

    pub fn settling(seed: u64, after: usize) -> RandomLegal {
        RandomLegal { settle_after: Some(after), ..RandomLegal::new(seed) }
    }
}

impl<A: Arena> PlayerOne<A> for RandomLegal {
    fn name(&self) -> String {
        "random".into()
    }

    fn play(&mut self, arena: &A, t: &Transcript<A::Open>, allowed: &A::Open) -> (usize, A::Open) {
        let prev = t.rounds.last().map(|r| r.x).filter(|&p| arena.contains(allowed, p));
        let settled = self.settle_after.is_some_and(|k| t.len() >= k);
        let x = match prev {
            Some(p) if settled || self.rng.gen_bool(self.stick) => p,
            _ => *arena.points_in(allowed, 8).choose(&mut self.rng).expect("opens played are non-empty"),
        };
        let inner: Vec<A::Open> =
            arena.basic_nbhds(x).into_iter().filter(|b| arena.subset(b, allowed)).collect();
        let u = if !inner.is_empty() && self.rng.gen_ratio(1, 3) {
            inner.choose(&mut self.rng).unwrap().clone()
        } else {
            allowed.clone()
        };
        (x, u)
    }
}

// --------------------------------------------------------------- Player II

/// Ball computations a metric strategy needs on an arena.
pub trait BallOracle<A: Arena> {
    fn ball(&self, arena: &A, x: usize, eps: &Rat) -> Result<A::Open>;
    fn closed_ball_within(&self, arena: &A, x: usize, eps: &Rat, u: &A::Open) -> bool;
}

impl BallOracle<FiniteSpace> for QMetric {
    fn ball(&self, arena: &FiniteSpace, x: usize, eps: &Rat) -> Result<PointSet> {
        let b = QMetric::ball(self, x, eps);
        if arena.is_open(b) {
            Ok(b)
        } else {
            Err(QtopError::NotOpen(b.to_vec()))
        }
    }

    fn closed_ball_within(&self, _arena: &FiniteSpace, x: usize, eps: &Rat, u: &PointSet) -> bool {
        self.closed_ball(x, eps).is_subset(*u)
    }
}

/// The two named quasi-metrics on `ω+1`, with closed-form balls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainMetric {
    /// `0` if `x ≤ y`, else `1/(y+1)`.
    D1,
    /// `0` if `x ≤ y`, else `1`.
    D2,
}

impl ChainMetric {
    pub fn d(&self, x: usize, y: usize) -> Rat {
        match self {
            ChainMetric::D1 => omega_d1(x, y),
            ChainMetric::D2 => omega_d2(x, y),
        }
    }

    /// `{y | d(x,y) < eps}` (strict) or `{y | d(x,y) ≤ eps}`.
    pub fn ball_open(&self, x: usize, eps: &Rat, strict: bool) -> ChainOpen {
        match self {
            ChainMetric::D1 => {
                // 1/(y+1) < eps iff y >= floor(1/eps); <= eps iff y >= ceil(1/eps) - 1
                let inv = eps.recip();
                let t = if strict { inv.floor_usize() } else { inv.ceil_usize().saturating_sub(1) };
                ChainOpen::Up(if x == OMEGA { t } else { t.min(x) })
            }
            ChainMetric::D2 => {
                let big = if strict { *eps > Rat::one() } else { *eps >= Rat::one() };
                match (big, x == OMEGA) {
                    (true, _) => ChainOpen::Up(0),
                    (false, true) => ChainOpen::Top,
                    (false, false) => ChainOpen::Up(x),
                }
            }
        }
    }
}

impl BallOracle<ChainArena> for ChainMetric {
    fn ball(&self, arena: &ChainArena, x: usize, eps: &Rat) -> Result<ChainOpen> {
        let b = self.ball_open(x, eps, true);
        if arena.is_open(&b) {
            Ok(b)
        } else {
            Err(QtopError::NotOpen(vec![x]))
        }
    }

    fn closed_ball_within(&self, arena: &ChainArena, x: usize, eps: &Rat, u: &ChainOpen) -> bool {
        arena.subset(&self.ball_open(x, eps, false), u)
    }
}

/// `V_n = B_d(x_n, ε_n)` with `ε_n ≤ 1/(n+1)` halved until the closed ball
/// fits inside `U_n`.
pub struct QmStrategy<M> {
    pub metric: M,
    pub floor: u32,
}

pub fn qm_strategy<M>(metric: M) -> QmStrategy<M> {
    QmStrategy { metric, floor: DEFAULT_FLOOR }
}

impl<A: Arena, M: BallOracle<A>> PlayerTwo<A> for QmStrategy<M> {
    fn name(&self) -> String {
        "qm".into()
    }

    fn respond(&self, arena: &A, t: &Transcript<A::Open>, x: usize, u: &A::Open) -> Result<Response<A::Open>> {
        let n = t.len();
        let floor = Rat::pow2_neg(self.floor);
        let mut eps = Rat::frac(1, n as i64 + 1);
        while eps >= floor {
            if self.metric.closed_ball_within(arena, x, &eps, u) {
                let v = self.metric.ball(arena, x, &eps)?;
                return Ok(Response { v, radius: Some(eps) });
            }
            eps = eps.half();
        }
        Err(QtopError::NoAdmissibleRadius { round: n, floor: self.floor })
    }
}

/// Smallest basic open with `x ∈ B ⊆ U`, searching the basis from the end.
pub struct BackwardSearch;

impl PlayerTwo<FiniteSpace> for BackwardSearch {
    fn name(&self) -> String {
        "backward".into()
    }

    fn respond(&self, space: &FiniteSpace, _t: &Transcript<PointSet>, x: usize, u: &PointSet) -> Result<Response<PointSet>> {
        space
            .basis()
            .iter()
            .rev()
            .filter(|b| b.contains(x) && b.is_subset(*u))
            .min_by_key(|b| b.len())
            .map(|&b| Response::plain(b))
            .ok_or(QtopError::NotOpen(u.to_vec()))
    }
}

/// Isolate `x_n` in its Cantor–Bendixson layer and refine the first `n+1`
/// basic opens around it; plays the largest such open.
pub struct ScatteredStrategy {
    layers: Vec<PointSet>,
}

pub fn scattered_strategy(space: &FiniteSpace) -> Result<ScatteredStrategy> {
    let kernel = space.perfect_kernel();
    if !kernel.is_empty() {
        return Err(QtopError::NotScattered(kernel.to_vec()));
    }
    Ok(ScatteredStrategy { layers: space.cb_sequence() })
}

impl PlayerTwo<FiniteSpace> for ScatteredStrategy {
    fn name(&self) -> String {
        "scattered".into()
    }

    fn respond(&self, space: &FiniteSpace, t: &Transcript<PointSet>, x: usize, u: &PointSet) -> Result<Response<PointSet>> {
        let alpha = (0..self.layers.len() - 1)
            .find(|&a| self.layers[a].contains(x) && !self.layers[a + 1].contains(x))
            .ok_or(QtopError::BadPoint(x))?;
        let cand = space
            .basis()
            .iter()
            .take(t.len() + 1)
            .filter(|b| b.contains(x))
            .fold(*u, |acc, b| acc.intersect(*b));
        let others = self.layers[alpha].minus(PointSet::singleton(x));
        let v = space.interior(cand.minus(others));
        if !v.contains(x) {
            return Err(QtopError::PreconditionFailed(format!("point {x} is not isolated in its layer")));
        }
        Ok(Response::plain(v))
    }
}

/// Replace each response by the largest basic open between `x` and it.
pub struct BasisRestricted<S>(pub S);

impl<S: PlayerTwo<FiniteSpace>> PlayerTwo<FiniteSpace> for BasisRestricted<S> {
    fn name(&self) -> String {
        format!("basis({})", self.0.name())
    }

    fn respond(&self, space: &FiniteSpace, t: &Transcript<PointSet>, x: usize, u: &PointSet) -> Result<Response<PointSet>> {
        let r = self.0.respond(space, t, x, u)?;
        let b = space
            .basis()
            .iter()
            .filter(|b| b.contains(x) && b.is_subset(r.v))
            .max_by_key(|b| b.len())
            .copied()
            .ok_or(QtopError::NonBasisMove(t.len()))?;
        Ok(Response { v: b, radius: r.radius })
    }
}

/// Strategy on the topology generated by `τ` and an extra open `B`, from a
/// strategy for `τ` and increasing `τ`-opens realizing `X∖B` in the
/// difference hierarchy.
pub struct Delta2Extension<S> {
    pub base: S,
    pub tau: FiniteSpace,
    pub b: PointSet,
    pub decomposition: Vec<PointSet>,
}

/// Build `τ′` and the combined strategy.  Fails with `DecompositionMismatch`
/// when the sets do not evaluate to `X∖B`.
pub fn delta2_extension_strategy<S: PlayerTwo<FiniteSpace>>(
    tau: &FiniteSpace,
    base: S,
    b: PointSet,
    decomposition: Vec<PointSet>,
) -> Result<(FiniteSpace, Delta2Extension<S>)> {
    for &a in &decomposition {
        if !tau.is_open(a) {
            return Err(QtopError::NotOpen(a.to_vec()));
        }
    }
    if diff_hier_eval(&decomposition)? != tau.whole().minus(b) {
        return Err(QtopError::DecompositionMismatch);
    }
    let mut basis = tau.basis().to_vec();
    basis.push(b);
    let extended = FiniteSpace::from_basis(tau.labels().to_vec(), basis)?;
    Ok((extended, Delta2Extension { base, tau: tau.clone(), b, decomposition }))
}

impl<S: PlayerTwo<FiniteSpace>> Delta2Extension<S> {
    /// Least `β` with `x ∈ A_β ∖ A_{β-1}` and parity different from `α`.
    fn beta(&self, x: usize) -> Option<usize> {
        let alpha = self.decomposition.len();
        (0..alpha).find(|&beta| {
            let below = if beta == 0 { PointSet::EMPTY } else { self.decomposition[beta - 1] };
            beta % 2 != alpha % 2 && self.decomposition[beta].minus(below).contains(x)
        })
    }

    fn shrink(&self, x: usize, u: PointSet) -> Result<PointSet> {
        let beta = self.beta(x).ok_or(QtopError::DecompositionMismatch)?;
        let inner = self.tau.interior(u.intersect(self.decomposition[beta]));
        if inner.contains(x) {
            Ok(inner)
        } else {
            Err(QtopError::PreconditionFailed(format!("no τ-open around {x} inside U ∩ A_{beta}")))
        }
    }
}

impl<S: PlayerTwo<FiniteSpace>> PlayerTwo<FiniteSpace> for Delta2Extension<S> {
    fn name(&self) -> String {
        format!("delta2({})", self.base.name())
    }

    fn respond(&self, extended: &FiniteSpace, t: &Transcript<PointSet>, x: usize, u: &PointSet) -> Result<Response<PointSet>> {
        let entered = t.rounds.iter().any(|r| self.b.contains(r.x));
        if entered {
            // inside U_e ∩ B: minimal neighbourhood in the extended topology
            return Ok(Response::plain(extended.nbhd(x).intersect(*u)));
        }
        if self.b.contains(x) {
            return Ok(Response::plain(u.intersect(self.b)));
        }
        let mut shadow = Transcript::default();
        for r in &t.rounds {
            shadow.rounds.push(Round { x: r.x, u: self.shrink(r.x, r.u)?, v: r.v, radius: r.radius.clone() });
        }
        let u2 = self.shrink(x, *u)?;
        self.base.respond(&self.tau, &shadow, x, &u2)
    }
}

// ------------------------------------------------------------- extraction

/// `f : ω^{≤depth} → basis` built from II's responses to every `σ`-run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTree {
    pub depth: usize,
    pub nodes: BTreeMap<Vec<usize>, PointSet>,
}

impl RunTree {
    pub fn children(&self, sigma: &[usize]) -> Vec<(usize, PointSet)> {
        (0..)
            .map(|i| {
                let mut s = sigma.to_vec();
                s.push(i);
                self.nodes.get(&s).map(|&v| (i, v))
            })
            .take_while(Option::is_some)
            .flatten()
            .collect()
    }
}

/// Exhaust Player I's point choices on the `σ`-runs to depth `depth`.
pub fn extract_representation(
    s: &dyn PlayerTwo<FiniteSpace>,
    space: &FiniteSpace,
    depth: usize,
) -> Result<RunTree> {
    let mut nodes = BTreeMap::new();
    nodes.insert(vec![], space.whole());
    let mut layer: Vec<(Vec<usize>, Vec<Transcript<PointSet>>)> = vec![(vec![], vec![Transcript::default()])];
    for n in 0..depth {
        let mut next = Vec::new();
        for (sigma, runs) in layer {
            let w = nodes[&sigma];
            let mut by_response: BTreeMap<PointSet, Vec<Transcript<PointSet>>> = BTreeMap::new();
            for r in &runs {
                for x in w.iter() {
                    let v = s.respond(space, r, x, &w)?.v;
                    if space.basis_index(v).is_none() {
                        return Err(QtopError::NonBasisMove(n));
                    }
                    by_response.entry(v).or_default().push(r.with(Round { x, u: w, v, radius: None }));
                }
            }
            for (i, (v, runs)) in by_response.into_iter().enumerate() {
                let mut child = sigma.clone();
                child.push(i);
                nodes.insert(child.clone(), v);
                next.push((child, runs));
            }
        }
        layer = next;
    }
    Ok(RunTree { depth, nodes })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub nodes: usize,
    /// `f(σ⋄i) ⊆ f(σ)` everywhere.
    pub monotone: bool,
    /// `φ(↑σ) = f(σ)` for every `σ` shorter than the depth.
    pub image_equality: bool,
    /// Every non-empty basic open is some `f(σ)`.
    pub basics_covered: bool,
    pub failures: Vec<String>,
}

/// Check the extracted tree.  For `x ∈ f(σ)` Player I keeps playing `x`
/// after `σ`; the branch must stay in the tree and pin `x` by the depth.
pub fn check_extraction(tree: &RunTree, s: &dyn PlayerTwo<FiniteSpace>, space: &FiniteSpace) -> Result<ExtractionReport> {
    let mut failures = Vec::new();
    let mut monotone = true;
    for (sigma, &v) in &tree.nodes {
        if let Some((_, parent)) = sigma.split_last() {
            if !v.is_subset(tree.nodes[parent]) {
                monotone = false;
                failures.push(format!("f({sigma:?}) is not inside its parent"));
            }
        }
    }
    let mut image_equality = true;
    for (sigma, &w) in &tree.nodes {
        if sigma.len() >= tree.depth {
            continue;
        }
        let run = sigma_run(tree, s, space, sigma)?;
        for x in w.iter() {
            let mut t = run.clone();
            let mut path = sigma.clone();
            let mut cur = w;
            let mut values = Vec::new();
            while path.len() < tree.depth {
                let v = s.respond(space, &t, x, &cur)?.v;
                match tree.children(&path).into_iter().find(|&(_, c)| c == v) {
                    Some((i, _)) => path.push(i),
                    None => {
                        failures.push(format!("response {v:?} to {x} after {path:?} is not a child"));
                        image_equality = false;
                        break;
                    }
                }
                t = t.with(Round { x, u: cur, v, radius: None });
                values.push(v);
                cur = v;
            }
            if path.len() == tree.depth && certify(space, &values, &[x]).map(|p| p.0) != Some(x) {
                let pinned = space.basic_nbhds(x).iter().all(|b| values.iter().any(|v| v.is_subset(*b)));
                if !(pinned && values.iter().all(|v| v.contains(x))) {
                    image_equality = false;
                    failures.push(format!("branch {path:?} does not pin {x}"));
                }
            }
        }
    }
    let covered: Vec<PointSet> = tree.nodes.values().copied().collect();
    let basics_covered = space.basis().iter().all(|b| b.is_empty() || covered.contains(b));
    Ok(ExtractionReport { nodes: tree.nodes.len(), monotone, image_equality, basics_covered, failures })
}

/// One `σ`-run: Player I plays the first point of each `f(σ′)` that leads
/// to the recorded child.
fn sigma_run(
    tree: &RunTree,
    s: &dyn PlayerTwo<FiniteSpace>,
    space: &FiniteSpace,
    sigma: &[usize],
) -> Result<Transcript<PointSet>> {
    fn go(
        tree: &RunTree,
        s: &dyn PlayerTwo<FiniteSpace>,
        space: &FiniteSpace,
        sigma: &[usize],
        k: usize,
        t: Transcript<PointSet>,
    ) -> Result<Option<Transcript<PointSet>>> {
        if k == sigma.len() {
            return Ok(Some(t));
        }
        let w = tree.nodes[&sigma[..k]];
        let target = tree.nodes[&sigma[..=k]];
        for x in w.iter() {
            let v = s.respond(space, &t, x, &w)?.v;
            if v == target {
                if let Some(done) = go(tree, s, space, sigma, k + 1, t.with(Round { x, u: w, v, radius: None }))? {
                    return Ok(Some(done));
                }
            }
        }
        Ok(None)
    }
    go(tree, s, space, sigma, 0, Transcript::default())?
        .ok_or_else(|| QtopError::TableInconsistent(format!("no run reaches {sigma:?}")))
}

// --------------------------------------------------------------- registry

/// Player I by name: `sticker`, `sticker:<point>`, `walker` (or `chain`),
/// `random`.
pub fn player_one_by_name<A: Arena>(name: &str, seed: u64) -> Result<Box<dyn PlayerOne<A>>> {
    match name.split_once(':') {
        Some(("sticker", p)) => {
            let point = p.parse().map_err(|_| QtopError::Parse(format!("bad sticker point {p:?}")))?;
            Ok(Box::new(PointSticker { point: Some(point) }))
        }
        _ => match name {
            "sticker" => Ok(Box::new(PointSticker { point: None })),
            "walker" | "chain" => Ok(Box::new(ChainWalker)),
            "random" => Ok(Box::new(RandomLegal::new(seed))),
            _ => Err(QtopError::Parse(format!("unknown Player I strategy {name:?}"))),
        },
    }
}

pub const PLAYER_ONE_NAMES: &[&str] = &["sticker", "walker", "random"];
pub const PLAYER_TWO_FINITE: &[&str] = &["qm", "qm-count", "backward", "scattered"];

/// Player II on a finite space by name.
pub fn player_two_finite(name: &str, space: &FiniteSpace) -> Result<Box<dyn PlayerTwo<FiniteSpace>>> {
    use crate::quasimetric::{counting_basis_qm, specialization_qm};
    match name {
        "qm" => Ok(Box::new(qm_strategy(specialization_qm(space)))),
        "qm-count" => Ok(Box::new(qm_strategy(counting_basis_qm(space)))),
        "backward" => Ok(Box::new(BackwardSearch)),
        "scattered" => Ok(Box::new(scattered_strategy(space)?)),
        _ => Err(QtopError::Parse(format!("unknown Player II strategy {name:?}"))),
    }
}

pub const PLAYER_TWO_CHAIN: &[&str] = &["qm-d1", "qm-d2"];

/// Player II on a chain arena by name.
pub fn player_two_chain(name: &str) -> Result<Box<dyn PlayerTwo<ChainArena>>> {
    match name {
        "qm-d1" => Ok(Box::new(qm_strategy(ChainMetric::D1))),
        "qm-d2" => Ok(Box::new(qm_strategy(ChainMetric::D2))),
        _ => Err(QtopError::Parse(format!("unknown Player II strategy {name:?} for a chain arena"))),
    }
}

/// A run rendered with labels, for output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelledRound {
    pub x: String,
    pub u: String,
    pub v: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<Rat>,
}

pub fn label_transcript<A: Arena>(arena: &A, t: &Transcript<A::Open>) -> Vec<LabelledRound> {
    t.rounds
        .iter()
        .map(|r| LabelledRound {
            x: arena.point_label(r.x),
            u: arena.describe(&r.u),
            v: arena.describe(&r.v),
            radius: r.radius.clone(),
        })
        .collect()
}

pub fn describe_status<A: Arena>(arena: &A, v: &Verdict) -> String {
    match &v.status {
        VerdictStatus::WonByRefinement { point, round } => {
            format!("won by refinement at {} (round {round}, horizon {})", arena.point_label(*point), v.horizon)
        }
        VerdictStatus::Undecided => format!("undecided at horizon {}", v.horizon),
        VerdictStatus::MalformedRun { round, reason } => format!("malformed run at round {round}: {reason}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::borel::hk_decompose;
    use crate::quasimetric::{counting_basis_qm, specialization_qm};
    use crate::space::random_t0_space;

    #[test]
    fn sierpinski_three_rounds_always_won() {
        let s = FiniteSpace::sierpinski();
        let twos: Vec<Box<dyn PlayerTwo<FiniteSpace>>> = vec![
            Box::new(BackwardSearch),
            Box::new(qm_strategy(specialization_qm(&s))),
            Box::new(scattered_strategy(&s).unwrap()),
        ];
        for p2 in &twos {
            for seed in 0..30 {
                let mut ones: Vec<Box<dyn PlayerOne<FiniteSpace>>> = vec![
                    Box::new(PointSticker { point: Some(0) }),
                    Box::new(PointSticker { point: Some(1) }),
                    Box::new(ChainWalker),
                    Box::new(RandomLegal::new(seed)),
                ];
                for p1 in ones.iter_mut() {
                    let (t, v) = play(&s, p1.as_mut(), p2.as_ref(), 3);
                    assert!(v.won(), "{} vs {}: {:?}", p1.name(), p2.name(), t);
                    assert!(nesting_holds(&s, &t));
                }
            }
        }
    }

    #[test]
    fn omega_plus_one_d1_walker_converges_to_top() {
        let arena = ChainArena::omega_plus_one_scott(10);
        let (t, v) = play(&arena, &mut ChainWalker, &qm_strategy(ChainMetric::D1), 20);
        match v.status {
            VerdictStatus::WonByRefinement { point, round } => {
                assert_eq!(point, OMEGA);
                assert!(round <= 20);
            }
            s => panic!("{s:?}"),
        }
        let radii: Vec<Rat> = t.rounds.iter().take(3).map(|r| r.radius.clone().unwrap()).collect();
        assert_eq!(radii, vec![Rat::one(), Rat::frac(1, 2), Rat::frac(1, 3)]);
        assert_eq!(t.rounds[5].x, 5);
    }

    #[test]
    fn omega_plus_one_d2_is_undecided() {
        let arena = ChainArena::omega_plus_one_alexandroff(10);
        let (t, v) = play(&arena, &mut ChainWalker, &qm_strategy(ChainMetric::D2), 30);
        assert_eq!(v.status, VerdictStatus::Undecided);
        assert!(t.rounds.iter().all(|r| r.radius.is_some()));
    }

    #[test]
    fn omega_scott_is_undecided_at_every_horizon() {
        for h in [10, 20, 50, 100] {
            let arena = ChainArena::omega_scott(10);
            let (_, v) = play(&arena, &mut ChainWalker, &qm_strategy(ChainMetric::D2), h);
            assert_eq!(v.status, VerdictStatus::Undecided, "horizon {h}");
            assert_eq!(v.horizon, h);
        }
    }

    #[test]
    fn chain_metric_balls_match_brute_force() {
        let window: Vec<usize> = (0..40).chain([OMEGA]).collect();
        for m in [ChainMetric::D1, ChainMetric::D2] {
            for &x in &window {
                for k in 0..8 {
                    for eps in [Rat::pow2_neg(k), Rat::frac(1, k as i64 + 1), Rat::frac(3, 2)] {
                        for strict in [true, false] {
                            let arena = ChainArena::omega_plus_one_alexandroff(10);
                            let b = m.ball_open(x, &eps, strict);
                            for &y in &window {
                                let d = m.d(x, y);
                                let inside = if strict { d < eps } else { d <= eps };
                                assert_eq!(arena.contains(&b, y), inside, "{m:?} x={x} y={y} eps={eps}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn stuck_radius_reports_floor() {
        // discrete metric on the indiscrete two-point space: no ball is open
        let s = FiniteSpace::indiscrete(2);
        let d = QMetric::from_fn(s.labels().to_vec(), |x, y| if x == y { Rat::zero() } else { Rat::one() });
        let (_, v) = play(&s, &mut PointSticker { point: Some(0) }, &qm_strategy(d), 3);
        assert!(matches!(v.status, VerdictStatus::MalformedRun { round: 0, .. }));
        let d2 = QMetric::from_fn(s.labels().to_vec(), |_, _| Rat::zero());
        let p = QmStrategy { metric: d2, floor: 4 };
        let r = p.respond(&s, &Transcript::default(), 0, &PointSet::singleton(0));
        assert_eq!(r.err(), Some(QtopError::NoAdmissibleRadius { round: 0, floor: 4 }));
    }

    #[test]
    fn recorded_radii_keep_closed_balls_inside() {
        let p = FiniteSpace::powerset(3);
        let d = counting_basis_qm(&p);
        let st = qm_strategy(d.clone());
        for seed in 0..20 {
            let (t, _) = play(&p, &mut RandomLegal::new(seed), &st, 12);
            for r in &t.rounds {
                let eps = r.radius.as_ref().unwrap();
                assert!(d.closed_ball(r.x, eps).is_subset(r.u));
                assert_eq!(r.v, d.ball(r.x, eps));
            }
        }
    }

    #[test]
    fn discrete_space_switching_gives_singletons() {
        let s = FiniteSpace::discrete(4);
        let st = scattered_strategy(&s).unwrap();
        let mut p1 = RandomLegal::new(3);
        p1.stick = 0.0;
        let (t, v) = play(&s, &mut p1, &st, 6);
        assert!(v.won());
        assert!(t.rounds.iter().all(|r| r.v.len() == 1));
        let one = FiniteSpace::discrete(1);
        let (_, v1) = play(&one, &mut ChainWalker, &scattered_strategy(&one).unwrap(), 1);
        assert_eq!(v1.status, VerdictStatus::WonByRefinement { point: 0, round: 0 });
    }

    #[test]
    fn scattered_chain_wins_against_walker() {
        let c = FiniteSpace::chain(3);
        let st = scattered_strategy(&c).unwrap();
        let (t, v) = play(&c, &mut ChainWalker, &st, 6);
        assert!(v.won(), "{t:?}");
        let changes = t.points().windows(2).filter(|w| w[0] != w[1]).count();
        assert!(changes <= 3);
        assert!(scattered_strategy(&FiniteSpace::indiscrete(2)).is_err());
    }

    #[test]
    fn finite_spaces_are_won_by_every_strategy() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..12 {
            let n = rng.gen_range(2..=6);
            let s = random_t0_space(&mut rng, n, 0.4);
            let count = counting_basis_qm(&s);
            let horizon_count = s.basis().len() + 2 * n + 2;
            let twos: Vec<(Box<dyn PlayerTwo<FiniteSpace>>, usize)> = vec![
                (Box::new(BackwardSearch), 2 * n + 2),
                (Box::new(qm_strategy(specialization_qm(&s))), 2 * n + 2),
                (Box::new(qm_strategy(count)), horizon_count),
            ];
            for (p2, h) in &twos {
                for seed in 0..100 {
                    let (t, v) = play(&s, &mut RandomLegal::settling(seed, h - 2), p2.as_ref(), *h);
                    assert!(v.won(), "{} on {:?}: {:?} {:?}", p2.name(), s.basis(), v, t.points());
                    assert!(nesting_holds(&s, &t));
                }
            }
        }
    }

    #[test]
    fn delta2_extension_on_sierpinski_gives_discrete() {
        let s = FiniteSpace::sierpinski();
        let b = PointSet::singleton(0);
        let (ext, st) = delta2_extension_strategy(&s, BackwardSearch, b, vec![PointSet::singleton(1)]).unwrap();
        assert!(ext.same_topology(&FiniteSpace::discrete(2)));
        for seed in 0..50 {
            let (t, v) = play(&ext, &mut RandomLegal::new(seed), &st, 6);
            assert!(v.won(), "{t:?}");
        }
        assert_eq!(
            delta2_extension_strategy(&s, BackwardSearch, b, vec![PointSet::full(2)]).err(),
            Some(QtopError::DecompositionMismatch)
        );
    }

    #[test]
    fn delta2_extension_on_powerset() {
        let p = FiniteSpace::powerset(2);
        let b = PointSet::singleton(1);
        let (_, decomposition) = hk_decompose(&p, p.whole().minus(b), 6).unwrap();
        let (ext, st) = delta2_extension_strategy(&p, BackwardSearch, b, decomposition).unwrap();
        assert!(ext.is_open(b));
        for seed in 0..100 {
            let (t, v) = play(&ext, &mut RandomLegal::new(seed), &st, 10);
            assert!(v.won(), "{t:?}");
            assert!(nesting_holds(&ext, &t));
        }
    }

    #[test]
    fn delta2_with_whole_b_is_the_subspace_strategy() {
        let p = FiniteSpace::powerset(2);
        let (ext, st) = delta2_extension_strategy(&p, BackwardSearch, p.whole(), vec![]).unwrap();
        for seed in 0..20 {
            let mut p1 = RandomLegal::new(seed);
            let (t, _) = play(&ext, &mut p1, &st, 5);
            for r in t.rounds.iter().skip(1) {
                assert_eq!(r.v, ext.nbhd(r.x).intersect(r.u));
            }
        }
    }

    #[test]
    fn extraction_on_sierpinski() {
        let s = FiniteSpace::sierpinski();
        let st = BackwardSearch;
        let tree = extract_representation(&st, &s, 2).unwrap();
        assert!(tree.nodes.values().all(|v| *v == s.whole() || *v == PointSet::singleton(1)));
        let r = check_extraction(&tree, &st, &s).unwrap();
        assert!(r.monotone && r.image_equality, "{:?}", r.failures);
    }

    #[test]
    fn extraction_on_one_point_and_chain() {
        let one = FiniteSpace::discrete(1);
        let t1 = extract_representation(&BackwardSearch, &one, 3).unwrap();
        assert!(t1.nodes.values().all(|v| *v == one.whole()));
        let c = FiniteSpace::chain(3);
        let st = BasisRestricted(scattered_strategy(&c).unwrap());
        let tree = extract_representation(&st, &c, 3).unwrap();
        let r = check_extraction(&tree, &st, &c).unwrap();
        assert!(r.monotone && r.image_equality && r.basics_covered, "{:?}", r.failures);
    }

    #[test]
    fn non_basis_moves_are_rejected() {
        struct Pair;
        impl PlayerTwo<FiniteSpace> for Pair {
            fn name(&self) -> String {
                "pair".into()
            }
            fn respond(&self, _s: &FiniteSpace, _t: &Transcript<PointSet>, x: usize, _u: &PointSet) -> Result<Response<PointSet>> {
                Ok(Response::plain(PointSet::from_points([x, (x + 1) % 3])))
            }
        }
        let s = FiniteSpace::discrete(3);
        assert_eq!(extract_representation(&Pair, &s, 2).err(), Some(QtopError::NonBasisMove(0)));
        let wrapped = BasisRestricted(Pair);
        assert!(extract_representation(&wrapped, &s, 2).is_ok());
    }

    #[test]
    fn named_players_resolve() {
        let s = FiniteSpace::powerset(2);
        for n in PLAYER_TWO_FINITE {
            assert!(player_two_finite(n, &s).is_ok());
        }
        for n in PLAYER_ONE_NAMES {
            assert!(player_one_by_name::<FiniteSpace>(n, 1).is_ok());
        }
        assert!(player_one_by_name::<FiniteSpace>("sticker:2", 1).is_ok());
        assert!(player_one_by_name::<FiniteSpace>("nobody", 1).is_err());
    }
}
