//! Symbolic Borel expressions over the basic opens of a finite space.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QtopError, Result};
use crate::pointset::PointSet;
use crate::space::FiniteSpace;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SetExpr {
    Basic(usize),
    Union(Vec<SetExpr>),
    Intersect(Vec<SetExpr>),
    Diff(Box<SetExpr>, Box<SetExpr>),
    Complement(Box<SetExpr>),
    DiffHier(usize, Vec<SetExpr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LevelClass {
    Sigma,
    Pi,
    Delta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Level {
    pub class: LevelClass,
    pub index: usize,
}

impl Level {
    pub fn sigma(index: usize) -> Level {
        Level { class: LevelClass::Sigma, index }
    }

    pub fn pi(index: usize) -> Level {
        Level { class: LevelClass::Pi, index }
    }

    pub fn delta(index: usize) -> Level {
        Level { class: LevelClass::Delta, index }
    }

    /// Least `k` with this level contained in `Σ_k`.
    pub fn sigma_index(self) -> usize {
        match self.class {
            LevelClass::Pi => self.index + 1,
            _ => self.index,
        }
    }

    /// Least `k` with this level contained in `Π_k`.
    pub fn pi_index(self) -> usize {
        match self.class {
            LevelClass::Sigma => self.index + 1,
            _ => self.index,
        }
    }

    fn flip(self) -> Level {
        let class = match self.class {
            LevelClass::Sigma => LevelClass::Pi,
            LevelClass::Pi => LevelClass::Sigma,
            LevelClass::Delta => LevelClass::Delta,
        };
        Level { class, index: self.index }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.class {
            LevelClass::Sigma => "Σ",
            LevelClass::Pi => "Π",
            LevelClass::Delta => "Δ",
        };
        write!(f, "{c}{}", self.index)
    }
}

impl SetExpr {
    pub fn diff(a: SetExpr, b: SetExpr) -> SetExpr {
        SetExpr::Diff(Box::new(a), Box::new(b))
    }

    pub fn complement(a: SetExpr) -> SetExpr {
        SetExpr::Complement(Box::new(a))
    }

    pub fn size(&self) -> usize {
        match self {
            SetExpr::Basic(_) => 1,
            SetExpr::Union(cs) | SetExpr::Intersect(cs) | SetExpr::DiffHier(_, cs) => {
                1 + cs.iter().map(SetExpr::size).sum::<usize>()
            }
            SetExpr::Diff(a, b) => 1 + a.size() + b.size(),
            SetExpr::Complement(a) => 1 + a.size(),
        }
    }
}

/// Evaluate `e` on every point of `space`.
pub fn eval_set(e: &SetExpr, space: &FiniteSpace) -> Result<PointSet> {
    let n = space.len();
    Ok(match e {
        SetExpr::Basic(i) => *space.basis().get(*i).ok_or(QtopError::BadOpen(*i))?,
        SetExpr::Union(cs) => {
            non_empty(cs)?;
            let mut acc = PointSet::EMPTY;
            for c in cs {
                acc = acc.union(eval_set(c, space)?);
            }
            acc
        }
        SetExpr::Intersect(cs) => {
            non_empty(cs)?;
            let mut acc = space.whole();
            for c in cs {
                acc = acc.intersect(eval_set(c, space)?);
            }
            acc
        }
        SetExpr::Diff(a, b) => eval_set(a, space)?.minus(eval_set(b, space)?),
        SetExpr::Complement(a) => eval_set(a, space)?.complement(n),
        SetExpr::DiffHier(alpha, cs) => {
            if *alpha != cs.len() || cs.is_empty() {
                return Err(QtopError::PreconditionFailed(format!(
                    "DiffHier({alpha}) needs exactly {alpha} children, got {}",
                    cs.len()
                )));
            }
            let sets = cs.iter().map(|c| eval_set(c, space)).collect::<Result<Vec<_>>>()?;
            diff_hier_eval(&sets)?
        }
    })
}

fn non_empty(cs: &[SetExpr]) -> Result<()> {
    if cs.is_empty() {
        Err(QtopError::PreconditionFailed("empty union or intersection".into()))
    } else {
        Ok(())
    }
}

pub fn eval(e: &SetExpr, space: &FiniteSpace, x: usize) -> Result<bool> {
    if x >= space.len() {
        return Err(QtopError::BadPoint(x));
    }
    Ok(eval_set(e, space)?.contains(x))
}

/// `D_α({A_β}) = ⋃{A_β ∖ ⋃_{γ<β} A_γ : r(β) ≠ r(α)}` with `r` the parity
/// and `α` the number of sets.
pub fn diff_hier_eval(sets: &[PointSet]) -> Result<PointSet> {
    for (i, w) in sets.windows(2).enumerate() {
        if !w[0].is_subset(w[1]) {
            return Err(QtopError::NonIncreasing(i + 1));
        }
    }
    let alpha = sets.len();
    let mut acc = PointSet::EMPTY;
    let mut below = PointSet::EMPTY;
    for (beta, &a) in sets.iter().enumerate() {
        if beta % 2 != alpha % 2 {
            acc = acc.union(a.minus(below));
        }
        below = below.union(a);
    }
    Ok(acc)
}

/// Syntactic upper bound on the Borel level.
///
/// Unions prefer Σ and intersections prefer Π when both bounds tie; finite
/// intersections of Σ sets and finite unions of Π sets stay at their level.
pub fn level_of(e: &SetExpr) -> Level {
    match e {
        SetExpr::Basic(_) => Level::sigma(1),
        SetExpr::Union(cs) => {
            let (s, p) = bounds(cs);
            if s <= p {
                Level::sigma(s)
            } else {
                Level::pi(p)
            }
        }
        SetExpr::Intersect(cs) => {
            let (s, p) = bounds(cs);
            if p <= s {
                Level::pi(p)
            } else {
                Level::sigma(s)
            }
        }
        SetExpr::Diff(a, b) => {
            let (la, lb) = (level_of(a), level_of(b));
            let s = la.sigma_index().max(lb.sigma_index()) + 1;
            let p = la.pi_index().max(lb.sigma_index());
            if s <= p {
                Level::sigma(s)
            } else {
                Level::pi(p)
            }
        }
        SetExpr::Complement(a) => level_of(a).flip(),
        SetExpr::DiffHier(alpha, cs) => {
            if *alpha == 1 && cs.len() == 1 {
                level_of(&cs[0])
            } else {
                let m = cs.iter().map(|c| level_of(c).sigma_index()).max().unwrap_or(1);
                Level::delta(m + 1)
            }
        }
    }
}

fn bounds(cs: &[SetExpr]) -> (usize, usize) {
    let ls: Vec<Level> = cs.iter().map(level_of).collect();
    let s = ls.iter().map(|l| l.sigma_index()).max().unwrap_or(1);
    let p = ls.iter().map(|l| l.pi_index()).max().unwrap_or(1);
    (s, p)
}

/// `(⋂ pos) ∖ (⋃ neg)`, with `⋂ ∅` the whole space.
#[derive(Clone, Debug)]
struct Piece {
    pos: Vec<SetExpr>,
    neg: Vec<SetExpr>,
}

fn sig(e: &SetExpr) -> usize {
    level_of(e).sigma_index()
}

/// Split `e` (of Σ-index at most `alpha`) into pieces whose entries all have
/// Σ-index below `alpha`.
fn pieces(e: &SetExpr, alpha: usize) -> Result<Vec<Piece>> {
    if sig(e) < alpha {
        return Ok(vec![Piece { pos: vec![e.clone()], neg: vec![] }]);
    }
    match e {
        SetExpr::Basic(_) => unreachable!("basic opens are Σ1"),
        SetExpr::Union(cs) => {
            let mut out = Vec::new();
            for c in cs {
                out.extend(pieces(c, alpha)?);
            }
            Ok(out)
        }
        SetExpr::Intersect(cs) => {
            let mut acc = vec![Piece { pos: vec![], neg: vec![] }];
            for c in cs {
                let ps = pieces(c, alpha)?;
                let mut next = Vec::with_capacity(acc.len() * ps.len());
                for a in &acc {
                    for p in &ps {
                        next.push(Piece {
                            pos: a.pos.iter().chain(&p.pos).cloned().collect(),
                            neg: a.neg.iter().chain(&p.neg).cloned().collect(),
                        });
                    }
                }
                acc = next;
            }
            Ok(acc)
        }
        SetExpr::Diff(a, b) => {
            if sig(a) < alpha && sig(b) < alpha {
                Ok(vec![Piece { pos: vec![(**a).clone()], neg: vec![(**b).clone()] }])
            } else {
                pieces(&SetExpr::Intersect(vec![(**a).clone(), SetExpr::complement((**b).clone())]), alpha)
            }
        }
        SetExpr::Complement(x) if sig(x) < alpha => Ok(vec![Piece { pos: vec![], neg: vec![(**x).clone()] }]),
        SetExpr::Complement(x) => match &**x {
            SetExpr::Basic(_) => unreachable!("Σ1 handled above"),
            SetExpr::Complement(y) => pieces(y, alpha),
            SetExpr::Union(cs) => {
                pieces(&SetExpr::Intersect(cs.iter().cloned().map(SetExpr::complement).collect()), alpha)
            }
            SetExpr::Intersect(cs) => {
                pieces(&SetExpr::Union(cs.iter().cloned().map(SetExpr::complement).collect()), alpha)
            }
            SetExpr::Diff(a, b) => {
                pieces(&SetExpr::Union(vec![SetExpr::complement((**a).clone()), (**b).clone()]), alpha)
            }
            SetExpr::DiffHier(k, cs) => {
                if cs.iter().any(|c| sig(c) >= alpha) {
                    return Err(QtopError::PreconditionFailed("difference-hierarchy child too complex".into()));
                }
                // outside every A_β, or first met at a layer of the same parity as k
                let mut out = vec![Piece { pos: vec![], neg: cs.clone() }];
                for beta in 0..cs.len() {
                    if beta % 2 == k % 2 {
                        out.push(Piece { pos: vec![cs[beta].clone()], neg: cs[..beta].to_vec() });
                    }
                }
                Ok(out)
            }
        },
        SetExpr::DiffHier(k, cs) => {
            if *k == 1 && cs.len() == 1 {
                return pieces(&cs[0], alpha);
            }
            if cs.iter().any(|c| sig(c) >= alpha) {
                return Err(QtopError::PreconditionFailed("difference-hierarchy child too complex".into()));
            }
            Ok((0..cs.len())
                .filter(|beta| beta % 2 != k % 2)
                .map(|beta| Piece { pos: vec![cs[beta].clone()], neg: cs[..beta].to_vec() })
                .collect())
        }
    }
}

/// Rewrite a Σα expression (α > 2) as a union of pieces each of level at
/// most Π_{α-1}, following `B = G ∖ (G' ∪ D')`.
pub fn rewrite_sigma_as_pi_union(e: &SetExpr) -> Result<SetExpr> {
    let lvl = level_of(e);
    if lvl.class != LevelClass::Sigma {
        return Err(QtopError::PreconditionFailed(format!("expected a Σ level, got {lvl}")));
    }
    let alpha = lvl.index;
    if alpha <= 2 {
        return Err(QtopError::UnsupportedLevel(format!("level too low: {lvl}")));
    }
    let mut out = Vec::new();
    for piece in pieces(e, alpha)? {
        // expand positive entries that are not yet Π_{α-1}
        let mut expanded = vec![Piece { pos: vec![], neg: piece.neg.clone() }];
        for d in &piece.pos {
            let ld = level_of(d);
            let parts = if ld.pi_index() < alpha {
                vec![Piece { pos: vec![d.clone()], neg: vec![] }]
            } else {
                pieces(d, ld.sigma_index())?
            };
            let mut next = Vec::new();
            for a in &expanded {
                for p in &parts {
                    next.push(Piece {
                        pos: a.pos.iter().chain(&p.pos).cloned().collect(),
                        neg: a.neg.iter().chain(&p.neg).cloned().collect(),
                    });
                }
            }
            expanded = next;
        }
        for p in expanded {
            let mut conj = p.pos;
            if !p.neg.is_empty() {
                conj.push(SetExpr::complement(SetExpr::Union(p.neg)));
            }
            let term = if conj.len() == 1 { conj.pop().unwrap() } else { SetExpr::Intersect(conj) };
            if level_of(&term).pi_index() >= alpha {
                return Err(QtopError::PreconditionFailed(format!(
                    "piece at {} exceeds Π{}",
                    level_of(&term),
                    alpha - 1
                )));
            }
            out.push(term);
        }
    }
    Ok(SetExpr::Union(out))
}

/// An open set of `space` as an expression over its basis.
pub fn open_expr(space: &FiniteSpace, u: PointSet) -> Result<SetExpr> {
    if !space.is_open(u) {
        return Err(QtopError::NotOpen(u.to_vec()));
    }
    if let Some(i) = space.basis_index(u) {
        return Ok(SetExpr::Basic(i));
    }
    let terms = u
        .iter()
        .map(|x| {
            let ids: Vec<SetExpr> = space
                .basis()
                .iter()
                .enumerate()
                .filter(|(_, b)| b.contains(x))
                .map(|(i, _)| SetExpr::Basic(i))
                .collect();
            SetExpr::Intersect(ids)
        })
        .collect();
    Ok(SetExpr::Union(terms))
}

/// Π2 expression for the diagonal of `space × space`, evaluated on
/// `FiniteSpace::product(space, space)`.  Its complement is
/// `⋃ B_i × (X∖B_i) ∪ (X∖B_i) × B_i`.
pub fn diagonal_expr(space: &FiniteSpace) -> Result<SetExpr> {
    space.require_t0()?;
    let nb = space.basis().len();
    let w = space.basis_index(space.whole()).expect("basis contains the whole space");
    let mut parts = Vec::new();
    for i in 0..nb {
        let left = SetExpr::Basic(i * nb + w);
        let right = SetExpr::Basic(w * nb + i);
        parts.push(SetExpr::diff(left.clone(), right.clone()));
        parts.push(SetExpr::diff(right, left));
    }
    Ok(SetExpr::complement(SetExpr::Union(parts)))
}

/// Π2 expression on `x_space` for `{x | f(x) = g(x)}`: `f(x)` and `g(x)`
/// agree iff they lie in the same basic opens of the (T0) codomain.
pub fn equalizer_expr(f: &[usize], g: &[usize], x_space: &FiniteSpace, y_space: &FiniteSpace) -> Result<SetExpr> {
    if f.len() != x_space.len() || g.len() != x_space.len() {
        return Err(QtopError::PreconditionFailed("map length differs from domain size".into()));
    }
    if let Some(&bad) = f.iter().chain(g).find(|&&y| y >= y_space.len()) {
        return Err(QtopError::BadPoint(bad));
    }
    y_space.require_t0()?;
    x_space.is_continuous(y_space, f)?;
    x_space.is_continuous(y_space, g)?;
    let mut parts = Vec::new();
    for &b in y_space.basis() {
        let pf: PointSet = (0..x_space.len()).filter(|&x| b.contains(f[x])).collect();
        let pg: PointSet = (0..x_space.len()).filter(|&x| b.contains(g[x])).collect();
        let (ef, eg) = (open_expr(x_space, pf)?, open_expr(x_space, pg)?);
        parts.push(SetExpr::diff(ef.clone(), eg.clone()));
        parts.push(SetExpr::diff(eg, ef));
    }
    Ok(SetExpr::complement(SetExpr::Union(parts)))
}

/// Shortest increasing sequence of opens `A_0 ⊆ .. ⊆ A_{α-1}` (α ≤ maxlen)
/// with `D_α = target`.  Candidates are tried in the order of
/// [`FiniteSpace::opens`].
pub fn hk_decompose(space: &FiniteSpace, target: PointSet, maxlen: usize) -> Option<(usize, Vec<PointSet>)> {
    let opens = space.opens();
    for alpha in 1..=maxlen {
        let mut seq = Vec::with_capacity(alpha);
        if hk_search(opens, target, alpha, PointSet::EMPTY, &mut seq) {
            return Some((alpha, seq));
        }
    }
    None
}

fn hk_search(opens: &[PointSet], target: PointSet, alpha: usize, below: PointSet, seq: &mut Vec<PointSet>) -> bool {
    let beta = seq.len();
    if beta == alpha {
        return target.is_subset(below);
    }
    let inside = beta % 2 != alpha % 2;
    for &a in opens {
        if !below.is_subset(a) {
            continue;
        }
        let layer = a.minus(below);
        let ok = if inside { layer.is_subset(target) } else { layer.intersect(target).is_empty() };
        if !ok {
            continue;
        }
        seq.push(a);
        if hk_search(opens, target, alpha, a, seq) {
            return true;
        }
        seq.pop();
    }
    false
}

// ---- S-expression text form ----

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, cs: &[SetExpr]| -> fmt::Result {
            write!(f, "({head}")?;
            for c in cs {
                write!(f, " {c}")?;
            }
            write!(f, ")")
        };
        match self {
            SetExpr::Basic(i) => write!(f, "(basic {i})"),
            SetExpr::Union(cs) => list(f, "union", cs),
            SetExpr::Intersect(cs) => list(f, "intersect", cs),
            SetExpr::Diff(a, b) => write!(f, "(diff {a} {b})"),
            SetExpr::Complement(a) => write!(f, "(complement {a})"),
            SetExpr::DiffHier(k, cs) => list(f, &format!("diffhier {k}"), cs),
        }
    }
}

impl std::str::FromStr for SetExpr {
    type Err = QtopError;

    fn from_str(s: &str) -> Result<SetExpr> {
        let toks = tokenize(s);
        let mut pos = 0;
        let e = parse_expr(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(QtopError::Parse(format!("trailing input after token {pos}")));
        }
        Ok(e)
    }
}

fn tokenize(s: &str) -> Vec<String> {
    s.replace('(', " ( ").replace(')', " ) ").split_whitespace().map(str::to_string).collect()
}

fn parse_expr(t: &[String], pos: &mut usize) -> Result<SetExpr> {
    let err = |m: &str| QtopError::Parse(m.to_string());
    let next = |pos: &mut usize| -> Result<String> {
        let tok = t.get(*pos).cloned().ok_or_else(|| QtopError::Parse("unexpected end of input".into()))?;
        *pos += 1;
        Ok(tok)
    };
    if next(pos)? != "(" {
        return Err(err("expected '('"));
    }
    let head = next(pos)?;
    let number = |pos: &mut usize| -> Result<usize> {
        let tok = next(pos)?;
        tok.parse().map_err(|_| QtopError::Parse(format!("expected a number, got {tok:?}")))
    };
    let children = |pos: &mut usize| -> Result<Vec<SetExpr>> {
        let mut cs = Vec::new();
        while t.get(*pos).map(String::as_str) == Some("(") {
            cs.push(parse_expr(t, pos)?);
        }
        Ok(cs)
    };
    let e = match head.as_str() {
        "basic" => SetExpr::Basic(number(pos)?),
        "union" | "intersect" => {
            let cs = children(pos)?;
            if cs.is_empty() {
                return Err(err("union/intersect needs at least one child"));
            }
            if head == "union" {
                SetExpr::Union(cs)
            } else {
                SetExpr::Intersect(cs)
            }
        }
        "diff" => {
            let a = parse_expr(t, pos)?;
            let b = parse_expr(t, pos)?;
            SetExpr::diff(a, b)
        }
        "complement" => SetExpr::complement(parse_expr(t, pos)?),
        "diffhier" => {
            let k = number(pos)?;
            SetExpr::DiffHier(k, children(pos)?)
        }
        other => return Err(QtopError::Parse(format!("unknown operator {other:?}"))),
    };
    if next(pos)? != ")" {
        return Err(err("expected ')'"));
    }
    Ok(e)
}

/// A random expression over `nb` basic opens.  Difference-hierarchy nodes
/// are built over chains of basics so that they evaluate on any space whose
/// basis is increasing along the chosen indices; callers that cannot promise
/// this should set `allow_diffhier` to false.
pub fn random_expr<R: rand::Rng>(rng: &mut R, nb: usize, depth: usize, allow_diffhier: bool) -> SetExpr {
    if depth == 0 || rng.gen_bool(0.25) {
        return SetExpr::Basic(rng.gen_range(0..nb));
    }
    let kinds = if allow_diffhier { 5 } else { 4 };
    match rng.gen_range(0..kinds) {
        0 => SetExpr::Union((0..rng.gen_range(1..=3)).map(|_| random_expr(rng, nb, depth - 1, allow_diffhier)).collect()),
        1 => SetExpr::Intersect(
            (0..rng.gen_range(1..=3)).map(|_| random_expr(rng, nb, depth - 1, allow_diffhier)).collect(),
        ),
        2 => SetExpr::diff(random_expr(rng, nb, depth - 1, allow_diffhier), random_expr(rng, nb, depth - 1, allow_diffhier)),
        3 => SetExpr::complement(random_expr(rng, nb, depth - 1, allow_diffhier)),
        _ => {
            // cumulative unions keep the children increasing on every space
            let k = rng.gen_range(1..=3);
            let mut cs = Vec::new();
            let mut acc: Vec<SetExpr> = Vec::new();
            for _ in 0..k {
                acc.push(random_expr(rng, nb, depth - 1, false));
                cs.push(SetExpr::Union(acc.clone()));
            }
            SetExpr::DiffHier(k, cs)
        }
    }
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
    fn sierpinski_evaluations() {
        let s = FiniteSpace::sierpinski();
        // basis: 0 = ∅, 1 = {top}, 2 = X
        assert!(eval(&SetExpr::complement(SetExpr::Basic(1)), &s, 0).unwrap());
        assert!(!eval(&SetExpr::diff(SetExpr::Basic(2), SetExpr::Basic(1)), &s, 1).unwrap());
        assert_eq!(eval_set(&SetExpr::Basic(7), &s), Err(QtopError::BadOpen(7)));
    }

    #[test]
    fn union_matches_bitset_union() {
        let p = FiniteSpace::powerset(2);
        let e = SetExpr::Union(vec![SetExpr::Basic(1), SetExpr::Basic(2)]);
        let expect = p.basis()[1].union(p.basis()[2]);
        for x in 0..4 {
            assert_eq!(eval(&e, &p, x).unwrap(), expect.contains(x));
        }
    }

    #[test]
    fn level_rules() {
        let b = SetExpr::Basic;
        assert_eq!(level_of(&b(0)), Level::sigma(1));
        // ∩ (U_i ∪ A_i) with U_i ∪ A_i written as ¬(¬A_i ∖ U_i)
        let term = |u, a| SetExpr::complement(SetExpr::diff(b(a), b(u)));
        let e = SetExpr::Intersect(vec![term(0, 1), term(2, 3)]);
        assert_eq!(level_of(&e), Level::pi(2));
        assert_eq!(level_of(&SetExpr::DiffHier(2, vec![b(0), b(1)])), Level::delta(2));
        assert_eq!(level_of(&SetExpr::diff(b(0), b(1))), Level::sigma(2));
        assert_eq!(level_of(&SetExpr::diff(SetExpr::complement(b(0)), b(1))), Level::pi(1));
    }

    #[test]
    fn finite_union_and_intersection_keep_sigma_level() {
        let s2 = SetExpr::diff(SetExpr::Basic(0), SetExpr::Basic(1));
        assert_eq!(level_of(&SetExpr::Union(vec![s2.clone(), s2.clone()])), Level::sigma(2));
        assert_eq!(level_of(&SetExpr::Intersect(vec![s2.clone(), s2])), Level::sigma(2));
    }

    #[test]
    fn diff_hier_examples() {
        let (a0, a1, a2) = (ps(&[3]), ps(&[1, 3]), ps(&[0, 1, 2, 3]));
        assert_eq!(diff_hier_eval(&[a0]).unwrap(), a0);
        assert_eq!(diff_hier_eval(&[a0, a1]).unwrap(), a1.minus(a0));
        assert_eq!(diff_hier_eval(&[a0, a1, a2]).unwrap(), a0.union(a2.minus(a1)));
        assert_eq!(diff_hier_eval(&[a1, a0]), Err(QtopError::NonIncreasing(1)));
    }

    #[test]
    fn hk_on_sierpinski_bottom() {
        let s = FiniteSpace::sierpinski();
        assert_eq!(hk_decompose(&s, ps(&[0]), 4), Some((2, vec![ps(&[1]), ps(&[0, 1])])));
        assert_eq!(hk_decompose(&s, ps(&[1]), 4), Some((1, vec![ps(&[1])])));
    }

    #[test]
    fn hk_finds_every_subset_of_powerset_space() {
        let p = FiniteSpace::powerset(2);
        for m in 0..16u64 {
            let (alpha, seq) = hk_decompose(&p, PointSet(m), 4).expect("decomposition exists");
            assert!(alpha <= 4);
            assert_eq!(diff_hier_eval(&seq).unwrap(), PointSet(m));
        }
    }

    #[test]
    fn diagonal_examples() {
        let s = FiniteSpace::sierpinski();
        let sq = FiniteSpace::product(&s, &s).unwrap();
        let d = diagonal_expr(&s).unwrap();
        assert_eq!(level_of(&d), Level::pi(2));
        assert_eq!(eval_set(&d, &sq).unwrap(), ps(&[0, 3]));
        let one = FiniteSpace::discrete(1);
        let d1 = diagonal_expr(&one).unwrap();
        assert_eq!(eval_set(&d1, &FiniteSpace::product(&one, &one).unwrap()).unwrap(), ps(&[0]));
        let p = FiniteSpace::powerset(2);
        let dp = eval_set(&diagonal_expr(&p).unwrap(), &FiniteSpace::product(&p, &p).unwrap()).unwrap();
        assert_eq!(dp, ps(&[0, 5, 10, 15]));
        assert!(diagonal_expr(&FiniteSpace::indiscrete(2)).is_err());
    }

    #[test]
    fn equalizer_examples() {
        let s = FiniteSpace::sierpinski();
        let e = equalizer_expr(&[0, 1], &[1, 1], &s, &s).unwrap();
        assert_eq!(level_of(&e), Level::pi(2));
        assert_eq!(eval_set(&e, &s).unwrap(), ps(&[1]));
        let all = equalizer_expr(&[0, 1], &[0, 1], &s, &s).unwrap();
        assert_eq!(eval_set(&all, &s).unwrap(), ps(&[0, 1]));
        // swapping is not continuous
        assert!(matches!(equalizer_expr(&[1, 0], &[0, 1], &s, &s), Err(QtopError::NotContinuous(_))));
    }

    #[test]
    fn equalizer_of_retraction_is_the_section_image() {
        // s: Sierpiński → P(2), bot ↦ ∅, top ↦ {0}; r(S) = top iff 0 ∈ S
        let x = FiniteSpace::sierpinski();
        let y = FiniteSpace::powerset(2);
        let s = [0usize, 1];
        let r: Vec<usize> = (0..4).map(|m| m & 1).collect();
        x.is_continuous(&y, &s).unwrap();
        y.is_continuous(&x, &r).unwrap();
        let sr: Vec<usize> = (0..4).map(|m| s[r[m]]).collect();
        let id: Vec<usize> = (0..4).collect();
        let e = equalizer_expr(&sr, &id, &y, &y).unwrap();
        assert_eq!(eval_set(&e, &y).unwrap(), ps(&[0, 1]));
    }

    #[test]
    fn rewrite_of_hand_built_sigma3() {
        let p = FiniteSpace::powerset(2);
        let b = SetExpr::Basic;
        let s2a = SetExpr::diff(b(1), b(2));
        let s2b = SetExpr::diff(b(3), b(1));
        let e = SetExpr::Union(vec![SetExpr::diff(s2a, s2b), b(2)]);
        assert_eq!(level_of(&e), Level::sigma(3));
        let r = rewrite_sigma_as_pi_union(&e).unwrap();
        assert_eq!(eval_set(&r, &p).unwrap(), eval_set(&e, &p).unwrap());
        let SetExpr::Union(parts) = &r else { panic!("not a union") };
        assert!(parts.iter().all(|t| level_of(t).pi_index() <= 2));
    }

    #[test]
    fn rewrite_of_empty_sigma3() {
        let p = FiniteSpace::powerset(2);
        let b = SetExpr::Basic;
        let s2 = SetExpr::diff(b(1), b(1));
        let e = SetExpr::diff(s2.clone(), s2);
        assert_eq!(level_of(&e), Level::sigma(3));
        assert_eq!(eval_set(&e, &p).unwrap(), PointSet::EMPTY);
        let r = rewrite_sigma_as_pi_union(&e).unwrap();
        assert_eq!(eval_set(&r, &p).unwrap(), PointSet::EMPTY);
    }

    #[test]
    fn rewrite_rejects_low_levels() {
        let e = SetExpr::diff(SetExpr::Basic(0), SetExpr::Basic(1));
        assert!(matches!(rewrite_sigma_as_pi_union(&e), Err(QtopError::UnsupportedLevel(_))));
    }

    #[test]
    fn random_sigma3_rewrites_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut found = 0;
        let mut tries = 0;
        while found < 100 {
            tries += 1;
            assert!(tries < 200_000, "generator rarely produces Σ3");
            let space = crate::space::random_t0_space(&mut rng, 4, 0.4);
            let nb = space.basis().len();
            let e = random_expr(&mut rng, nb, 4, true);
            if level_of(&e) != Level::sigma(3) {
                continue;
            }
            let Ok(want) = eval_set(&e, &space) else { continue };
            found += 1;
            let r = rewrite_sigma_as_pi_union(&e).unwrap();
            assert_eq!(eval_set(&r, &space).unwrap(), want, "{e}");
        }
    }

    #[test]
    fn sexpr_round_trip() {
        let src = "(diff (basic 3) (union (basic 1) (basic 2)))";
        let e: SetExpr = src.parse().unwrap();
        assert_eq!(e.to_string(), src);
        let h: SetExpr = "(diffhier 2 (basic 0) (basic 1))".parse().unwrap();
        assert_eq!(h, SetExpr::DiffHier(2, vec![SetExpr::Basic(0), SetExpr::Basic(1)]));
        assert!("(basic)".parse::<SetExpr>().is_err());
        assert!("(union)".parse::<SetExpr>().is_err());
        assert!("(basic 1) extra".parse::<SetExpr>().is_err());
    }
}
