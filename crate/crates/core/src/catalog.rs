//! Symbolically presented countable spaces, truncated to a depth.
//!
//! Point codes are `usize`; [`OMEGA`] is the code of the top point `ω` of
//! `ω+1`.  Every answer derived from a catalog space is only claimed up to
//! the truncation depth.

use serde::{Deserialize, Serialize};

use crate::pointset::PointSet;
use crate::space::FiniteSpace;

pub const OMEGA: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CatalogTag {
    Sierpinski,
    /// `P({0..k-1})` with the Scott topology.
    PowersetTrunc(usize),
    OmegaPlusOneScott,
    OmegaPlusOneAlexandroff,
    OmegaScott,
    TwoBottomLadder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogSpace {
    pub tag: CatalogTag,
    pub depth: usize,
}

/// Ladder codes: `0` and `1` are the two bottoms, `n + 2` is rung `n`.
pub const BOT1: usize = 0;
pub const BOT2: usize = 1;

pub fn rung(n: usize) -> usize {
    n + 2
}

impl CatalogSpace {
    pub fn new(tag: CatalogTag, depth: usize) -> CatalogSpace {
        CatalogSpace { tag, depth }
    }

    /// Point codes present at this depth.
    pub fn points(&self) -> Vec<usize> {
        let n = self.depth;
        match self.tag {
            CatalogTag::Sierpinski => vec![0, 1],
            CatalogTag::PowersetTrunc(k) => (0..1usize << k).collect(),
            CatalogTag::OmegaPlusOneScott | CatalogTag::OmegaPlusOneAlexandroff => {
                (0..n).chain([OMEGA]).collect()
            }
            CatalogTag::OmegaScott => (0..n).collect(),
            CatalogTag::TwoBottomLadder => [BOT1, BOT2].into_iter().chain((0..n).map(rung)).collect(),
        }
    }

    pub fn label(&self, p: usize) -> String {
        match self.tag {
            CatalogTag::Sierpinski => ["bot", "top"][p].into(),
            CatalogTag::PowersetTrunc(_) => {
                let e: Vec<String> = PointSet(p as u64).iter().map(|i| i.to_string()).collect();
                format!("{{{}}}", e.join(","))
            }
            CatalogTag::TwoBottomLadder => match p {
                BOT1 => "bot1".into(),
                BOT2 => "bot2".into(),
                r => (r - 2).to_string(),
            },
            _ if p == OMEGA => "omega".into(),
            _ => p.to_string(),
        }
    }

    /// Number of basic opens at this depth.
    pub fn basis_len(&self) -> usize {
        match self.tag {
            CatalogTag::Sierpinski => 3,
            CatalogTag::PowersetTrunc(k) => 1usize << k,
            CatalogTag::OmegaPlusOneScott | CatalogTag::OmegaScott => self.depth,
            CatalogTag::OmegaPlusOneAlexandroff => self.depth + 1,
            CatalogTag::TwoBottomLadder => self.depth + 2,
        }
    }

    /// Membership oracle.
    ///
    /// Basic opens: Sierpiński `∅, {top}, X`; powerset `↑F` at index `F`;
    /// Scott chains `↑k` at index `k`; Alexandroff `ω+1` has `{ω}` at index 0
    /// and `↑k` at index `k+1`; the ladder has `↑x` at index `x`.
    pub fn member(&self, p: usize, b: usize) -> bool {
        match self.tag {
            CatalogTag::Sierpinski => match b {
                0 => false,
                1 => p == 1,
                _ => true,
            },
            CatalogTag::PowersetTrunc(_) => b & !p == 0,
            CatalogTag::OmegaPlusOneScott | CatalogTag::OmegaScott => p >= b,
            CatalogTag::OmegaPlusOneAlexandroff => match b {
                0 => p == OMEGA,
                k => p >= k - 1,
            },
            CatalogTag::TwoBottomLadder => self.ladder_le(b, p),
        }
    }

    /// The ladder order: bottoms below every rung, `n ⊑ m` iff `n ≥ m`.
    pub fn ladder_le(&self, x: usize, y: usize) -> bool {
        match (x, y) {
            _ if x == y => true,
            (BOT1 | BOT2, BOT1 | BOT2) => false,
            (BOT1 | BOT2, _) => true,
            (_, BOT1 | BOT2) => false,
            (a, b) => a >= b,
        }
    }

    /// `subset[i][j]` iff basic `i ⊆` basic `j`, from closed forms.
    pub fn subset_table(&self) -> Vec<Vec<bool>> {
        let m = self.basis_len();
        (0..m).map(|i| (0..m).map(|j| self.subset_closed_form(i, j)).collect()).collect()
    }

    fn subset_closed_form(&self, i: usize, j: usize) -> bool {
        match self.tag {
            CatalogTag::Sierpinski => i == 0 || j == 2 || i == j,
            CatalogTag::PowersetTrunc(_) => j & !i == 0,
            CatalogTag::OmegaPlusOneScott | CatalogTag::OmegaScott => i >= j,
            CatalogTag::OmegaPlusOneAlexandroff => i == 0 || (j != 0 && i >= j),
            CatalogTag::TwoBottomLadder => self.ladder_le(j, i),
        }
    }

    /// Index of a basic open equal to `i ∩ j`, if there is one.
    pub fn intersection_witness(&self, i: usize, j: usize) -> Option<usize> {
        match self.tag {
            CatalogTag::Sierpinski => Some(i.min(j)),
            CatalogTag::PowersetTrunc(_) => Some(i | j),
            CatalogTag::OmegaPlusOneScott | CatalogTag::OmegaScott => Some(i.max(j)),
            CatalogTag::OmegaPlusOneAlexandroff => Some(if i == 0 || j == 0 { 0 } else { i.max(j) }),
            CatalogTag::TwoBottomLadder => {
                if self.ladder_le(j, i) {
                    Some(i)
                } else if self.ladder_le(i, j) {
                    Some(j)
                } else {
                    // ↑bot1 ∩ ↑bot2 is the set of all rungs, which is not principal
                    None
                }
            }
        }
    }

    /// Basic open `b` as a set of point codes at this depth.
    pub fn basic_points(&self, b: usize) -> Vec<usize> {
        self.points().into_iter().filter(|&p| self.member(p, b)).collect()
    }

    /// Compare the closed-form tables with the membership oracle on the
    /// points present at this depth.  Returns the first disagreement.
    pub fn check_tables(&self) -> Option<String> {
        let m = self.basis_len();
        let pts = self.points();
        let set = |b: usize| -> Vec<bool> { pts.iter().map(|&p| self.member(p, b)).collect() };
        let sets: Vec<Vec<bool>> = (0..m).map(set).collect();
        let sub = self.subset_table();
        for i in 0..m {
            for j in 0..m {
                let brute = sets[i].iter().zip(&sets[j]).all(|(a, b)| !a || *b);
                if brute != sub[i][j] {
                    return Some(format!("subset({i},{j}) disagrees with membership"));
                }
                if let Some(k) = self.intersection_witness(i, j) {
                    let meet: Vec<bool> = sets[i].iter().zip(&sets[j]).map(|(a, b)| *a && *b).collect();
                    if meet != sets[k] {
                        return Some(format!("intersection({i},{j}) = {k} disagrees with membership"));
                    }
                }
            }
        }
        None
    }

    /// The truncation as a finite space; point `i` is `self.points()[i]`.
    /// Truncation can merge points (for instance `depth-1` and `ω`).
    pub fn to_finite(&self) -> FiniteSpace {
        let pts = self.points();
        let labels = pts.iter().map(|&p| self.label(p)).collect();
        let basis = (0..self.basis_len())
            .map(|b| pts.iter().enumerate().filter(|(_, &p)| self.member(p, b)).map(|(i, _)| i).collect())
            .collect();
        FiniteSpace::from_basis(labels, basis).expect("catalog depth within point limit")
    }

    /// Bounded search for a failure of sobriety.  The whole space is
    /// irreducible if all non-empty basic opens meet; a generic point must
    /// lie in every non-empty basic open.  Candidates are the points at this
    /// depth, tested against the basis one level deeper so that the last
    /// point is not mistaken for a generic one.  Never returns a verdict of
    /// sober.
    pub fn sobriety_search(&self) -> SobrietySearch {
        let wide = CatalogSpace::new(self.tag, self.depth + 1);
        let m = wide.basis_len();
        let wide_pts = wide.points();
        let nonempty: Vec<usize> = (0..m).filter(|&b| wide_pts.iter().any(|&p| wide.member(p, b))).collect();
        for &a in &nonempty {
            for &b in &nonempty {
                if !wide_pts.iter().any(|&p| wide.member(p, a) && wide.member(p, b)) {
                    return SobrietySearch {
                        depth: self.depth,
                        witness: None,
                        note: format!("whole space is reducible: basic opens {a} and {b} are disjoint"),
                    };
                }
            }
        }
        let mut missing = Vec::new();
        for p in self.points() {
            match nonempty.iter().find(|&&b| !wide.member(p, b)) {
                Some(&b) => missing.push((self.label(p), b)),
                None => {
                    return SobrietySearch {
                        depth: self.depth,
                        witness: None,
                        note: format!("whole space has generic point {}", self.label(p)),
                    }
                }
            }
        }
        SobrietySearch {
            depth: self.depth,
            witness: Some(missing),
            note: format!(
                "non-sober witness: the whole-space closed chain has no generic point up to depth {}",
                self.depth
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SobrietySearch {
    pub depth: usize,
    /// For each candidate point, a non-empty basic open that misses it.
    pub witness: Option<Vec<(String, usize)>>,
    pub note: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_tags() -> Vec<CatalogTag> {
        vec![
            CatalogTag::Sierpinski,
            CatalogTag::PowersetTrunc(3),
            CatalogTag::OmegaPlusOneScott,
            CatalogTag::OmegaPlusOneAlexandroff,
            CatalogTag::OmegaScott,
            CatalogTag::TwoBottomLadder,
        ]
    }

    #[test]
    fn tables_agree_with_membership() {
        for tag in all_tags() {
            for depth in [1, 4, 10] {
                let c = CatalogSpace::new(tag, depth);
                assert_eq!(c.check_tables(), None, "{tag:?} depth {depth}");
            }
        }
    }

    #[test]
    fn omega_scott_has_no_generic_point() {
        let r = CatalogSpace::new(CatalogTag::OmegaScott, 10).sobriety_search();
        assert!(r.witness.is_some());
        assert_eq!(
            r.note,
            "non-sober witness: the whole-space closed chain has no generic point up to depth 10"
        );
    }

    #[test]
    fn omega_plus_one_has_generic_point() {
        let r = CatalogSpace::new(CatalogTag::OmegaPlusOneScott, 10).sobriety_search();
        assert!(r.witness.is_none());
        assert!(r.note.contains("omega"));
    }

    #[test]
    fn ladder_bottoms_are_incomparable() {
        let c = CatalogSpace::new(CatalogTag::TwoBottomLadder, 5);
        assert!(!c.ladder_le(BOT1, BOT2) && !c.ladder_le(BOT2, BOT1));
        assert!(c.ladder_le(BOT1, rung(3)) && c.ladder_le(rung(3), rung(1)));
        assert!(!c.ladder_le(rung(1), rung(3)));
        assert_eq!(c.intersection_witness(BOT1, BOT2), None);
    }

    #[test]
    fn truncations_are_finite_spaces() {
        let s = CatalogSpace::new(CatalogTag::Sierpinski, 1).to_finite();
        assert!(s.same_topology(&FiniteSpace::sierpinski()));
        let p = CatalogSpace::new(CatalogTag::PowersetTrunc(2), 0).to_finite();
        assert!(p.homeomorphism(&FiniteSpace::powerset(2)).is_some());
        let l = CatalogSpace::new(CatalogTag::TwoBottomLadder, 4).to_finite();
        assert!(l.is_t0());
    }
}
