//! JSON file formats.

use std::collections::BTreeSet;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::catalog::{CatalogSpace, CatalogTag};
use crate::domains::{FinPoset, Pi02Presentation};
use crate::error::{QtopError, Result};
use crate::games::ChainArena;
use crate::pointset::PointSet;
use crate::quasimetric::QMetric;
use crate::rat::Rat;
use crate::representations::{fixture, FTables, PrefixFun, RTable, Seq};
use crate::space::FiniteSpace;

/// `{"points": [..], "opens": [[..], ..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub points: Vec<String>,
    pub opens: Vec<Vec<usize>>,
}

impl SpaceFile {
    pub fn from_space(s: &FiniteSpace) -> SpaceFile {
        SpaceFile { points: s.labels().to_vec(), opens: s.opens().iter().map(|o| o.to_vec()).collect() }
    }

    pub fn to_space(&self) -> Result<FiniteSpace> {
        let n = self.points.len();
        let opens = self
            .opens
            .iter()
            .map(|o| match o.iter().find(|&&p| p >= n) {
                Some(&p) => Err(QtopError::BadPoint(p)),
                None => Ok(o.iter().copied().collect()),
            })
            .collect::<Result<Vec<PointSet>>>()?;
        FiniteSpace::from_opens(self.points.clone(), opens)
    }
}

/// `{"points": [..], "table": [["p/q", ..], ..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricFile {
    pub points: Vec<String>,
    pub table: Vec<Vec<Rat>>,
}

impl MetricFile {
    pub fn from_metric(d: &QMetric) -> MetricFile {
        MetricFile { points: d.labels.clone(), table: d.table.clone() }
    }

    pub fn to_metric(&self) -> Result<QMetric> {
        QMetric::new(self.points.clone(), self.table.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEntry {
    #[serde(rename = "U")]
    pub u: Vec<usize>,
    /// The closed `A` of a `Π⁰₂` pair or the inner open `V` of a `Σ⁰₂` pair.
    #[serde(rename = "A", alias = "V")]
    pub a: Vec<usize>,
}

/// `{"pairs": [{"U": [..], "A": [..]}, ..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairsFile {
    pub pairs: Vec<PairEntry>,
}

impl PairsFile {
    pub fn to_sets(&self) -> Vec<(PointSet, PointSet)> {
        self.pairs.iter().map(|p| (p.u.iter().copied().collect(), p.a.iter().copied().collect())).collect()
    }
}

/// A game arena: a symbolic chain or a finite space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArenaFile {
    Chain { arena: String, depth: usize },
    Finite(SpaceFile),
}

pub enum LoadedArena {
    Chain(ChainArena),
    Finite(FiniteSpace),
}

pub const CHAIN_ARENAS: &[&str] = &["omega-plus-one-scott", "omega-plus-one-alexandroff", "omega-scott"];

impl ArenaFile {
    pub fn load(&self) -> Result<LoadedArena> {
        match self {
            ArenaFile::Finite(s) => Ok(LoadedArena::Finite(s.to_space()?)),
            ArenaFile::Chain { arena, depth } => Ok(LoadedArena::Chain(match arena.as_str() {
                "omega-plus-one-scott" => ChainArena::omega_plus_one_scott(*depth),
                "omega-plus-one-alexandroff" => ChainArena::omega_plus_one_alexandroff(*depth),
                "omega-scott" => ChainArena::omega_scott(*depth),
                other => return Err(QtopError::Parse(format!("unknown arena {other:?}; expected one of {CHAIN_ARENAS:?}"))),
            })),
        }
    }
}

/// Named finite spaces, including truncated catalog spaces.
pub fn named_space(name: &str, depth: usize) -> Result<FiniteSpace> {
    Ok(match name {
        "sierpinski" => FiniteSpace::sierpinski(),
        "powerset2" => FiniteSpace::powerset(2),
        "powerset3" => FiniteSpace::powerset(3),
        "omega-plus-one-scott" => CatalogSpace::new(CatalogTag::OmegaPlusOneScott, depth).to_finite(),
        "omega-plus-one-alexandroff" => CatalogSpace::new(CatalogTag::OmegaPlusOneAlexandroff, depth).to_finite(),
        "omega-scott" => CatalogSpace::new(CatalogTag::OmegaScott, depth).to_finite(),
        "two-bottom-ladder" => CatalogSpace::new(CatalogTag::TwoBottomLadder, depth).to_finite(),
        other => return Err(QtopError::Parse(format!("unknown space {other:?}"))),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixValue {
    pub prefix: Seq,
    pub value: BTreeSet<u64>,
}

/// A function table: a named fixture or explicit prefix values, with an
/// optional `r` table (default: Cantor unpairing, 4096 entries).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionFile {
    pub alphabet: u64,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<PrefixValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<u64>>,
}

impl FunctionFile {
    pub fn load(&self, depth: Option<usize>) -> Result<(PrefixFun, RTable)> {
        let depth = depth.unwrap_or(self.depth);
        let f = match &self.fixture {
            Some(name) => fixture(name, self.alphabet, depth)?,
            None => {
                let mut f = PrefixFun { alphabet: self.alphabet, depth, values: Default::default() };
                for pv in &self.values {
                    if pv.prefix.len() <= depth {
                        f.values.insert(pv.prefix.clone(), pv.value.clone());
                    }
                }
                f
            }
        };
        let r = self.r.clone().map_or_else(|| RTable::cantor(4096), |values| RTable { values });
        Ok((f, r))
    }
}

/// Tables for the family check: explicit, or built from a finite space
/// through its neighbourhood surjection.  The family is an index set or a
/// point whose filter is checked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FCheckFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tables: Option<FTables>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<BTreeSet<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<usize>,
}

/// `{"arena": .., "p1": [..], "p2": [..], "rounds": N, "seeds": [..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TournamentFile {
    pub arena: ArenaFile,
    pub p1: Vec<String>,
    pub p2: Vec<String>,
    pub rounds: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

pub fn parse<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| QtopError::Parse(format!("{what}: line {} column {}: {e}", e.line(), e.column())))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| QtopError::Io(format!("{}: {e}", path.display())))?;
    parse(&text, &path.display().to_string())
}

pub fn load_space(path: &Path) -> Result<FiniteSpace> {
    read_json::<SpaceFile>(path)?
        .to_space()
        .map_err(|e| QtopError::Parse(format!("{}: {e}", path.display())))
}

pub fn load_metric(path: &Path) -> Result<QMetric> {
    read_json::<MetricFile>(path)?.to_metric()
}

pub fn load_poset(path: &Path) -> Result<FinPoset> {
    let p: FinPoset = read_json(path)?;
    FinPoset::new(p.elements, p.le)
}

pub fn load_presentation(path: &Path) -> Result<Pi02Presentation> {
    let p: Pi02Presentation = read_json(path)?;
    p.validate()?;
    Ok(p)
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report types serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_round_trip() {
        let s = FiniteSpace::powerset(2);
        let f = SpaceFile::from_space(&s);
        let back: SpaceFile = parse(&to_json(&f), "space").unwrap();
        assert!(back.to_space().unwrap().same_topology(&s));
    }

    #[test]
    fn corrupted_space_names_axiom() {
        let text = r#"{"points": ["a", "b", "c"], "opens": [[], [0, 1, 2], [0], [1]]}"#;
        let err = parse::<SpaceFile>(text, "s").unwrap().to_space().unwrap_err();
        assert!(err.to_string().contains("union"), "{err}");
        assert!(parse::<SpaceFile>("{\"points\": [", "s").is_err());
    }

    #[test]
    fn metric_strings() {
        let text = r#"{"points": ["x", "y"], "table": [["0", "1/2"], ["1", "0"]]}"#;
        let d = parse::<MetricFile>(text, "m").unwrap().to_metric().unwrap();
        assert_eq!(d.d(0, 1), &Rat::frac(1, 2));
        let back: MetricFile = parse(&to_json(&MetricFile::from_metric(&d)), "m").unwrap();
        assert_eq!(back.to_metric().unwrap(), d);
    }

    #[test]
    fn presentation_and_arena_shapes() {
        let text = r#"{"pairs": [{"U": [[0]], "V": [[0, 1]]}], "depth": 3}"#;
        let p: Pi02Presentation = parse(text, "p").unwrap();
        assert!(p.contains(0b11) && !p.contains(0b01));
        let a: ArenaFile = parse(r#"{"arena": "omega-scott", "depth": 5}"#, "a").unwrap();
        assert!(matches!(a.load(), Ok(LoadedArena::Chain(_))));
        let f: ArenaFile = parse(r#"{"points": ["0", "1"], "opens": [[], [1], [0, 1]]}"#, "a").unwrap();
        assert!(matches!(f.load(), Ok(LoadedArena::Finite(_))));
    }

    #[test]
    fn function_file_fixture() {
        let f: FunctionFile = parse(r#"{"alphabet": 4, "depth": 3, "fixture": "delta"}"#, "f").unwrap();
        let (pf, r) = f.load(Some(2)).unwrap();
        assert_eq!(pf.depth, 2);
        assert_eq!(r.values.len(), 4096);
    }
}
