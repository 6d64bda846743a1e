//! Scenario registry: the lattice, generator and glue data for the three
//! built-in configurations, loaded from a documented JSON schema that is a
//! direct transcription of the intersection tables and generator matrices.
//! User scenarios use the same schema from a file path.

use crate::birgroup::{bir_criterion, BirCriterionConfig, MovMode};
use crate::chambers::{Chamber, ChamberGraph, SliceShape};
use crate::cubicsurface::PairScenario;
use crate::fqgeom::{FpPoly, FqError, ScrollSpec};
use crate::geom::{Interval, Polygon};
use crate::isometry::{is_isometry, word_eval, GeneratorTable, Isometry};
use crate::lattice::{abel_jacobi, GramLattice, IntersectionLattice};
use crate::matrix::{IMat, IVec, Int, Rat};
use crate::walls::{WallDivisor, WallKind};
use num::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unknown scenario {0:?} (built-ins: c12, syz, nonsyz)")]
    Unknown(String),
    #[error("scenario file error: {0}")]
    Format(String),
    #[error("lattice validation failed: {0}")]
    Lattice(String),
    #[error("generator {0:?} is not an isometry")]
    BadGenerator(String),
    #[error("involution {0:?} failed validation: {1}")]
    BadInvolution(String, String),
    #[error("glue subgroup is not index two: {0}")]
    BadGlue(String),
    #[error(transparent)]
    Fq(#[from] FqError),
}

/// Golden expectations carried by a scenario for exit-code gating.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct Expected {
    #[serde(default)]
    pub census_classes: Option<usize>,
    #[serde(default)]
    pub nef_walls: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub discriminant_factors: Option<Vec<i64>>,
    #[serde(default)]
    pub represents_minus_two: Option<String>,
    #[serde(default)]
    pub flop_delta_orbits: Option<usize>,
    #[serde(default)]
    pub pex_delta_orbits: Option<usize>,
    #[serde(default)]
    pub square_six_orbits: Option<usize>,
    #[serde(default)]
    pub relator_free_length: Option<usize>,
    #[serde(default)]
    pub relator_length_six: Option<bool>,
    #[serde(default)]
    pub second_fano_sweep_empty: Option<bool>,
}

#[derive(Deserialize)]
struct InvolutionSpec {
    name: String,
    word: Vec<String>,
    fixed: Vec<i64>,
}

#[derive(Deserialize)]
struct ScenarioFile {
    name: String,
    #[serde(default)]
    description: String,
    #[serde(default)]
    tau: Option<i64>,
    mov_mode: String,
    intersection_gram: Vec<Vec<i64>>,
    eta_index: usize,
    #[serde(default)]
    intersection_labels: Vec<String>,
    basis_labels: Vec<String>,
    glue_gens: Vec<Vec<String>>,
    generators: BTreeMap<String, Vec<Vec<i64>>>,
    involutions: Vec<InvolutionSpec>,
    #[serde(default)]
    expected: Option<Expected>,
}

/// A fully validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub tau: Option<i64>,
    pub lattice: GramLattice,
    pub intersection: IntersectionLattice,
    pub generators: GeneratorTable,
    /// Involution generators of the birational group, in name order.
    pub involutions: Vec<(String, Isometry)>,
    pub involution_fixed: Vec<(String, IVec)>,
    pub mov_mode: MovMode,
    pub expected: Option<Expected>,
    /// Raw JSON this scenario was loaded from (cache key material).
    pub source: String,
}

pub fn parse_rational(s: &str) -> Result<Rat, ScenarioError> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: i64 = num
        .parse()
        .map_err(|_| ScenarioError::Format(format!("bad rational {s:?}")))?;
    let d: i64 = den
        .parse()
        .map_err(|_| ScenarioError::Format(format!("bad rational {s:?}")))?;
    if d == 0 {
        return Err(ScenarioError::Format(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(Int::from(n), Int::from(d)))
}

impl Scenario {
    pub fn builtin_names() -> &'static [&'static str] {
        &["c12", "syz", "nonsyz"]
    }

    pub fn builtin(name: &str) -> Result<Scenario, ScenarioError> {
        let src = match name {
            "c12" => include_str!("../data/c12.json"),
            "syz" => include_str!("../data/syz.json"),
            "nonsyz" => include_str!("../data/nonsyz.json"),
            other => return Err(ScenarioError::Unknown(other.to_string())),
        };
        Scenario::from_json(src)
    }

    pub fn from_json(src: &str) -> Result<Scenario, ScenarioError> {
        let file: ScenarioFile =
            serde_json::from_str(src).map_err(|e| ScenarioError::Format(e.to_string()))?;
        let mov_mode = match file.mov_mode.as_str() {
            "round_pos" => MovMode::RoundPos,
            "pex_bounded" => MovMode::PexBounded,
            other => {
                return Err(ScenarioError::Format(format!(
                    "mov_mode must be round_pos or pex_bounded, got {other:?}"
                )))
            }
        };
        let square = |rows: &Vec<Vec<i64>>, what: &str| -> Result<(), ScenarioError> {
            let n = rows.len();
            if n == 0 || rows.iter().any(|r| r.len() != n) {
                return Err(ScenarioError::Format(format!("{what} must be a square matrix")));
            }
            Ok(())
        };
        square(&file.intersection_gram, "intersection_gram")?;
        let igram = IMat::from_rows(&file.intersection_gram);
        let ilabels = if file.intersection_labels.is_empty() {
            (0..igram.rows).map(|i| format!("a{i}")).collect()
        } else {
            file.intersection_labels.clone()
        };
        let intersection = IntersectionLattice::new(igram, file.eta_index, ilabels)
            .map_err(|e| ScenarioError::Lattice(e.to_string()))?;
        let base = abel_jacobi(&intersection).map_err(|e| ScenarioError::Lattice(e.to_string()))?;
        let glue: Result<Vec<Vec<Rat>>, ScenarioError> = file
            .glue_gens
            .iter()
            .map(|row| row.iter().map(|s| parse_rational(s)).collect())
            .collect();
        let lattice = GramLattice::new(base.gram, file.basis_labels.clone(), base.ample, glue?)
            .map_err(|e| ScenarioError::Lattice(e.to_string()))?;
        let mut generators = GeneratorTable::new();
        for (gname, rows) in &file.generators {
            square(rows, gname)?;
            let m = IMat::from_rows(rows);
            if !is_isometry(&lattice, &m) {
                return Err(ScenarioError::BadGenerator(gname.clone()));
            }
            generators.insert(gname, Isometry::from_matrix(m));
        }
        let cfg = BirCriterionConfig {
            glue_gens: lattice.glue_gens.clone(),
            mov_mode,
            witness: lattice.ample.clone(),
        };
        cfg.validate(&lattice)
            .map_err(|e| ScenarioError::BadGlue(e.to_string()))?;
        let mut involutions = Vec::new();
        let mut involution_fixed = Vec::new();
        for spec in &file.involutions {
            let iso = word_eval(&generators, &spec.word)
                .map_err(|e| ScenarioError::BadInvolution(spec.name.clone(), e.to_string()))?;
            if !iso.compose(&iso).is_identity() {
                return Err(ScenarioError::BadInvolution(
                    spec.name.clone(),
                    "word does not square to the identity".into(),
                ));
            }
            let fixed: IVec = spec.fixed.iter().map(|&x| Int::from(x)).collect();
            if iso.apply(&fixed) != fixed {
                return Err(ScenarioError::BadInvolution(
                    spec.name.clone(),
                    "word does not fix the configured vector".into(),
                ));
            }
            if !bir_criterion(&lattice, &cfg, &iso) {
                return Err(ScenarioError::BadInvolution(
                    spec.name.clone(),
                    "word fails the birational criterion".into(),
                ));
            }
            involutions.push((spec.name.clone(), iso));
            involution_fixed.push((spec.name.clone(), fixed));
        }
        involutions.sort_by(|a, b| a.0.cmp(&b.0));
        involution_fixed.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Scenario {
            name: file.name,
            description: file.description,
            tau: file.tau,
            lattice,
            intersection,
            generators,
            involutions,
            involution_fixed,
            mov_mode,
            expected: file.expected,
            source: src.to_string(),
        })
    }

    pub fn bir_config(&self) -> BirCriterionConfig {
        BirCriterionConfig {
            glue_gens: self.lattice.glue_gens.clone(),
            mov_mode: self.mov_mode,
            witness: self.lattice.ample.clone(),
        }
    }

    pub fn pair_scenario(&self) -> Option<PairScenario> {
        match self.tau {
            Some(3) => Some(PairScenario::Syzygetic),
            Some(1) => Some(PairScenario::NonSyzygetic),
            _ => None,
        }
    }
}

/// One scroll of an appendix example: either a 2x3 matrix of linear forms or
/// a direct triple of quadrics, plus the hyperplane the scroll spans.
///
/// The quadrics alone cut out the cone over the scroll in the ambient
/// projective space; the scroll itself is their intersection with the
/// hyperplane.
#[derive(Clone, Debug)]
pub struct AppendixScroll {
    pub name: String,
    pub quadrics: Vec<FpPoly>,
    pub hyperplane: usize,
}

impl AppendixScroll {
    /// Full defining system of the scroll surface: the quadrics together
    /// with the hyperplane form.
    pub fn system(&self, data: &AppendixData) -> Vec<FpPoly> {
        let mut polys = self.quadrics.clone();
        polys.push(data.hyperplanes[self.hyperplane].clone());
        polys
    }
}

/// Transcription of one explicit example: the cubic fourfold, its special
/// hyperplanes, the scroll ideals and the expected intersection points.
#[derive(Clone, Debug)]
pub struct AppendixData {
    pub name: String,
    pub prime: u64,
    pub nvars: usize,
    pub cubic: FpPoly,
    pub hyperplanes: Vec<FpPoly>,
    pub scrolls: Vec<AppendixScroll>,
    /// (scroll name, scroll name, expected points as raw coordinates).
    pub intersections: Vec<(String, String, Vec<Vec<u64>>)>,
    pub scroll_point_count: usize,
    pub max_nodes: usize,
}

#[derive(Deserialize)]
struct AppendixScrollFile {
    name: String,
    #[serde(default)]
    matrix: Option<Vec<Vec<String>>>,
    #[serde(default)]
    quadrics: Option<Vec<String>>,
    hyperplane: usize,
}

#[derive(Deserialize)]
struct AppendixFile {
    name: String,
    prime: u64,
    nvars: usize,
    cubic: String,
    hyperplanes: Vec<String>,
    scrolls: Vec<AppendixScrollFile>,
    intersections: Vec<AppendixIntersectionFile>,
    scroll_point_count: usize,
    max_nodes: usize,
}

#[derive(Deserialize)]
struct AppendixIntersectionFile {
    scrolls: Vec<String>,
    points: Vec<Vec<u64>>,
}

impl AppendixData {
    pub fn builtin(name: &str, prime_override: Option<u64>) -> Result<AppendixData, ScenarioError> {
        let src = match name {
            "syz" => include_str!("../data/appendix_syz.json"),
            "nonsyz" => include_str!("../data/appendix_nonsyz.json"),
            other => return Err(ScenarioError::Unknown(other.to_string())),
        };
        AppendixData::from_json(src, prime_override)
    }

    pub fn from_json(
        src: &str,
        prime_override: Option<u64>,
    ) -> Result<AppendixData, ScenarioError> {
        let file: AppendixFile =
            serde_json::from_str(src).map_err(|e| ScenarioError::Format(e.to_string()))?;
        let p = prime_override.unwrap_or(file.prime);
        let n = file.nvars;
        let cubic = FpPoly::parse(&file.cubic, p, n)?;
        let hyperplanes: Result<Vec<FpPoly>, FqError> = file
            .hyperplanes
            .iter()
            .map(|h| FpPoly::parse(h, p, n))
            .collect();
        let mut scrolls = Vec::new();
        for s in &file.scrolls {
            let quadrics: Vec<FpPoly> = match (&s.matrix, &s.quadrics) {
                (Some(rows), None) => {
                    if rows.len() != 2 || rows.iter().any(|r| r.len() != 3) {
                        return Err(ScenarioError::Format(format!(
                            "scroll {:?} matrix must be 2x3",
                            s.name
                        )));
                    }
                    let parse_row = |r: &Vec<String>| -> Result<Vec<FpPoly>, FqError> {
                        r.iter().map(|e| FpPoly::parse(e, p, n)).collect()
                    };
                    let r0 = parse_row(&rows[0])?;
                    let r1 = parse_row(&rows[1])?;
                    let spec = ScrollSpec::new([
                        [r0[0].clone(), r0[1].clone(), r0[2].clone()],
                        [r1[0].clone(), r1[1].clone(), r1[2].clone()],
                    ])?;
                    crate::fqgeom::minors_ideal(&spec)?.to_vec()
                }
                (None, Some(qs)) => {
                    let parsed: Result<Vec<FpPoly>, FqError> =
                        qs.iter().map(|q| FpPoly::parse(q, p, n)).collect();
                    parsed?
                }
                _ => {
                    return Err(ScenarioError::Format(format!(
                        "scroll {:?} needs exactly one of matrix / quadrics",
                        s.name
                    )))
                }
            };
            scrolls.push(AppendixScroll {
                name: s.name.clone(),
                quadrics,
                hyperplane: s.hyperplane,
            });
        }
        let intersections = file
            .intersections
            .iter()
            .map(|i| {
                if i.scrolls.len() != 2 {
                    return Err(ScenarioError::Format(
                        "intersections must name exactly two scrolls".into(),
                    ));
                }
                Ok((i.scrolls[0].clone(), i.scrolls[1].clone(), i.points.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AppendixData {
            name: file.name,
            prime: p,
            nvars: n,
            cubic,
            hyperplanes: hyperplanes?,
            scrolls,
            intersections,
            scroll_point_count: file.scroll_point_count,
            max_nodes: file.max_nodes,
        })
    }

    pub fn scroll(&self, name: &str) -> Option<&AppendixScroll> {
        self.scrolls.iter().find(|s| s.name == name)
    }

    /// True when the configured exact expectations (point lists, counts)
    /// apply: they are stated for the shipped prime only.
    pub fn exact_expectations(&self, file_prime: u64) -> bool {
        self.prime == file_prime
    }
}

// --- serializable chamber-graph mirror for the on-disk cache ---

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct GraphDto {
    pub nodes: Vec<NodeDto>,
    pub edges: Vec<EdgeDto>,
    pub classes: Vec<ClassDto>,
    pub node_class: Vec<usize>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct NodeDto {
    pub facets: Vec<FacetDto>,
    pub rays: Vec<Vec<i64>>,
    pub interior: Vec<i64>,
    pub label: Option<String>,
    pub shape: ShapeDto,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct FacetDto {
    pub vector: Vec<i64>,
    pub kind: WallKind,
    pub sign: i8,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub enum ShapeDto {
    Poly(Vec<[String; 2]>),
    Seg([String; 2]),
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct EdgeDto {
    pub from: usize,
    pub to: usize,
    pub wall: Vec<i64>,
    pub kind: WallKind,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct ClassDto {
    pub rep: usize,
    pub members: Vec<(usize, Vec<Vec<i64>>)>,
}

fn int_to_i64(x: &Int) -> Result<i64, ScenarioError> {
    i64::try_from(x).map_err(|_| ScenarioError::Format("coordinate exceeds i64".into()))
}

fn rat_to_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn graph_to_dto(g: &ChamberGraph) -> Result<GraphDto, ScenarioError> {
    let nodes = g
        .nodes
        .iter()
        .map(|c| {
            let facets = c
                .facets
                .iter()
                .map(|(w, s)| {
                    Ok(FacetDto {
                        vector: w.vector.iter().map(int_to_i64).collect::<Result<_, _>>()?,
                        kind: w.kind,
                        sign: *s,
                    })
                })
                .collect::<Result<Vec<_>, ScenarioError>>()?;
            let rays = c
                .rays
                .iter()
                .map(|r| r.iter().map(int_to_i64).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            let interior = c
                .interior
                .iter()
                .map(int_to_i64)
                .collect::<Result<_, _>>()?;
            let shape = match &c.shape {
                SliceShape::Poly(p) => ShapeDto::Poly(
                    p.vertices
                        .iter()
                        .map(|v| [rat_to_string(&v[0]), rat_to_string(&v[1])])
                        .collect(),
                ),
                SliceShape::Seg(s) => ShapeDto::Seg([rat_to_string(&s.lo), rat_to_string(&s.hi)]),
            };
            Ok(NodeDto {
                facets,
                rays,
                interior,
                label: c.label.clone(),
                shape,
            })
        })
        .collect::<Result<Vec<_>, ScenarioError>>()?;
    let edges = g
        .edges
        .iter()
        .map(|e| {
            Ok(EdgeDto {
                from: e.from,
                to: e.to,
                wall: e
                    .wall
                    .vector
                    .iter()
                    .map(int_to_i64)
                    .collect::<Result<_, _>>()?,
                kind: e.wall.kind,
            })
        })
        .collect::<Result<Vec<_>, ScenarioError>>()?;
    let classes = g
        .classes
        .iter()
        .map(|c| {
            let members = c
                .members
                .iter()
                .map(|(idx, iso)| {
                    let rows = (0..iso.matrix.rows)
                        .map(|i| {
                            iso.matrix
                                .row(i)
                                .iter()
                                .map(int_to_i64)
                                .collect::<Result<Vec<_>, _>>()
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok((*idx, rows))
                })
                .collect::<Result<Vec<_>, ScenarioError>>()?;
            Ok(ClassDto {
                rep: c.rep,
                members,
            })
        })
        .collect::<Result<Vec<_>, ScenarioError>>()?;
    Ok(GraphDto {
        nodes,
        edges,
        classes,
        node_class: g.node_class.clone(),
    })
}

pub fn dto_to_graph(dto: &GraphDto) -> Result<ChamberGraph, ScenarioError> {
    let parse_rat = |s: &str| -> Result<Rat, ScenarioError> { parse_rational(s) };
    let nodes = dto
        .nodes
        .iter()
        .map(|n| {
            let facets = n
                .facets
                .iter()
                .map(|f| {
                    (
                        WallDivisor {
                            vector: f.vector.iter().map(|&x| Int::from(x)).collect(),
                            kind: f.kind,
                        },
                        f.sign,
                    )
                })
                .collect();
            let rays = n
                .rays
                .iter()
                .map(|r| r.iter().map(|&x| Int::from(x)).collect())
                .collect();
            let interior = n.interior.iter().map(|&x| Int::from(x)).collect();
            let shape = match &n.shape {
                ShapeDto::Poly(verts) => {
                    let vertices = verts
                        .iter()
                        .map(|v| Ok([parse_rat(&v[0])?, parse_rat(&v[1])?]))
                        .collect::<Result<Vec<_>, ScenarioError>>()?;
                    SliceShape::Poly(Polygon { vertices })
                }
                ShapeDto::Seg(s) => SliceShape::Seg(Interval {
                    lo: parse_rat(&s[0])?,
                    hi: parse_rat(&s[1])?,
                }),
            };
            Ok(Chamber {
                facets,
                rays,
                interior,
                label: n.label.clone(),
                shape,
            })
        })
        .collect::<Result<Vec<_>, ScenarioError>>()?;
    let edges = dto
        .edges
        .iter()
        .map(|e| crate::chambers::CensusEdge {
            from: e.from,
            to: e.to,
            wall: WallDivisor {
                vector: e.wall.iter().map(|&x| Int::from(x)).collect(),
                kind: e.kind,
            },
        })
        .collect();
    let classes = dto
        .classes
        .iter()
        .map(|c| crate::chambers::CensusClass {
            rep: c.rep,
            members: c
                .members
                .iter()
                .map(|(idx, rows)| {
                    let mat = IMat::from_rows(rows);
                    (*idx, Isometry::from_matrix(mat))
                })
                .collect(),
        })
        .collect();
    Ok(ChamberGraph {
        nodes,
        edges,
        classes,
        node_class: dto.node_class.clone(),
    })
}

/// Quadratic-form value q(g, g) of the polarization; used by the CLI to
/// interpret slice levels.
pub fn polarization_square(l: &GramLattice) -> Int {
    crate::lattice::gram_eval(l, &l.ample, &l.ample).expect("validated lattice")
}

pub fn rational_is_integral(r: &Rat) -> bool {
    r.denom().is_one()
}

pub fn rat_zero() -> Rat {
    Rat::zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ivec;

    #[test]
    fn builtins_load_and_validate() {
        for name in Scenario::builtin_names() {
            let sc = Scenario::builtin(name).unwrap();
            assert_eq!(&sc.name, name);
            assert!(!sc.involutions.is_empty());
        }
    }

    #[test]
    fn c12_scenario_details() {
        let sc = Scenario::builtin("c12").unwrap();
        assert_eq!(sc.lattice.rank, 2);
        assert_eq!(sc.lattice.gram, IMat::from_rows(&[vec![6, 0], vec![0, -4]]));
        assert_eq!(sc.mov_mode, MovMode::RoundPos);
        // iota1 = R1 R2 R1 as a matrix
        let iota1 = &sc.involutions.iter().find(|(n, _)| n == "iota1").unwrap().1;
        assert_eq!(iota1.matrix, IMat::from_rows(&[vec![5, 4], vec![-6, -5]]));
        assert_eq!(iota1.apply(&ivec(&[1, -1])), ivec(&[1, -1]));
    }

    #[test]
    fn syz_scenario_details() {
        let sc = Scenario::builtin("syz").unwrap();
        assert_eq!(sc.lattice.rank, 3);
        assert_eq!(sc.mov_mode, MovMode::PexBounded);
        assert_eq!(sc.pair_scenario(), Some(PairScenario::Syzygetic));
        assert_eq!(sc.involutions.len(), 4);
    }

    #[test]
    fn nonsyz_involutions_fix_their_vectors() {
        let sc = Scenario::builtin("nonsyz").unwrap();
        assert_eq!(sc.involutions.len(), 6);
        for ((name, iso), (name2, fixed)) in sc.involutions.iter().zip(&sc.involution_fixed) {
            assert_eq!(name, name2);
            assert_eq!(&iso.apply(fixed), fixed, "{name} must fix {fixed:?}");
            assert!(iso.compose(iso).is_identity());
        }
    }

    #[test]
    fn unknown_scenario_and_bad_json() {
        assert!(matches!(
            Scenario::builtin("zzz"),
            Err(ScenarioError::Unknown(_))
        ));
        assert!(Scenario::from_json("{").is_err());
    }

    #[test]
    fn glue_subgroup_must_have_index_two() {
        // replacing g/3 by g/6 generates the full discriminant group
        let src = Scenario::builtin("c12").unwrap().source;
        let bad = src.replace("[\"1/3\", \"0\"]", "[\"1/6\", \"0\"]");
        assert!(matches!(
            Scenario::from_json(&bad),
            Err(ScenarioError::BadGlue(_))
        ));
        // a word that is not an involution is rejected
        let bad = src.replace(
            "\"word\": [\"R1\", \"R2\", \"R1\"]",
            "\"word\": [\"R1\", \"R2\"]",
        );
        assert!(matches!(
            Scenario::from_json(&bad),
            Err(ScenarioError::BadInvolution(_, _))
        ));
        // ragged generator matrices are rejected cleanly
        let bad = src.replace("\"R1\": [[1, 0], [0, -1]]", "\"R1\": [[1, 0], [0]]");
        assert!(matches!(
            Scenario::from_json(&bad),
            Err(ScenarioError::Format(_))
        ));
    }

    #[test]
    fn appendix_data_loads() {
        let a = AppendixData::builtin("syz", None).unwrap();
        assert_eq!(a.prime, 29);
        assert_eq!(a.scrolls.len(), 2);
        assert_eq!(a.scrolls[0].quadrics.len(), 3);
        let b = AppendixData::builtin("nonsyz", None).unwrap();
        assert_eq!(b.scrolls.len(), 3);
        assert_eq!(b.intersections.len(), 3);
        // prime override re-parses every polynomial
        let c = AppendixData::builtin("syz", Some(7)).unwrap();
        assert_eq!(c.prime, 7);
        assert!(c.cubic.terms.iter().all(|(_, coeff)| *coeff < 7));
    }
}
