//! JSON documents for graphs, morphisms and profiles, and DOT export.
//!
//! Maps keyed by ids serialize as JSON objects with decimal string keys;
//! every collection is emitted in ascending id order, so emitting the same
//! value twice gives the same bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result, Violation};
use crate::graph::{AGraph, FlagId, Vertex, VertexId};
use crate::isogeny::VarietyProfile;
use crate::morphism::{CombinatorialMorphism, Contraction};
use crate::pullback::MarkedMorphism;
use crate::semigroup::{LinearForm, MonoidElement, MonoidHom};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub id: VertexId,
    #[serde(default)]
    pub genus: u32,
    #[serde(default)]
    pub class: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    /// Rank of the class monoid; inferred from the first vertex when absent.
    #[serde(default)]
    pub rank: Option<usize>,
    pub flags: Vec<FlagId>,
    pub vertices: Vec<VertexDoc>,
    pub boundary: BTreeMap<FlagId, VertexId>,
    pub involution: BTreeMap<FlagId, FlagId>,
}

impl From<&AGraph> for GraphDoc {
    fn from(g: &AGraph) -> Self {
        GraphDoc {
            rank: Some(g.rank()),
            flags: g.flag_ids().collect(),
            vertices: g
                .vertices()
                .map(|(id, v)| VertexDoc {
                    id,
                    genus: v.genus,
                    class: v.class.coords().to_vec(),
                })
                .collect(),
            boundary: g.boundary_map(),
            involution: g.involution_map(),
        }
    }
}

impl GraphDoc {
    pub fn to_graph(&self) -> Result<AGraph> {
        let rank = self
            .rank
            .unwrap_or_else(|| self.vertices.first().map_or(0, |v| v.class.len()));
        let mut listed = self.flags.clone();
        listed.sort();
        let before = listed.len();
        listed.dedup();
        let mut violations = Vec::new();
        if listed.len() != before {
            violations.push(Violation::new("duplicate-id", "a flag is listed twice"));
        }
        if !listed.iter().eq(self.boundary.keys()) {
            violations.push(Violation::new(
                "flags-listed",
                "flag list and boundary map disagree",
            ));
        }
        check(violations)?;
        let vertices = self.vertices.iter().map(|v| {
            let class = if v.class.is_empty() && rank > 0 {
                MonoidElement::zero(rank)
            } else {
                MonoidElement::new(v.class.clone())
            };
            (
                v.id,
                Vertex {
                    genus: v.genus,
                    class,
                },
            )
        });
        AGraph::from_parts(rank, vertices, &self.boundary, &self.involution)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionDoc {
    pub source: GraphDoc,
    pub target: GraphDoc,
    /// Target flag to source flag.
    pub flagmap: BTreeMap<FlagId, FlagId>,
    /// Source vertex to target vertex.
    pub vertexmap: BTreeMap<VertexId, VertexId>,
}

impl From<&Contraction> for ContractionDoc {
    fn from(c: &Contraction) -> Self {
        ContractionDoc {
            source: (&c.source).into(),
            target: (&c.target).into(),
            flagmap: c.flag_map.clone(),
            vertexmap: c.vertex_map.clone(),
        }
    }
}

impl ContractionDoc {
    pub fn to_contraction(&self) -> Result<Contraction> {
        let c = Contraction {
            source: self.source.to_graph()?,
            target: self.target.to_graph()?,
            flag_map: self.flagmap.clone(),
            vertex_map: self.vertexmap.clone(),
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombinatorialDoc {
    pub source: GraphDoc,
    pub target: GraphDoc,
    /// From the target monoid to the source monoid; identity when omitted.
    #[serde(default)]
    pub hom: Option<MonoidHom>,
    pub flagmap: BTreeMap<FlagId, FlagId>,
    pub vertexmap: BTreeMap<VertexId, VertexId>,
}

impl From<&CombinatorialMorphism> for CombinatorialDoc {
    fn from(a: &CombinatorialMorphism) -> Self {
        CombinatorialDoc {
            source: (&a.source).into(),
            target: (&a.target).into(),
            hom: Some(a.hom.clone()),
            flagmap: a.flag_map.clone(),
            vertexmap: a.vertex_map.clone(),
        }
    }
}

impl CombinatorialDoc {
    pub fn to_morphism(&self) -> Result<CombinatorialMorphism> {
        let source = self.source.to_graph()?;
        let target = self.target.to_graph()?;
        let hom = match &self.hom {
            Some(h) => h.clone(),
            None if source.rank() == target.rank() => MonoidHom::identity(source.rank()),
            None => {
                return Err(Error::invalid(
                    "commor-hom",
                    "ranks differ, so the homomorphism must be given",
                ))
            }
        };
        let a = CombinatorialMorphism {
            source,
            target,
            hom,
            flag_map: self.flagmap.clone(),
            vertex_map: self.vertexmap.clone(),
        };
        a.validate()?;
        Ok(a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkedDoc {
    pub hom: MonoidHom,
    pub comb: CombinatorialDoc,
    pub contr: ContractionDoc,
}

impl From<&MarkedMorphism> for MarkedDoc {
    fn from(m: &MarkedMorphism) -> Self {
        MarkedDoc {
            hom: m.hom.clone(),
            comb: (&m.comb).into(),
            contr: (&m.contr).into(),
        }
    }
}

impl MarkedDoc {
    pub fn to_marked(&self) -> Result<MarkedMorphism> {
        let m = MarkedMorphism {
            hom: self.hom.clone(),
            comb: self.comb.to_morphism()?,
            contr: self.contr.to_contraction()?,
        };
        m.validate()?;
        Ok(m)
    }
}

/// Any morphism document, tagged by `"kind"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MorphismDoc {
    Contraction(ContractionDoc),
    Combinatorial(CombinatorialDoc),
    Marked(MarkedDoc),
}

// Buffered tagged content loses the string-to-integer map key coercion, so
// the tag is split off by hand.
impl<'de> Deserialize<'de> for MorphismDoc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let mut value = serde_json::Value::deserialize(d)?;
        let kind = value
            .as_object_mut()
            .and_then(|m| m.remove("kind"))
            .ok_or_else(|| D::Error::missing_field("kind"))?;
        let parsed = match kind.as_str() {
            Some("contraction") => serde_json::from_value(value).map(MorphismDoc::Contraction),
            Some("combinatorial") => serde_json::from_value(value).map(MorphismDoc::Combinatorial),
            Some("marked") => serde_json::from_value(value).map(MorphismDoc::Marked),
            _ => {
                return Err(D::Error::unknown_variant(
                    &kind.to_string(),
                    &["contraction", "combinatorial", "marked"],
                ))
            }
        };
        parsed.map_err(D::Error::custom)
    }
}

impl MorphismDoc {
    pub fn graphs(&self) -> Vec<&GraphDoc> {
        match self {
            MorphismDoc::Contraction(c) => vec![&c.source, &c.target],
            MorphismDoc::Combinatorial(a) => vec![&a.source, &a.target],
            MorphismDoc::Marked(m) => vec![
                &m.comb.source,
                &m.comb.target,
                &m.contr.source,
                &m.contr.target,
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDoc {
    pub dim: u32,
    pub canonical: Vec<i64>,
    pub ample: Vec<i64>,
}

impl From<&VarietyProfile> for ProfileDoc {
    fn from(p: &VarietyProfile) -> Self {
        ProfileDoc {
            dim: p.dimension,
            canonical: p.canonical.coeffs().to_vec(),
            ample: p.ample.coeffs().to_vec(),
        }
    }
}

impl ProfileDoc {
    pub fn to_profile(&self) -> Result<VarietyProfile> {
        VarietyProfile::new(
            self.dim,
            LinearForm::new(self.canonical.clone()),
            LinearForm::new(self.ample.clone()),
        )
    }
}

fn class_label(c: &MonoidElement) -> String {
    let parts: Vec<String> = c.coords().iter().map(u64::to_string).collect();
    format!("({})", parts.join(","))
}

/// Graphviz text: one node per vertex, one arc per edge, and an invisible
/// anchor node for each tail.
pub fn export_dot(g: &AGraph) -> String {
    let mut out = String::from("digraph tau {\n");
    if !g.is_empty() {
        out.push_str("  edge [dir=none];\n");
    }
    for (v, data) in g.vertices() {
        let _ = writeln!(
            out,
            "  v{} [label=\"g={},β={}\"];",
            v.0,
            data.genus,
            class_label(&data.class)
        );
    }
    for t in g.tails() {
        let _ = writeln!(out, "  s{} [shape=point, style=invis];", t.0);
        let _ = writeln!(out, "  v{} -> s{} [label=\"{}\"];", g.boundary(t).0, t.0, t.0);
    }
    for e in g.edges() {
        let _ = writeln!(
            out,
            "  v{} -> v{} [label=\"{}|{}\"];",
            g.boundary(e.lo).0,
            g.boundary(e.hi).0,
            e.lo.0,
            e.hi.0
        );
    }
    out.push_str("}\n");
    out
}
