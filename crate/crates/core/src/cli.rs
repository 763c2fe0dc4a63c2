//! Request/response layer behind the `modgraph` binary.
//!
//! Each verb reads one JSON document and produces one JSON document (or DOT
//! text for `export-dot`). Failures become a JSON error document and a
//! nonzero exit code: 2 for malformed input, 3 for domain violations, 4 when
//! a size cap is exceeded.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::canon::canonical_labeling;
use crate::error::{Error, Violation};
use crate::graph::{AGraph, FlagId, VertexId};
use crate::io::{
    export_dot, CombinatorialDoc, ContractionDoc, GraphDoc, MarkedDoc, MorphismDoc, ProfileDoc,
};
use crate::isogeny::{
    cartesian_pullback, deg_graph, dim_graph, enumerate_stable_graphs, stably_forget_tail,
    EnumerationConstraints, ExtendedIsogeny, Isogeny, VarietyProfile,
};
use crate::morphism::{contract_edges, cut_edge, glue_tails, CombinatorialMorphism};
use crate::pullback::{compose_marked, stable_pullback_in_order};
use crate::semigroup::MonoidHom;
use crate::stabilize::{pushforward, stabilize};

pub const DEFAULT_MAX_FLAGS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verb {
    Validate,
    Invariants,
    Stabilize,
    Pushforward,
    Contract,
    Cut,
    Glue,
    Forget,
    Compose,
    Pullback,
    Cartesian,
    Boundary,
    Dim,
    Deg,
    ExportDot,
}

impl Verb {
    pub const ALL: [Verb; 15] = [
        Verb::Validate,
        Verb::Invariants,
        Verb::Stabilize,
        Verb::Pushforward,
        Verb::Contract,
        Verb::Cut,
        Verb::Glue,
        Verb::Forget,
        Verb::Compose,
        Verb::Pullback,
        Verb::Cartesian,
        Verb::Boundary,
        Verb::Dim,
        Verb::Deg,
        Verb::ExportDot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Verb::Validate => "validate",
            Verb::Invariants => "invariants",
            Verb::Stabilize => "stabilize",
            Verb::Pushforward => "pushforward",
            Verb::Contract => "contract",
            Verb::Cut => "cut",
            Verb::Glue => "glue",
            Verb::Forget => "forget",
            Verb::Compose => "compose",
            Verb::Pullback => "pullback",
            Verb::Cartesian => "cartesian",
            Verb::Boundary => "boundary",
            Verb::Dim => "dim",
            Verb::Deg => "deg",
            Verb::ExportDot => "export-dot",
        }
    }
}

impl fmt::Display for Verb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Verb {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Verb::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown verb {s:?}"))
    }
}

#[derive(Clone, Debug)]
pub struct CommandRequest {
    pub verb: Verb,
    pub payload: String,
    /// A built-in profile name or the text of a profile document.
    pub profile: Option<ProfileSource>,
    pub max_flags: usize,
}

#[derive(Clone, Debug)]
pub enum ProfileSource {
    Named(String),
    Document(String),
}

impl ProfileSource {
    fn resolve(&self) -> Result<VarietyProfile, CliError> {
        match self {
            ProfileSource::Named(n) => VarietyProfile::named(n)
                .ok_or_else(|| CliError::schema(format!("unknown profile {n:?}"))),
            ProfileSource::Document(text) => Ok(parse::<ProfileDoc>(text)?.to_profile()?),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandOutput {
    pub text: String,
    pub code: i32,
}

#[derive(Debug)]
pub struct CliError {
    code: i32,
    kind: &'static str,
    message: String,
    violations: Vec<Violation>,
}

impl CliError {
    fn schema(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            kind: "schema",
            message: message.into(),
            violations: Vec::new(),
        }
    }

    fn to_json(&self) -> Value {
        let violations: Vec<Value> = self
            .violations
            .iter()
            .map(|v| json!({"condition": v.condition, "detail": v.detail}))
            .collect();
        json!({"error": {"kind": self.kind, "message": self.message, "violations": violations}})
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (code, kind) = match e {
            Error::SizeCap { .. } => (4, "size-cap"),
            _ => (3, "domain"),
        };
        CliError {
            code,
            kind,
            message: e.to_string(),
            violations: e.violations().to_vec(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::schema(e.to_string())
    }
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    Ok(serde_json::from_str(text)?)
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value");
    s.push('\n');
    s
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

pub fn run(req: &CommandRequest) -> CommandOutput {
    match dispatch(req) {
        Ok(Reply::Json(v)) => CommandOutput {
            text: render(&v),
            code: 0,
        },
        Ok(Reply::Text(text)) => CommandOutput { text, code: 0 },
        Err(e) => CommandOutput {
            text: render(&e.to_json()),
            code: e.code,
        },
    }
}

enum Reply {
    Json(Value),
    Text(String),
}

struct Ctx<'a> {
    req: &'a CommandRequest,
}

impl Ctx<'_> {
    fn cap(&self, docs: &[&GraphDoc]) -> Result<(), CliError> {
        for d in docs {
            if d.flags.len() > self.req.max_flags {
                return Err(Error::SizeCap {
                    flags: d.flags.len(),
                    cap: self.req.max_flags,
                }
                .into());
            }
        }
        Ok(())
    }

    fn graph(&self, d: &GraphDoc) -> Result<AGraph, CliError> {
        self.cap(&[d])?;
        Ok(d.to_graph()?)
    }

    fn profile(&self) -> Result<VarietyProfile, CliError> {
        match &self.req.profile {
            Some(p) => p.resolve(),
            None => Err(CliError::schema(format!(
                "verb {} needs --profile",
                self.req.verb
            ))),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HomGraph {
    hom: MonoidHom,
    graph: GraphDoc,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeList {
    graph: GraphDoc,
    /// One flag of each edge to contract.
    edges: Vec<FlagId>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OneFlag {
    graph: GraphDoc,
    flag: FlagId,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoFlags {
    graph: GraphDoc,
    flags: [FlagId; 2],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Pair {
    first: MorphismDoc,
    second: MorphismDoc,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PullbackBundle {
    phi: ContractionDoc,
    a: CombinatorialDoc,
    #[serde(default)]
    xi: Option<MonoidHom>,
    #[serde(default)]
    rho: Option<GraphDoc>,
    /// Contraction order, one flag per contracted edge.
    #[serde(default)]
    order: Option<Vec<FlagId>>,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum StepDoc {
    Contract(FlagId),
    Forget(FlagId),
    Glue([FlagId; 2]),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CartesianBundle {
    tau: GraphDoc,
    step: StepDoc,
    sigma_prime: GraphDoc,
}

fn dispatch(req: &CommandRequest) -> Result<Reply, CliError> {
    let cx = Ctx { req };
    let text = req.payload.as_str();
    let reply = match req.verb {
        Verb::Validate => {
            let raw: Value = parse(text)?;
            if raw.get("kind").is_some() {
                let doc: MorphismDoc = serde_json::from_value(raw)?;
                cx.cap(&doc.graphs())?;
                let kind = match &doc {
                    MorphismDoc::Contraction(c) => c.to_contraction().map(|_| "contraction"),
                    MorphismDoc::Combinatorial(a) => a.to_morphism().map(|_| "combinatorial"),
                    MorphismDoc::Marked(m) => m.to_marked().map(|_| "marked"),
                }?;
                json!({"valid": true, "kind": kind})
            } else {
                let doc: GraphDoc = serde_json::from_value(raw)?;
                cx.graph(&doc)?;
                json!({"valid": true, "kind": "graph"})
            }
        }
        Verb::Invariants => {
            let g = cx.graph(&parse(text)?)?;
            json!({
                "tails": g.tails().len(),
                "edges": g.edges().len(),
                "chi": g.euler_characteristic(),
                "genus": g.genus().ok(),
                "stable": g.is_stable(),
            })
        }
        Verb::Stabilize => {
            let g = cx.graph(&parse(text)?)?;
            let s = stabilize(&g);
            json!({
                "graph": to_value(&GraphDoc::from(&s.graph)),
                "morphism": to_value(&MorphismDoc::Combinatorial((&s.morphism).into())),
                "steps": to_value(&s.steps),
            })
        }
        Verb::Pushforward => {
            let p: HomGraph = parse(text)?;
            let g = cx.graph(&p.graph)?;
            let (h, m) = pushforward(&p.hom, &g)?;
            json!({
                "graph": to_value(&GraphDoc::from(&h)),
                "morphism": to_value(&MorphismDoc::Marked(MarkedDoc::from(&m))),
            })
        }
        Verb::Contract => {
            let p: EdgeList = parse(text)?;
            let g = cx.graph(&p.graph)?;
            let edges = p
                .edges
                .iter()
                .map(|&f| g.edge_of(f))
                .collect::<Result<Vec<_>, _>>()?;
            let c = contract_edges(&g, &edges)?;
            to_value(&MorphismDoc::Contraction((&c).into()))
        }
        Verb::Cut | Verb::Forget => {
            let p: OneFlag = parse(text)?;
            let g = cx.graph(&p.graph)?;
            if req.verb == Verb::Cut {
                let (h, a) = cut_edge(&g, p.flag)?;
                graph_and_map(&h, &a)
            } else {
                let s = stably_forget_tail(&g, p.flag)?;
                json!({
                    "graph": to_value(&GraphDoc::from(&s.target)),
                    "type": to_value(&s.kind),
                    "tail_map": to_value(&s.tail_map.0),
                    "morphism": to_value(&MorphismDoc::Combinatorial((&s.morphism).into())),
                })
            }
        }
        Verb::Glue => {
            let p: TwoFlags = parse(text)?;
            let g = cx.graph(&p.graph)?;
            let (h, a) = glue_tails(&g, p.flags[0], p.flags[1])?;
            graph_and_map(&h, &a)
        }
        Verb::Compose => {
            let p: Pair = parse(text)?;
            let mut docs = p.first.graphs();
            docs.extend(p.second.graphs());
            cx.cap(&docs)?;
            compose(&p.first, &p.second)?
        }
        Verb::Pullback => {
            let p: PullbackBundle = parse(text)?;
            cx.cap(&[&p.phi.source, &p.phi.target, &p.a.source, &p.a.target])?;
            let phi = p.phi.to_contraction()?;
            let a = p.a.to_morphism()?;
            if p.xi.as_ref().is_some_and(|xi| xi != &a.hom) {
                return Err(Error::invalid("bundle-xi", "xi differs from the hom of a").into());
            }
            if let Some(rho) = &p.rho {
                if cx.graph(rho)? != a.source {
                    return Err(
                        Error::invalid("bundle-rho", "rho differs from the source of a").into(),
                    );
                }
            }
            let order = match &p.order {
                Some(flags) => flags
                    .iter()
                    .map(|&f| phi.source.edge_of(f))
                    .collect::<Result<Vec<_>, _>>()?,
                None => phi.contracted_edges(),
            };
            let pb = stable_pullback_in_order(&phi, &a, &order)?;
            json!({
                "pi": to_value(&GraphDoc::from(&pb.pi)),
                "psi": to_value(&MorphismDoc::Contraction((&pb.psi).into())),
                "b": to_value(&MorphismDoc::Combinatorial((&pb.b).into())),
            })
        }
        Verb::Cartesian => {
            let prof = cx.profile()?;
            let p: CartesianBundle = parse(text)?;
            cartesian(&cx, &prof, &p)?
        }
        Verb::Boundary => {
            let prof = cx.profile()?;
            let mut c: EnumerationConstraints = parse(text)?;
            c.max_flags = c.max_flags.min(req.max_flags);
            let graphs = enumerate_stable_graphs(&prof, &c)?;
            json!({
                "count": graphs.len(),
                "graphs": graphs.iter().map(|g| to_value(&GraphDoc::from(g))).collect::<Vec<_>>(),
            })
        }
        Verb::Dim | Verb::Deg => {
            let prof = cx.profile()?;
            let g = cx.graph(&parse(text)?)?;
            if req.verb == Verb::Dim {
                json!({"dim": dim_graph(&prof, &g)?})
            } else {
                json!({"deg": deg_graph(&prof, &g)?})
            }
        }
        Verb::ExportDot => {
            let g = cx.graph(&parse(text)?)?;
            return Ok(Reply::Text(export_dot(&g)));
        }
    };
    Ok(Reply::Json(reply))
}

fn graph_and_map(g: &AGraph, a: &CombinatorialMorphism) -> Value {
    json!({
        "graph": to_value(&GraphDoc::from(g)),
        "morphism": to_value(&MorphismDoc::Combinatorial(a.into())),
    })
}

fn compose(first: &MorphismDoc, second: &MorphismDoc) -> Result<Value, CliError> {
    let out = match (first, second) {
        (MorphismDoc::Contraction(f), MorphismDoc::Contraction(s)) => {
            let c = s.to_contraction()?.after(&f.to_contraction()?)?;
            MorphismDoc::Contraction((&c).into())
        }
        (MorphismDoc::Combinatorial(f), MorphismDoc::Combinatorial(s)) => {
            let a = s.to_morphism()?.after(&f.to_morphism()?)?;
            MorphismDoc::Combinatorial((&a).into())
        }
        (MorphismDoc::Marked(f), MorphismDoc::Marked(s)) => {
            let m = compose_marked(&s.to_marked()?, &f.to_marked()?)?;
            MorphismDoc::Marked((&m).into())
        }
        _ => {
            return Err(CliError::schema(
                "both morphisms must have the same kind",
            ))
        }
    };
    Ok(to_value(&out))
}

fn cartesian(
    cx: &Ctx<'_>,
    prof: &VarietyProfile,
    p: &CartesianBundle,
) -> Result<Value, CliError> {
    let tau = cx.graph(&p.tau)?;
    let sigma_p = cx.graph(&p.sigma_prime)?;
    let phi = match p.step {
        StepDoc::Contract(f) => ExtendedIsogeny::from_isogeny(Isogeny::identity(&tau).contract(f)?),
        StepDoc::Forget(f) => ExtendedIsogeny::from_isogeny(Isogeny::identity(&tau).forget(f)?),
        StepDoc::Glue([f, g]) => ExtendedIsogeny::gluing(&tau, &[(f, g)])?,
    };
    let b = identify_stabilization(phi.target(), &sigma_p)?;
    let family = cartesian_pullback(prof, &phi, &b)?;
    let members: Vec<Value> = family
        .iter()
        .map(|m| {
            json!({
                "graph": to_value(&GraphDoc::from(m.graph())),
                "deg": m.deg,
                "flagmap": to_value(&m.a.flag_map),
                "vertexmap": to_value(&m.a.vertex_map),
            })
        })
        .collect();
    Ok(json!({
        "sigma": to_value(&GraphDoc::from(phi.target())),
        "deg": deg_graph(prof, &sigma_p)?,
        "family": members,
    }))
}

/// The map `σ -> σ'` through an isomorphism of `σ` with the rank-0
/// stabilization of `σ'`.
fn identify_stabilization(
    sigma: &AGraph,
    sigma_p: &AGraph,
) -> Result<CombinatorialMorphism, CliError> {
    let hom = MonoidHom::to_trivial(sigma_p.rank());
    let (s, _) = pushforward(&hom, sigma_p)?;
    let ls = canonical_labeling(sigma, |_| (), |_| ());
    let lt = canonical_labeling(&s, |_| (), |_| ());
    if ls.key != lt.key {
        return Err(Error::invalid(
            "cart-stabilization",
            "sigma_prime does not stabilize to the target of the step",
        )
        .into());
    }
    let back_f: BTreeMap<FlagId, FlagId> = lt.flag_map.iter().map(|(&a, &b)| (b, a)).collect();
    let back_v: BTreeMap<VertexId, VertexId> =
        lt.vertex_map.iter().map(|(&a, &b)| (b, a)).collect();
    Ok(CombinatorialMorphism {
        source: sigma.clone(),
        target: sigma_p.clone(),
        hom,
        flag_map: ls.flag_map.iter().map(|(&f, c)| (f, back_f[c])).collect(),
        vertex_map: ls.vertex_map.iter().map(|(&v, c)| (v, back_v[c])).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(verb: Verb, payload: &str, profile: Option<&str>) -> CommandOutput {
        run(&CommandRequest {
            verb,
            payload: payload.to_string(),
            profile: profile.map(|p| ProfileSource::Named(p.to_string())),
            max_flags: DEFAULT_MAX_FLAGS,
        })
    }

    const TRIPOD: &str = r#"{"flags":[0,1,2],"vertices":[{"id":0,"genus":0,"class":[]}],
        "boundary":{"0":0,"1":0,"2":0},"involution":{"0":0,"1":1,"2":2}}"#;

    #[test]
    fn tripod_invariants() {
        let out = call(Verb::Invariants, TRIPOD, None);
        assert_eq!(out.code, 0);
        let v: Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(
            v,
            json!({"tails":3,"edges":0,"chi":1,"genus":0,"stable":true})
        );
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(Verb::Invariants, "{", None).code, 2);
        let bad = r#"{"flags":[0,1],"vertices":[{"id":0,"genus":1,"class":[]}],
            "boundary":{"0":0,"1":0},"involution":{"0":1,"1":1}}"#;
        let out = call(Verb::Validate, bad, None);
        assert_eq!(out.code, 3);
        assert!(out.text.contains("j-involution"));
        let out = run(&CommandRequest {
            verb: Verb::Invariants,
            payload: TRIPOD.into(),
            profile: None,
            max_flags: 2,
        });
        assert_eq!(out.code, 4);
        assert_eq!(call(Verb::Dim, TRIPOD, None).code, 2);
    }

    #[test]
    fn case_two_bundle() {
        let tau = r#"{"flags":[0,1,2,3,4,5],"vertices":[{"id":0,"genus":0},{"id":1,"genus":0}],
            "boundary":{"0":0,"1":0,"2":1,"3":1,"4":0,"5":1},
            "involution":{"0":0,"1":1,"2":2,"3":3,"4":5,"5":4}}"#;
        let sp = r#"{"flags":[0,1,2,3],"vertices":[{"id":0,"genus":0,"class":[2]}],
            "boundary":{"0":0,"1":0,"2":0,"3":0},"involution":{"0":0,"1":1,"2":2,"3":3}}"#;
        let payload = format!(r#"{{"tau":{tau},"step":{{"contract":4}},"sigma_prime":{sp}}}"#);
        let out = call(Verb::Cartesian, &payload, Some("P2"));
        assert_eq!(out.code, 0, "{}", out.text);
        let v: Value = serde_json::from_str(&out.text).unwrap();
        let fam = v["family"].as_array().unwrap();
        assert_eq!(fam.len(), 3);
        assert!(fam.iter().all(|m| m["deg"] == v["deg"]));
    }

    #[test]
    fn verbs_round_trip_names() {
        for v in Verb::ALL {
            assert_eq!(v.name().parse::<Verb>().unwrap(), v);
        }
    }
}
