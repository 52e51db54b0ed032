//! Input schema, version `ncdf-spec-v1`.
//!
//! A build spec is a JSON object with a `builder` key; the remaining keys
//! are that builder's parameters:
//!
//! | builder            | parameters |
//! |--------------------|------------|
//! | `elementary_trace` | `block_dims` (default `[2]`), `F`: elements, or `pauli`: subset of `"x","y","z"` |
//! | `elementary`       | `state`: `{"rho": element}`, `terms`: `[{"a": element, "mu", "nu"}]`, `symmetrize` (default false) |
//! | `derivation_trace` | `block_dims`, `m`: elements, `k`: element |
//! | `fuzzy_torus`      | `q`, `p` |
//! | `group`            | `group`: `"Z<n>"`, `"D<n>"` or `{"name", "table"}`; `ell`: real values in group order, or `"cocycle_norm"` for `Z_n` |
//! | `clifford`         | `modes` |
//! | `ou`               | `levels`, `mu`, `lambda` |
//! | `graph`            | `m`, `jump`, `killing` (rationals as `"p/q"`, integers or decimals) |
//! | `park`             | a spin spec (below) |
//!
//! Elements are `{"block_dims": [..], "blocks": [{"re": rows, "im": rows}]}`.
//!
//! A spin spec has `sites`, `coupling` (`J(1), J(2), ..`), `field`,
//! `boundary` (`"open"` or `"periodic"`), `decay`, `beta`, optional
//! `quadrature: {"t_max", "q"}` and optional `paulis` (default `[1,2,3]`).
//!
//! An optional `"schema": "ncdf-spec-v1"` key is checked when present.

use serde::Deserialize;
use serde_json::{json, Value};

use ncdf_core::algebra::{paulis, AlgebraDescriptor, Element, GroupTable, StateJson};
use ncdf_core::builders::{
    clifford_number_form, derivation_trace_form, elementary_state_form, elementary_trace_form, fuzzy_torus_form,
    graph_form, group_form, quantum_ou_form, CndFunction, DerivationSpec, DerivationTerm, GraphFormSpec,
};
use ncdf_core::forms::{FormOperator, FORM_SCHEMA};
use ncdf_core::numeric::TolerancePolicy;
use ncdf_core::spin::{park_form, Boundary, ParkFormSpec, ParkReport, ParkTerm, SpinChainSpec};
use ncdf_core::Error;

use crate::CliError;

fn parse<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T, CliError> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::Input(format!("schema violation: {e}")))
}

pub fn check_schema(v: &Value) -> Result<(), CliError> {
    match v.get("schema") {
        None => Ok(()),
        Some(Value::String(s)) if s == FORM_SCHEMA => Ok(()),
        Some(other) => Err(CliError::Input(format!(
            "unsupported schema {other}, expected {FORM_SCHEMA:?}"
        ))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementaryTrace {
    #[serde(default = "default_dims")]
    block_dims: Vec<usize>,
    #[serde(default, rename = "F")]
    f: Vec<Element>,
    #[serde(default)]
    pauli: Vec<String>,
}

fn default_dims() -> Vec<usize> {
    vec![2]
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    a: Element,
    mu: f64,
    nu: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Elementary {
    state: StateJson,
    terms: Vec<TermJson>,
    #[serde(default)]
    symmetrize: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DerivationTrace {
    block_dims: Vec<usize>,
    m: Vec<Element>,
    k: Element,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Torus {
    q: usize,
    p: i64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GroupRef {
    Name(String),
    Table(GroupTable),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EllRef {
    Values(Vec<f64>),
    Named(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Group {
    group: GroupRef,
    ell: EllRef,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Clifford {
    modes: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Ou {
    levels: usize,
    mu: f64,
    lambda: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Quadrature {
    t_max: Option<f64>,
    q: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSpec {
    sites: usize,
    coupling: Vec<f64>,
    #[serde(default)]
    field: f64,
    #[serde(default = "open")]
    boundary: Boundary,
    #[serde(default = "unit")]
    decay: f64,
    beta: f64,
    quadrature: Option<Quadrature>,
    paulis: Option<Vec<usize>>,
}

fn open() -> Boundary {
    Boundary::Open
}

fn unit() -> f64 {
    1.0
}

impl SpinSpec {
    pub fn from_json(v: &Value) -> Result<SpinSpec, CliError> {
        check_schema(v)?;
        let mut v = v.clone();
        if let Some(m) = v.as_object_mut() {
            m.remove("schema");
            m.remove("builder");
        }
        parse(&v)
    }

    pub fn chain(&self) -> SpinChainSpec {
        SpinChainSpec {
            sites: self.sites,
            coupling: self.coupling.clone(),
            field: self.field,
            boundary: self.boundary,
            decay: self.decay,
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn park(&self) -> ParkFormSpec {
        let mut spec = match &self.paulis {
            Some(p) => ParkFormSpec::restricted(self.sites, p),
            None => ParkFormSpec::restricted(self.sites, &[1, 2, 3]),
        };
        if let Some(q) = &self.quadrature {
            spec.t_max = q.t_max.unwrap_or(spec.t_max);
            spec.q = q.q.unwrap_or(spec.q);
        }
        spec
    }

    pub fn build(&self, tol: &TolerancePolicy) -> Result<(FormOperator, ParkReport), CliError> {
        let spec = self.park();
        if spec.terms.iter().any(|t: &ParkTerm| t.pauli > 3) {
            return Err(CliError::Input("pauli indices must be in 0..=3".into()));
        }
        Ok(park_form(&self.chain(), self.beta, &spec, tol)?)
    }
}

fn pauli_element(name: &str) -> Result<Element, CliError> {
    let i = match name {
        "x" => 1,
        "y" => 2,
        "z" => 3,
        _ => return Err(CliError::Input(format!("unknown Pauli {name:?}"))),
    };
    Ok(Element::from_matrix(paulis()[i].clone())?)
}

fn group_table(r: &GroupRef) -> Result<GroupTable, CliError> {
    match r {
        GroupRef::Name(n) => Ok(GroupTable::by_name(n)?),
        GroupRef::Table(t) => Ok(t.clone()),
    }
}

/// Build a form from a spec. Admissibility failures come back as
/// `CliError::Math` with their witness.
pub fn build(v: &Value, tol: &TolerancePolicy) -> Result<(FormOperator, Value), CliError> {
    check_schema(v)?;
    let builder = v
        .get("builder")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::Input("spec needs a string \"builder\" key".into()))?
        .to_string();
    let mut params = v.clone();
    if let Some(m) = params.as_object_mut() {
        m.remove("builder");
        m.remove("schema");
    }
    let mut extra = json!({});
    let form = match builder.as_str() {
        "elementary_trace" => {
            let p: ElementaryTrace = parse(&params)?;
            let alg = AlgebraDescriptor::new(p.block_dims)?;
            let mut f = p.f;
            for name in &p.pauli {
                f.push(pauli_element(name)?);
            }
            elementary_trace_form(&alg, &f)?
        }
        "elementary" => {
            let p: Elementary = parse(&params)?;
            let space = ncdf_core::standard_form::StandardSpace::new(p.state.to_state()?)?;
            let terms = p
                .terms
                .into_iter()
                .map(|t| DerivationTerm {
                    a: t.a,
                    mu: t.mu,
                    nu: t.nu,
                })
                .collect();
            let mut spec = DerivationSpec::new(terms)?;
            if p.symmetrize {
                spec = spec.symmetrized();
            }
            let (form, report) = elementary_state_form(&space, &spec)?;
            if !report.admissible(tol.tol_prop) {
                return Err(CliError::Math {
                    message: "derivation data is not admissible for this state".into(),
                    witness: serde_json::to_value(&report).unwrap_or(Value::Null),
                });
            }
            extra = json!({ "admissibility": report });
            form
        }
        "derivation_trace" => {
            let p: DerivationTrace = parse(&params)?;
            derivation_trace_form(&AlgebraDescriptor::new(p.block_dims)?, &p.m, &p.k)?
        }
        "fuzzy_torus" => {
            let p: Torus = parse(&params)?;
            fuzzy_torus_form(p.q, p.p)?
        }
        "group" => {
            let p: Group = parse(&params)?;
            let table = group_table(&p.group)?;
            let ell = match p.ell {
                EllRef::Values(vals) => CndFunction::real(table, &vals)?,
                EllRef::Named(n) if n == "cocycle_norm" => {
                    let ord = table.order();
                    let cyclic = GroupTable::cyclic(ord)?;
                    if table.table() != cyclic.table() {
                        return Err(CliError::Input("cocycle_norm is defined for Z_n only".into()));
                    }
                    CndFunction::cocycle_norm(ord)?
                }
                EllRef::Named(n) => return Err(CliError::Input(format!("unknown ell {n:?}"))),
            };
            group_form(&ell)?
        }
        "clifford" => {
            let p: Clifford = parse(&params)?;
            clifford_number_form(p.modes)?.0
        }
        "ou" => {
            let p: Ou = parse(&params)?;
            quantum_ou_form(p.levels, p.mu, p.lambda)?
        }
        "graph" => graph_form(&GraphFormSpec::from_json(&params)?)?,
        "park" => {
            let (form, report) = SpinSpec::from_json(&params)?.build(tol)?;
            extra = json!({ "quadrature": report });
            form
        }
        other => return Err(CliError::Input(format!("unknown builder {other:?}"))),
    };
    Ok((form, extra))
}

/// A file holding either a serialized form or a build spec.
pub fn load_form(v: &Value, tol: &TolerancePolicy) -> Result<FormOperator, CliError> {
    if v.get("builder").is_some() {
        Ok(build(v, tol)?.0)
    } else {
        FormOperator::from_json(v).map_err(|e| match e {
            Error::Parse(m) => CliError::Input(format!("not a form file: {m}")),
            other => other.into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_shorthand() {
        let v = json!({"builder": "elementary_trace", "pauli": ["x"]});
        let (f, _) = build(&v, &TolerancePolicy::default()).unwrap();
        let ev = &f.eig().values;
        assert!((ev[3] - 4.0).abs() < 1e-12 && ev[1].abs() < 1e-12);
    }

    #[test]
    fn schema_is_checked() {
        let v = json!({"schema": "v0", "builder": "clifford", "modes": 2});
        assert!(matches!(
            build(&v, &TolerancePolicy::default()),
            Err(CliError::Input(_))
        ));
        let v = json!({"builder": "clifford", "modes": 2, "typo": 1});
        assert!(matches!(
            build(&v, &TolerancePolicy::default()),
            Err(CliError::Input(_))
        ));
    }

    #[test]
    fn cnd_violation_is_a_math_failure() {
        let v = json!({"builder": "group", "group": "Z2", "ell": [0, -1]});
        match build(&v, &TolerancePolicy::default()) {
            Err(CliError::Math { witness, .. }) => assert!(!witness.is_null()),
            other => panic!("{:?}", other.map(|x| x.1)),
        }
    }

    #[test]
    fn spin_spec_defaults() {
        let s = SpinSpec::from_json(&json!({"sites": 2, "coupling": [1.0], "beta": 1.0})).unwrap();
        assert_eq!(s.park().terms.len(), 6);
        assert_eq!(s.park().t_max, 3.0);
    }
}
