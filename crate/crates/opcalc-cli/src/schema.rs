//! JSON form of sequences, operads, modules and bars.
//!
//! Every object carries `kind`, `field`, `arity_max`, `name` and `components`. Matrices
//! are sparse `[row, col, "num/den"]` triplets; absent entries are zero. Operads and
//! modules add `structure`, keyed by standard shape `"k;n1,...,nk"`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use opcalc::bar::BarComplex;
use opcalc::chaincore::{BasisElem, ChainComplex, Field, Scalar, SparseMatrix};
use opcalc::operad::structure::{parse_shape_key, shape_key};
use opcalc::operad::{Action, Bimodule, LeftModule, Operad, RightModule, ShapeFn};
use opcalc::symseq::{EquivariantComplex, SymSeq};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaError {
    pub path: String,
    pub msg: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.msg)
    }
}

impl std::error::Error for SchemaError {}

fn err<T>(path: &str, msg: impl Into<String>) -> Result<T, SchemaError> {
    Err(SchemaError { path: path.to_string(), msg: msg.into() })
}

fn matrix_json(m: &SparseMatrix) -> Value {
    Value::Array(m.triplets().map(|(r, c, x)| json!([r, c, x.render()])).collect())
}

fn component_json(c: &EquivariantComplex) -> Value {
    let cx = &c.complex;
    let basis: Vec<Value> = cx.basis().iter().map(|b| json!({"id": b.label, "deg": b.degree})).collect();
    let mut action = Map::new();
    for (i, g) in c.gens.iter().enumerate() {
        action.insert(format!("s{}", i + 1), matrix_json(g));
    }
    json!({"basis": basis, "differential": matrix_json(cx.differential()), "action": action})
}

fn header(kind: &str, name: &str, s: &SymSeq) -> Map<String, Value> {
    let mut comps = Map::new();
    for n in 1..=s.arity_max {
        comps.insert(n.to_string(), component_json(s.comp(n)));
    }
    let mut m = Map::new();
    m.insert("kind".into(), json!(kind));
    m.insert("name".into(), json!(name));
    m.insert("field".into(), json!(s.field.to_string()));
    m.insert("arity_max".into(), json!(s.arity_max));
    m.insert("components".into(), Value::Object(comps));
    m
}

fn structure_json(a: &Action) -> Value {
    let mut m = Map::new();
    for (k, ns) in a.shapes() {
        let mat = a.shape_matrix(k, &ns);
        if !mat.is_zero() {
            m.insert(shape_key(k, &ns), matrix_json(&mat));
        }
    }
    Value::Object(m)
}

pub fn symseq_json(s: &SymSeq, name: &str) -> Value {
    Value::Object(header("symseq", name, s))
}

pub fn operad_json(p: &Operad) -> Value {
    let mut m = header("operad", &p.name, &p.seq);
    m.insert("structure".into(), structure_json(&p.comp));
    Value::Object(m)
}

pub fn right_module_json(r: &RightModule) -> Value {
    let mut m = header("module", &r.name, &r.seq);
    m.insert("side".into(), json!("right"));
    m.insert("operad".into(), json!(r.operad.name));
    m.insert("structure".into(), structure_json(&r.act));
    Value::Object(m)
}

pub fn left_module_json(l: &LeftModule) -> Value {
    let mut m = header("module", &l.name, &l.seq);
    m.insert("side".into(), json!("left"));
    m.insert("operad".into(), json!(l.operad.name));
    m.insert("structure".into(), structure_json(&l.act));
    Value::Object(m)
}

/// A bimodule keeps both actions under `structure.left` and `structure.right`.
pub fn bimodule_json(b: &Bimodule) -> Value {
    let mut m = header("module", &b.name, &b.seq);
    m.insert("side".into(), json!("bi"));
    m.insert("operad".into(), json!(b.left.operad.name));
    m.insert("structure".into(), json!({"left": structure_json(&b.left.act), "right": structure_json(&b.right.act)}));
    Value::Object(m)
}

pub fn homology_json(h: &[std::collections::BTreeMap<i32, usize>]) -> Value {
    let mut m = Map::new();
    for (i, hn) in h.iter().enumerate() {
        let row: Map<String, Value> = hn.iter().map(|(q, d)| (q.to_string(), json!(d))).collect();
        m.insert((i + 1).to_string(), Value::Object(row));
    }
    Value::Object(m)
}

/// The bar with its tiers: per basis element the bidegree and chain of partitions (bitmasks).
pub fn bar_json(b: &BarComplex) -> Value {
    let mut m = header("bar", &b.name(), &b.seq);
    let mut tiers = Map::new();
    for n in 1..=b.seq.arity_max {
        let rows: Vec<Value> = (0..b.seq.dim(n))
            .map(|i| {
                let (a, bb, chain) = b.tiers(n, i);
                json!([a, bb, chain])
            })
            .collect();
        tiers.insert(n.to_string(), Value::Array(rows));
    }
    m.insert("tiers".into(), Value::Object(tiers));
    Value::Object(m)
}

fn get<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value, SchemaError> {
    match v.get(key) {
        Some(x) => Ok(x),
        None => err(path, format!("missing key {key:?}")),
    }
}

fn as_usize(v: &Value, path: &str) -> Result<usize, SchemaError> {
    match v.as_u64() {
        Some(x) => Ok(x as usize),
        None => err(path, "expected a non-negative integer"),
    }
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, SchemaError> {
    match v.as_str() {
        Some(x) => Ok(x),
        None => err(path, "expected a string"),
    }
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, SchemaError> {
    match v.as_object() {
        Some(x) => Ok(x),
        None => err(path, "expected an object"),
    }
}

fn parse_scalar(field: Field, v: &Value, path: &str) -> Result<Scalar, SchemaError> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_i64() => n.to_string(),
        _ => return err(path, "expected a scalar string \"num/den\""),
    };
    field.parse_scalar(&s).or_else(|e| err(path, e.to_string()))
}

fn parse_matrix(field: Field, v: &Value, nrows: usize, ncols: usize, path: &str) -> Result<SparseMatrix, SchemaError> {
    let Some(rows) = v.as_array() else { return err(path, "expected an array of [row, col, value] triplets") };
    let mut trips = Vec::with_capacity(rows.len());
    for (i, t) in rows.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let Some(t) = t.as_array().filter(|t| t.len() == 3) else { return err(&p, "expected [row, col, value]") };
        let r = as_usize(&t[0], &format!("{p}[0]"))?;
        let c = as_usize(&t[1], &format!("{p}[1]"))?;
        if r >= nrows || c >= ncols {
            return err(&p, format!("entry ({r},{c}) outside a {nrows}x{ncols} matrix"));
        }
        trips.push((r, c, parse_scalar(field, &t[2], &format!("{p}[2]"))?));
    }
    Ok(SparseMatrix::from_triplets(field, nrows, ncols, trips))
}

fn parse_component(field: Field, n: usize, v: &Value, path: &str) -> Result<EquivariantComplex, SchemaError> {
    let bpath = format!("{path}.basis");
    let Some(basis) = get(v, "basis", path)?.as_array() else { return err(&bpath, "expected an array") };
    let mut elems = Vec::with_capacity(basis.len());
    for (i, b) in basis.iter().enumerate() {
        let p = format!("{bpath}[{i}]");
        let id = as_str(get(b, "id", &p)?, &format!("{p}.id"))?;
        let Some(deg) = get(b, "deg", &p)?.as_i64() else { return err(&format!("{p}.deg"), "expected an integer") };
        elems.push(BasisElem::new(id, deg as i32));
    }
    let dim = elems.len();
    let d = parse_matrix(field, get(v, "differential", path)?, dim, dim, &format!("{path}.differential"))?;
    let complex = ChainComplex::new(field, elems, d).or_else(|e| err(&format!("{path}.differential"), e.to_string()))?;
    let empty = Map::new();
    let action = match v.get("action") {
        Some(a) => as_object(a, &format!("{path}.action"))?,
        None => &empty,
    };
    for key in action.keys() {
        let ok = key.strip_prefix('s').and_then(|i| i.parse::<usize>().ok()).is_some_and(|i| i >= 1 && i < n);
        if !ok {
            return err(&format!("{path}.action.{key}"), format!("arity {n} has generators s1..s{}", n.saturating_sub(1)));
        }
    }
    let mut gens = Vec::new();
    for i in 1..n {
        let key = format!("s{i}");
        match action.get(&key) {
            Some(m) => gens.push(parse_matrix(field, m, dim, dim, &format!("{path}.action.{key}"))?),
            None => return err(&format!("{path}.action"), format!("missing generator {key}")),
        }
    }
    EquivariantComplex::new(n, Arc::new(complex), gens).or_else(|e| err(&format!("{path}.action"), e.to_string()))
}

/// Field, bound and components of any object.
pub fn parse_symseq(v: &Value) -> Result<SymSeq, SchemaError> {
    let field: Field = as_str(get(v, "field", "$")?, "$.field")?.parse().or_else(|e: opcalc::chaincore::FieldError| err("$.field", e.to_string()))?;
    let nmax = as_usize(get(v, "arity_max", "$")?, "$.arity_max")?;
    if nmax == 0 {
        return err("$.arity_max", "must be at least 1");
    }
    let comps = as_object(get(v, "components", "$")?, "$.components")?;
    for key in comps.keys() {
        if !key.parse::<usize>().is_ok_and(|n| n >= 1 && n <= nmax) {
            return err(&format!("$.components.{key}"), format!("arity outside 1..={nmax}"));
        }
    }
    let mut out = Vec::with_capacity(nmax);
    for n in 1..=nmax {
        let c = match comps.get(&n.to_string()) {
            Some(c) => parse_component(field, n, c, &format!("$.components.{n}"))?,
            None => EquivariantComplex::zero(field, n),
        };
        out.push(Arc::new(c));
    }
    SymSeq::new(field, nmax, out).or_else(|e| err("$.components", e.to_string()))
}

fn name_of(v: &Value) -> String {
    v.get("name").and_then(Value::as_str).unwrap_or("").to_string()
}

fn expect_kind(v: &Value, kinds: &[&str]) -> Result<String, SchemaError> {
    let k = as_str(get(v, "kind", "$")?, "$.kind")?;
    if !kinds.contains(&k) {
        return err("$.kind", format!("expected {}, found {k:?}", kinds.join(" or ")));
    }
    Ok(k.to_string())
}

fn parse_structure(v: &Value, path: &str, outer: &SymSeq, inner: &SymSeq, target: &SymSeq) -> Result<Action, SchemaError> {
    let obj = as_object(v, path)?;
    let mut table = HashMap::new();
    for (key, m) in obj {
        let p = format!("{path}.{key}");
        let Some((k, ns)) = parse_shape_key(key) else { return err(&p, "expected a shape key \"k;n1,...,nk\"") };
        let n: usize = ns.iter().sum();
        if k == 0 || ns.len() != k || ns.contains(&0) || k > outer.arity_max || n > target.arity_max {
            return err(&p, "shape outside the arity bound");
        }
        let ncols = outer.dim(k) * ns.iter().map(|m| inner.dim(*m)).product::<usize>();
        table.insert((k, ns), parse_matrix(target.field, m, target.dim(n), ncols, &p)?);
    }
    Ok(Action::from_matrices(outer.clone(), inner.clone(), target.clone(), table))
}

fn placeholder() -> ShapeFn {
    Arc::new(|_, _| vec![])
}

pub fn parse_operad(v: &Value) -> Result<Operad, SchemaError> {
    expect_kind(v, &["operad"])?;
    let seq = parse_symseq(v)?;
    let op = Operad::new(name_of(v), seq.clone(), placeholder()).or_else(|e| err("$.components.1", e.to_string()))?;
    let comp = parse_structure(get(v, "structure", "$")?, "$.structure", &seq, &seq, &seq)?;
    Ok(op.with_comp(comp))
}

fn side(v: &Value) -> Result<String, SchemaError> {
    expect_kind(v, &["module"])?;
    Ok(as_str(get(v, "side", "$")?, "$.side")?.to_string())
}

fn check_side(v: &Value, want: &str) -> Result<(), SchemaError> {
    let s = side(v)?;
    if s != want {
        return err("$.side", format!("expected a {want} module, found {s:?}"));
    }
    Ok(())
}

fn over(seq: &SymSeq, p: &Arc<Operad>) -> Result<(), SchemaError> {
    if seq.field != p.field() || seq.arity_max != p.arity_max() {
        return err("$", format!("field/arity bound {}/{} do not match the operad's {}/{}", seq.field, seq.arity_max, p.field(), p.arity_max()));
    }
    Ok(())
}

pub fn parse_right_module(v: &Value, p: &Arc<Operad>) -> Result<RightModule, SchemaError> {
    check_side(v, "right")?;
    let seq = parse_symseq(v)?;
    over(&seq, p)?;
    let act = parse_structure(get(v, "structure", "$")?, "$.structure", &seq, &p.seq, &seq)?;
    let mut r = RightModule::new(name_of(v), seq, p.clone(), placeholder()).or_else(|e| err("$", e.to_string()))?;
    r.act = act;
    Ok(r)
}

pub fn parse_left_module(v: &Value, p: &Arc<Operad>) -> Result<LeftModule, SchemaError> {
    check_side(v, "left")?;
    let seq = parse_symseq(v)?;
    over(&seq, p)?;
    let act = parse_structure(get(v, "structure", "$")?, "$.structure", &p.seq, &seq, &seq)?;
    let mut l = LeftModule::new(name_of(v), seq, p.clone(), placeholder()).or_else(|e| err("$", e.to_string()))?;
    l.act = act;
    Ok(l)
}

pub fn parse_bimodule(v: &Value, p: &Arc<Operad>) -> Result<Bimodule, SchemaError> {
    check_side(v, "bi")?;
    let seq = parse_symseq(v)?;
    over(&seq, p)?;
    let st = get(v, "structure", "$")?;
    let la = parse_structure(get(st, "left", "$.structure")?, "$.structure.left", &p.seq, &seq, &seq)?;
    let ra = parse_structure(get(st, "right", "$.structure")?, "$.structure.right", &seq, &p.seq, &seq)?;
    let name = name_of(v);
    let mut l = LeftModule::new(name.clone(), seq.clone(), p.clone(), placeholder()).or_else(|e| err("$", e.to_string()))?;
    l.act = la;
    let mut r = RightModule::new(name.clone(), seq, p.clone(), placeholder()).or_else(|e| err("$", e.to_string()))?;
    r.act = ra;
    Bimodule::new(name, l, r).or_else(|e| err("$", e.to_string()))
}

/// Canonical text: sorted keys, two-space indentation, trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
