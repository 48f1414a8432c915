//! JSON formats for posets, modules, Betti diagrams and collections.
//!
//! All emitters produce `serde_json::Value`s whose objects have sorted keys, so
//! [`to_canonical_string`] is byte-stable.

use crate::collections::{self, BuiltinKind};
use crate::error::{Error, Result};
use crate::fieldlin::{Field, Matrix};
use crate::homalg::NatTransformation;
use crate::pmod::{BettiDiagram, PersistenceModule};
use crate::poset::Poset;
use crate::relative::CollectionFunctor;
use serde_json::{json, Map, Value};
use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

fn malformed(msg: impl Into<String>) -> Error {
    Error::Json(msg.into())
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| malformed(format!("{what} must be an object")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| malformed(format!("{what} must be a string")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| malformed(format!("{what} must be a non-negative integer")))
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn read_json(path: impl AsRef<Path>) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// `{"grid": {"n", "r"}}` for grids, otherwise `{"elements", "covers"}`.
pub fn poset_to_json(p: &Poset) -> Value {
    if let Some(g) = p.grid_shape() {
        return json!({"grid": {"n": g.n, "r": g.r}});
    }
    let covers: Vec<Value> = p.covers().iter().map(|&(a, b)| json!([p.name(a), p.name(b)])).collect();
    json!({"elements": p.names(), "covers": covers})
}

pub fn poset_from_json(v: &Value) -> Result<Poset> {
    let o = as_object(v, "poset")?;
    if let Some(g) = o.get("grid") {
        let g = as_object(g, "grid")?;
        let n = as_usize(g.get("n").ok_or_else(|| malformed("grid needs n"))?, "n")?;
        let r = as_usize(g.get("r").ok_or_else(|| malformed("grid needs r"))?, "r")?;
        if r == 0 {
            return Err(Error::Invalid("grid needs r >= 1".into()));
        }
        return Ok(Poset::grid(n, r));
    }
    let elems = o
        .get("elements")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("poset needs an \"elements\" array"))?
        .iter()
        .map(|e| as_str(e, "element").map(str::to_string))
        .collect::<Result<Vec<_>>>()?;
    let covers = match o.get("covers") {
        None => Vec::new(),
        Some(c) => c
            .as_array()
            .ok_or_else(|| malformed("\"covers\" must be an array"))?
            .iter()
            .map(|pair| match pair.as_array().map(Vec::as_slice) {
                Some([a, b]) => Ok((as_str(a, "cover")?.to_string(), as_str(b, "cover")?.to_string())),
                _ => Err(malformed("each cover must be a pair of names")),
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Poset::from_covers(&elems, &covers)
}

/// A poset given as JSON or as a grid shorthand like `grid:5,2`.
pub fn poset_from_arg(s: &str) -> Result<Poset> {
    if let Some(rest) = s.strip_prefix("grid:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if let [n, r] = parts.as_slice() {
            let n = n.trim().parse().map_err(|_| malformed("bad grid size"))?;
            let r: usize = r.trim().parse().map_err(|_| malformed("bad grid rank"))?;
            if r > 0 {
                return Ok(Poset::grid(n, r));
            }
        }
        return Err(malformed(format!("bad grid spec {s:?}")));
    }
    poset_from_json(&value_from_arg(s)?)
}

/// Inline JSON if it parses as an object, otherwise a file path.
pub fn value_from_arg(s: &str) -> Result<Value> {
    let t = s.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(serde_json::from_str(t)?);
    }
    read_json(s)
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    json!(m.to_rows())
}

/// Rows of integers reduced mod `p`; the shape must be `rows x cols`.
pub fn matrix_from_json(v: &Value, field: Field, rows: usize, cols: usize) -> Result<Matrix> {
    let rs = v.as_array().ok_or_else(|| malformed("matrix must be an array of rows"))?;
    let parsed = rs
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| malformed("matrix row must be an array"))?
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| malformed("matrix entries must be integers")))
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if parsed.len() != rows || parsed.iter().any(|r| r.len() != cols) {
        let found = format!("{}x{}", parsed.len(), parsed.first().map_or(cols, Vec::len));
        return Err(Error::DimensionMismatch { expected: format!("{rows}x{cols}"), found });
    }
    Matrix::from_rows_with_cols(field, &parsed, cols)
}

fn cover_key(p: &Poset, a: usize, b: usize) -> String {
    format!("{}<{}", p.name(a), p.name(b))
}

fn parse_cover_key(p: &Poset, key: &str) -> Result<usize> {
    let (a, b) = key.split_once('<').ok_or_else(|| malformed(format!("map key {key:?} is not of the form a<b")))?;
    let (a, b) = (p.index_of(a)?, p.index_of(b)?);
    p.cover_index(a, b).ok_or_else(|| Error::Invalid(format!("{key} is not a cover relation")))
}

/// `dims` and `maps` only (zero entries omitted); shared by modules and collection objects.
fn module_body(m: &PersistenceModule) -> Map<String, Value> {
    let p = m.poset();
    let mut dims = Map::new();
    for a in 0..p.len() {
        if m.dim(a) > 0 {
            dims.insert(p.name(a).to_string(), json!(m.dim(a)));
        }
    }
    let mut maps = Map::new();
    for (k, &(a, b)) in p.covers().iter().enumerate() {
        let mat = &m.cover_maps()[k];
        if !mat.is_zero() {
            maps.insert(cover_key(p, a, b), matrix_to_json(mat));
        }
    }
    let mut o = Map::new();
    o.insert("dims".into(), Value::Object(dims));
    o.insert("maps".into(), Value::Object(maps));
    o
}

fn module_from_body(o: &Map<String, Value>, poset: Arc<Poset>, field: Field) -> Result<PersistenceModule> {
    let p = &*poset;
    let mut dims = vec![0; p.len()];
    if let Some(d) = o.get("dims") {
        for (k, v) in as_object(d, "dims")? {
            dims[p.index_of(k)?] = as_usize(v, "dimension")?;
        }
    }
    let mut maps: Vec<Matrix> = p.covers().iter().map(|&(a, b)| Matrix::zeros(field, dims[b], dims[a])).collect();
    if let Some(ms) = o.get("maps") {
        for (k, v) in as_object(ms, "maps")? {
            let ci = parse_cover_key(p, k)?;
            let (a, b) = p.covers()[ci];
            maps[ci] = matrix_from_json(v, field, dims[b], dims[a])?;
        }
    }
    let m = PersistenceModule::new(poset, field, dims, maps)?;
    m.validate()?;
    Ok(m)
}

pub fn module_to_json(m: &PersistenceModule) -> Value {
    let mut o = module_body(m);
    o.insert("poset".into(), poset_to_json(m.poset()));
    o.insert("field".into(), json!(m.field().characteristic()));
    Value::Object(o)
}

/// The field to use: the override if given, else the JSON `"field"` key, else GF(2).
pub fn effective_field(v: &Value, field: Option<Field>) -> Result<Field> {
    if let Some(f) = field {
        return Ok(f);
    }
    match v.get("field") {
        Some(p) => Field::new(p.as_u64().ok_or_else(|| malformed("\"field\" must be an integer"))?),
        None => Ok(Field::gf2()),
    }
}

/// Parse and validate (including functoriality) a module.
pub fn module_from_json(v: &Value, field: Option<Field>) -> Result<PersistenceModule> {
    let o = as_object(v, "module")?;
    let field = effective_field(v, field)?;
    let poset = Arc::new(poset_from_json(o.get("poset").ok_or_else(|| malformed("module needs a \"poset\""))?)?);
    module_from_body(o, poset, field)
}

/// `{"betti": [{"d", "at", "mult"}, ...]}` ordered by degree then element index.
pub fn betti_to_json(b: &BettiDiagram, p: &Poset) -> Value {
    let rows: Vec<Value> = b.iter().map(|(d, a, m)| json!({"d": d, "at": p.name(a), "mult": m})).collect();
    json!({ "betti": rows })
}

pub fn betti_from_json(v: &Value, p: &Poset) -> Result<BettiDiagram> {
    let rows = v.get("betti").and_then(Value::as_array).ok_or_else(|| malformed("expected a \"betti\" array"))?;
    let mut b = BettiDiagram::new();
    for r in rows {
        let d = as_usize(r.get("d").ok_or_else(|| malformed("betti row needs d"))?, "d")?;
        let at = p.index_of(as_str(r.get("at").ok_or_else(|| malformed("betti row needs at"))?, "at")?)?;
        let m = as_usize(r.get("mult").ok_or_else(|| malformed("betti row needs mult"))?, "mult")?;
        b.add(d, at, m);
    }
    Ok(b)
}

/// A collection request: a builtin family with parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinSpec {
    pub kind: BuiltinKind,
    pub params: Map<String, Value>,
}

impl BuiltinSpec {
    pub fn new(kind: BuiltinKind) -> BuiltinSpec {
        BuiltinSpec { kind, params: Map::new() }
    }

    pub fn to_json(&self) -> Value {
        json!({"builtin": self.kind.name(), "params": self.params})
    }

    pub fn from_json(v: &Value) -> Result<BuiltinSpec> {
        let o = as_object(v, "collection")?;
        let kind: BuiltinKind = as_str(o.get("builtin").ok_or_else(|| malformed("missing \"builtin\""))?, "builtin")?
            .parse()?;
        let params = match o.get("params") {
            None | Some(Value::Null) => Map::new(),
            Some(p) => as_object(p, "params")?.clone(),
        };
        Ok(BuiltinSpec { kind, params })
    }

    /// Build over `i` (or over the poset in the `"I"` parameter when present).
    ///
    /// `max` bounds antichain and upset enumeration.
    pub fn build(&self, i: &Arc<Poset>, field: Field, max: usize) -> Result<CollectionFunctor> {
        let i = match self.params.get("I") {
            Some(v) => Arc::new(poset_from_json(v)?),
            None => i.clone(),
        };
        match self.kind {
            BuiltinKind::Singleton => {
                let body = self.params.get("P0").ok_or_else(|| malformed("singleton needs a \"P0\" module"))?;
                let p0 = match body.get("poset") {
                    Some(_) => module_from_json(body, Some(field))?,
                    None => module_from_body(as_object(body, "P0")?, i.clone(), field)?,
                };
                Ok(collections::singleton(Arc::new(p0)))
            }
            BuiltinKind::AllSubfunctors => collections::all_subfunctors(i, field, max),
            BuiltinKind::Translated => {
                let t = self
                    .params
                    .get("T")
                    .and_then(Value::as_array)
                    .ok_or_else(|| malformed("translated needs a \"T\" array of element names"))?
                    .iter()
                    .map(|x| i.index_of(as_str(x, "T element")?))
                    .collect::<Result<Vec<_>>>()?;
                collections::translated(i, field, &t)
            }
            BuiltinKind::SpreadsOmega => collections::spreads_omega(i, field, max),
            BuiltinKind::SingleSourceOmega0 => collections::single_source_omega0(i, field, max),
            BuiltinKind::LowerHooks => collections::lower_hooks(i, field),
            BuiltinKind::LowerHooksInf => collections::lower_hooks_inf(i, field),
            BuiltinKind::RectanglesNaive => collections::rectangles_naive(i, field),
            BuiltinKind::RectanglesGrid => {
                let shape = i.grid_shape();
                let get = |k: &str, dflt: Option<usize>| -> Result<usize> {
                    match self.params.get(k) {
                        Some(v) => as_usize(v, k),
                        None => dflt.ok_or_else(|| Error::Invalid("rectangles_grid needs a grid poset or n, r".into())),
                    }
                };
                let n = get("n", shape.map(|g| g.n))?;
                let r = get("r", shape.map(|g| g.r))?;
                if let Some(g) = shape {
                    if (g.n, g.r) != (n, r) {
                        return Err(Error::Invalid(format!("grid({n},{r}) does not match the module's poset")));
                    }
                }
                collections::rectangles_grid(n, r, field)
            }
        }
    }
}

/// The explicit form: `I`, `J`, objects by `J` name, arrows `"a<b": {x: matrix}` for `P(b) -> P(a)`.
pub fn collection_to_json(p: &CollectionFunctor) -> Value {
    let (i, j) = (p.i_poset(), p.j_poset());
    let mut objs = Map::new();
    for a in 0..j.len() {
        objs.insert(j.name(a).to_string(), Value::Object(module_body(p.obj(a))));
    }
    let mut arrows = Map::new();
    for (k, &(a, b)) in j.covers().iter().enumerate() {
        let mut comps = Map::new();
        for (x, c) in p.arrows()[k].components().iter().enumerate() {
            if !c.is_zero() {
                comps.insert(i.name(x).to_string(), matrix_to_json(c));
            }
        }
        arrows.insert(cover_key(j, a, b), Value::Object(comps));
    }
    json!({
        "I": poset_to_json(i),
        "J": poset_to_json(j),
        "field": p.field().characteristic(),
        "objs": objs,
        "arrows": arrows,
    })
}

/// Parse either `{"builtin", "params"}` or the explicit form.
///
/// `i` is the default indexing poset for builtins and for explicit collections without `"I"`.
pub fn collection_from_json(v: &Value, i: &Arc<Poset>, field: Field, max: usize) -> Result<CollectionFunctor> {
    let o = as_object(v, "collection")?;
    if o.contains_key("builtin") {
        return BuiltinSpec::from_json(v)?.build(i, field, max);
    }
    let ip = match o.get("I") {
        Some(x) => {
            let q = poset_from_json(x)?;
            if q == **i {
                i.clone()
            } else {
                Arc::new(q)
            }
        }
        None => i.clone(),
    };
    let j = Arc::new(poset_from_json(o.get("J").ok_or_else(|| malformed("collection needs \"J\" or \"builtin\""))?)?);
    let objs_json = as_object(o.get("objs").ok_or_else(|| malformed("collection needs \"objs\""))?, "objs")?;
    let mut objs: Vec<Option<Arc<PersistenceModule>>> = vec![None; j.len()];
    for (k, body) in objs_json {
        objs[j.index_of(k)?] = Some(Arc::new(module_from_body(as_object(body, "object")?, ip.clone(), field)?));
    }
    let zero = Arc::new(PersistenceModule::zero(ip.clone(), field));
    let objs: Vec<Arc<PersistenceModule>> = objs.into_iter().map(|m| m.unwrap_or_else(|| zero.clone())).collect();
    let mut given: HashMap<usize, &Map<String, Value>> = HashMap::new();
    if let Some(a) = o.get("arrows") {
        for (k, comps) in as_object(a, "arrows")? {
            given.insert(parse_cover_key(&j, k)?, as_object(comps, "arrow")?);
        }
    }
    let arrows = j
        .covers()
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| {
            let (src, tgt) = (objs[b].clone(), objs[a].clone());
            let mut comps: Vec<Matrix> = (0..ip.len()).map(|x| Matrix::zeros(field, tgt.dim(x), src.dim(x))).collect();
            if let Some(cs) = given.get(&k) {
                for (x, m) in cs.iter() {
                    let x = ip.index_of(x)?;
                    comps[x] = matrix_from_json(m, field, tgt.dim(x), src.dim(x))?;
                }
            }
            NatTransformation::new(src, tgt, comps)
        })
        .collect::<Result<Vec<_>>>()?;
    let p = CollectionFunctor::new(ip, j, field, objs, arrows, "explicit")?;
    p.validate()?;
    Ok(p)
}

/// A collection given as a builtin name, inline JSON, or a file path.
pub fn collection_from_arg(s: &str, i: &Arc<Poset>, field: Field, max: usize) -> Result<CollectionFunctor> {
    if let Ok(kind) = s.parse::<BuiltinKind>() {
        return BuiltinSpec::new(kind).build(i, field, max);
    }
    collection_from_json(&value_from_arg(s)?, i, field, max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_roundtrip() {
        let m = PersistenceModule::m0_demo();
        let v = module_to_json(&m);
        let back = module_from_json(&v, None).unwrap();
        assert_eq!(module_to_json(&back), v);
    }

    #[test]
    fn poset_roundtrip_non_grid() {
        let p = Poset::from_covers(&["a", "b", "c"], &[("a", "b"), ("a", "c")]).unwrap();
        let q = poset_from_json(&poset_to_json(&p)).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let v = json!({"poset": {"elements": ["a", "b"], "covers": [["a", "b"]]},
                       "dims": {"a": 1, "b": 1}, "maps": {"a<b": [[1, 0]]}});
        assert!(matches!(module_from_json(&v, None), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn explicit_collection_roundtrip() {
        let i = Arc::new(Poset::grid(2, 1));
        let p = collections::lower_hooks(i.clone(), Field::gf2()).unwrap();
        let v = collection_to_json(&p);
        let q = collection_from_json(&v, &i, Field::gf2(), 1000).unwrap();
        assert_eq!(collection_to_json(&q), v);
    }
}
