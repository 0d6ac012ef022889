//! File formats.
//!
//! * Objects: JSON with `variables` (name, `type`, `domain`) and `objects`
//!   (name, `values` keyed by variable name). Categorical values are label
//!   lists; numeric values are lists of `[lo, hi]` pairs.
//! * Individuals: CSV whose header names the variables plus a `cluster`
//!   column, with an optional leading `id` column. An empty cell is missing.
//! * Kinds: JSON listing the variables of an individuals file with optional
//!   domains and the output kind wanted for each when generating objects.

use std::collections::{BTreeSet, HashMap};
use std::io::{Read, Write};

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::generator::OutputKind;
use crate::model::{
    Assertion, Domain, IndividualTable, Interval, IntervalUnion, KnowledgeBase, Scalar, ValueSet, VariableKind,
    VariableSpec,
};

fn parse_err(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{path}: {msg}"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| parse_err(path, "expected a string"))
}

fn as_f64(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| parse_err(path, "expected a number"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(path, "expected a list"))
}

fn parse_kind(v: &Value, path: &str) -> Result<VariableKind> {
    match as_str(v, path)? {
        "categorical" => Ok(VariableKind::Categorical),
        "numeric" => Ok(VariableKind::Numeric),
        other => Err(parse_err(path, format!("unknown type `{other}` (expected categorical or numeric)"))),
    }
}

fn parse_domain(kind: VariableKind, v: &Value, path: &str) -> Result<Domain> {
    let items = as_array(v, path)?;
    match kind {
        VariableKind::Categorical => {
            let labels = items
                .iter()
                .enumerate()
                .map(|(i, x)| as_str(x, &format!("{path}[{i}]")).map(str::to_string))
                .collect::<Result<Vec<_>>>()?;
            Ok(Domain::Categorical(labels))
        }
        VariableKind::Numeric => {
            if items.len() != 2 {
                return Err(parse_err(path, "a numeric domain is a [lo, hi] pair"));
            }
            let lo = as_f64(&items[0], &format!("{path}[0]"))?;
            let hi = as_f64(&items[1], &format!("{path}[1]"))?;
            Ok(Domain::Numeric(Interval::new(lo, hi).map_err(|e| parse_err(path, e))?))
        }
    }
}

fn make_spec(name: &str, domain: Domain, path: &str) -> Result<VariableSpec> {
    match domain {
        Domain::Categorical(labels) => VariableSpec::categorical(name, labels),
        Domain::Numeric(r) => VariableSpec::numeric(name, r.lo(), r.hi()),
    }
    .map_err(|e| parse_err(path, e))
}

fn parse_value(kind: VariableKind, v: &Value, path: &str) -> Result<ValueSet> {
    let items = as_array(v, path)?;
    match kind {
        VariableKind::Categorical => {
            let labels = items
                .iter()
                .enumerate()
                .map(|(i, x)| as_str(x, &format!("{path}[{i}]")).map(str::to_string))
                .collect::<Result<BTreeSet<_>>>()?;
            Ok(ValueSet::Categories(labels))
        }
        VariableKind::Numeric => {
            let mut pieces = Vec::with_capacity(items.len());
            for (i, x) in items.iter().enumerate() {
                let p = format!("{path}[{i}]");
                let pair = as_array(x, &p)?;
                if pair.len() != 2 {
                    return Err(parse_err(&p, "expected a [lo, hi] pair"));
                }
                let lo = as_f64(&pair[0], &format!("{p}[0]"))?;
                let hi = as_f64(&pair[1], &format!("{p}[1]"))?;
                pieces.push(Interval::new(lo, hi).map_err(|e| parse_err(&p, e))?);
            }
            Ok(ValueSet::Intervals(IntervalUnion::from_intervals(pieces)))
        }
    }
}

/// Parses an objects file.
pub fn parse_dataset(text: &str) -> Result<KnowledgeBase> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("malformed JSON: {e}")))?;
    let vars = as_array(doc.get("variables").ok_or_else(|| parse_err("variables", "missing field"))?, "variables")?;
    let mut specs = Vec::with_capacity(vars.len());
    for (l, v) in vars.iter().enumerate() {
        let path = format!("variables[{l}]");
        let name = as_str(v.get("name").ok_or_else(|| parse_err(&format!("{path}.name"), "missing field"))?, &format!("{path}.name"))?;
        let kind = parse_kind(
            v.get("type").ok_or_else(|| parse_err(&format!("{path}.type"), "missing field"))?,
            &format!("{path}.type"),
        )?;
        let domain = parse_domain(
            kind,
            v.get("domain").ok_or_else(|| parse_err(&format!("{path}.domain"), "missing field"))?,
            &format!("{path}.domain"),
        )?;
        specs.push(make_spec(name, domain, &path)?);
    }

    let objects = as_array(doc.get("objects").ok_or_else(|| parse_err("objects", "missing field"))?, "objects")?;
    let mut assertions = Vec::with_capacity(objects.len());
    for (i, o) in objects.iter().enumerate() {
        let path = format!("objects[{i}]");
        let name = as_str(o.get("name").ok_or_else(|| parse_err(&format!("{path}.name"), "missing field"))?, &format!("{path}.name"))?;
        let values = o
            .get("values")
            .and_then(Value::as_object)
            .ok_or_else(|| parse_err(&format!("{path}.values"), "expected an object keyed by variable name"))?;
        if let Some(unknown) = values.keys().find(|k| !specs.iter().any(|s| &s.name == *k)) {
            return Err(parse_err(&format!("{path}.values.{unknown}"), "unknown variable"));
        }
        let mut row = Vec::with_capacity(specs.len());
        for spec in &specs {
            let p = format!("{path}.values.{}", spec.name);
            let v = values.get(&spec.name).ok_or_else(|| parse_err(&p, "missing value"))?;
            let value = parse_value(spec.kind(), v, &p)?;
            spec.check(&value).map_err(|e| parse_err(&p, e))?;
            row.push(value);
        }
        assertions.push(Assertion::new(name, row));
    }
    KnowledgeBase::new(specs, assertions)
}

pub fn read_dataset<R: Read>(mut r: R) -> Result<KnowledgeBase> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    parse_dataset(&text)
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn domain_json(d: &Domain) -> Value {
    match d {
        Domain::Categorical(labels) => json!(labels),
        Domain::Numeric(r) => Value::Array(vec![num(r.lo()), num(r.hi())]),
    }
}

fn value_json(v: &ValueSet) -> Value {
    match v {
        ValueSet::Categories(c) => json!(c),
        ValueSet::Intervals(u) => Value::Array(
            u.pieces().iter().map(|iv| Value::Array(vec![num(iv.lo()), num(iv.hi())])).collect(),
        ),
    }
}

/// JSON document for an objects file; `metadata` is stored verbatim.
pub fn dataset_to_json(kb: &KnowledgeBase, metadata: Option<Value>) -> Value {
    let variables: Vec<Value> = kb
        .variables()
        .iter()
        .map(|v| {
            json!({
                "name": v.name,
                "type": v.kind().to_string(),
                "domain": domain_json(&v.domain),
            })
        })
        .collect();
    let objects: Vec<Value> = kb
        .assertions()
        .iter()
        .map(|a| {
            let mut values = Map::new();
            for (spec, v) in kb.variables().iter().zip(&a.values) {
                values.insert(spec.name.clone(), value_json(v));
            }
            json!({ "name": a.name, "values": values })
        })
        .collect();
    let mut doc = Map::new();
    if let Some(m) = metadata {
        doc.insert("metadata".into(), m);
    }
    doc.insert("variables".into(), Value::Array(variables));
    doc.insert("objects".into(), Value::Array(objects));
    Value::Object(doc)
}

pub fn write_dataset<W: Write>(mut w: W, kb: &KnowledgeBase, metadata: Option<Value>) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, &dataset_to_json(kb, metadata))?;
    writeln!(w)?;
    Ok(())
}

/// A variable as declared in a kinds file: the domain may be left out and
/// inferred from the data.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableDraft {
    pub name: String,
    pub kind: VariableKind,
    pub domain: Option<Domain>,
    pub output: Option<OutputKind>,
}

pub fn parse_kinds(text: &str) -> Result<Vec<VariableDraft>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("malformed JSON: {e}")))?;
    let vars = as_array(doc.get("variables").ok_or_else(|| parse_err("variables", "missing field"))?, "variables")?;
    vars.iter()
        .enumerate()
        .map(|(l, v)| {
            let path = format!("variables[{l}]");
            let name = as_str(v.get("name").ok_or_else(|| parse_err(&format!("{path}.name"), "missing field"))?, &format!("{path}.name"))?;
            let kind = parse_kind(
                v.get("type").ok_or_else(|| parse_err(&format!("{path}.type"), "missing field"))?,
                &format!("{path}.type"),
            )?;
            let domain = v.get("domain").map(|d| parse_domain(kind, d, &format!("{path}.domain"))).transpose()?;
            let output = v
                .get("output")
                .map(|o| {
                    serde_json::from_value::<OutputKind>(o.clone())
                        .map_err(|e| parse_err(&format!("{path}.output"), e))
                })
                .transpose()?;
            if let Some(o) = output {
                if o.input_kind() != kind {
                    return Err(parse_err(&format!("{path}.output"), format!("{o:?} does not fit a {kind} variable")));
                }
            }
            Ok(VariableDraft { name: name.to_string(), kind, domain, output })
        })
        .collect()
}

struct RawTable {
    columns: HashMap<String, usize>,
    ids: Option<Vec<String>>,
    clusters: Vec<String>,
    cells: Vec<Vec<String>>,
}

fn read_raw<R: Read>(r: R) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let cluster_col = header
        .iter()
        .position(|h| h == "cluster")
        .ok_or_else(|| Error::Parse("individuals: the header has no `cluster` column".into()))?;
    let id_col = (header.first().map(String::as_str) == Some("id")).then_some(0);
    let mut columns = HashMap::new();
    for (c, h) in header.iter().enumerate() {
        if c == cluster_col || Some(c) == id_col {
            continue;
        }
        if columns.insert(h.clone(), c).is_some() {
            return Err(Error::Parse(format!("individuals: column `{h}` appears twice")));
        }
    }
    let mut ids = id_col.map(|_| Vec::new());
    let mut clusters = Vec::new();
    let mut cells = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(Error::Parse(format!("individuals line {}: expected {} cells", line + 2, header.len())));
        }
        let cluster = rec.get(cluster_col).unwrap_or_default();
        if cluster.is_empty() {
            return Err(Error::Parse(format!("individuals line {}: empty cluster", line + 2)));
        }
        clusters.push(cluster.to_string());
        if let (Some(ids), Some(c)) = (ids.as_mut(), id_col) {
            ids.push(rec.get(c).unwrap_or_default().to_string());
        }
        cells.push(rec.iter().map(str::to_string).collect());
    }
    Ok(RawTable { columns, ids, clusters, cells })
}

impl RawTable {
    fn column(&self, name: &str) -> Result<usize> {
        self.columns
            .get(name)
            .copied()
            .ok_or_else(|| Error::Parse(format!("individuals: no column for variable `{name}`")))
    }

    fn check_columns(&self, names: &[&str]) -> Result<()> {
        if let Some(extra) = self.columns.keys().find(|c| !names.contains(&c.as_str())) {
            return Err(Error::Parse(format!("individuals: column `{extra}` is not a declared variable")));
        }
        Ok(())
    }

    fn scalar(&self, row: usize, col: usize, kind: VariableKind, name: &str) -> Result<Option<Scalar>> {
        let cell = &self.cells[row][col];
        if cell.is_empty() {
            return Ok(None);
        }
        Ok(Some(match kind {
            VariableKind::Categorical => Scalar::Category(cell.clone()),
            VariableKind::Numeric => Scalar::Number(cell.parse::<f64>().map_err(|_| {
                Error::Parse(format!("individuals line {}: `{cell}` is not a number (variable `{name}`)", row + 2))
            })?),
        }))
    }

    fn into_table(self, variables: Vec<VariableSpec>) -> Result<IndividualTable> {
        let names: Vec<&str> = variables.iter().map(|v| v.name.as_str()).collect();
        self.check_columns(&names)?;
        let cols = variables.iter().map(|v| self.column(&v.name)).collect::<Result<Vec<_>>>()?;
        let rows = (0..self.cells.len())
            .map(|r| {
                variables
                    .iter()
                    .zip(&cols)
                    .map(|(v, &c)| self.scalar(r, c, v.kind(), &v.name))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        match self.ids {
            Some(ids) => IndividualTable::with_labels(variables, rows, self.clusters, ids),
            None => IndividualTable::new(variables, rows, self.clusters),
        }
    }
}

/// Reads individuals for known variables (matched to columns by name).
pub fn read_individuals<R: Read>(r: R, variables: &[VariableSpec]) -> Result<IndividualTable> {
    read_raw(r)?.into_table(variables.to_vec())
}

/// Reads individuals for drafted variables, inferring missing domains from the
/// observed values (numeric: `[min, max]`; categorical: sorted labels).
pub fn read_individuals_with_drafts<R: Read>(r: R, drafts: &[VariableDraft]) -> Result<IndividualTable> {
    let raw = read_raw(r)?;
    let mut specs = Vec::with_capacity(drafts.len());
    for d in drafts {
        let domain = match &d.domain {
            Some(dom) => dom.clone(),
            None => {
                let c = raw.column(&d.name)?;
                let observed = (0..raw.cells.len())
                    .filter_map(|r| raw.scalar(r, c, d.kind, &d.name).transpose())
                    .collect::<Result<Vec<_>>>()?;
                if observed.is_empty() {
                    return Err(Error::AllMissing(d.name.clone()));
                }
                match d.kind {
                    VariableKind::Numeric => {
                        let xs = observed.iter().filter_map(|s| match s {
                            Scalar::Number(x) => Some(*x),
                            _ => None,
                        });
                        let lo = xs.clone().fold(f64::INFINITY, f64::min);
                        let hi = xs.fold(f64::NEG_INFINITY, f64::max);
                        Domain::Numeric(Interval::new(lo, hi)?)
                    }
                    VariableKind::Categorical => {
                        let labels: BTreeSet<String> = observed.iter().map(|s| s.to_string()).collect();
                        Domain::Categorical(labels.into_iter().collect())
                    }
                }
            }
        };
        specs.push(make_spec(&d.name, domain, &format!("variable `{}`", d.name))?);
    }
    raw.into_table(specs)
}

/// Writes individuals; the `id` column is emitted when `with_ids` is set.
pub fn write_individuals<W: Write>(w: W, t: &IndividualTable, with_ids: bool) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<&str> = Vec::new();
    if with_ids {
        header.push("id");
    }
    header.extend(t.variables().iter().map(|v| v.name.as_str()));
    header.push("cluster");
    out.write_record(&header)?;
    for (r, row) in t.rows().iter().enumerate() {
        let mut rec: Vec<String> = Vec::with_capacity(header.len());
        if with_ids {
            rec.push(t.labels()[r].clone());
        }
        rec.extend(row.iter().map(|x| x.as_ref().map(Scalar::to_string).unwrap_or_default()));
        rec.push(t.clusters()[r].clone());
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEIGHTS: &str = r#"{
        "variables": [
            {"name": "height", "type": "numeric", "domain": [100, 220]},
            {"name": "hair", "type": "categorical", "domain": ["brown", "black", "grey"]}
        ],
        "objects": [
            {"name": "a1", "values": {"height": [[170, 190], [150, 165]], "hair": ["brown"]}},
            {"name": "a2", "values": {"height": [[165, 170]], "hair": ["black", "brown"]}},
            {"name": "a3", "values": {"height": [[180, 180]], "hair": []}}
        ]
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let kb = parse_dataset(HEIGHTS).unwrap();
        assert_eq!(kb.n_variables(), 2);
        assert_eq!(kb.assertions()[0].values[0], ValueSet::intervals(&[(150.0, 165.0), (170.0, 190.0)]).unwrap());
        let text = serde_json::to_string(&dataset_to_json(&kb, None)).unwrap();
        assert_eq!(parse_dataset(&text).unwrap(), kb);
    }

    #[test]
    fn floats_survive_json_and_csv() {
        let x = 197.09805135985397;
        let kb = parse_dataset(&HEIGHTS.replace("[[180, 180]]", &format!("[[{x}, {x}]]"))).unwrap();
        let text = serde_json::to_string(&dataset_to_json(&kb, None)).unwrap();
        assert_eq!(parse_dataset(&text).unwrap(), kb);
        let t = read_individuals(format!("height,hair,cluster\n{x},grey,a\n").as_bytes(), kb.variables()).unwrap();
        assert!(kb.assertions()[2].values[0].contains(&t.rows()[0][0].clone().unwrap()).unwrap());
    }

    #[test]
    fn errors_name_the_field() {
        let bad = HEIGHTS.replace(r#"[[165, 170]]"#, r#"[[165]]"#);
        let err = parse_dataset(&bad).unwrap_err().to_string();
        assert!(err.contains("objects[1].values.height[0]"), "{err}");

        let bad = HEIGHTS.replace(r#""type": "numeric""#, r#""type": "ordinal""#);
        let err = parse_dataset(&bad).unwrap_err().to_string();
        assert!(err.contains("variables[0].type"), "{err}");

        let bad = HEIGHTS.replace(r#""hair": []"#, r#""hair": ["red"]"#);
        let err = parse_dataset(&bad).unwrap_err().to_string();
        assert!(err.contains("objects[2].values.hair"), "{err}");

        assert!(parse_dataset("{not json").unwrap_err().to_string().contains("malformed JSON"));
    }

    #[test]
    fn individuals_with_ids_and_missing() {
        let kb = parse_dataset(HEIGHTS).unwrap();
        let csv = "id,hair,height,cluster\nAlain,brown,170,a1\nJohn,,,a2\n";
        let t = read_individuals(csv.as_bytes(), kb.variables()).unwrap();
        assert_eq!(t.labels(), &["Alain".to_string(), "John".to_string()]);
        assert_eq!(t.rows()[0][0], Some(Scalar::Number(170.0)));
        assert_eq!(t.rows()[1][1], None);

        let mut buf = Vec::new();
        write_individuals(&mut buf, &t, true).unwrap();
        let back = read_individuals(buf.as_slice(), kb.variables()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn individuals_column_mismatch() {
        let kb = parse_dataset(HEIGHTS).unwrap();
        assert!(read_individuals("height,eyes,cluster\n1,2,a\n".as_bytes(), kb.variables()).is_err());
        assert!(read_individuals("height,hair\n150,brown\n".as_bytes(), kb.variables()).is_err());
    }

    #[test]
    fn drafts_infer_domains() {
        let kinds = r#"{"variables": [
            {"name": "height", "type": "numeric", "output": "interval"},
            {"name": "eyes", "type": "categorical"}
        ]}"#;
        let drafts = parse_kinds(kinds).unwrap();
        let t = read_individuals_with_drafts("height,eyes,cluster\n150,blue,a\n190,green,b\n".as_bytes(), &drafts)
            .unwrap();
        assert_eq!(t.variables()[0].domain, Domain::Numeric(Interval::new(150.0, 190.0).unwrap()));
        assert_eq!(t.variables()[1].domain, Domain::Categorical(vec!["blue".into(), "green".into()]));

        let bad = r#"{"variables": [{"name": "h", "type": "numeric", "output": "categorical-set"}]}"#;
        assert!(parse_kinds(bad).is_err());
    }
}
