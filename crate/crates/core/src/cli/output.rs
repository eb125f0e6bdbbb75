//! Tabular rendering of metric results as CSV or JSON.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::metrics::{Bucket, Distribution, MemberTypeReport, TypeShareTable};
use crate::model::NodeId;

/// A header plus rows of JSON scalars. Floats keep full precision in JSON
/// and are rounded to the column's decimal places in CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub decimals: Vec<i32>,
    pub rows: Vec<Vec<Value>>,
}

const CDF_DECIMALS: i32 = 6;
const PERCENT_DECIMALS: i32 = 1;

fn cell_text(v: &Value, decimals: i32) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => json!(round(n.as_f64().unwrap(), decimals)).to_string(),
        other => other.to_string(),
    }
}

impl Table {
    fn new(columns: &[(&'static str, i32)]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.0).collect(),
            decimals: columns.iter().map(|c| c.1).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(
                row.iter()
                    .zip(&self.decimals)
                    .map(|(v, &d)| cell_text(v, d)),
            )
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }

    pub fn to_json(&self, metric: &str) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .map(|c| c.to_string())
                    .zip(row.iter().cloned())
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({"metric": metric, "rows": rows});
        format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
    }
}

fn round(x: f64, digits: i32) -> f64 {
    let p = 10f64.powi(digits);
    (x * p).round() / p
}

fn percent(count: u64, total: u64) -> Value {
    if total == 0 {
        return json!(0.0);
    }
    json!(100.0 * count as f64 / total as f64)
}

fn cdf_table(dist: &Distribution, value_col: &'static str) -> Table {
    let mut t = Table::new(&[(value_col, 0), ("count", 0), ("cdf", CDF_DECIMALS)]);
    for (v, c, f) in dist.cdf() {
        t.rows.push(vec![json!(v), json!(c), json!(f)]);
    }
    t
}

pub fn degree_cdf(dist: &Distribution) -> Table {
    cdf_table(dist, "degree")
}

pub fn gain_cdf(dist: &Distribution) -> Table {
    cdf_table(dist, "gain")
}

pub fn member_types(report: &MemberTypeReport) -> Table {
    let mut t = Table::new(&[
        ("ixp_id", 0),
        ("content", CDF_DECIMALS),
        ("enterprise", CDF_DECIMALS),
        ("isp", CDF_DECIMALS),
    ]);
    for (id, f) in &report.per_ixp {
        t.rows.push(vec![
            json!(id.as_str()),
            json!(f.content),
            json!(f.enterprise),
            json!(f.isp),
        ]);
    }
    t
}

pub fn type_share(table: &TypeShareTable) -> Table {
    let mut t = Table::new(&[
        ("group", 0),
        ("ases", 0),
        ("content_pct", PERCENT_DECIMALS),
        ("enterprise_pct", PERCENT_DECIMALS),
        ("isp_pct", PERCENT_DECIMALS),
    ]);
    for row in &table.rows {
        let f = &row.fractions;
        t.rows.push(vec![
            json!(row.label),
            json!(row.as_count),
            json!(100.0 * f.content),
            json!(100.0 * f.enterprise),
            json!(100.0 * f.isp),
        ]);
    }
    t
}

pub fn path_counts(dist: &Distribution) -> Table {
    let mut t = Table::new(&[
        ("ixps_crossed", 0),
        ("count", 0),
        ("percent", PERCENT_DECIMALS),
    ]);
    for &(v, c) in dist.values() {
        t.rows
            .push(vec![json!(v), json!(c), percent(c, dist.total())]);
    }
    t
}

pub fn multiplicity(dist: &Distribution, bucket: Option<u64>) -> Table {
    let mut t = Table::new(&[
        ("multiplicity", 0),
        ("count", 0),
        ("percent", PERCENT_DECIMALS),
    ]);
    match bucket {
        Some(cap) => {
            for (b, c) in dist.bucketed(cap) {
                let label = match b {
                    Bucket::Exact(v) => json!(v),
                    Bucket::AtLeast(_) => json!(b.to_string()),
                };
                t.rows.push(vec![label, json!(c), percent(c, dist.total())]);
            }
        }
        None => {
            for &(v, c) in dist.values() {
                t.rows
                    .push(vec![json!(v), json!(c), percent(c, dist.total())]);
            }
        }
    }
    t
}

pub fn correlation(r: f64) -> Table {
    let mut t = Table::new(&[("pearson_r", CDF_DECIMALS)]);
    t.rows.push(vec![json!(r)]);
    t
}

pub fn node_scores(column: &'static str, scores: &BTreeMap<NodeId, f64>) -> Table {
    let mut t = Table::new(&[("node", 0), (column, CDF_DECIMALS)]);
    for (node, s) in scores {
        let label = match node {
            NodeId::Ixp(id) => id.to_string(),
            NodeId::As(a) => a.get().to_string(),
        };
        t.rows.push(vec![json!(label), json!(*s)]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rendering() {
        let d = Distribution::from_samples([1, 3, 3]);
        assert_eq!(
            path_counts(&d).to_csv(),
            "ixps_crossed,count,percent\n1,1,33.3\n3,2,66.7\n"
        );
    }

    #[test]
    fn bucketed_rows() {
        let d = Distribution::from_samples([0, 1, 2, 5]);
        let csv = multiplicity(&d, Some(2)).to_csv();
        assert_eq!(
            csv,
            "multiplicity,count,percent\n0,1,25.0\n1,1,25.0\n>=2,2,50.0\n"
        );
    }
}
