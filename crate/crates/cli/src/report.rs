//! JSON run report written next to a mesh.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Summary of one `gen` run.
///
/// `wall_ms` is the only field that varies between identical invocations;
/// [`RunReport::comparable`] drops it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub family: String,
    pub m: u32,
    pub params: Map<String, Value>,
    /// `[rows, cols]` of the parameter grid.
    pub grid: [usize; 2],
    #[serde(rename = "max_abs_H_analytic")]
    pub max_abs_h_analytic: Option<f64>,
    #[serde(rename = "max_abs_H_numeric")]
    pub max_abs_h_numeric: Option<f64>,
    pub constraint_residuals: Option<[f64; 6]>,
    pub skipped_vertices: usize,
    pub domain_nonempty: bool,
    pub wall_ms: Option<f64>,
}

impl RunReport {
    pub fn write<W: Write>(&self, mut w: W) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        w.flush()
    }

    /// The report as JSON with `wall_ms` removed.
    pub fn comparable(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(map) = &mut v {
            map.remove("wall_ms");
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        RunReport {
            family: "translation".into(),
            m: 2,
            params: Map::from_iter([("a".to_string(), Value::from(1.0))]),
            grid: [3, 4],
            max_abs_h_analytic: Some(1e-12),
            max_abs_h_numeric: None,
            constraint_residuals: None,
            skipped_vertices: 0,
            domain_nonempty: true,
            wall_ms: Some(12.5),
        }
    }

    #[test]
    fn field_names_are_exact() {
        let v = serde_json::to_value(sample()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        let mut expected = [
            "family",
            "m",
            "params",
            "grid",
            "max_abs_H_analytic",
            "max_abs_H_numeric",
            "constraint_residuals",
            "skipped_vertices",
            "domain_nonempty",
            "wall_ms",
        ];
        expected.sort_unstable();
        let mut keys = keys;
        keys.sort_unstable();
        assert_eq!(keys, expected);
    }

    #[test]
    fn comparable_ignores_timing() {
        let a = sample();
        let mut b = sample();
        b.wall_ms = Some(99.0);
        assert_ne!(a, b);
        assert_eq!(a.comparable(), b.comparable());
    }

    #[test]
    fn round_trips_through_json() {
        let mut buf = Vec::new();
        sample().write(&mut buf).unwrap();
        let back: RunReport = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, sample());
    }
}
