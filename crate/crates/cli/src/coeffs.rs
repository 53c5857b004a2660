//! Coefficient files: `{"case": "exp"|"trig"|"poly", "b": .., "p": [..], "q": [..], "r": [..]}`.

use std::path::Path;

use normsurf_core::{CoefficientSet, Family};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Exp,
    Trig,
    Poly,
}

/// On-disk form of a coefficient set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientFile {
    pub case: Case,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    pub p: [f64; 3],
    pub q: [f64; 3],
    pub r: [f64; 3],
}

impl CoefficientFile {
    pub fn to_set(&self) -> Result<CoefficientSet, String> {
        let family = match (self.case, self.b) {
            (Case::Exp, Some(b)) => Family::Exp { b },
            (Case::Trig, Some(b)) => Family::Trig { b },
            (Case::Poly, _) => Family::Poly,
            (_, None) => return Err(format!("field b is required for case {:?}", self.case)),
        };
        CoefficientSet::new(family, self.p, self.q, self.r).map_err(|e| e.to_string())
    }

    pub fn from_set(c: &CoefficientSet) -> Self {
        let case = match c.family {
            Family::Exp { .. } => Case::Exp,
            Family::Trig { .. } => Case::Trig,
            Family::Poly => Case::Poly,
        };
        Self { case, b: c.family.b(), p: c.p, q: c.q, r: c.r }
    }
}

pub fn parse(text: &str) -> Result<CoefficientSet, String> {
    let file: CoefficientFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    file.to_set()
}

pub fn load(path: &Path) -> Result<CoefficientSet, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use normsurf_core::separable::{preset, PRESET_NAMES};

    #[test]
    fn presets_round_trip() {
        for name in PRESET_NAMES {
            let c = preset(name).unwrap().coeffs;
            let text = serde_json::to_string(&CoefficientFile::from_set(&c)).unwrap();
            assert_eq!(parse(&text).unwrap(), c, "{name}");
        }
    }

    #[test]
    fn poly_ignores_b() {
        let c = parse(r#"{"case":"poly","p":[1,2,3],"q":[0,0,0],"r":[0,0,0]}"#).unwrap();
        assert_eq!(c.family, Family::Poly);
    }

    #[test]
    fn rejects_malformed() {
        for text in [
            r#"{"case":"exp","p":[1,2,3],"q":[0,0,0],"r":[0,0,0]}"#,
            r#"{"case":"trig","b":-1,"p":[1,2,3],"q":[0,0,0],"r":[0,0,0]}"#,
            r#"{"case":"cubic","b":1,"p":[1,2,3],"q":[0,0,0],"r":[0,0,0]}"#,
            r#"{"case":"poly","p":[1,2],"q":[0,0,0],"r":[0,0,0]}"#,
            r#"{"case":"poly","p":[1,2,3],"q":[0,0,0],"r":[0,0,0],"s":1}"#,
            "not json",
        ] {
            assert!(parse(text).is_err(), "{text}");
        }
    }
}
