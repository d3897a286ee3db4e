//! Curve catalog files: one curve per line, `label a1 a2 a3 a4 a6`, with an
//! optional trailing `optimal` / `non-optimal` marker. `#` starts a comment.

use std::str::FromStr;

use rug::Integer;

use super::{CurveError, CurveModel};

pub const DEFAULT_CATALOG: &str = include_str!("default_catalog.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub label: String,
    pub curve: CurveModel,
    pub optimal: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
}

pub fn parse_catalog(text: &str) -> Result<Catalog, CurveError> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let optimal = match toks.len() {
            6 => true,
            7 if toks[6] == "optimal" => true,
            7 if toks[6] == "non-optimal" => false,
            _ => {
                return Err(CurveError::Parse(format!(
                    "catalog line {}: expected `label a1 a2 a3 a4 a6`",
                    lineno + 1
                )))
            }
        };
        let mut a = Vec::with_capacity(5);
        for t in &toks[1..6] {
            a.push(Integer::from_str(t).map_err(|_| {
                CurveError::Parse(format!("catalog line {}: not an integer: {t}", lineno + 1))
            })?);
        }
        let curve = CurveModel::new(a.try_into().expect("five coefficients"))?;
        entries.push(CatalogEntry {
            label: toks[0].to_string(),
            curve,
            optimal,
        });
    }
    Ok(Catalog { entries })
}

impl Catalog {
    pub fn default_catalog() -> Self {
        parse_catalog(DEFAULT_CATALOG).expect("embedded catalog parses")
    }

    pub fn lookup(&self, label: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.label.eq_ignore_ascii_case(label))
    }

    /// Label of a curve equal to the given model, if catalogued.
    pub fn label_of(&self, e: &CurveModel) -> Option<&str> {
        self.entries.iter().find(|c| &c.curve == e).map(|c| c.label.as_str())
    }

    /// Resolves a label or a coefficient list.
    pub fn resolve(&self, spec: &str) -> Result<(Option<String>, CurveModel), CurveError> {
        if let Some(entry) = self.lookup(spec.trim()) {
            return Ok((Some(entry.label.clone()), entry.curve.clone()));
        }
        let e: CurveModel = spec.parse()?;
        let label = self.label_of(&e).map(str::to_string);
        Ok((label, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_catalog_contents() {
        let c = Catalog::default_catalog();
        assert_eq!(c.lookup("14a1").unwrap().curve.to_string(), "[1,0,1,4,-6]");
        assert_eq!(c.lookup("99C1").unwrap().curve.to_string(), "[1,-1,0,-15,8]");
        assert!(c.lookup("46A1").unwrap().optimal);
        assert_eq!(c.resolve("[1,0,0,-3,1]").unwrap().0.as_deref(), Some("34A1"));
    }

    #[test]
    fn malformed_lines() {
        assert!(parse_catalog("X 1 2 3").is_err());
        assert!(parse_catalog("X 1 2 3 4 z").is_err());
        assert!(parse_catalog("X 0 0 0 0 0").is_err());
        let c = parse_catalog("# comment\nA 0 0 1 -1 0 non-optimal\n").unwrap();
        assert!(!c.entries[0].optimal);
    }
}
