//! Ruled-surface spec files:
//!
//! ```text
//! gamma = "(log(s), 1/(2*s), -1/(2*s))"
//! w = "(1, s, s)"
//! s_range = 0.5, 2
//! t_range = 1, 2
//! v = 1, 0, 0        # optional
//! ```

use std::fs;
use std::path::Path;
use std::sync::Arc;

use soliton_core::classify::RuledSurfaceSpec;
use soliton_core::curve::SharedCurve;
use soliton_core::expr::parse_surface_expr;
use soliton_core::keyvalue::{self, KeyValueFile};
use soliton_core::Vec3;

use crate::error::CliError;

const KEYS: &[&str] = &["gamma", "w", "s_range", "t_range", "v"];

#[derive(Debug, Clone)]
pub struct SpecFile {
    pub spec: RuledSurfaceSpec,
    pub velocity: Option<Vec3>,
}

pub fn load(path: &Path) -> Result<SpecFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(path, &text)
}

pub fn parse(path: &Path, text: &str) -> Result<SpecFile, CliError> {
    let file = keyvalue::parse(text).map_err(|e| CliError::parse(path, e.line, e.column, e.message))?;
    if let Some(e) = file.entries.iter().find(|e| !KEYS.contains(&e.key.as_str())) {
        return Err(CliError::parse(path, e.line, 1, format!("unknown key `{}`", e.key)));
    }
    let gamma = curve(path, &file, "gamma")?;
    let director = curve(path, &file, "w")?;
    let s_range = pair(path, &file, "s_range")?;
    let t_range = pair(path, &file, "t_range")?;
    let velocity = file
        .reals("v", 3)
        .map_err(|e| CliError::parse(path, e.line, e.column, e.message))?
        .map(|v| Vec3::new(v[0], v[1], v[2]));
    Ok(SpecFile {
        spec: RuledSurfaceSpec::new(gamma, director, s_range, t_range),
        velocity,
    })
}

fn missing(path: &Path, file: &KeyValueFile, key: &str) -> CliError {
    let line = file.entries.last().map_or(1, |e| e.line + 1);
    CliError::parse(path, line, 1, format!("missing required key `{key}`"))
}

fn curve(path: &Path, file: &KeyValueFile, key: &str) -> Result<SharedCurve<f64>, CliError> {
    let entry = file.get(key).ok_or_else(|| missing(path, file, key))?;
    let c = parse_surface_expr(&entry.value)
        .map_err(|e| CliError::parse(path, entry.line, entry.column + e.column - 1, e.message))?;
    Ok(Arc::new(c))
}

fn pair(path: &Path, file: &KeyValueFile, key: &str) -> Result<(f64, f64), CliError> {
    let entry = file.get(key).ok_or_else(|| missing(path, file, key))?;
    let v = file
        .reals(key, 2)
        .map_err(|e| CliError::parse(path, e.line, e.column, e.message))?
        .expect("entry exists");
    if !(v[0] < v[1]) {
        return Err(CliError::parse(
            path,
            entry.line,
            entry.column,
            format!("`{key}` must satisfy lower < upper, got {}, {}", v[0], v[1]),
        ));
    }
    Ok((v[0], v[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_intro_x() {
        let f = parse(
            Path::new("x.spec"),
            "gamma = \"(log(s), 1/(2*s), -1/(2*s))\"\nw = \"(1, s, s)\"\ns_range = 0.5, 2\nt_range = 1, 2\nv = 1,0,0\n",
        )
        .unwrap();
        assert_eq!(f.velocity, Some(Vec3::e1()));
        assert_eq!(f.spec.domain.s, (0.5, 2.0));
        let p = f.spec.gamma.point(1.0).unwrap();
        assert_eq!(p, Vec3::new(0.0, 0.5, -0.5));
    }

    #[test]
    fn error_positions_point_into_the_expression() {
        let err = parse(Path::new("bad.spec"), "gamma = \"(s, s, )\"\nw = \"(1,0,0)\"\n").unwrap_err();
        match err {
            CliError::Parse { line, column, .. } => {
                assert_eq!(line, 1);
                assert!(column > 10, "{column}");
            }
            other => panic!("{other:?}"),
        }
        let err = parse(
            Path::new("bad.spec"),
            "gamma = \"(s, s, s)\"\nw = \"(1,0,0)\"\ns_range = 0, 1\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("t_range"));
    }
}
