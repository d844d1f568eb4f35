//! Flag values merged with an optional config file.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use soliton_core::keyvalue::{self, KeyValueFile};
use soliton_core::surface::Grid;
use soliton_core::Vec3;

use crate::args::{Format, GlobalArgs};
use crate::error::CliError;

const KNOWN_KEYS: &[&str] = &[
    "tol", "grid", "out", "format", "seed", "a", "b", "v1", "v2", "v3", "k", "eps", "sign", "base", "case", "profile",
    "s_range", "t_range", "v", "init", "range", "ode_tol",
];

pub struct Settings {
    pub global: GlobalArgs,
    config: KeyValueFile,
    config_path: Option<PathBuf>,
}

impl Settings {
    pub fn load(global: GlobalArgs) -> Result<Self, CliError> {
        let (config, config_path) = match &global.config {
            None => (KeyValueFile::default(), None),
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                let file = keyvalue::parse(&text).map_err(|e| CliError::parse(path, e.line, e.column, e.message))?;
                if let Some(e) = file.entries.iter().find(|e| !KNOWN_KEYS.contains(&e.key.as_str())) {
                    return Err(CliError::parse(path, e.line, 1, format!("unknown key `{}`", e.key)));
                }
                (file, Some(path.clone()))
            }
        };
        Ok(Settings {
            global,
            config,
            config_path,
        })
    }

    fn config_value<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.config.parse::<T>(key).map_err(|e| {
            let path = self.config_path.as_deref().unwrap_or(Path::new("<config>"));
            CliError::parse(path, e.line, e.column, e.message)
        })
    }

    /// The flag if given, else the config entry.
    pub fn real(&self, key: &str, flag: Option<f64>) -> Result<Option<f64>, CliError> {
        match flag {
            Some(x) => Ok(Some(x)),
            None => self.config_value::<f64>(key),
        }
    }

    pub fn text(&self, key: &str, flag: Option<&str>) -> Option<String> {
        flag.map(str::to_string)
            .or_else(|| self.config.value(key).map(str::to_string))
    }

    pub fn tol(&self, default: f64) -> Result<f64, CliError> {
        let tol = self.real("tol", self.global.tol)?.unwrap_or(default);
        if tol > 0.0 && tol.is_finite() {
            Ok(tol)
        } else {
            Err(CliError::Usage(format!("--tol must be positive, got {tol}")))
        }
    }

    pub fn grid(&self, default: Grid) -> Result<Grid, CliError> {
        match self.text("grid", self.global.grid.as_deref()) {
            None => Ok(default),
            Some(text) => parse_grid(&text),
        }
    }

    pub fn out(&self) -> Option<PathBuf> {
        self.global
            .out
            .clone()
            .or_else(|| self.config.value("out").map(PathBuf::from))
    }

    pub fn format(&self) -> Result<Format, CliError> {
        if let Some(f) = self.global.format {
            return Ok(f);
        }
        match self.config.value("format") {
            Some("csv") => Ok(Format::Csv),
            Some("obj") => Ok(Format::Obj),
            Some(other) => Err(CliError::Usage(format!("format must be csv or obj, got `{other}`"))),
            None => Ok(match self.out() {
                Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("obj")) => Format::Obj,
                _ => Format::Csv,
            }),
        }
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        match self.global.seed {
            Some(s) => Ok(s),
            None => Ok(self.config_value::<u64>("seed")?.unwrap_or(0)),
        }
    }

    /// `count` comma-separated reals from a flag or config key.
    pub fn reals(&self, key: &str, flag: Option<&str>, count: usize) -> Result<Option<Vec<f64>>, CliError> {
        match self.text(key, flag) {
            None => Ok(None),
            Some(text) => parse_reals(key, &text, count).map(Some),
        }
    }

    pub fn pair(&self, key: &str, flag: Option<&str>) -> Result<Option<(f64, f64)>, CliError> {
        Ok(self.reals(key, flag, 2)?.map(|v| (v[0], v[1])))
    }

    pub fn vector(&self, key: &str, flag: Option<&str>) -> Result<Option<Vec3>, CliError> {
        Ok(self.reals(key, flag, 3)?.map(|v| Vec3::new(v[0], v[1], v[2])))
    }
}

pub fn parse_grid(text: &str) -> Result<Grid, CliError> {
    let bad = || CliError::Usage(format!("grid must look like 30x30, got `{text}`"));
    let (w, h) = text.trim().split_once(['x', 'X']).ok_or_else(bad)?;
    let grid = Grid::new(
        w.trim().parse().map_err(|_| bad())?,
        h.trim().parse().map_err(|_| bad())?,
    );
    grid.validate().map_err(|e| CliError::Usage(e.to_string()))
}

pub fn parse_reals(key: &str, text: &str, count: usize) -> Result<Vec<f64>, CliError> {
    let values = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("`{key}`: {e} in `{text}`")))?;
    if values.len() != count {
        return Err(CliError::Usage(format!(
            "`{key}` needs {count} comma-separated numbers, got `{text}`"
        )));
    }
    if values.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Usage(format!("`{key}` must be finite, got `{text}`")));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_syntax() {
        assert_eq!(parse_grid("50x40").unwrap(), Grid::new(50, 40));
        assert!(parse_grid("50").is_err());
        assert!(parse_grid("1x10").is_err());
    }

    #[test]
    fn reals_syntax() {
        assert_eq!(parse_reals("v", "1, -2,3e-1", 3).unwrap(), vec![1.0, -2.0, 0.3]);
        assert!(parse_reals("v", "1,2", 3).is_err());
        assert!(parse_reals("v", "1,x,2", 3).is_err());
    }
}
