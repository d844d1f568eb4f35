//! Plain-text `key = value` files with `#` comments.
//!
//! Values may be wrapped in double quotes; a `#` inside quotes is literal.

use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct KeyValueError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
    /// 1-based column where the value starts.
    pub column: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValueFile {
    pub entries: Vec<Entry>,
}

impl KeyValueFile {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn value(&self, key: &str) -> Option<&str> {
        self.get(key).map(|e| e.value.as_str())
    }

    /// Parses `key` as `T`, reporting the entry's position on failure.
    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, KeyValueError>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e.value.trim().parse::<T>().map(Some).map_err(|err| KeyValueError {
                line: e.line,
                column: e.column,
                message: format!("invalid value for `{key}`: {err}"),
            }),
        }
    }

    /// Comma-separated reals, e.g. `1, 0, 0`.
    pub fn reals(&self, key: &str, count: usize) -> Result<Option<Vec<f64>>, KeyValueError> {
        let Some(e) = self.get(key) else { return Ok(None) };
        let err = |message: String| KeyValueError {
            line: e.line,
            column: e.column,
            message,
        };
        let parts = e
            .value
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|x| err(format!("invalid number in `{key}`: {x}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if parts.len() != count {
            return Err(err(format!(
                "`{key}` needs {count} comma-separated values, got {}",
                parts.len()
            )));
        }
        Ok(Some(parts))
    }
}

pub fn parse(text: &str) -> Result<KeyValueFile, KeyValueError> {
    let mut entries: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = strip_comment(raw);
        if body.trim().is_empty() {
            continue;
        }
        let Some(eq) = body.find('=') else {
            return Err(KeyValueError {
                line,
                column: body.len() - body.trim_start().len() + 1,
                message: "expected `key = value`".into(),
            });
        };
        let key = body[..eq].trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(KeyValueError {
                line,
                column: 1,
                message: format!("invalid key `{key}`"),
            });
        }
        let after = &body[eq + 1..];
        let lead = after.len() - after.trim_start().len();
        let column = eq + 2 + lead;
        let mut value = after.trim();
        if let Some(rest) = value.strip_prefix('"') {
            value = rest.strip_suffix('"').ok_or_else(|| KeyValueError {
                line,
                column,
                message: "unterminated string".into(),
            })?;
        }
        if entries.iter().any(|e| e.key == key) {
            return Err(KeyValueError {
                line,
                column: 1,
                message: format!("duplicate key `{key}`"),
            });
        }
        entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            line,
            column: column + usize::from(after.trim_start().starts_with('"')),
        });
    }
    Ok(KeyValueFile { entries })
}

fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_spec_file() {
        let f = parse(
            "# ruled surface\n\
             gamma = \"(log(s), 1/(2*s), -1/(2*s))\"\n\
             w = \"(1, s, s)\"   # director\n\
             s_range = 1, 2\n\
             \n\
             tol=1e-8\n",
        )
        .unwrap();
        assert_eq!(f.value("gamma"), Some("(log(s), 1/(2*s), -1/(2*s))"));
        assert_eq!(f.value("w"), Some("(1, s, s)"));
        assert_eq!(f.reals("s_range", 2).unwrap(), Some(vec![1.0, 2.0]));
        assert_eq!(f.parse::<f64>("tol").unwrap(), Some(1e-8));
        assert_eq!(f.get("w").unwrap().line, 3);
        assert_eq!(f.get("gamma").unwrap().column, 10);
    }

    #[test]
    fn hash_inside_quotes_is_kept() {
        let f = parse("label = \"a # b\"").unwrap();
        assert_eq!(f.value("label"), Some("a # b"));
    }

    #[test]
    fn reports_positions() {
        let e = parse("a = 1\n  oops\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        let e = parse("a = 1\na = 2").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse("x = \"open").unwrap_err();
        assert!(e.message.contains("unterminated"));
        let f = parse("v = 1, 2").unwrap();
        assert!(f.reals("v", 3).is_err());
    }
}
