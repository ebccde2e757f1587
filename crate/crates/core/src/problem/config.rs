//! Flat key/value problem files.
//!
//! ```text
//! # comment
//! [domain]
//! g_plus  = 1 + x/2
//! g_minus = -1
//! [operator]
//! alpha = 1
//! family.0.sigma = 1, 0; 0, 1
//! ```
//!
//! Keys inside a section are relative to it (`g_plus` under `[domain]` is
//! `domain.g_plus`); before the first section header keys must be written in
//! full dotted form. Values may be wrapped in double quotes. Every value is
//! checked against the key schema and stored in a normalized textual form,
//! so `ProblemConfig` equality ignores whitespace, comments and ordering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::expr::{Expr, ExprError, Var};

pub const SECTIONS: [&str; 5] = ["domain", "oblique", "lateral", "operator", "solver"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyKind {
    /// expression in x only
    Line,
    /// expression in x and y
    Strip,
    /// constant expression, stored as a float
    Number,
    Integer,
    Choice(&'static [&'static str]),
    /// rows of a k×2 matrix: `a, b; c, d`
    Matrix,
    /// 2-vector: `a, b`
    Vector,
}

pub const LATERAL_KINDS: &[&str] = &["neumann", "oblique", "dirichlet"];
pub const CORNER_RULES: &[&str] = &["prefer_top_bottom", "prefer_lateral"];
pub const METHODS: &[&str] = &["policy", "damped"];

fn is_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Canonical key and its kind, or `None` for unknown keys. Family keys of
/// the shorthand form `operator.family.L.field` are expanded to
/// `operator.family.L.0.field`.
pub fn resolve_key(key: &str) -> Option<(String, KeyKind)> {
    let parts: Vec<&str> = key.split('.').collect();
    let kind = match parts.as_slice() {
        ["domain", "g_plus" | "g_minus" | "h"] => KeyKind::Line,
        ["domain", "g_plus" | "g_minus" | "h", "dx"] => KeyKind::Line,
        ["domain", "delta0"] => KeyKind::Number,
        ["oblique", "gamma1_plus" | "gamma1_minus" | "beta_plus" | "beta_minus"] => KeyKind::Strip,
        ["oblique", "gamma1_plus" | "gamma1_minus" | "beta_plus" | "beta_minus", "dx" | "dy"] => KeyKind::Strip,
        ["oblique", "k_plus" | "k_minus" | "l_plus" | "l_minus"] => KeyKind::Line,
        ["lateral", "kind"] => KeyKind::Choice(LATERAL_KINDS),
        ["lateral", "gamma1" | "gamma2" | "beta"] => KeyKind::Strip,
        ["operator", "alpha" | "c_f"] => KeyKind::Number,
        ["operator", "family", l, field] if is_label(l) => {
            return family_kind(field).map(|k| (format!("operator.family.{}.0.{}", l, field), k));
        }
        ["operator", "family", l, m, field] if is_label(l) && is_label(m) => family_kind(field)?,
        ["solver", "nx" | "nt" | "nx_limit" | "max_iter" | "samples" | "seed"] => KeyKind::Integer,
        ["solver", "tol" | "damping" | "eps"] => KeyKind::Number,
        ["solver", "corner_rule"] => KeyKind::Choice(CORNER_RULES),
        ["solver", "method"] => KeyKind::Choice(METHODS),
        _ => return None,
    };
    Some((key.to_string(), kind))
}

fn family_kind(field: &str) -> Option<KeyKind> {
    match field {
        "sigma" => Some(KeyKind::Matrix),
        "drift" => Some(KeyKind::Vector),
        "c" | "f" => Some(KeyKind::Strip),
        _ => None,
    }
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub value: String,
    /// 1-based source position of the value; line 0 marks an override.
    pub line: usize,
    pub col: usize,
}

/// Normalized contents of a problem file.
#[derive(Debug, Clone, Default)]
pub struct ProblemConfig {
    entries: BTreeMap<String, Entry>,
}

impl PartialEq for ProblemConfig {
    fn eq(&self, other: &Self) -> bool {
        self.entries.len() == other.entries.len()
            && self.entries.iter().zip(other.entries.iter()).all(|((ka, a), (kb, b))| ka == kb && a.value == b.value)
    }
}

fn expr_err(line: usize, col: usize, e: ExprError) -> Error {
    Error::Parse { line, col: col + e.offset, msg: e.message }
}

/// Splits at `sep` outside parentheses, returning each piece with its
/// character offset.
pub fn split_top(s: &str, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    let mut start_chars = 0usize;
    for (ci, (bi, c)) in s.char_indices().enumerate() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ if c == sep && depth == 0 => {
                out.push((start_chars, &s[start..bi]));
                start = bi + c.len_utf8();
                start_chars = ci + 1;
            }
            _ => {}
        }
    }
    out.push((start_chars, &s[start..]));
    out
}

fn leading_ws(s: &str) -> usize {
    s.chars().take_while(|c| c.is_whitespace()).count()
}

fn parse_expr_at(src: &str, line: usize, col: usize, allow_y: bool) -> Result<Expr> {
    let e = Expr::parse(src).map_err(|e| expr_err(line, col, e))?;
    if !allow_y && e.uses(Var::Y) {
        let off = src.find('y').map(|b| src[..b].chars().count()).unwrap_or(0);
        return Err(Error::Parse { line, col: col + off, msg: "this field depends on x only; 'y' is not allowed".into() });
    }
    Ok(e)
}

fn join_exprs(src: &str, line: usize, col: usize, n: usize) -> Result<String> {
    let parts = split_top(src, ',');
    if parts.len() != n {
        return Err(Error::Parse { line, col, msg: format!("expected {} comma-separated entries, found {}", n, parts.len()) });
    }
    let mut out = Vec::with_capacity(n);
    for (off, p) in parts {
        let e = parse_expr_at(p, line, col + off, true)?;
        out.push(e.to_string());
    }
    Ok(out.join(", "))
}

/// Checks `raw` against `kind` and returns the normalized value.
pub fn normalize_value(kind: KeyKind, raw: &str, line: usize, col: usize) -> Result<String> {
    match kind {
        KeyKind::Line | KeyKind::Strip => Ok(parse_expr_at(raw, line, col, kind == KeyKind::Strip)?.to_string()),
        KeyKind::Number => {
            let e = Expr::parse(raw).map_err(|e| expr_err(line, col, e))?;
            if e.uses(Var::X) || e.uses(Var::Y) {
                return Err(Error::Parse { line, col, msg: "expected a constant".into() });
            }
            let v = e.eval(0.0, 0.0);
            if !v.is_finite() {
                return Err(Error::Parse { line, col, msg: "constant is not finite".into() });
            }
            Ok(format!("{:?}", v))
        }
        KeyKind::Integer => raw
            .trim()
            .parse::<u64>()
            .map(|v| v.to_string())
            .map_err(|_| Error::Parse { line, col, msg: format!("expected a non-negative integer, found '{}'", raw.trim()) }),
        KeyKind::Choice(opts) => {
            let v = raw.trim().to_ascii_lowercase();
            if opts.contains(&v.as_str()) {
                Ok(v)
            } else {
                Err(Error::Parse { line, col, msg: format!("expected one of {:?}, found '{}'", opts, raw.trim()) })
            }
        }
        KeyKind::Vector => join_exprs(raw, line, col, 2),
        KeyKind::Matrix => {
            let rows = split_top(raw, ';');
            let mut out = Vec::with_capacity(rows.len());
            for (off, r) in rows {
                out.push(join_exprs(r, line, col + off, 2)?);
            }
            Ok(out.join("; "))
        }
    }
}

impl ProblemConfig {
    pub fn parse(text: &str) -> Result<ProblemConfig> {
        let mut cfg = ProblemConfig::default();
        let mut section: Option<&str> = None;
        for (ln, raw_line) in text.lines().enumerate() {
            let line = ln + 1;
            let content = match raw_line.find('#') {
                Some(p) => &raw_line[..p],
                None => raw_line,
            };
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            let indent = leading_ws(content);
            if let Some(rest) = trimmed.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or(Error::Parse {
                    line,
                    col: indent + 1,
                    msg: "unterminated section header".into(),
                })?;
                let name = name.trim();
                section = Some(SECTIONS.iter().copied().find(|s| *s == name).ok_or_else(|| Error::Parse {
                    line,
                    col: indent + 2,
                    msg: format!("unknown section [{}]", name),
                })?);
                continue;
            }
            let eq = content.find('=').ok_or(Error::Parse { line, col: indent + 1, msg: "expected key = value".into() })?;
            let key = content[..eq].trim();
            let value_part = &content[eq + 1..];
            let mut vcol = content[..eq + 1].chars().count() + leading_ws(value_part) + 1;
            let mut value = value_part.trim();
            if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
                value = &value[1..value.len() - 1];
                vcol += 1;
            }
            if key.is_empty() {
                return Err(Error::Parse { line, col: indent + 1, msg: "missing key".into() });
            }
            let full = match section {
                Some(s) => format!("{}.{}", s, key),
                None => key.to_string(),
            };
            cfg.insert(&full, value, line, indent + 1, vcol, false)?;
        }
        Ok(cfg)
    }

    fn insert(&mut self, key: &str, value: &str, line: usize, kcol: usize, vcol: usize, replace: bool) -> Result<()> {
        let (canon, kind) =
            resolve_key(key).ok_or_else(|| Error::Parse { line, col: kcol, msg: format!("unknown key '{}'", key) })?;
        let normalized = normalize_value(kind, value, line, vcol)?;
        if !replace {
            if let Some(prev) = self.entries.get(&canon) {
                return Err(Error::Parse {
                    line,
                    col: kcol,
                    msg: format!("duplicate key '{}' (first set on line {})", canon, prev.line),
                });
            }
        }
        self.entries.insert(canon, Entry { value: normalized, line, col: vcol });
        Ok(())
    }

    /// Applies a `key=value` override with a fully dotted key.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override '{}' is not of the form key=value", assignment)))?;
        self.insert(k.trim(), v.trim(), 0, 1, 1, true).map_err(|e| match e {
            Error::Parse { msg, .. } => Error::Config(format!("override '{}': {}", assignment, msg)),
            other => other,
        })
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        self.insert(key, value, 0, 1, 1, true)
    }

    pub fn remove(&mut self, key: &str) {
        self.entries.remove(key);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    pub fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|s| s.as_str())
    }

    /// Family labels `(λ, μ)` in sorted order.
    pub fn family_labels(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = self
            .entries
            .keys()
            .filter_map(|k| {
                let p: Vec<&str> = k.split('.').collect();
                match p.as_slice() {
                    ["operator", "family", l, m, _] => Some((l.to_string(), m.to_string())),
                    _ => None,
                }
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Serializes in section order. Parsing the output returns an equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in SECTIONS {
            let prefix = format!("{}.", s);
            let keys: Vec<&String> = self.entries.keys().filter(|k| k.starts_with(&prefix)).collect();
            if keys.is_empty() {
                continue;
            }
            if !out.is_empty() {
                out.push('\n');
            }
            let _ = writeln!(out, "[{}]", s);
            for k in keys {
                let _ = writeln!(out, "{} = {}", &k[prefix.len()..], self.entries[k].value);
            }
        }
        out
    }
}
