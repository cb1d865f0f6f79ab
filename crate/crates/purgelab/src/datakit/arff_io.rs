//! ARFF loading and saving (the UCI-repository subset).
//!
//! Supported: `@relation`, `@attribute <name> numeric|real|integer`,
//! `@attribute <name> {v1,v2,...}`, `@data` with comma-separated rows, `?`
//! missing markers, `%` comments, and optionally single-quoted names/values.
//! String, date, sparse, and relational constructs are rejected with an
//! unsupported-feature error. The class is the attribute named `class`
//! (case-insensitive) if present, otherwise the last attribute.

use std::path::Path;

use super::{AttrKind, AttributeMeta, Cell, Dataset, Instance};
use crate::{Error, Result};

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse { path: path.display().to_string(), message: format!("line {line}: {}", message.into()) }
}

fn unquote(s: &str) -> String {
    let t = s.trim();
    if t.len() >= 2 && ((t.starts_with('\'') && t.ends_with('\'')) || (t.starts_with('"') && t.ends_with('"'))) {
        t[1..t.len() - 1].to_string()
    } else {
        t.to_string()
    }
}

/// Split a comma-separated list, honoring single/double quotes.
fn split_csv_line(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    for ch in line.chars() {
        match quote {
            Some(q) => {
                if ch == q {
                    quote = None;
                } else {
                    cur.push(ch);
                }
            }
            None => match ch {
                '\'' | '"' => quote = Some(ch),
                ',' => {
                    out.push(cur.trim().to_string());
                    cur.clear();
                }
                _ => cur.push(ch),
            },
        }
    }
    out.push(cur.trim().to_string());
    out
}

pub fn load_arff(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;

    let mut relation: Option<String> = None;
    let mut attrs: Vec<AttributeMeta> = Vec::new();
    let mut in_data = false;
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if in_data {
            if line.starts_with('{') {
                return Err(parse_err(path, lineno, "unsupported ARFF feature: sparse data"));
            }
            rows.push((lineno, split_csv_line(line)));
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            if relation.is_some() || !attrs.is_empty() {
                return Err(parse_err(path, lineno, "@relation must come first and appear once"));
            }
            relation = Some(unquote(line["@relation".len()..].trim()));
        } else if lower.starts_with("@attribute") {
            if relation.is_none() {
                return Err(parse_err(path, lineno, "@attribute before @relation"));
            }
            let rest = line["@attribute".len()..].trim();
            let (name, kind_text) = if rest.starts_with('\'') || rest.starts_with('"') {
                let q = rest.chars().next().unwrap();
                let end = rest[1..]
                    .find(q)
                    .ok_or_else(|| parse_err(path, lineno, "unterminated quoted attribute name"))?;
                (rest[1..=end].to_string(), rest[end + 2..].trim())
            } else {
                let mut it = rest.splitn(2, char::is_whitespace);
                let name = it.next().unwrap_or("").to_string();
                (name, it.next().unwrap_or("").trim())
            };
            if name.is_empty() || kind_text.is_empty() {
                return Err(parse_err(path, lineno, "malformed @attribute"));
            }
            let kind_lower = kind_text.to_ascii_lowercase();
            let kind = if kind_text.starts_with('{') {
                let inner = kind_text
                    .strip_prefix('{')
                    .and_then(|s| s.strip_suffix('}'))
                    .ok_or_else(|| parse_err(path, lineno, "malformed nominal value list"))?;
                let values: Vec<String> = split_csv_line(inner).into_iter().map(|v| unquote(&v)).collect();
                AttrKind::Categorical(values)
            } else if matches!(kind_lower.as_str(), "numeric" | "real" | "integer") {
                AttrKind::Numeric
            } else {
                return Err(parse_err(
                    path,
                    lineno,
                    format!("unsupported ARFF feature: attribute type `{kind_text}`"),
                ));
            };
            attrs.push(AttributeMeta { name, kind });
        } else if lower.starts_with("@data") {
            if relation.is_none() || attrs.is_empty() {
                return Err(parse_err(path, lineno, "@data before @relation/@attribute"));
            }
            in_data = true;
        } else {
            return Err(parse_err(path, lineno, format!("unrecognized directive `{line}`")));
        }
    }

    let relation = relation.ok_or_else(|| parse_err(path, 0, "missing @relation"))?;
    if !in_data {
        return Err(parse_err(path, 0, "missing @data section"));
    }
    if attrs.is_empty() {
        return Err(parse_err(path, 0, "no @attribute declarations"));
    }
    if rows.is_empty() {
        return Err(parse_err(path, 0, "no data rows"));
    }

    let class_idx = attrs
        .iter()
        .position(|a| a.name.eq_ignore_ascii_case("class"))
        .unwrap_or(attrs.len() - 1);
    let class_names = match &attrs[class_idx].kind {
        AttrKind::Categorical(values) => values.clone(),
        AttrKind::Numeric => {
            return Err(parse_err(path, 0, "class attribute must be nominal"));
        }
    };

    let mut instances = Vec::with_capacity(rows.len());
    for (lineno, row) in rows {
        if row.len() != attrs.len() {
            return Err(parse_err(
                path,
                lineno,
                format!("row has {} fields, expected {}", row.len(), attrs.len()),
            ));
        }
        let mut values = Vec::with_capacity(attrs.len() - 1);
        let mut label = None;
        for (j, field) in row.iter().enumerate() {
            if j == class_idx {
                if field == "?" {
                    return Err(parse_err(path, lineno, "missing class value"));
                }
                label = Some(class_names.iter().position(|v| v == field).ok_or_else(|| {
                    parse_err(path, lineno, format!("undeclared nominal value `{field}` in class"))
                })?);
                continue;
            }
            if field == "?" {
                values.push(Cell::Missing);
                continue;
            }
            match &attrs[j].kind {
                AttrKind::Numeric => {
                    let v: f64 = field.parse().map_err(|_| {
                        parse_err(path, lineno, format!("`{field}` is not numeric in attribute `{}`", attrs[j].name))
                    })?;
                    if !v.is_finite() {
                        return Err(parse_err(path, lineno, "non-finite numeric value"));
                    }
                    values.push(Cell::Num(v));
                }
                AttrKind::Categorical(vals) => {
                    let idx = vals.iter().position(|v| v == field).ok_or_else(|| {
                        parse_err(
                            path,
                            lineno,
                            format!("undeclared nominal value `{field}` in attribute `{}`", attrs[j].name),
                        )
                    })?;
                    values.push(Cell::Cat(idx));
                }
            }
        }
        instances.push(Instance { values, label: label.expect("class column visited") });
    }

    let attributes: Vec<AttributeMeta> =
        attrs.into_iter().enumerate().filter(|(j, _)| *j != class_idx).map(|(_, a)| a).collect();
    Dataset::new(relation, attributes, class_names, instances)
}

fn quote_if_needed(s: &str) -> String {
    if s.contains(|c: char| c.is_whitespace() || c == ',' || c == '{' || c == '}' || c == '%') {
        format!("'{s}'")
    } else {
        s.to_string()
    }
}

/// Write a dataset in the loader's ARFF subset, class attribute last.
pub fn save_arff(ds: &Dataset, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("@relation {}\n\n", quote_if_needed(&ds.name)));
    for attr in &ds.attributes {
        match &attr.kind {
            AttrKind::Numeric => {
                out.push_str(&format!("@attribute {} numeric\n", quote_if_needed(&attr.name)));
            }
            AttrKind::Categorical(values) => {
                let vals: Vec<String> = values.iter().map(|v| quote_if_needed(v)).collect();
                out.push_str(&format!("@attribute {} {{{}}}\n", quote_if_needed(&attr.name), vals.join(",")));
            }
        }
    }
    let class_vals: Vec<String> = ds.class_names.iter().map(|v| quote_if_needed(v)).collect();
    out.push_str(&format!("@attribute class {{{}}}\n\n@data\n", class_vals.join(",")));
    for inst in &ds.instances {
        let mut row: Vec<String> = Vec::with_capacity(inst.values.len() + 1);
        for (cell, attr) in inst.values.iter().zip(&ds.attributes) {
            row.push(match (cell, &attr.kind) {
                (Cell::Missing, _) => "?".to_string(),
                (Cell::Num(v), _) => format!("{v}"),
                (Cell::Cat(i), AttrKind::Categorical(vals)) => quote_if_needed(&vals[*i]),
                (Cell::Cat(_), AttrKind::Numeric) => unreachable!("validated dataset"),
            });
        }
        row.push(quote_if_needed(&ds.class_names[inst.label]));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}
