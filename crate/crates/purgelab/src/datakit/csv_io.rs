//! CSV dataset loading and saving.
//!
//! RFC-4180-style files with a required header row. `?` and the empty string
//! are missing-value markers. Columns without type hints are inferred numeric
//! iff every non-missing cell parses as a finite real; anything else becomes
//! categorical with values in order of first appearance.

use std::collections::BTreeMap;
use std::path::Path;

use super::{AttrKind, AttributeMeta, Cell, Dataset, Instance};
use crate::{Error, Result};

/// How to find the label column.
#[derive(Clone, Debug)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeHint {
    Numeric,
    Categorical,
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source }
}

fn parse_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse { path: path.display().to_string(), message: message.into() }
}

fn is_missing(s: &str) -> bool {
    s.is_empty() || s == "?"
}

fn parse_numeric(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn load_csv(
    path: &Path,
    label: &LabelColumn,
    hints: Option<&BTreeMap<String, TypeHint>>,
) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(file);

    let header: Vec<String> = reader
        .headers()
        .map_err(|e| parse_err(path, format!("cannot read header: {e}")))?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    if header.is_empty() {
        return Err(parse_err(path, "empty header row"));
    }

    let label_idx = match label {
        LabelColumn::Index(i) => {
            if *i >= header.len() {
                return Err(parse_err(path, format!("label column index {i} out of range")));
            }
            *i
        }
        LabelColumn::Name(name) => header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| parse_err(path, format!("unknown label column `{name}`")))?,
    };

    let mut rows: Vec<Vec<String>> = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(path, format!("row {}: {e}", r + 2)))?;
        if record.len() != header.len() {
            return Err(parse_err(
                path,
                format!("row {}: ragged row ({} fields, expected {})", r + 2, record.len(), header.len()),
            ));
        }
        rows.push(record.iter().map(|s| s.trim().to_string()).collect());
    }
    if rows.is_empty() {
        return Err(parse_err(path, "no data rows"));
    }

    // Label column first: it must have no missing cells.
    let mut class_names: Vec<String> = Vec::new();
    let mut labels = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let cell = &row[label_idx];
        if is_missing(cell) {
            return Err(parse_err(path, format!("row {}: missing label", r + 2)));
        }
        let idx = match class_names.iter().position(|c| c == cell) {
            Some(i) => i,
            None => {
                class_names.push(cell.clone());
                class_names.len() - 1
            }
        };
        labels.push(idx);
    }

    // Attribute columns: infer kinds unless hinted.
    let mut attributes = Vec::new();
    let mut col_kinds: Vec<(usize, AttrKind)> = Vec::new();
    for (c, name) in header.iter().enumerate() {
        if c == label_idx {
            continue;
        }
        let hinted = hints.and_then(|h| h.get(name)).copied();
        let numeric = match hinted {
            Some(TypeHint::Numeric) => true,
            Some(TypeHint::Categorical) => false,
            None => rows
                .iter()
                .all(|row| is_missing(&row[c]) || parse_numeric(&row[c]).is_some()),
        };
        if numeric {
            col_kinds.push((c, AttrKind::Numeric));
            attributes.push(AttributeMeta::numeric(name.clone()));
        } else {
            let mut values: Vec<String> = Vec::new();
            for row in &rows {
                let cell = &row[c];
                if !is_missing(cell) && !values.iter().any(|v| v == cell) {
                    values.push(cell.clone());
                }
            }
            if values.is_empty() {
                return Err(parse_err(path, format!("column `{name}` is entirely missing")));
            }
            col_kinds.push((c, AttrKind::Categorical(values.clone())));
            attributes.push(AttributeMeta::categorical(name.clone(), values));
        }
    }

    let mut instances = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let mut values = Vec::with_capacity(col_kinds.len());
        for (c, kind) in &col_kinds {
            let cell = &row[*c];
            if is_missing(cell) {
                values.push(Cell::Missing);
                continue;
            }
            match kind {
                AttrKind::Numeric => match parse_numeric(cell) {
                    Some(v) => values.push(Cell::Num(v)),
                    None => {
                        return Err(parse_err(
                            path,
                            format!("row {}: `{cell}` is not numeric in column {}", r + 2, header[*c]),
                        ))
                    }
                },
                AttrKind::Categorical(vals) => {
                    let idx = vals.iter().position(|v| v == cell).expect("value collected above");
                    values.push(Cell::Cat(idx));
                }
            }
        }
        instances.push(Instance { values, label: labels[r] });
    }

    let name = path.file_stem().map(|s| s.to_string_lossy().to_string()).unwrap_or_else(|| "dataset".into());
    Dataset::new(name, attributes, class_names, instances)
}

/// Write a dataset in the loader's CSV form. The label is emitted last under
/// the header `class`; loading the result back with explicit hints and
/// `LabelColumn::Name("class")` reproduces the dataset field-by-field.
pub fn save_csv(ds: &Dataset, path: &Path) -> Result<()> {
    if ds.attributes.iter().any(|a| a.name == "class") {
        return Err(Error::InvalidArg(
            "cannot save to CSV: an attribute is named `class`, which is reserved for the label column"
                .into(),
        ));
    }
    let file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file);

    let mut header: Vec<&str> = ds.attributes.iter().map(|a| a.name.as_str()).collect();
    header.push("class");
    w.write_record(&header).map_err(|e| parse_err(path, format!("write failed: {e}")))?;

    for inst in &ds.instances {
        let mut row: Vec<String> = Vec::with_capacity(inst.values.len() + 1);
        for (cell, attr) in inst.values.iter().zip(&ds.attributes) {
            row.push(match (cell, &attr.kind) {
                (Cell::Missing, _) => "?".to_string(),
                (Cell::Num(v), _) => format!("{v}"),
                (Cell::Cat(i), AttrKind::Categorical(vals)) => vals[*i].clone(),
                (Cell::Cat(_), AttrKind::Numeric) => unreachable!("validated dataset"),
            });
        }
        row.push(ds.class_names[inst.label].clone());
        w.write_record(&row).map_err(|e| parse_err(path, format!("write failed: {e}")))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_numeric_columns() {
        let f = write_tmp("a,b,cls\n1.0,x,p\n2.5,y,q\n3.0,x,p\n");
        let ds = load_csv(f.path(), &LabelColumn::Name("cls".into()), None).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.attributes.len(), 2);
        assert!(ds.attributes[0].is_numeric());
        assert!(!ds.attributes[1].is_numeric());
        assert_eq!(ds.class_names, vec!["p", "q"]);
        assert_eq!(ds.instances[1].values[0], Cell::Num(2.5));
    }

    #[test]
    fn missing_label_is_an_error() {
        let f = write_tmp("a,cls\n1.0,p\n2.0,?\n");
        let err = load_csv(f.path(), &LabelColumn::Name("cls".into()), None).unwrap_err();
        assert!(err.to_string().contains("missing label"), "{err}");
    }

    #[test]
    fn unknown_label_column_is_an_error() {
        let f = write_tmp("a,cls\n1.0,p\n");
        let err = load_csv(f.path(), &LabelColumn::Name("nope".into()), None).unwrap_err();
        assert!(err.to_string().contains("unknown label column"), "{err}");
    }

    #[test]
    fn ragged_row_is_an_error() {
        let f = write_tmp("a,b,cls\n1.0,x,p\n2.0,q\n");
        let err = load_csv(f.path(), &LabelColumn::Name("cls".into()), None).unwrap_err();
        assert!(err.to_string().contains("row 3"), "{err}");
    }

    #[test]
    fn mixed_column_without_hint_becomes_categorical() {
        let f = write_tmp("a,cls\n1.5,p\nx,q\n2.0,p\n");
        let ds = load_csv(f.path(), &LabelColumn::Name("cls".into()), None).unwrap();
        match &ds.attributes[0].kind {
            AttrKind::Categorical(vals) => assert_eq!(vals, &["1.5", "x", "2.0"]),
            other => panic!("expected categorical, got {other:?}"),
        }
    }

    #[test]
    fn hint_forces_categorical() {
        let f = write_tmp("a,cls\n1,p\n2,q\n");
        let mut hints = BTreeMap::new();
        hints.insert("a".to_string(), TypeHint::Categorical);
        let ds = load_csv(f.path(), &LabelColumn::Name("cls".into()), Some(&hints)).unwrap();
        assert!(!ds.attributes[0].is_numeric());
    }

    #[test]
    fn question_mark_maps_to_missing() {
        let f = write_tmp("a,b,cls\n1.0,?,p\n?,y,q\n");
        let ds = load_csv(f.path(), &LabelColumn::Name("cls".into()), None).unwrap();
        assert_eq!(ds.instances[0].values[1], Cell::Missing);
        assert_eq!(ds.instances[1].values[0], Cell::Missing);
    }

    #[test]
    fn label_by_index() {
        let f = write_tmp("cls,a\np,1.0\nq,2.0\n");
        let ds = load_csv(f.path(), &LabelColumn::Index(0), None).unwrap();
        assert_eq!(ds.class_names, vec!["p", "q"]);
        assert_eq!(ds.attributes.len(), 1);
    }

    #[test]
    fn round_trip_is_exact() {
        let f = write_tmp("a,b,cls\n1.0,x,p\n?,y,q\n2.25,?,p\n0.1,x,q\n");
        let ds = load_csv(f.path(), &LabelColumn::Name("cls".into()), None).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        save_csv(&ds, out.path()).unwrap();
        let mut hints = BTreeMap::new();
        hints.insert("a".to_string(), TypeHint::Numeric);
        hints.insert("b".to_string(), TypeHint::Categorical);
        let back = load_csv(out.path(), &LabelColumn::Name("class".into()), Some(&hints)).unwrap();
        assert_eq!(ds.attributes, back.attributes);
        assert_eq!(ds.class_names, back.class_names);
        assert_eq!(ds.instances, back.instances);
    }
}
