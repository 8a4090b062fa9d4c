//! Matrix Market reader for real coordinate matrices and right-hand-side vectors.

use std::fs;
use std::path::{Path, PathBuf};

use super::SparseCsr;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a square real coordinate matrix. Symmetric storage is mirrored;
/// general storage must have a symmetric sparsity pattern.
pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<SparseCsr> {
    let path = path.as_ref();
    parse_matrix_market(&read(path)?, path)
}

/// Parses Matrix Market text; `origin` is only used in error messages.
pub fn parse_matrix_market(text: &str, origin: &Path) -> Result<SparseCsr> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (line_no, header) = lines
        .next()
        .ok_or_else(|| err(1, "empty file".to_string()))?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(err(line_no, format!("malformed header: {header:?}")));
    }
    if fields[2] != "coordinate" {
        return Err(err(
            line_no,
            format!("unsupported format {:?}, only coordinate", fields[2]),
        ));
    }
    if fields[3] != "real" {
        return Err(err(
            line_no,
            format!("unsupported field {:?}, only real", fields[3]),
        ));
    }
    let symmetry = match fields[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(err(line_no, format!("unsupported symmetry {other:?}"))),
    };

    let mut data = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = data
        .next()
        .ok_or_else(|| err(line_no, "missing size line".to_string()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| err(size_line, format!("bad size line: {e}")))?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(err(size_line, "size line needs rows, cols, nnz".to_string()));
    };
    if rows != cols {
        return Err(err(size_line, format!("matrix is {rows}x{cols}, not square")));
    }

    let mut triplets = Vec::with_capacity(if symmetry == Symmetry::Symmetric { 2 * nnz } else { nnz });
    let mut seen = 0usize;
    for (ln, l) in data {
        let mut tok = l.split_whitespace();
        let mut index = |name: &str| -> Result<usize> {
            let t = tok
                .next()
                .ok_or_else(|| err(ln, format!("missing {name} index")))?;
            let v: usize = t
                .parse()
                .map_err(|_| err(ln, format!("bad {name} index {t:?}")))?;
            if v == 0 || v > rows {
                return Err(err(ln, format!("{name} index {v} out of bounds 1..={rows}")));
            }
            Ok(v - 1)
        };
        let i = index("row")?;
        let j = index("column")?;
        let value: f64 = match tok.next() {
            Some(t) => t.parse().map_err(|_| err(ln, format!("bad value {t:?}")))?,
            None => return Err(err(ln, "missing value".to_string())),
        };
        if tok.next().is_some() {
            return Err(err(ln, "trailing tokens".to_string()));
        }
        triplets.push((i, j, value));
        if symmetry == Symmetry::Symmetric && i != j {
            triplets.push((j, i, value));
        }
        seen += 1;
    }
    if seen != nnz {
        return Err(err(
            size_line,
            format!("header declares {nnz} entries, found {seen}"),
        ));
    }
    let m = SparseCsr::from_triplets(rows, &triplets)?;
    if symmetry == Symmetry::General && !m.is_structurally_symmetric() {
        return Err(Error::input(format!(
            "{}: general matrix does not have a symmetric pattern",
            origin.display()
        )));
    }
    Ok(m)
}

/// Loads a vector from either a Matrix Market `array real general` file with
/// one column, or plain whitespace-separated numbers.
pub fn load_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = read(path)?;
    parse_vector(&text, path.to_path_buf())
}

fn parse_vector(text: &str, origin: PathBuf) -> Result<Vec<f64>> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.clone(),
        line,
        message,
    };
    let mut out = Vec::new();
    let mut declared: Option<usize> = None;
    let is_mm = text.trim_start().starts_with("%%");
    let mut header_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let l = raw.trim();
        if is_mm && !header_seen {
            if idx == 0 {
                let f: Vec<String> = l.split_whitespace().map(str::to_ascii_lowercase).collect();
                if f.len() < 4 || f[0] != "%%matrixmarket" || f[2] != "array" || f[3] != "real" {
                    return Err(err(ln, format!("unsupported vector header {l:?}")));
                }
                continue;
            }
            if l.is_empty() || l.starts_with('%') {
                continue;
            }
            let dims: Vec<usize> = l
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| err(ln, format!("bad size line {l:?}")))?;
            if dims.len() != 2 || dims[1] != 1 {
                return Err(err(ln, "vector file must have exactly one column".to_string()));
            }
            declared = Some(dims[0]);
            header_seen = true;
            continue;
        }
        if l.is_empty() || l.starts_with('%') || l.starts_with('#') {
            continue;
        }
        for t in l.split_whitespace() {
            out.push(t.parse().map_err(|_| err(ln, format!("bad number {t:?}")))?);
        }
    }
    if let Some(n) = declared {
        if n != out.len() {
            return Err(err(1, format!("declared {n} entries, found {}", out.len())));
        }
    }
    if out.is_empty() {
        return Err(err(1, "vector file has no entries".to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn parse(text: &str) -> Result<SparseCsr> {
        parse_matrix_market(text, Path::new("test.mtx"))
    }

    #[test]
    fn symmetric_entries_are_mirrored() {
        let a = parse(
            "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 3\n1 1 2\n2 1 -1\n2 2 2\n",
        )
        .unwrap();
        assert_eq!(
            a.to_dense(),
            DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0])
        );
    }

    #[test]
    fn general_with_both_triangles_is_identical() {
        let sym = parse("%%MatrixMarket matrix coordinate real symmetric\n2 2 3\n1 1 2\n2 1 -1\n2 2 2\n")
            .unwrap();
        let gen = parse(
            "%%MatrixMarket matrix coordinate real general\n2 2 4\n1 1 2\n1 2 -1\n2 1 -1\n2 2 2\n",
        )
        .unwrap();
        assert_eq!(sym, gen);
    }

    #[test]
    fn out_of_bounds_reports_line() {
        let e = parse("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 2\n3 1 5\n")
            .unwrap_err();
        match e {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_array_and_complex() {
        assert!(matches!(
            parse("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(parse("garbage\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn asymmetric_pattern_rejected() {
        assert!(parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 2 1\n").is_err());
    }

    #[test]
    fn vectors_plain_and_array() {
        let v = parse_vector("1.0 2.0\n3\n", PathBuf::from("v.txt")).unwrap();
        assert_eq!(v, vec![1.0, 2.0, 3.0]);
        let w = parse_vector(
            "%%MatrixMarket matrix array real general\n% c\n2 1\n0.5\n-1\n",
            PathBuf::from("v.mtx"),
        )
        .unwrap();
        assert_eq!(w, vec![0.5, -1.0]);
        assert!(parse_vector("%%MatrixMarket matrix array real general\n3 1\n1\n", PathBuf::from("x")).is_err());
    }
}
