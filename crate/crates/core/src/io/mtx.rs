use std::path::Path;

use crate::error::{Error, Result};
use crate::numkernel::{ComplexDense, C64};

pub const DEFAULT_DIMENSION_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Field {
    Real,
    Integer,
    Complex,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    Skew,
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::ParseError { line, message: message.into() }
}

pub fn read_matrix(path: &Path) -> Result<ComplexDense> {
    read_matrix_with_limit(path, DEFAULT_DIMENSION_LIMIT)
}

pub fn read_matrix_with_limit(path: &Path, limit: usize) -> Result<ComplexDense> {
    let text = std::fs::read_to_string(path)?;
    parse_matrix_market(&text, limit)
}

/// Parses Matrix Market text. Symmetric, Hermitian and skew-symmetric storage
/// is mirrored into a full dense matrix; duplicate coordinate entries add up.
pub fn parse_matrix_market(text: &str, limit: usize) -> Result<ComplexDense> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
    let (layout, field, sym) = parse_header(header)?;

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = body.next().ok_or_else(|| perr(1, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| perr(size_line, format!("bad size entry '{t}'"))))
        .collect::<Result<_>>()?;
    let want = if layout == Layout::Coordinate { 3 } else { 2 };
    if dims.len() != want {
        return Err(perr(size_line, format!("size line needs {want} integers")));
    }
    let (rows, cols) = (dims[0], dims[1]);
    if rows.max(cols) > limit {
        return Err(Error::DimensionLimit { dim: rows.max(cols), limit });
    }
    if sym != Symmetry::General && rows != cols {
        return Err(perr(size_line, "symmetric storage needs a square matrix"));
    }
    if layout == Layout::Array && field == Field::Pattern {
        return Err(perr(1, "pattern field requires coordinate layout"));
    }

    let mut m = ComplexDense::zeros(rows, cols);
    let put = |i: usize, j: usize, v: C64, m: &mut ComplexDense| {
        m.set(i, j, m.get(i, j) + v);
        if i != j {
            match sym {
                Symmetry::General => {}
                Symmetry::Symmetric => m.set(j, i, m.get(j, i) + v),
                Symmetry::Hermitian => m.set(j, i, m.get(j, i) + v.conj()),
                Symmetry::Skew => m.set(j, i, m.get(j, i) - v),
            }
        }
    };

    match layout {
        Layout::Coordinate => {
            let nnz = dims[2];
            for k in 0..nnz {
                let (ln, l) = body.next().ok_or_else(|| perr(size_line, format!("expected {nnz} entries, found {k}")))?;
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() != 2 + values_per_entry(field) {
                    return Err(perr(ln, "wrong number of fields in entry"));
                }
                let i = parse_index(toks[0], rows, ln)?;
                let j = parse_index(toks[1], cols, ln)?;
                check_triangle(sym, i, j, ln)?;
                let v = parse_value(&toks[2..], field, ln)?;
                put(i, j, v, &mut m);
            }
        }
        Layout::Array => {
            // column-major; symmetric storage lists the lower triangle only
            let mut cells = Vec::new();
            for j in 0..cols {
                let start = match sym {
                    Symmetry::General => 0,
                    Symmetry::Symmetric | Symmetry::Hermitian => j,
                    Symmetry::Skew => j + 1,
                };
                cells.extend((start..rows).map(|i| (i, j)));
            }
            let per = values_per_entry(field);
            let mut toks = body.flat_map(|(ln, l)| l.split_whitespace().map(move |t| (ln, t)));
            for &(i, j) in &cells {
                let mut vals = Vec::with_capacity(per);
                let mut ln = size_line;
                for _ in 0..per {
                    let (l, t) = toks.next().ok_or_else(|| perr(ln, format!("expected {} values", cells.len())))?;
                    ln = l;
                    vals.push(t);
                }
                put(i, j, parse_value(&vals, field, ln)?, &mut m);
            }
            if let Some((ln, _)) = toks.next() {
                return Err(perr(ln, "trailing data after last entry"));
            }
        }
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(m)
}

fn parse_header(h: &str) -> Result<(Layout, Field, Symmetry)> {
    let toks: Vec<String> = h.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
        return Err(perr(1, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'"));
    }
    let layout = match toks[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        f => return Err(perr(1, format!("unknown format '{f}'"))),
    };
    let field = match toks[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        "pattern" => Field::Pattern,
        f => return Err(perr(1, format!("unknown field '{f}'"))),
    };
    let sym = match toks[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "skew-symmetric" => Symmetry::Skew,
        s => return Err(perr(1, format!("unknown symmetry '{s}'"))),
    };
    if sym == Symmetry::Hermitian && field != Field::Complex {
        return Err(perr(1, "hermitian symmetry requires complex field"));
    }
    Ok((layout, field, sym))
}

fn values_per_entry(f: Field) -> usize {
    match f {
        Field::Complex => 2,
        Field::Pattern => 0,
        _ => 1,
    }
}

fn parse_index(t: &str, bound: usize, line: usize) -> Result<usize> {
    let k: usize = t.parse().map_err(|_| perr(line, format!("bad index '{t}'")))?;
    if k == 0 || k > bound {
        return Err(perr(line, format!("index {k} outside 1..={bound}")));
    }
    Ok(k - 1)
}

fn check_triangle(sym: Symmetry, i: usize, j: usize, line: usize) -> Result<()> {
    let ok = match sym {
        Symmetry::General => true,
        Symmetry::Symmetric | Symmetry::Hermitian => i >= j,
        Symmetry::Skew => i > j,
    };
    if ok {
        Ok(())
    } else {
        Err(perr(line, "entry outside the stored lower triangle"))
    }
}

fn parse_value(toks: &[&str], field: Field, line: usize) -> Result<C64> {
    let num = |t: &str| -> Result<f64> { t.parse::<f64>().map_err(|_| perr(line, format!("bad number '{t}'"))) };
    Ok(match field {
        Field::Pattern => C64::new(1.0, 0.0),
        Field::Integer => {
            let k: i64 = toks[0].parse().map_err(|_| perr(line, format!("bad integer '{}'", toks[0])))?;
            C64::new(k as f64, 0.0)
        }
        Field::Real => C64::new(num(toks[0])?, 0.0),
        Field::Complex => C64::new(num(toks[0])?, num(toks[1])?),
    })
}

/// Writes `m` in array/general format; the field is `real` when every entry
/// has zero imaginary part. Values use shortest round-trip decimal form.
pub fn write_matrix(m: &ComplexDense, path: &Path) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let real = m.is_real();
    let mut s = format!(
        "%%MatrixMarket matrix array {} general\n{} {}\n",
        if real { "real" } else { "complex" },
        m.nrows(),
        m.ncols()
    );
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m.get(i, j);
            if real {
                s.push_str(&format!("{:e}\n", v.re));
            } else {
                s.push_str(&format!("{:e} {:e}\n", v.re, v.im));
            }
        }
    }
    super::write_atomic(path, s.as_bytes())
}
