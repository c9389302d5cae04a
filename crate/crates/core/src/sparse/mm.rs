//! Matrix Market reader and writer (coordinate and array formats).

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64 as C64;

use super::{SparseError, SparseMatrixCsr};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
}

fn parse_err(line: usize, reason: impl Into<String>) -> SparseError {
    SparseError::ParseError {
        line,
        reason: reason.into(),
    }
}

fn parse_banner(line: &str) -> Result<(Layout, Field, Symmetry), SparseError> {
    let toks: Vec<String> = line
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
        return Err(parse_err(
            1,
            "expected '%%MatrixMarket matrix <format> <field> <symmetry>'",
        ));
    }
    let layout = match toks[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(parse_err(1, format!("unknown format '{other}'"))),
    };
    let field = match toks[3].as_str() {
        "real" | "double" | "integer" => Field::Real,
        "complex" => Field::Complex,
        "pattern" => return Err(SparseError::UnsupportedFormat("pattern".into())),
        other => return Err(parse_err(1, format!("unknown field '{other}'"))),
    };
    let symmetry = match toks[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "skew-symmetric" => return Err(SparseError::UnsupportedFormat("skew-symmetric".into())),
        other => return Err(parse_err(1, format!("unknown symmetry '{other}'"))),
    };
    if symmetry == Symmetry::Hermitian && field != Field::Complex {
        return Err(parse_err(1, "hermitian symmetry requires a complex field"));
    }
    Ok((layout, field, symmetry))
}

fn parse_num<T: std::str::FromStr>(
    tok: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, SparseError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("cannot parse {what} '{tok}'")))
}

fn parse_value<'a>(
    toks: &mut impl Iterator<Item = &'a str>,
    field: Field,
    line: usize,
) -> Result<C64, SparseError> {
    let re: f64 = parse_num(toks.next(), line, "value")?;
    let im: f64 = match field {
        Field::Real => 0.0,
        Field::Complex => parse_num(toks.next(), line, "imaginary part")?,
    };
    Ok(C64::new(re, im))
}

/// Parses Matrix Market text into CSR; symmetric and Hermitian storage is
/// expanded to the full matrix and duplicate entries are summed.
pub fn parse_matrix_market(text: &str) -> Result<SparseMatrixCsr, SparseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, banner) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let (layout, field, symmetry) = parse_banner(banner)?;

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = body
        .next()
        .ok_or_else(|| parse_err(1, "missing size line"))?;
    let mut toks = size.split_whitespace();
    let rows: usize = parse_num(toks.next(), size_line, "row count")?;
    let cols: usize = parse_num(toks.next(), size_line, "column count")?;
    if rows != cols {
        return Err(parse_err(
            size_line,
            format!("matrix is {rows}x{cols}, expected square"),
        ));
    }
    let n = rows;

    let mut triplets: Vec<(usize, usize, C64)> = Vec::new();
    let mut push = |i: usize, j: usize, v: C64| {
        triplets.push((i, j, v));
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => triplets.push((j, i, v)),
                Symmetry::Hermitian => triplets.push((j, i, v.conj())),
            }
        }
    };

    match layout {
        Layout::Coordinate => {
            let nnz: usize = parse_num(toks.next(), size_line, "entry count")?;
            let mut seen = 0;
            for (ln, l) in body.by_ref() {
                let mut t = l.split_whitespace();
                let i: usize = parse_num(t.next(), ln, "row index")?;
                let j: usize = parse_num(t.next(), ln, "column index")?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(parse_err(ln, format!("index ({i}, {j}) outside 1..={n}")));
                }
                if symmetry != Symmetry::General && j > i {
                    return Err(parse_err(ln, "upper-triangle entry in symmetric storage"));
                }
                let v = parse_value(&mut t, field, ln)?;
                push(i - 1, j - 1, v);
                seen += 1;
                if seen == nnz {
                    break;
                }
            }
            if seen != nnz {
                return Err(parse_err(
                    size_line,
                    format!("expected {nnz} entries, found {seen}"),
                ));
            }
        }
        Layout::Array => {
            // Column-major; only the lower triangle for symmetric storage.
            let mut positions = Vec::new();
            for j in 0..n {
                let start = if symmetry == Symmetry::General { 0 } else { j };
                for i in start..n {
                    positions.push((i, j));
                }
            }
            let mut k = 0;
            for (ln, l) in body.by_ref() {
                if k == positions.len() {
                    return Err(parse_err(ln, "more values than the array holds"));
                }
                let mut t = l.split_whitespace();
                let v = parse_value(&mut t, field, ln)?;
                let (i, j) = positions[k];
                if v != C64::new(0.0, 0.0) {
                    push(i, j, v);
                }
                k += 1;
            }
            if k != positions.len() {
                return Err(parse_err(
                    size_line,
                    format!("expected {} values, found {k}", positions.len()),
                ));
            }
        }
    }
    if let Some((ln, _)) = body.next() {
        return Err(parse_err(ln, "trailing data after last entry"));
    }
    SparseMatrixCsr::from_triplets(n, &triplets)
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrixCsr, SparseError> {
    let text = fs::read_to_string(path.as_ref())
        .map_err(|e| SparseError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_matrix_market(&text)
}

/// Writes coordinate/general storage with 17 significant digits, which
/// reads back bit-identically.
pub fn write_matrix_market_to(m: &SparseMatrixCsr, out: &mut impl Write) -> std::io::Result<()> {
    let complex = !m.is_real();
    let mut s = String::new();
    let field = if complex { "complex" } else { "real" };
    let _ = writeln!(s, "%%MatrixMarket matrix coordinate {field} general");
    let _ = writeln!(s, "{} {} {}", m.n(), m.n(), m.nnz());
    for (i, j, v) in m.entries() {
        if complex {
            let _ = writeln!(s, "{} {} {:.16e} {:.16e}", i + 1, j + 1, v.re, v.im);
        } else {
            let _ = writeln!(s, "{} {} {:.16e}", i + 1, j + 1, v.re);
        }
    }
    out.write_all(s.as_bytes())
}

pub fn write_matrix_market(m: &SparseMatrixCsr, path: impl AsRef<Path>) -> Result<(), SparseError> {
    let mut f = fs::File::create(path.as_ref())
        .map_err(|e| SparseError::Io(format!("{}: {e}", path.as_ref().display())))?;
    write_matrix_market_to(m, &mut f).map_err(|e| SparseError::Io(e.to_string()))
}
