use std::path::Path;

use num_complex::Complex64;

use super::{fmt_num, read_file, write_file, Format, IoError};
use crate::graph::{apply_scaling_coo, from_coo, CooMatrix, GraphFunction, ScalingVector};

/// A matrix as read from disk, in its original number type.
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixData {
    Real(CooMatrix<f64>),
    Complex(CooMatrix<Complex64>),
}

impl MatrixData {
    pub fn n(&self) -> usize {
        match self {
            MatrixData::Real(m) => m.n,
            MatrixData::Complex(m) => m.n,
        }
    }

    pub fn to_graph(&self) -> Result<GraphFunction<f64>, IoError> {
        Ok(match self {
            MatrixData::Real(m) => from_coo(m)?,
            MatrixData::Complex(m) => from_coo(m)?,
        })
    }

    /// Entry `(i, j)` times `exp(p_j − p_i)`.
    pub fn scaled(&self, p: &ScalingVector<f64>) -> Result<Self, IoError> {
        Ok(match self {
            MatrixData::Real(m) => MatrixData::Real(apply_scaling_coo(m, p)?),
            MatrixData::Complex(m) => MatrixData::Complex(apply_scaling_coo(m, p)?),
        })
    }
}

/// Reads a Matrix Market or CSV matrix, choosing by `format` or the extension.
pub fn read_matrix(path: &Path, format: Option<Format>) -> Result<MatrixData, IoError> {
    match format.or_else(|| Format::detect(path)) {
        Some(Format::MatrixMarket) => read_mtx(&read_file(path)?),
        Some(Format::Csv) => read_csv(&read_file(path)?),
        Some(Format::GraphJson) => Err(IoError::Format("graph JSON holds a graph function, not a matrix".into())),
        None => Err(IoError::Format(format!("cannot tell the format of {}", path.display()))),
    }
}

/// Parses a Matrix Market `coordinate` file with `real`, `integer`,
/// `complex` or `pattern` entries and `general` symmetry.
pub fn read_mtx(text: &str) -> Result<MatrixData, IoError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, banner) = lines.next().ok_or_else(|| IoError::parse(1, "empty file"))?;
    let words: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(IoError::parse(1, "expected `%%MatrixMarket matrix coordinate <field> <symmetry>`"));
    }
    if words[2] != "coordinate" {
        return Err(IoError::parse(1, format!("unsupported layout `{}`", words[2])));
    }
    let field = words[3].as_str();
    if !matches!(field, "real" | "integer" | "complex" | "pattern") {
        return Err(IoError::parse(1, format!("unsupported field `{field}`")));
    }
    if words[4] != "general" {
        return Err(IoError::parse(1, format!("unsupported symmetry `{}`", words[4])));
    }
    let mut body = lines.filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('%'));
    let (size_line, size) = body.next().ok_or_else(|| IoError::parse(1, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| IoError::parse(size_line, format!("bad size `{t}`"))))
        .collect::<Result<_, _>>()?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(IoError::parse(size_line, "size line needs rows, columns and entry count"));
    };
    if rows != cols {
        return Err(crate::error::GraphError::NotSquare { rows, cols }.into());
    }
    let want = match field {
        "complex" => 4,
        "pattern" => 2,
        _ => 3,
    };
    let mut real = Vec::new();
    let mut complex = Vec::new();
    let mut count = 0;
    for (line, l) in body {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != want {
            return Err(IoError::parse(line, format!("expected {want} fields, found {}", toks.len())));
        }
        let idx = |t: &str| -> Result<usize, IoError> {
            let k: usize = t.parse().map_err(|_| IoError::parse(line, format!("bad index `{t}`")))?;
            if k == 0 || k > rows {
                return Err(IoError::parse(line, format!("index {k} outside 1..={rows}")));
            }
            Ok(k - 1)
        };
        let val = |t: &str| -> Result<f64, IoError> {
            let x: f64 = t.parse().map_err(|_| IoError::parse(line, format!("bad value `{t}`")))?;
            if !x.is_finite() {
                return Err(IoError::parse(line, format!("non-finite value `{t}`")));
            }
            Ok(x)
        };
        let (i, j) = (idx(toks[0])?, idx(toks[1])?);
        match field {
            "complex" => complex.push((i, j, Complex64::new(val(toks[2])?, val(toks[3])?))),
            "pattern" => real.push((i, j, 1.0)),
            _ => real.push((i, j, val(toks[2])?)),
        }
        count += 1;
    }
    if count != nnz {
        return Err(IoError::parse(size_line, format!("header announces {nnz} entries, file has {count}")));
    }
    Ok(if field == "complex" {
        MatrixData::Complex(CooMatrix { n: rows, entries: complex })
    } else {
        MatrixData::Real(CooMatrix { n: rows, entries: real })
    })
}

pub fn write_mtx(m: &MatrixData) -> String {
    let mut out = String::new();
    match m {
        MatrixData::Real(c) => {
            out.push_str("%%MatrixMarket matrix coordinate real general\n");
            out.push_str(&format!("{} {} {}\n", c.n, c.n, c.entries.len()));
            for &(i, j, x) in &c.entries {
                out.push_str(&format!("{} {} {}\n", i + 1, j + 1, fmt_num(x)));
            }
        }
        MatrixData::Complex(c) => {
            out.push_str("%%MatrixMarket matrix coordinate complex general\n");
            out.push_str(&format!("{} {} {}\n", c.n, c.n, c.entries.len()));
            for &(i, j, z) in &c.entries {
                out.push_str(&format!("{} {} {} {}\n", i + 1, j + 1, fmt_num(z.re), fmt_num(z.im)));
            }
        }
    }
    out
}

/// Dense real matrix, one row per record, no header.
pub fn read_csv(text: &str) -> Result<MatrixData, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(k + 1, |p| p.line() as usize);
        let row = record
            .iter()
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| IoError::parse(line, format!("bad value `{t}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(MatrixData::Real(CooMatrix::from_dense::<f64>(&rows)?))
}

/// Dense CSV; zeros are written as `0`. Complex matrices have no CSV form.
pub fn write_csv(m: &MatrixData) -> Result<String, IoError> {
    let MatrixData::Real(c) = m else {
        return Err(IoError::Format("complex matrices can only be written as Matrix Market".into()));
    };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for row in c.to_dense(0.0) {
        w.write_record(row.iter().map(|&x| if x == 0.0 { "0".to_string() } else { fmt_num(x) }))?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::Format(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

pub fn write_matrix(path: &Path, m: &MatrixData, format: Format) -> Result<(), IoError> {
    let text = match format {
        Format::MatrixMarket => write_mtx(m),
        Format::Csv => write_csv(m)?,
        Format::GraphJson => return Err(IoError::Format("use write_graph_json for graph output".into())),
    };
    write_file(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{path_graph, path_matrix};

    const PATH_MTX: &str = "%%MatrixMarket matrix coordinate real general
% the 4-path
4 4 6
1 2 2
2 1 8
2 3 2
3 2 1
3 4 2
4 3 8
";

    #[test]
    fn reads_real_mtx() {
        let m = read_mtx(PATH_MTX).unwrap();
        assert_eq!(m.to_graph().unwrap(), path_graph());
        let again = read_mtx(&write_mtx(&m)).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn reads_complex_and_integer() {
        let text = "%%MatrixMarket matrix coordinate complex general\n2 2 2\n1 2 3 4\n2 1 0 1\n";
        let MatrixData::Complex(c) = read_mtx(text).unwrap() else { panic!() };
        assert_eq!(c.entries[0].2, Complex64::new(3.0, 4.0));
        let g = read_mtx(text).unwrap().to_graph().unwrap();
        assert!((g.get(0, 1).unwrap() - 5f64.ln()).abs() < 1e-15);
        let text = "%%MatrixMarket matrix coordinate integer general\n2 2 2\n1 2 3\n2 1 1\n";
        assert!(matches!(read_mtx(text).unwrap(), MatrixData::Real(_)));
    }

    #[test]
    fn rejects_malformed_mtx() {
        assert!(read_mtx("").is_err());
        assert!(read_mtx("%%MatrixMarket matrix array real general\n2 2\n").is_err());
        assert!(read_mtx("%%MatrixMarket matrix coordinate real symmetric\n2 2 0\n").is_err());
        assert!(read_mtx("%%MatrixMarket matrix coordinate real general\n2 3 0\n").is_err());
        let short = "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 2 1\n2 1 1\n";
        assert!(matches!(read_mtx(short), Err(IoError::Parse { .. })));
        let oob = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n";
        assert!(matches!(read_mtx(oob), Err(IoError::Parse { line: 3, .. })));
    }

    #[test]
    fn csv_round_trip() {
        let text = "0,2,0,0\n8,0,2,0\n0,1,0,2\n0,0,8,0\n";
        let m = read_csv(text).unwrap();
        assert_eq!(m.to_graph().unwrap(), path_graph());
        let back = read_csv(&write_csv(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        let MatrixData::Real(c) = m else { panic!() };
        assert_eq!(c.to_dense(0.0), path_matrix());
        assert!(read_csv("1,2\n3\n").is_err());
        assert!(read_csv("1,x\n3,4\n").is_err());
    }

    #[test]
    fn scaling_preserves_diagonal() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 5\n1 2 4\n2 1 1\n";
        let m = read_mtx(text).unwrap();
        let s = m.scaled(&ScalingVector(vec![0.0, -(2f64.ln())])).unwrap();
        let MatrixData::Real(c) = s else { panic!() };
        assert_eq!(c.entries[0].2, 5.0);
        assert!((c.entries[1].2 - 2.0).abs() < 1e-15);
        assert!((c.entries[2].2 - 2.0).abs() < 1e-15);
    }
}
