//! Synthetic instance generators and the on-disk formats.
//!
//! * Dense matrices: CSV, one row per line, no header.
//! * Vectors: one value per line.
//! * LIBSVM: `label idx:val idx:val ...`, indices 1-based.
//! * Edge lists: optional `nodes edges` header, then `i j w` per line,
//!   1-based, mirrored across the diagonal.
//!
//! In every format `#` starts a comment that runs to the end of the line.
//!
//! Floats are written with 17 significant digits so files round-trip bitwise.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, contents: String) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// `b = A·x*` with standard normal `A` and `x*`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianInstance {
    pub a: Matrix,
    pub b: Vec<f64>,
    pub x_star: Vec<f64>,
}

pub fn gen_gaussian_instance(m: usize, n: usize, seed: u64) -> GaussianInstance {
    gen_gaussian_family(m, n, 1, seed).pop().expect("count is one")
}

/// `count` instances sharing one `x*`, drawn from a single seeded stream:
/// `x*` first, then each `A_i` row by row.
pub fn gen_gaussian_family(m: usize, n: usize, count: usize, seed: u64) -> Vec<GaussianInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x_star: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    (0..count)
        .map(|_| {
            let a = Matrix::standard_normal(m, n, &mut rng);
            let b = a.matvec(&x_star).expect("shapes agree by construction");
            GaussianInstance {
                a,
                b,
                x_star: x_star.clone(),
            }
        })
        .collect()
}

/// Labelled samples, one row of `x` per label.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmData {
    pub x: Matrix,
    pub y: Vec<f64>,
}

/// Gaussian features labelled by a random hyperplane, with 10% of labels flipped
/// so the data is not separable.
pub fn gen_svm(samples: usize, dim: usize, seed: u64) -> SvmData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    let x = Matrix::standard_normal(samples, dim, &mut rng);
    let y = (0..samples)
        .map(|i| {
            let s = if dot(x.row(i), &w) >= 0.0 { 1.0 } else { -1.0 };
            if rng.random_bool(0.1) {
                -s
            } else {
                s
            }
        })
        .collect();
    SvmData { x, y }
}

/// Erdős–Rényi graph with unit weights, as a 1-based edge list with `i < j`.
pub fn gen_graph(nodes: usize, density: f64, seed: u64) -> Vec<(usize, usize, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 1..=nodes {
        for j in i + 1..=nodes {
            if rng.random_bool(density.clamp(0.0, 1.0)) {
                edges.push((i, j, 1.0));
            }
        }
    }
    edges
}

/// Symmetric matrix from 1-based edges; repeated edges accumulate.
pub fn edges_to_matrix(nodes: usize, edges: &[(usize, usize, f64)]) -> Result<Matrix> {
    let mut m = Matrix::zeros(nodes, nodes);
    for &(i, j, w) in edges {
        if i == 0 || j == 0 || i > nodes || j > nodes {
            return Err(Error::invalid("edge", format!("({i}, {j}) outside 1..={nodes}")));
        }
        m[(i - 1, j - 1)] += w;
        if i != j {
            m[(j - 1, i - 1)] += w;
        }
    }
    Ok(m)
}

/// Graph Laplacian `D − W` of a symmetric weight matrix.
pub fn laplacian(w: &Matrix) -> Matrix {
    let n = w.rows();
    let mut l = w.scaled(-1.0);
    for i in 0..n {
        let deg: f64 = (0..n).filter(|j| *j != i).map(|j| w[(i, j)]).sum();
        l[(i, i)] = deg;
    }
    l
}

pub fn load_libsvm(path: impl AsRef<Path>) -> Result<SvmData> {
    load_libsvm_with_dim(path, None)
}

/// Parses a LIBSVM file. With `dim = None` the width is the largest index seen.
pub fn load_libsvm_with_dim(path: impl AsRef<Path>, dim: Option<usize>) -> Result<SvmData> {
    let path = path.as_ref();
    let text = read(path)?;
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut width = 0;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("line is nonempty");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, format!("bad label `{label_tok}`")))?;
        let mut row = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(path, lineno + 1, format!("expected idx:val, got `{tok}`")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(path, lineno + 1, format!("bad index `{idx}`")))?;
            if idx == 0 {
                return Err(parse_err(path, lineno + 1, "indices are 1-based"));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| parse_err(path, lineno + 1, format!("bad value `{val}`")))?;
            if let Some(d) = dim {
                if idx > d {
                    return Err(parse_err(
                        path,
                        lineno + 1,
                        format!("index {idx} exceeds dimension {d}"),
                    ));
                }
            }
            width = width.max(idx);
            row.push((idx, val));
        }
        labels.push(label);
        rows.push(row);
    }
    let d = dim.unwrap_or(width);
    let mut x = Matrix::zeros(rows.len(), d);
    for (i, row) in rows.iter().enumerate() {
        for &(idx, val) in row {
            x[(i, idx - 1)] = val;
        }
    }
    Ok(SvmData { x, y: labels })
}

pub fn write_libsvm(path: impl AsRef<Path>, data: &SvmData) -> Result<()> {
    let mut out = String::new();
    for (i, y) in data.y.iter().enumerate() {
        out.push_str(if *y > 0.0 { "+1" } else { "-1" });
        for (j, v) in data.x.row(i).iter().enumerate() {
            if *v != 0.0 {
                out.push_str(&format!(" {}:{}", j + 1, format_f64(*v)));
            }
        }
        out.push('\n');
    }
    write(path.as_ref(), out)
}

/// Reads a symmetric matrix from dense CSV (any line with a comma outside a
/// comment) or from a 1-based edge list.
pub fn load_symmetric_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let text = read(path)?;
    let dense = text.lines().any(|l| l.split('#').next().unwrap_or("").contains(','));
    let m = if dense {
        parse_dense_csv(&text, path)?
    } else {
        parse_edge_list(&text, path)?
    };
    if !m.is_square() {
        return Err(parse_err(
            path,
            0,
            format!("matrix is {}x{}, not square", m.rows(), m.cols()),
        ));
    }
    if !m.is_symmetric(1e-12 * m.frobenius_norm().max(1.0)) {
        return Err(parse_err(path, 0, "matrix is not symmetric"));
    }
    Ok(m)
}

fn parse_edge_list(text: &str, path: &Path) -> Result<Matrix> {
    let mut header: Option<usize> = None;
    let mut edges = Vec::new();
    let mut first = true;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let was_first = std::mem::replace(&mut first, false);
        if was_first && toks.len() == 2 {
            let n = toks[0]
                .parse()
                .map_err(|_| parse_err(path, lineno + 1, "bad node count in header"))?;
            header = Some(n);
            continue;
        }
        if toks.len() != 3 {
            return Err(parse_err(path, lineno + 1, "expected `i j w`"));
        }
        let i: usize = toks[0]
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, format!("bad node `{}`", toks[0])))?;
        let j: usize = toks[1]
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, format!("bad node `{}`", toks[1])))?;
        let w: f64 = toks[2]
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, format!("bad weight `{}`", toks[2])))?;
        if i == 0 || j == 0 {
            return Err(parse_err(path, lineno + 1, "nodes are 1-based"));
        }
        if let Some(n) = header {
            if i > n || j > n {
                return Err(parse_err(path, lineno + 1, format!("node exceeds header count {n}")));
            }
        }
        edges.push((i, j, w));
    }
    let nodes = header.unwrap_or_else(|| edges.iter().map(|e| e.0.max(e.1)).max().unwrap_or(0));
    edges_to_matrix(nodes, &edges)
}

pub fn write_edge_list(path: impl AsRef<Path>, nodes: usize, edges: &[(usize, usize, f64)]) -> Result<()> {
    let mut out = format!("{nodes} {}\n", edges.len());
    for (i, j, w) in edges {
        out.push_str(&format!("{i} {j} {}\n", format_f64(*w)));
    }
    write(path.as_ref(), out)
}

fn parse_dense_csv(text: &str, path: &Path) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| parse_err(path, lineno + 1, format!("bad number `{}`", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_err(
                    path,
                    lineno + 1,
                    format!("row has {} columns, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    Matrix::from_rows(&rows)
}

pub fn load_dense_csv(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    parse_dense_csv(&read(path)?, path)
}

pub fn write_dense_csv(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format_f64(*v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write(path.as_ref(), out)
}

pub fn load_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    read(path)?
        .lines()
        .enumerate()
        .map(|(i, l)| (i, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            l.parse()
                .map_err(|_| parse_err(path, i + 1, format!("bad number `{l}`")))
        })
        .collect()
}

pub fn write_vector(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    let mut out = String::new();
    for x in v {
        out.push_str(&format_f64(*x));
        out.push('\n');
    }
    write(path.as_ref(), out)
}

/// Sidecar describing how a data directory was generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenMetadata {
    pub kind: String,
    pub seed: u64,
    pub params: BTreeMap<String, f64>,
    pub files: Vec<String>,
}

pub const METADATA_FILE: &str = "meta.json";

impl GenMetadata {
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<PathBuf> {
        let path = dir.as_ref().join(METADATA_FILE);
        let text = serde_json::to_string_pretty(self).expect("metadata serializes");
        write(&path, text + "\n")?;
        Ok(path)
    }

    pub fn read(dir: impl AsRef<Path>) -> Result<Self> {
        let path = dir.as_ref().join(METADATA_FILE);
        let text = read(&path)?;
        serde_json::from_str(&text).map_err(|e| parse_err(&path, e.line(), e.to_string()))
    }
}
