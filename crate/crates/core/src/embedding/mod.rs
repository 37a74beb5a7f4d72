//! Pretrained word vectors in word2vec text format, cosine similarity,
//! vector composition and a 2-D PCA projection.
//!
//! Only the text format is read (`count dim` header, then `token v1 ... vdim`
//! per line). The binary word2vec format is not supported.

mod pca;

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use pca::{pca_fit_project, Projection2D};

#[derive(Debug, thiserror::Error)]
pub enum EmbeddingError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("vector dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("cannot compose an empty list of vectors")]
    EmptyCompose,
    #[error("PCA needs at least 3 in-vocabulary tokens, got {0}")]
    Degenerate(usize),
    #[error("{}: {source}", .path)]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Training settings the vectors are expected to have been produced with.
/// Recorded in run metadata; the loader does not verify them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingContract {
    pub model: String,
    pub learning_rate: f64,
    pub window: usize,
    pub dimension: usize,
    pub min_count: usize,
}

impl Default for TrainingContract {
    fn default() -> Self {
        Self {
            model: "word2vec skip-gram".into(),
            learning_rate: 0.0001,
            window: 5,
            dimension: 200,
            min_count: 1,
        }
    }
}

/// Token → dense vector, all of one dimension.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dim: usize,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    pub contract: TrainingContract,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        Self {
            dim,
            tokens: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
            contract: TrainingContract::default(),
        }
    }

    /// Inserts or replaces a vector; returns whether the token was already present.
    pub fn insert(&mut self, token: impl Into<String>, vector: &[f64]) -> Result<bool, EmbeddingError> {
        if vector.len() != self.dim {
            return Err(EmbeddingError::DimensionMismatch {
                left: self.dim,
                right: vector.len(),
            });
        }
        let token = token.into();
        if let Some(&i) = self.index.get(&token) {
            self.data[i * self.dim..(i + 1) * self.dim].copy_from_slice(vector);
            return Ok(true);
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        self.data.extend_from_slice(vector);
        Ok(false)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.index.get(token).map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }

    /// Tokens in file order.
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }

    pub fn parse<R: BufRead>(reader: R) -> Result<Self, EmbeddingError> {
        let mut lines = reader.lines().enumerate();
        let io_err = |line: usize, e: std::io::Error| EmbeddingError::Parse {
            line,
            message: if e.kind() == std::io::ErrorKind::InvalidData {
                "not UTF-8 text (binary word2vec files are not supported)".into()
            } else {
                e.to_string()
            },
        };

        let header = loop {
            match lines.next() {
                Some((i, line)) => {
                    let line = line.map_err(|e| io_err(i + 1, e))?;
                    if !line.trim().is_empty() {
                        break line;
                    }
                }
                None => {
                    return Err(EmbeddingError::Parse {
                        line: 1,
                        message: "missing \"count dim\" header".into(),
                    })
                }
            }
        };
        let bad_header = || EmbeddingError::Parse {
            line: 1,
            message: format!("bad header {header:?}, expected \"count dim\""),
        };
        let mut fields = header.split_whitespace();
        let count: usize = fields.next().and_then(|s| s.parse().ok()).ok_or_else(bad_header)?;
        let dim: usize = fields.next().and_then(|s| s.parse().ok()).ok_or_else(bad_header)?;
        if dim == 0 || fields.next().is_some() {
            return Err(bad_header());
        }

        let mut table = Self::new(dim);
        let mut rows = 0usize;
        let mut vector = Vec::with_capacity(dim);
        for (i, line) in lines {
            let line_no = i + 1;
            let line = line.map_err(|e| io_err(line_no, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let token = fields.next().expect("non-empty line");
            vector.clear();
            for f in fields {
                let v: f64 = f.parse().map_err(|_| EmbeddingError::Parse {
                    line: line_no,
                    message: format!("non-numeric component {f:?}"),
                })?;
                vector.push(v);
            }
            if vector.len() != dim {
                return Err(EmbeddingError::Parse {
                    line: line_no,
                    message: format!("expected {dim} components, found {}", vector.len()),
                });
            }
            rows += 1;
            if rows > count {
                return Err(EmbeddingError::Parse {
                    line: line_no,
                    message: format!("more rows than the {count} declared in the header"),
                });
            }
            if table.insert(token, &vector)? {
                log::warn!("line {line_no}: duplicate token {token:?}, keeping the later vector");
            }
        }
        if rows != count {
            return Err(EmbeddingError::Parse {
                line: 1,
                message: format!("header declares {count} rows, file has {rows}"),
            });
        }
        Ok(table)
    }
}

/// Reads a word2vec text-format file.
pub fn load_embeddings(path: &Path) -> Result<EmbeddingTable, EmbeddingError> {
    let file = File::open(path).map_err(|source| EmbeddingError::Io {
        path: path.display().to_string(),
        source,
    })?;
    EmbeddingTable::parse(BufReader::new(file))
}

/// A cosine value; `zero_norm` is set when either input had zero length, in
/// which case `value` is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cosine {
    pub value: f64,
    pub zero_norm: bool,
}

pub fn cosine(a: &[f64], b: &[f64]) -> Result<Cosine, EmbeddingError> {
    if a.len() != b.len() {
        return Err(EmbeddingError::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Ok(Cosine {
            value: 0.0,
            zero_norm: true,
        });
    }
    Ok(Cosine {
        value: (dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0),
        zero_norm: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Compose {
    Sum,
    Mean,
}

/// Componentwise sum or mean of equal-length vectors.
pub fn compose<V: AsRef<[f64]>>(vectors: &[V], mode: Compose) -> Result<Vec<f64>, EmbeddingError> {
    let first = vectors.first().ok_or(EmbeddingError::EmptyCompose)?.as_ref();
    let mut out = first.to_vec();
    for v in &vectors[1..] {
        let v = v.as_ref();
        if v.len() != out.len() {
            return Err(EmbeddingError::DimensionMismatch {
                left: out.len(),
                right: v.len(),
            });
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o += x;
        }
    }
    if mode == Compose::Mean {
        let n = vectors.len() as f64;
        out.iter_mut().for_each(|o| *o /= n);
    }
    Ok(out)
}
