use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::{EmbeddingError, EmbeddingTable};

/// Tokens projected onto the top two principal axes of their own vectors.
#[derive(Debug, Clone, Serialize)]
pub struct Projection2D {
    tokens: Vec<String>,
    #[serde(skip)]
    lookup: HashMap<String, usize>,
    points: Vec<[f64; 2]>,
    /// Unit principal axes, largest eigenvalue first.
    pub axes: [Vec<f64>; 2],
    pub mean: Vec<f64>,
    pub eigenvalues: [f64; 2],
    /// Set when the fitted points have no variance at all.
    pub degenerate: bool,
}

impl Projection2D {
    /// A projection from precomputed points, with identity axes.
    pub fn from_points<I, S>(points: I) -> Self
    where
        I: IntoIterator<Item = (S, [f64; 2])>,
        S: Into<String>,
    {
        let mut tokens = Vec::new();
        let mut coords = Vec::new();
        let mut lookup = HashMap::new();
        for (t, p) in points {
            let t: String = t.into();
            match lookup.get(&t) {
                Some(&i) => coords[i] = p,
                None => {
                    lookup.insert(t.clone(), tokens.len());
                    tokens.push(t);
                    coords.push(p);
                }
            }
        }
        Self {
            tokens,
            lookup,
            points: coords,
            axes: [vec![1.0, 0.0], vec![0.0, 1.0]],
            mean: vec![0.0, 0.0],
            eigenvalues: [0.0, 0.0],
            degenerate: false,
        }
    }

    pub fn get(&self, token: &str) -> Option<[f64; 2]> {
        self.lookup.get(token).map(|&i| self.points[i])
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, [f64; 2])> {
        self.tokens.iter().map(String::as_str).zip(self.points.iter().copied())
    }

    /// Projects an arbitrary vector with the fitted mean and axes.
    pub fn project(&self, v: &[f64]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (k, axis) in self.axes.iter().enumerate() {
            out[k] = v.iter().zip(&self.mean).zip(axis).map(|((x, m), a)| (x - m) * a).sum();
        }
        out
    }
}

/// Fits PCA over the in-vocabulary `tokens` (duplicates ignored, first
/// occurrence order kept) and projects each onto the top two axes.
///
/// The covariance is the unbiased sample covariance of the mean-centred
/// vectors. Axes are ordered by descending eigenvalue, ties by eigenvector
/// index, and each axis is signed so its largest-magnitude component is
/// positive.
pub fn pca_fit_project<S: AsRef<str>>(table: &EmbeddingTable, tokens: &[S]) -> Result<Projection2D, EmbeddingError> {
    let mut seen = HashMap::new();
    let mut kept: Vec<(&str, &[f64])> = Vec::new();
    for t in tokens {
        let t = t.as_ref();
        if let Some(v) = table.get(t) {
            if seen.insert(t, ()).is_none() {
                kept.push((t, v));
            }
        }
    }
    let n = kept.len();
    if n < 3 {
        return Err(EmbeddingError::Degenerate(n));
    }
    let d = table.dim();

    let mut mean = vec![0.0; d];
    for (_, v) in &kept {
        for (m, x) in mean.iter_mut().zip(v.iter()) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let centred: Vec<Vec<f64>> = kept
        .iter()
        .map(|(_, v)| v.iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();

    // Identical inputs can leave rounding residue in the mean, so zero
    // variance is judged relative to the magnitude of the data.
    let scale = kept.iter().flat_map(|(_, v)| v.iter()).fold(0.0f64, |m, x| m.max(x.abs()));
    let spread = centred.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let degenerate = spread <= 1e-12 * scale.max(1.0);
    let (axes, eigenvalues) = if degenerate {
        log::warn!("PCA input of {n} tokens has zero variance; every point projects to the origin");
        let mut a0 = vec![0.0; d];
        let mut a1 = vec![0.0; d];
        a0[0] = 1.0;
        if d > 1 {
            a1[1] = 1.0;
        }
        ([a0, a1], [0.0, 0.0])
    } else if n <= d {
        top_two_axes_gram(&centred).unwrap_or_else(|| top_two_axes(covariance(&centred, d)))
    } else {
        top_two_axes(covariance(&centred, d))
    };

    let mut lookup = HashMap::with_capacity(n);
    let mut names = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    for ((token, _), row) in kept.iter().zip(&centred) {
        lookup.insert(token.to_string(), names.len());
        names.push(token.to_string());
        if degenerate {
            points.push([0.0, 0.0]);
        } else {
            let p0: f64 = row.iter().zip(&axes[0]).map(|(x, a)| x * a).sum();
            let p1: f64 = row.iter().zip(&axes[1]).map(|(x, a)| x * a).sum();
            points.push([p0, p1]);
        }
    }

    Ok(Projection2D {
        tokens: names,
        lookup,
        points,
        axes,
        mean,
        eigenvalues,
        degenerate,
    })
}

/// Unbiased sample covariance of mean-centred rows.
fn covariance(centred: &[Vec<f64>], d: usize) -> DMatrix<f64> {
    let n = centred.len();
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for row in centred {
        for i in 0..d {
            let ri = row[i];
            if ri == 0.0 {
                continue;
            }
            for j in i..d {
                cov[(i, j)] += ri * row[j];
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..d {
        for j in i..d {
            let v = cov[(i, j)] / denom;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    cov
}

/// Top two axes from the `n x n` Gram matrix, for fewer points than
/// dimensions: if `G v = l v` with `G = C C^T / (n-1)`, then `C^T v` is an
/// eigenvector of the covariance with the same eigenvalue. `None` when the
/// second eigenvalue vanishes and its axis would be noise.
fn top_two_axes_gram(centred: &[Vec<f64>]) -> Option<([Vec<f64>; 2], [f64; 2])> {
    let n = centred.len();
    let denom = (n - 1) as f64;
    let gram = DMatrix::from_fn(n, n, |i, j| {
        centred[i].iter().zip(&centred[j]).map(|(a, b)| a * b).sum::<f64>() / denom
    });
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let l0 = eig.eigenvalues[order[0]].max(0.0);
    let l1 = eig.eigenvalues[order[1]].max(0.0);
    if l1 <= 1e-12 * l0 {
        return None;
    }
    let d = centred[0].len();
    let axis = |k: usize| -> Vec<f64> {
        let v = eig.eigenvectors.column(order[k]);
        let mut u = vec![0.0; d];
        for (row, w) in centred.iter().zip(v.iter()) {
            u.iter_mut().zip(row).for_each(|(a, x)| *a += w * x);
        }
        u
    };
    let mut first = axis(0);
    normalize(&mut first);
    fix_sign(&mut first);
    let mut second = axis(1);
    let dot: f64 = second.iter().zip(&first).map(|(a, b)| a * b).sum();
    second.iter_mut().zip(&first).for_each(|(s, f)| *s -= dot * f);
    normalize(&mut second);
    fix_sign(&mut second);
    Some(([first, second], [l0, l1]))
}

fn top_two_axes(cov: DMatrix<f64>) -> ([Vec<f64>; 2], [f64; 2]) {
    let d = cov.nrows();
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    let column = |k: usize| -> Vec<f64> { eig.eigenvectors.column(order[k]).iter().copied().collect() };
    let mut first = column(0);
    normalize(&mut first);
    fix_sign(&mut first);

    let mut second = if d > 1 { column(1) } else { vec![0.0] };
    // Re-orthogonalise against the first axis so the basis is orthonormal to
    // rounding even when eigenvalues are close.
    let dot: f64 = second.iter().zip(&first).map(|(a, b)| a * b).sum();
    second.iter_mut().zip(&first).for_each(|(s, f)| *s -= dot * f);
    normalize(&mut second);
    fix_sign(&mut second);

    let l0 = eig.eigenvalues[order[0]].max(0.0);
    let l1 = if d > 1 { eig.eigenvalues[order[1]].max(0.0) } else { 0.0 };
    ([first, second], [l0, l1])
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// Largest-magnitude component (first on ties) made positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}
