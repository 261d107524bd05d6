//! Classical (Torgerson) multidimensional scaling: double-center the squared
//! dissimilarities, take the top eigenpairs, and scale eigenvectors by the
//! square roots of their eigenvalues.

use nalgebra::{DMatrix, SymmetricEigen};

use entrot::error::{Error, Result};

/// Embeds an m×m dissimilarity matrix into `out_dim` Euclidean coordinates.
///
/// Negative eigenvalues among the selected ones are clamped to zero (their
/// coordinates collapse); if every eigenvalue is nonpositive while the input
/// has nonzero dissimilarities, there is no Euclidean structure to embed and
/// the call fails. Output columns are canonicalized: the entry of largest
/// magnitude in each coordinate is made positive.
pub fn classical_mds(d: &DMatrix<f64>, out_dim: usize) -> Result<DMatrix<f64>> {
    let m = d.nrows();
    if d.ncols() != m {
        return Err(Error::NotSquare {
            rows: m,
            cols: d.ncols(),
        });
    }
    if out_dim < 1 {
        return Err(Error::InvalidParameter {
            name: "out_dim",
            message: "must be at least 1".into(),
        });
    }
    for i in 0..m {
        if d[(i, i)].abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "d",
                message: format!("diagonal must be zero, d[{i},{i}] = {}", d[(i, i)]),
            });
        }
        for j in 0..m {
            if d[(i, j)] < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "d",
                    message: format!("dissimilarities must be nonnegative, d[{i},{j}] < 0"),
                });
            }
        }
    }

    // B = −½·J·D²·J with J = I − (1/m)·11ᵀ.
    let squared = d.map(|v| v * v);
    let ones = DMatrix::from_element(m, m, 1.0 / m as f64);
    let j = DMatrix::identity(m, m) - ones;
    let b = -0.5 * (&j * squared * &j);

    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &c| {
        eig.eigenvalues[c]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalues")
    });

    let all_zero = d.iter().all(|v| *v == 0.0);
    if !all_zero && eig.eigenvalues[order[0]] <= 0.0 {
        return Err(Error::DegenerateEmbedding);
    }

    let mut coords = DMatrix::zeros(m, out_dim);
    for (col, &idx) in order.iter().take(out_dim).enumerate() {
        let value = eig.eigenvalues[idx].max(0.0);
        let scale = value.sqrt();
        for row in 0..m {
            coords[(row, col)] = eig.eigenvectors[(row, idx)] * scale;
        }
    }

    // Sign canonicalization per output coordinate.
    for col in 0..out_dim {
        let mut best = 0;
        for row in 0..m {
            if coords[(row, col)].abs() > coords[(best, col)].abs() {
                best = row;
            }
        }
        if coords[(best, col)] < 0.0 {
            for row in 0..m {
                coords[(row, col)] = -coords[(row, col)];
            }
        }
    }
    Ok(coords)
}
