//! Smallest eigenpairs of symmetric operators: a dense path for desk-scale
//! problems and a block Rayleigh–Ritz iteration above it.

use nalgebra::{DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::potentials::Mat;
use crate::sparse::CsrMatrix;

pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn to_dense(&self) -> Mat;
}

impl SymmetricOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_slice(x, y)
    }

    fn to_dense(&self) -> Mat {
        CsrMatrix::to_dense(self)
    }
}

impl SymmetricOperator for Mat {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            *out = self.row(r).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    fn to_dense(&self) -> Mat {
        self.clone()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// Largest dimension handled by the dense solver.
    pub dense_limit: usize,
    pub tol: f64,
    /// Cap on operator applications.
    pub max_iter: usize,
    /// Search-space size that triggers a thick restart.
    pub restart: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { dense_limit: 2000, tol: 1e-10, max_iter: 5000, restart: 300 }
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpairs {
    /// Ascending.
    pub values: Vec<f64>,
    /// One unit column per eigenvalue.
    pub vectors: Mat,
}

pub fn smallest_eigenpairs<M: SymmetricOperator + ?Sized>(m: &M, k: usize) -> Result<Eigenpairs> {
    smallest_eigenpairs_with(m, k, &EigenOptions::default())
}

pub fn smallest_eigenpairs_with<M: SymmetricOperator + ?Sized>(
    m: &M,
    k: usize,
    opts: &EigenOptions,
) -> Result<Eigenpairs> {
    let n = m.dim();
    if k > n {
        return Err(Error::dims(format!("requested {k} eigenpairs of a {n}x{n} operator")));
    }
    if n <= opts.dense_limit {
        dense_smallest(&m.to_dense(), k)
    } else {
        iterative_smallest(m, k, opts)
    }
}

fn dense_smallest(a: &Mat, k: usize) -> Result<Eigenpairs> {
    let n = a.nrows();
    let scale = a.amax().max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::Validation(format!("operator not symmetric at ({i}, {j})")));
            }
        }
    }
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]).then(x.cmp(&y)));
    let mut vectors = Mat::zeros(n, k);
    let mut values = Vec::with_capacity(k);
    for (col, &idx) in order.iter().take(k).enumerate() {
        values.push(eig.eigenvalues[idx]);
        let mut v = eig.eigenvectors.column(idx).into_owned();
        fix_sign(&mut v);
        vectors.set_column(col, &v);
    }
    Ok(Eigenpairs { values, vectors })
}

/// Make the entry of largest magnitude positive (first one on ties).
fn fix_sign(v: &mut DVector<f64>) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() + 1e-12 {
            best = i;
        }
    }
    if !v.is_empty() && v[best] < 0.0 {
        v.neg_mut();
    }
}

/// Block Rayleigh–Ritz iteration with thick restart: the search space is
/// grown by the residuals of the unconverged Ritz pairs, so eigenvalues of
/// multiplicity up to `k` are resolved.
fn iterative_smallest<M: SymmetricOperator + ?Sized>(m: &M, k: usize, opts: &EigenOptions) -> Result<Eigenpairs> {
    let n = m.dim();
    if k == 0 {
        return Ok(Eigenpairs { values: Vec::new(), vectors: Mat::zeros(n, 0) });
    }
    let max_space = opts.restart.max(3 * k).min(n);
    let keep = (2 * k).min(max_space);
    let mut rng = ChaCha8Rng::seed_from_u64(0x001a_2c05);
    let mut v = Mat::zeros(n, 0);
    let mut av = Mat::zeros(n, 0);
    let mut block = Mat::from_fn(n, k, |_, _| rng.random::<f64>() - 0.5);
    let mut applications = 0;
    let mut norm_est: f64 = 1.0;

    loop {
        // orthonormalize the new block against the space and itself
        let mut fresh = Vec::new();
        for c in 0..block.ncols() {
            let mut x = block.column(c).into_owned();
            for _ in 0..2 {
                if v.ncols() > 0 {
                    let proj = v.transpose() * &x;
                    x -= &v * proj;
                }
                for q in &fresh {
                    let q: &DVector<f64> = q;
                    let c = q.dot(&x);
                    x.axpy(-c, q, 1.0);
                }
            }
            let nrm = x.norm();
            if nrm > 1e-10 {
                fresh.push(x / nrm);
            }
        }
        if fresh.is_empty() && v.ncols() < k {
            let x = DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5);
            block = Mat::from_columns(&[x]);
            continue;
        }
        for q in fresh {
            let mut y = vec![0.0; n];
            m.apply(q.as_slice(), &mut y);
            applications += 1;
            let cols = v.ncols();
            v = v.insert_column(cols, 0.0);
            v.set_column(cols, &q);
            av = av.insert_column(cols, 0.0);
            av.set_column(cols, &DVector::from_vec(y));
        }

        let h = v.transpose() * &av;
        let h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]).then(x.cmp(&y)));
        norm_est = norm_est.max(eig.eigenvalues.amax());
        let wanted = k.min(order.len());
        let s = Mat::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
        let x = &v * &s;
        let ax = &av * &s;

        let mut unconverged = Vec::new();
        for c in 0..wanted {
            let theta = eig.eigenvalues[order[c]];
            let r = ax.column(c) - x.column(c) * theta;
            if r.norm() > opts.tol * norm_est {
                unconverged.push(r);
            }
        }
        if wanted == k && unconverged.is_empty() {
            let values = order.iter().take(k).map(|&i| eig.eigenvalues[i]).collect();
            let mut vectors = x.columns(0, k).into_owned();
            for c in 0..k {
                let mut col = vectors.column(c).into_owned();
                fix_sign(&mut col);
                vectors.set_column(c, &col);
            }
            return Ok(Eigenpairs { values, vectors });
        }
        if applications >= opts.max_iter {
            return Err(Error::ConvergenceFailure { iterations: applications });
        }
        if v.ncols() + unconverged.len() > max_space {
            let kept = keep.min(v.ncols());
            v = x.columns(0, kept).into_owned();
            av = ax.columns(0, kept).into_owned();
        }
        block = if unconverged.is_empty() {
            Mat::from_fn(n, 1, |_, _| rng.random::<f64>() - 0.5)
        } else {
            Mat::from_columns(&unconverged)
        };
    }
}
