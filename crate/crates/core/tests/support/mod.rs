//! Shared helpers for the integration and acceptance suites: an
//! independent dense eigensolver and packet statistics. Everything here is
//! deliberately separate from the library's own numerical paths.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;
use ptlattice::LatticeWavefunction;

/// Cyclic Jacobi diagonalization of a real symmetric matrix. Returns the
/// eigenvalues (ascending) and the corresponding eigenvectors as rows.
pub fn jacobi_eigh(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..200 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let eigenvalues = order.iter().map(|&i| a[i][i]).collect();
    let eigenvectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k][i]).collect())
        .collect();
    (eigenvalues, eigenvectors)
}

/// Dense tridiagonal Hamiltonian of the linear chain.
pub fn chain_hamiltonian(onsite: &[f64], tunneling: &[f64]) -> Vec<Vec<f64>> {
    let n = onsite.len();
    let mut h = vec![vec![0.0; n]; n];
    for k in 0..n {
        h[k][k] = onsite[k];
        if k + 1 < n {
            h[k][k + 1] = -tunneling[k];
            h[k + 1][k] = -tunneling[k];
        }
    }
    h
}

/// Density-weighted packet center in 1-based site coordinates.
pub fn packet_center(psi: &LatticeWavefunction) -> f64 {
    let norm = psi.total_norm();
    psi.amplitudes
        .iter()
        .enumerate()
        .map(|(k, a)| (k + 1) as f64 * a.norm_sqr())
        .sum::<f64>()
        / norm
}

/// Density-weighted packet variance.
pub fn packet_variance(psi: &LatticeWavefunction) -> f64 {
    let norm = psi.total_norm();
    let mean = packet_center(psi);
    psi.amplitudes
        .iter()
        .enumerate()
        .map(|(k, a)| ((k + 1) as f64 - mean).powi(2) * a.norm_sqr())
        .sum::<f64>()
        / norm
}

/// Peak density of a state.
pub fn peak_density(psi: &LatticeWavefunction) -> f64 {
    psi.amplitudes
        .iter()
        .map(Complex64::norm_sqr)
        .fold(0.0, f64::max)
}
