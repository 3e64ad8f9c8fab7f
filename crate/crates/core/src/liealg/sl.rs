use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

use super::roots::RootPair;
use super::{LieAlgebra, RootDatum};

/// Integer n x n matrix for the defining representation.
type IntMat = Vec<Vec<i64>>;

fn unit(n: usize, i: usize, j: usize) -> IntMat {
    let mut m = vec![vec![0; n]; n];
    m[i][j] = 1;
    m
}

fn commutator(a: &IntMat, b: &IntMat) -> IntMat {
    let n = a.len();
    let mut out = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0;
            for k in 0..n {
                acc += a[i][k] * b[k][j] - b[i][k] * a[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

fn trace_product(a: &IntMat, b: &IntMat) -> i64 {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|k| a[i][k] * b[k][i]).sum::<i64>())
        .sum()
}

/// `sl_n` in the basis `h_1..h_{n-1}` (`h_i = E_ii − E_{i+1,i+1}`), positive
/// root vectors `E_ij` (`i < j`) in height order, then the matching `E_ji`.
/// The form is the trace form of the defining representation, which is
/// `1/(2n)` times the Killing form.
pub fn build_sl<S: Scalar>(n: usize) -> Result<(LieAlgebra<S>, RootDatum<S>)> {
    if n < 2 {
        return Err(Error::input(format!("sl_n needs n >= 2, got {n}")));
    }
    let rank = n - 1;
    let mut pos: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    pos.sort_by_key(|&(i, j)| (j - i, i));
    let npos = pos.len();
    let d = rank + 2 * npos;

    let mut mats: Vec<IntMat> = Vec::with_capacity(d);
    let mut labels = Vec::with_capacity(d);
    for i in 0..rank {
        let mut h = unit(n, i, i);
        h[i + 1][i + 1] = -1;
        mats.push(h);
        labels.push(format!("h{}", i + 1));
    }
    for &(i, j) in &pos {
        mats.push(unit(n, i, j));
        labels.push(format!("e{}{}", i + 1, j + 1));
    }
    for &(i, j) in &pos {
        mats.push(unit(n, j, i));
        labels.push(format!("f{}{}", i + 1, j + 1));
    }

    let index_of = |i: usize, j: usize| -> usize {
        let (p, offset) = if i < j {
            ((i, j), rank)
        } else {
            ((j, i), rank + npos)
        };
        offset + pos.iter().position(|&q| q == p).expect("root index")
    };
    // coordinates of a traceless integer matrix
    let decompose = |m: &IntMat| -> Vec<i64> {
        let mut v = vec![0i64; d];
        let mut running = 0;
        for (k, slot) in v.iter_mut().enumerate().take(rank) {
            running += m[k][k];
            *slot = running;
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && m[i][j] != 0 {
                    v[index_of(i, j)] = m[i][j];
                }
            }
        }
        v
    };

    let mut structure = vec![S::zero(); d * d * d];
    for a in 0..d {
        for b in 0..d {
            let coords = decompose(&commutator(&mats[a], &mats[b]));
            for (k, &c) in coords.iter().enumerate() {
                if c != 0 {
                    structure[(a * d + b) * d + k] = S::from_i64(c);
                }
            }
        }
    }
    let gram = DenseMatrix::from_fn(d, d, |a, b| S::from_i64(trace_product(&mats[a], &mats[b])));
    let alg = LieAlgebra::new(labels, structure, gram)?;

    let cartan: Vec<Vec<S>> = (0..rank).map(|i| alg.basis_vector(i)).collect();
    let pairs = pos
        .iter()
        .enumerate()
        .map(|(k, &(i, j))| {
            let mut coeffs = vec![0i64; rank];
            for c in coeffs.iter_mut().take(j).skip(i) {
                *c = 1;
            }
            RootPair {
                label: format!("a{}{}", i + 1, j + 1),
                e_pos: alg.basis_vector(rank + k),
                e_neg: alg.basis_vector(rank + npos + k),
                simple_coeffs: coeffs,
            }
        })
        .collect();
    // the first `rank` positive roots have height one
    let simple = (0..rank).collect();
    let rd = RootDatum::new(&alg, cartan, pairs, simple)?;
    Ok((alg, rd))
}
