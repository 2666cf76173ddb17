//! Blocked inner products between selected rows and all rows of a row-major
//! `M x n` buffer, via gemm.

use nalgebra::DMatrix;

/// Calls `visit(probe, column)` for every probe, where `column[j]` is the
/// inner product of row `probe` with row `j`. Probes are visited in order.
pub(crate) fn for_each_gram_column<F>(data: &[f64], n: usize, probes: &[usize], mut visit: F)
where
    F: FnMut(usize, &[f64]),
{
    let m = data.len() / n;
    // M x n with points as rows; `rows * selected` goes through the blocked gemm kernel
    let rows = DMatrix::from_row_slice(m, n, data);
    // keep each block's output around 16M reals
    let block = (16_000_000 / m.max(1)).clamp(1, 256);
    for chunk in probes.chunks(block) {
        let mut selected = DMatrix::zeros(n, chunk.len());
        for (c, &p) in chunk.iter().enumerate() {
            selected.column_mut(c).copy_from_slice(&data[p * n..(p + 1) * n]);
        }
        let g = &rows * &selected;
        for (c, &p) in chunk.iter().enumerate() {
            visit(p, g.column(c).as_slice());
        }
    }
}

/// Row-major copy with `center` subtracted from every row.
pub(crate) fn centered(data: &[f64], n: usize, center: &[f64]) -> Vec<f64> {
    let mut out = data.to_vec();
    for row in out.chunks_exact_mut(n) {
        row.iter_mut().zip(center).for_each(|(a, c)| *a -= c);
    }
    out
}

pub(crate) fn column_mean(data: &[f64], n: usize) -> Vec<f64> {
    let m = data.len() / n;
    let mut mean = vec![0.0; n];
    for row in data.chunks_exact(n) {
        mean.iter_mut().zip(row).for_each(|(a, x)| *a += x);
    }
    mean.iter_mut().for_each(|a| *a /= m as f64);
    mean
}
