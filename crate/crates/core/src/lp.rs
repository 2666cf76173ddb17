//! Dense phase-one simplex for `A x = b, x >= 0` with Bland's rule.
//!
//! Desk-scale only (tens of rows, hundreds of columns). When the system is
//! infeasible the optimal phase-one duals form a Farkas certificate `y` with
//! `y^T A <= 0` column-wise and `y^T b > 0`.

const PIVOT_EPS: f64 = 1e-11;

#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    /// A non-negative solution of `A x = b`.
    Feasible { x: Vec<f64> },
    /// Farkas certificate: `y . a_j <= 0` for every column `j`, `y . b > 0`.
    Infeasible { y: Vec<f64> },
}

/// Solves `A x = b, x >= 0` where `a` holds `rows` row-major rows of length `cols`.
pub fn phase_one(a: &[f64], b: &[f64], cols: usize) -> Feasibility {
    let rows = b.len();
    assert_eq!(a.len(), rows * cols, "matrix shape does not match rhs");

    // tableau columns: original | artificials | rhs
    let width = cols + rows + 1;
    let mut t = vec![0.0; rows * width];
    let mut flipped = vec![false; rows];
    for i in 0..rows {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        flipped[i] = sign < 0.0;
        let row = &mut t[i * width..(i + 1) * width];
        for j in 0..cols {
            row[j] = sign * a[i * cols + j];
        }
        row[cols + i] = 1.0;
        row[width - 1] = sign * b[i];
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    // reduced costs of the phase-one objective (sum of artificials)
    let mut cost = vec![0.0; width];
    for i in 0..rows {
        for j in 0..cols {
            cost[j] -= t[i * width + j];
        }
        cost[width - 1] -= t[i * width + width - 1];
    }

    let scale = 1.0 + b.iter().map(|v| v.abs()).sum::<f64>();
    loop {
        // Bland: lowest-index improving column
        let Some(enter) = (0..cols + rows).find(|&j| cost[j] < -PIVOT_EPS * scale) else {
            break;
        };
        // ratio test, ties broken by lowest basic variable index
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            let coef = t[i * width + enter];
            if coef > PIVOT_EPS {
                let ratio = t[i * width + width - 1] / coef;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-14 * scale || (ratio <= lr + 1e-14 * scale && basis[i] < basis[li]) {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        let Some((pivot_row, _)) = leave else {
            // phase one is bounded below by zero, so this only happens through
            // round-off; treat the column as non-improving
            cost[enter] = 0.0;
            continue;
        };
        pivot(&mut t, &mut cost, width, pivot_row, enter);
        basis[pivot_row] = enter;
    }

    let objective = -cost[width - 1];
    if objective <= 1e-9 * scale {
        let mut x = vec![0.0; cols];
        for (i, &var) in basis.iter().enumerate() {
            if var < cols {
                x[var] = t[i * width + width - 1].max(0.0);
            }
        }
        Feasibility::Feasible { x }
    } else {
        // reduced cost of artificial k is 1 - y_k
        let y = (0..rows)
            .map(|k| {
                let yk = 1.0 - cost[cols + k];
                if flipped[k] {
                    -yk
                } else {
                    yk
                }
            })
            .collect();
        Feasibility::Infeasible { y }
    }
}

fn pivot(t: &mut [f64], cost: &mut [f64], width: usize, row: usize, col: usize) {
    let rows = t.len() / width;
    let p = t[row * width + col];
    for v in &mut t[row * width..(row + 1) * width] {
        *v /= p;
    }
    let pivot_row: Vec<f64> = t[row * width..(row + 1) * width].to_vec();
    for i in 0..rows {
        if i == row {
            continue;
        }
        let f = t[i * width + col];
        if f != 0.0 {
            for (v, pv) in t[i * width..(i + 1) * width].iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            t[i * width + col] = 0.0;
        }
    }
    let f = cost[col];
    if f != 0.0 {
        for (v, pv) in cost.iter_mut().zip(&pivot_row) {
            *v -= f * pv;
        }
        cost[col] = 0.0;
    }
}
