//! Dense simplex for small matrix games, plus a min-norm selection over the
//! optimal face.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 10_000;

/// Solves `min_{P in simplex} max_k sum_i P_i c[k][i]`.
///
/// After shifting `c` to be strictly positive the game becomes
/// `max 1'y s.t. C y <= 1, y >= 0`, solved by a tableau simplex with Bland's
/// rule; then `v = 1 / 1'y` and `P = v y`.
pub fn solve_min_max(c: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let k = c.len();
    let n = c.first().map(Vec::len).unwrap_or(0);
    if k == 0 || n == 0 || c.iter().any(|row| row.len() != n) {
        return Err(Error::domain(
            "payoff matrix must be non-empty and rectangular",
        ));
    }
    let lo = c.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let shift = 1.0 - lo;

    // columns: y_0..y_{n-1}, s_0..s_{k-1}, rhs
    let width = n + k + 1;
    let mut tab = vec![vec![0.0; width]; k + 1];
    for (r, row) in c.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            tab[r][j] = x + shift;
        }
        tab[r][n + r] = 1.0;
        tab[r][width - 1] = 1.0;
    }
    // objective row holds reduced costs c_j - z_j
    for j in 0..n {
        tab[k][j] = 1.0;
    }
    let mut basis: Vec<usize> = (n..n + k).collect();

    for _ in 0..MAX_PIVOTS {
        let Some(enter) = (0..n + k).find(|&j| tab[k][j] > PIVOT_EPS) else {
            let mut y = vec![0.0; n];
            for (r, &b) in basis.iter().enumerate() {
                if b < n {
                    y[b] = tab[r][width - 1];
                }
            }
            let total: f64 = y.iter().sum();
            if !(total > 0.0) {
                return Err(Error::Numerical("degenerate simplex solution".into()));
            }
            let v = 1.0 / total;
            let p: Vec<f64> = y.iter().map(|&x| (x * v).max(0.0)).collect();
            let s: f64 = p.iter().sum();
            let p: Vec<f64> = p.iter().map(|x| x / s).collect();
            return Ok((v - shift, p));
        };
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..k {
            let a = tab[r][enter];
            if a > PIVOT_EPS {
                let ratio = tab[r][width - 1] / a;
                leave = match leave {
                    Some((lr, lratio))
                        if ratio > lratio + 1e-15
                            || (ratio >= lratio - 1e-15 && basis[r] > basis[lr]) =>
                    {
                        Some((lr, lratio))
                    }
                    _ => Some((r, ratio)),
                };
            }
        }
        let Some((lr, _)) = leave else {
            return Err(Error::Numerical("unbounded game LP".into()));
        };
        let piv = tab[lr][enter];
        tab[lr].iter_mut().for_each(|x| *x /= piv);
        let pivot_row = tab[lr].clone();
        for (r, row) in tab.iter_mut().enumerate() {
            if r != lr {
                let f = row[enter];
                if f != 0.0 {
                    row.iter_mut()
                        .zip(&pivot_row)
                        .for_each(|(x, p)| *x -= f * p);
                }
            }
        }
        basis[lr] = enter;
    }
    Err(Error::Numerical("simplex pivot limit reached".into()))
}

/// Among all `P` in the simplex with `max_k c_k . P <= value + tol`, returns
/// the one of least Euclidean norm.
///
/// The minimizer is the least-norm point of the affine hull of some set of at
/// most `N - 1` active inequalities, so all such sets are enumerated and the
/// feasible candidate of least norm is kept.
pub fn min_norm_optimum(c: &[Vec<f64>], value: f64, fallback: &[f64], tol: f64) -> Vec<f64> {
    let n = fallback.len();
    let mut rows: Vec<(Vec<f64>, f64)> = c.iter().map(|row| (row.clone(), value)).collect();
    for i in 0..n {
        let mut a = vec![0.0; n];
        a[i] = -1.0;
        rows.push((a, 0.0));
    }
    let feasible = |p: &[f64]| {
        let sum: f64 = p.iter().sum();
        (sum - 1.0).abs() <= tol
            && rows
                .iter()
                .all(|(a, b)| a.iter().zip(p).map(|(x, y)| x * y).sum::<f64>() <= b + tol)
    };
    let norm = |p: &[f64]| p.iter().map(|x| x * x).sum::<f64>();

    let mut best = fallback.to_vec();
    let mut best_norm = norm(&best);
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    let m = rows.len();
    let max_active = n.saturating_sub(1);
    // depth-first enumeration of index subsets in lexicographic order
    fn visit(
        start: usize,
        m: usize,
        max_active: usize,
        chosen: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        f(chosen);
        if chosen.len() == max_active {
            return;
        }
        for j in start..m {
            chosen.push(j);
            visit(j + 1, m, max_active, chosen, f);
            chosen.pop();
        }
    }
    visit(0, m, max_active, &mut chosen, &mut |set| {
        let mut a: Vec<&[f64]> = set.iter().map(|&j| rows[j].0.as_slice()).collect();
        let mut b: Vec<f64> = set.iter().map(|&j| rows[j].1).collect();
        let ones = vec![1.0; n];
        a.push(&ones);
        b.push(1.0);
        if let Some(p) = least_norm_solution(&a, &b) {
            let pn = norm(&p);
            if pn < best_norm - 1e-15 && feasible(&p) {
                best = p;
                best_norm = pn;
            }
        }
    });
    best.iter_mut().for_each(|x| *x = x.max(0.0));
    let s: f64 = best.iter().sum();
    best.iter_mut().for_each(|x| *x /= s);
    best
}

/// `x = A' (A A')^{-1} b`, or `None` when the rows of `A` are dependent.
fn least_norm_solution(a: &[&[f64]], b: &[f64]) -> Option<Vec<f64>> {
    let m = a.len();
    let n = a[0].len();
    let mut g = vec![vec![0.0; m + 1]; m];
    for i in 0..m {
        for j in 0..m {
            g[i][j] = a[i].iter().zip(a[j]).map(|(x, y)| x * y).sum();
        }
        g[i][m] = b[i];
    }
    let lambda = gauss_solve(g)?;
    let mut x = vec![0.0; n];
    for (row, l) in a.iter().zip(&lambda) {
        x.iter_mut()
            .zip(row.iter())
            .for_each(|(xi, ai)| *xi += l * ai);
    }
    Some(x)
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn gauss_solve(mut g: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let m = g.len();
    for col in 0..m {
        let piv = (col..m).max_by(|&x, &y| g[x][col].abs().total_cmp(&g[y][col].abs()))?;
        if g[piv][col].abs() < 1e-10 {
            return None;
        }
        g.swap(col, piv);
        for r in col + 1..m {
            let f = g[r][col] / g[col][col];
            if f != 0.0 {
                for c in col..=m {
                    g[r][c] -= f * g[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; m];
    for r in (0..m).rev() {
        let s: f64 = (r + 1..m).map(|c| g[r][c] * x[c]).sum();
        x[r] = (g[r][m] - s) / g[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_pennies() {
        let (v, p) = solve_min_max(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        assert!((p[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dominated_row_and_negative_entries() {
        let c = vec![
            vec![-1.0, 2.0, 0.5],
            vec![3.0, -3.0, 0.5],
            vec![-5.0, -5.0, -5.0],
        ];
        let (v, p) = solve_min_max(&c).unwrap();
        let worst = c
            .iter()
            .map(|r| r.iter().zip(&p).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::MIN, f64::max);
        assert!((worst - v).abs() < 1e-12);
        // mixing the first two columns 5:4 equalizes at 1/3
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn min_norm_picks_spread_optimum() {
        // any P is optimal for a constant game; the least-norm one is uniform
        let c = vec![vec![1.0, 1.0, 1.0]];
        let (v, p) = solve_min_max(&c).unwrap();
        let q = min_norm_optimum(&c, v, &p, 1e-9);
        for x in q {
            assert!((x - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_systems_are_skipped() {
        assert!(least_norm_solution(&[&[1.0, 1.0], &[2.0, 2.0]], &[1.0, 2.0]).is_none());
    }
}
