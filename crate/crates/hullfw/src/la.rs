//! Small dense linear-algebra helpers shared across modules.

pub fn matvec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| crate::lp::dot(row, x)).collect()
}

pub fn norm2(x: &[f64]) -> f64 {
    crate::lp::dot(x, x).sqrt()
}

/// Solve `A y = b` by Gaussian elimination with partial pivoting.
/// Returns None when A is numerically singular.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for k in 0..n {
        let (piv, pval) = (k..n)
            .map(|i| (i, m[i][k].abs()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())?;
        if pval < 1e-12 {
            return None;
        }
        m.swap(k, piv);
        let inv = 1.0 / m[k][k];
        for j in k..=n {
            m[k][j] *= inv;
        }
        for i in 0..n {
            if i != k && m[i][k] != 0.0 {
                let f = m[i][k];
                for j in k..=n {
                    m[i][j] -= f * m[k][j];
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n]).collect())
}

/// Smallest eigenvalue of a symmetric positive definite matrix by inverse
/// power iteration with a Rayleigh-quotient readout.
pub fn sym_min_eig(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 0.0;
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..300 {
        let Some(y) = gauss_solve(m, &x) else { return 0.0 };
        let ny = norm2(&y);
        if ny < 1e-300 {
            return 0.0;
        }
        x = y.iter().map(|v| v / ny).collect();
    }
    let mx = matvec(m, &x);
    crate::lp::dot(&x, &mx) / crate::lp::dot(&x, &x)
}
