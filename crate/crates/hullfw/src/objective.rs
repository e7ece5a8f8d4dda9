//! First-order objective oracles, problem instances, and the seeded
//! generators for every benchmark family.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blmo::{BoundState, Region, RegionKind};
use crate::error::SolverError;
use crate::la::{matvec, sym_min_eig};
use crate::lp::{dot, LinearProgram, Row};
use crate::milp::{IndicatorRow, MilpModel};

/// Hölder error-bound metadata: `(theta, big_m)` with theta in [0, 1/2].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Sharpness {
    pub theta: f64,
    pub big_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// x'Mx - <r, x>
    Portfolio { m: Vec<Vec<f64>>, r: Vec<f64> },
    /// ||A b - y||^2 + ridge ||b||^2 over variables (b, z); z unused by f
    SparseReg { design: Vec<Vec<f64>>, labels: Vec<f64>, ridge: f64 },
    /// sum_i (exp(<a_i,b>) - y_i <a_i,b>) + ridge ||b||^2, y_i > 0
    Poisson { design: Vec<Vec<f64>>, labels: Vec<f64>, ridge: f64 },
    /// sum_i log(1 + exp(-y_i <a_i,b>)) + ridge ||b||^2, y_i in {-1, 1}
    Logistic { design: Vec<Vec<f64>>, labels: Vec<f64>, ridge: f64 },
    /// ||A x - y||^2 - lambda sum(z) + ridge ||x||^2 over variables (x, z, s)
    Tcmp { design: Vec<Vec<f64>>, labels: Vec<f64>, lambda: f64, ridge: f64 },
    /// x'Qx + <lin, x> + constant
    CustomQuadratic { q: Vec<Vec<f64>>, lin: Vec<f64>, constant: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Objective {
    #[serde(flatten)]
    pub kind: ObjectiveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strong_convexity_mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sharpness: Option<Sharpness>,
}

fn logistic_loss(t: f64) -> f64 {
    // log(1 + exp(-t)) without overflow
    if t >= 0.0 {
        (-t).exp().ln_1p()
    } else {
        -t + t.exp().ln_1p()
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

impl Objective {
    pub fn dimension(&self) -> usize {
        match &self.kind {
            ObjectiveKind::Portfolio { m, .. } => m.len(),
            ObjectiveKind::SparseReg { design, .. }
            | ObjectiveKind::Poisson { design, .. }
            | ObjectiveKind::Logistic { design, .. } => 2 * design[0].len(),
            ObjectiveKind::Tcmp { design, .. } => 3 * design[0].len(),
            ObjectiveKind::CustomQuadratic { lin, .. } => lin.len(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            ObjectiveKind::Portfolio { m, r } => {
                let mx = matvec(m, x);
                dot(x, &mx) - dot(r, x)
            }
            ObjectiveKind::SparseReg { design, labels, ridge } => {
                let p = design[0].len();
                let beta = &x[..p];
                let res: f64 = design
                    .iter()
                    .zip(labels)
                    .map(|(a, &y)| {
                        let e = dot(a, beta) - y;
                        e * e
                    })
                    .sum();
                res + ridge * dot(beta, beta)
            }
            ObjectiveKind::Poisson { design, labels, ridge } => {
                let p = design[0].len();
                let beta = &x[..p];
                let loss: f64 = design
                    .iter()
                    .zip(labels)
                    .map(|(a, &y)| {
                        let u = dot(a, beta);
                        u.exp() - y * u
                    })
                    .sum();
                loss + ridge * dot(beta, beta)
            }
            ObjectiveKind::Logistic { design, labels, ridge } => {
                let p = design[0].len();
                let beta = &x[..p];
                let loss: f64 =
                    design.iter().zip(labels).map(|(a, &y)| logistic_loss(y * dot(a, beta))).sum();
                loss + ridge * dot(beta, beta)
            }
            ObjectiveKind::Tcmp { design, labels, lambda, ridge } => {
                let n = design[0].len();
                let xs = &x[..n];
                let z = &x[n..2 * n];
                let res: f64 = design
                    .iter()
                    .zip(labels)
                    .map(|(a, &y)| {
                        let e = dot(a, xs) - y;
                        e * e
                    })
                    .sum();
                res - lambda * z.iter().sum::<f64>() + ridge * dot(xs, xs)
            }
            ObjectiveKind::CustomQuadratic { q, lin, constant } => {
                let qx = matvec(q, x);
                dot(x, &qx) + dot(lin, x) + constant
            }
        }
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            ObjectiveKind::Portfolio { m, r } => {
                let mx = matvec(m, x);
                mx.iter().zip(r).map(|(v, ri)| 2.0 * v - ri).collect()
            }
            ObjectiveKind::SparseReg { design, labels, ridge } => {
                let p = design[0].len();
                let beta = &x[..p];
                let mut g = vec![0.0; x.len()];
                for (a, &y) in design.iter().zip(labels) {
                    let e = dot(a, beta) - y;
                    for j in 0..p {
                        g[j] += 2.0 * e * a[j];
                    }
                }
                for j in 0..p {
                    g[j] += 2.0 * ridge * beta[j];
                }
                g
            }
            ObjectiveKind::Poisson { design, labels, ridge } => {
                let p = design[0].len();
                let beta = &x[..p];
                let mut g = vec![0.0; x.len()];
                for (a, &y) in design.iter().zip(labels) {
                    let w = dot(a, beta).exp() - y;
                    for j in 0..p {
                        g[j] += w * a[j];
                    }
                }
                for j in 0..p {
                    g[j] += 2.0 * ridge * beta[j];
                }
                g
            }
            ObjectiveKind::Logistic { design, labels, ridge } => {
                let p = design[0].len();
                let beta = &x[..p];
                let mut g = vec![0.0; x.len()];
                for (a, &y) in design.iter().zip(labels) {
                    let w = -y * sigmoid(-y * dot(a, beta));
                    for j in 0..p {
                        g[j] += w * a[j];
                    }
                }
                for j in 0..p {
                    g[j] += 2.0 * ridge * beta[j];
                }
                g
            }
            ObjectiveKind::Tcmp { design, labels, lambda, ridge } => {
                let n = design[0].len();
                let xs = &x[..n];
                let mut g = vec![0.0; x.len()];
                for (a, &y) in design.iter().zip(labels) {
                    let e = dot(a, xs) - y;
                    for j in 0..n {
                        g[j] += 2.0 * e * a[j];
                    }
                }
                for j in 0..n {
                    g[j] += 2.0 * ridge * xs[j];
                    g[n + j] = -lambda;
                }
                g
            }
            ObjectiveKind::CustomQuadratic { q, lin, .. } => {
                let qx = matvec(q, x);
                qx.iter().zip(lin).map(|(v, l)| 2.0 * v + l).collect()
            }
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        match &self.kind {
            ObjectiveKind::Poisson { labels, .. } => {
                if labels.iter().any(|&y| y <= 0.0) {
                    return Err(SolverError::Argument(
                        "Poisson labels must be positive counts".into(),
                    ));
                }
            }
            ObjectiveKind::Logistic { labels, .. } => {
                if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
                    return Err(SolverError::Argument("logistic labels must be +/-1".into()));
                }
            }
            _ => {}
        }
        if let Some(mu) = self.strong_convexity_mu {
            if mu < 0.0 {
                return Err(SolverError::Argument("negative strong convexity".into()));
            }
        }
        if let Some(s) = self.sharpness {
            if !(0.0..=0.5).contains(&s.theta) || s.big_m <= 0.0 {
                return Err(SolverError::Argument("invalid sharpness parameters".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub dimension: usize,
    pub objective: Objective,
    pub region: RegionKind,
    pub integer_indices: Vec<usize>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_optimum: Option<f64>,
}

impl ProblemInstance {
    pub fn region(&self) -> Region {
        Region {
            kind: self.region.clone(),
            integer_indices: self.integer_indices.clone(),
            dimension: self.dimension,
        }
    }

    pub fn bounds(&self) -> BoundState {
        BoundState::new(self.lower.clone(), self.upper.clone())
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        self.objective.validate()?;
        if self.objective.dimension() != self.dimension
            || self.lower.len() != self.dimension
            || self.upper.len() != self.dimension
        {
            return Err(SolverError::Argument("instance dimension mismatch".into()));
        }
        for (&l, &u) in self.lower.iter().zip(&self.upper) {
            if l > u {
                return Err(SolverError::Argument("crossed instance bounds".into()));
            }
        }
        for &j in &self.integer_indices {
            if j >= self.dimension {
                return Err(SolverError::Argument("integer index out of range".into()));
            }
            if (self.lower[j] - self.lower[j].round()).abs() > 1e-9
                || (self.upper[j] - self.upper[j].round()).abs() > 1e-9
            {
                return Err(SolverError::Argument("non-integral bound on integer variable".into()));
            }
        }
        if let RegionKind::GenericMilp { model } = &self.region {
            model.validate()?;
        }
        Ok(())
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller on uniform draws
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn normal_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows).map(|_| (0..cols).map(|_| normal(rng)).collect()).collect()
}

pub fn make_portfolio(
    n: usize,
    integer_fraction: f64,
    seed: u64,
) -> Result<ProblemInstance, SolverError> {
    if n < 2 {
        return Err(SolverError::Argument("portfolio needs n >= 2".into()));
    }
    if !(integer_fraction > 0.0 && integer_fraction <= 1.0) {
        return Err(SolverError::Argument("integer_fraction must lie in (0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = normal_matrix(&mut rng, n, n);
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for row in &a {
                s += row[i] * row[j];
            }
            m[i][j] = s / n as f64 + if i == j { 0.01 } else { 0.0 };
        }
    }
    let r: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..2.0)).collect();
    let u: Vec<f64> = (0..n).map(|_| rng.gen_range(1..4) as f64).collect();
    let b = 0.5 * dot(&c, &u);
    let mu = 2.0 * sym_min_eig(&m);
    let n_int = (integer_fraction * n as f64).ceil() as usize;
    Ok(ProblemInstance {
        dimension: n,
        objective: Objective {
            kind: ObjectiveKind::Portfolio { m, r },
            strong_convexity_mu: Some(mu),
            sharpness: None,
        },
        region: RegionKind::Budget { cost: c, budget: b },
        integer_indices: (0..n_int.min(n)).collect(),
        lower: vec![0.0; n],
        upper: u,
        known_optimum: None,
    })
}

/// Shared scaffolding for the three regression families: sparse support
/// coupling -R z_i <= b_i <= R z_i plus a cardinality row on z.
fn coupled_regression_instance(
    design: Vec<Vec<f64>>,
    kind_builder: impl FnOnce(Vec<Vec<f64>>) -> ObjectiveKind,
    big_r: f64,
    k: usize,
) -> ProblemInstance {
    let p = design[0].len();
    let dim = 2 * p;
    let mut rows = Vec::with_capacity(2 * p + 1);
    for i in 0..p {
        let mut hi = vec![0.0; dim];
        hi[i] = 1.0;
        hi[p + i] = -big_r;
        rows.push(Row::le(hi, 0.0));
        let mut lo = vec![0.0; dim];
        lo[i] = -1.0;
        lo[p + i] = -big_r;
        rows.push(Row::le(lo, 0.0));
    }
    let mut card = vec![0.0; dim];
    for v in card.iter_mut().skip(p) {
        *v = 1.0;
    }
    rows.push(Row::le(card, k as f64));
    let mut lower = vec![-big_r; p];
    lower.extend(vec![0.0; p]);
    let mut upper = vec![big_r; p];
    upper.extend(vec![1.0; p]);
    let model = MilpModel {
        base: LinearProgram {
            objective: vec![0.0; dim],
            rows,
            lower: lower.clone(),
            upper: upper.clone(),
        },
        integer_indices: (p..dim).collect(),
        indicator_rows: vec![],
    };
    ProblemInstance {
        dimension: dim,
        objective: Objective {
            kind: kind_builder(design),
            strong_convexity_mu: None,
            sharpness: None,
        },
        region: RegionKind::GenericMilp { model },
        integer_indices: (p..dim).collect(),
        lower,
        upper,
        known_optimum: None,
    }
}

fn coupling_radius(design: &[Vec<f64>], labels: &[f64], ridge: f64) -> f64 {
    let p = design[0].len();
    let mut ata = vec![vec![0.0; p]; p];
    for row in design {
        for i in 0..p {
            for j in 0..p {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    for (i, row) in ata.iter_mut().enumerate() {
        row[i] += ridge;
    }
    let mut aty_inf: f64 = 0.0;
    for j in 0..p {
        let s: f64 = design.iter().zip(labels).map(|(a, &y)| a[j] * y).sum();
        aty_inf = aty_inf.max(s.abs());
    }
    let lam = sym_min_eig(&ata).max(1e-12);
    (2.0 * aty_inf / lam).clamp(1.0, 100.0)
}

fn sparse_ground_truth(rng: &mut ChaCha8Rng, p: usize, k: usize, scale: f64) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..p).collect();
    for i in (1..p).rev() {
        let j = rng.gen_range(0..=i);
        idx.swap(i, j);
    }
    let mut beta = vec![0.0; p];
    for &i in idx.iter().take(k) {
        let mag = rng.gen_range(scale..2.0 * scale);
        beta[i] = if rng.gen_bool(0.5) { mag } else { -mag };
    }
    beta
}

const RIDGE: f64 = 1e-3;

pub fn make_sparse_regression(
    m_samples: usize,
    p_features: usize,
    k_sparsity: usize,
    seed: u64,
) -> Result<ProblemInstance, SolverError> {
    check_regression_args(m_samples, p_features, k_sparsity)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let design = normal_matrix(&mut rng, m_samples, p_features);
    let beta = sparse_ground_truth(&mut rng, p_features, k_sparsity, 1.0);
    let labels: Vec<f64> =
        design.iter().map(|a| dot(a, &beta) + 0.1 * normal(&mut rng)).collect();
    let big_r = coupling_radius(&design, &labels, RIDGE);
    Ok(coupled_regression_instance(
        design,
        |d| ObjectiveKind::SparseReg { design: d, labels, ridge: RIDGE },
        big_r,
        k_sparsity,
    ))
}

pub fn make_poisson_regression(
    m_samples: usize,
    p_features: usize,
    k_sparsity: usize,
    seed: u64,
) -> Result<ProblemInstance, SolverError> {
    check_regression_args(m_samples, p_features, k_sparsity)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let design = normal_matrix(&mut rng, m_samples, p_features);
    let beta = sparse_ground_truth(&mut rng, p_features, k_sparsity, 0.4);
    let labels: Vec<f64> =
        design.iter().map(|a| dot(a, &beta).exp().round().max(1.0)).collect();
    // keep exp(<a_i, beta>) in a sane range over the box
    let big_r = coupling_radius(&design, &labels, RIDGE).min(3.0);
    let inst = coupled_regression_instance(
        design,
        |d| ObjectiveKind::Poisson { design: d, labels, ridge: RIDGE },
        big_r,
        k_sparsity,
    );
    inst.objective.validate()?;
    Ok(inst)
}

pub fn make_logistic_regression(
    m_samples: usize,
    p_features: usize,
    k_sparsity: usize,
    seed: u64,
) -> Result<ProblemInstance, SolverError> {
    check_regression_args(m_samples, p_features, k_sparsity)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let design = normal_matrix(&mut rng, m_samples, p_features);
    let beta = sparse_ground_truth(&mut rng, p_features, k_sparsity, 1.0);
    let labels: Vec<f64> = design
        .iter()
        .map(|a| if dot(a, &beta) + 0.1 * normal(&mut rng) >= 0.0 { 1.0 } else { -1.0 })
        .collect();
    let big_r = coupling_radius(&design, &labels, RIDGE);
    Ok(coupled_regression_instance(
        design,
        |d| ObjectiveKind::Logistic { design: d, labels, ridge: RIDGE },
        big_r,
        k_sparsity,
    ))
}

fn check_regression_args(m: usize, p: usize, k: usize) -> Result<(), SolverError> {
    if m == 0 || p == 0 {
        return Err(SolverError::Argument("regression needs m, p >= 1".into()));
    }
    if k == 0 || k > p {
        return Err(SolverError::Argument("sparsity k must satisfy 1 <= k <= p".into()));
    }
    Ok(())
}

pub fn make_tcmp(
    n: usize,
    lambda: f64,
    mu_r: f64,
    tau: &[f64],
    seed: u64,
) -> Result<ProblemInstance, SolverError> {
    if n == 0 || tau.len() != n {
        return Err(SolverError::Argument("tau must have length n >= 1".into()));
    }
    if tau.iter().any(|&t| t < 0.0) {
        return Err(SolverError::Argument("tau must be nonnegative".into()));
    }
    if lambda < 0.0 || mu_r <= 0.0 {
        return Err(SolverError::Argument("need lambda >= 0 and mu_r > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let design = normal_matrix(&mut rng, n, n);
    let x_star: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let labels = matvec(&design, &x_star);
    let max_tau = tau.iter().cloned().fold(0.0f64, f64::max);
    let box_x = x_star.iter().map(|v| v.abs()).fold(1.0f64, f64::max) * 2.0;
    let s_hi = box_x + max_tau;
    // variable layout: x (0..n), z (n..2n), s (2n..3n)
    let dim = 3 * n;
    let mut rows = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut hi = vec![0.0; dim];
        hi[i] = 1.0;
        hi[2 * n + i] = -1.0;
        rows.push(Row::le(hi, tau[i]));
        let mut lo = vec![0.0; dim];
        lo[i] = -1.0;
        lo[2 * n + i] = -1.0;
        rows.push(Row::le(lo, tau[i]));
    }
    let indicator_rows = (0..n)
        .map(|i| {
            let mut coeffs = vec![0.0; dim];
            coeffs[2 * n + i] = 1.0;
            IndicatorRow { z: n + i, row: Row::le(coeffs, 0.0) }
        })
        .collect();
    let mut lower = vec![-box_x; n];
    lower.extend(vec![0.0; 2 * n]);
    let mut upper = vec![box_x; n];
    upper.extend(vec![1.0; n]);
    upper.extend(vec![s_hi; n]);
    let model = MilpModel {
        base: LinearProgram {
            objective: vec![0.0; dim],
            rows,
            lower: lower.clone(),
            upper: upper.clone(),
        },
        integer_indices: (n..2 * n).collect(),
        indicator_rows,
    };
    Ok(ProblemInstance {
        dimension: dim,
        objective: Objective {
            kind: ObjectiveKind::Tcmp { design, labels, lambda, ridge: mu_r },
            strong_convexity_mu: None,
            sharpness: None,
        },
        region: RegionKind::GenericMilp { model },
        integer_indices: (n..2 * n).collect(),
        lower,
        upper,
        known_optimum: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_grad_matches(obj: &Objective, x: &[f64]) {
        let g = obj.grad(x);
        let h = 1e-5;
        for j in 0..x.len() {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += h;
            xm[j] -= h;
            let fd = (obj.eval(&xp) - obj.eval(&xm)) / (2.0 * h);
            assert!(
                (g[j] - fd).abs() <= 1e-4 * (1.0 + g[j].abs()),
                "grad mismatch at {j}: {} vs {}",
                g[j],
                fd
            );
        }
    }

    fn convexity_samples(obj: &Objective, lo: f64, hi: f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = obj.dimension();
        for _ in 0..20 {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(lo..hi)).collect();
            let y: Vec<f64> = (0..d).map(|_| rng.gen_range(lo..hi)).collect();
            let lam: f64 = rng.gen_range(0.0..1.0);
            let mid: Vec<f64> =
                x.iter().zip(&y).map(|(a, b)| lam * a + (1.0 - lam) * b).collect();
            assert!(obj.eval(&mid) <= lam * obj.eval(&x) + (1.0 - lam) * obj.eval(&y) + 1e-9);
        }
    }

    #[test]
    fn portfolio_gradient_is_analytic() {
        let inst = make_portfolio(5, 0.6, 3).unwrap();
        let x = vec![0.3, 1.0, 0.0, 0.7, 0.2];
        fd_grad_matches(&inst.objective, &x);
        if let ObjectiveKind::Portfolio { m, r } = &inst.objective.kind {
            let g = inst.objective.grad(&x);
            let mx = matvec(m, &x);
            for j in 0..5 {
                assert!((g[j] - (2.0 * mx[j] - r[j])).abs() < 1e-12);
            }
        } else {
            panic!("wrong kind");
        }
        convexity_samples(&inst.objective, -1.0, 2.0);
    }

    #[test]
    fn portfolio_strong_convexity_holds_on_samples() {
        let inst = make_portfolio(4, 1.0, 11).unwrap();
        let mu = inst.objective.strong_convexity_mu.unwrap();
        assert!(mu > 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let g = inst.objective.grad(&x);
            let diff: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            let lhs = inst.objective.eval(&y);
            let rhs = inst.objective.eval(&x) + dot(&g, &diff) + 0.5 * mu * dot(&diff, &diff);
            assert!(lhs >= rhs - 1e-9, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn portfolio_full_fraction_makes_all_integer() {
        let inst = make_portfolio(6, 1.0, 1).unwrap();
        assert_eq!(inst.integer_indices.len(), 6);
        let half = make_portfolio(6, 0.5, 1).unwrap();
        assert_eq!(half.integer_indices.len(), 3);
    }

    #[test]
    fn portfolio_rejects_bad_args() {
        assert!(make_portfolio(1, 0.5, 0).is_err());
        assert!(make_portfolio(4, 0.0, 0).is_err());
        assert!(make_portfolio(4, 1.5, 0).is_err());
    }

    #[test]
    fn generators_are_deterministic() {
        let a = make_portfolio(5, 0.5, 42).unwrap();
        let b = make_portfolio(5, 0.5, 42).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let c = make_tcmp(3, 0.5, 1e-3, &[0.1, 0.2, 0.3], 9).unwrap();
        let d = make_tcmp(3, 0.5, 1e-3, &[0.1, 0.2, 0.3], 9).unwrap();
        assert_eq!(serde_json::to_string(&c).unwrap(), serde_json::to_string(&d).unwrap());
    }

    #[test]
    fn sparse_regression_gradient_and_convexity() {
        let inst = make_sparse_regression(8, 3, 2, 17).unwrap();
        inst.validate().unwrap();
        let x = vec![0.4, -0.2, 0.9, 1.0, 0.0, 1.0];
        fd_grad_matches(&inst.objective, &x);
        convexity_samples(&inst.objective, -1.0, 1.0);
    }

    #[test]
    fn logistic_at_zero_is_m_log_two() {
        let inst = make_logistic_regression(10, 3, 1, 2).unwrap();
        let v = inst.objective.eval(&vec![0.0; 6]);
        assert!((v - 10.0 * 2.0f64.ln()).abs() < 1e-12);
        fd_grad_matches(&inst.objective, &[0.2, -0.1, 0.05, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn poisson_labels_positive_and_gradient_matches() {
        let inst = make_poisson_regression(6, 2, 1, 4).unwrap();
        if let ObjectiveKind::Poisson { labels, .. } = &inst.objective.kind {
            assert!(labels.iter().all(|&y| y >= 1.0));
        } else {
            panic!("wrong kind");
        }
        fd_grad_matches(&inst.objective, &[0.3, -0.2, 1.0, 0.0]);
        convexity_samples(&inst.objective, -0.5, 0.5);
    }

    #[test]
    fn poisson_rejects_nonpositive_labels() {
        let obj = Objective {
            kind: ObjectiveKind::Poisson {
                design: vec![vec![1.0]],
                labels: vec![0.0],
                ridge: 1e-3,
            },
            strong_convexity_mu: None,
            sharpness: None,
        };
        assert!(obj.validate().is_err());
    }

    #[test]
    fn tcmp_gradient_and_structure() {
        let inst = make_tcmp(2, 0.7, 1e-3, &[0.5, 0.5], 21).unwrap();
        inst.validate().unwrap();
        assert_eq!(inst.dimension, 6);
        assert_eq!(inst.integer_indices, vec![2, 3]);
        fd_grad_matches(&inst.objective, &[0.1, -0.3, 1.0, 0.0, 0.2, 0.4]);
        let g = inst.objective.grad(&[0.0; 6]);
        assert!((g[2] + 0.7).abs() < 1e-12 && (g[3] + 0.7).abs() < 1e-12);
        assert_eq!(g[4], 0.0);
        assert_eq!(g[5], 0.0);
    }

    #[test]
    fn tcmp_rejects_negative_tau() {
        assert!(make_tcmp(2, 0.5, 1e-3, &[-0.1, 0.2], 0).is_err());
        assert!(make_tcmp(2, 0.5, 1e-3, &[0.1], 0).is_err());
    }

    #[test]
    fn instance_json_round_trip() {
        let inst = make_sparse_regression(5, 2, 1, 33).unwrap();
        let text = serde_json::to_string(&inst).unwrap();
        let back: ProblemInstance = serde_json::from_str(&text).unwrap();
        back.validate().unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        let x = vec![0.25, -0.5, 1.0, 1.0];
        assert!((back.objective.eval(&x) - inst.objective.eval(&x)).abs() < 1e-12);
    }

    #[test]
    fn objective_json_has_kind_and_params() {
        let inst = make_portfolio(2, 1.0, 5).unwrap();
        let v = serde_json::to_value(&inst).unwrap();
        assert_eq!(v["objective"]["kind"], "portfolio");
        assert!(v["objective"]["params"]["m"].is_array());
        assert!(v["region"]["kind"] == "budget");
    }
}
