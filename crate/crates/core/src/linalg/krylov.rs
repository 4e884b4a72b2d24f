use super::CsrMatrix;

/// Outcome of an iterative linear solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveInfo {
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// BiCGSTAB for `(α I + β A) x = b`, starting from the initial guess in `x`.
///
/// On a breakdown (vanishing or non-finite recurrence scalars) the iteration
/// restarts from the true residual. It gives up after `max_iter` iterations in
/// total or when a restart makes no progress.
pub fn bicgstab_shifted(
    a: &CsrMatrix,
    alpha: f64,
    beta: f64,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> SolveInfo {
    let n = b.len();
    let apply = |v: &[f64], out: &mut [f64]| {
        a.mul_vec_into(v, out);
        for (o, vi) in out.iter_mut().zip(v) {
            *o = alpha * vi + beta * *o;
        }
    };
    let bnorm = norm(b).max(f64::MIN_POSITIVE);
    let mut r = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut it = 0;
    let mut last_restart = f64::INFINITY;
    loop {
        apply(x, &mut r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        let rel = norm(&r) / bnorm;
        if rel <= tol {
            return SolveInfo { iterations: it, relative_residual: rel, converged: true };
        }
        if it >= max_iter || !rel.is_finite() || rel >= last_restart {
            return SolveInfo { iterations: it, relative_residual: rel, converged: false };
        }
        last_restart = rel;
        let r0 = r.clone();
        let r0_norm = norm(&r0);
        let (mut rho, mut alpha_k, mut omega) = (1.0, 1.0, 1.0);
        v.fill(0.0);
        p.fill(0.0);
        while it < max_iter {
            it += 1;
            let rho_new = dot(&r0, &r);
            if !rho_new.is_finite() || rho_new.abs() <= 1e-14 * r0_norm * norm(&r) {
                break;
            }
            let beta_k = (rho_new / rho) * (alpha_k / omega);
            rho = rho_new;
            for i in 0..n {
                p[i] = r[i] + beta_k * (p[i] - omega * v[i]);
            }
            apply(&p, &mut v);
            let r0v = dot(&r0, &v);
            if !r0v.is_finite() || r0v.abs() <= 1e-14 * r0_norm * norm(&v) {
                break;
            }
            alpha_k = rho / r0v;
            for i in 0..n {
                s[i] = r[i] - alpha_k * v[i];
            }
            let srel = norm(&s) / bnorm;
            if srel <= tol {
                for i in 0..n {
                    x[i] += alpha_k * p[i];
                }
                return SolveInfo { iterations: it, relative_residual: srel, converged: true };
            }
            apply(&s, &mut t);
            let tt = dot(&t, &t);
            omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
            if !omega.is_finite() || omega == 0.0 {
                for i in 0..n {
                    x[i] += alpha_k * p[i];
                }
                break;
            }
            for i in 0..n {
                x[i] += alpha_k * p[i] + omega * s[i];
                r[i] = s[i] - omega * t[i];
            }
            if norm(&r) / bnorm <= tol {
                break;
            }
        }
    }
}
