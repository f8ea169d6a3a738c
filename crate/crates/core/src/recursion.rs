//! Solutions of the three-term equation
//! `a_{n-1} psi_{n-1} + b_n psi_n + a_n psi_{n+1} = lambda psi_n`
//! and the resolvent-side Weyl function built from them.

use crate::error::{Error, Result};
use crate::jacobi::{Complex, JacobiCoefficients};

/// A solution `psi_0..psi_{n_max}` at a fixed spectral parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionSolution {
    pub values: Vec<Complex>,
    pub lambda: Complex,
}

impl RecursionSolution {
    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// Largest residual of the three-term equation over the interior
    /// indices `1..n_max`, relative to the largest term it involves.
    pub fn residual(&self, coeffs: &JacobiCoefficients) -> Result<f64> {
        let v = &self.values;
        let mut worst = 0.0f64;
        for n in 1..self.n_max() {
            let terms = [
                coeffs.a(n - 1)? * v[n - 1],
                coeffs.b(n)? * v[n],
                coeffs.a(n)? * v[n + 1],
                self.lambda * v[n],
            ];
            let scale = terms.iter().map(|t| t.norm()).fold(f64::MIN_POSITIVE, f64::max);
            let res = terms[0] + terms[1] + terms[2] - terms[3];
            worst = worst.max(res.norm() / scale);
        }
        Ok(worst)
    }
}

fn forward(
    coeffs: &JacobiCoefficients,
    lambda: Complex,
    n_max: usize,
    psi0: Complex,
    psi1: Complex,
) -> Result<RecursionSolution> {
    let mut v = vec![psi0];
    if n_max >= 1 {
        v.push(psi1);
    }
    for n in 1..n_max {
        let next = ((lambda - coeffs.b(n)?) * v[n] - coeffs.a(n - 1)? * v[n - 1]) / coeffs.a(n)?;
        v.push(next);
    }
    Ok(RecursionSolution { values: v, lambda })
}

/// `(p, q)` with `p_0 = 0, p_1 = 1` and `q_0 = 1, q_1 = 0`, for `n = 0..=n_max`.
pub fn solve_pq(
    coeffs: &JacobiCoefficients,
    lambda: Complex,
    n_max: usize,
) -> Result<(RecursionSolution, RecursionSolution)> {
    let (zero, one) = (Complex::new(0.0, 0.0), Complex::new(1.0, 0.0));
    let p = forward(coeffs, lambda, n_max, zero, one)?;
    let q = forward(coeffs, lambda, n_max, one, zero)?;
    Ok((p, q))
}

/// Backward recursion from `psi_{N+1} = 0`, `psi_N = 1` down to `psi_0`,
/// closing at `n = 1` with the boundary parameter `a0`. With `rescale` the
/// partial solution is renormalised whenever it grows past `1e100`, which
/// only preserves the solution up to a constant factor.
fn backward(
    coeffs: &JacobiCoefficients,
    lambda: Complex,
    n: usize,
    a0: Complex,
    rescale: bool,
) -> Result<Vec<Complex>> {
    let mut v = vec![Complex::new(0.0, 0.0); n + 2];
    v[n] = Complex::new(1.0, 0.0);
    for k in (1..=n).rev() {
        let left = if k == 1 { a0 } else { coeffs.a(k - 1)? };
        let right = if k == n { Complex::new(0.0, 0.0) } else { coeffs.a(k)? * v[k + 1] };
        v[k - 1] = ((lambda - coeffs.b(k)?) * v[k] - right) / left;
        if rescale && v[k - 1].norm() > 1e100 {
            let s = 1.0 / v[k - 1].norm();
            v[k - 1..].iter_mut().for_each(|x| *x *= s);
        }
    }
    Ok(v)
}

/// `phi^+` for the `N x N` block: `phi_{N+1} = 0`, `phi_N = 1`, with `phi_0`
/// from `a_0 phi_0 + b_1 phi_1 + a_1 phi_2 = lambda phi_1` using the stored `a0`.
pub fn phi_plus_finite(
    coeffs: &JacobiCoefficients,
    lambda: Complex,
    n: usize,
) -> Result<RecursionSolution> {
    if n == 0 {
        return Err(Error::InvalidArgument("block size must be at least 1".into()));
    }
    Ok(RecursionSolution {
        values: backward(coeffs, lambda, n, coeffs.a0(), false)?,
        lambda,
    })
}

fn normalised_phi(
    coeffs: &JacobiCoefficients,
    lambda: Complex,
    n: usize,
    a0: Complex,
) -> Option<Vec<Complex>> {
    let v = backward(coeffs, lambda, n, a0, true).ok()?;
    let head = v[1];
    if head.norm() == 0.0 || !head.re.is_finite() || !head.im.is_finite() {
        return None;
    }
    let out: Vec<Complex> = v.iter().map(|x| x / head).collect();
    out.iter().all(|x| x.re.is_finite() && x.im.is_finite()).then_some(out)
}

fn phi_plus_semiinfinite_with(
    coeffs: &JacobiCoefficients,
    lambda: Complex,
    n_trunc: usize,
    tol: f64,
    a0: Complex,
) -> Result<RecursionSolution> {
    if n_trunc == 0 {
        return Err(Error::InvalidArgument("truncation must be at least 1".into()));
    }
    // make sure both truncations are reachable before judging decay
    coeffs.a(2 * n_trunc)?;
    coeffs.b(2 * n_trunc)?;
    let short = normalised_phi(coeffs, lambda, n_trunc, a0);
    let long = normalised_phi(coeffs, lambda, 2 * n_trunc, a0);
    let (Some(short), Some(long)) = (short, long) else {
        return Err(Error::NoDecayDetected {
            disagreement: f64::INFINITY,
            tol,
        });
    };
    let disagreement = (0..=n_trunc.min(10))
        .map(|k| (short[k] - long[k]).norm() / (1.0 + long[k].norm()))
        .fold(0.0, f64::max);
    if disagreement > tol {
        return Err(Error::NoDecayDetected { disagreement, tol });
    }
    Ok(RecursionSolution {
        values: short,
        lambda,
    })
}

/// Numerical stand-in for the `l^2` solution of the semi-infinite problem:
/// the `n_trunc` and `2 n_trunc` right-end solutions, normalised to
/// `phi_1 = 1`, must agree on their leading entries within `tol`.
pub fn phi_plus_semiinfinite(
    coeffs: &JacobiCoefficients,
    lambda: Complex,
    n_trunc: usize,
    tol: f64,
) -> Result<RecursionSolution> {
    phi_plus_semiinfinite_with(coeffs, lambda, n_trunc, tol, coeffs.a0())
}

/// `W(u, v)[n] = a_n (u_n v_{n+1} - u_{n+1} v_n)`, with `a_0` the boundary parameter.
pub fn wronskian(
    coeffs: &JacobiCoefficients,
    u: &RecursionSolution,
    v: &RecursionSolution,
    n: usize,
) -> Result<Complex> {
    if u.lambda != v.lambda {
        return Err(Error::MismatchedLambda);
    }
    let max = u.n_max().min(v.n_max());
    if n + 1 > max {
        return Err(Error::IndexOutOfRange {
            index: n + 1,
            max,
        });
    }
    let (u, v) = (&u.values, &v.values);
    Ok(coeffs.a(n)? * (u[n] * v[n + 1] - u[n + 1] * v[n]))
}

/// `G_{m,n}(lambda) = p_min(m,n) phi^+_max(m,n) / W(p, phi^+)` for the
/// `n_total x n_total` block.
pub fn green_function(
    coeffs: &JacobiCoefficients,
    m: usize,
    n: usize,
    lambda: Complex,
    n_total: usize,
) -> Result<Complex> {
    if m == 0 || n == 0 || m > n_total || n > n_total {
        return Err(Error::IndexOutOfRange {
            index: m.max(n),
            max: n_total,
        });
    }
    let phi = phi_plus_finite(coeffs, lambda, n_total)?;
    let (p, _) = solve_pq(coeffs, lambda, n_total)?;
    let w = wronskian(coeffs, &p, &phi, 0)?;
    let scale = p.values[1].norm() * phi.values[0].norm() + coeffs.a0().norm() * phi.values[1].norm();
    if w.norm() <= 1e-14 * scale.max(1.0) {
        return Err(Error::SingularWronskian);
    }
    Ok(p.values[m.min(n)] * phi.values[m.max(n)] / w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResolventMode {
    Finite(usize),
    SemiInfinite { n_trunc: usize, tol: f64 },
}

fn unit() -> Complex {
    Complex::new(1.0, 0.0)
}

/// `m(lambda) = -phi^+_1 / phi^+_0`, closing the recursion with `a_0 = 1`.
pub fn weyl_resolvent(
    coeffs: &JacobiCoefficients,
    lambda: Complex,
    mode: ResolventMode,
) -> Result<Complex> {
    let phi = match mode {
        ResolventMode::Finite(n) => {
            if n == 0 {
                return Err(Error::InvalidArgument("block size must be at least 1".into()));
            }
            backward(coeffs, lambda, n, unit(), false)?
        }
        ResolventMode::SemiInfinite { n_trunc, tol } => {
            phi_plus_semiinfinite_with(coeffs, lambda, n_trunc, tol, unit())?.values
        }
    };
    if phi[0].norm() < 1e-12 * phi[1].norm().max(1.0) {
        return Err(Error::PoleAtLambda);
    }
    Ok(-phi[1] / phi[0])
}
