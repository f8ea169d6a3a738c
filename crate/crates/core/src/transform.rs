//! The Joukowski correspondence `lambda = z + 1/z`, solutions of the free
//! difference equation, and the Fourier transform they generate.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::jacobi::Complex;

/// A point of the closed unit disc, the image of a spectral parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscVariable(Complex);

impl DiscVariable {
    pub fn new(z: Complex) -> Result<Self> {
        if z.norm().is_nan() || z.norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!("|z| = {} exceeds 1", z.norm())));
        }
        Ok(Self(z))
    }

    pub fn value(self) -> Complex {
        self.0
    }

    pub fn norm(self) -> f64 {
        self.0.norm()
    }
}

/// The root of `z^2 - lambda z + 1 = 0` of smaller modulus.
///
/// On `[-2, 2]` both roots lie on the unit circle; there the root with
/// non-positive imaginary part is taken, which extends the `C_+ -> D ∩ C_-`
/// branch continuously from above.
pub fn lambda_to_z(lambda: Complex) -> DiscVariable {
    let s = (lambda * lambda - 4.0).sqrt();
    let (p, m) = ((lambda + s) * 0.5, (lambda - s) * 0.5);
    // the larger root is free of cancellation; the smaller is its reciprocal
    let big = if p.norm() >= m.norm() { p } else { m };
    let small = big.inv();
    let z = if big.norm() - 1.0 <= 8.0 * f64::EPSILON {
        if small.im <= 0.0 {
            small
        } else {
            big
        }
    } else {
        small
    };
    DiscVariable(z)
}

pub fn z_to_lambda(z: DiscVariable) -> Result<Complex> {
    if z.0.norm() == 0.0 {
        return Err(Error::ZeroArgument);
    }
    Ok(z.0 + z.0.inv())
}

/// Solutions of `psi_{n-1} + psi_{n+1} = lambda psi_n` for `n = 0..=n_max`.
#[derive(Debug, Clone)]
pub struct FreeSolutions {
    /// `P_0 = 0`, `P_1 = 1`.
    pub p: Vec<Complex>,
    /// `Q_0 = -1`, `Q_1 = 0`.
    pub q: Vec<Complex>,
    /// `S_n = -z^n`, the decaying combination `Q + m_0 P` with `m_0 = -z`.
    pub s: Vec<Complex>,
}

fn free_recursion(lambda: Complex, first: Complex, second: Complex, n_max: usize) -> Vec<Complex> {
    let mut v = Vec::with_capacity(n_max + 1);
    v.push(first);
    if n_max >= 1 {
        v.push(second);
    }
    for n in 1..n_max {
        let next = lambda * v[n] - v[n - 1];
        v.push(next);
    }
    v
}

pub fn free_solutions(lambda: Complex, n_max: usize) -> FreeSolutions {
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    FreeSolutions {
        p: free_recursion(lambda, zero, one, n_max),
        q: free_recursion(lambda, -one, zero, n_max),
        s: s_sequence(lambda, n_max),
    }
}

/// `S_0..S_{n_max}` with `S_n = -z(lambda)^n`.
pub fn s_sequence(lambda: Complex, n_max: usize) -> Vec<Complex> {
    let z = lambda_to_z(lambda).value();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut zn = Complex::new(1.0, 0.0);
    for _ in 0..=n_max {
        out.push(-zn);
        zn *= z;
    }
    out
}

/// Density of the free spectral measure, `sqrt(4 - x^2) / (2 pi)` on `(-2, 2)`.
pub fn free_measure_density(x: f64) -> f64 {
    if x > -2.0 && x < 2.0 {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    } else {
        0.0
    }
}

/// `V(lambda) = sum_n S_n(lambda) v_n` over the stored entries.
pub fn fourier_forward(v: &[Complex], lambda: Complex) -> Complex {
    if v.is_empty() {
        return Complex::new(0.0, 0.0);
    }
    s_sequence(lambda, v.len() - 1)
        .iter()
        .zip(v)
        .map(|(s, x)| s * x)
        .sum()
}

/// Gauss-Chebyshev rule of the second kind mapped to `(-2, 2)` and
/// normalised to the free spectral measure: `sum w_i g(x_i) ≈ ∫ g dρ`.
pub fn free_measure_rule(points: usize) -> Vec<(f64, f64)> {
    let h = PI / (points as f64 + 1.0);
    (1..=points)
        .map(|i| {
            let theta = i as f64 * h;
            let s = theta.sin();
            (2.0 * theta.cos(), 2.0 / PI * h * s * s)
        })
        .collect()
}

/// `∫_{-2}^{2} g(x) dρ(x)` against the free spectral measure.
pub fn integrate_free_measure<F>(g: F, points: usize) -> Complex
where
    F: Fn(f64) -> Complex,
{
    free_measure_rule(points)
        .into_iter()
        .map(|(x, w)| g(x) * w)
        .sum()
}

/// `v_n = ∫ V(x) S_n(x) dρ(x)`, evaluated with `quad_points` nodes and
/// checked against `2 quad_points + 1` nodes.
///
/// Experimental: the free biorthogonality behind this inverse is not
/// verified here, so callers should treat the result as a measurement.
pub fn fourier_inverse<F>(v_hat: F, n: usize, quad_points: usize, tol: f64) -> Result<Complex>
where
    F: Fn(f64) -> Complex,
{
    if quad_points == 0 {
        return Err(Error::InvalidArgument("quad_points must be positive".into()));
    }
    let integrand = |x: f64| v_hat(x) * s_sequence(Complex::new(x, 0.0), n)[n];
    let coarse = integrate_free_measure(integrand, quad_points);
    // 2k+1 nodes nest the k-node rule
    let fine = integrate_free_measure(integrand, 2 * quad_points + 1);
    let change = (fine - coarse).norm();
    if change > tol * (1.0 + fine.norm()) {
        return Err(Error::QuadratureNotConverged { change, tol });
    }
    Ok(fine)
}

/// `lambda` with `|z(lambda)| < 1/R`, `R = 3B + 1`: where the response
/// series converges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionD {
    bound_b: f64,
    r_big: f64,
}

impl RegionD {
    pub fn new(bound_b: f64) -> Result<Self> {
        if !(bound_b.is_finite() && bound_b > 0.0) {
            return Err(Error::InvalidArgument(format!("bound B = {bound_b} must be positive")));
        }
        Ok(Self {
            bound_b,
            r_big: 3.0 * bound_b + 1.0,
        })
    }

    pub fn from_r(r_big: f64) -> Result<Self> {
        Self::new((r_big - 1.0) / 3.0)
    }

    pub fn bound_b(&self) -> f64 {
        self.bound_b
    }

    pub fn r_big(&self) -> f64 {
        self.r_big
    }

    /// `|z(lambda)| * R`; the region is where this is below one.
    pub fn contraction(&self, lambda: Complex) -> f64 {
        lambda_to_z(lambda).norm() * self.r_big
    }

    /// Boundary point for `phi` in `(pi, 2 pi)`:
    /// `(R + 1/R) cos phi + i (1/R - R) sin phi`.
    pub fn boundary_point(&self, phi: f64) -> Complex {
        let r = self.r_big;
        Complex::new((r + 1.0 / r) * phi.cos(), (1.0 / r - r) * phi.sin())
    }

    /// Same region described as the exterior of the ellipse with semi-axes
    /// `R + 1/R` and `R - 1/R`.
    pub fn outside_ellipse(&self, lambda: Complex) -> bool {
        let r = self.r_big;
        let (ax, ay) = (r + 1.0 / r, r - 1.0 / r);
        (lambda.re / ax).powi(2) + (lambda.im / ay).powi(2) > 1.0
    }
}

pub fn in_region_d(lambda: Complex, region: &RegionD) -> bool {
    region.contraction(lambda) < 1.0
}
