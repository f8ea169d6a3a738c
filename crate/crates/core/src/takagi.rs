//! Autonne-Takagi factorization `U A U^T = diag(d)` of a finite complex
//! Jacobi block and the discrete measure built from it.
//!
//! Rows `û^i` of `U` are coneigenvectors, `A û^i = d_i conj(û^i)`. After
//! normalising `u^i = û^i / û^i_1` the measure has atoms `ω_i` with weights
//! `1/ρ_i`, and its Chebyshev moments reproduce the interval response.

use nalgebra::DMatrix;

use crate::dynamics::ControlSequence;
use crate::error::{Error, Result};
use crate::jacobi::{Complex, FiniteJacobiMatrix};
use crate::tridiag::symmetric_tridiagonal_eigen;

const SPECTRAL_GAP_TOL: f64 = 1e-10;
const FIRST_COMPONENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct TakagiFactorization {
    /// Unitary `U`; row `i` is `û^i`.
    pub u_matrix: DMatrix<Complex>,
    /// Nonnegative coneigenvalues `d_i` (real, stored as complex).
    pub d: Vec<Complex>,
    /// `max |U U^* - I|`.
    pub residual_unitary: f64,
    /// `max |U A U^T - diag(d)|`.
    pub residual_diag: f64,
    /// `max_i ||A û^i - d_i conj(û^i)||`.
    pub residual_coneigen: f64,
}

fn residuals(a: &DMatrix<Complex>, u: &DMatrix<Complex>, d: &[Complex]) -> (f64, f64, f64) {
    let n = a.nrows();
    let max_abs = |m: &DMatrix<Complex>| m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let unitary = max_abs(&(u * u.adjoint() - DMatrix::<Complex>::identity(n, n)));
    let diag = max_abs(&(u * a * u.transpose() - DMatrix::from_diagonal(&d.to_vec().into())));
    let coneigen = (0..n)
        .map(|i| {
            let row = u.row(i).transpose();
            (a * &row - row.map(|x| x.conj()) * d[i]).norm()
        })
        .fold(0.0, f64::max);
    (unitary, diag, coneigen)
}

fn check_separation(values: &[f64], what: &str) -> Result<()> {
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if let Some(v) = values.iter().find(|v| v.abs() <= SPECTRAL_GAP_TOL * scale) {
        return Err(Error::DegenerateSpectrum(format!("zero {what} {v:.3e}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    if let Some(w) = sorted.windows(2).find(|w| w[1] - w[0] <= SPECTRAL_GAP_TOL * scale) {
        return Err(Error::DegenerateSpectrum(format!(
            "repeated {what} {:.12} ≈ {:.12}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Real input: eigenvectors `x_k` of the real symmetric block give Takagi
/// vectors `x_k` (eigenvalue >= 0) or `i x_k` (eigenvalue < 0), `d_k = |eigenvalue|`.
fn factorize_real(m: &FiniteJacobiMatrix) -> Result<(DMatrix<Complex>, Vec<Complex>)> {
    let diag: Vec<f64> = m.diagonal().iter().map(|z| z.re).collect();
    let off: Vec<f64> = m.off_diagonal().iter().map(|z| z.re).collect();
    let eig = symmetric_tridiagonal_eigen(&diag, &off)?;
    check_separation(&eig.values, "eigenvalue")?;
    let n = m.n();
    let mut u = DMatrix::zeros(n, n);
    let mut d = Vec::with_capacity(n);
    for (k, (lam, x)) in eig.values.iter().zip(&eig.vectors).enumerate() {
        let phase = if *lam >= 0.0 { Complex::new(1.0, 0.0) } else { Complex::new(0.0, 1.0) };
        for (j, xj) in x.iter().enumerate() {
            u[(k, j)] = phase * xj;
        }
        d.push(Complex::new(lam.abs(), 0.0));
    }
    Ok((u, d))
}

/// Complex input: from the SVD `A = W Σ Y^*`, symmetry gives
/// `conj(Y) = W Φ` with `Φ` diagonal unitary when the singular values are
/// distinct, so `A = (W Φ^{1/2}) Σ (W Φ^{1/2})^T`.
fn factorize_complex(a: &DMatrix<Complex>) -> Result<(DMatrix<Complex>, Vec<Complex>)> {
    let svd = a.clone().svd(true, true);
    let (w, v_t) = match (svd.u, svd.v_t) {
        (Some(w), Some(v_t)) => (w, v_t),
        _ => return Err(Error::FactorizationFailed("SVD did not return vectors".into())),
    };
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    check_separation(&sigma, "singular value")?;
    let n = a.nrows();
    let mut v = w.clone();
    for i in 0..n {
        // Φ_ii = (W^* conj(Y))_ii, and conj(Y) = (Y^*)^T
        let phi: Complex = (0..n).map(|k| w[(k, i)].conj() * v_t[(i, k)]).sum();
        let half = Complex::from_polar(1.0, phi.arg() / 2.0);
        for k in 0..n {
            v[(k, i)] *= half;
        }
    }
    Ok((v.adjoint(), sigma.into_iter().map(|s| Complex::new(s, 0.0)).collect()))
}

/// Unitary `U` with `U A U^T = diag(d)`, `d_i >= 0`.
///
/// Real blocks go through the tridiagonal eigen-decomposition (their spectrum
/// is simple, so repeated `|eigenvalue|` pairs are harmless); complex blocks
/// go through the SVD and must have distinct nonzero singular values.
pub fn takagi_factorize(m: &FiniteJacobiMatrix) -> Result<TakagiFactorization> {
    let a = m.entries();
    let (u, d) = if m.is_real() {
        factorize_real(m)?
    } else {
        factorize_complex(a)?
    };
    let (residual_unitary, residual_diag, residual_coneigen) = residuals(a, &u, &d);
    Ok(TakagiFactorization {
        u_matrix: u,
        d,
        residual_unitary,
        residual_diag,
        residual_coneigen,
    })
}

/// Nodes and weights of the discrete measure `dρ^N`.
#[derive(Debug, Clone)]
pub struct SpectralMeasureData {
    pub n: usize,
    /// `u^i` of length `N + 2` with `u^i_0 = u^i_{N+1} = 0` and `u^i_1 = 1`.
    pub u_vectors: Vec<Vec<Complex>>,
    /// `ρ_i = Σ_n |u^i_n|^2`.
    pub rho: Vec<f64>,
    /// `H_{ki} = Σ_n conj(u^k_n) conj(u^i_n)`.
    pub h_matrix: DMatrix<Complex>,
    /// `ω_i = d_i Σ_k H_{ki} / ρ_k`.
    pub omega: Vec<Complex>,
    /// Coneigenvalues for the rows rephased so that `û^i_1 > 0`.
    pub d: Vec<Complex>,
    pub a0: Complex,
}

impl SpectralMeasureData {
    /// Weights `1/ρ_k` of the atoms.
    pub fn weights(&self) -> Vec<f64> {
        self.rho.iter().map(|r| 1.0 / r).collect()
    }

    /// `max_{k,i} |Σ_n conj(u^k_n) u^i_n - δ_{ki} ρ_i| / sqrt(ρ_k ρ_i)`.
    ///
    /// The scaling undoes the normalisation by `û_1`, so the value is
    /// comparable with the unitarity residual of `U`.
    pub fn quasi_orthogonality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (k, uk) in self.u_vectors.iter().enumerate() {
            for (i, ui) in self.u_vectors.iter().enumerate() {
                let s: Complex = uk.iter().zip(ui).map(|(x, y)| x.conj() * y).sum();
                let want = if k == i { self.rho[i] } else { 0.0 };
                worst = worst.max((s - want).norm() / (self.rho[k] * self.rho[i]).sqrt());
            }
        }
        worst
    }
}

/// Builds `u^i`, `ρ`, `H` and `ω` from a factorization.
///
/// The normalised vectors do not depend on the phase of the rows of `U`;
/// `d_i` does, and it is taken in the phase where `û^i_1` is real positive.
/// Only in that phase does the expansion `v_{n,t} = Σ_k c^k_t conj(u^k_n)`
/// lead to the coupled system with coefficient `d_i / ρ_i`.
pub fn spectral_data(fact: &TakagiFactorization, a0: Complex) -> Result<SpectralMeasureData> {
    let u = &fact.u_matrix;
    let n = u.nrows();
    let mut u_vectors = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        let head = u[(i, 0)];
        if head.norm() <= FIRST_COMPONENT_TOL {
            return Err(Error::ZeroFirstComponent { index: i + 1 });
        }
        let mut v = Vec::with_capacity(n + 2);
        v.push(Complex::new(0.0, 0.0));
        v.extend((0..n).map(|j| u[(i, j)] / head));
        v.push(Complex::new(0.0, 0.0));
        v[1] = Complex::new(1.0, 0.0);
        u_vectors.push(v);
        let phase = head / head.norm();
        d.push(fact.d[i] * phase.conj() * phase.conj());
    }
    let rho: Vec<f64> = u_vectors
        .iter()
        .map(|v| v.iter().map(|x| x.norm_sqr()).sum())
        .collect();
    let mut h = DMatrix::zeros(n, n);
    for k in 0..n {
        for i in k..n {
            let s: Complex = u_vectors[k]
                .iter()
                .zip(&u_vectors[i])
                .map(|(x, y)| (x * y).conj())
                .sum();
            h[(k, i)] = s;
            h[(i, k)] = s;
        }
    }
    let omega = (0..n)
        .map(|i| d[i] * (0..n).map(|k| h[(k, i)] / rho[k]).sum::<Complex>())
        .collect();
    Ok(SpectralMeasureData {
        n,
        u_vectors,
        rho,
        h_matrix: h,
        omega,
        d,
        a0,
    })
}

/// `T_t(ω)` from `T_{t+1} = ω T_t - T_{t-1}`, `T_0 = 0`, `T_{-1} = -1`;
/// so `T_t = U_{t-1}(ω/2)`, the shifted Chebyshev polynomial of the second kind.
pub fn chebyshev_t(t: i64, omega: Complex) -> Complex {
    chebyshev_sequence(t.max(0) as usize, omega)[(t + 1).max(0) as usize]
}

/// `T_{-1}, T_0, .., T_{t_max}`; index `j` holds `T_{j-1}`.
pub fn chebyshev_sequence(t_max: usize, omega: Complex) -> Vec<Complex> {
    let mut out = Vec::with_capacity(t_max + 2);
    out.push(Complex::new(-1.0, 0.0));
    out.push(Complex::new(0.0, 0.0));
    for j in 1..=t_max {
        let next = omega * out[j] - out[j - 1];
        out.push(next);
    }
    out
}

/// `a0 Σ_k T_t(ω_k) / ρ_k`, the measure representation of `r^N_{t-1}`.
pub fn response_from_measure(data: &SpectralMeasureData, t: usize) -> Result<Complex> {
    if t == 0 {
        return Err(Error::InvalidArgument("t must be at least 1".into()));
    }
    let s: Complex = data
        .omega
        .iter()
        .zip(&data.rho)
        .map(|(w, r)| chebyshev_sequence(t, *w)[t + 1] / r)
        .sum();
    Ok(data.a0 * s)
}

/// `(r_0, .., r_{T-1})` from the measure, `r_{t-1} = a0 Σ_k T_t(ω_k)/ρ_k`.
pub fn response_sequence_from_measure(data: &SpectralMeasureData, horizon: usize) -> Vec<Complex> {
    let tables: Vec<Vec<Complex>> = data
        .omega
        .iter()
        .map(|w| chebyshev_sequence(horizon, *w))
        .collect();
    (1..=horizon)
        .map(|t| {
            data.a0
                * tables
                    .iter()
                    .zip(&data.rho)
                    .map(|(tab, r)| tab[t + 1] / r)
                    .sum::<Complex>()
        })
        .collect()
}

/// Time-steps `c^i_{t+1} + c^i_{t-1} - (d_i/ρ_i) Σ_k c^k_t H_{ki} = (a0/ρ_i) f_t`
/// from `c_{-1} = c_0 = 0`. Row `t` of the result holds `c_t`, `t = 0..=T`.
pub fn solve_coupled_c(
    data: &SpectralMeasureData,
    d: &[Complex],
    f: &ControlSequence,
) -> Result<Vec<Vec<Complex>>> {
    let n = data.n;
    if d.len() != n {
        return Err(Error::InvalidArgument(format!("{} coneigenvalues for N = {n}", d.len())));
    }
    let horizon = f.horizon();
    let zero = vec![Complex::new(0.0, 0.0); n];
    let mut c = vec![zero.clone()];
    let mut prev = zero;
    for t in 0..horizon {
        let cur = &c[t];
        let next: Vec<Complex> = (0..n)
            .map(|i| {
                let coupling: Complex = (0..n).map(|k| cur[k] * data.h_matrix[(k, i)]).sum();
                coupling * d[i] / data.rho[i] - prev[i] + data.a0 * f.values()[t] / data.rho[i]
            })
            .collect();
        prev = cur.clone();
        c.push(next);
    }
    Ok(c)
}

/// `v_{n,t} = Σ_k c^k_t conj(u^k_n)` for `n = 0..=N+1`.
pub fn reconstruct_field(data: &SpectralMeasureData, c: &[Vec<Complex>]) -> Vec<Vec<Complex>> {
    c.iter()
        .map(|ct| {
            (0..data.n + 2)
                .map(|n| {
                    ct.iter()
                        .zip(&data.u_vectors)
                        .map(|(ck, uk)| ck * uk[n].conj())
                        .sum()
                })
                .collect()
        })
        .collect()
}

/// `s_k = Σ_j ω_j^k / ρ_j`.
pub fn moments(data: &SpectralMeasureData, k: u32) -> Complex {
    data.omega
        .iter()
        .zip(&data.rho)
        .map(|(w, r)| w.powu(k) / r)
        .sum()
}

/// Comparison of the measure representation with a response vector.
#[derive(Debug, Clone)]
pub struct MeasureAgreement {
    /// `|a0 Σ T_t(ω)/ρ - r_{t-1}|` per `t = 1..=T`.
    pub abs_errors: Vec<f64>,
    /// Scale used for each `t`: `1 + Σ_k |a0 T_t(ω_k)| / ρ_k`.
    pub scales: Vec<f64>,
    /// First `t` whose error exceeds `tol · scale`, if any.
    pub first_failing_t: Option<usize>,
    pub tol: f64,
}

impl MeasureAgreement {
    pub fn agrees(&self) -> bool {
        self.first_failing_t.is_none()
    }

    pub fn max_relative_error(&self) -> f64 {
        self.abs_errors
            .iter()
            .zip(&self.scales)
            .map(|(e, s)| e / s)
            .fold(0.0, f64::max)
    }
}

/// Checks `r_{t-1} = a0 Σ_k T_t(ω_k)/ρ_k` against `r` for every stored `t`.
pub fn measure_agreement(data: &SpectralMeasureData, r: &[Complex], tol: f64) -> MeasureAgreement {
    let horizon = r.len();
    let tables: Vec<Vec<Complex>> = data
        .omega
        .iter()
        .map(|w| chebyshev_sequence(horizon, *w))
        .collect();
    let mut abs_errors = Vec::with_capacity(horizon);
    let mut scales = Vec::with_capacity(horizon);
    let mut first_failing_t = None;
    for t in 1..=horizon {
        let (mut val, mut scale) = (Complex::new(0.0, 0.0), 1.0);
        for (tab, rho) in tables.iter().zip(&data.rho) {
            let term = data.a0 * tab[t + 1] / rho;
            val += term;
            scale += term.norm();
        }
        let err = (val - r[t - 1]).norm();
        if first_failing_t.is_none() && err > tol * scale {
            first_failing_t = Some(t);
        }
        abs_errors.push(err);
        scales.push(scale);
    }
    MeasureAgreement {
        abs_errors,
        scales,
        first_failing_t,
        tol,
    }
}
