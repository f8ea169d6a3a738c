//! Coefficient sequences of a complex Jacobi matrix and its finite blocks.
//!
//! A semi-infinite matrix is stored as a finite prefix `a_1..a_L`, `b_1..b_L`
//! together with a [`TailRule`] that says what happens past `L`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Extension of the stored coefficients beyond the last stored index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailRule {
    /// `a_n = 1`, `b_n = 0` past the stored range.
    Free,
    /// Reading past the stored range is an error.
    #[default]
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobiCoefficients {
    a: Vec<Complex>,
    b: Vec<Complex>,
    a0: Complex,
    bound_b: f64,
    tail: TailRule,
}

fn check_finite(values: &[Complex], what: &str) -> Result<()> {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteEntry {
            what: what.to_string(),
        })
    }
}

/// Validates `a_1..a_L`, `b_1..b_L` and the boundary parameter `a0`.
///
/// The returned bound is the exact maximum modulus over the stored `a_n`, `b_n`.
pub fn validate_coefficients(
    a: &[Complex],
    b: &[Complex],
    a0: Complex,
) -> Result<JacobiCoefficients> {
    JacobiCoefficients::new(a.to_vec(), b.to_vec(), a0, TailRule::None)
}

impl JacobiCoefficients {
    pub fn new(a: Vec<Complex>, b: Vec<Complex>, a0: Complex, tail: TailRule) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        check_finite(&a, "a")?;
        check_finite(&b, "b")?;
        check_finite(&[a0], "a0")?;
        if a.len() != b.len() {
            return Err(Error::LengthMismatch {
                a: a.len(),
                b: b.len(),
            });
        }
        if a0.norm() == 0.0 {
            return Err(Error::ZeroOffDiagonal { index: 0 });
        }
        if let Some(i) = a.iter().position(|x| x.norm() == 0.0) {
            return Err(Error::ZeroOffDiagonal { index: i + 1 });
        }
        let bound_b = a.iter().chain(b.iter()).map(|z| z.norm()).fold(0.0, f64::max);
        Ok(Self {
            a,
            b,
            a0,
            bound_b,
            tail,
        })
    }

    /// The free operator: `a_n = 1`, `b_n = 0` for all `n`, `a0 = 1`.
    pub fn free() -> Self {
        Self::new(
            vec![Complex::new(1.0, 0.0)],
            vec![Complex::new(0.0, 0.0)],
            Complex::new(1.0, 0.0),
            TailRule::Free,
        )
        .expect("free coefficients are valid")
    }

    pub fn with_tail(mut self, tail: TailRule) -> Self {
        self.tail = tail;
        self
    }

    /// Same coefficients with a different boundary parameter.
    pub fn with_a0(&self, a0: Complex) -> Result<Self> {
        Self::new(self.a.clone(), self.b.clone(), a0, self.tail)
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn a0(&self) -> Complex {
        self.a0
    }

    pub fn stored_a(&self) -> &[Complex] {
        &self.a
    }

    pub fn stored_b(&self) -> &[Complex] {
        &self.b
    }

    pub fn tail(&self) -> TailRule {
        self.tail
    }

    /// Maximum modulus over the stored `a_n`, `b_n` (not including `a0`).
    pub fn bound_b(&self) -> f64 {
        self.bound_b
    }

    /// Bound valid for every coefficient the tail rule can produce.
    pub fn effective_bound(&self) -> f64 {
        match self.tail {
            TailRule::Free => self.bound_b.max(1.0),
            TailRule::None => self.bound_b,
        }
    }

    /// `a_n` for `n >= 0`, where `a_0` is the boundary parameter.
    pub fn a(&self, n: usize) -> Result<Complex> {
        if n == 0 {
            return Ok(self.a0);
        }
        match self.a.get(n - 1) {
            Some(&v) => Ok(v),
            None => match self.tail {
                TailRule::Free => Ok(Complex::new(1.0, 0.0)),
                TailRule::None => Err(Error::InsufficientCoefficients {
                    what: "a",
                    index: n,
                    available: self.a.len(),
                }),
            },
        }
    }

    /// `b_n` for `n >= 1`.
    pub fn b(&self, n: usize) -> Result<Complex> {
        if n == 0 {
            return Err(Error::InvalidArgument("b is indexed from 1".into()));
        }
        match self.b.get(n - 1) {
            Some(&v) => Ok(v),
            None => match self.tail {
                TailRule::Free => Ok(Complex::new(0.0, 0.0)),
                TailRule::None => Err(Error::InsufficientCoefficients {
                    what: "b",
                    index: n,
                    available: self.b.len(),
                }),
            },
        }
    }

    pub fn is_real(&self) -> bool {
        self.a.iter().chain(self.b.iter()).all(|z| z.im == 0.0)
    }

    /// `(a_0, a_1, .., a_upto)`.
    pub(crate) fn a_range(&self, upto: usize) -> Result<Vec<Complex>> {
        (0..=upto).map(|n| self.a(n)).collect()
    }

    /// `(0, b_1, .., b_upto)`, padded at index 0 so that `v[n] = b_n`.
    pub(crate) fn b_range(&self, upto: usize) -> Result<Vec<Complex>> {
        std::iter::once(Ok(Complex::new(0.0, 0.0)))
            .chain((1..=upto).map(|n| self.b(n)))
            .collect()
    }
}

/// The `N x N` upper-left block of the Jacobi matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteJacobiMatrix {
    entries: DMatrix<Complex>,
}

/// Assembles the block with diagonal `b_1..b_N` and off-diagonals `a_1..a_{N-1}`.
pub fn assemble_finite(coeffs: &JacobiCoefficients, n: usize) -> Result<FiniteJacobiMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("block size must be positive".into()));
    }
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = coeffs.b(i + 1)?;
        if i + 1 < n {
            let a = coeffs.a(i + 1)?;
            m[(i, i + 1)] = a;
            m[(i + 1, i)] = a;
        }
    }
    Ok(FiniteJacobiMatrix { entries: m })
}

impl FiniteJacobiMatrix {
    /// Wraps a dense matrix after checking symmetry (no conjugation) and
    /// tridiagonality. Off-diagonal zeros are allowed here.
    pub fn from_entries(entries: DMatrix<Complex>) -> Result<Self> {
        let (r, c) = entries.shape();
        if r != c || r == 0 {
            return Err(Error::NotJacobi(format!("shape {r}x{c}")));
        }
        for i in 0..r {
            for j in 0..c {
                if entries[(i, j)] != entries[(j, i)] {
                    return Err(Error::NotJacobi(format!("entry ({i},{j}) not symmetric")));
                }
                if i.abs_diff(j) > 1 && entries[(i, j)] != Complex::new(0.0, 0.0) {
                    return Err(Error::NotJacobi(format!("entry ({i},{j}) off the band")));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex> {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<Complex> {
        (0..self.n()).map(|i| self.entries[(i, i)]).collect()
    }

    pub fn off_diagonal(&self) -> Vec<Complex> {
        (0..self.n().saturating_sub(1))
            .map(|i| self.entries[(i, i + 1)])
            .collect()
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }
}

/// On-disk coefficient description.
///
/// ```json
/// { "a": [[1.0, 0.0]], "b": [[0.0, 0.0]], "a0": [1.0, 0.0], "tail": "free" }
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientConfig {
    pub a: Vec<[f64; 2]>,
    pub b: Vec<[f64; 2]>,
    #[serde(default = "default_a0")]
    pub a0: [f64; 2],
    #[serde(default)]
    pub tail: TailRule,
}

fn default_a0() -> [f64; 2] {
    [1.0, 0.0]
}

fn to_complex(v: &[[f64; 2]]) -> Vec<Complex> {
    v.iter().map(|&[re, im]| Complex::new(re, im)).collect()
}

impl CoefficientConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn into_coefficients(self) -> Result<JacobiCoefficients> {
        JacobiCoefficients::new(
            to_complex(&self.a),
            to_complex(&self.b),
            Complex::new(self.a0[0], self.a0[1]),
            self.tail,
        )
    }
}

impl From<&JacobiCoefficients> for CoefficientConfig {
    fn from(c: &JacobiCoefficients) -> Self {
        let pairs = |v: &[Complex]| v.iter().map(|z| [z.re, z.im]).collect();
        Self {
            a: pairs(&c.a),
            b: pairs(&c.b),
            a0: [c.a0.re, c.a0.im],
            tail: c.tail,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn free_single_entry_is_valid() {
        let k = validate_coefficients(&[c(1.0, 0.0)], &[c(0.0, 0.0)], c(1.0, 0.0)).unwrap();
        assert_eq!(k.bound_b(), 1.0);
    }

    #[test]
    fn zero_off_diagonal_rejected() {
        let e = validate_coefficients(&[c(0.0, 0.0)], &[c(1.0, 0.0)], c(1.0, 0.0)).unwrap_err();
        assert!(matches!(e, Error::ZeroOffDiagonal { index: 1 }));
        let e = validate_coefficients(&[c(1.0, 0.0)], &[c(1.0, 0.0)], c(0.0, 0.0)).unwrap_err();
        assert!(matches!(e, Error::ZeroOffDiagonal { index: 0 }));
    }

    #[test]
    fn length_mismatch_rejected() {
        let e = validate_coefficients(&[c(0.0, 1.0), c(2.0, 0.0)], &[c(1.0, 1.0)], c(1.0, 0.0))
            .unwrap_err();
        assert!(matches!(e, Error::LengthMismatch { a: 2, b: 1 }));
    }

    #[test]
    fn non_finite_rejected() {
        let e = validate_coefficients(&[c(f64::NAN, 0.0)], &[c(1.0, 0.0)], c(1.0, 0.0))
            .unwrap_err();
        assert!(matches!(e, Error::NonFiniteEntry { .. }));
    }

    #[test]
    fn bound_is_max_modulus() {
        let k = validate_coefficients(&[c(3.0, 4.0), c(0.5, 0.0)], &[c(0.0, -6.0), c(1.0, 0.0)], c(1.0, 0.0))
            .unwrap();
        assert_eq!(k.bound_b(), 6.0);
    }

    #[test]
    fn assemble_two_by_two() {
        let k = validate_coefficients(&[c(2.0, 1.0), c(1.0, 0.0)], &[c(0.5, 0.0), c(-1.0, 3.0)], c(1.0, 0.0))
            .unwrap();
        let m = assemble_finite(&k, 2).unwrap();
        let e = m.entries();
        assert_eq!(e[(0, 0)], c(0.5, 0.0));
        assert_eq!(e[(0, 1)], c(2.0, 1.0));
        assert_eq!(e[(1, 0)], c(2.0, 1.0));
        assert_eq!(e[(1, 1)], c(-1.0, 3.0));
    }

    #[test]
    fn assemble_one_by_one() {
        let k = validate_coefficients(&[c(2.0, 1.0)], &[c(0.5, 0.25)], c(1.0, 0.0)).unwrap();
        let m = assemble_finite(&k, 1).unwrap();
        assert_eq!(m.n(), 1);
        assert_eq!(m.entries()[(0, 0)], c(0.5, 0.25));
    }

    #[test]
    fn assemble_overrun_errors_without_tail() {
        let k = validate_coefficients(&[c(1.0, 0.0), c(1.0, 0.0)], &[c(0.0, 0.0), c(0.0, 0.0)], c(1.0, 0.0))
            .unwrap();
        assert!(matches!(
            assemble_finite(&k, 3),
            Err(Error::InsufficientCoefficients { .. })
        ));
        let k = k.with_tail(TailRule::Free);
        let m = assemble_finite(&k, 4).unwrap();
        assert_eq!(m.entries()[(2, 3)], c(1.0, 0.0));
        assert_eq!(m.entries()[(3, 3)], c(0.0, 0.0));
    }

    #[test]
    fn assembled_block_is_symmetric_tridiagonal() {
        let a: Vec<_> = (1..8).map(|i| c(i as f64, -0.5 * i as f64)).collect();
        let b: Vec<_> = (1..8).map(|i| c(0.1 * i as f64, 1.0)).collect();
        let k = validate_coefficients(&a, &b, c(1.0, 0.0)).unwrap();
        let m = assemble_finite(&k, 7).unwrap();
        assert!(FiniteJacobiMatrix::from_entries(m.entries().clone()).is_ok());
        assert_eq!(m.off_diagonal(), a[..6].to_vec());
    }

    #[test]
    fn config_parses_with_defaults() {
        let cfg = CoefficientConfig::from_json(r#"{"a": [[1, 0]], "b": [[0, 0]]}"#).unwrap();
        let k = cfg.into_coefficients().unwrap();
        assert_eq!(k.a0(), c(1.0, 0.0));
        assert_eq!(k.tail(), TailRule::None);

        let cfg = CoefficientConfig::from_json(
            r#"{"a": [[0.5, -0.25]], "b": [[2, 1]], "a0": [0, 2], "tail": "free"}"#,
        )
        .unwrap();
        let k = cfg.into_coefficients().unwrap();
        assert_eq!(k.a0(), c(0.0, 2.0));
        assert_eq!(k.a(5).unwrap(), c(1.0, 0.0));
        assert_eq!(k.effective_bound(), 2.0_f64.hypot(1.0));
    }

    #[test]
    fn config_rejects_unknown_tail() {
        assert!(CoefficientConfig::from_json(r#"{"a": [[1, 0]], "b": [[0, 0]], "tail": "x"}"#).is_err());
    }
}
