//! Discrete-time wave equation driven through the boundary `n = 0`:
//!
//! ```text
//! u_{n,t+1} + u_{n,t-1} - a_n u_{n+1,t} - a_{n-1} u_{n-1,t} - b_n u_{n,t} = 0
//! u_{n,-1} = u_{n,0} = 0,   u_{0,t} = f_t
//! ```
//!
//! on the half-line, or on `1..=N` with the extra wall `u_{N+1,t} = 0`.

use crate::error::{Error, Result};
use crate::jacobi::{Complex, JacobiCoefficients};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    HalfLine,
    Interval(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlSequence {
    values: Vec<Complex>,
}

impl ControlSequence {
    pub fn new(values: Vec<Complex>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("control horizon must be positive".into()));
        }
        Ok(Self { values })
    }

    /// `(1, 0, .., 0)` of length `horizon`.
    pub fn delta(horizon: usize) -> Result<Self> {
        let mut v = vec![Complex::new(0.0, 0.0); horizon];
        if let Some(first) = v.first_mut() {
            *first = Complex::new(1.0, 0.0);
        }
        Self::new(v)
    }

    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }
}

/// `u_{n,t}` for `n = 0..=n_max` and `t = -1..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    geometry: Geometry,
    horizon: usize,
    n_max: usize,
    // row-major in t, offset by one so that t = -1 is row 0
    data: Vec<Complex>,
}

impl WaveField {
    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    fn offset(&self, n: usize, t: isize) -> usize {
        debug_assert!(n <= self.n_max && t >= -1 && t <= self.horizon as isize);
        (t + 1) as usize * (self.n_max + 1) + n
    }

    /// `u_{n,t}`; positions past `n_max` are zero by causality.
    pub fn get(&self, n: usize, t: isize) -> Complex {
        if n > self.n_max {
            return Complex::new(0.0, 0.0);
        }
        self.data[self.offset(n, t)]
    }

    fn set(&mut self, n: usize, t: isize, v: Complex) {
        let i = self.offset(n, t);
        self.data[i] = v;
    }

    /// The spatial row `(u_{0,t}, .., u_{n_max,t})`.
    pub fn row(&self, t: isize) -> &[Complex] {
        let start = self.offset(0, t);
        &self.data[start..start + self.n_max + 1]
    }

    /// `(u_{n,0}, .., u_{n,T})`.
    pub fn trace(&self, n: usize) -> Vec<Complex> {
        (0..=self.horizon as isize).map(|t| self.get(n, t)).collect()
    }

    /// `M_t = max_{1<=n<=t} { |u_{n,t}|, |u_{n,t-1}| }` for `t = 1..=T`.
    pub fn growth_profile(&self) -> Vec<f64> {
        (1..=self.horizon as isize)
            .map(|t| {
                (1..=(t as usize).min(self.n_max))
                    .map(|n| self.get(n, t).norm().max(self.get(n, t - 1).norm()))
                    .fold(0.0, f64::max)
            })
            .collect()
    }
}

/// Time-steps the boundary-control system up to `t = T` with `T` the horizon of `f`.
pub fn simulate(
    coeffs: &JacobiCoefficients,
    f: &ControlSequence,
    geometry: Geometry,
) -> Result<WaveField> {
    let horizon = f.horizon();
    let (n_max, last_active) = match geometry {
        Geometry::HalfLine => (horizon + 1, horizon),
        Geometry::Interval(0) => {
            return Err(Error::InvalidArgument("interval length must be positive".into()))
        }
        Geometry::Interval(n) => (n + 1, n),
    };
    let a = coeffs.a_range(last_active.saturating_sub(1))?;
    let b = coeffs.b_range(last_active)?;
    let mut field = WaveField {
        geometry,
        horizon,
        n_max,
        data: vec![Complex::new(0.0, 0.0); (horizon + 2) * (n_max + 1)],
    };
    for t in 0..horizon {
        field.set(0, t as isize, f.values[t]);
    }
    for t in 0..horizon as isize {
        // only n <= t + 1 can be reached at time t + 1
        let top = last_active.min(t as usize + 1);
        for n in 1..=top {
            let right = if n < last_active {
                a[n] * field.get(n + 1, t)
            } else {
                Complex::new(0.0, 0.0)
            };
            let v = right + a[n - 1] * field.get(n - 1, t) + b[n] * field.get(n, t)
                - field.get(n, t - 1);
            field.set(n, t + 1, v);
        }
    }
    Ok(field)
}

/// Convolution kernel of the response operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseVector {
    pub r: Vec<Complex>,
    pub a0: Complex,
}

impl ResponseVector {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// `r_t = u^delta_{1,t+1}` for `t = 0..T-1`.
pub fn response_vector(
    coeffs: &JacobiCoefficients,
    horizon: usize,
    geometry: Geometry,
) -> Result<ResponseVector> {
    let field = simulate(coeffs, &ControlSequence::delta(horizon)?, geometry)?;
    let r = (1..=horizon as isize).map(|t| field.get(1, t)).collect();
    Ok(ResponseVector { r, a0: coeffs.a0() })
}

/// `c_t = sum_{s<=t} f_s g_{t-s}` on the common horizon.
pub fn convolve(f: &[Complex], g: &[Complex]) -> Vec<Complex> {
    let len = f.len().min(g.len());
    (0..len)
        .map(|t| (0..=t).map(|s| f[s] * g[t - s]).sum())
        .collect()
}

/// `(R^T f)_t = (r * f)_{t-1}` for `t = 1..=T`; element `i` holds `t = i + 1`.
pub fn apply_response(r: &ResponseVector, f: &ControlSequence) -> Result<Vec<Complex>> {
    if r.len() < f.horizon() {
        return Err(Error::InvalidArgument(format!(
            "response kernel has {} entries, control horizon is {}",
            r.len(),
            f.horizon()
        )));
    }
    Ok(convolve(&r.r, f.values()))
}
