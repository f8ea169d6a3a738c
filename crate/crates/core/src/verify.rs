//! The acceptance suite: eleven seeded checks of the identities relating
//! resolvent, wave dynamics and Takagi data.
//!
//! Each criterion draws its instances from `ChaCha8Rng` seeded with the
//! suite seed and a per-criterion stream, so any single check can be rerun
//! on its own and produces the same instances.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{response_vector, simulate, ControlSequence, Geometry};
use crate::error::{Error, Result};
use crate::jacobi::{assemble_finite, Complex, FiniteJacobiMatrix, JacobiCoefficients, TailRule};
use crate::recursion::{green_function, phi_plus_finite, solve_pq, weyl_resolvent, wronskian, ResolventMode};
use crate::series::{series_partial_sum, tail_bound, weyl_series, GrowthEnvelope};
use crate::takagi::{
    measure_agreement, moments, reconstruct_field, solve_coupled_c, spectral_data, takagi_factorize,
    SpectralMeasureData, TakagiFactorization,
};
use crate::transform::{lambda_to_z, RegionD};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

pub const CRITERIA: [&str; 11] = [
    "resolvent-series equivalence",
    "free closed form",
    "finite speed",
    "takagi residuals",
    "coupled-system reconstruction",
    "measure representation",
    "weight identities",
    "growth bound and tails",
    "region D consistency",
    "wronskian and green function",
    "moment stabilization",
];

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    /// 1-based.
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Reported but non-blocking findings.
    pub soft: Vec<String>,
    pub seconds: f64,
}

impl CriterionOutcome {
    pub fn summary_line(&self) -> String {
        format!(
            "[{}] {:>2} {}: {} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub seed: u64,
    pub outcomes: Vec<CriterionOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failed(&self) -> Vec<usize> {
        self.outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect()
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![format!("seed: {:#x} (ChaCha8, stream = criterion id)", self.seed)];
        for o in &self.outcomes {
            out.push(o.summary_line());
            out.extend(o.soft.iter().map(|s| format!("       note: {s}")));
        }
        let passed = self.outcomes.iter().filter(|o| o.passed).count();
        out.push(format!("{passed}/{} criteria passed", self.outcomes.len()));
        out
    }
}

pub fn run_all(seed: u64) -> VerifyReport {
    VerifyReport {
        seed,
        outcomes: (1..=CRITERIA.len()).map(|id| run_criterion(id, seed).unwrap()).collect(),
    }
}

pub fn run_criterion(id: usize, seed: u64) -> Result<CriterionOutcome> {
    let check: fn(&mut ChaCha8Rng) -> Check = match id {
        1 => resolvent_series,
        2 => free_closed_form,
        3 => finite_speed,
        4 => takagi_residuals,
        5 => coupled_reconstruction,
        6 => measure_representation,
        7 => weight_identities,
        8 => growth_and_tails,
        9 => region_consistency,
        10 => wronskian_green,
        11 => moment_stabilization,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "criterion {id} does not exist (1..={})",
                CRITERIA.len()
            )))
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    let start = Instant::now();
    let c = check(&mut rng);
    Ok(CriterionOutcome {
        id,
        name: CRITERIA[id - 1],
        passed: c.passed,
        detail: c.detail,
        soft: c.soft,
        seconds: start.elapsed().as_secs_f64(),
    })
}

struct Check {
    passed: bool,
    detail: String,
    soft: Vec<String>,
}

impl Check {
    fn from_worst(worst: &Worst, tol: f64, what: &str) -> Self {
        Check {
            passed: worst.ok() && worst.value <= tol,
            detail: worst.describe(what, tol),
            soft: Vec::new(),
        }
    }

    fn all(parts: Vec<Check>) -> Self {
        Check {
            passed: parts.iter().all(|p| p.passed),
            detail: parts.iter().map(|p| p.detail.as_str()).collect::<Vec<_>>().join("; "),
            soft: parts.into_iter().flat_map(|p| p.soft).collect(),
        }
    }
}

/// Largest error seen and where; an error string if some computation failed.
#[derive(Default)]
struct Worst {
    value: f64,
    at: String,
    failure: Option<String>,
    count: usize,
}

impl Worst {
    fn record(&mut self, value: f64, at: impl FnOnce() -> String) {
        self.count += 1;
        if value.is_nan() || value > self.value {
            self.value = value;
            self.at = at();
        }
    }

    fn fail(&mut self, msg: String) {
        self.failure.get_or_insert(msg);
    }

    fn ok(&self) -> bool {
        self.failure.is_none() && self.value.is_finite()
    }

    fn describe(&self, what: &str, tol: f64) -> String {
        match &self.failure {
            Some(f) => format!("{what}: {f}"),
            None => format!(
                "{what} max {:.2e} (tol {tol:.0e}, {} checks{})",
                self.value,
                self.count,
                if self.at.is_empty() { String::new() } else { format!(", worst at {}", self.at) }
            ),
        }
    }
}

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// Coefficients with `|a_n| ∈ [0.3, 1]·bound`, `|b_n| ∈ [0, 1]·bound`,
/// uniformly random phases (or signs when `real`).
fn random_coeffs(rng: &mut ChaCha8Rng, len: usize, bound: f64, real: bool) -> JacobiCoefficients {
    let mut draw = |lo: f64| {
        let r = bound * rng.gen_range(lo..1.0);
        if real {
            c(if rng.gen_bool(0.5) { r } else { -r }, 0.0)
        } else {
            Complex::from_polar(r, rng.gen_range(-PI..PI))
        }
    };
    let a = (0..len).map(|_| draw(0.3)).collect();
    let b = (0..len).map(|_| draw(0.0)).collect();
    JacobiCoefficients::new(a, b, c(1.0, 0.0), TailRule::None).expect("nonzero draws")
}

/// `lambda = z + 1/z` with `|z| = frac/R` and `arg z = phi`.
fn lambda_at(region: &RegionD, frac: f64, phi: f64) -> Complex {
    let z = Complex::from_polar(frac / region.r_big(), phi);
    z + z.inv()
}

fn random_lambda(rng: &mut ChaCha8Rng, region: &RegionD, max_frac: f64) -> Complex {
    lambda_at(region, rng.gen_range(0.02..=max_frac), rng.gen_range(-PI..PI))
}

/// A block (real or complex) whose Takagi data exists, redrawing on
/// degenerate spectra or vanishing first components.
struct TakagiInstance {
    coeffs: JacobiCoefficients,
    matrix: FiniteJacobiMatrix,
    fact: TakagiFactorization,
    data: SpectralMeasureData,
}

fn takagi_instance(rng: &mut ChaCha8Rng, n: usize, real: bool, redraws: &mut usize) -> TakagiInstance {
    loop {
        let coeffs = random_coeffs(rng, n + 2, 1.0, real);
        let attempt = assemble_finite(&coeffs, n).and_then(|matrix| {
            let fact = takagi_factorize(&matrix)?;
            let data = spectral_data(&fact, coeffs.a0())?;
            Ok((matrix, fact, data))
        });
        match attempt {
            Ok((matrix, fact, data)) => {
                return TakagiInstance {
                    coeffs,
                    matrix,
                    fact,
                    data,
                }
            }
            Err(Error::DegenerateSpectrum(_) | Error::ZeroFirstComponent { .. }) => *redraws += 1,
            Err(e) => panic!("unexpected failure building a Takagi instance: {e}"),
        }
    }
}

fn redraw_note(redraws: usize) -> Vec<String> {
    if redraws == 0 {
        Vec::new()
    } else {
        vec![format!("{redraws} draws with degenerate Takagi data were replaced")]
    }
}

fn resolvent_series(rng: &mut ChaCha8Rng) -> Check {
    let mut worst = Worst::default();
    let horizon = 400;
    for inst in 0..50 {
        let n = 2 + inst % 9;
        let bound = if inst % 2 == 0 { 1.0 } else { 2.0 };
        let k = random_coeffs(rng, n, bound, false);
        let region = RegionD::new(bound).unwrap();
        let r = match response_vector(&k, horizon, Geometry::Interval(n)) {
            Ok(r) => r,
            Err(e) => {
                worst.fail(e.to_string());
                continue;
            }
        };
        for _ in 0..20 {
            let lambda = random_lambda(rng, &region, 0.9);
            let outcome = weyl_series(&r, lambda, &region, 1e-13)
                .and_then(|s| Ok((s.value, weyl_resolvent(&k, lambda, ResolventMode::Finite(n))?)));
            match outcome {
                Ok((s, m)) => worst.record((s - m).norm() / (1.0 + m.norm()), || {
                    format!("instance {inst}, N={n}, B={bound}, lambda={lambda:.4}")
                }),
                Err(e) => worst.fail(format!("instance {inst}, lambda={lambda:.4}: {e}")),
            }
        }
    }
    Check::from_worst(&worst, 1e-8, "|m_series - m_resolvent|/(1+|m|)")
}

fn free_closed_form(_: &mut ChaCha8Rng) -> Check {
    let free = JacobiCoefficients::free();
    let region = RegionD::new(1.0).unwrap();
    let r = response_vector(&free, 64, Geometry::HalfLine).unwrap();
    let mut worst = Worst::default();
    let mut uncertified = 0;
    for i in 0..10 {
        for j in 0..10 {
            let frac = 0.09 * (i + 1) as f64;
            let phi = PI + PI * (j as f64 + 0.5) / 10.0;
            let lambda = lambda_at(&region, frac, phi);
            let value = match weyl_series(&r, lambda, &region, 1e-12) {
                Ok(e) => e.value,
                // horizon 64 cannot certify the tail near |z|R = 1; the value is still compared
                Err(Error::HorizonTooShort { partial }) => {
                    uncertified += 1;
                    partial.value
                }
                Err(e) => {
                    worst.fail(e.to_string());
                    continue;
                }
            };
            let z = lambda_to_z(lambda).value();
            worst.record((value + z).norm(), || format!("|z|R={frac:.2}"));
        }
    }
    let mut check = Check::from_worst(&worst, 1e-10, "|m_series + z|");
    if uncertified > 0 {
        check.soft.push(format!(
            "{uncertified}/100 grid points have a certified tail above 1e-12 at horizon 64"
        ));
    }
    check
}

fn finite_speed(rng: &mut ChaCha8Rng) -> Check {
    let mut agree = Worst::default();
    let mut footprint = Worst::default();
    let mut first_change = usize::MAX;
    for inst in 0..50 {
        let n = 1 + inst % 10;
        let horizon = 2 * n + 4;
        let k = random_coeffs(rng, horizon + 1, 1.0, false);
        let half = response_vector(&k, horizon, Geometry::HalfLine).unwrap();
        let inter = response_vector(&k, horizon, Geometry::Interval(n)).unwrap();
        for t in 0..=2 * n - 2 {
            agree.record((half.r[t] - inter.r[t]).norm(), || format!("instance {inst}, N={n}, t={t}"));
        }

        // perturb a_M and b_{M+1}
        let m = 1 + rng.gen_range(0..n);
        let mut a = k.stored_a().to_vec();
        let mut b = k.stored_b().to_vec();
        a[m - 1] += Complex::from_polar(0.25, rng.gen_range(-PI..PI));
        b[m] += Complex::from_polar(0.25, rng.gen_range(-PI..PI));
        let kp = JacobiCoefficients::new(a, b, k.a0(), TailRule::None).unwrap();
        let pert = response_vector(&kp, horizon, Geometry::HalfLine).unwrap();
        for t in 0..=2 * m - 2 {
            footprint.record((pert.r[t] - half.r[t]).norm(), || format!("instance {inst}, M={m}, t={t}"));
        }
        if let Some(t) = (0..horizon).find(|&t| (pert.r[t] - half.r[t]).norm() > 1e-13) {
            first_change = first_change.min(t - 2 * m);
        }
    }
    let mut check = Check::all(vec![
        Check::from_worst(&agree, 1e-13, "half-line vs interval, t <= 2N-2"),
        Check::from_worst(&footprint, 1e-13, "perturbation footprint, t <= 2M-2"),
    ]);
    if first_change != usize::MAX {
        check.soft.push(format!(
            "first perturbed sample observed at t = 2M + {first_change} (minimum over instances)"
        ));
    }
    check
}

fn takagi_instances(rng: &mut ChaCha8Rng, real: bool, redraws: &mut usize) -> Vec<TakagiInstance> {
    (0..50).map(|i| takagi_instance(rng, 1 + i % 10, real, redraws)).collect()
}

// nalgebra's symmetric eigensolver, independent of the QL routine behind the real path
fn reference_abs_eigenvalues(m: &FiniteJacobiMatrix) -> Vec<f64> {
    let real: DMatrix<f64> = m.entries().map(|z| z.re);
    let mut v: Vec<f64> = real.symmetric_eigen().eigenvalues.iter().map(|x| x.abs()).collect();
    v.sort_by(f64::total_cmp);
    v
}

fn takagi_residuals(rng: &mut ChaCha8Rng) -> Check {
    let mut redraws = 0;
    let (mut unitary, mut diag, mut cone, mut eig) =
        (Worst::default(), Worst::default(), Worst::default(), Worst::default());
    for (i, inst) in takagi_instances(rng, false, &mut redraws).iter().enumerate() {
        let n = inst.matrix.n();
        unitary.record(inst.fact.residual_unitary, || format!("instance {i}, N={n}"));
        diag.record(inst.fact.residual_diag, || format!("instance {i}, N={n}"));
        cone.record(inst.fact.residual_coneigen, || format!("instance {i}, N={n}"));
    }
    for (i, inst) in takagi_instances(rng, true, &mut redraws).iter().enumerate() {
        let mut d: Vec<f64> = inst.fact.d.iter().map(|z| z.norm()).collect();
        d.sort_by(f64::total_cmp);
        let want = reference_abs_eigenvalues(&inst.matrix);
        let err = d.iter().zip(&want).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        eig.record(err, || format!("real instance {i}"));
        unitary.record(inst.fact.residual_unitary, || format!("real instance {i}"));
        diag.record(inst.fact.residual_diag, || format!("real instance {i}"));
        cone.record(inst.fact.residual_coneigen, || format!("real instance {i}"));
    }
    let mut check = Check::all(vec![
        Check::from_worst(&unitary, 1e-10, "unitarity"),
        Check::from_worst(&diag, 1e-8, "U A U^T - D"),
        Check::from_worst(&cone, 1e-8, "coneigen"),
        Check::from_worst(&eig, 1e-8, "real d vs |eigenvalues|"),
    ]);
    check.soft = redraw_note(redraws);
    check
}

fn coupled_reconstruction(rng: &mut ChaCha8Rng) -> Check {
    let mut redraws = 0;
    let mut worst = Worst::default();
    for i in 0..20 {
        let n = 1 + i % 8;
        let real = i % 4 == 3;
        let inst = takagi_instance(rng, n, real, &mut redraws);
        let horizon = 24;
        let f = if i % 2 == 0 {
            ControlSequence::delta(horizon).unwrap()
        } else {
            ControlSequence::new(
                (0..horizon)
                    .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect(),
            )
            .unwrap()
        };
        let field = simulate(&inst.coeffs, &f, Geometry::Interval(n)).unwrap();
        let cs = solve_coupled_c(&inst.data, &inst.data.d, &f).unwrap();
        let v = reconstruct_field(&inst.data, &cs);
        for (t, row) in v.iter().enumerate() {
            let scale = 1.0 + (1..=n).map(|j| field.get(j, t as isize).norm()).fold(0.0, f64::max);
            for (j, x) in row.iter().enumerate().take(n + 1).skip(1) {
                let err = (x - field.get(j, t as isize)).norm() / scale;
                worst.record(err, || format!("instance {i}, N={n}, n={j}, t={t}"));
            }
        }
    }
    let mut check = Check::from_worst(&worst, 1e-8, "|v - u|/(1+max|u_t|), T=24");
    check.soft = redraw_note(redraws);
    check
}

fn measure_representation(rng: &mut ChaCha8Rng) -> Check {
    let mut redraws = 0;
    let mut worst = Worst::default();
    for i in 0..20 {
        let n = 1 + i % 10;
        let inst = takagi_instance(rng, n, true, &mut redraws);
        let r = response_vector(&inst.coeffs, 2 * n, Geometry::Interval(n)).unwrap();
        let agreement = measure_agreement(&inst.data, &r.r, 1e-8);
        worst.record(agreement.max_relative_error(), || format!("real instance {i}, N={n}"));
    }
    let mut check = Check::from_worst(&worst, 1e-8, "real case, t <= 2N, error/(1+Σ|a0 T_t/ρ|)");

    let mut complex_first = Vec::new();
    for i in 0..20 {
        let n = 1 + i % 10;
        let inst = takagi_instance(rng, n, false, &mut redraws);
        let r = response_vector(&inst.coeffs, 2 * n, Geometry::Interval(n)).unwrap();
        let agreement = measure_agreement(&inst.data, &r.r, 1e-8);
        complex_first.push((n, agreement.first_failing_t));
    }
    let full = complex_first.iter().filter(|(_, f)| f.is_none()).count();
    let mut firsts: Vec<usize> = complex_first.iter().filter_map(|(_, f)| *f).collect();
    firsts.sort_unstable();
    check.soft.push(if firsts.is_empty() {
        format!("complex case: full agreement through t = 2N on all {} instances", complex_first.len())
    } else {
        format!(
            "complex case: full agreement on {full}/{} instances; first failing t ranges over {}..={} (per instance {})",
            complex_first.len(),
            firsts[0],
            firsts[firsts.len() - 1],
            complex_first
                .iter()
                .map(|(n, f)| match f {
                    Some(t) => format!("N={n}:t={t}"),
                    None => format!("N={n}:ok"),
                })
                .collect::<Vec<_>>()
                .join(" ")
        )
    });
    check.soft.extend(redraw_note(redraws));
    check
}

fn weight_identities(rng: &mut ChaCha8Rng) -> Check {
    let mut redraws = 0;
    let (mut sum, mut orth) = (Worst::default(), Worst::default());
    let mut rho_max = 0.0f64;
    for real in [false, true] {
        for (i, inst) in takagi_instances(rng, real, &mut redraws).iter().enumerate() {
            rho_max = inst.data.rho.iter().fold(rho_max, |m, r| m.max(*r));
            let total: f64 = inst.data.weights().iter().sum();
            let at = || format!("{} instance {i}", if real { "real" } else { "complex" });
            sum.record((total - 1.0).abs(), at);
            orth.record(inst.data.quasi_orthogonality_residual(), at);
        }
    }
    let mut check = Check::all(vec![
        Check::from_worst(&sum, 1e-10, "|Σ 1/ρ - 1|"),
        Check::from_worst(&orth, 1e-10, "quasi-orthogonality / sqrt(ρ_k ρ_i)"),
    ]);
    check.soft = redraw_note(redraws);
    check.soft.push(format!("largest ρ_k = {rho_max:.3e}"));
    check
}

fn growth_and_tails(rng: &mut ChaCha8Rng) -> Check {
    let mut growth_fail = None;
    let mut growth_checks = 0;
    let mut tails = Worst::default();
    for inst in 0..50 {
        let bound = [0.5, 1.0, 2.0][inst % 3];
        let k = random_coeffs(rng, 420, bound, inst % 5 == 4);
        let delta = ControlSequence::delta(40).unwrap();
        let env = GrowthEnvelope::new(bound);
        let profile = simulate(&k, &delta, Geometry::HalfLine).unwrap().growth_profile();
        growth_checks += profile.len();
        if let Some(t) = env.first_violation(&profile, k.a0()) {
            growth_fail.get_or_insert(format!("instance {inst}: M_{t} above (3B+1)^{t}"));
        }

        let region = RegionD::new(bound).unwrap();
        let r = response_vector(&k, 400, Geometry::HalfLine).unwrap();
        let lambda = random_lambda(rng, &region, 0.9);
        let full = series_partial_sum(&r, lambda, 400);
        for t in [1, 2, 5, 10, 20, 40, 80] {
            let dropped = (full - series_partial_sum(&r, lambda, t)).norm();
            let bound = tail_bound(&region, lambda, t).unwrap();
            tails.record(dropped / bound, || format!("instance {inst}, T={t}"));
        }
    }
    let growth = Check {
        passed: growth_fail.is_none(),
        detail: growth_fail.unwrap_or_else(|| format!("M_t <= (3B+1)^t on {growth_checks} samples, t <= 40")),
        soft: Vec::new(),
    };
    Check::all(vec![growth, Check::from_worst(&tails, 1.0, "dropped tail / tail_bound")])
}

fn region_consistency(_: &mut ChaCha8Rng) -> Check {
    let mut boundary = Worst::default();
    let mut mismatches = 0;
    let mut points = 0;
    for r_big in [2.0, 4.0, 10.0] {
        let region = RegionD::from_r(r_big).unwrap();
        for i in 0..360 {
            let phi = 2.0 * PI * (i as f64 + 0.5) / 360.0;
            let z = lambda_to_z(region.boundary_point(phi)).norm();
            boundary.record((z - 1.0 / r_big).abs(), || format!("R={r_big}, phi={phi:.3}"));
        }
        let (ax, ay) = (r_big + 1.0 / r_big, r_big - 1.0 / r_big);
        for i in 0..40 {
            for j in 0..25 {
                let x = -1.5 * ax + 3.0 * ax * (i as f64 + 0.5) / 40.0;
                let y = -1.5 * ay + 3.0 * ay * (j as f64 + 0.5) / 25.0;
                let lambda = c(x, y);
                points += 1;
                if (region.contraction(lambda) < 1.0) != region.outside_ellipse(lambda) {
                    mismatches += 1;
                }
            }
        }
    }
    let membership = Check {
        passed: mismatches == 0,
        detail: format!("membership vs ellipse exterior: {mismatches} mismatches on {points} points"),
        soft: Vec::new(),
    };
    Check::all(vec![Check::from_worst(&boundary, 1e-10, "||z(boundary)| - 1/R|"), membership])
}

fn wronskian_green(rng: &mut ChaCha8Rng) -> Check {
    let (mut wron, mut green) = (Worst::default(), Worst::default());
    for inst in 0..20 {
        let n = 1 + inst % 12;
        let k = random_coeffs(rng, n + 2, 1.0, false);
        let lambda = c(rng.gen_range(-3.0..3.0), rng.gen_range(0.2..3.0));

        let phi = phi_plus_finite(&k, lambda, n).unwrap();
        let (p, _) = solve_pq(&k, lambda, n + 1).unwrap();
        let w0 = wronskian(&k, &p, &phi, 0).unwrap();
        for j in 1..=n {
            let w = wronskian(&k, &p, &phi, j).unwrap();
            wron.record((w - w0).norm() / w0.norm(), || format!("instance {inst}, N={n}, n={j}"));
        }

        let m = assemble_finite(&k, n).unwrap().entries().clone();
        let shifted = m - DMatrix::<Complex>::identity(n, n) * lambda;
        let Some(inv) = shifted.clone().try_inverse() else {
            green.fail(format!("instance {inst}: singular block"));
            continue;
        };
        for i in 1..=n {
            for j in 1..=n {
                match green_function(&k, i, j, lambda, n) {
                    Ok(g) => {
                        let want = inv[(i - 1, j - 1)];
                        green.record((g - want).norm() / (1.0 + want.norm()), || {
                            format!("instance {inst}, N={n}, ({i},{j})")
                        });
                    }
                    Err(e) => green.fail(format!("instance {inst}: {e}")),
                }
            }
        }
    }
    Check::all(vec![
        Check::from_worst(&wron, 1e-10, "Wronskian W(p, phi+) relative drift"),
        Check::from_worst(&green, 1e-8, "Green vs dense inverse"),
    ])
}

fn moment_stabilization(rng: &mut ChaCha8Rng) -> Check {
    let mut redraws = 0;
    let mut worst = Worst::default();
    let mut complex_notes = Vec::new();
    for real in [true, false] {
        for i in 0..10 {
            let n = 1 + i % 8;
            // one coefficient list, two block sizes
            let (small, large) = loop {
                let coeffs = random_coeffs(rng, n + 4, 1.0, real);
                let build = |size| {
                    assemble_finite(&coeffs, size)
                        .and_then(|m| takagi_factorize(&m))
                        .and_then(|f| spectral_data(&f, coeffs.a0()))
                };
                match (build(n), build(n + 2)) {
                    (Ok(a), Ok(b)) => break (a, b),
                    _ => redraws += 1,
                }
            };
            let mut first_bad = None;
            for kk in 0..=(2 * n - 2) as u32 {
                let scale = 1.0
                    + small.omega.iter().zip(&small.rho).map(|(w, r)| w.norm().powi(kk as i32) / r).sum::<f64>();
                let err = (moments(&small, kk) - moments(&large, kk)).norm() / scale;
                if real {
                    worst.record(err, || format!("instance {i}, N={n}, k={kk}"));
                } else if err > 1e-8 && first_bad.is_none() {
                    first_bad = Some(kk);
                }
            }
            if !real {
                complex_notes.push(match first_bad {
                    Some(kk) => format!("N={n}:k={kk}"),
                    None => format!("N={n}:ok"),
                });
            }
        }
    }
    let mut check = Check::from_worst(&worst, 1e-8, "real case |s_k(N) - s_k(N+2)|/scale, k <= 2N-2");
    let ok = complex_notes.iter().filter(|s| s.ends_with("ok")).count();
    check.soft.push(format!(
        "complex case: moments stable through k = 2N-2 on {ok}/{} instances ({})",
        complex_notes.len(),
        complex_notes.join(" ")
    ));
    check.soft.extend(redraw_note(redraws));
    check
}
