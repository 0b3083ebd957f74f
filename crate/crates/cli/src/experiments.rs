//! One function per subcommand. Each writes its artifacts, then fails with
//! [`CliError::Accuracy`] if the command's own check did not pass.

use crate::config::{Command, ExperimentConfig, Potential, StencilChoice};
use crate::output::{write_csv, write_json, Column, Table};
use crate::CliError;
use hdlab::lab::{
    build_hamiltonian_dilrot, build_hamiltonian_harmonic, build_hamiltonian_inverted, commutator_check,
    divergence_scan, evolve, gaussian_packet, radial_gaussian, DiscreteOperator, EvolveReport, Grid1D, Grid2D,
    ScanObservable, Stencil, WaveState,
};
use hdlab::nonlocal::{
    audit, characteristic_residual, find_modes, mode_trajectory, partial_fraction_eval, phi, spectrum_generators,
    NonlocalParams, SpectrumGenerator,
};
use hdlab::propagator::{
    euclidean_pitfall, free_propagator, harmonic_propagator, inverted_propagator, spectral_identity, trotter_kernel,
    PotentialSign, Taper,
};
use hdlab::pu::{
    decouple, decouple_jacobian, fit_x_growth, hamiltonian_decoupled, hamiltonian_pu, hamiltonian_scale,
    integrate_flow, recouple, symplectic_defect, x_in_decoupled, x_observable, PUParams, PhaseState,
};
use hdlab::special::{cross_validate, inverted_eigenfunction, oscillator_factor, Branch, EigenLabel};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub artifacts: Vec<PathBuf>,
    /// one line for the terminal
    pub summary: String,
}

/// Runs the experiment named by `config.command`.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    let dir = config.output_dir();
    fs::create_dir_all(&dir)?;
    let c = config;
    match c.command {
        Command::PuClassical => pu_classical(c, &dir),
        Command::PuDecoupleCheck => pu_decouple_check(c, &dir),
        Command::PuXGrowth => pu_x_growth(c, &dir),
        Command::NonlocalModes => nonlocal_modes(c, &dir),
        Command::NonlocalResidues => nonlocal_residues(c, &dir),
        Command::NonlocalPfCheck => nonlocal_pf_check(c, &dir),
        Command::NonlocalTrajectory => nonlocal_trajectory(c, &dir),
        Command::NonlocalSpectrum => nonlocal_spectrum(c, &dir),
        Command::SfDCheck => sf_d_check(c, &dir),
        Command::SfEigenfunction => sf_eigenfunction(c, &dir),
        Command::PropagatorClosed => propagator_closed(c, &dir),
        Command::PropagatorTrotterConverge => propagator_trotter(c, &dir),
        Command::PropagatorSpectralIdentity => propagator_spectral(c, &dir),
        Command::PropagatorEuclidPitfall => propagator_euclid(c, &dir),
        Command::LabEvolve => lab_evolve(c, &dir),
        Command::LabDilrot => lab_dilrot(c, &dir),
        Command::LabDivergenceScan => lab_divergence(c, &dir),
        Command::LabCommutator => lab_commutator(c, &dir),
    }
}

fn pu_params(c: &ExperimentConfig) -> Result<PUParams, CliError> {
    Ok(PUParams::new(c.omega, c.hbar)?)
}

fn nonlocal_params(c: &ExperimentConfig) -> Result<NonlocalParams, CliError> {
    Ok(NonlocalParams::new(c.omega, c.delay, c.hbar)?)
}

fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if n < 2 {
        return Err(CliError::Config(format!("need at least 2 samples, got {n}")));
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

fn initial_state(c: &ExperimentConfig) -> Result<PhaseState, CliError> {
    match c.state.as_slice() {
        &[q1, q2, pi1, pi2] => Ok(PhaseState::new(q1, q2, pi1, pi2)),
        s => Err(CliError::Config(format!("state needs 4 entries (q1, q2, pi1, pi2), got {}", s.len()))),
    }
}

fn branch(c: &ExperimentConfig) -> Result<Branch, CliError> {
    Branch::from_sign(c.branch).map_err(|e| CliError::Config(e.to_string()))
}

/// Passes through `outcome` when `ok`, otherwise turns the summary into an
/// accuracy failure. Artifacts are already on disk either way.
fn gate(ok: bool, outcome: RunOutcome) -> Result<RunOutcome, CliError> {
    if ok {
        Ok(outcome)
    } else {
        Err(CliError::Accuracy(format!(
            "{} (artifacts: {})",
            outcome.summary,
            outcome.artifacts.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", ")
        )))
    }
}

fn done(artifacts: Vec<PathBuf>, summary: String) -> RunOutcome {
    RunOutcome { artifacts, summary }
}

fn pu_classical(c: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let p = pu_params(c)?;
    let s0 = initial_state(c)?;
    let ts = linspace(0.0, c.t_max, c.samples)?;
    let states = integrate_flow(&s0, &p, &ts, c.rtol)?;
    let e0 = hamiltonian_pu(&s0, &p);
    let mut table = Table::new(vec![
        Column::Real("t"),
        Column::Real("q1"),
        Column::Real("q2"),
        Column::Real("pi1"),
        Column::Real("pi2"),
        Column::Real("energy"),
        Column::Real("x_observable"),
    ]);
    let mut drift = 0.0f64;
    for (t, s) in ts.iter().zip(&states) {
        let e = hamiltonian_pu(s, &p);
        let scale = hamiltonian_scale(s, &p).max(hamiltonian_scale(&s0, &p)).max(f64::MIN_POSITIVE);
        drift = drift.max((e - e0).abs() / scale);
        table.push(vec![(*t).into(), s.q1.into(), s.q2.into(), s.pi1.into(), s.pi2.into(), e.into(), x_observable(s, &p).into()]);
    }
    let tol = c.tolerance.unwrap_or(1e-6);
    table.note("energy_drift", drift);
    let path = write_csv(dir, c, &table)?;
    gate(drift <= tol, done(vec![path], format!("{} samples, relative energy drift {drift:.3e} (tolerance {tol:e})", table.len())))
}

#[derive(Serialize)]
struct DecoupleCheck {
    trials: usize,
    max_energy_error: f64,
    max_x_error: f64,
    max_inverse_error: f64,
    symplectic_defect: f64,
    tolerance: f64,
    pass: bool,
}

fn pu_decouple_check(c: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let p = pu_params(c)?;
    let w = p.omega_cap;
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let (mut eh, mut ex, mut eb) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..c.trials {
        let s = PhaseState::from_array(std::array::from_fn(|_| rng.random_range(-2.0..2.0)));
        let d = decouple(&s, &p);
        let h = hamiltonian_pu(&s, &p);
        eh = eh.max((hamiltonian_decoupled(&d, &p) - h).abs() / hamiltonian_scale(&s, &p).max(h.abs()).max(f64::MIN_POSITIVE));
        let xs = s.pi1.abs() + w * s.pi2.abs() + w.powi(3) * s.q1.abs() + w * w * s.q2.abs();
        ex = ex.max((x_in_decoupled(&d, &p) - x_observable(&s, &p)).abs() / xs.max(f64::MIN_POSITIVE));
        for (a, b) in recouple(&d, &p).to_array().iter().zip(s.to_array()) {
            eb = eb.max((a - b).abs() / b.abs().max(1.0));
        }
    }
    let defect = symplectic_defect(&decouple_jacobian(&p));
    let tol = c.tolerance.unwrap_or(1e-12);
    let pass = eh.max(ex).max(eb).max(defect) <= tol;
    let r = DecoupleCheck {
        trials: c.trials,
        max_energy_error: eh,
        max_x_error: ex,
        max_inverse_error: eb,
        symplectic_defect: defect,
        tolerance: tol,
        pass,
    };
    let path = write_json(dir, c, &r)?;
    gate(
        pass,
        done(vec![path], format!("{} states: H {eh:.2e}, X {ex:.2e}, inverse {eb:.2e}, symplectic {defect:.2e}", c.trials)),
    )
}

fn pu_x_growth(c: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let p = pu_params(c)?;
    let s0 = initial_state(c)?;
    let fit = fit_x_growth(&s0, &p, c.samples)?;
    let ts = linspace(0.0, c.t_max, c.samples)?;
    let mut table = Table::new(vec![Column::Real("t"), Column::Real("x_observable")]);
    for (t, s) in ts.iter().zip(integrate_flow(&s0, &p, &ts, c.rtol)?) {
        table.push(vec![(*t).into(), x_observable(&s, &p).into()]);
    }
    let csv = write_csv(dir, c, &table)?;
    let json = write_json(dir, c, &fit)?;
    let err = (fit.rate - p.omega_cap).abs() / p.omega_cap;
    let tol = c.tolerance.unwrap_or(1e-6);
    gate(err <= tol, done(vec![csv, json], format!("growth rate {:.12} vs Ω = {}", fit.rate, p.omega_cap)))
}

#[derive(Serialize)]
struct ModesReport {
    decomposition: hdlab::nonlocal::ModeDecomposition,
    max_residual: f64,
    max_scaled_residual: f64,
    contours: Vec<hdlab::nonlocal::ContourAudit>,
}

fn nonlocal_modes(c: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let p = nonlocal_params(c)?;
    let d = find_modes(&p, c.pairs, c.search_radius)?;
    // |Φ| cannot drop below |Φ′|·ulp(z) ~ |z|²·ε, hence the max(1, |z|²) scale
    let (mut max_residual, mut max_scaled) = (0.0f64, 0.0f64);
    for z in d.roots() {
        let r = characteristic_residual(z, &p)?;
        max_residual = max_residual.max(r);
        max_scaled = max_scaled.max(r / z.norm_sqr().max(1.0));
    }
    let contours = audit(&d)?;
    let n = d.roots().len();
    let report = ModesReport { decomposition: d, max_residual, max_scaled_residual: max_scaled, contours };
    let path = write_json(dir, c, &report)?;
    let tol = c.tolerance.unwrap_or(1e-10);
    gate(
        max_scaled <= tol,
        done(vec![path], format!("{n} roots, max |Φ|/max(1, |z|²) {max_scaled:.2e} (tolerance {tol:e}), max |Φ| {max_residual:.2e}")),
    )
}

fn nonlocal_residues(c: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let p = nonlocal_params(c)?;
    let d = find_modes(&p, c.pairs, c.search_radius)?;
    let mut table = Table::new(vec![Column::Real("kind"), Column::Complex("z"), Column::Complex("eta")]);
    for m in &d.real_modes {
        table.push(vec!["real".into(), Complex64::new(0.0, m.omega_i).into(), Complex64::new(m.eta_i, 0.0).into()]);
    }
    for m in &d.complex_modes {
        table.push(vec!["complex".into(), m.zero().into(), m.eta_k.into()]);
    }
    table.note("inverse_square_sum", d.inverse_square_sum());
    table.note("tail_bound", d.tail_bound);
    let path = write_csv(dir, c, &table)?;
    Ok(done(vec![path], format!("{} real and {} complex modes", d.real_modes.len(), d.complex_modes.len())))
}

fn nonlocal_pf_check(c: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let p = nonlocal_params(c)?;
    let k_max = c.truncations.iter().copied().max().unwrap_or(0);
    let d = find_modes(&p, k_max.max(1), c.search_radius)?;
    // stay inside half the distance to the nearest pole
    let r = 0.5 * d.roots().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let points: Vec<Complex64> = (0..c.test_points)
        .map(|_| Complex64::from_polar(r * rng.random::<f64>().sqrt(), 2.0 * PI * rng.random::<f64>()))
        .collect();
    let mut table = Table::new(vec![Column::Real("K"), Column::Real("max_relative_error"), Column::Real("tail_bound")]);
    let mut errors = Vec::new();
    for &k in &c.truncations {
        let dk = d.truncated(k);
        let mut worst = 0.0f64;
        for &z in &points {
            let lhs = p.omega.powi(4) / phi(z, &p)?;
            worst = worst.max((partial_fraction_eval(&dk, z)? - lhs).norm() / lhs.norm());
        }
        errors.push(worst);
        table.push(vec![k.into(), worst.into(), dk.tail_bound.into()]);
    }
    table.note("sample_radius", r);
    let path = write_csv(dir, c, &table)?;
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    Ok(done(
        vec![path],
        format!("{} truncations, last error {:.2e}, monotone {monotone}", errors.len(), errors.last().copied().unwrap_or(f64::NAN)),
    ))
}

fn nonlocal_trajectory(c: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let p = nonlocal_params(c)?;
    let d = find_modes(&p, c.pairs, c.search_radius)?;
    let roots = d.roots();
    if c.mode >= roots.len() {
        return Err(CliError::Config(format!("mode {} out of range, {} roots stored", c.mode, roots.len())));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); roots.len()];
    amps[c.mode] = Complex64::new(1.0, 0.0);
    let ts = linspace(0.0, c.t_max, c.samples)?;
    let tr = mode_trajectory(&d, &amps, &ts)?;
    let mut table = Table::new(vec![Column::Real("t"), Column::Real("q"), Column::Real("residual")]);
    for i in 0..tr.t.len() {
        table.push(vec![tr.t[i].into(), tr.q[i].into(), tr.residual[i].into()]);
    }
    table.note("root", roots[c.mode]);
    let path = write_csv(dir, c, &table)?;
    let tol = c.tolerance.unwrap_or(1e-10);
    let worst = tr.max_residual();
    gate(worst <= tol, done(vec![path], format!("root {} , max residual {worst:.2e}", roots[c.mode])))
}

fn nonlocal_spectrum(c: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let p = nonlocal_params(c)?;
    let d = find_modes(&p, c.pairs, c.search_radius)?;
    let gens = spectrum_generators(&d);
    let mut table = Table::new(vec![
        Column::Real("generator"),
        Column::Real("kind"),
        Column::Real("a"),
        Column::Real("b"),
        Column::Real("n"),
        Column::Real("level"),
    ]);
    for (i, g) in gens.iter().enumerate() {
        let (kind, a, b) = match *g {
            SpectrumGenerator::Oscillator { sign, omega } => ("oscillator", sign as f64, omega),
            SpectrumGenerator::DilatationRotation { mu, nu } => ("dilatation_rotation", mu, nu),
        };
        for n in 0..c.levels as i64 {
            table.push(vec![i.into(), kind.into(), a.into(), b.into(), n.into(), g.level(n, 0.0, p.hbar)?.into()]);
        }
    }
    table.note("lambda", 0.0);
    let csv = write_csv(dir, c, &table)?;
    let json = write_json(dir, c, &gens)?;
    Ok(done(vec![csv, json], format!("{} generators", gens.len())))
}

fn sf_d_check(c: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let nu = Complex64::new(c.order_re, c.order_im);
    let dir_unit = Complex64::from_polar(1.0, c.angle.to_radians());
    let mut table = Table::new(vec![
        Column::Real("r"),
        Column::Complex("z"),
        Column::Complex("d"),
        Column::Complex("d_prime"),
        Column::Real("route"),
        Column::Real("error_estimate"),
        Column::Real("cross_difference"),
    ]);
    let mut worst = 0.0f64;
    for r in linspace(0.0, c.radius, c.samples)? {
        let z = r * dir_unit;
        let x = cross_validate(nu, z)?;
        let diff = x.relative_difference;
        worst = worst.max(diff.unwrap_or(0.0)).max(x.primary.error_estimate);
        table.push(vec![
            r.into(),
            z.into(),
            x.primary.value.into(),
            x.primary.derivative.into(),
            format!("{:?}", x.primary.route).as_str().into(),
            x.primary.error_estimate.into(),
            diff.into(),
        ]);
    }
    let path = write_csv(dir, c, &table)?;
    let tol = c.tolerance.unwrap_or(1e-8);
    gate(worst <= tol, done(vec![path], format!("ν = {nu}, worst route disagreement {worst:.2e} (tolerance {tol:e})")))
}

fn sf_eigenfunction(c: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let p = pu_params(c)?;
    let b = branch(c)?;
    let mut table = Table::new(vec![Column::Real("x"), Column::Real("oscillator"), Column::Complex("inverted")]);
    for x in linspace(-c.extent, c.extent, c.samples)? {
        table.push(vec![
            x.into(),
            oscillator_factor(c.level, x, &p).into(),
            inverted_eigenfunction(c.epsilon, b, x, &p)?.into(),
        ]);
    }
    let label = EigenLabel { n: c.level, epsilon: c.epsilon, branch: b };
    table.note("energy", label.energy(&p));
    let path = write_csv(dir, c, &table)?;
    Ok(done(vec![path], format!("n = {}, ε = {}, energy {}", c.level, c.epsilon, label.energy(&p))))
}

fn propagator_closed(c: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let mut table = Table::new(vec![
        Column::Real("x"),
        Column::Complex("inverted"),
        Column::Complex("harmonic"),
        Column::Complex("free"),
    ]);
    for x in linspace(-c.extent, c.extent, c.samples)? {
        table.push(vec![
            x.into(),
            inverted_propagator(x, c.y, c.time, c.omega, c.hbar)?.into(),
            harmonic_propagator(x, c.y, c.time, c.omega, c.hbar)?.into(),
            free_propagator(x, c.y, c.time, c.hbar)?.into(),
        ]);
    }
    let path = write_csv(dir, c, &table)?;
    Ok(done(vec![path], format!("K(x, {}; {}) at {} points", c.y, c.time, table.len())))
}

fn propagator_trotter(c: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let (sign, exact) = match c.potential {
        Potential::Inverted => (PotentialSign::Inverted, inverted_propagator(c.x, c.y, c.time, c.omega, c.hbar)?),
        Potential::Harmonic => (PotentialSign::Harmonic, harmonic_propagator(c.x, c.y, c.time, c.omega, c.hbar)?),
    };
    let mut table = Table::new(vec![Column::Real("N"), Column::Complex("kernel"), Column::Real("relative_error")]);
    let mut last = f64::NAN;
    for &n in &c.trotter_steps {
        let k = trotter_kernel(c.time, c.omega, c.hbar, n, sign)?.eval(c.x, c.y);
        last = (k - exact).norm() / exact.norm();
        table.push(vec![n.into(), k.into(), last.into()]);
    }
    table.note("exact", exact);
    let path = write_csv(dir, c, &table)?;
    let tol = c.tolerance.unwrap_or(1e-3);
    gate(last <= tol, done(vec![path], format!("error at the largest N {last:.3e} (tolerance {tol:e})")))
}

fn propagator_spectral(c: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let p = pu_params(c)?;
    let r = spectral_identity(c.energy, c.t_max, Taper { fraction: c.taper }, &p)?;
    let path = write_json(dir, c, &r)?;
    let warn = if r.tail_warning { ", tail warning" } else { "" };
    Ok(done(vec![path], format!("lhs/rhs = {:.8} at Ẽ = {}{warn}", r.ratio, r.e_tilde)))
}

fn propagator_euclid(c: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    if c.samples < 1 {
        return Err(CliError::Config("samples must be positive".into()));
    }
    let grid: Vec<f64> = (1..=c.samples).map(|i| c.t_max * i as f64 / c.samples as f64).collect();
    let r = euclidean_pitfall(&grid, c.omega, c.hbar)?;
    let mut table = Table::new(vec![Column::Real("tau"), Column::Complex("inverted"), Column::Real("harmonic")]);
    let nan = Complex64::new(f64::NAN, f64::NAN);
    for s in &r.samples {
        table.push(vec![s.tau.into(), s.inverted.unwrap_or(nan).into(), s.harmonic.into()]);
    }
    table.note("detected_period", r.detected_period.map_or("none".to_owned(), |v| v.to_string()));
    table.note("expected_period", r.expected_period);
    let csv = write_csv(dir, c, &table)?;
    let json = write_json(dir, c, &r)?;
    Ok(done(vec![csv, json], r.verdict.clone()))
}

#[derive(Serialize)]
struct EvolveSummary {
    dt: f64,
    steps: usize,
    total_drift: f64,
    max_step_drift: f64,
    stiffness: f64,
    max_boundary_mass: f64,
    contaminated: bool,
    initial_second_moment: f64,
    final_second_moment: f64,
}

fn write_evolution(
    c: &ExperimentConfig,
    dir: &Path,
    initial: &WaveState,
    r: &EvolveReport,
) -> Result<RunOutcome, CliError> {
    let mut table = Table::new(vec![Column::Real("step"), Column::Real("t"), Column::Real("norm")]);
    for (k, n) in r.norms.iter().enumerate() {
        table.push(vec![k.into(), (k as f64 * r.dt).into(), (*n).into()]);
    }
    let csv = write_csv(dir, c, &table)?;
    let summary = EvolveSummary {
        dt: r.dt,
        steps: r.steps,
        total_drift: r.total_drift,
        max_step_drift: r.max_step_drift,
        stiffness: r.stiffness,
        max_boundary_mass: r.max_boundary_mass,
        contaminated: r.contaminated,
        initial_second_moment: initial.second_moment(),
        final_second_moment: r.state.second_moment(),
    };
    let json = write_json(dir, c, &summary)?;
    let tol = c.tolerance.unwrap_or(1e-8);
    gate(
        r.total_drift <= tol && !r.contaminated,
        done(
            vec![csv, json],
            format!(
                "{} steps, norm drift {:.2e} (tolerance {tol:e}), boundary mass {:.2e}",
                r.steps, r.total_drift, r.max_boundary_mass
            ),
        ),
    )
}

fn lab_evolve(c: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let g = Grid1D::new(c.extent, c.points)?;
    let h = match c.potential {
        Potential::Inverted => build_hamiltonian_inverted(g, c.omega, c.hbar)?,
        Potential::Harmonic => build_hamiltonian_harmonic(g, c.omega, c.hbar)?,
    };
    let s = gaussian_packet(g, c.x0, c.sigma, c.p0)?;
    let r = evolve(&s, &DiscreteOperator::from(h), c.dt, c.steps, c.hbar)?;
    write_evolution(c, dir, &s, &r)
}

fn lab_dilrot(c: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let g = Grid2D::new(c.extent, c.points)?;
    let d = build_hamiltonian_dilrot(g, c.mu, c.nu, c.hbar)?;
    let s = radial_gaussian(g, c.sigma)?;
    let r = evolve(&s, &DiscreteOperator::from(d), c.dt, c.steps, c.hbar)?;
    write_evolution(c, dir, &s, &r)
}

fn lab_divergence(c: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let p = pu_params(c)?;
    let b = branch(c)?;
    let bra = EigenLabel { n: c.level, epsilon: c.epsilon_bra, branch: b };
    let ket = EigenLabel { n: c.level, epsilon: c.epsilon, branch: b };
    let observable = match c.control_width {
        Some(width) => ScanObservable::DampedControl { width },
        None => ScanObservable::Position,
    };
    let scan = divergence_scan(&bra, &ket, &c.cutoffs, observable, &p)?;
    let mut table = Table::new(vec![
        Column::Real("cutoff"),
        Column::Complex("value"),
        Column::Real("magnitude"),
        Column::Real("increment"),
    ]);
    for r in &scan.rows {
        table.push(vec![r.cutoff.into(), r.value.into(), r.magnitude.into(), r.increment.into()]);
    }
    table.note("verdict", format!("{:?}", scan.verdict).to_lowercase());
    let csv = write_csv(dir, c, &table)?;
    let json = write_json(dir, c, &scan)?;
    Ok(done(vec![csv, json], format!("verdict {:?}", scan.verdict)))
}

fn lab_commutator(c: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let p = pu_params(c)?;
    let stencil = match c.stencil {
        StencilChoice::Second => Stencil::Second,
        StencilChoice::Eighth => Stencil::Eighth,
    };
    let r = commutator_check(&p, Grid1D::new(c.extent, c.points)?, stencil)?;
    let path = write_json(dir, c, &r)?;
    let tol = c.tolerance.unwrap_or(1e-6);
    gate(r.residual <= tol, done(vec![path], format!("interior residual {:.3e} (tolerance {tol:e})", r.residual)))
}
