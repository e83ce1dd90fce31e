//! One table-producing function per subcommand.

use std::f64::consts::PI;

use num_complex::Complex64;
use thermofock::chain::{
    continuum_limit_error, convergence_ratios, dense_frequencies, energy_drift, gibbs_sample, hamiltonian, leapfrog,
    mode_transform, nonrelativistic_overlap, normal_modes, shadow_energy, standard_packet, ChainSpec,
};
use thermofock::charfn::{
    autocorrelation_charfn, characteristic_function, default_t_grid, density_from_amplitude, GridWaveFunction,
    UniformGrid,
};
use thermofock::fock::{
    energy_level, hamiltonian_apply, hermite_function, inner_product, kernel_overlap, lower, quadrature_inner_product,
    raise, FockVector, DEFAULT_ANGULAR_NODES, DEFAULT_RADIAL_NODES,
};
use thermofock::measurement::{
    decohere, entangle, purity, reduced_density, sample_outcomes, DensityMatrix, SectorStructure, Subsystem,
};
use thermofock::sphere::{
    gibbs_normalization_check, limit_ratios_at, mean_energy, planck_density, pushforward_ks, pushforward_ks_sin2,
    rayleigh_jeans_density, wien_density, EnergyMethod, PlanckConstants, SphereGeometry, ThermalOscillator,
};
use thermofock::states::{
    circle_uncertainty, exotic_state, rms_widths, singlet_marginal, site_density, two_particle_state, Interval,
    ModeProfile,
};
use thermofock::toy::{
    interference_demo, markov_feasibility, probabilities, quantum_step, Certificate, Constraint, Feasibility,
    StochasticMatrix, ToyUnitary,
};

use crate::config::RunConfig;
use crate::output::{Cell, Table};
use crate::CliError;

pub fn run(cfg: &RunConfig) -> Result<Table, CliError> {
    match cfg.command.as_str() {
        "fock" => fock(cfg),
        "sphere" => sphere(cfg),
        "spectrum" => spectrum(cfg),
        "chain" => chain(cfg),
        "charfn" => charfn(cfg),
        "states" => states(cfg),
        "measure" => measure(cfg),
        "toy" => toy(cfg),
        other => Err(CliError::Usage(format!("unknown subcommand `{other}`"))),
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j { 1.0 } else { 0.0 }
}

fn fock(cfg: &RunConfig) -> Result<Table, CliError> {
    let n_max = cfg.count("nmax", 0)?;
    let hbar = cfg.float("hbar");
    let omega = cfg.float("omega");
    let mut t = Table::new(
        "(Z_n, Z_m) = δ_nm by Gauss–Laguerre quadrature of z^n conj(z)^m e^{-|z|²/ħ}; [a, a⁺] = ħ; \
         H Z_n = ωħ(n + ½) Z_n; ∫ U(z, q) conj U(z', q) dq = e^{z conj(z')} at ħ = 1",
        &["check", "i", "j", "value", "target", "defect"],
    );
    let basis: Vec<FockVector> =
        (0..=n_max).map(|n| FockVector::basis(n, n_max, hbar)).collect::<Result<_, _>>()?;
    let mut worst = [0.0f64; 4];
    for (n, zn) in basis.iter().enumerate() {
        for (m, zm) in basis.iter().enumerate() {
            let ip = quadrature_inner_product(zn, zm, DEFAULT_RADIAL_NODES, DEFAULT_ANGULAR_NODES)?;
            let d = (ip - delta(n, m)).norm();
            worst[0] = worst[0].max(d);
            t.push(vec!["orthonormality".into(), n.into(), m.into(), ip.re.into(), delta(n, m).into(), d.into()]);
        }
    }
    for n in 0..=n_max {
        // one spare slot so that a⁺ does not leave the truncation
        let z = FockVector::basis(n, n_max + 1, hbar)?;
        let comm = lower(&raise(&z)?).sub(&raise(&lower(&z))?);
        let d = comm.sub(&z.scale(c(hbar, 0.0))).max_abs();
        worst[1] = worst[1].max(d);
        t.push(vec!["commutator".into(), n.into(), n.into(), comm.coeffs[n].re.into(), hbar.into(), d.into()]);
    }
    for (n, zn) in basis.iter().enumerate() {
        let e = inner_product(&hamiltonian_apply(zn, omega), zn)?.re;
        let target = omega * hbar * (n as f64 + 0.5);
        let d = (e - target).abs().max((energy_level(n, omega, hbar, 1.0)? - target).abs());
        worst[2] = worst[2].max(d);
        t.push(vec!["energy".into(), n.into(), n.into(), e.into(), target.into(), d.into()]);
    }
    let grid = UniformGrid::symmetric(14.0, 561)?;
    let points: Vec<Complex64> = (0..5)
        .map(|i| {
            let r = 0.5 * i as f64;
            Complex64::from_polar(r, 0.7 * i as f64)
        })
        .collect();
    for (i, &z) in points.iter().enumerate() {
        for (j, &zp) in points.iter().enumerate() {
            let k = kernel_overlap(z, zp, grid)?;
            let target = (z * zp.conj()).exp();
            let d = (k - target).norm();
            worst[3] = worst[3].max(d);
            t.push(vec!["kernel".into(), i.into(), j.into(), k.re.into(), target.re.into(), d.into()]);
        }
    }
    for (name, w) in ["orthonormality", "commutator", "energy", "kernel"].iter().zip(worst) {
        t.note(&format!("max_defect_{name}"), w);
    }
    Ok(t)
}

fn sphere(cfg: &RunConfig) -> Result<Table, CliError> {
    let beta = cfg.float("beta");
    let omega = cfg.float("omega");
    let n = cfg.count("samples", 1)?;
    let radius = cfg.float("radius");
    let osc = ThermalOscillator::matched(beta, omega, cfg.float("mass"))?;
    let mut t = Table::new(
        "h^{-1} ∫ e^{-βH} dq dp = 1 and mean energy 1/β at βħω = 2π; sphere-to-plane maps pushed forward \
         to 1 - e^{-βr²} (KS statistic; reference is the 5% critical value)",
        &["quantity", "value", "reference", "stderr"],
    );
    let norm = gibbs_normalization_check(&osc);
    t.push(vec!["gibbs_norm_analytic".into(), norm.analytic.into(), 1.0.into(), Cell::Empty]);
    t.push(vec!["gibbs_norm_quadrature".into(), norm.quadrature.into(), 1.0.into(), Cell::Empty]);
    let analytic = mean_energy(&osc, EnergyMethod::Analytic)?;
    t.push(vec!["mean_energy_analytic".into(), analytic.value.into(), (1.0 / beta).into(), Cell::Empty]);
    let mc = mean_energy(&osc, EnergyMethod::MonteCarlo { samples: n, seed: cfg.seed })?;
    t.push(vec!["mean_energy_monte_carlo".into(), mc.value.into(), (1.0 / beta).into(), mc.stderr.into()]);
    let critical = 1.358 / (n as f64).sqrt();
    let ks = pushforward_ks(beta, n, cfg.seed)?;
    t.push(vec!["ks_exact_map".into(), ks.into(), critical.into(), Cell::Empty]);
    let ks2 = pushforward_ks_sin2(radius, beta, n, cfg.seed)?;
    t.push(vec!["ks_sin2_map".into(), ks2.into(), critical.into(), Cell::Empty]);
    let geom = SphereGeometry::new(radius)?;
    t.push(vec!["sphere_hbar".into(), geom.hbar().into(), (2.0 * radius * radius).into(), Cell::Empty]);
    t.push(vec!["sphere_matched_beta".into(), geom.matched_beta(omega).into(), Cell::Empty, Cell::Empty]);
    t.note("hbar", osc.hbar);
    t.note("normalized", norm.normalized);
    t.note("monte_carlo_sigma", (mc.value - 1.0 / beta) / mc.stderr);
    Ok(t)
}

fn spectrum(cfg: &RunConfig) -> Result<Table, CliError> {
    let (lo, hi) = (cfg.float("tmin"), cfg.float("tmax"));
    let points = cfg.count("points", 2)?;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(CliError::Usage(format!("need 0 < tmin < tmax, got {lo} and {hi}")));
    }
    let mut t = Table::new(
        "u(ν, T) = (8πhν³/c³)/(e^{hν/kT} - 1) against the Wien and Rayleigh–Jeans limits, h = c = k = T = 1",
        &["x", "planck", "wien", "rayleigh_jeans", "planck_over_wien", "planck_over_rayleigh_jeans"],
    );
    let k = PlanckConstants::default();
    for i in 0..points {
        let x = if i == points - 1 { hi } else { lo * (hi / lo).powf(i as f64 / (points - 1) as f64) };
        let (rw, rrj) = limit_ratios_at(x)?;
        t.push(vec![
            x.into(),
            planck_density(x, 1.0, k)?.into(),
            wien_density(x, 1.0, k).into(),
            rayleigh_jeans_density(x, 1.0, k).into(),
            rw.into(),
            rrj.into(),
        ]);
    }
    let (first, last) = (limit_ratios_at(lo)?, limit_ratios_at(hi)?);
    t.note("planck_over_rayleigh_jeans_at_tmin", first.1);
    t.note("planck_over_wien_at_tmax", last.0);
    Ok(t)
}

fn chain(cfg: &RunConfig) -> Result<Table, CliError> {
    let spec = ChainSpec::new(cfg.count("sites", 1)?, cfg.float("spacing"), cfg.float("mass"), cfg.float("gamma"))?;
    let dt = match cfg.float("dt") {
        0.0 => spec.default_dt(),
        dt => dt,
    };
    match cfg.text("experiment") {
        "dispersion" => {
            let mut t = Table::new(
                "ω² = m² + 4γ sin²(ka/2) against eigenvalues of the dense coupling matrix, both sorted",
                &["rank", "omega_formula", "omega_dense", "abs_error"],
            );
            let mut formula = normal_modes(&spec).frequencies;
            formula.sort_by(f64::total_cmp);
            let dense = dense_frequencies(&spec);
            let mut worst = 0.0f64;
            for (r, (f, d)) in formula.iter().zip(&dense).enumerate() {
                worst = worst.max((f - d).abs());
                t.push(vec![r.into(), (*f).into(), (*d).into(), (f - d).abs().into()]);
            }
            t.note("max_abs_error", worst);
            Ok(t)
        }
        "equipartition" => {
            let n = cfg.count("samples", 2)?;
            let beta = cfg.float("beta");
            let samples = gibbs_sample(&spec, beta, n, cfg.seed)?;
            let modes = normal_modes(&spec);
            let mut sum = vec![0.0; spec.sites];
            let mut sum_sq = vec![0.0; spec.sites];
            let mut total = 0.0;
            for s in &samples {
                let e = mode_transform(s, &spec)?.mode_energies();
                for (j, ej) in e.iter().enumerate() {
                    sum[j] += ej;
                    sum_sq[j] += ej * ej;
                }
                total += hamiltonian(s, &spec)?;
            }
            let mut t = Table::new(
                "thermal samples of e^{-βH}: each normal mode carries mean energy 1/β",
                &["j", "k", "omega", "mean_energy", "stderr", "target"],
            );
            let nf = n as f64;
            for j in 0..spec.sites {
                let mean = sum[j] / nf;
                let var = (sum_sq[j] / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
                t.push(vec![
                    j.into(),
                    modes.wavenumbers[j].into(),
                    modes.frequencies[j].into(),
                    mean.into(),
                    (var / nf).sqrt().into(),
                    (1.0 / beta).into(),
                ]);
            }
            t.note("mean_total_energy", total / nf);
            t.note("target_total_energy", spec.sites as f64 / beta);
            Ok(t)
        }
        "continuum" => {
            let a0 = cfg.float("spacing");
            let spacings: Vec<f64> = (0..5).map(|i| a0 / f64::powi(2.0, i)).collect();
            let rows = continuum_limit_error(cfg.float("mass"), cfg.float("window"), &spacings)?;
            let ratios = convergence_ratios(&rows);
            let mut t = Table::new(
                "chain dispersion at γ = 1/a² against √(m² + k²) on |k| ≤ window; error ratio 4 per halving",
                &["spacing", "max_error", "ratio_to_previous"],
            );
            for (i, (a, err)) in rows.iter().enumerate() {
                let r = if i == 0 { Cell::Empty } else { ratios[i - 1].into() };
                t.push(vec![(*a).into(), (*err).into(), r]);
            }
            Ok(t)
        }
        "nonrel" => {
            let mass = cfg.float("packet_mass");
            let t_end = cfg.float("t");
            let packet = standard_packet();
            let mut t = Table::new(
                "|⟨ψ_S(t)|ψ_K(t)⟩| between free Schrödinger and positive-energy Klein–Fock–Gordon evolution",
                &["t", "overlap"],
            );
            for i in 0..=10 {
                let ti = t_end * i as f64 / 10.0;
                t.push(vec![ti.into(), nonrelativistic_overlap(&packet, mass, ti)?.into()]);
            }
            Ok(t)
        }
        "energy" => {
            let steps = cfg.count("steps", 1)?;
            let init = gibbs_sample(&spec, cfg.float("beta"), 1, cfg.seed)?.remove(0);
            let stride = (steps / 20).max(1);
            let mut rows = Vec::new();
            let mut step = 0usize;
            leapfrog(&init, &spec, dt, steps, |s| {
                if step.is_multiple_of(stride) || step == steps {
                    rows.push((step, s.clone()));
                }
                step += 1;
            })?;
            let mut t = Table::new(
                "leapfrog energy: the shadow Hamiltonian H + O(dt²) is conserved to rounding, H oscillates",
                &["step", "time", "hamiltonian", "shadow_energy"],
            );
            for (k, s) in rows {
                t.push(vec![
                    k.into(),
                    (k as f64 * dt).into(),
                    hamiltonian(&s, &spec)?.into(),
                    shadow_energy(&s, &spec, dt)?.into(),
                ]);
            }
            let drift = energy_drift(&init, &spec, dt, steps)?;
            t.note("dt", dt);
            t.note("shadow_relative_drift", drift.shadow_relative);
            t.note("hamiltonian_relative_drift", drift.hamiltonian_relative);
            Ok(t)
        }
        other => Err(CliError::Usage(format!(
            "unknown chain experiment `{other}`; use dispersion, equipartition, continuum, nonrel or energy"
        ))),
    }
}

fn charfn(cfg: &RunConfig) -> Result<Table, CliError> {
    let grid = UniformGrid::symmetric(cfg.float("half_width"), cfg.count("points", 2)?)?;
    let (x0, k0) = (cfg.float("center"), cfg.float("k0"));
    let carrier = move |x: f64| Complex64::from_polar(1.0, k0 * x);
    let psi = match cfg.text("state") {
        "gaussian" => {
            let s = cfg.float("sigma");
            GridWaveFunction::from_fn(grid, |x| carrier(x) * (-(x - x0).powi(2) / (4.0 * s * s)).exp())
        }
        "hermite" => {
            let n = cfg.count("n", 0)?;
            hermite_function(n, 0.0)?;
            GridWaveFunction::from_fn(grid, |x| carrier(x) * hermite_function(n, x - x0).unwrap_or(0.0))
        }
        other => return Err(CliError::Usage(format!("unknown state `{other}`; use gaussian or hermite"))),
    };
    let psi = psi.normalized()?;
    let tg = default_t_grid();
    let direct = characteristic_function(&density_from_amplitude(&psi)?, tg);
    let auto = autocorrelation_charfn(&psi, tg)?;
    let mut t = Table::new(
        "f(t) = ∫ e^{itx} |ψ(x)|² dx directly and as ∫ conj(ψ̂(ξ)) ψ̂(ξ + t) dξ",
        &["t", "re_direct", "im_direct", "re_autocorrelation", "im_autocorrelation", "difference"],
    );
    for (i, (d, a)) in direct.values.iter().zip(&auto.values).enumerate() {
        t.push(vec![tg.point(i).into(), d.re.into(), d.im.into(), a.re.into(), a.im.into(), (d - a).norm().into()]);
    }
    t.note("max_difference", direct.max_difference(&auto));
    Ok(t)
}

fn bump(x0: f64, w: f64) -> impl Fn(f64) -> Complex64 {
    move |x| {
        let u = (x - x0) / w;
        c(if u.abs() < 1.0 { (0.5 * PI * u).cos().powi(2) } else { 0.0 }, 0.0)
    }
}

fn states(cfg: &RunConfig) -> Result<Table, CliError> {
    match cfg.text("experiment") {
        "uncertainty" => {
            let grid = UniformGrid::symmetric(cfg.float("half_width"), cfg.count("points", 2)?)?;
            let mut t = Table::new(
                "Δx Δk ≥ ½ on Hermite functions, whose product is n + ½",
                &["n", "dx", "dk", "product", "expected"],
            );
            for n in 0..=cfg.count("nmax", 0)? {
                hermite_function(n, 0.0)?;
                let psi = GridWaveFunction::from_fn(grid, |x| c(hermite_function(n, x).unwrap_or(0.0), 0.0));
                let (dx, dk) = rms_widths(&psi.normalized()?)?;
                t.push(vec![n.into(), dx.into(), dk.into(), (dx * dk).into(), (n as f64 + 0.5).into()]);
            }
            t.note("lower_bound", 0.5);
            Ok(t)
        }
        "circle" => {
            let mmax = cfg.count("mmax", 0)? as i64;
            let mut t = Table::new(
                "momentum eigenstates e^{imφ} on the circle: Δp = 0 with Δφ bounded by the circle",
                &["m", "dp", "dphi_rms", "dphi_support"],
            );
            for m in -mmax..=mmax {
                let u = circle_uncertainty(m);
                t.push(vec![m.into(), u.momentum.into(), u.angle_rms.into(), u.angle_support.into()]);
            }
            Ok(t)
        }
        "exotic" => {
            let f1 = ModeProfile::new(vec![c(0.4, 0.1), c(0.5, -0.2), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])?;
            let f2 = ModeProfile::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.3, 0.3), c(0.0, 0.0), c(-0.6, 0.0)])?;
            let hbar = 1.0;
            let exotic = exotic_state(&f1, &f2, hbar)?;
            let two = two_particle_state(&f1, &f2, hbar)?;
            let (m1, v1) = exotic.number_moments()?;
            let (m2, v2) = two.number_moments()?;
            let mut t = Table::new(
                "disjointly supported profiles: (a⁺(f1) + a⁺(f2))|0⟩ is one particle, a⁺(f1)a⁺(f2)|0⟩ is two",
                &["quantity", "value", "expected"],
            );
            let norm_sum = f1.norm_sqr() + f2.norm_sqr();
            t.push(vec!["exotic_norm_sqr".into(), exotic.norm_sqr().into(), norm_sum.into()]);
            t.push(vec!["exotic_mean_number".into(), m1.into(), 1.0.into()]);
            t.push(vec!["exotic_number_variance".into(), v1.into(), 0.0.into()]);
            t.push(vec!["two_particle_norm_sqr".into(), two.norm_sqr().into(), (f1.norm_sqr() * f2.norm_sqr()).into()]);
            t.push(vec!["two_particle_mean_number".into(), m2.into(), 2.0.into()]);
            t.push(vec!["two_particle_number_variance".into(), v2.into(), 0.0.into()]);
            t.push(vec!["profile_overlap".into(), f1.overlap(&f2)?.into(), 0.0.into()]);
            let dens = site_density(&two)?;
            for (i, d) in dens.iter().enumerate() {
                let expected = f1.coeffs()[i].norm_sqr() * f2.norm_sqr() + f2.coeffs()[i].norm_sqr() * f1.norm_sqr();
                t.push(vec![format!("two_particle_density_site_{i}").into(), (*d).into(), expected.into()]);
            }
            Ok(t)
        }
        "singlet" => {
            let g = UniformGrid::symmetric(12.0, 481)?;
            let a = GridWaveFunction::from_fn(g, bump(-6.0, 3.0)).normalized()?;
            let b = GridWaveFunction::from_fn(g, bump(5.0, 2.0)).normalized()?;
            let (marginal, mass) = singlet_marginal(&a, &b, Interval::new(-10.0, 0.0)?)?;
            let mut t = Table::new(
                "antisymmetrized pair of disjoint bumps: marginal density is (|f1|² + |f2|²)/2, mass ½ on x < 0",
                &["x", "marginal", "closed_form", "difference"],
            );
            for (i, m) in marginal.values.iter().enumerate() {
                let cf = 0.5 * (a.values[i].norm_sqr() + b.values[i].norm_sqr());
                t.push(vec![g.point(i).into(), (*m).into(), cf.into(), (m - cf).abs().into()]);
            }
            t.note("region", "[-10, 0]");
            t.note("region_mass", mass);
            Ok(t)
        }
        other => Err(CliError::Usage(format!(
            "unknown states experiment `{other}`; use uncertainty, exotic, singlet or circle"
        ))),
    }
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("invalid {what} entry `{}`", x.trim()))))
        .collect()
}

fn measure(cfg: &RunConfig) -> Result<Table, CliError> {
    let amps: Vec<Complex64> = parse_list(cfg.text("amps"), "amplitude")?.into_iter().map(|a| c(a, 0.0)).collect();
    let sectors = match cfg.text("sectors").trim() {
        "" => SectorStructure::singletons(amps.len()),
        s => SectorStructure::parse(s)?,
    };
    let state = entangle(&amps, amps.len(), sectors.dim())?;
    let before = DensityMatrix::pure(&amps)?;
    let reduced = reduced_density(&state, Subsystem::Apparatus)?;
    let rho = decohere(&reduced, &sectors)?;
    let table = sample_outcomes(&rho, cfg.count("samples", 1)?, cfg.seed)?;
    let mut t = Table::new(
        "object amplitudes c_k copied into apparatus pointer states: after decoherence ρ_kk = |c_k|², sampled frequencies",
        &["k", "amplitude_sqr", "rho_kk", "frequency", "stderr", "deviation_sigma"],
    );
    let (freq, se, dev) = (table.frequencies(), table.standard_errors(), table.deviations());
    for k in 0..rho.dim() {
        let a = amps.get(k).map_or(0.0, |a| a.norm_sqr());
        t.push(vec![k.into(), a.into(), rho.entry(k, k).re.into(), freq[k].into(), se[k].into(), dev[k].into()]);
    }
    t.note("purity_before", purity(&before));
    t.note("purity_reduced", purity(&reduced));
    t.note("purity_after", purity(&rho));
    t.note("schmidt_rank", state.schmidt_rank());
    t.note("max_deviation_sigma", dev.iter().copied().fold(0.0, f64::max));
    Ok(t)
}

fn parse_matrix(s: &str) -> Result<ToyUnitary, CliError> {
    let s = s.trim();
    if s == "hadamard" {
        return Ok(ToyUnitary::hadamard());
    }
    let body = s.strip_prefix("custom").map_or(s, |r| r.trim_start_matches([':', ' ']));
    match parse_list(body, "matrix")?.as_slice() {
        &[a, b, cc, d] => Ok(ToyUnitary::from_real(a, b, cc, d)?),
        v => Err(CliError::Usage(format!("--matrix needs hadamard or four entries, got {}", v.len()))),
    }
}

fn describe(f: &Feasibility, constraints: &[Constraint]) -> String {
    let fmt = |w: &StochasticMatrix| {
        let e = w.entries();
        format!("[[{}, {}], [{}, {}]]", e[0][0], e[0][1], e[1][0], e[1][1])
    };
    match f {
        Feasibility::Feasible(w) => format!("feasible: w = {}", fmt(w)),
        Feasibility::Infeasible(Certificate::Forced { w, constraint, residual, .. }) => format!(
            "infeasible: one-step data force w = {}, which misses the {}-step constraint by {residual:e}",
            fmt(w),
            constraints[*constraint].steps
        ),
        Feasibility::Infeasible(Certificate::GridBound { min_residual, margin }) => {
            format!("infeasible: every w misses by at least {:e}", min_residual - margin)
        }
        Feasibility::Infeasible(cert) => format!("infeasible: {cert:?}"),
        Feasibility::Inconclusive { best, residual } => {
            format!("inconclusive: best w = {} with residual {residual:e}", fmt(best))
        }
    }
}

fn toy(cfg: &RunConfig) -> Result<Table, CliError> {
    let steps = cfg.count("steps", 0)?;
    let steps = u32::try_from(steps).map_err(|_| CliError::Usage(format!("--steps too large: {steps}")))?;
    let s = parse_matrix(cfg.text("matrix"))?;
    let rows = interference_demo(&s, steps);
    let mut t = Table::new(
        "site probabilities after repeated unitary steps against the Markov chain fitted to one step; gap is total variation",
        &["step", "quantum_p1", "quantum_p2", "markov_p1", "markov_p2", "gap"],
    );
    for r in &rows {
        t.push(vec![
            (r.step as usize).into(),
            r.quantum[0].into(),
            r.quantum[1].into(),
            r.markov[0].into(),
            r.markov[1].into(),
            r.gap.into(),
        ]);
    }
    // can any single Markov matrix reproduce the whole quantum table?
    let constraints: Vec<Constraint> = [[1.0, 0.0], [0.0, 1.0]]
        .iter()
        .flat_map(|&input| {
            let mut psi = [c(input[0], 0.0), c(input[1], 0.0)];
            let mut out = Vec::new();
            for k in 1..=steps {
                psi = quantum_step(psi, &s).expect("unitary step");
                out.push((input, k, probabilities(psi)));
            }
            out
        })
        .map(|(input, k, p)| Constraint::new(input, k, p))
        .collect::<Result<_, _>>()?;
    let verdict = markov_feasibility(&constraints);
    if let Feasibility::Infeasible(cert) = &verdict {
        t.note("certificate_verified", cert.verify(&constraints));
    }
    t.note("markov_fit", describe(&verdict, &constraints));
    t.note("max_gap", rows.iter().map(|r| r.gap).fold(0.0, f64::max));
    Ok(t)
}
