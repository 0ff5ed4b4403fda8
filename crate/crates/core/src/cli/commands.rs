use std::fs;
use std::path::Path;
use std::sync::Arc;

use super::{fmt_f, Command, ExperimentConfig, Outcome, Output, Status};
use crate::error::{Error, Result};
use crate::norms::{
    lebesgue_norm, mixed_norm_from_series, strichartz_norm_of_samples, FamilyKind, NormSpec, StrichartzFamily,
};
use crate::pairs::{
    lemma32_exponents, lemma33_exponents, lemma41_exponents, parse_pairs_file, Lemma, LemmaExponentReport, Smallness,
};
use crate::probes::{
    conservation_probe, dynamic_scaling_check, gradient_estimate_probe, hl_gn_function_probe, perturbation_experiment,
    pointwise_estimate_probe, static_scaling_check, static_scaling_converges, strichartz_probe, ForcingFn,
    FunctionInequality, PerturbationConfig, ScalingCheckConfig, SPREAD_THRESHOLD,
};
use crate::rational::{fmt_q, int, to_f64, Q};
use crate::regime::{check_theorem, critical_index, Criticality, Lambda, ProblemParams, TheoremId};
use crate::solver::{evolve, picard_iterate, InitialData, Scheme, SolverConfig, Trajectory};
use crate::spectral::{read_field, write_field, ComplexField, Grid};

pub(super) fn dispatch(cmd: &Command, cfg: &ExperimentConfig, out: &Output) -> Result<Outcome> {
    match cmd {
        Command::Classify { .. } => classify(cfg, out),
        Command::Pairs { .. } => pairs(cfg, out),
        Command::Simulate { .. } => simulate(cfg, out),
        Command::Picard { .. } => picard(cfg, out),
        Command::Norm { .. } => norm(cfg, out),
        Command::Strichartz { .. } => strichartz(cfg, out),
        Command::ScalingTest { .. } => scaling_test(cfg, out),
        Command::ConserveTest { .. } => conserve_test(cfg, out),
        Command::EstimateProbe { .. } => estimate_probe(cfg, out),
        Command::StrichartzProbe { .. } => strichartz_probe_cmd(cfg, out),
        Command::Perturb { .. } => perturb(cfg, out),
    }
}

fn dim(cfg: &ExperimentConfig) -> Result<u32> {
    let d = cfg.int("params.dim")?;
    u32::try_from(d).map_err(|_| Error::InvalidParams(format!("dimension {d} is too large")))
}

fn params(cfg: &ExperimentConfig) -> Result<ProblemParams> {
    let n = dim(cfg)?;
    let b = cfg.rational("params.b")?;
    let alpha = cfg.rational("params.alpha")?;
    let lambda: Lambda = cfg.text("params.lambda")?.parse()?;
    ProblemParams::new(n, b, alpha, lambda)
}

fn grid(cfg: &ExperimentConfig, dim: u32) -> Result<Grid> {
    Grid::with_offset(dim as usize, cfg.usize("grid.m")?, cfg.real("grid.l")?, cfg.boolean("grid.offset")?)
}

fn solver(cfg: &ExperimentConfig, params: &ProblemParams, grid: Grid) -> Result<SolverConfig> {
    let mut s = SolverConfig::new(params.clone(), grid, cfg.real("solver.dt")?, cfg.real("solver.t_end")?)?;
    s.scheme = cfg.text("solver.scheme")?.parse()?;
    s.delta_reg = cfg.real("solver.delta")?;
    s.sample_stride = cfg.usize("solver.stride")?;
    s.dealias = cfg.boolean("solver.dealias")?;
    s.coupling = cfg.real("solver.coupling")?;
    s.boundary_mass_tol = cfg.real("solver.boundary_tol")?;
    s.validate()?;
    Ok(s)
}

fn axes(values: Vec<f64>, dim: u32, key: &str) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    match values.len() {
        1 => out[0] = values[0],
        n if n == dim as usize && n <= 3 => out[..n].copy_from_slice(&values),
        n => return Err(Error::InvalidParams(format!("{key} needs 1 or {dim} values (got {n})"))),
    }
    Ok(out)
}

fn initial_data(cfg: &ExperimentConfig, dim: u32) -> Result<InitialData> {
    let d = InitialData::modulated(
        cfg.real("data.amplitude")?,
        cfg.real("data.sigma")?,
        axes(cfg.reals("data.center")?, dim, "data.center")?,
        axes(cfg.reals("data.wavevector")?, dim, "data.wavevector")?,
    );
    d.validate()?;
    Ok(d)
}

fn initial_field(cfg: &ExperimentConfig, grid: &Grid) -> Result<ComplexField> {
    if let Some(path) = cfg.opt_text("data.file")? {
        let f = read_field(Path::new(&path))?;
        f.check_grid(grid)?;
        return Ok(ComplexField { time: 0.0, ..f });
    }
    let mut d = initial_data(cfg, grid.dim() as u32)?;
    if let Some(target) = cfg.opt_real("data.h2_norm")? {
        d = d.normalized_h2(grid, target)?;
    }
    Ok(d.sample(grid))
}

fn class_name(c: Criticality) -> &'static str {
    match c {
        Criticality::MassSubcritical => "mass-subcritical",
        Criticality::MassCritical => "mass-critical",
        Criticality::Intercritical => "intercritical",
        Criticality::EnergyCritical => "energy-critical",
        Criticality::EnergySupercritical => "energy-supercritical",
    }
}

fn classify(cfg: &ExperimentConfig, out: &Output) -> Result<Outcome> {
    let p = params(cfg)?;
    let rep = critical_index(&p);
    out.csv(
        "classify.csv",
        &["dim", "b", "alpha", "lambda", "s_c", "four_star", "class"],
        &[vec![
            p.dim().to_string(),
            fmt_q(p.b()),
            fmt_q(p.alpha()),
            p.lambda().to_string(),
            fmt_q(&rep.s_c),
            rep.four_star_string(),
            class_name(rep.klass).to_string(),
        ]],
    )?;
    let which = cfg.text("classify.theorem")?;
    let ids: Vec<TheoremId> = if which == "all" { TheoremId::ALL.to_vec() } else { vec![which.parse()?] };
    let verdicts: Vec<_> = ids.iter().map(|&t| check_theorem(&p, t)).collect();
    let rows: Vec<Vec<String>> = verdicts
        .iter()
        .map(|v| vec![v.theorem_id.to_string(), v.satisfied.to_string(), v.failed_conditions.join("; ")])
        .collect();
    out.csv("theorems.csv", &["theorem", "satisfied", "failed_conditions"], &rows)?;
    let satisfied: Vec<String> = verdicts.iter().filter(|v| v.satisfied).map(|v| v.theorem_id.to_string()).collect();
    let hyp = if ids.len() == 1 {
        let v = &verdicts[0];
        if v.satisfied {
            format!("{} hypotheses satisfied", v.theorem_id)
        } else {
            format!("{} hypotheses fail: {}", v.theorem_id, v.failed_conditions.join("; "))
        }
    } else if satisfied.is_empty() {
        "no theorem hypotheses satisfied".to_string()
    } else {
        format!("hypotheses satisfied: {}", satisfied.join(", "))
    };
    Ok(Outcome::new(
        Status::Info,
        format!(
            "N={} b={} alpha={} s_c={} class={}; {hyp}",
            p.dim(),
            p.b(),
            p.alpha(),
            rep.s_c,
            class_name(rep.klass)
        ),
    ))
}

fn lemma_report(cfg: &ExperimentConfig) -> Result<LemmaExponentReport> {
    let lemma: Lemma = cfg.text("lemma.id")?.parse()?;
    let n = dim(cfg)?;
    let b = cfg.rational("params.b")?;
    let small = Smallness::new(cfg.opt_rational("lemma.theta")?, cfg.opt_rational("lemma.eps")?);
    match lemma {
        Lemma::L32 => lemma32_exponents(n, &b, &cfg.rational("params.alpha")?, &small),
        Lemma::L33 => {
            if n != 5 {
                return Err(Error::Precondition(vec![format!("N = 5 [N = {n}]")]));
            }
            lemma33_exponents(&b, &cfg.rational("params.alpha")?, &small)
        }
        Lemma::L41 => lemma41_exponents(n, &b),
    }
}

fn pairs(cfg: &ExperimentConfig, out: &Output) -> Result<Outcome> {
    let rep = lemma_report(cfg)?;
    let rows: Vec<Vec<String>> = rep
        .pairs
        .iter()
        .map(|p| {
            vec![p.name.clone(), p.pair.q.to_string(), fmt_q(&p.pair.r), fmt_q(&p.pair.s), p.admissible.to_string()]
        })
        .collect();
    out.csv("pairs.csv", &["name", "q", "r", "s", "admissible"], &rows)?;
    let rows: Vec<Vec<String>> = rep
        .identities
        .iter()
        .map(|i| vec![i.name.clone(), fmt_q(&i.lhs), i.relation.symbol().to_string(), fmt_q(&i.rhs), i.holds.to_string()])
        .collect();
    out.csv("identities.csv", &["name", "lhs", "relation", "rhs", "holds"], &rows)?;
    let mut aux: Vec<Vec<String>> = rep.auxiliaries.iter().map(|(k, v)| vec![k.clone(), fmt_q(v)]).collect();
    aux.extend([
        vec!["s_c".to_string(), fmt_q(&rep.s_c)],
        vec!["theta".to_string(), fmt_q(&rep.theta)],
        vec!["eps".to_string(), fmt_q(&rep.eps)],
        vec!["theta_max".to_string(), fmt_q(&rep.theta_max)],
        vec!["eps_max".to_string(), fmt_q(&rep.eps_max)],
    ]);
    out.csv("auxiliaries.csv", &["name", "value"], &aux)?;
    let failing: Vec<&str> = rep.failing().map(|i| i.name.as_str()).collect();
    let status = Status::from_pass(failing.is_empty());
    let message = if failing.is_empty() {
        format!("lemma {} N={} b={}: {} identities hold exactly", rep.lemma, rep.dim, rep.b, rep.identities.len())
    } else {
        format!("lemma {} N={} b={}: failing identities {}", rep.lemma, rep.dim, rep.b, failing.join(", "))
    };
    Ok(Outcome { status, message, extra: rep.notes.clone() })
}

fn run_solver(cfg: &ExperimentConfig, s: &SolverConfig, u0: &ComplexField) -> Result<Trajectory> {
    match s.scheme {
        Scheme::Strang => evolve(u0, s),
        Scheme::PicardOnWindow => {
            let rep = picard_iterate(u0, s, cfg.usize("solver.iterations")?)?;
            let last = rep.final_iterate();
            let samples: Vec<ComplexField> = last
                .iter()
                .enumerate()
                .filter(|(k, _)| k % s.sample_stride == 0 || *k + 1 == last.len())
                .map(|(_, f)| f.clone())
                .collect();
            Trajectory::from_samples(samples, s.clone())
        }
    }
}

fn diagnostics_rows(traj: &Trajectory) -> Vec<Vec<String>> {
    traj.diagnostics
        .iter()
        .map(|d| vec![fmt_f(d.t), fmt_f(d.mass), fmt_f(d.energy), fmt_f(d.h2_norm), fmt_f(d.linf), fmt_f(d.boundary_mass)])
        .collect()
}

const DIAGNOSTICS_HEADER: [&str; 6] = ["t", "mass", "energy", "h2_norm", "linf", "boundary_mass"];

fn simulate(cfg: &ExperimentConfig, out: &Output) -> Result<Outcome> {
    let p = params(cfg)?;
    let g = grid(cfg, p.dim())?;
    let s = solver(cfg, &p, g)?;
    let u0 = initial_field(cfg, &g)?;
    let traj = run_solver(cfg, &s, &u0)?;
    out.csv("trajectory.csv", &DIAGNOSTICS_HEADER, &diagnostics_rows(&traj))?;
    let dir = out.fields_dir()?;
    for (k, f) in traj.samples.iter().enumerate() {
        write_field(&dir.join(format!("u_{k:05}.ibnf")), f)?;
    }
    let rep = conservation_probe(&traj);
    let mut extra = Vec::new();
    if traj.boundary_warning {
        extra.push(format!("boundary mass exceeded {:e}; periodic wrap-around may matter", s.boundary_mass_tol));
    }
    Ok(Outcome {
        status: Status::Info,
        message: format!(
            "{} samples to t={}, mass_drift={:e}, energy_drift={:e}, blow_up={}",
            traj.samples.len(),
            traj.last().time,
            rep.mass_drift,
            rep.energy_drift,
            traj.blow_up
        ),
        extra,
    })
}

/// Tolerance of the Picard-versus-Strang comparison.
const PICARD_MATCH_TOL: f64 = 1e-4;

fn picard(cfg: &ExperimentConfig, out: &Output) -> Result<Outcome> {
    let p = params(cfg)?;
    let g = grid(cfg, p.dim())?;
    let s = solver(cfg, &p, g)?;
    let u0 = initial_field(cfg, &g)?;
    let rep = picard_iterate(&u0, &s, cfg.usize("solver.iterations")?)?;
    let rows: Vec<Vec<String>> = rep
        .distances
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let ratio = if k == 0 { None } else { rep.contraction_ratios[k - 1] };
            vec![(k + 1).to_string(), fmt_f(*d), ratio.map(fmt_f).unwrap_or_default()]
        })
        .collect();
    out.csv("picard.csv", &["iteration", "distance", "contraction_ratio"], &rows)?;
    let ref_dt = cfg.opt_real("solver.reference_dt")?.unwrap_or(s.dt / 10.0);
    let ref_cfg = SolverConfig { dt: ref_dt, sample_stride: usize::MAX / 2, scheme: Scheme::Strang, ..s.clone() };
    let reference = evolve(&u0, &ref_cfg)?;
    let last = rep.final_iterate().last().expect("nonempty");
    write_field(&out.fields_dir()?.join("picard_final.ibnf"), last)?;
    let norm = reference.last().l2_norm();
    let mismatch = if norm == 0.0 { last.l2_norm() } else { last.l2_distance(reference.last())? / norm };
    let ratios_ok = rep.contraction_ratios.iter().flatten().all(|&r| r < 0.5);
    let defined = rep.contraction_ratios.iter().flatten().count();
    let status = Status::from_pass(ratios_ok && mismatch <= PICARD_MATCH_TOL);
    Ok(Outcome::new(
        status,
        format!(
            "{} defined contraction ratios all < 1/2: {ratios_ok}; converged={}; strang mismatch={:e} (tol {PICARD_MATCH_TOL:e})",
            defined, rep.converged, mismatch
        ),
    ))
}

/// Snapshots `*.ibnf` in file-name order, or a fresh run.
fn samples_for_norms(cfg: &ExperimentConfig) -> Result<(u32, Vec<ComplexField>)> {
    if let Some(dir) = cfg.opt_text("norm.fields")? {
        let mut paths: Vec<_> = fs::read_dir(&dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "ibnf"))
            .collect();
        paths.sort();
        let fields = paths.iter().map(|p| read_field(p)).collect::<Result<Vec<_>>>()?;
        let first = fields.first().ok_or_else(|| Error::Domain(format!("no .ibnf files in {dir}")))?;
        let g = first.grid;
        for f in &fields {
            f.check_grid(&g)?;
        }
        if fields.windows(2).any(|w| w[1].time <= w[0].time) {
            return Err(Error::Domain("snapshot times must be strictly increasing in file-name order".into()));
        }
        return Ok((g.dim() as u32, fields));
    }
    let p = params(cfg)?;
    let g = grid(cfg, p.dim())?;
    let s = solver(cfg, &p, g)?;
    let traj = run_solver(cfg, &s, &initial_field(cfg, &g)?)?;
    Ok((p.dim(), traj.samples))
}

fn norm(cfg: &ExperimentConfig, out: &Output) -> Result<Outcome> {
    let (_, samples) = samples_for_norms(cfg)?;
    let times: Vec<f64> = samples.iter().map(|s| s.time).collect();
    let q = cfg.exponent("norm.q")?;
    let r = cfg.exponent("norm.r")?;
    let t0 = cfg.real("norm.t0")?;
    let t1 = cfg.opt_real("norm.t1")?.unwrap_or(*times.last().expect("nonempty"));
    let spatial = samples.iter().map(|u| lebesgue_norm(u, &r)).collect::<Result<Vec<_>>>()?;
    let value = mixed_norm_from_series(&times, &spatial, &NormSpec::new(q.clone(), r.clone(), t0, t1))?;
    out.csv(
        "norm.csv",
        &["q", "r", "t0", "t1", "value"],
        &[vec![q.to_string(), r.to_string(), fmt_f(t0), fmt_f(t1), fmt_f(value)]],
    )?;
    Ok(Outcome::new(Status::Info, format!("L^{q}_t L^{r}_x on [{t0}, {t1}] = {value:e}")))
}

fn family(cfg: &ExperimentConfig, dim: u32, s: &Q) -> Result<StrichartzFamily> {
    let kind = match cfg.text("norm.kind")?.as_str() {
        "sup" => FamilyKind::Sup,
        "inf-dual" => FamilyKind::InfDual,
        other => return Err(Error::InvalidParams(format!("norm.kind must be sup or inf-dual (got '{other}')"))),
    };
    match cfg.opt_text("norm.pairs_file")? {
        Some(path) => {
            let text = fs::read_to_string(&path)?;
            StrichartzFamily::new(dim, s.clone(), parse_pairs_file(&text)?, kind)
        }
        None => StrichartzFamily::default_family(dim, s, kind, cfg.usize("norm.family_size")?),
    }
}

fn strichartz(cfg: &ExperimentConfig, out: &Output) -> Result<Outcome> {
    let (dim, samples) = samples_for_norms(cfg)?;
    let s = cfg.rational("norm.s")?;
    let fam = family(cfg, dim, &s)?;
    let t0 = cfg.real("norm.t0")?;
    let t1 = cfg.opt_real("norm.t1")?.unwrap_or(samples.last().expect("nonempty").time);
    let v = strichartz_norm_of_samples(&samples, &fam, t0, t1)?;
    let rows: Vec<Vec<String>> = v
        .per_pair
        .iter()
        .map(|(p, val)| {
            vec![p.q.to_string(), fmt_q(&p.r), fmt_q(&p.s), fmt_f(*val), (*p == v.attained).to_string()]
        })
        .collect();
    out.csv("strichartz.csv", &["q", "r", "s", "value", "attained"], &rows)?;
    Ok(Outcome::new(
        Status::Info,
        format!("family of {} pairs at s={s} on [{t0}, {t1}]: {:e} at (q={}, r={})", rows.len(), v.value, v.attained.q, v.attained.r),
    ))
}

fn scaling_test(cfg: &ExperimentConfig, out: &Output) -> Result<Outcome> {
    let p = params(cfg)?;
    let g = grid(cfg, p.dim())?;
    let data = initial_data(cfg, p.dim())?;
    let mu = cfg.real("scaling.mu")?;
    let tol = cfg.real("scaling.tol")?;
    let s_c = p.critical_sobolev();
    let mut extra = Vec::new();
    let levels = match cfg.opt_rationals("scaling.s")? {
        Some(l) => l,
        None => {
            let mut l = vec![int(0)];
            if s_c >= int(0) {
                l.push(s_c.clone());
            } else {
                extra.push(format!("s_c = {s_c} < 0 skipped (negative orders unsupported)"));
            }
            l.push(int(2));
            l
        }
    };
    let fine = Grid::with_offset(g.dim(), 2 * g.points_per_axis(), g.box_length(), g.offset())?;
    let mut rows = Vec::new();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for s in &levels {
        let c = ScalingCheckConfig::new(mu, s.clone(), 0.0)?;
        let e1 = static_scaling_check(&data, &g, &p, &c)?;
        let e2 = static_scaling_check(&data, &fine, &p, &c)?;
        ok &= e1 <= tol && static_scaling_converges(e1, e2);
        worst = worst.max(e1);
        rows.push(vec!["static".into(), fmt_f(mu), fmt_q(s), g.points_per_axis().to_string(), String::new(), fmt_f(e1)]);
        rows.push(vec!["static".into(), fmt_f(mu), fmt_q(s), fine.points_per_axis().to_string(), String::new(), fmt_f(e2)]);
    }
    let mut message = format!("static max error {worst:e} over {} levels (tol {tol:e})", levels.len());
    let t_probe = cfg.real("scaling.t_probe")?;
    if t_probe > 0.0 {
        let s = solver(cfg, &p, g)?;
        let dtol = cfg.real("scaling.dynamic_tol")?;
        let c = ScalingCheckConfig::new(mu, int(0), t_probe)?;
        let coarse = dynamic_scaling_check(&data, &c, &s)?;
        let half = SolverConfig { dt: s.dt / 2.0, ..s.clone() };
        let finer = dynamic_scaling_check(&data, &c, &half)?;
        let ratio = coarse.mismatch / finer.mismatch;
        ok &= coarse.mismatch <= dtol && ratio >= 2.0;
        for (dt, m) in [(s.dt, coarse.mismatch), (half.dt, finer.mismatch)] {
            rows.push(vec!["dynamic".into(), fmt_f(mu), String::new(), g.points_per_axis().to_string(), fmt_f(dt), fmt_f(m)]);
        }
        message.push_str(&format!("; dynamic mismatch {:e} (tol {dtol:e}), halving ratio {ratio:.3}", coarse.mismatch));
    }
    out.csv("scaling.csv", &["mode", "mu", "s", "m", "dt", "error"], &rows)?;
    Ok(Outcome { status: Status::from_pass(ok), message, extra })
}

fn conserve_test(cfg: &ExperimentConfig, out: &Output) -> Result<Outcome> {
    let p = params(cfg)?;
    let g = grid(cfg, p.dim())?;
    let s = solver(cfg, &p, g)?;
    let u0 = initial_field(cfg, &g)?;
    let half = SolverConfig { dt: s.dt / 2.0, sample_stride: s.sample_stride * 2, ..s.clone() };
    let a = evolve(&u0, &s)?;
    let b = evolve(&u0, &half)?;
    let (ra, rb) = (conservation_probe(&a), conservation_probe(&b));
    let mut rows = Vec::new();
    for (dt, rep) in [(s.dt, &ra), (half.dt, &rb)] {
        for k in 0..rep.times.len() {
            rows.push(vec![fmt_f(dt), fmt_f(rep.times[k]), fmt_f(rep.mass[k]), fmt_f(rep.energy[k])]);
        }
    }
    out.csv("conservation.csv", &["dt", "t", "mass", "energy"], &rows)?;
    let mass_tol = cfg.real("conserve.mass_tol")?;
    let need = cfg.real("conserve.energy_ratio")?;
    let ratio = ra.energy_drift / rb.energy_drift;
    let mass_ok = ra.mass_drift <= mass_tol && rb.mass_drift <= mass_tol;
    let energy_ok = rb.energy_drift <= ra.energy_drift / need;
    let mut extra = Vec::new();
    if a.boundary_warning || b.boundary_warning {
        extra.push("boundary mass exceeded solver.boundary_tol".to_string());
    }
    Ok(Outcome {
        status: Status::from_pass(mass_ok && energy_ok),
        message: format!(
            "mass drift {:e} / {:e} (tol {mass_tol:e}); energy drift {:e} at dt, {:e} at dt/2, ratio {ratio:.3} (need >= {need})",
            ra.mass_drift, rb.mass_drift, ra.energy_drift, rb.energy_drift
        ),
        extra,
    })
}

fn estimate_probe(cfg: &ExperimentConfig, out: &Output) -> Result<Outcome> {
    match cfg.text("estimate.kind")?.as_str() {
        "pointwise" => {
            let alphas = cfg.opt_rationals("estimate.alpha")?.unwrap_or_default();
            let samples = cfg.usize("estimate.samples")?;
            let seed = cfg.seed()?;
            let mut rows = Vec::new();
            let mut ok = true;
            for a in &alphas {
                let rep = pointwise_estimate_probe(a, samples, seed)?;
                ok &= rep.passes();
                rows.push(vec![
                    fmt_q(a),
                    rep.samples.to_string(),
                    rep.skipped.to_string(),
                    fmt_f(rep.min_ratio),
                    fmt_f(rep.max_ratio),
                    fmt_f(to_f64(a) + 1.0),
                ]);
            }
            out.csv("estimate.csv", &["alpha", "samples", "skipped", "min_ratio", "max_ratio", "bound"], &rows)?;
            Ok(Outcome::new(Status::from_pass(ok), format!("pointwise max ratio in [1, alpha+1] for {} powers: {ok}", alphas.len())))
        }
        "gradient" => {
            let p = params(cfg)?;
            let g = grid(cfg, p.dim())?;
            let u = initial_data(cfg, p.dim())?;
            let v = InitialData::gaussian(cfg.real("estimate.v_amplitude")?, cfg.real("estimate.v_sigma")?);
            let rep = gradient_estimate_probe(p.alpha(), p.b(), &u, &v, &g, cfg.real("estimate.threshold")?)?;
            out.csv(
                "estimate.csv",
                &["alpha", "b", "nodes", "max_ratio", "threshold"],
                &[vec![fmt_q(&rep.alpha), fmt_q(&rep.b), rep.nodes_used.to_string(), fmt_f(rep.max_ratio), fmt_f(rep.threshold)]],
            )?;
            Ok(Outcome::new(
                Status::from_pass(rep.passes()),
                format!("gradient max ratio {:e} over {} nodes (threshold {})", rep.max_ratio, rep.nodes_used, rep.threshold),
            ))
        }
        kind @ ("hl" | "gn") => {
            let n = dim(cfg)?;
            let ineq = if kind == "hl" {
                FunctionInequality::HardyLittlewood {
                    p: cfg.rational("estimate.p")?,
                    q: cfg.rational("estimate.q")?,
                    s: cfg.rational("estimate.s")?,
                    rho: cfg.rational("estimate.rho")?,
                }
            } else {
                FunctionInequality::GagliardoNirenberg {
                    p: cfg.rational("estimate.p")?,
                    p0: cfg.rational("estimate.p0")?,
                    p1: cfg.rational("estimate.p1")?,
                    s: cfg.rational("estimate.s")?,
                    s1: cfg.rational("estimate.s1")?,
                    theta: cfg.rational("estimate.theta")?,
                }
            };
            let rep = hl_gn_function_probe(&ineq, n, cfg.usize("grid.m")?, cfg.real("grid.l")?)?;
            let rows: Vec<Vec<String>> = rep.sigmas.iter().zip(&rep.ratios).map(|(s, r)| vec![fmt_f(*s), fmt_f(*r)]).collect();
            out.csv("estimate.csv", &["sigma", "ratio"], &rows)?;
            Ok(Outcome::new(
                Status::from_pass(rep.passes()),
                format!("{} sup ratio {:e}, dilation flatness {:.3e}", ineq.name(), rep.sup_ratio, rep.flatness),
            ))
        }
        other => Err(Error::InvalidParams(format!("estimate.kind must be pointwise, gradient, hl or gn (got '{other}')"))),
    }
}

fn strichartz_probe_cmd(cfg: &ExperimentConfig, out: &Output) -> Result<Outcome> {
    let n = dim(cfg)?;
    let g = grid(cfg, n)?;
    let s = cfg.rational("strichartz.s")?;
    let rep = strichartz_probe(&g, &s, cfg.usize("strichartz.trials")?, cfg.seed()?)?;
    let join = |v: &[f64; 3]| v[..g.dim()].iter().map(|x| fmt_f(*x)).collect::<Vec<_>>().join(";");
    let rows: Vec<Vec<String>> = rep
        .trials
        .iter()
        .enumerate()
        .map(|(k, (d, r))| vec![k.to_string(), fmt_f(d.sigma), join(&d.center), join(&d.wavevector), fmt_f(*r)])
        .collect();
    out.csv("strichartz_probe.csv", &["trial", "sigma", "center", "wavevector", "ratio"], &rows)?;
    Ok(Outcome::new(
        Status::from_pass(rep.passes()),
        format!(
            "ratios min {:e} median {:e} max {:e}, spread {:.4} (bound {SPREAD_THRESHOLD})",
            rep.min,
            rep.median,
            rep.max,
            rep.spread()
        ),
    ))
}

fn perturb(cfg: &ExperimentConfig, out: &Output) -> Result<Outcome> {
    let p = params(cfg)?;
    let g = grid(cfg, p.dim())?;
    let s = solver(cfg, &p, g)?;
    let u0 = initial_field(cfg, &g)?;
    let direction = InitialData::gaussian(1.0, cfg.real("perturb.direction_sigma")?).sample(&g);
    let profile = InitialData::gaussian(1.0, cfg.real("perturb.forcing_sigma")?).sample(&g).values;
    let omega = cfg.real("perturb.forcing_frequency")?;
    let forcing: ForcingFn = Arc::new(move |t| profile.iter().map(|z| z * (omega * t).cos()).collect());
    let mut pc = PerturbationConfig::new(forcing, cfg.real("perturb.eps")?)?;
    pc.ladder = cfg.reals("perturb.ladder")?;
    pc.tolerances.insert("slope".into(), cfg.real("perturb.slope_tol")?);
    pc.m_bound = cfg.real("perturb.m_bound")?;
    pc.m_prime = cfg.real("perturb.m_prime")?;
    pc.l_bound = cfg.real("perturb.l_bound")?;
    let rep = perturbation_experiment(&u0, &direction, &pc, &s)?;
    let rows: Vec<Vec<String>> = rep
        .ladder
        .iter()
        .zip(&rep.distances)
        .map(|(e, d)| vec![fmt_f(*e), fmt_f(d.linf_l2), fmt_f(d.b_norm)])
        .collect();
    out.csv("perturb.csv", &["eps", "linf_l2", "b_norm"], &rows)?;
    Ok(Outcome {
        status: Status::from_pass(rep.passes()),
        message: format!("slopes {:.4} (L^inf L^2), {:.4} (B surrogate); need 1 +- {}", rep.slope_linf, rep.slope_b, rep.slope_tol),
        extra: rep.info.iter().map(|(k, v)| format!("{k} = {v}")).collect(),
    })
}
