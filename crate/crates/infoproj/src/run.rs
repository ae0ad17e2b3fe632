//! Executes a [`RunConfig`] and writes its artifacts.

use std::io::{self, Write};
use std::path::Path;

use infoproj_core::linalg::Matrix;
use infoproj_core::pca::top_components;
use infoproj_core::power::fit_tpca_power;
use infoproj_core::relax::solve_relaxation;
use infoproj_core::sic::{sic_gaussian_rd, sic_t_rd, tpca_objective_basis};
use infoproj_core::synth::{generate, Variant};
use infoproj_core::{
    DataMatrix, FitReport, OrthonormalBasis, PowerOptions, RelaxOptions, StepSize, TailPrior,
};

use crate::config::{
    FitConfig, GenConfig, InputSource, MethodChoice, RhoPolicy, RunConfig, SicConfig,
};
use crate::csvio::{self, load_csv, LoadOptions};
use crate::error::{Error, Result};
use crate::report::{
    BoundReport, ComponentReport, InputInfo, Params, Report, RhoPolicyReport, SicReport, SicTerms,
    SolverReport, SynthInfo, TailReport, SCHEMA,
};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    InputError = 1,
    NotConverged = 2,
}

pub fn run(config: &RunConfig) -> Result<Exit> {
    match config {
        RunConfig::Fit(c) => run_fit(c),
        RunConfig::Gen(c) => run_gen(c),
        RunConfig::Sic(c) => run_sic(c),
    }
}

struct Input {
    data: DataMatrix,
    labels: Option<Vec<String>>,
    info: InputInfo,
}

fn load_input(source: &InputSource) -> Result<Input> {
    match source {
        InputSource::Csv { path, load } => {
            let loaded = load_csv(path, load)?;
            let info = InputInfo {
                source: "csv",
                path: Some(path.display().to_string()),
                synth: None,
                n: loaded.data.n(),
                d: loaded.data.d(),
                centered: load.center,
                labelled: loaded.labels.is_some(),
            };
            Ok(Input {
                data: loaded.data,
                labels: loaded.labels,
                info,
            })
        }
        InputSource::Synth(spec) => {
            let s = generate(spec)?;
            let labels = s.labels.iter().map(|l| l.index().to_string()).collect();
            let info = InputInfo {
                source: "synth",
                path: None,
                synth: Some(SynthInfo::from(spec)),
                n: s.data.n(),
                d: s.data.d(),
                centered: true,
                labelled: true,
            };
            Ok(Input {
                data: s.data,
                labels: Some(labels),
                info,
            })
        }
    }
}

fn rho_report(policy: RhoPolicy, scale: f64) -> RhoPolicyReport {
    match policy {
        RhoPolicy::Absolute(_) => RhoPolicyReport {
            kind: "absolute",
            factor: None,
            scale,
        },
        RhoPolicy::Relative(f) => RhoPolicyReport {
            kind: "relative",
            factor: Some(f),
            scale,
        },
    }
}

fn tail_report(tail: TailPrior, d: usize) -> Result<TailReport> {
    Ok(match tail {
        TailPrior::Nu(nu) => TailReport {
            kind: "nu",
            value: nu,
            nu,
        },
        TailPrior::Expectation(c) => TailReport {
            kind: "expectation",
            value: c,
            nu: infoproj_core::special::kappa_inverse(c, d)?,
        },
    })
}

fn sic_report(
    x: &DataMatrix,
    basis: &OrthonormalBasis,
    rho: f64,
    sigma: f64,
    nu: f64,
    deltas: &[f64],
) -> Result<SicReport> {
    let gaussian = sic_gaussian_rd(x, basis, sigma, deltas)?.into();
    let t = if rho > 0.0 {
        Some(SicTerms::from(sic_t_rd(x, basis, rho, nu, deltas)?))
    } else {
        None
    };
    Ok(SicReport { gaussian, t })
}

fn directions(basis: &OrthonormalBasis) -> Vec<Vec<f64>> {
    (0..basis.r()).map(|k| basis.column(k)).collect()
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            let mut f = csvio::create(p)?;
            f.write_all(text.as_bytes())
                .and_then(|_| f.flush())
                .map_err(|e| Error::io(p, e))
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Output(e.to_string()))
        }
    }
}

fn write_projection(
    path: &Path,
    x: &DataMatrix,
    basis: &OrthonormalBasis,
    labels: Option<&[String]>,
) -> Result<()> {
    let proj: Matrix = x.project_basis(basis)?;
    let mut header: Vec<String> = (1..=basis.r()).map(|k| format!("p{k}")).collect();
    if labels.is_some() {
        header.push("label".into());
    }
    csvio::write_matrix(csvio::create(path)?, &proj, Some(&header), labels)
}

fn power_options(c: &FitConfig) -> PowerOptions {
    let d = PowerOptions::default();
    PowerOptions {
        step: c.solver.alpha.map_or(StepSize::Auto, StepSize::Fixed),
        max_iter: c.solver.max_iter.unwrap_or(d.max_iter),
        tol: c.solver.tol.unwrap_or(d.tol),
        restarts: c.solver.restarts.unwrap_or(d.restarts),
        seed: c.seed,
    }
}

fn relax_options(c: &FitConfig) -> RelaxOptions {
    let d = RelaxOptions::default();
    RelaxOptions {
        step: c.solver.alpha,
        tol: c.solver.tol.unwrap_or(d.tol),
        max_iter: c.solver.max_iter.unwrap_or(d.max_iter),
        ..d
    }
}

pub fn fit_report(c: &FitConfig) -> Result<(Report, DataMatrix, Option<Vec<String>>)> {
    c.validate()?;
    let input = load_input(&c.input)?;
    let x = &input.data;
    if c.r > x.d() {
        return Err(Error::Config(format!("r = {} exceeds d = {}", c.r, x.d())));
    }
    let (rho, scale) = c.rho.resolve(x);
    if c.method == MethodChoice::TpcaRelax && !(rho > 0.0) {
        return Err(Error::Config("tpca-relax needs rho > 0".into()));
    }
    let tail = tail_report(c.tail, x.d())?;
    let nu = tail.nu;
    let deltas = c.deltas_for(c.r);

    let (basis, fit, eigenvalues, solver): (_, Option<FitReport>, _, _) = match c.method {
        MethodChoice::Pca => {
            let pcs = top_components(x, c.r)?;
            (pcs.basis, None, Some(pcs.eigenvalues), None)
        }
        MethodChoice::TpcaPower => {
            let opts = power_options(c);
            let fit = fit_tpca_power(x, rho, c.r, &opts)?;
            let solver = SolverReport {
                step: c.solver.alpha,
                tol: opts.tol,
                max_iter: opts.max_iter,
                restarts: Some(opts.restarts),
                seed: Some(opts.seed),
            };
            (fit.basis.clone(), Some(fit), None, Some(solver))
        }
        MethodChoice::TpcaRelax => {
            let opts = relax_options(c);
            let sol = solve_relaxation(x, rho, c.r, &opts)?;
            let solver = SolverReport {
                step: opts.step,
                tol: opts.tol,
                max_iter: opts.max_iter,
                restarts: None,
                seed: None,
            };
            (
                sol.report.basis.clone(),
                Some(sol.report),
                None,
                Some(solver),
            )
        }
    };

    let report = Report {
        schema: SCHEMA,
        command: "fit",
        method: Some(c.method.name()),
        input: input.info.clone(),
        params: Params {
            r: c.r,
            rho,
            rho_policy: rho_report(c.rho, scale),
            sigma: c.sigma,
            tail,
            deltas: deltas.clone(),
            solver,
        },
        directions: directions(&basis),
        tpca_objective: tpca_objective_basis(x, &basis, rho)?,
        sic: sic_report(x, &basis, rho, c.sigma, nu, &deltas)?,
        eigenvalues,
        components: fit.as_ref().map_or_else(Vec::new, |f| {
            f.components.iter().map(ComponentReport::from).collect()
        }),
        upper_bound: fit
            .as_ref()
            .and_then(|f| f.upper_bound.as_ref())
            .map(BoundReport::from),
        eigenvalue_tie: fit.as_ref().is_some_and(|f| f.eigenvalue_tie),
        converged: fit.as_ref().map_or(true, |f| f.converged()),
        iterations: fit.as_ref().map_or(0, |f| f.iterations()),
        kkt_residual: match (&fit, c.method) {
            (Some(f), MethodChoice::TpcaPower) => Some(f.kkt_residual()),
            _ => None,
        },
    };
    Ok((report, input.data, input.labels))
}

fn run_fit(c: &FitConfig) -> Result<Exit> {
    let (report, x, labels) = fit_report(c)?;
    if let Some(p) = &c.out_proj {
        let basis = basis_of(&report)?;
        write_projection(p, &x, &basis, labels.as_deref())?;
    }
    write_text(c.out_report.as_deref(), &report.to_json())?;
    Ok(if report.converged {
        Exit::Ok
    } else {
        Exit::NotConverged
    })
}

fn basis_of(report: &Report) -> Result<OrthonormalBasis> {
    Ok(OrthonormalBasis::new(Matrix::from_columns(
        &report.directions,
    ))?)
}

fn run_gen(c: &GenConfig) -> Result<Exit> {
    if c.spec.variant == Variant::OutlierPair && c.spec.d != 2 {
        return Err(Error::Config(
            "the outlier-pair design is two-dimensional".into(),
        ));
    }
    let s = generate(&c.spec)?;
    match &c.out {
        Some(p) => csvio::write_synth(csvio::create(p)?, &s)?,
        None => csvio::write_synth(io::stdout().lock(), &s)?,
    }
    Ok(Exit::Ok)
}

pub fn sic_only_report(c: &SicConfig) -> Result<Report> {
    let input = load_input(&c.input)?;
    let x = &input.data;
    let w = load_csv(
        &c.weights,
        &LoadOptions {
            has_header: false,
            label_last: false,
            center: false,
        },
    )?;
    if w.data.d() != x.d() {
        return Err(Error::Config(format!(
            "weights have {} columns but the data has {}",
            w.data.d(),
            x.d()
        )));
    }
    let basis = OrthonormalBasis::new(w.data.values().transpose())?;
    let r = basis.r();
    let deltas = if c.deltas.len() == 1 {
        vec![c.deltas[0]; r]
    } else if c.deltas.len() == r {
        c.deltas.clone()
    } else {
        return Err(Error::Config(format!(
            "give one delta or r = {r} of them, got {}",
            c.deltas.len()
        )));
    };
    let (rho, scale) = c.rho.resolve(x);
    let tail = tail_report(c.tail, x.d())?;
    let nu = tail.nu;
    Ok(Report {
        schema: SCHEMA,
        command: "sic",
        method: None,
        input: input.info.clone(),
        params: Params {
            r,
            rho,
            rho_policy: rho_report(c.rho, scale),
            sigma: c.sigma,
            tail,
            deltas: deltas.clone(),
            solver: None,
        },
        directions: directions(&basis),
        tpca_objective: tpca_objective_basis(x, &basis, rho)?,
        sic: sic_report(x, &basis, rho, c.sigma, nu, &deltas)?,
        eigenvalues: None,
        components: Vec::new(),
        upper_bound: None,
        eigenvalue_tie: false,
        converged: true,
        iterations: 0,
        kkt_residual: None,
    })
}

fn run_sic(c: &SicConfig) -> Result<Exit> {
    let report = sic_only_report(c)?;
    write_text(c.out_report.as_deref(), &report.to_json())?;
    Ok(Exit::Ok)
}
