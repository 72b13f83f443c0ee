//! The analysis commands behind the binary. Each returns an envelope and
//! the exit code to report.

use std::path::PathBuf;

use cmh_core::critical::{self, CriticalData};
use cmh_core::graph::{self, DiGraph};
use cmh_core::markov;
use cmh_core::maxplus::{self, MaxPlusMatrix};
use cmh_core::mdp::{self, MdpModel, DEFAULT_POLICY_CAP};
use cmh_core::model::MapModel;
use cmh_core::polyhedra::{self, RationalPolyhedron, DEFAULT_ENUMERATION_CAP};
use cmh_core::scalar::{Mode, Rational, Scalar};
use cmh_core::spectral::{self, EigenStatus};
use cmh_core::{vector, Error};
use serde_json::{json, Value};

use crate::dot;
use crate::envelope::{inputs_digest, Diagnostics, ResultEnvelope};
use crate::error::{CliError, CliResult};
use crate::format::{self, AnyMatrix, AnyMaxPlus, AnyMdp, AnyModel};
use crate::scalar_json::{classes_json, matrix_json, nodes_json, parse_scalar, parse_vector, vec_json, JsonScalar};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Spectrum,
    Critical,
    Orbit,
    Project,
    Eigenspace,
    Mdp,
    MaxPlus,
    Eval,
    Verify,
    Subdiff,
    Restrict,
    Markov,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Spectrum => "spectrum",
            Command::Critical => "critical",
            Command::Orbit => "orbit",
            Command::Project => "project",
            Command::Eigenspace => "eigenspace",
            Command::Mdp => "mdp",
            Command::MaxPlus => "maxplus",
            Command::Eval => "eval",
            Command::Verify => "verify",
            Command::Subdiff => "subdiff",
            Command::Restrict => "restrict",
            Command::Markov => "markov",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Options {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub mode: Option<Mode>,
    pub cap: Option<usize>,
    pub x: Option<String>,
    pub v: Option<String>,
    pub lambda: Option<String>,
    pub cycle_bound: Option<usize>,
    pub k: Option<usize>,
    pub nodes: Option<String>,
    pub dot: Option<PathBuf>,
}

impl Options {
    fn max_iter(&self) -> usize {
        self.max_iter.unwrap_or(DEFAULT_MAX_ITER)
    }

    /// Exact mode compares exactly; float mode uses `--tol`.
    fn tol<S: Scalar>(&self) -> S {
        match S::MODE {
            Mode::Exact => S::zero(),
            Mode::Float => S::from_f64(self.tol.unwrap_or(DEFAULT_TOL)).expect("finite tolerance"),
        }
    }

    fn flags(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut push = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k, v));
            }
        };
        push("tol", self.tol.map(|t| t.to_string()));
        push("max-iter", self.max_iter.map(|t| t.to_string()));
        push("mode", self.mode.map(|m| m.to_string()));
        push("cap", self.cap.map(|t| t.to_string()));
        push("x", self.x.clone());
        push("v", self.v.clone());
        push("lambda", self.lambda.clone());
        push("cycle-bound", self.cycle_bound.map(|t| t.to_string()));
        push("k", self.k.map(|t| t.to_string()));
        push("nodes", self.nodes.clone());
        out
    }
}

/// A finished command: the envelope to print and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub envelope: ResultEnvelope,
    pub exit_code: i32,
}

struct Report {
    outputs: Value,
    iterations: Option<usize>,
    warnings: Vec<String>,
    exit_code: i32,
}

impl Report {
    fn ok(outputs: Value) -> Self {
        Report {
            outputs,
            iterations: None,
            warnings: Vec::new(),
            exit_code: 0,
        }
    }
}

/// Runs `command` on the contents of an input file.
pub fn run(command: Command, input: &[u8], opts: &Options) -> CliResult<Outcome> {
    let text = std::str::from_utf8(input).map_err(|e| CliError::Io(format!("input is not UTF-8: {e}")))?;
    let (mode, report) = match command {
        Command::Mdp => match format::parse_mdp(text, opts.mode)? {
            AnyMdp::Exact(m) => (Mode::Exact, mdp_command(&m, opts)?),
            AnyMdp::Float(m) => (Mode::Float, mdp_command(&m, opts)?),
        },
        Command::MaxPlus => match format::parse_maxplus(text, opts.mode)? {
            AnyMaxPlus::Exact(a) => (Mode::Exact, maxplus_command(&a, opts)?),
            AnyMaxPlus::Float(a) => (Mode::Float, maxplus_command(&a, opts)?),
        },
        Command::Markov => match format::parse_matrix(text, opts.mode)? {
            AnyMatrix::Exact(p) => (Mode::Exact, markov_command(&p)?),
            AnyMatrix::Float(p) => (Mode::Float, markov_command(&p)?),
        },
        _ => {
            let model = format::parse_model(text, opts.mode)?;
            let mode = model.mode();
            let report = match (&model, command) {
                (AnyModel::Exact(m), Command::Eigenspace) => eigenspace_command(m, opts)?,
                (AnyModel::Float(_), Command::Eigenspace) => return Err(Error::ExactModeRequired.into()),
                (AnyModel::Exact(m), c) => model_command(c, m, opts)?,
                (AnyModel::Float(m), c) => model_command(c, m, opts)?,
            };
            (mode, report)
        }
    };
    Ok(Outcome {
        envelope: ResultEnvelope {
            command: command.name().into(),
            inputs_digest: inputs_digest(input, &opts.flags()),
            outputs: report.outputs,
            diagnostics: Diagnostics {
                mode: mode.to_string(),
                iterations: report.iterations,
                warnings: report.warnings,
            },
        },
        exit_code: report.exit_code,
    })
}

fn model_command<S: JsonScalar>(command: Command, m: &MapModel<S>, opts: &Options) -> CliResult<Report> {
    match command {
        Command::Validate => Ok(validate(m)),
        Command::Spectrum => spectrum(m, opts),
        Command::Critical => critical_command(m, opts),
        Command::Orbit => orbit(m, opts),
        Command::Project => project(m, opts),
        Command::Eval => eval(m, opts),
        Command::Verify => verify(m, opts),
        Command::Subdiff => subdiff(m, opts),
        Command::Restrict => restrict(m, opts),
        _ => unreachable!("dispatched elsewhere"),
    }
}

fn homogeneity_name<S: Scalar>(m: &MapModel<S>) -> &'static str {
    match m.homogeneity() {
        cmh_core::model::Homogeneity::Homogeneous => "homogeneous",
        cmh_core::model::Homogeneity::Subhomogeneous => "subhomogeneous",
    }
}

fn validate<S: JsonScalar>(m: &MapModel<S>) -> Report {
    let g = m.graph();
    Report::ok(json!({
        "valid": true,
        "n": m.dim(),
        "homogeneity": homogeneity_name(m),
        "pure_max_affine": m.is_pure_max_affine(),
        "graph": graph_json(&g),
        "strongly_connected": graph::strong_components(&g).len() == 1,
    }))
}

fn eval<S: JsonScalar>(m: &MapModel<S>, opts: &Options) -> CliResult<Report> {
    let x = match &opts.x {
        Some(x) => parse_vector::<S>(x, m.dim(), "x")?,
        None => vector::zeros(m.dim()),
    };
    let k = opts.k.unwrap_or(1);
    let value = m.iterate(&x, k);
    let bounds = if k >= 1 {
        let (lo, hi) = spectral::eigenvalue_bounds(m, &x, k);
        json!([lo.to_json(), hi.to_json()])
    } else {
        Value::Null
    };
    Ok(Report {
        outputs: json!({"x": vec_json(&x), "k": k, "value": vec_json(&value), "bounds": bounds}),
        iterations: Some(k),
        warnings: Vec::new(),
        exit_code: 0,
    })
}

fn verify<S: JsonScalar>(m: &MapModel<S>, opts: &Options) -> CliResult<Report> {
    let v = parse_vector::<S>(
        opts.v.as_deref().ok_or_else(|| CliError::Invalid("verify needs --v".into()))?,
        m.dim(),
        "v",
    )?;
    let lambda = match &opts.lambda {
        Some(l) => parse_scalar::<S>(l, "lambda")?,
        None => midpoint(m, &v),
    };
    let (ok, residual) = spectral::verify_eigenpair(m, &lambda, &v, &opts.tol::<S>());
    Ok(Report {
        outputs: json!({"eigenpair": ok, "lambda": lambda.to_json(), "v": vec_json(&v), "residual": residual.to_json()}),
        iterations: None,
        warnings: Vec::new(),
        exit_code: if ok { 0 } else { 2 },
    })
}

fn subdiff<S: JsonScalar>(m: &MapModel<S>, opts: &Options) -> CliResult<Report> {
    let v = match &opts.v {
        Some(v) => parse_vector::<S>(v, m.dim(), "v")?,
        None => vector::zeros(m.dim()),
    };
    let tol = opts.tol::<S>();
    let rect = m.subdiff_generators(&v, &tol)?;
    let active = m.active_indices(&v, &tol)?;
    let derivative = m.directional_derivative(&v, &tol)?;
    let fg = critical::final_graph_of_rect(&rect);
    let classes = graph::strong_components(&fg);
    write_dot(opts, "final", &fg, &classes)?;
    Ok(Report::ok(json!({
        "v": vec_json(&v),
        "rows": rect.rows.iter().map(|r| matrix_json(r)).collect::<Vec<_>>(),
        "active_generators": active
            .iter()
            .map(|a| a.as_ref().map(|ks| ks.iter().map(|k| k + 1).collect::<Vec<_>>()))
            .collect::<Vec<_>>(),
        "derivative": format::model_to_json(&derivative),
        "final_graph": graph_json(&fg),
        "final_classes": classes_json(&classes),
    })))
}

fn parse_nodes(text: &str, n: usize) -> CliResult<Vec<usize>> {
    text.split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
            _ => Err(CliError::Invalid(format!("--nodes: {t:?} is not a node in 1..={n}"))),
        })
        .collect()
}

fn restrict<S: JsonScalar>(m: &MapModel<S>, opts: &Options) -> CliResult<Report> {
    let nodes = parse_nodes(
        opts.nodes.as_deref().ok_or_else(|| CliError::Invalid("restrict needs --nodes".into()))?,
        m.dim(),
    )?;
    let r = m.restrict(&nodes)?;
    let recession: Vec<Value> = r
        .additive_recession()
        .rows
        .iter()
        .map(|row| row.as_ref().map_or(Value::Null, format::coordinate_to_json))
        .collect();
    Ok(Report::ok(json!({
        "nodes": nodes_json(&nodes),
        "model": format::model_to_json(&r),
        "homogeneity": homogeneity_name(&r),
        "additive_recession": recession,
    })))
}

fn markov_command<S: JsonScalar>(p: &[Vec<S>]) -> CliResult<Report> {
    let classes = markov::final_classes(p);
    let fg = markov::final_graph(p);
    let measures = classes
        .iter()
        .map(|c| Ok(json!({"class": nodes_json(c), "measure": vec_json(&markov::invariant_measure(p, c)?)})))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Report::ok(json!({
        "final_classes": classes_json(&classes),
        "final_graph": graph_json(&fg),
        "cyclicity": graph::cyclicity(&fg)?,
        "invariant_measures": measures,
    })))
}

fn status_name(s: EigenStatus) -> &'static str {
    match s {
        EigenStatus::Converged => "converged",
        EigenStatus::MaxIter => "max_iter",
        EigenStatus::DivergedBracket => "diverged_bracket",
    }
}

fn spectrum<S: JsonScalar>(m: &MapModel<S>, opts: &Options) -> CliResult<Report> {
    let x0 = opts.x.as_deref().map(|x| parse_vector::<S>(x, m.dim(), "x")).transpose()?;
    let tol = opts.tol::<S>();
    let r = spectral::find_eigenvector(m, x0.as_deref(), &tol, opts.max_iter());
    let converged = r.status == EigenStatus::Converged;
    let mut warnings = Vec::new();
    if !converged {
        warnings.push("eigenvector search did not converge; this does not prove that no eigenvector exists".into());
    }
    Ok(Report {
        outputs: json!({
            "lambda": r.lambda.to_json(),
            "bounds": [r.bounds.0.to_json(), r.bounds.1.to_json()],
            "v": vec_json(&r.v),
            "residual": r.residual.to_json(),
            "status": status_name(r.status),
        }),
        iterations: Some(r.iterations),
        warnings,
        exit_code: if converged { 0 } else { 3 },
    })
}

/// Eigenpair from the flags, or from a search when `--v` is absent.
struct Eigenpair<S> {
    lambda: S,
    v: Vec<S>,
    iterations: usize,
}

fn midpoint<S: Scalar>(m: &MapModel<S>, v: &[S]) -> S {
    let d = vector::sub(&m.eval(v), v);
    let lo = vector::min_entry(&d).unwrap_or_else(S::zero);
    let hi = vector::max_entry(&d).unwrap_or_else(S::zero);
    (lo + hi) / S::from_i64(2)
}

fn eigenpair<S: JsonScalar>(m: &MapModel<S>, opts: &Options) -> CliResult<Eigenpair<S>> {
    let lambda = opts.lambda.as_deref().map(|l| parse_scalar::<S>(l, "lambda")).transpose()?;
    if let Some(v) = &opts.v {
        let v = parse_vector::<S>(v, m.dim(), "v")?;
        let lambda = lambda.unwrap_or_else(|| midpoint(m, &v));
        return Ok(Eigenpair { lambda, v, iterations: 0 });
    }
    let r = spectral::find_eigenvector(m, None, &opts.tol::<S>(), opts.max_iter());
    if r.status != EigenStatus::Converged {
        return Err(CliError::NonConvergence(format!(
            "eigenvector search ended with status {} (residual {:e}); pass --v",
            status_name(r.status),
            r.residual.to_f64()
        )));
    }
    Ok(Eigenpair {
        lambda: lambda.unwrap_or(r.lambda),
        v: r.v,
        iterations: r.iterations,
    })
}

fn graph_json(g: &DiGraph) -> Value {
    json!({
        "nodes": g.nodes().iter().map(|i| i + 1).collect::<Vec<_>>(),
        "arcs": g.arcs().iter().map(|&(i, j)| [i + 1, j + 1]).collect::<Vec<_>>(),
    })
}

fn write_dot(opts: &Options, name: &str, g: &DiGraph, classes: &[Vec<usize>]) -> CliResult<()> {
    if let Some(path) = &opts.dot {
        std::fs::write(path, dot::to_dot(name, g, classes))
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn critical_json(cd: &CriticalData) -> Value {
    json!({
        "graph": graph_json(&cd.graph),
        "classes": classes_json(&cd.classes),
        "nodes": nodes_json(&cd.nodes),
        "class_count": cd.class_count(),
        "cyclicity": cd.cyclicity,
        "class_cyclicities": cd.class_cyclicities(),
    })
}

fn critical_command<S: JsonScalar>(m: &MapModel<S>, opts: &Options) -> CliResult<Report> {
    let ep = eigenpair(m, opts)?;
    let tol = opts.tol::<S>();
    let cd = critical::critical_data(m, &ep.v, &ep.lambda, &tol)?;
    let mut warnings = Vec::new();
    let witness = match critical::witness_matrix(m, &ep.v, &ep.lambda, &tol) {
        Ok(w) => matrix_json(&w),
        Err(e) => {
            warnings.push(format!("witness matrix: {e}"));
            Value::Null
        }
    };
    let invariant = critical::invariant_critical_classes(m, &ep.v, &ep.lambda, &tol)?;
    write_dot(opts, "critical", &cd.graph, &cd.classes)?;
    let mut outputs = critical_json(&cd);
    let obj = outputs.as_object_mut().expect("object");
    obj.insert("lambda".into(), ep.lambda.to_json());
    obj.insert("v".into(), vec_json(&ep.v));
    obj.insert("witness_matrix".into(), witness);
    obj.insert("invariant_classes".into(), classes_json(&invariant));
    Ok(Report {
        outputs,
        iterations: Some(ep.iterations),
        warnings,
        exit_code: 0,
    })
}

fn orbit<S: JsonScalar>(m: &MapModel<S>, opts: &Options) -> CliResult<Report> {
    let x = match &opts.x {
        Some(x) => parse_vector::<S>(x, m.dim(), "x")?,
        None => vector::zeros(m.dim()),
    };
    let tol = opts.tol::<S>();
    let (lambda, bound, spent) = match (opts.cycle_bound, &opts.lambda) {
        (Some(c), Some(l)) => (parse_scalar::<S>(l, "lambda")?, c, 0),
        (c, _) => {
            let ep = eigenpair(m, opts)?;
            let bound = match c {
                Some(c) => c,
                None => critical::critical_data(m, &ep.v, &ep.lambda, &tol)?.cyclicity,
            };
            (ep.lambda, bound, ep.iterations)
        }
    };
    let r = spectral::periodic_limit(m, &lambda, &x, bound, &tol, opts.max_iter())?;
    Ok(Report {
        outputs: json!({
            "lambda": lambda.to_json(),
            "cycle_bound": bound,
            "period": r.period,
            "points": matrix_json(&r.points),
            "residual": r.residual.to_json(),
            "detection_step": r.detection_step,
            "detection_gap": r.detection_gap.to_json(),
        }),
        iterations: Some(spent + r.detection_step),
        warnings: Vec::new(),
        exit_code: 0,
    })
}

fn lambda_only<S: JsonScalar>(m: &MapModel<S>, opts: &Options) -> CliResult<(S, usize)> {
    match &opts.lambda {
        Some(l) => Ok((parse_scalar::<S>(l, "lambda")?, 0)),
        None => eigenpair(m, opts).map(|ep| (ep.lambda, ep.iterations)),
    }
}

fn project<S: JsonScalar>(m: &MapModel<S>, opts: &Options) -> CliResult<Report> {
    let z = parse_vector::<S>(
        opts.x.as_deref().ok_or_else(|| CliError::Invalid("project needs --x".into()))?,
        m.dim(),
        "x",
    )?;
    let (lambda, spent) = lambda_only(m, opts)?;
    let tol = opts.tol::<S>();
    let r = spectral::spectral_projector(m, &lambda, &z, &tol, opts.max_iter())?;
    let mut warnings = Vec::new();
    let agrees = match critical::critical_data(m, &r.point, &lambda, &tol) {
        Ok(cd) => Value::Bool(cd.nodes.iter().all(|&i| (r.point[i].clone() - z[i].clone()).abs() <= tol)),
        Err(e) => {
            warnings.push(format!("critical data at the limit: {e}"));
            Value::Null
        }
    };
    Ok(Report {
        outputs: json!({
            "lambda": lambda.to_json(),
            "point": vec_json(&r.point),
            "residual": r.residual.to_json(),
            "agrees_on_critical_nodes": agrees,
        }),
        iterations: Some(spent + r.iterations),
        warnings,
        exit_code: 0,
    })
}

fn polyhedron_json(p: &RationalPolyhedron) -> Value {
    let rows = |list: &[(Vec<Rational>, Rational)]| -> Vec<Value> {
        list.iter().map(|(a, b)| json!({"a": vec_json(a), "b": b.to_json()})).collect()
    };
    json!({"dim": p.dim, "equalities": rows(&p.equalities), "inequalities": rows(&p.inequalities)})
}

fn eigenspace_command(m: &MapModel<Rational>, opts: &Options) -> CliResult<Report> {
    let ep = eigenpair(m, opts)?;
    let cap = opts.cap.unwrap_or(DEFAULT_ENUMERATION_CAP);
    let cd = critical::critical_data(m, &ep.v, &ep.lambda, &Rational::from_i64(0))?;
    let pieces = polyhedra::eigenspace_enumerate(m, &ep.lambda, cap)?;
    let dimension = polyhedra::projected_hull_dimension(&pieces, &cd.nodes);
    let m_f = cd.class_count();
    let verdict = match dimension.cmp(&m_f) {
        std::cmp::Ordering::Equal => "= m(f)",
        std::cmp::Ordering::Less => "< m(f)",
        std::cmp::Ordering::Greater => "> m(f)",
    };
    let pieces_json: Vec<Value> = pieces
        .iter()
        .map(|p| {
            json!({
                "selection": p.selection.iter().map(|k| k + 1).collect::<Vec<_>>(),
                "polyhedron": polyhedron_json(&p.polyhedron),
                "point": vec_json(&p.point),
            })
        })
        .collect();
    Ok(Report {
        outputs: json!({
            "lambda": ep.lambda.to_json(),
            "pieces": pieces_json,
            "dimension": dimension,
            "eigenspace_affine_dimension": polyhedra::eigenspace_affine_dimension(&pieces),
            "critical_class_count": m_f,
            "classes": classes_json(&cd.classes),
            "verdict": verdict,
        }),
        iterations: Some(ep.iterations),
        warnings: Vec::new(),
        exit_code: 0,
    })
}

fn mdp_command<S: JsonScalar>(model: &MdpModel<S>, opts: &Options) -> CliResult<Report> {
    let m = model.to_map();
    let cap = opts.cap.unwrap_or(DEFAULT_POLICY_CAP);
    let best = mdp::brute_force_lambda(model, cap)?;
    let ep = eigenpair(&m, opts)?;
    let tol = opts.tol::<S>();
    let report = mdp::optimal_class_check(model, &ep.lambda, &ep.v, &tol)?;
    let mut warnings = Vec::new();
    if (best.clone() - ep.lambda.clone()).abs() > tol {
        warnings.push(format!("brute-force value {best} differs from the eigenvalue {}", ep.lambda));
    }
    let names = |i: usize, acts: &[usize]| -> Vec<String> {
        acts.iter().map(|&a| model.actions()[i][a].name.clone()).collect()
    };
    let certificates: Vec<Value> = report
        .certificates
        .iter()
        .map(|c| {
            json!({
                "class": nodes_json(&c.class),
                "policy": matrix_json(&c.policy),
                "is_final": c.is_final,
                "value": c.value.to_json(),
                "certified": c.certified,
            })
        })
        .collect();
    let counterexamples: Vec<Value> = report
        .counterexamples
        .iter()
        .map(|c| json!({"policy": matrix_json(&c.policy), "class": nodes_json(&c.class)}))
        .collect();
    Ok(Report {
        outputs: json!({
            "states": model.states(),
            "brute_force_lambda": best.to_json(),
            "lambda": ep.lambda.to_json(),
            "v": vec_json(&ep.v),
            "active_actions": report.active_actions.iter().enumerate().map(|(i, a)| names(i, a)).collect::<Vec<_>>(),
            "critical_classes": classes_json(&report.critical_classes),
            "certificates": certificates,
            "all_certified": report.all_certified(),
            "sampled_policies": report.sampled_policies,
            "exhaustive": report.exhaustive,
            "counterexamples": counterexamples,
        }),
        iterations: Some(ep.iterations),
        warnings,
        exit_code: 0,
    })
}

/// Largest size for which circuits are enumerated as a cross-check.
const BRUTE_FORCE_LIMIT: usize = 7;

fn maxplus_command<S: JsonScalar>(a: &MaxPlusMatrix<S>, opts: &Options) -> CliResult<Report> {
    let rho = maxplus::maxplus_rho(a);
    let brute = (a.dim() <= BRUTE_FORCE_LIMIT).then(|| maxplus::brute_force_rho(a).to_json());
    let mut warnings = Vec::new();
    let mut outputs = json!({"rho": rho.to_json(), "rho_brute_force": brute});
    match maxplus::maxplus_eigen(a) {
        Ok((lambda, v)) => {
            let tol = opts.tol::<S>();
            let sat = maxplus::saturation_graph(a, &lambda, &v, &tol)?;
            let crit = maxplus::maxplus_critical(a, &lambda, &v, &tol)?;
            let cd = CriticalData::from_graph(crit.clone())?;
            write_dot(opts, "maxplus_critical", &crit, &cd.classes)?;
            let obj = outputs.as_object_mut().expect("object");
            obj.insert("lambda".into(), lambda.to_json());
            obj.insert("v".into(), vec_json(&v));
            obj.insert("saturation".into(), graph_json(&sat));
            obj.insert("critical".into(), critical_json(&cd));
        }
        Err(Error::Reducible) => warnings.push("matrix is reducible: no eigenvector computed".into()),
        Err(e) => return Err(e.into()),
    }
    Ok(Report {
        outputs,
        iterations: None,
        warnings,
        exit_code: 0,
    })
}
