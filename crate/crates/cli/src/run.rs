//! Dispatch of requests to the analysis modules and report assembly.

use std::collections::BTreeSet;
use std::sync::Arc;

use hamkit::expr::{Chart, RationalFunction};
use hamkit::geom::{
    alternative_from_symmetry, check_normal_form, derived_description, is_hamiltonian_description,
    validate_structures, CheckOptions, DifferentialForm, Tensor11, VectorField,
};
use hamkit::linfact::{
    hamiltonian_factorize, is_canonical, noncanonical_symmetry, odd_trace_test, transform_description, Description,
    ExactMatrix, FactorizeOptions, LinfactError, OddTrace, ScaledMatrix, Symmetry,
};
use hamkit::period::{
    dependence_test, equivalence_obstruction, period_energy_scan, Dependence, FlowOptions, FlowSystem, Obstruction,
    PeriodError, PeriodTable,
};
use hamkit::torus::{classify, orbit_closure_dimension, resonance_lattice};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::dsl::{Analysis, Request, SystemFile};

pub const SCHEMA: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Verify,
    Factorize,
    Altgen,
    Resonance,
    Period,
    NormalForm,
    Validate,
}

impl Command {
    pub fn keyword(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Factorize => "factorize",
            Command::Altgen => "altgen",
            Command::Resonance => "resonance",
            Command::Period => "period",
            Command::NormalForm => "normalform",
            Command::Validate => "validate",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub seed: u64,
    pub flow: FlowOptions,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 42, flow: FlowOptions::default() }
    }
}

/// An input file with its identity for the report.
pub struct Input<'a> {
    pub path: &'a str,
    pub sha256: String,
    pub system: &'a SystemFile,
}

pub struct Outcome {
    pub report: Value,
    /// `(file name, contents)` for the CSV directory.
    pub csv: Vec<(String, String)>,
    pub exit_code: i32,
}

impl Outcome {
    /// Pretty JSON with a trailing newline.
    pub fn report_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("report serializes");
        s.push('\n');
        s
    }
}

struct Ctx<'a> {
    chart: &'a Arc<Chart>,
    opts: RunOptions,
    assumptions: BTreeSet<String>,
    csv: Vec<(String, String)>,
    failed: bool,
}

fn function_json(f: &RationalFunction, chart: &Chart) -> Value {
    json!({ "kind": "function", "text": f.display(chart) })
}

fn form_json(f: &DifferentialForm) -> Value {
    json!({ "kind": "form", "text": f.display() })
}

fn field_json(f: &VectorField) -> Value {
    json!({ "kind": "field", "text": f.display() })
}

fn tensor_json(t: &Tensor11) -> Value {
    json!({ "kind": "tensor", "text": t.display() })
}

fn matrix_json(m: &ExactMatrix) -> Value {
    json!(m.to_strings())
}

fn dmatrix_json(m: &DMatrix<f64>) -> Value {
    json!((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect::<Vec<f64>>()).collect::<Vec<_>>())
}

fn scaled_json(m: &ScaledMatrix) -> Value {
    json!({ "log_scale": hamkit::expr::format_rational(&m.log_scale), "base": matrix_json(&m.base) })
}

fn int_json(v: &BigInt) -> Value {
    i64::try_from(v).map_or_else(|_| json!(v.to_string()), |x| json!(x))
}

fn error_json(kind: &str, message: String) -> Value {
    json!({ "kind": kind, "message": message })
}

pub fn run(command: Command, input: &Input<'_>, opts: RunOptions, compare: Option<&Input<'_>>) -> Outcome {
    let system = input.system;
    let mut ctx = Ctx { chart: &system.chart, opts, assumptions: BTreeSet::new(), csv: Vec::new(), failed: false };
    let requests: Vec<&Request> = system.requests_for(command.keyword()).collect();
    let mut results = Vec::new();
    let mut top = Map::new();
    if requests.is_empty() {
        ctx.failed = true;
        top.insert("error".into(), json!(format!("no {} requests in the file", command.keyword())));
    }
    let comparison = match (command, compare) {
        (Command::Period, Some(c)) if !requests.is_empty() => Some(comparison_table(c, &mut ctx)),
        _ => None,
    };
    for r in requests {
        let mut body = match &r.analysis {
            Analysis::Verify { field, form, hamiltonian } => verify(&mut ctx, field, form, hamiltonian),
            Analysis::Factorize { matrix } => factorize(&mut ctx, matrix),
            Analysis::AltgenMatrix { matrix, power, lambda } => altgen_matrix(&mut ctx, matrix, *power, lambda),
            Analysis::AltgenTensor { field, tensor, function } => altgen_tensor(&mut ctx, field, tensor, function),
            Analysis::AltgenSymmetry { field, symmetry, form, hamiltonian } => {
                altgen_symmetry(&mut ctx, field, symmetry, form, hamiltonian)
            }
            Analysis::Resonance { spec } => resonance(&mut ctx, spec),
            Analysis::Period { hamiltonian, energies, seeds, rel_tol } => {
                period(&mut ctx, &r.name, hamiltonian, energies, *seeds, *rel_tol, comparison.as_ref())
            }
            Analysis::NormalForm { field, integrals, fields, nu } => {
                normal_form(&mut ctx, field, integrals, fields, nu.as_deref())
            }
            Analysis::Validate { structure } => match validate_structures(structure, &ctx.check_opts()) {
                Ok(rep) => json!({
                    "structure": rep.kind,
                    "valid": rep.valid.as_str(),
                    "checks": rep.checks.iter().map(|c| json!({
                        "name": c.name,
                        "verdict": c.verdict.as_str(),
                        "informational": c.informational,
                    })).collect::<Vec<_>>(),
                }),
                Err(e) => ctx.fail("geometry", e.to_string()),
            },
        };
        if let Value::Object(m) = &mut body {
            m.insert("name".into(), json!(r.name));
            m.insert("request".into(), json!(r.command));
        }
        results.push(body);
    }
    if let Some(c) = &comparison {
        top.insert("comparison".into(), c.json.clone());
    }
    top.insert("schema".into(), json!(SCHEMA));
    top.insert("tool".into(), json!({ "name": "hamkit", "version": env!("CARGO_PKG_VERSION") }));
    top.insert("command".into(), json!(command.keyword()));
    top.insert("input".into(), json!({ "file": input.path, "sha256": input.sha256 }));
    top.insert("chart".into(), json!(system.chart.coords()));
    top.insert("constants".into(), json!(system.chart.constants()));
    top.insert(
        "options".into(),
        json!({
            "seed": opts.seed,
            "rtol": opts.flow.rtol,
            "atol": opts.flow.atol,
            "eps": opts.flow.eps,
            "tmax": opts.flow.t_max,
        }),
    );
    top.insert("results".into(), Value::Array(results));
    top.insert("assumptions".into(), json!(ctx.assumptions.iter().collect::<Vec<_>>()));
    top.insert("status".into(), json!(if ctx.failed { "analysis_failure" } else { "ok" }));
    Outcome { report: Value::Object(top), csv: ctx.csv, exit_code: if ctx.failed { 2 } else { 0 } }
}

impl Ctx<'_> {
    fn check_opts(&self) -> CheckOptions {
        CheckOptions { seed: self.opts.seed, ..CheckOptions::default() }
    }

    fn fail(&mut self, kind: &str, message: String) -> Value {
        self.failed = true;
        json!({ "error": error_json(kind, message) })
    }

    fn note(&mut self, s: &str) {
        self.assumptions.insert(s.to_string());
    }
}

fn verify(ctx: &mut Ctx<'_>, field: &VectorField, form: &DifferentialForm, h: &RationalFunction) -> Value {
    match is_hamiltonian_description(field, form, h, &ctx.check_opts()) {
        Ok(r) => {
            ctx.note("sign convention: i_Γ ω = dH");
            json!({
                "holds": r.holds,
                "closed": r.closed,
                "nondegenerate": r.nondegenerate.as_str(),
                "determinant": function_json(&r.determinant, ctx.chart),
                "degenerate_samples": r.degenerate_samples,
                "samples": r.samples,
                "residual": form_json(&r.residual),
                "field": field_json(field),
                "form": form_json(form),
                "hamiltonian": function_json(h, ctx.chart),
            })
        }
        Err(e) => ctx.fail("geometry", e.to_string()),
    }
}

fn odd_trace_json(a: &ExactMatrix) -> Value {
    match odd_trace_test(a) {
        OddTrace::Pass => json!({ "passed": true }),
        OddTrace::Fail { k, value } => json!({
            "passed": false,
            "witness": { "k": k, "exponent": 2 * k + 1, "trace": hamkit::expr::format_rational(&value) },
        }),
    }
}

fn linfact_error(ctx: &mut Ctx<'_>, e: LinfactError) -> Value {
    let kind = if matches!(e, LinfactError::NotDecomposable(_)) { "NotDecomposable" } else { "linfact" };
    ctx.failed = true;
    error_json(kind, e.to_string())
}

fn factorize(ctx: &mut Ctx<'_>, a: &ExactMatrix) -> Value {
    let opts = FactorizeOptions { seed: ctx.opts.seed, ..FactorizeOptions::default() };
    let mut out = json!({ "matrix": matrix_json(a), "odd_trace": odd_trace_json(a) });
    match hamiltonian_factorize(a, &opts) {
        Ok(f) => {
            out["factorization"] = json!({
                "lambda": matrix_json(&f.lambda),
                "hamiltonian_matrix": matrix_json(&f.ham),
                "verified": f.verify(),
            });
        }
        Err(e) => out["error"] = linfact_error(ctx, e),
    }
    out
}

fn symmetry_json(t: &Symmetry) -> Value {
    match t {
        Symmetry::Scalar { log_scale } => {
            json!({ "type": "scalar", "log_scale": hamkit::expr::format_rational(log_scale) })
        }
        Symmetry::Exact(m) => json!({ "type": "exact", "matrix": matrix_json(m) }),
        Symmetry::Float(m) => json!({ "type": "float", "matrix": dmatrix_json(m) }),
    }
}

fn description_json(d: &Description) -> Value {
    match d {
        Description::Exact(f) => json!({
            "type": "exact",
            "lambda": matrix_json(&f.lambda),
            "hamiltonian_matrix": matrix_json(&f.ham),
            "verified": f.verify(),
        }),
        Description::Scaled { lambda, ham, .. } => json!({
            "type": "scaled",
            "lambda": scaled_json(lambda),
            "hamiltonian_matrix": scaled_json(ham),
        }),
        Description::Float { lambda, ham, residual, .. } => json!({
            "type": "float",
            "lambda": dmatrix_json(lambda),
            "hamiltonian_matrix": dmatrix_json(ham),
            "residual": residual,
        }),
    }
}

fn altgen_matrix(ctx: &mut Ctx<'_>, a: &ExactMatrix, k: u32, lam: &num_rational::BigRational) -> Value {
    let opts = FactorizeOptions { seed: ctx.opts.seed, ..FactorizeOptions::default() };
    let mut out = json!({
        "mode": "matrix",
        "matrix": matrix_json(a),
        "power": k,
        "lambda_parameter": hamkit::expr::format_rational(lam),
        "odd_trace": odd_trace_json(a),
    });
    let f = match hamiltonian_factorize(a, &opts) {
        Ok(f) => f,
        Err(e) => {
            out["error"] = linfact_error(ctx, e);
            return out;
        }
    };
    out["factorization"] = json!({
        "lambda": matrix_json(&f.lambda),
        "hamiltonian_matrix": matrix_json(&f.ham),
        "verified": f.verify(),
    });
    let t = match noncanonical_symmetry(a, k, lam) {
        Ok(t) => t,
        Err(e) => {
            out["error"] = linfact_error(ctx, e);
            return out;
        }
    };
    out["symmetry"] = symmetry_json(&t);
    out["canonical"] = json!(is_canonical(&t, &f.lambda));
    match transform_description(&f, &t) {
        Ok(tr) => {
            out["description"] = description_json(&tr.description);
            out["same_description"] = json!(tr.same_description);
        }
        Err(e) => out["error"] = linfact_error(ctx, e),
    }
    out
}

fn altgen_tensor(ctx: &mut Ctx<'_>, field: &VectorField, t: &Tensor11, f: &RationalFunction) -> Value {
    match derived_description(field, t, f) {
        Ok(d) => {
            ctx.note("sign convention: i_Γ ω = dH");
            json!({
                "mode": "tensor",
                "tensor": tensor_json(t),
                "function": function_json(f, ctx.chart),
                "tensor_invariant": d.tensor_invariant,
                "function_conserved": d.f_conserved,
                "omega": form_json(&d.omega),
                "hamiltonian": function_json(&d.hamiltonian, ctx.chart),
                "verified": d.verified,
                "nondegenerate": d.nondegenerate.as_str(),
            })
        }
        Err(e) => ctx.fail("geometry", e.to_string()),
    }
}

fn altgen_symmetry(
    ctx: &mut Ctx<'_>,
    field: &VectorField,
    x: &VectorField,
    omega: &DifferentialForm,
    h: &RationalFunction,
) -> Value {
    match alternative_from_symmetry(field, x, omega, h) {
        Ok(d) => {
            ctx.note("sign convention: i_Γ ω = dH");
            json!({
                "mode": "symmetry",
                "symmetry_field": field_json(x),
                "is_symmetry": d.symmetry,
                "omega": form_json(&d.omega),
                "hamiltonian": function_json(&d.hamiltonian, ctx.chart),
                "verified": d.verified,
                "nondegenerate": d.nondegenerate.as_str(),
            })
        }
        Err(e) => ctx.fail("geometry", e.to_string()),
    }
}

fn resonance(ctx: &mut Ctx<'_>, spec: &hamkit::torus::FrequencySpec) -> Value {
    let lattice = resonance_lattice(spec);
    let class = classify(spec);
    ctx.note(&spec.assumption());
    json!({
        "basis_symbols": spec.basis(),
        "frequencies": spec.coeffs().iter().map(|r| r.iter().map(hamkit::expr::format_rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "lattice": lattice.basis().iter().map(|r| r.iter().map(int_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "rank": lattice.rank(),
        "orbit_closure_dimension": orbit_closure_dimension(spec),
        "classification": class.to_string(),
        "extra_integrals": class.extra_integrals(spec.n()),
    })
}

fn table_json(table: &PeriodTable) -> Value {
    json!({
        "records": table.records.iter().map(|r| json!({
            "level": r.level,
            "seed": r.seed,
            "energy": r.energy,
            "period": r.period,
            "converged": r.converged,
            "energy_drift": r.energy_drift,
        })).collect::<Vec<_>>(),
        "empty_levels": table.empty_levels,
    })
}

fn dependence_json(d: &Dependence) -> Value {
    match d {
        Dependence::Dependent { insufficient_sampling } => {
            json!({ "verdict": "dependent", "insufficient_sampling": insufficient_sampling })
        }
        Dependence::Violated(v) => json!({
            "verdict": "violated",
            "levels": v.iter().map(|l| json!({ "level": l.level, "spread": l.spread, "records": l.records })).collect::<Vec<_>>(),
        }),
    }
}

pub fn table_csv(table: &PeriodTable, coords: &[String]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = coords.to_vec();
    header.extend(["energy", "period", "converged", "drift"].map(String::from));
    w.write_record(&header).expect("in-memory write");
    for r in &table.records {
        let mut row: Vec<String> = r.seed.iter().map(f64::to_string).collect();
        row.push(r.energy.to_string());
        row.push(r.period.map_or_else(String::new, |p| p.to_string()));
        row.push(r.converged.to_string());
        row.push(format!("{:e}", r.energy_drift));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
}

struct Comparison {
    table: Option<PeriodTable>,
    json: Value,
}

fn scan(
    chart: &Arc<Chart>,
    h: &RationalFunction,
    energies: &[f64],
    seeds: usize,
    opts: RunOptions,
) -> Result<PeriodTable, PeriodError> {
    let sys = FlowSystem::from_hamiltonian(chart, h.clone())?;
    period_energy_scan(&sys, energies, seeds, opts.seed, &opts.flow)
}

/// Period table of the first period request in the comparison file.
fn comparison_table(input: &Input<'_>, ctx: &mut Ctx<'_>) -> Comparison {
    let system = input.system;
    let mut json = json!({ "file": input.path, "sha256": input.sha256 });
    let Some(req) = system.requests_for("period").next() else {
        json["error"] = error_json("input", "comparison file has no period request".into());
        ctx.failed = true;
        return Comparison { table: None, json };
    };
    let Analysis::Period { hamiltonian, energies, seeds, rel_tol } = &req.analysis else {
        unreachable!("period requests carry period analyses")
    };
    json["name"] = json!(req.name);
    json["hamiltonian"] = function_json(hamiltonian, &system.chart);
    match scan(&system.chart, hamiltonian, energies, *seeds, ctx.opts) {
        Ok(table) => {
            json["table"] = table_json(&table);
            if let Ok(d) = dependence_test(&table, *rel_tol) {
                json["dependence"] = dependence_json(&d);
            }
            ctx.csv.push((format!("compare_{}.csv", req.name), table_csv(&table, system.chart.coords())));
            Comparison { table: Some(table), json }
        }
        Err(e) => {
            json["error"] = error_json("period", e.to_string());
            ctx.failed = true;
            Comparison { table: None, json }
        }
    }
}

fn period(
    ctx: &mut Ctx<'_>,
    name: &str,
    h: &RationalFunction,
    energies: &[f64],
    seeds: usize,
    rel_tol: f64,
    comparison: Option<&Comparison>,
) -> Value {
    let chart = ctx.chart;
    let table = match scan(chart, h, energies, seeds, ctx.opts) {
        Ok(t) => t,
        Err(e) => return ctx.fail("period", e.to_string()),
    };
    ctx.note("period–energy dependence is tested on the sampled levels only");
    let mut out = json!({
        "hamiltonian": function_json(h, chart),
        "energies": energies,
        "seeds_per_energy": seeds,
        "rel_tol": rel_tol,
        "table": table_json(&table),
    });
    ctx.csv.push((format!("{name}.csv"), table_csv(&table, chart.coords())));
    match dependence_test(&table, rel_tol) {
        Ok(d) => out["dependence"] = dependence_json(&d),
        Err(e) => out["dependence"] = json!({ "error": error_json("period", e.to_string()) }),
    }
    if let Some(c) = comparison {
        out["obstruction"] = match &c.table {
            Some(other) => match equivalence_obstruction(&table, other, rel_tol) {
                Ok(Obstruction::Obstructed(reason)) => json!({ "verdict": "obstructed", "reason": reason }),
                Ok(Obstruction::Inconclusive) => json!({ "verdict": "inconclusive" }),
                Err(e) => json!({ "verdict": "not_applicable", "reason": e.to_string() }),
            },
            None => json!({ "verdict": "not_applicable", "reason": "comparison table unavailable" }),
        };
    }
    out
}

fn normal_form(
    ctx: &mut Ctx<'_>,
    field: &VectorField,
    integrals: &[RationalFunction],
    fields: &[VectorField],
    nu: Option<&[RationalFunction]>,
) -> Value {
    match check_normal_form(field, integrals, fields, nu, &ctx.check_opts()) {
        Ok(r) => {
            if r.completeness_assumed {
                ctx.note("completeness of the fields X_j is assumed, not checked");
            }
            json!({
                "holds": r.holds,
                "independent": r.independent,
                "independent_samples": r.independent_samples,
                "commuting": r.commuting,
                "brackets_vanish": r.brackets_vanish,
                "fields_full_rank_samples": r.fields_full_rank_samples,
                "invariant_integrals": r.invariant_integrals,
                "first_integrals": r.first_integrals,
                "decomposition_exact": r.decomposition_exact,
                "decomposition_residual": r.decomposition_residual,
                "completeness_assumed": r.completeness_assumed,
                "samples": r.samples,
            })
        }
        Err(e) => ctx.fail("geometry", e.to_string()),
    }
}
