use fujiwara::cycle::geometric_grid;
use fujiwara::reduce::{ReduceConfig, StepEvidence};
use fujiwara::spectral::{first_eigen, laplacian_spectrum};
use fujiwara::surgery::{cut_monotonicity_check, cut_with_lengths};
use fujiwara::{
    attach_pendant, contract_pendant, eigen_convergence_check, fujiwara_weights, maximize_lambda1, sweep_asymptotics,
    Edge, Graph, LengthFunction, OptimizeConfig, SweepConfig,
};
use serde::Serialize;

use crate::input::{GraphDoc, GraphInput};
use crate::output::{num, opt_num, Report};
use crate::CliError;

/// A `HI:LO` range of `t` values, sampled geometrically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decades {
    pub hi: f64,
    pub lo: f64,
}

impl Decades {
    pub fn grid(&self, per_decade: usize) -> Vec<f64> {
        geometric_grid(self.hi, self.lo, per_decade)
    }
}

pub fn parse_decades(s: &str) -> Result<Decades, String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected HI:LO, got '{s}'"))?;
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("'{x}' is not a number"));
    let (hi, lo) = (parse(a)?, parse(b)?);
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(format!("need 0 < LO < HI, got {hi}:{lo}"));
    }
    Ok(Decades { hi, lo })
}

pub fn parse_edge(s: &str) -> Result<Edge, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected U,V, got '{s}'"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("'{x}' is not a vertex label"));
    let (u, v) = (parse(a)?, parse(b)?);
    if u == v {
        return Err(format!("'{s}' is a loop"));
    }
    Ok(Edge::new(u, v))
}

fn edge_table(r: &mut Report, g: &Graph, l: &LengthFunction) {
    r.note("n", g.n()).note("m", g.edge_count()).columns(&["u", "v", "length"]);
    for e in g.edges() {
        r.row(vec![e.u.to_string(), e.v.to_string(), opt_num(l.get(e))]);
    }
}

#[derive(Serialize)]
struct SpectrumDoc {
    n: usize,
    m: usize,
    eigenvalues: Vec<f64>,
    lambda1: f64,
    lambda1_normalized: f64,
    total_m0: f64,
    lambda1_multiple: bool,
    residual: f64,
}

pub fn spectrum(input: &GraphInput, tol: f64) -> Result<Report, CliError> {
    let GraphInput { graph: g, lengths: l } = input;
    let first = first_eigen(g, l)?;
    let spec = laplacian_spectrum(g, l, tol)?;
    let total_m0 = fujiwara_weights(g, l)?.total_m0;
    let doc = SpectrumDoc {
        n: g.n(),
        m: g.edge_count(),
        lambda1: first.value,
        lambda1_normalized: first.value * total_m0 * total_m0,
        total_m0,
        lambda1_multiple: first.degenerate,
        residual: spec.residual,
        eigenvalues: spec.eigenvalues,
    };
    let mut r = Report::new(&doc)?;
    r.note("n", doc.n)
        .note("m", doc.m)
        .note("lambda1", num(doc.lambda1))
        .note("lambda1_normalized", num(doc.lambda1_normalized))
        .note("total_m0", num(doc.total_m0))
        .note("lambda1_multiple", doc.lambda1_multiple)
        .note("residual", num(doc.residual))
        .columns(&["k", "eigenvalue"]);
    for (k, x) in doc.eigenvalues.iter().enumerate() {
        r.row(vec![k.to_string(), num(*x)]);
    }
    Ok(r)
}

pub fn cycle_asymptotics(n: usize, grid: &[f64], config: &SweepConfig) -> Result<Report, CliError> {
    let rep = sweep_asymptotics(n, grid, config)?;
    let mut r = Report::new(&rep)?;
    r.note("n", n)
        .note("samples", rep.records.len())
        .note("skipped", rep.skipped.len())
        .note("dropped_for_fit", rep.dropped_for_fit)
        .note("lambda1_slope", num(rep.lambda1_fit.slope))
        .note("lambda2_slope", num(rep.lambda2_fit.slope))
        .note("limit_estimate", num(rep.limit_estimate))
        .note("limit_target", num(rep.limit_target))
        .note("lambda1_slope_ok", rep.lambda1_slope_ok)
        .note("lambda2_slope_ok", rep.lambda2_slope_ok)
        .note("limit_ok", rep.limit_ok)
        .note("passed", rep.passed())
        .columns(&["t", "lambda1", "lambda2", "lambda_max", "lambda1_t", "total_m0"]);
    for s in &rep.records {
        r.row(vec![num(s.t), num(s.lambda1), num(s.lambda2), num(s.lambda_max), num(s.lambda1_t), num(s.total_m0)]);
    }
    r.passed = rep.passed();
    Ok(r)
}

pub fn attach(input: &GraphInput, at: usize, t: f64) -> Result<Report, CliError> {
    let (g, l) = attach_pendant(&input.graph, &input.lengths, at, t)?;
    let mut r = Report::new(&GraphDoc::from_parts(&g, &l))?;
    r.note("pendant", g.n());
    edge_table(&mut r, &g, &l);
    Ok(r)
}

pub fn contract(input: &GraphInput, vertex: usize) -> Result<Report, CliError> {
    let c = contract_pendant(&input.graph, &input.lengths, vertex)?;
    let mut r = Report::new(&GraphDoc::from_parts(&c.graph, &c.lengths))?;
    let relabel: Vec<String> = c
        .relabel
        .iter()
        .enumerate()
        .map(|(i, x)| format!("{}->{}", i + 1, x.map_or("-".to_string(), |v| v.to_string())))
        .collect();
    r.note("relabel", relabel.join(" "));
    edge_table(&mut r, &c.graph, &c.lengths);
    Ok(r)
}

#[derive(Serialize)]
struct CutDoc {
    n: Option<usize>,
    edges: Vec<serde_json::Value>,
    lambda1_before: f64,
    lambda1_after: f64,
    holds: bool,
}

pub fn cut(input: &GraphInput, vertex: usize, keep: Edge) -> Result<Report, CliError> {
    let (g, l) = cut_with_lengths(&input.graph, &input.lengths, vertex, keep)?;
    let check = cut_monotonicity_check(&input.graph, &input.lengths, vertex, keep)?;
    let GraphDoc { n, edges } = GraphDoc::from_parts(&g, &l);
    let doc = CutDoc { n, edges, lambda1_before: check.before, lambda1_after: check.after, holds: check.holds };
    let mut r = Report::new(&doc)?;
    r.note("clone", g.n())
        .note("lambda1_before", num(check.before))
        .note("lambda1_after", num(check.after))
        .note("monotone", check.holds);
    edge_table(&mut r, &g, &l);
    r.passed = check.holds;
    Ok(r)
}

pub fn converge(input: &GraphInput, at: usize, grid: &[f64]) -> Result<Report, CliError> {
    let rep = eigen_convergence_check(&input.graph, &input.lengths, at, grid)?;
    let mut r = Report::new(&rep)?;
    r.note("at", at)
        .note("base_lambda1", opt_num(rep.base_spectrum.get(1).copied()))
        .note("skipped", rep.skipped.len())
        .note("sqrt_constant", num(rep.sqrt_constant))
        .note("largest_slope", opt_num(rep.largest_fit.map(|f| f.slope)))
        .note("finite_ok", rep.finite_ok)
        .note("decay_ok", rep.decay_ok)
        .note("largest_slope_ok", rep.largest_slope_ok)
        .note("passed", rep.passed())
        .columns(&["t", "lambda1", "max_deviation", "largest"]);
    for s in &rep.records {
        r.row(vec![num(s.t), num(s.lambda1), num(s.max_deviation), num(s.largest)]);
    }
    r.passed = rep.passed();
    Ok(r)
}

pub fn reduce(input: &GraphInput, config: &ReduceConfig) -> Result<Report, CliError> {
    let trace = fujiwara::reduce::reduce_to_cycle_with(&input.graph, config)?;
    let ok = trace.all_checks_passed();
    let fmt_cycle = |c: &[usize]| c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    let mut r = Report::new(&trace)?;
    r.note("n", trace.initial.n())
        .note("m", trace.initial.edge_count())
        .note("cycle", fmt_cycle(&trace.cycle))
        .note("steps", trace.steps.len())
        .note("final_n", trace.final_graph.n())
        .note("final_cycle", fmt_cycle(&trace.final_cycle))
        .note("all_checks_passed", ok)
        .columns(&[
            "step",
            "kind",
            "vertex",
            "kept_u",
            "kept_v",
            "lambda1_before",
            "lambda1_after",
            "max_deviation",
            "passed",
        ]);
    for (i, s) in trace.steps.iter().enumerate() {
        let (ku, kv) = s.kept_edge.map_or((String::new(), String::new()), |e| (e.u.to_string(), e.v.to_string()));
        let (before, after, dev) = match &s.evidence {
            StepEvidence::Cut(c) => (num(c.before), num(c.after), String::new()),
            StepEvidence::Contract(c) => (String::new(), String::new(), opt_num(c.max_deviations.last().copied())),
        };
        r.row(vec![
            (i + 1).to_string(),
            variant(&s.kind),
            s.vertex.to_string(),
            ku,
            kv,
            before,
            after,
            dev,
            s.evidence.passed().to_string(),
        ]);
    }
    r.passed = ok;
    Ok(r)
}

pub fn maximize(g: &Graph, config: &OptimizeConfig) -> Result<Report, CliError> {
    let rep = maximize_lambda1(g, config)?;
    let mut r = Report::new(&rep)?;
    r.note("verdict", variant(&rep.verdict))
        .note("best_objective", num(rep.best_objective))
        .note("best_start", rep.best_start);
    for s in &rep.starts {
        r.note(
            &format!("start {}", s.start),
            format!(
                "{} initial={} final={} iterations={}",
                variant(&s.verdict),
                num(s.initial_objective),
                num(s.final_objective),
                s.iterations
            ),
        );
    }
    let mut cols = vec!["iteration".to_string(), "rule".into(), "objective".into(), "step".into()];
    cols.extend(["gradient_norm".into(), "simplex_diameter".into(), "multiplicity".into()]);
    cols.extend(g.edges().iter().map(|e| format!("l_{}_{}", e.u, e.v)));
    r.header = cols;
    for it in &rep.iterations {
        let mut row = vec![
            it.iteration.to_string(),
            variant(&it.rule),
            num(it.objective),
            opt_num(it.step),
            opt_num(it.gradient_norm),
            opt_num(it.simplex_diameter),
            it.multiplicity.to_string(),
        ];
        row.extend(it.lengths.iter().map(|x| num(*x)));
        r.row(row);
    }
    Ok(r)
}

/// Serialized name of a unit enum variant, so CSV and JSON agree.
fn variant<T: Serialize>(x: &T) -> String {
    serde_json::to_value(x).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}
