//! Numerical ascent of `F(l) = λ1(G, l) · (Σ m0)²` over edge lengths.
//!
//! `F` is scale invariant, so the search runs over unconstrained log-lengths
//! `s = ln l`. Steps follow the gradient with a backtracking line search;
//! where `λ1` is (nearly) multiple and therefore not differentiable, a short
//! Nelder-Mead phase takes over.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::norm2;
use crate::random::{random_lengths, rng_from_seed};
use crate::spectral::first_eigen;
use crate::weights::{fujiwara_weights, LengthFunction};

/// `∂λ1/∂l_e` for every edge, in `Graph::edges()` order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lambda1Gradient {
    pub lambda1: f64,
    pub derivatives: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GradientResult {
    Simple(Lambda1Gradient),
    /// `λ2 - λ1 < MULTIPLICITY_GAP · λ1`: no derivative exists.
    Multiple {
        lambda1: f64,
        lambda2: f64,
    },
}

/// First-order variation of `λ1` with respect to each edge length.
///
/// With `φ` the eigenfunction normalized by `Σ m0 φ² = 1`,
/// `∂λ1/∂l_e = -(φ(u) - φ(v))² / l_e² - λ1 (φ(u)² + φ(v)²)` for `e = uv`.
pub fn lambda1_gradient(g: &Graph, l: &LengthFunction) -> Result<GradientResult> {
    let fe = first_eigen(g, l)?;
    if fe.degenerate {
        return Ok(GradientResult::Multiple { lambda1: fe.value, lambda2: fe.next });
    }
    let lengths = l.values_for(g)?;
    let phi = &fe.eigenfunction;
    let derivatives = g
        .edges()
        .iter()
        .zip(&lengths)
        .map(|(e, len)| {
            let (a, b) = (phi[e.u - 1], phi[e.v - 1]);
            -(a - b) * (a - b) / (len * len) - fe.value * (a * a + b * b)
        })
        .collect();
    Ok(GradientResult::Simple(Lambda1Gradient { lambda1: fe.value, derivatives }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    DivergenceSuspected,
    BudgetExhausted,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeConfig {
    /// Iterations per start.
    pub budget: usize,
    /// `F` above this is reported as divergence.
    pub cap: f64,
    pub starts: usize,
    pub seed: u64,
    /// Smallest trusted `min l / max l`.
    pub ratio_floor: f64,
    /// Stop when `|∇_s F| / F` drops below this.
    pub gradient_tol: f64,
    /// Relative `F` gain over the last `stall_window` steps counted as no progress.
    pub stall_tol: f64,
    pub stall_window: usize,
    /// Nelder-Mead iterations per derivative-free phase.
    pub simplex_iterations: usize,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            budget: 200,
            cap: 1e8,
            starts: 8,
            seed: 1,
            ratio_floor: 1e-10,
            gradient_tol: 1e-8,
            stall_tol: 1e-10,
            stall_window: 10,
            simplex_iterations: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    Initial,
    Gradient,
    Simplex,
}

/// One accepted iterate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub rule: StepRule,
    /// Normalized so that `2 Σ l = 1`, in `Graph::edges()` order.
    pub lengths: Vec<f64>,
    pub objective: f64,
    /// Line-search step length in log-length space (gradient steps).
    pub step: Option<f64>,
    /// `|∇_s F|` (gradient steps and the initial iterate when available).
    pub gradient_norm: Option<f64>,
    /// Largest vertex distance from the best vertex (simplex steps).
    pub simplex_diameter: Option<f64>,
    /// `λ1` had multiplicity at this iterate.
    pub multiplicity: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartSummary {
    pub start: usize,
    pub initial_objective: f64,
    pub final_objective: f64,
    pub iterations: usize,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationReport {
    pub verdict: Verdict,
    /// Normalized best length function.
    pub best: LengthFunction,
    pub best_objective: f64,
    /// Which start produced `best`.
    pub best_start: usize,
    /// Accepted iterates of the best start.
    pub iterations: Vec<IterationRecord>,
    pub starts: Vec<StartSummary>,
}

struct Objective<'a> {
    g: &'a Graph,
}

struct Eval {
    value: f64,
    /// `∂F/∂s`, absent at multiplicity.
    gradient: Option<Vec<f64>>,
    gap: f64,
}

impl Objective<'_> {
    fn lengths(&self, s: &[f64]) -> LengthFunction {
        LengthFunction::from_values(self.g, &s.iter().map(|x| x.exp()).collect::<Vec<_>>())
            .expect("one log-length per edge")
    }

    fn value(&self, s: &[f64]) -> f64 {
        self.eval(s, false).map_or(f64::NEG_INFINITY, |e| e.value)
    }

    fn eval(&self, s: &[f64], with_gradient: bool) -> Result<Eval> {
        let l = self.lengths(s);
        let total = fujiwara_weights(self.g, &l)?.total_m0;
        let fe = first_eigen(self.g, &l)?;
        let value = fe.value * total * total;
        let gap = (fe.next - fe.value) / fe.value;
        if !value.is_finite() {
            return Err(Error::InvalidParameter("objective is not finite".into()));
        }
        let gradient = if with_gradient {
            match lambda1_gradient(self.g, &l)? {
                GradientResult::Simple(gr) => Some(
                    gr.derivatives
                        .iter()
                        .zip(s)
                        .map(|(d, si)| si.exp() * (total * total * d + 4.0 * total * gr.lambda1))
                        .collect(),
                ),
                GradientResult::Multiple { .. } => None,
            }
        } else {
            None
        };
        Ok(Eval { value, gradient, gap })
    }
}

fn normalized_values(s: &[f64]) -> Vec<f64> {
    let l: Vec<f64> = s.iter().map(|x| x.exp()).collect();
    let total: f64 = 2.0 * l.iter().sum::<f64>();
    l.iter().map(|x| x / total).collect()
}

fn length_ratio(s: &[f64]) -> f64 {
    let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo - hi).exp()
}

fn recenter(s: &mut [f64]) {
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    for x in s.iter_mut() {
        *x -= mean;
    }
}

/// Below this relative `λ2 - λ1` gap a failed line search hands over to the simplex.
const NEAR_MULTIPLICITY: f64 = 1e-3;
const MIN_STEP: f64 = 1e-12;
const ARMIJO: f64 = 1e-4;
const SIMPLEX_SIZE: f64 = 0.25;
/// A blocked line search this close to the ratio floor means the ascent ran into it.
const FLOOR_MARGIN: f64 = 1e3;

struct Run {
    records: Vec<IterationRecord>,
    verdict: Verdict,
    best_s: Vec<f64>,
}

fn run_start(obj: &Objective, s0: Vec<f64>, cfg: &OptimizeConfig) -> Result<Run> {
    let mut s = s0;
    recenter(&mut s);
    let first = obj.eval(&s, true)?;
    let mut f = first.value;
    let mut records = vec![IterationRecord {
        iteration: 0,
        rule: StepRule::Initial,
        lengths: normalized_values(&s),
        objective: f,
        step: None,
        gradient_norm: first.gradient.as_deref().map(norm2),
        simplex_diameter: None,
        multiplicity: first.gradient.is_none(),
    }];
    let mut step = 1.0;
    let mut current = first;

    let verdict = loop {
        let it = records.len();
        if f > cfg.cap {
            break Verdict::DivergenceSuspected;
        }
        if it > cfg.budget {
            break Verdict::BudgetExhausted;
        }
        if let Some(prev) = records.len().checked_sub(cfg.stall_window + 1).map(|i| records[i].objective) {
            if f - prev <= cfg.stall_tol * f {
                break Verdict::Converged;
            }
        }

        let gradient_step = match &current.gradient {
            Some(grad) => {
                let gn = norm2(grad);
                if gn <= cfg.gradient_tol * f {
                    break Verdict::Converged;
                }
                let dir: Vec<f64> = grad.iter().map(|x| x / gn).collect();
                let mut accepted = None;
                while step >= MIN_STEP {
                    let trial: Vec<f64> = s.iter().zip(&dir).map(|(a, d)| a + step * d).collect();
                    if length_ratio(&trial) < cfg.ratio_floor {
                        step *= 0.5;
                        continue;
                    }
                    let ft = obj.value(&trial);
                    if ft >= f + ARMIJO * step * gn {
                        accepted = Some((trial, ft, gn));
                        break;
                    }
                    step *= 0.5;
                }
                accepted
            }
            None => None,
        };

        match gradient_step {
            Some((trial, ft, gn)) => {
                s = trial;
                recenter(&mut s);
                f = ft;
                current = obj.eval(&s, true)?;
                records.push(IterationRecord {
                    iteration: it,
                    rule: StepRule::Gradient,
                    lengths: normalized_values(&s),
                    objective: f,
                    step: Some(step),
                    gradient_norm: Some(gn),
                    simplex_diameter: None,
                    multiplicity: current.gradient.is_none(),
                });
                step *= 2.0;
            }
            None => {
                let recent_gain = records.len() >= 2 && {
                    let (a, b) = (records[records.len() - 2].objective, f);
                    b - a > 1e-6 * b
                };
                if length_ratio(&s) < FLOOR_MARGIN * cfg.ratio_floor && recent_gain {
                    break Verdict::DivergenceSuspected;
                }
                if current.gradient.is_some() && current.gap >= NEAR_MULTIPLICITY {
                    break Verdict::Converged;
                }
                let before = f;
                let room = cfg.budget + 1 - it;
                let (new_s, new_f) = nelder_mead(obj, &s, f, cfg.simplex_iterations.min(room), it, &mut records);
                s = new_s;
                recenter(&mut s);
                f = new_f;
                current = obj.eval(&s, true)?;
                step = 1.0;
                if f <= before * (1.0 + cfg.stall_tol) && current.gradient.is_some() {
                    break Verdict::Converged;
                }
                if length_ratio(&s) < cfg.ratio_floor && f - before > 1e-6 * f {
                    break Verdict::DivergenceSuspected;
                }
            }
        }
    };
    Ok(Run { records, verdict, best_s: s })
}

/// Derivative-free maximization from `s`, appending one record per iteration.
fn nelder_mead(
    obj: &Objective,
    s: &[f64],
    f: f64,
    iterations: usize,
    first_iteration: usize,
    records: &mut Vec<IterationRecord>,
) -> (Vec<f64>, f64) {
    let dim = s.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(s.to_vec(), f)];
    for i in 0..dim {
        let mut v = s.to_vec();
        v[i] += SIMPLEX_SIZE;
        let fv = obj.value(&v);
        simplex.push((v, fv));
    }
    let by_value_desc = |a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)| b.1.total_cmp(&a.1);

    for k in 0..iterations {
        simplex.sort_by(by_value_desc);
        let centroid: Vec<f64> =
            (0..dim).map(|j| simplex[..dim].iter().map(|v| v.0[j]).sum::<f64>() / dim as f64).collect();
        let worst = simplex[dim].clone();
        let along = |c: f64| -> Vec<f64> { centroid.iter().zip(&worst.0).map(|(m, w)| m + c * (m - w)).collect() };

        let r = along(1.0);
        let fr = obj.value(&r);
        if fr > simplex[0].1 {
            let e = along(2.0);
            let fe = obj.value(&e);
            simplex[dim] = if fe > fr { (e, fe) } else { (r, fr) };
        } else if fr > simplex[dim - 1].1 {
            simplex[dim] = (r, fr);
        } else {
            let c = if fr > worst.1 { along(0.5) } else { along(-0.5) };
            let fc = obj.value(&c);
            if fc > worst.1.max(fr) {
                simplex[dim] = (c, fc);
            } else {
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    v.0 = best.iter().zip(&v.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                    v.1 = obj.value(&v.0);
                }
            }
        }
        simplex.sort_by(by_value_desc);
        let diameter = simplex[1..]
            .iter()
            .map(|v| norm2(&v.0.iter().zip(&simplex[0].0).map(|(a, b)| a - b).collect::<Vec<_>>()))
            .fold(0.0, f64::max);
        records.push(IterationRecord {
            iteration: first_iteration + k,
            rule: StepRule::Simplex,
            lengths: normalized_values(&simplex[0].0),
            objective: simplex[0].1,
            step: None,
            gradient_norm: None,
            simplex_diameter: Some(diameter),
            multiplicity: false,
        });
    }
    simplex.sort_by(by_value_desc);
    let (best, fb) = simplex.swap_remove(0);
    (best, fb)
}

/// Multi-start ascent of the normalized first eigenvalue.
pub fn maximize_lambda1(g: &Graph, config: &OptimizeConfig) -> Result<OptimizationReport> {
    if g.n() < 2 {
        return Err(Error::InvalidParameter("need at least two vertices".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if config.starts == 0 || config.cap.is_nan() || config.cap <= 0.0 {
        return Err(Error::InvalidParameter("need at least one start and a positive cap".into()));
    }
    let obj = Objective { g };
    let mut rng = rng_from_seed(config.seed);
    let mut best: Option<(usize, Run, f64)> = None;
    let mut starts = Vec::new();
    for start in 0..config.starts {
        let l0 = random_lengths(g, &mut rng);
        let s0: Vec<f64> = l0.values_for(g)?.iter().map(|x| x.ln()).collect();
        let run = run_start(&obj, s0, config)?;
        let first = run.records.first().expect("initial record").objective;
        let last = run.records.iter().map(|r| r.objective).fold(f64::NEG_INFINITY, f64::max);
        starts.push(StartSummary {
            start,
            initial_objective: first,
            final_objective: last,
            iterations: run.records.len() - 1,
            verdict: run.verdict,
        });
        if best.as_ref().is_none_or(|b| last > b.2) {
            best = Some((start, run, last));
        }
    }
    let (best_start, run, best_objective) = best.expect("at least one start");
    let best_s = run
        .records
        .iter()
        .max_by(|a, b| a.objective.total_cmp(&b.objective))
        .map(|r| r.lengths.clone())
        .unwrap_or_else(|| normalized_values(&run.best_s));
    Ok(OptimizationReport {
        verdict: run.verdict,
        best: LengthFunction::from_values(g, &best_s)?,
        best_objective,
        best_start,
        iterations: run.records,
        starts,
    })
}

/// `F` and its gradient in log-length coordinates at `l`.
pub fn objective_with_gradient(g: &Graph, l: &LengthFunction) -> Result<(f64, Option<Vec<f64>>)> {
    let s: Vec<f64> = l.values_for(g)?.iter().map(|x| x.ln()).collect();
    let e = Objective { g }.eval(&s, true)?;
    Ok((e.value, e.gradient))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;
    use crate::linalg::dot;
    use crate::random::random_cyclic_graph;
    use crate::spectral::lambda1;

    fn fd_gradient(g: &Graph, l: &LengthFunction) -> Vec<f64> {
        g.edges()
            .iter()
            .map(|&e| {
                let x = l.get(&e).unwrap();
                let h = 1e-6 * x;
                let mut lp = l.clone();
                let mut lm = l.clone();
                lp.insert(e, x + h);
                lm.insert(e, x - h);
                (lambda1(g, &lp).unwrap() - lambda1(g, &lm).unwrap()) / (2.0 * h)
            })
            .collect()
    }

    fn simple(r: GradientResult) -> Lambda1Gradient {
        match r {
            GradientResult::Simple(g) => g,
            other => panic!("expected a simple eigenvalue, got {other:?}"),
        }
    }

    #[test]
    fn gradient_matches_finite_differences_on_triangles() {
        let c3 = Graph::cycle(3).unwrap();
        for seed in 0..20 {
            let l = random_lengths(&c3, &mut rng_from_seed(seed));
            let an = simple(lambda1_gradient(&c3, &l).unwrap()).derivatives;
            let fd = fd_gradient(&c3, &l);
            let scale = an.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let err = an.iter().zip(&fd).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(err <= 1e-5 * scale, "seed {seed}: {an:?} vs {fd:?}");
        }
    }

    #[test]
    fn scale_identity() {
        let mut rng = rng_from_seed(4);
        for _ in 0..10 {
            let g = random_cyclic_graph(6, 0.5, &mut rng).unwrap();
            let l = random_lengths(&g, &mut rng);
            if let GradientResult::Simple(gr) = lambda1_gradient(&g, &l).unwrap() {
                let lens = l.values_for(&g).unwrap();
                let s = dot(&lens, &gr.derivatives);
                assert!((s + 2.0 * gr.lambda1).abs() <= 1e-6 * gr.lambda1);
            }
        }
    }

    #[test]
    fn uniform_square_is_flagged() {
        let c4 = Graph::cycle(4).unwrap();
        let r = lambda1_gradient(&c4, &LengthFunction::uniform(&c4, 1.0 / 8.0)).unwrap();
        match r {
            GradientResult::Multiple { lambda1, lambda2 } => {
                assert!((lambda1 - 64.0).abs() < 1e-9 && (lambda2 - 64.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_edge_gradient() {
        let p2 = Graph::path(2).unwrap();
        let l = LengthFunction::uniform(&p2, 0.5);
        let an = simple(lambda1_gradient(&p2, &l).unwrap()).derivatives;
        let fd = fd_gradient(&p2, &l);
        assert!((an[0] - fd[0]).abs() <= 1e-5 * an[0].abs());
        let (f, grad) = objective_with_gradient(&p2, &l).unwrap();
        assert!((f - 8.0).abs() < 1e-12);
        assert!(grad.unwrap()[0].abs() < 1e-12);
    }

    #[test]
    fn log_shift_leaves_objective_unchanged() {
        let g = named::bowtie();
        let l = random_lengths(&g, &mut rng_from_seed(12));
        let (a, _) = objective_with_gradient(&g, &l).unwrap();
        let (b, _) = objective_with_gradient(&g, &l.scaled(3.7f64.exp())).unwrap();
        assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn single_edge_converges_at_eight() {
        let r = maximize_lambda1(&Graph::path(2).unwrap(), &OptimizeConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Converged);
        assert!((r.best_objective - 8.0).abs() <= 1e-9);
    }

    #[test]
    fn triangle_diverges() {
        let r = maximize_lambda1(&Graph::cycle(3).unwrap(), &OptimizeConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::DivergenceSuspected, "{:?}", r.starts);
        assert!(r.best_objective > 500.0);
        assert!(r.iterations.len() <= 201);
    }

    #[test]
    fn zero_budget_records_the_start() {
        let cfg = OptimizeConfig { budget: 0, ..OptimizeConfig::default() };
        let r = maximize_lambda1(&Graph::cycle(3).unwrap(), &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::BudgetExhausted);
        assert_eq!(r.iterations.len(), 1);
        assert_eq!(r.iterations[0].rule, StepRule::Initial);
    }

    #[test]
    fn accepted_objectives_never_decrease() {
        let r =
            maximize_lambda1(&named::bowtie(), &OptimizeConfig { budget: 60, ..OptimizeConfig::default() }).unwrap();
        assert!(r.iterations.windows(2).all(|w| w[1].objective >= w[0].objective));
        assert!(r.iterations.iter().all(|it| it.lengths.iter().all(|x| *x > 0.0)));
    }
}
