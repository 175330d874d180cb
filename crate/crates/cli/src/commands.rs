//! One function per subcommand. Each returns a report body plus the
//! optional CSV/SVG artifacts; emission is left to the caller.

use ghcyl::classifier::{classify, classify_tube, sign_change, Classification, SignClass, Verdict};
use ghcyl::counterexamples::{
    plane_wave_witness, sign_change_construction, tube_zero_witness, PlaneWaveReport, SignChangeParams,
    SignChangeReport, TubeZeroReport,
};
use ghcyl::oracles::{run_suite, LemmaSuite};
use ghcyl::solver::{
    apply_operator, conjugation_residuals, reduce_tube, solve_const, solve_tube, BranchUsed, ConjugationResiduals,
    Direction, Reduction,
};
use ghcyl::spectral::{
    fit_decay, forward_mixed, membership_report, profile, Axis, CylinderGrid, DecayFit, FitWindow, GridFunction,
    MembershipReport,
};
use ghcyl::zeroset::{find_zeros, Completeness, ZeroWitness};
use ghcyl::OperatorSpec;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{pairs_csv, to_json};
use crate::plot::{Chart, Scale};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classify,
    Zeros,
    Solve,
    Spectrum,
    FitDecay,
    Counterexample,
    Reduce,
    VerifyLemmas,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Classify => "classify",
            Self::Zeros => "zeros",
            Self::Solve => "solve",
            Self::Spectrum => "spectrum",
            Self::FitDecay => "fit-decay",
            Self::Counterexample => "counterexample",
            Self::Reduce => "reduce",
            Self::VerifyLemmas => "verify-lemmas",
        }
    }

    /// Stem of the report file and the schema.
    pub fn stem(self) -> String {
        self.name().replace('-', "_")
    }

    pub fn needs_operator(self) -> bool {
        !matches!(self, Self::Spectrum | Self::FitDecay | Self::VerifyLemmas)
    }
}

pub struct Artifact {
    pub name: String,
    pub contents: String,
}

pub struct Outcome {
    /// Serialized JSON report body.
    pub body: String,
    pub exit_code: i32,
    pub artifacts: Vec<Artifact>,
}

struct Emitter<'a> {
    cfg: &'a RunConfig,
    artifacts: Vec<Artifact>,
}

impl Emitter<'_> {
    fn add(&mut self, format: Format, name: &str, contents: impl FnOnce() -> String) {
        if self.cfg.output.wants(format) {
            self.artifacts.push(Artifact { name: name.into(), contents: contents() });
        }
    }

    fn finish<T: Serialize>(self, body: &T, exit_code: i32) -> Outcome {
        Outcome { body: to_json(body), exit_code, artifacts: self.artifacts }
    }
}

pub fn run_command(cmd: Command, cfg: &RunConfig) -> CliResult<Outcome> {
    let mut em = Emitter { cfg, artifacts: Vec::new() };
    match cmd {
        Command::Classify => {
            let c = classify(cfg.operator()?, cfg.budgets)?;
            Ok(em.finish(&c, 0))
        }
        Command::Zeros => zeros(cfg, em),
        Command::Solve => solve(cfg, em),
        Command::Spectrum => spectrum(cfg, em),
        Command::FitDecay => {
            let f = cfg.forcing.load(cfg.grid)?;
            let m = membership_report(&f, cfg.claims.sigma, cfg.claims.mu);
            profile_plots(&mut em, "fit_decay", &m.k_profile, &m.xi_profile);
            Ok(em.finish(&FitDecayBody { forcing: cfg.forcing.label(), grid: f.grid, membership: m }, 0))
        }
        Command::Counterexample => counterexample(cfg, em),
        Command::Reduce => reduce(cfg, em),
        Command::VerifyLemmas => {
            let suite = run_suite(cfg.seed);
            em.add(Format::Csv, "verify_lemmas.csv", || {
                let mut s = String::from("name,passed,cases,max_error,tolerance\n");
                for c in &suite.checks {
                    s.push_str(&format!(
                        "{},{},{},{:.16e},{:.16e}\n",
                        c.name, c.passed, c.cases, c.max_error, c.tolerance
                    ));
                }
                s
            });
            let code = if suite.all_passed { 0 } else { 1 };
            Ok(em.finish::<LemmaSuite>(&suite, code))
        }
    }
}

/// Refusal body printed and written in place of a report.
pub fn refusal_body(cmd: Command, err: &CliError) -> Option<String> {
    match err {
        CliError::Refusal(r) => Some(to_json(&json!({ "command": cmd.name(), "error": r }))),
        _ => None,
    }
}

/// Tubes with constant coefficients are handled as first-order operators.
fn pointwise(op: &OperatorSpec) -> Option<OperatorSpec> {
    match op {
        OperatorSpec::TubeT { .. } => op.tube_as_first_order(),
        _ => Some(op.clone()),
    }
}

#[derive(Serialize)]
struct ZerosBody {
    witnesses: Vec<ZeroWitness>,
    exhaustive: bool,
    k_budget: i64,
    infinite_family: bool,
}

fn zeros(cfg: &RunConfig, mut em: Emitter) -> CliResult<Outcome> {
    let op = pointwise(cfg.operator()?).ok_or_else(|| {
        CliError::refusal(
            "symbol_not_pointwise",
            "the symbol of a tube operator with non-constant coefficients is not a function of (k, xi); use classify",
            Value::Null,
        )
    })?;
    let z = find_zeros(&op, cfg.budgets.k_budget)?;
    em.add(Format::Csv, "zeros.csv", || {
        let mut s = String::from("k,xi,residual\n");
        for w in &z.witnesses {
            s.push_str(&format!("{},{:.16e},{:.16e}\n", w.k, w.xi, w.residual));
        }
        s
    });
    let body = ZerosBody {
        exhaustive: z.completeness == Completeness::Exhaustive,
        k_budget: z.k_budget,
        infinite_family: z.infinite_family,
        witnesses: z.witnesses,
    };
    Ok(em.finish(&body, 0))
}

#[derive(Serialize, Default)]
struct BranchCounts {
    sol_minus: usize,
    sol_plus: usize,
    resonant: usize,
    trivial: usize,
}

#[derive(Serialize)]
struct SolveBody {
    method: &'static str,
    forcing: String,
    grid: CylinderGrid,
    residual_inf: f64,
    tolerance: f64,
    passed: bool,
    flagged: bool,
    conditioning: f64,
    branch_counts: BranchCounts,
    notes: Vec<String>,
    input_xi_fit: Option<DecayFit>,
    output_xi_fit: Option<DecayFit>,
}

fn xi_fit(f: &GridFunction) -> Option<DecayFit> {
    fit_decay(&forward_mixed(f), Axis::Xi, FitWindow::default()).ok()
}

fn solve(cfg: &RunConfig, mut em: Emitter) -> CliResult<Outcome> {
    let op = cfg.operator()?;
    let f = cfg.forcing.load(cfg.grid)?;
    let (method, tolerance, (u, rep)) = match (pointwise(op), op) {
        (Some(p), _) => ("division", cfg.tolerances.const_residual, solve_const(&p, &f)?),
        (None, OperatorSpec::TubeT { a, b, q }) => {
            ("fiberwise", cfg.tolerances.tube_residual, solve_tube(a, b, q, &f)?)
        }
        (None, _) => unreachable!("only tube operators lack a pointwise symbol"),
    };
    let mut counts = BranchCounts::default();
    for b in &rep.branch_used {
        *match b {
            BranchUsed::SolMinus => &mut counts.sol_minus,
            BranchUsed::SolPlus => &mut counts.sol_plus,
            BranchUsed::Resonant => &mut counts.resonant,
            BranchUsed::Trivial => &mut counts.trivial,
        } += 1;
    }
    em.add(Format::Csv, "u.csv", || u.to_csv());
    let body = SolveBody {
        method,
        forcing: cfg.forcing.label(),
        grid: f.grid,
        residual_inf: rep.residual_inf,
        tolerance,
        passed: rep.residual_inf <= tolerance,
        flagged: rep.flagged,
        conditioning: rep.conditioning,
        branch_counts: counts,
        notes: rep.notes,
        input_xi_fit: xi_fit(&f),
        output_xi_fit: xi_fit(&u),
    };
    Ok(em.finish(&body, 0))
}

#[derive(Serialize)]
struct SpectrumBody {
    forcing: String,
    grid: CylinderGrid,
    norm_sq_physical: f64,
    norm_sq_spectral: f64,
    /// `|‖f‖² − ‖f̃‖²| / ‖f‖²`.
    parseval_rel_defect: f64,
    max_abs: f64,
    k_profile: Vec<(f64, f64)>,
    xi_profile: Vec<(f64, f64)>,
}

fn profile_plots(em: &mut Emitter, stem: &str, k: &[(f64, f64)], xi: &[(f64, f64)]) {
    em.add(Format::Csv, &format!("{stem}_k_profile.csv"), || pairs_csv(("k", "max_abs"), k));
    em.add(Format::Csv, &format!("{stem}_xi_profile.csv"), || pairs_csv(("xi", "max_abs"), xi));
    em.add(Format::Svg, &format!("{stem}_k.svg"), || {
        let c = Chart {
            title: "k profile",
            x_label: "|k|",
            y_label: "max |f~|",
            x_scale: Scale::Linear,
            y_scale: Scale::Log10,
        };
        c.render(k)
    });
    em.add(Format::Svg, &format!("{stem}_xi.svg"), || {
        let c = Chart {
            title: "xi profile",
            x_label: "|xi|",
            y_label: "max |f~|",
            x_scale: Scale::Linear,
            y_scale: Scale::Log10,
        };
        c.render(xi)
    });
}

fn spectrum(cfg: &RunConfig, mut em: Emitter) -> CliResult<Outcome> {
    let f = cfg.forcing.load(cfg.grid)?;
    let s = forward_mixed(&f);
    let (np, ns) = (f.norm_sq(), s.norm_sq());
    let body = SpectrumBody {
        forcing: cfg.forcing.label(),
        grid: f.grid,
        norm_sq_physical: np,
        norm_sq_spectral: ns,
        parseval_rel_defect: if np > 0.0 { (np - ns).abs() / np } else { ns },
        max_abs: s.max_abs(),
        k_profile: profile(&s, Axis::K),
        xi_profile: profile(&s, Axis::Xi),
    };
    em.add(Format::Csv, "spectrum.csv", || s.to_csv());
    profile_plots(&mut em, "spectrum", &body.k_profile, &body.xi_profile);
    Ok(em.finish(&body, 0))
}

#[derive(Serialize)]
struct FitDecayBody {
    forcing: String,
    grid: CylinderGrid,
    membership: MembershipReport,
}

// Built once per run and serialized immediately; boxing buys nothing.
#[allow(clippy::large_enum_variant)]
#[derive(Serialize)]
#[serde(tag = "construction", rename_all = "snake_case")]
enum CounterexampleBody {
    PlaneWave {
        classification: Classification,
        report: PlaneWaveReport,
        tolerance: f64,
        passed: bool,
    },
    /// Plane wave of the normal form, pulled back through the conjugations.
    ReducedPlaneWave {
        classification: Classification,
        witness: ZeroWitness,
        grid: CylinderGrid,
        residual_inf: f64,
        tolerance: f64,
        passed: bool,
    },
    TubeZero {
        classification: Classification,
        report: TubeZeroReport,
        tolerance: f64,
        passed: bool,
    },
    SignChange {
        classification: Classification,
        params: SignChangeParams,
        report: SignChangeReport,
        tolerance: f64,
        passed: bool,
    },
}

fn x_profile(u: &GridFunction) -> Vec<(f64, f64)> {
    (0..u.grid.n).map(|i| (u.grid.x(i), u.at(0, i).norm())).collect()
}

fn gh_refusal(c: &Classification) -> CliError {
    CliError::refusal(
        "no_counterexample",
        format!("operator is classified {}; no counterexample is constructed", c.verdict),
        json!({ "verdict": c.verdict, "theorem": c.theorem }),
    )
}

fn counterexample(cfg: &RunConfig, mut em: Emitter) -> CliResult<Outcome> {
    let op = cfg.operator()?;
    let tol = cfg.tolerances.const_residual;
    let x_plot = |em: &mut Emitter, u: &GridFunction| {
        let prof = x_profile(u);
        em.add(Format::Csv, "counterexample_profile.csv", || pairs_csv(("x", "abs_u_t0"), &prof));
        em.add(Format::Svg, "counterexample_profile.svg", || {
            let c = Chart {
                title: "|u(0, x)|",
                x_label: "x",
                y_label: "|u|",
                x_scale: Scale::Linear,
                y_scale: Scale::Linear,
            };
            c.render(&prof)
        });
    };

    if let Some(p) = pointwise(op) {
        let c = classify(&p, cfg.budgets)?;
        let Some(w) = c.witness().filter(|_| c.verdict == Verdict::NotGh) else { return Err(gh_refusal(&c)) };
        let (u, report) = plane_wave_witness(&p, w, cfg.grid)?;
        x_plot(&mut em, &u);
        let passed = report.residual_inf <= tol && !report.decays;
        return Ok(em.finish(&CounterexampleBody::PlaneWave { classification: c, report, tolerance: tol, passed }, 0));
    }
    let OperatorSpec::TubeT { a, b, q } = op else { unreachable!("only tube operators lack a pointwise symbol") };
    let c = classify_tube(a, b, q, cfg.budgets)?;
    if c.verdict != Verdict::NotGh {
        return Err(gh_refusal(&c));
    }
    if let Some(w) = c.witness() {
        if b.is_zero() {
            let red = reduce_tube(a, b, q)?;
            let (v, pw) = plane_wave_witness(&red.p00, w, cfg.grid)?;
            let u = red.psi(&v, Direction::Inv)?;
            let residual_inf = apply_operator(op, &u)?.max_abs();
            x_plot(&mut em, &u);
            let body = CounterexampleBody::ReducedPlaneWave {
                classification: c,
                witness: pw.witness,
                grid: pw.grid,
                residual_inf,
                tolerance: tol,
                passed: residual_inf <= tol,
            };
            return Ok(em.finish(&body, 0));
        }
        if q.is_constant() {
            let (v, report) = tube_zero_witness(a, b, q.average(), w.k, w.xi, cfg.grid)?;
            x_plot(&mut em, &v);
            let passed = report.residual_inf <= tol;
            return Ok(
                em.finish(&CounterexampleBody::TubeZero { classification: c, report, tolerance: tol, passed }, 0)
            );
        }
    }
    if sign_change(b).class != SignClass::ChangesSign {
        return Err(CliError::refusal(
            "unsupported_construction",
            "no construction applies: q must be constant for the averaged-operator witness",
            Value::Null,
        ));
    }
    if !a.is_constant() || !q.is_constant() {
        return Err(CliError::refusal(
            "unsupported_construction",
            "the sign-change construction needs constant a and q",
            json!({ "a_constant": a.is_constant(), "q_constant": q.is_constant() }),
        ));
    }
    let ce = cfg.counterexample;
    let params = SignChangeParams { sigma1: ce.sigma1, mu: ce.mu, delta: ce.delta, ..SignChangeParams::default() };
    let (_, report) = sign_change_construction(a.average().re, b, q.average(), params)?;
    em.add(Format::Csv, "counterexample_profile.csv", || pairs_csv(("xi", "abs_u_hat"), &report.u_profile));
    em.add(Format::Svg, "counterexample_profile.svg", || {
        let c = Chart {
            title: "|u^(t*, xi)|",
            x_label: "xi",
            y_label: "|u^|",
            x_scale: Scale::Log10,
            y_scale: Scale::Log10,
        };
        c.render(&report.u_profile)
    });
    let tol = cfg.tolerances.ode_residual;
    let passed = report.ode_residual <= tol && report.slope_in_band && report.f_membership.consistent;
    Ok(em.finish(&CounterexampleBody::SignChange { classification: c, params, report, tolerance: tol, passed }, 0))
}

#[derive(Serialize)]
struct ReduceBody {
    reduction: Reduction,
    test_function: String,
    residuals: ConjugationResiduals,
    tolerance: f64,
    passed: bool,
}

fn reduce(cfg: &RunConfig, em: Emitter) -> CliResult<Outcome> {
    let OperatorSpec::TubeT { a, b, q } = cfg.operator()? else {
        return Err(CliError::refusal("precondition", "reduce applies to tube operators only", Value::Null));
    };
    let reduction = reduce_tube(a, b, q)?;
    let u = cfg.forcing.load(cfg.grid)?;
    let residuals = conjugation_residuals(a, q, &u)?;
    let tolerance = cfg.tolerances.conjugation_residual;
    let passed = residuals.psi_a <= tolerance && residuals.psi_q <= tolerance;
    Ok(em.finish(&ReduceBody { reduction, test_function: cfg.forcing.label(), residuals, tolerance, passed }, 0))
}
