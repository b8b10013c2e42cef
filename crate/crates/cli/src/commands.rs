use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};

use volmin::cone::{CalabiYauData, MomentCone};
use volmin::functionals::{obstruction_report, Functional};
use volmin::io::{parse_cone, parse_decomposition, parse_rational_list};
use volmin::num::{add, dot, fmt_q, q, rationalize, scale, Scalar, Q};
use volmin::optimizer::{check_minkowski_exact, exact_certificate, find_twist_witness, grid_certify, minimize as run_minimize, MinimizationConfig, Verdict};
use volmin::oracle::{compare_moments, finite_diff, mc_moments};
use volmin::polytope::{Decomposition, SlicePolytope};
use volmin::Error;

use crate::report::{exit, exit_code_of, DecompositionEcho, InputEcho, RunReport};
use crate::{MinimizeArgs, Mode, OracleArgs};

/// An error together with the exit code it maps to.
struct Failure {
    kind: String,
    message: String,
    code: u8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { kind: e.kind().into(), message: e.to_string(), code: exit_code_of(&e) }
    }
}

/// Errors in a decomposition file never mean the cone is invalid.
fn decomposition_failure(e: Error) -> Failure {
    Failure { kind: e.kind().into(), message: format!("decomposition: {e}"), code: exit::OTHER }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        kind: "Io".into(),
        message: format!("{}: {e}", path.display()),
        code: exit::OTHER,
    })
}

fn load_cone(path: &Path) -> Result<MomentCone, Failure> {
    let spec = parse_cone(&read(path)?)?;
    Ok(MomentCone::validate(&spec.facet_normals)?)
}

fn load_decomposition(path: &Path, c: &MomentCone, cy: &CalabiYauData) -> Result<Decomposition, Failure> {
    let spec = parse_decomposition(&read(path)?).map_err(decomposition_failure)?;
    if spec.base_reeb.len() != c.dim() {
        return Err(decomposition_failure(Error::DimensionMismatch { expected: c.dim(), got: spec.base_reeb.len() }));
    }
    Decomposition::new(c, cy, spec.base_reeb, &spec.pieces).map_err(decomposition_failure)
}

fn strings(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

fn string_rows(rows: &[Vec<Q>]) -> Vec<Vec<String>> {
    rows.iter().map(|r| strings(r)).collect()
}

fn run(report: &mut RunReport, body: impl FnOnce(&mut RunReport) -> Result<(), Failure>) {
    if let Err(f) = body(report) {
        report.fail_with(&f.kind, f.message, f.code);
    }
}

/// Cone, echo and Calabi-Yau data shared by every command but `validate`.
fn setup(report: &mut RunReport, cone: &Path) -> Result<(MomentCone, CalabiYauData), Failure> {
    let c = load_cone(cone)?;
    let mut echo = InputEcho::of_cone(&cone.display().to_string(), &c);
    let cy = c.calabi_yau();
    if let Ok(cy) = &cy {
        echo.gamma = Some(cy.gamma_strings());
        echo.origin = Some(cy.origin_strings());
    }
    report.input = Some(echo);
    report.goodness = Some(c.goodness().into());
    Ok((c, cy?))
}

pub fn validate(cone: &Path) -> RunReport {
    let mut r = RunReport::new("validate");
    run(&mut r, |r| {
        let c = load_cone(cone)?;
        let mut echo = InputEcho::of_cone(&cone.display().to_string(), &c);
        let g = c.goodness();
        let cy = c.calabi_yau();
        if let Ok(cy) = &cy {
            echo.gamma = Some(cy.gamma_strings());
            echo.origin = Some(cy.origin_strings());
        }
        r.input = Some(echo);
        let good = g.good;
        let divisor = g.worst_divisor();
        r.goodness = Some(g.into());
        if !good {
            return Err(Failure {
                kind: "NotGood".into(),
                message: format!("cone is not good: a face has elementary divisor {divisor}"),
                code: exit::INVALID_CONE,
            });
        }
        cy?;
        Ok(())
    });
    r
}

pub fn minimize(args: &MinimizeArgs) -> RunReport {
    let start = Instant::now();
    let mut r = RunReport::new("minimize");
    run(&mut r, |r| {
        let (c, cy) = setup(r, &args.cone)?;
        let decomposition = match &args.decomposition {
            Some(p) => {
                let d = load_decomposition(p, &c, &cy)?;
                if let Some(echo) = r.input.as_mut() {
                    echo.decomposition = Some(DecompositionEcho {
                        file: p.display().to_string(),
                        base_reeb: strings(d.base_xi()),
                        k: d.k(),
                    });
                }
                Some(d)
            }
            None => None,
        };
        let f = Functional::new(&c, &cy, decomposition.as_ref())?;
        let config = MinimizationConfig { grad_tol: args.grad_tol, max_iter: args.max_iter, ..Default::default() };
        let res = run_minimize(&f, &config)?;
        let converged = res.status == volmin::optimizer::Status::Converged;
        if converged && args.mode == Mode::Exact {
            let t: Vec<Q> = res.t_star.iter().map(|&x| rationalize(x, 1_000_000)).collect();
            r.obstruction = Some(obstruction_report(&f, &t)?);
            r.exact_certificate = Some(exact_certificate(&f, &res.t_star)?);
        } else {
            r.obstruction = obstruction_report(&f, &res.t_star).ok();
        }
        if let Some(resolution) = args.grid_certify {
            r.grid_certificate = Some(grid_certify(&f, &res, resolution)?);
        }
        if let Some(samples) = args.oracle_samples {
            let exact = SlicePolytope::slice(f.cone(), &res.xi_star)?.truncate().moments()?;
            let (section, _) = oracle_section(&f, &res.xi_star, exact, Some(&res.t_star), samples, args.seed, 1e-5)?;
            r.oracle = Some(section);
        }
        r.exit_code = match res.existence_verdict {
            Verdict::TransverseKE | Verdict::TransverseCoupledKE => exit::OK,
            Verdict::HypothesisFails => exit::HYPOTHESIS_FAILS,
            Verdict::NoCriticalPoint => exit::DIVERGED,
            Verdict::Unknown => exit::UNKNOWN,
        };
        r.minimization = Some(res);
        Ok(())
    });
    if args.timing {
        r.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    r
}

/// Monte Carlo moments of the truncated cone at `xi` and, when `t` is
/// given, finite differences of `W` at chart point `t`.
fn oracle_section(
    f: &Functional,
    xi: &[f64],
    exact: volmin::moments::MomentData<f64>,
    t: Option<&[f64]>,
    samples: usize,
    seed: u64,
    fd_step: f64,
) -> Result<(Value, bool), Failure> {
    let mc = mc_moments(f.cone(), xi, samples, seed)?;
    let rows = compare_moments(&exact, &mc);
    let max_z = rows.iter().map(|c| c.z).fold(0.0, f64::max);
    let mut agrees = max_z <= 3.0;
    let fd = match t {
        Some(t) => {
            let fd = finite_diff(|p| f.value(p), t, fd_step)?;
            let ev = f.evaluate::<f64>(t)?;
            let inf = |v: &mut dyn Iterator<Item = f64>| v.fold(0.0f64, |a, x| a.max(x.abs()));
            let g_scale = inf(&mut ev.gradient.iter().copied()).max(1.0);
            let g_err = inf(&mut fd.gradient.iter().zip(&ev.gradient).map(|(a, b)| a - b)) / g_scale;
            let h = ev.hessian_f64();
            let h_scale = inf(&mut h.iter().flatten().copied()).max(1.0);
            let h_err = inf(&mut fd.hessian.iter().flatten().zip(h.iter().flatten()).map(|(a, b)| a - b)) / h_scale;
            agrees &= g_err < 1e-6 && h_err < 1e-4;
            json!({
                "t": t,
                "step": fd.step,
                "gradient": fd.gradient,
                "hessian": fd.hessian,
                "gradient_error": g_err,
                "hessian_error": h_err,
            })
        }
        None => Value::Null,
    };
    let section = json!({
        "xi": xi,
        "samples": samples,
        "seed": seed,
        "moments": rows,
        "max_z": max_z,
        "finite_diff": fd,
        "agrees": agrees,
    });
    Ok((section, agrees))
}

pub fn oracle(args: &OracleArgs) -> RunReport {
    let mut r = RunReport::new("oracle");
    run(&mut r, |r| {
        let (c, cy) = setup(r, &args.cone)?;
        let f = Functional::new(&c, &cy, None)?;
        let xi_q = match &args.xi {
            Some(s) => parse_rational_list(s)?,
            None => f.chart().base.clone(),
        };
        if xi_q.len() != c.dim() {
            return Err(Error::DimensionMismatch { expected: c.dim(), got: xi_q.len() }.into());
        }
        let exact = SlicePolytope::slice(f.cone(), &xi_q)?.truncate().moments()?.to_f64();
        let xi: Vec<f64> = xi_q.iter().map(Scalar::to_f64).collect();
        let on_slice = dot(&xi_q, f.origin()) == q(1, 1);
        let t: Option<Vec<f64>> = on_slice.then(|| f.chart().coords(&xi_q).iter().map(Scalar::to_f64).collect());
        let (mut section, agrees) = oracle_section(&f, &xi, exact, t.as_deref(), args.samples, args.seed, args.fd_step)?;
        section["xi_exact"] = json!(strings(&xi_q));
        r.oracle = Some(section);
        if !agrees {
            r.fail_with("OracleDisagreement", "oracle estimates disagree with the exact values".into(), exit::ORACLE_DISAGREES);
        }
        Ok(())
    });
    r
}

pub fn twist_demo(cone: &Path, decomposition: &Path, xi: Option<&str>) -> RunReport {
    let mut r = RunReport::new("twist-demo");
    run(&mut r, |r| {
        let (c, cy) = setup(r, cone)?;
        let d = load_decomposition(decomposition, &c, &cy)?;
        if let Some(echo) = r.input.as_mut() {
            echo.decomposition = Some(DecompositionEcho {
                file: decomposition.display().to_string(),
                base_reeb: strings(d.base_xi()),
                k: d.k(),
            });
        }
        let f = Functional::new(&c, &cy, Some(&d))?;
        let (xi_prime, auto) = match xi {
            Some(s) => {
                let v = parse_rational_list(s)?;
                if v.len() != c.dim() {
                    return Err(Error::DimensionMismatch { expected: c.dim(), got: v.len() }.into());
                }
                (v, false)
            }
            None => (choose_twist(&f, d.base_xi()), true),
        };
        if dot(&xi_prime, f.origin()) != q(1, 1) {
            return Err(Failure {
                kind: "OffSlice".into(),
                message: "xi' must pair to 1 with the distinguished point o".into(),
                code: exit::OTHER,
            });
        }
        let mk = check_minkowski_exact(&f, &xi_prime)?;
        r.twist = Some(json!({
            "base_reeb": strings(d.base_xi()),
            "xi_prime": strings(&xi_prime),
            "auto_selected": auto,
            "k": d.k(),
            "twisted_pieces": mk.pieces.iter().map(|p| string_rows(p.vertices())).collect::<Vec<_>>(),
            "minkowski_sum": string_rows(mk.sum.vertices()),
            "slice": string_rows(mk.slice.vertices()),
            "holds": mk.holds,
            "discrepancy": mk.discrepancy,
            "witness": mk.witness.as_ref().map(|w| strings(w)),
        }));
        Ok(())
    });
    r
}

/// A point where additivity fails if there is one nearby, otherwise the
/// first feasible step away from the base.
fn choose_twist(f: &Functional, base: &[Q]) -> Vec<Q> {
    if let Some((xi, _)) = find_twist_witness(f, base) {
        return xi;
    }
    let nu = &f.chart().basis[0];
    (1..=6)
        .map(|e| add(base, &scale(nu, &q(1, 1 << e))))
        .find(|c| f.margin(c) > Q::from_integer(0.into()))
        .unwrap_or_else(|| base.to_vec())
}
