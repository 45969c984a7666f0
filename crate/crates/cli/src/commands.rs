use std::collections::BTreeMap;
use std::path::Path;

use bpfail_core::certify::{
    certify_drastic_failure, certify_unimodality, critical_index, failure_indices, p_vector,
    FailureCertificate, PVector, UnimodalityReport,
};
use bpfail_core::generators::{bernstein_sample, ctrb, fuel_instance, hankel, LtiSystem};
use bpfail_core::io::{
    read_instance, read_matrix_csv, read_vector_csv, write_json, write_matrix_csv,
    write_two_column, write_vector_csv, InstanceFile,
};
use bpfail_core::linalg::forward_difference;
use bpfail_core::solvers::{
    solve_bp_with, solve_l0_with_budget, BpOptions, BpResult, L0Report, SolveStatus,
};
use bpfail_core::structure::{
    is_log_concave, is_unimodal, verify_sign_consistent, verify_totally_positive,
    verify_variation_bounding,
};
use bpfail_core::Matrix;
use serde::Serialize;

use crate::{
    CertifyArgs, CheckArgs, Failure, GenArgs, GenKind, InputArgs, L0Args, PropertyArg, SolveArgs,
    SystemArgs,
};

pub fn parse_impulse(s: &str) -> Result<(usize, f64), String> {
    let (t, v) = s
        .split_once(':')
        .ok_or_else(|| format!("expected time:value, got {s:?}"))?;
    let t = t
        .trim()
        .parse::<usize>()
        .map_err(|e| format!("bad time {t:?}: {e}"))?;
    let v = v
        .trim()
        .parse::<f64>()
        .map_err(|e| format!("bad value {v:?}: {e}"))?;
    if !v.is_finite() {
        return Err(format!("non-finite value in {s:?}"));
    }
    Ok((t, v))
}

pub(crate) fn load_system(args: &SystemArgs) -> Result<LtiSystem, Failure> {
    match (&args.diag, &args.a, &args.b) {
        (Some(d), _, _) => Ok(LtiSystem::diagonal(d)?),
        (None, Some(a), Some(b)) => Ok(LtiSystem::new(
            read_matrix_csv(a)?,
            read_vector_csv(b)?,
            None,
        )?),
        _ => Err(Failure::Usage("give --diag or both --a and --b".into())),
    }
}

fn save<T: Serialize + ?Sized>(out: &Path, name: &str, value: &T) -> Result<(), Failure> {
    Ok(write_json(out.join(name), value)?)
}

pub fn generate(args: &GenArgs, out: &Path) -> Result<(), Failure> {
    match &args.kind {
        GenKind::Ctrb { system, n } => {
            let v = ctrb(&load_system(system)?, *n)?;
            write_matrix_csv(out.join("V.csv"), &v)?;
            println!("V: {}x{}", v.rows(), v.cols());
        }
        GenKind::Hankel { num, den, m, n } => {
            let sys = LtiSystem::from_transfer_function(num, den)?;
            let v = hankel(&sys, *m, *n)?;
            write_matrix_csv(out.join("V.csv"), &v)?;
            println!("V: {}x{}", v.rows(), v.cols());
        }
        GenKind::Bernstein { degree, points } => {
            let v = bernstein_sample(*degree, points)?;
            write_matrix_csv(out.join("V.csv"), &v)?;
            println!("V: {}x{}", v.rows(), v.cols());
        }
        GenKind::Fuel { system, n, impulse } => {
            let mut times = BTreeMap::new();
            for &(t, v) in impulse {
                if times.insert(t, v).is_some() {
                    return Err(Failure::Usage(format!("impulse time {t} given twice")));
                }
            }
            let inst = fuel_instance(&load_system(system)?, *n, &times)?;
            write_matrix_csv(out.join("V.csv"), &inst.matrix()?)?;
            write_vector_csv(out.join("y.csv"), &inst.y)?;
            save(out, "instance.json", &InstanceFile::from_fuel(&inst))?;
            println!("xi: {:?}", inst.xi);
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CheckReport<T: Serialize> {
    input: String,
    transpose: bool,
    difference: bool,
    #[serde(flatten)]
    report: T,
}

pub fn check(args: &CheckArgs, out: &Path) -> Result<(), Failure> {
    let input = args.input.display().to_string();
    let holds = match args.property {
        PropertyArg::LogConcave | PropertyArg::Unimodal => {
            if args.transpose || args.difference || args.order.is_some() {
                return Err(Failure::Usage(
                    "--order, --transpose and --difference apply to matrix properties".into(),
                ));
            }
            let a = read_vector_csv(&args.input)?;
            let rep = if args.property == PropertyArg::LogConcave {
                is_log_concave(&a)?
            } else {
                is_unimodal(&a)
            };
            let holds = rep.holds;
            save(out, "structure.json", &CheckReport { input, transpose: false, difference: false, report: rep })?;
            holds
        }
        prop => {
            let mut x = read_matrix_csv(&args.input)?;
            if args.transpose {
                x = x.transpose();
            }
            if args.difference {
                x = forward_difference(&x)?;
            }
            let full = x.rows().min(x.cols());
            let rep = match prop {
                PropertyArg::Sc => verify_sign_consistent(&x, args.order.unwrap_or(full), false)?,
                PropertyArg::Ssc => verify_sign_consistent(&x, args.order.unwrap_or(full), true)?,
                PropertyArg::Tp => verify_totally_positive(&x, args.order.unwrap_or(full), false)?,
                PropertyArg::Stp => verify_totally_positive(&x, args.order.unwrap_or(full), true)?,
                _ => verify_variation_bounding(&x, args.order.unwrap_or(full.saturating_sub(1)))?,
            };
            let holds = rep.holds;
            save(
                out,
                "structure.json",
                &CheckReport { input, transpose: args.transpose, difference: args.difference, report: rep },
            )?;
            holds
        }
    };
    println!("holds: {holds}");
    Ok(())
}

/// V, with the instance file when one was given.
pub(crate) fn load_matrix(source: &InputArgs) -> Result<(Matrix, Option<InstanceFile>), Failure> {
    match (&source.input, &source.instance) {
        (Some(p), None) => Ok((read_matrix_csv(p)?, None)),
        (None, Some(p)) => {
            let inst = read_instance(p)?;
            let v = ctrb(&inst.system()?, inst.n)?;
            Ok((v, Some(inst)))
        }
        _ => Err(Failure::Usage("give --input or --instance".into())),
    }
}

#[derive(Serialize)]
struct PSummary {
    r: usize,
    image_condition_ok: bool,
    max_residual: f64,
    min_p_beyond_r: Option<f64>,
}

impl PSummary {
    fn new(p: &PVector) -> Self {
        Self {
            r: p.r,
            image_condition_ok: p.image_condition_ok,
            max_residual: p.max_residual,
            min_p_beyond_r: p.values.iter().skip(p.r).copied().reduce(f64::min),
        }
    }
}

#[derive(Serialize)]
struct CertifyReport {
    #[serde(flatten)]
    certificate: FailureCertificate,
    p: PSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    unimodality: Option<UnimodalityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    drastic: Option<FailureCertificate>,
}

#[derive(Serialize)]
struct CertifyError {
    error: &'static str,
    message: String,
    p: PSummary,
}

pub fn certify(args: &CertifyArgs, out: &Path) -> Result<(), Failure> {
    let (v, inst) = load_matrix(&args.source)?;
    let p = p_vector(&v)?;
    if !p.image_condition_ok {
        let message = format!(
            "columns leave the span of the leading rank-{} block (residual {:e})",
            p.r, p.max_residual
        );
        save(out, "certificate.json", &CertifyError { error: "image_condition", message: message.clone(), p: PSummary::new(&p) })?;
        return Err(Failure::Precondition(format!("image condition violated: {message}")));
    }
    write_two_column(out.join("p.txt"), &p.values)?;
    let certificate = if args.full_scan {
        failure_indices(&v, args.p_tol)?
    } else {
        critical_index(&v, args.p_tol)?
    };
    let unimodality = if v.rows() < v.cols() { Some(certify_unimodality(&v)?) } else { None };
    let drastic = match &inst {
        Some(i) => {
            let sys = i.system()?;
            Some(certify_drastic_failure(&sys.a, &sys.b, i.n)?)
        }
        None => None,
    };
    println!(
        "route: {:?}, critical index: {:?}, failure indices: {}",
        certificate.route,
        certificate.critical_index,
        certificate.failure_indices.len()
    );
    save(out, "certificate.json", &CertifyReport { certificate, p: PSummary::new(&p), unimodality, drastic })
}

/// V, y and the planted solution when an instance supplies one.
fn load_problem(
    source: &InputArgs,
    rhs: &Option<std::path::PathBuf>,
) -> Result<(Matrix, Vec<f64>, Option<Vec<f64>>), Failure> {
    let (v, inst) = load_matrix(source)?;
    match (inst, rhs) {
        (None, Some(r)) => Ok((v, read_vector_csv(r)?, None)),
        (None, None) => Err(Failure::Usage("--input needs --rhs".into())),
        (Some(i), _) => {
            let fuel = i.to_fuel()?;
            let y = i.y.clone().unwrap_or_else(|| fuel.y.clone());
            let truth = i.u_true.as_ref().map(|_| fuel.stacked_u());
            Ok((v, y, truth))
        }
    }
}

#[derive(Serialize)]
struct TruthComparison {
    support: Vec<usize>,
    max_abs_error: f64,
    recovered: bool,
}

impl TruthComparison {
    fn new(u: &[f64], truth: &[f64], support: &[usize]) -> Self {
        let max_abs_error = u.iter().zip(truth).fold(0.0f64, |w, (a, b)| w.max((a - b).abs()));
        let true_support: Vec<usize> = truth
            .iter()
            .enumerate()
            .filter(|(_, x)| **x != 0.0)
            .map(|(i, _)| i + 1)
            .collect();
        Self {
            recovered: true_support == support,
            support: true_support,
            max_abs_error,
        }
    }
}

#[derive(Serialize)]
struct BpReport {
    #[serde(flatten)]
    result: BpResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    truth: Option<TruthComparison>,
}

pub fn solve_bp(args: &SolveArgs, out: &Path) -> Result<(), Failure> {
    let (v, y, truth) = load_problem(&args.source, &args.rhs)?;
    let opts = BpOptions {
        feas_tol: args.feas_tol,
        threshold: args.threshold,
        ..BpOptions::default()
    };
    let result = solve_bp_with(&v, &y, &opts)?;
    let sol = &result.solution;
    let status = sol.status;
    write_two_column(out.join("bp_stem.txt"), &sol.u)?;
    let truth = truth.map(|t| TruthComparison::new(&sol.u, &t, &sol.support));
    println!("status: {status:?}, objective: {}, support: {:?}", sol.objective, sol.support);
    save(out, "bp.json", &BpReport { result, truth })?;
    match status {
        SolveStatus::Optimal => Ok(()),
        SolveStatus::Infeasible => Err(Failure::Infeasible("V u = y has no solution".into())),
        s => Err(Failure::Precondition(format!("solver ended with status {s:?}"))),
    }
}

#[derive(Serialize)]
struct L0Output {
    #[serde(flatten)]
    report: L0Report,
    count: usize,
}

pub fn solve_l0(args: &L0Args, out: &Path) -> Result<(), Failure> {
    let (v, y, _) = load_problem(&args.source, &args.rhs)?;
    let max_card = args.max_card.unwrap_or(v.rows());
    let report = solve_l0_with_budget(&v, &y, max_card, args.res_tol, args.budget)?;
    let stem = report
        .solutions_found
        .first()
        .map(|s| s.u.clone())
        .unwrap_or_else(|| vec![0.0; v.cols()]);
    write_two_column(out.join("l0_stem.txt"), &stem)?;
    println!(
        "min cardinality: {:?}, solutions: {}, exhaustive: {}",
        report.min_cardinality,
        report.count(),
        report.exhaustive
    );
    let none = report.min_cardinality.is_none() && report.exhaustive;
    let count = report.count();
    save(out, "l0.json", &L0Output { report, count })?;
    if none {
        Err(Failure::Infeasible(format!("no solution with at most {max_card} nonzeros")))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn impulse_pairs() {
        assert_eq!(parse_impulse("0:+1"), Ok((0, 1.0)));
        assert_eq!(parse_impulse("9:-1"), Ok((9, -1.0)));
        assert!(parse_impulse("9").is_err());
        assert!(parse_impulse("-1:1").is_err());
        assert!(parse_impulse("1:inf").is_err());
    }
}
