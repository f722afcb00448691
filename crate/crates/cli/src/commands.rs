//! Subcommand implementations. Sweep points run in parallel and rows are
//! emitted in grid order; every command echoes its resolved configuration
//! as `#` comments so output files are self-describing.

mod verify;

use anyhow::{bail, Context};
use rayon::prelude::*;

use dqi_core::decoder::{build_decoder, lower_bound_experiment, DecoderPolicy, RhsAverage};
use dqi_core::instance::{
    make_opi, make_random, make_xorsat, DegreeDistribution, MaxLinSatInstance, RhsMode,
};
use dqi_core::noise::{
    expected_score_exact, noisy_sampler, sample_score_stats, tau_summary, NoiseModel,
};
use dqi_core::predictor::{
    build_a, coupling_d, expected_score_closed_form, largest_eigenvalue, principal_coefficients,
    score_bounds_sparsity, verify_distance_condition_with_budget,
};
use dqi_core::state::{build_dqi_state, AmplitudeVector, DqiCoefficients};

use crate::options::{
    Cli, Command, DecodeLabArgs, GenArgs, GenFamily, PredictArgs, RhsChoice, SimulateArgs,
    SweepArgs, WeightSpec,
};
use crate::report::{blank, float17, read_instance, write_text, Report};

pub enum Outcome {
    Success,
    VerificationFailed,
}

pub fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args)?,
        Command::Predict(args) => cmd_predict(args)?,
        Command::Simulate(args) => cmd_simulate(args)?,
        Command::Sweep(args) => cmd_sweep(args)?,
        Command::DecodeLab(args) => cmd_decode_lab(args)?,
        Command::Verify(args) => return verify::cmd_verify(args),
    }
    Ok(Outcome::Success)
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<()> {
    let (inst, out) = match args.family {
        GenFamily::Opi { p, n, r, seed, out } => {
            let r = r.unwrap_or_else(|| ((p / 2) as usize).max(1));
            (make_opi(p, n, r, seed)?, out)
        }
        GenFamily::Xorsat {
            m,
            n,
            deg,
            rhs,
            seed,
            out,
        } => {
            let dist = DegreeDistribution::new(deg.0)?;
            let mode = match rhs {
                RhsChoice::Zero => RhsMode::Zero,
                RhsChoice::Uniform => RhsMode::Uniform,
            };
            (make_xorsat(m, n, &dist, mode, seed)?, out)
        }
        GenFamily::Random {
            p,
            m,
            n,
            r,
            seed,
            out,
        } => (make_random(p, m, n, r, seed)?, out),
    };
    write_text(out.as_ref(), &inst.to_text())?;
    Ok(())
}

/// Resolves the degree weights, normalizing to a unit vector when asked.
fn resolve_weights(
    spec: &WeightSpec,
    inst: &MaxLinSatInstance,
    l: usize,
    unit: bool,
) -> anyhow::Result<(DqiCoefficients, &'static str)> {
    match spec {
        WeightSpec::Principal => {
            let d = coupling_d(inst.modulus().get() as u64, inst.r());
            let (_, coeffs) = principal_coefficients(inst.num_constraints(), l, d)?;
            Ok((coeffs, "principal"))
        }
        WeightSpec::Explicit(weights) => {
            if weights.len() != l + 1 {
                bail!(
                    "weight list has {} entries, expected l + 1 = {}",
                    weights.len(),
                    l + 1
                );
            }
            let coeffs = DqiCoefficients::new(weights.clone())?;
            let coeffs = if unit { coeffs.normalized()? } else { coeffs };
            Ok((coeffs, "explicit"))
        }
    }
}

fn normalized_state(
    inst: &MaxLinSatInstance,
    coeffs: &DqiCoefficients,
) -> anyhow::Result<AmplitudeVector> {
    Ok(build_dqi_state(inst, coeffs)?.normalized()?)
}

struct PredictionContext {
    distance_ok: Result<(), String>,
    lambda_max: f64,
    min_degree: usize,
    max_degree: usize,
}

fn prediction_context(
    inst: &MaxLinSatInstance,
    l: usize,
    dual_distance: Option<usize>,
) -> anyhow::Result<(MaxLinSatInstance, PredictionContext)> {
    let inst = match dual_distance {
        Some(d) => inst.clone().with_dual_distance(d),
        None => inst.clone(),
    };
    // A tight budget keeps the flagging path fast; undecided rows are
    // flagged, never silently predicted.
    let distance_ok =
        verify_distance_condition_with_budget(&inst, l, 2_000_000).map_err(|e| e.to_string());
    let d = coupling_d(inst.modulus().get() as u64, inst.r());
    let spec = build_a(inst.num_constraints(), l, d)?;
    let lambda_max = largest_eigenvalue(&spec);
    let degrees = inst.matrix().row_degrees();
    let min_degree = degrees.iter().copied().min().unwrap_or(0);
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    let ctx = PredictionContext {
        distance_ok,
        lambda_max,
        min_degree,
        max_degree,
    };
    Ok((inst, ctx))
}

/// The prediction cells shared by `predict` and `sweep`:
/// tau1, tauinf, lambda_max, predicted_s, lower, upper.
fn prediction_cells(
    inst: &MaxLinSatInstance,
    coeffs: &DqiCoefficients,
    ctx: &PredictionContext,
    noise: NoiseModel,
) -> anyhow::Result<(Vec<String>, Option<f64>)> {
    let tau = tau_summary(inst.matrix(), noise);
    let mut cells = vec![
        float17(tau.tau1()),
        float17(tau.tau_inf()),
        float17(ctx.lambda_max),
    ];
    let mut predicted = None;
    if ctx.distance_ok.is_ok() {
        let value = expected_score_closed_form(inst, coeffs, noise)?;
        let (lower, upper) =
            score_bounds_sparsity(inst, coeffs, noise, ctx.min_degree, ctx.max_degree)?;
        cells.push(float17(value));
        cells.push(float17(lower));
        cells.push(float17(upper));
        predicted = Some(value);
    } else {
        cells.extend([blank(), blank(), blank()]);
    }
    Ok((cells, predicted))
}

fn echo_instance_config(
    report: &mut Report,
    args_inst: &std::path::Path,
    inst: &MaxLinSatInstance,
) -> anyhow::Result<()> {
    report.config("instance", args_inst.display())?;
    report.config("p", inst.modulus().get())?;
    report.config("m", inst.num_constraints())?;
    report.config("n", inst.num_variables())?;
    report.config("r", inst.r())?;
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> anyhow::Result<()> {
    let inst = read_instance(&args.inst)?;
    let (coeffs, w_kind) = resolve_weights(&args.w, &inst, args.l, true)?;
    let (inst, ctx) = prediction_context(&inst, args.l, args.dual_distance)?;
    let rows: Vec<anyhow::Result<Vec<String>>> = args
        .eps
        .0
        .par_iter()
        .map(|&eps| {
            let noise = NoiseModel::new(eps)?;
            let (cells, _) = prediction_cells(&inst, &coeffs, &ctx, noise)?;
            let mut row = vec![float17(eps)];
            row.extend(cells);
            Ok(row)
        })
        .collect();

    let mut report = Report::open(args.out.as_ref())?;
    report.config("command", "predict")?;
    echo_instance_config(&mut report, &args.inst, &inst)?;
    report.config("l", args.l)?;
    report.config("w", w_kind)?;
    report.config("eps", format_grid(&args.eps.0))?;
    if let Err(reason) = &ctx.distance_ok {
        report.comment(&format!(
            "flagged: distance condition unverified, predictions omitted ({reason})"
        ))?;
    }
    report.header(&[
        "epsilon",
        "tau1",
        "tauinf",
        "lambda_max",
        "predicted_s",
        "lower_bound",
        "upper_bound",
    ])?;
    for row in rows {
        report.row(&row?)?;
    }
    report.finish()?;
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let inst = read_instance(&args.inst)?;
    let (coeffs, w_kind) = resolve_weights(&args.w, &inst, args.l, true)?;
    let state = normalized_state(&inst, &coeffs)?;
    let rows: Vec<anyhow::Result<Vec<String>>> = args
        .eps
        .0
        .par_iter()
        .enumerate()
        .map(|(i, &eps)| {
            let noise = NoiseModel::new(eps)?;
            let exact = expected_score_exact(&inst, &state, noise)?;
            let mut row = vec![float17(eps), float17(exact)];
            if args.sampled {
                let samples =
                    noisy_sampler(&state, noise, args.seed.wrapping_add(i as u64), args.shots)?;
                let (mean, std_err) = sample_score_stats(&inst, &samples)?;
                row.push(float17(mean));
                row.push(float17(std_err));
                row.push(args.shots.to_string());
            } else {
                row.extend([blank(), blank(), blank()]);
            }
            Ok(row)
        })
        .collect();

    let mut report = Report::open(args.out.as_ref())?;
    report.config("command", "simulate")?;
    echo_instance_config(&mut report, &args.inst, &inst)?;
    report.config("l", args.l)?;
    report.config("w", w_kind)?;
    report.config("eps", format_grid(&args.eps.0))?;
    report.config("sampled", args.sampled)?;
    if args.sampled {
        report.config("shots", args.shots)?;
        report.config("seed", args.seed)?;
    }
    report.header(&["epsilon", "exact_s", "sampled_s", "stderr", "shots"])?;
    for row in rows {
        report.row(&row?)?;
    }
    report.finish()?;
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> anyhow::Result<()> {
    let inst = read_instance(&args.inst)?;
    let (coeffs, w_kind) = resolve_weights(&args.w, &inst, args.l, true)?;
    let (inst, ctx) = prediction_context(&inst, args.l, args.dual_distance)?;
    let state = normalized_state(&inst, &coeffs)?;
    let rows: Vec<anyhow::Result<Vec<String>>> = args
        .eps
        .0
        .par_iter()
        .map(|&eps| {
            let noise = NoiseModel::new(eps)?;
            let (cells, predicted) = prediction_cells(&inst, &coeffs, &ctx, noise)?;
            let exact = expected_score_exact(&inst, &state, noise)?;
            let mut row = vec![float17(eps)];
            row.extend(cells);
            row.push(float17(exact));
            row.push(match predicted {
                Some(p) => float17((p - exact).abs()),
                None => blank(),
            });
            Ok(row)
        })
        .collect();

    let mut report = Report::open(args.out.as_ref())?;
    report.config("command", "sweep")?;
    echo_instance_config(&mut report, &args.inst, &inst)?;
    report.config("l", args.l)?;
    report.config("w", w_kind)?;
    report.config("eps", format_grid(&args.eps.0))?;
    if let Err(reason) = &ctx.distance_ok {
        report.comment(&format!(
            "flagged: distance condition unverified, predictions omitted ({reason})"
        ))?;
    }
    report.header(&[
        "epsilon",
        "tau1",
        "tauinf",
        "lambda_max",
        "predicted_s",
        "lower_bound",
        "upper_bound",
        "exact_s",
        "abs_error",
    ])?;
    for row in rows {
        report.row(&row?)?;
    }
    report.finish()?;
    Ok(())
}

fn cmd_decode_lab(args: DecodeLabArgs) -> anyhow::Result<()> {
    let inst = read_instance(&args.inst)?;
    if inst.modulus().get() != 2 || inst.r() != 1 {
        bail!("decode-lab requires a parity instance (p = 2, r = 1)");
    }
    let (coeffs, w_kind) = resolve_weights(&args.w, &inst, args.l, false)?;
    let policy = match &args.inject {
        Some(spec) => DecoderPolicy::Inject {
            drops: spec.0.clone(),
            seed: args.inject_seed,
        },
        None => DecoderPolicy::MinWeight,
    };
    let (table, partition) =
        build_decoder(&inst, args.l, &policy).context("decoder construction")?;
    let m = inst.num_constraints();
    let average = match args.samples {
        Some(samples) => RhsAverage::MonteCarlo {
            samples,
            seed: args.sample_seed,
        },
        None if m <= 10 => RhsAverage::Exhaustive,
        None => RhsAverage::MonteCarlo {
            samples: 200,
            seed: args.sample_seed,
        },
    };
    let rows: Vec<anyhow::Result<Vec<String>>> = args
        .eps
        .0
        .par_iter()
        .map(|&eps| {
            let noise = NoiseModel::new(eps)?;
            let outcome =
                lower_bound_experiment(&inst, &coeffs, noise, &table, &partition, average)?;
            Ok(vec![
                float17(eps),
                float17(outcome.gamma_max),
                float17(outcome.measured_mean),
                float17(outcome.bound_linear),
                float17(outcome.bound_squared),
                outcome.std_err.map(float17).unwrap_or_else(blank),
            ])
        })
        .collect();

    let mut report = Report::open(args.out.as_ref())?;
    report.config("command", "decode-lab")?;
    echo_instance_config(&mut report, &args.inst, &inst)?;
    report.config("l", args.l)?;
    report.config("w", w_kind)?;
    report.config("eps", format_grid(&args.eps.0))?;
    report.config(
        "inject",
        args.inject
            .as_ref()
            .map(|s| {
                s.0.iter()
                    .map(|(w, f)| format!("{w}:{f}"))
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .unwrap_or_else(|| "none".into()),
    )?;
    report.config("inject_seed", args.inject_seed)?;
    report.config(
        "average",
        match average {
            RhsAverage::Exhaustive => "exhaustive".to_string(),
            RhsAverage::MonteCarlo { samples, seed } => format!("montecarlo:{samples}:{seed}"),
        },
    )?;
    report.config("collisions", table.collisions())?;
    report.config("dropped", table.dropped())?;
    report.header(&[
        "epsilon",
        "gamma_max",
        "measured_mean",
        "bound_m1",
        "bound_m1sq",
        "stderr",
    ])?;
    for row in rows {
        report.row(&row?)?;
    }
    report.finish()?;
    Ok(())
}

fn format_grid(grid: &[f64]) -> String {
    grid.iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
