//! Subcommand execution.

use haa::asymptotic::{
    delta_min_with, gvb_delta, random_code_shape, DeltaMinOptions, ShapeOptions, SpectralShape,
};
use haa::codec::{encode_frame_trace, CodecSpec};
use haa::enumerator::{dmin_bound_curve, EnsembleEnumerator};
use haa::linear_code::{
    weight_enumerator, weight_enumerator_auto, BlockCodeSpec, CodeToken, WeMethod,
};
use haa::simulate::{
    ber_curve, bpsk_capacity_threshold, exit_curves, threshold_search, BerOptions, BerTarget,
    ExitOptions, StopRule, DEFAULT_EXIT_GRID, EXIT_METHODOLOGY,
};
use haa::EnsembleSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::*;
use crate::table::{Cell, Table};
use crate::CliError;

/// Frame length used by the Monte-Carlo commands when none is given.
pub const DEFAULT_BLOCK_LENGTH: usize = 8184;

fn outer_code(token: &str) -> Result<BlockCodeSpec, CliError> {
    let t: CodeToken = token
        .parse()
        .map_err(|e: haa::Error| CliError::Usage(e.to_string()))?;
    Ok(t.build()?)
}

/// Resolves `--length` / `--block-length`; without either, `default_n` is
/// rounded down to a multiple of `n`.
fn ensemble(
    outer: &str,
    stages: u8,
    length: Option<usize>,
    block_length: Option<usize>,
    default_n: Option<usize>,
) -> Result<EnsembleSpec, CliError> {
    let code = outer_code(outer)?;
    let stages = stages as usize;
    match (length, block_length) {
        (Some(l), _) => Ok(EnsembleSpec::new(code, l, stages)?),
        (None, Some(n)) => EnsembleSpec::with_block_length(code, n, stages)
            .map_err(|e| CliError::Usage(e.to_string())),
        (None, None) => match default_n {
            Some(n) => {
                let l = (n / code.n).max(1);
                Ok(EnsembleSpec::new(code, l, stages)?)
            }
            None => Err(CliError::Usage(
                "one of --length or --block-length is required".into(),
            )),
        },
    }
}

fn ensemble_of(a: &EnsembleArgs, default_n: Option<usize>) -> Result<EnsembleSpec, CliError> {
    ensemble(&a.outer, a.stages, a.length, a.block_length, default_n)
}

fn rate_of(s: &str) -> Result<f64, CliError> {
    parse_rate(s).map_err(CliError::Usage)
}

fn bits_string(bits: &[u8]) -> String {
    bits.iter()
        .map(|&b| if b == 0 { '0' } else { '1' })
        .collect()
}

pub fn execute(cmd: &Command) -> Result<Table, CliError> {
    match cmd {
        Command::CodeWe(a) => code_we(a),
        Command::EnsembleWe(a) => ensemble_we(a),
        Command::DminBound(a) => dmin_bound(a),
        Command::SpectralShape(a) => spectral_shape(a),
        Command::DeltaMin(a) => delta_min(a),
        Command::Gvb(a) => {
            let rate = rate_of(&a.rate)?;
            let mut t = Table::new(&["rate", "delta_gv"]);
            t.push(vec![rate.into(), gvb_delta(rate)?.into()]);
            Ok(t)
        }
        Command::Capacity(a) => {
            let rate = rate_of(&a.rate)?;
            let mut t = Table::new(&["rate", "ebn0_db"]);
            t.push(vec![rate.into(), bpsk_capacity_threshold(rate)?.into()]);
            t.diagnostics = Some(json!({
                "method": "bisection on J(sigma_L) = R with adaptive Simpson quadrature, sigma = 2/sigma_L, Eb/N0 = 1/(2 R sigma^2)"
            }));
            Ok(t)
        }
        Command::Encode(a) => encode(a),
        Command::Ber(a) => ber(a),
        Command::Exit(a) => exit(a),
        Command::Threshold(a) => threshold(a),
        Command::Replay(_) => unreachable!("replay is resolved before execution"),
    }
}

fn code_we(a: &CodeWeArgs) -> Result<Table, CliError> {
    let code = outer_code(&a.outer)?;
    let spectrum = match a.method {
        MethodArg::Auto => weight_enumerator_auto(&code)?,
        MethodArg::ClosedForm => weight_enumerator(&code, WeMethod::ClosedForm)?,
        MethodArg::BruteForce => weight_enumerator(&code, WeMethod::BruteForce)?,
    };
    let mut t = Table::new(&["weight", "count", "ln_count"]);
    for (w, (c, l)) in spectrum.counts.iter().zip(spectrum.logs()).enumerate() {
        t.push(vec![w.into(), Cell::Big(c.to_string()), l.into()]);
    }
    Ok(t)
}

fn ensemble_we(a: &EnsembleWeArgs) -> Result<Table, CliError> {
    let ens = ensemble_of(&a.ensemble, None)?;
    let max_h = a.max_h.unwrap_or(ens.block_length());
    let e = EnsembleEnumerator::new(&ens, max_h)?;
    let mut t = Table::new(&["h", "ln_avg", "avg"]);
    for h in 0..=e.max_weight() {
        let l = e.log_avg(h);
        t.push(vec![h.into(), l.into(), l.exp().into()]);
    }
    Ok(t)
}

fn dmin_bound(a: &DminBoundArgs) -> Result<Table, CliError> {
    let code = outer_code(&a.outer)?;
    if let Some(&n) = a.block_lengths.iter().find(|&&n| n == 0 || n % code.n != 0) {
        return Err(CliError::Usage(format!(
            "block length {n} is not a positive multiple of n = {}",
            code.n
        )));
    }
    let bounds = dmin_bound_curve(&code, a.stages as usize, &a.block_lengths, a.target)?;
    let mut t = Table::new(&[
        "block_length",
        "d_star",
        "ln_bound_at_d_star",
        "bound_at_d_star",
    ]);
    for b in bounds {
        let ln = b.ln_bound_at_d_star();
        t.push(vec![
            b.block_length.into(),
            b.d_star.into(),
            ln.into(),
            ln.exp().into(),
        ]);
    }
    Ok(t)
}

fn spectral_shape(a: &SpectralShapeArgs) -> Result<Table, CliError> {
    if !(0.0..=1.0).contains(&a.from) || !(0.0..=1.0).contains(&a.to) || a.from > a.to {
        return Err(CliError::Usage(format!(
            "need 0 <= from <= to <= 1, got {} and {}",
            a.from, a.to
        )));
    }
    let code = outer_code(&a.outer)?;
    let opts = ShapeOptions {
        grid_steps: a.grid_steps,
        ..ShapeOptions::default()
    };
    let shape = SpectralShape::for_outer(&code, a.stages as usize, opts)?;
    let deltas: Vec<f64> = match a.points {
        0 => Vec::new(),
        1 => vec![a.from],
        p => (0..p)
            .map(|i| a.from + (a.to - a.from) * i as f64 / (p - 1) as f64)
            .collect(),
    };
    let curve = shape.curve(&deltas)?;
    let mut t = Table::new(&["delta", "r", "r_random", "beta0", "beta1"]);
    for s in curve.samples {
        let random = random_code_shape(shape.rate(), s.delta)?;
        t.push(vec![
            s.delta.into(),
            s.r.into(),
            random.into(),
            s.beta0.into(),
            s.beta1.into(),
        ]);
    }
    Ok(t)
}

fn delta_min(a: &DeltaMinArgs) -> Result<Table, CliError> {
    let code = outer_code(&a.outer)?;
    let opts = ShapeOptions {
        grid_steps: a.grid_steps,
        ..ShapeOptions::default()
    };
    let shape = SpectralShape::for_outer(&code, a.stages as usize, opts)?;
    let report = delta_min_with(
        &shape,
        DeltaMinOptions {
            epsilon: a.epsilon,
            resolution: a.resolution,
            scan_step: a.scan_step,
            sensitivity: !a.no_sensitivity,
        },
    )?;
    let mut t = Table::new(&["ensemble", "rate", "delta_min", "delta_gv"]);
    t.push(vec![
        report.ensemble.clone().into(),
        report.rate.into(),
        report.delta_min.into(),
        report.delta_gv.into(),
    ]);
    t.diagnostics = Some(serde_json::to_value(&report).expect("report serializes"));
    Ok(t)
}

fn encode(a: &EncodeArgs) -> Result<Table, CliError> {
    // One outer codeword unless a length is given.
    let ens = ensemble(
        &a.ensemble.outer,
        a.ensemble.stages,
        a.ensemble.length,
        a.ensemble.block_length,
        Some(1),
    )?;
    let codec = CodecSpec::random(ens, a.seed)?;
    let k = codec.message_length();
    let message: Vec<u8> = match &a.message {
        Some(s) => {
            let bits: Vec<u8> = s
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(CliError::Usage(format!(
                        "message '{s}' must contain only 0 and 1"
                    ))),
                })
                .collect::<Result<_, _>>()?;
            if bits.len() != k {
                return Err(CliError::Usage(format!(
                    "message has {} bits, the frame carries {k}",
                    bits.len()
                )));
            }
            bits
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            (0..k).map(|_| rng.random_range(0..2u8)).collect()
        }
    };
    let trace = encode_frame_trace(&codec, &message)?;
    if let Some(path) = &a.dump_perm {
        let perms = json!({
            "seed": a.seed,
            "pi1": codec.pi1().permutation(),
            "pi2": codec.pi2().map(|p| p.permutation()),
        });
        let text = serde_json::to_string(&perms).expect("permutations serialize");
        std::fs::write(crate::resolve_output(path), text + "\n")
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let mut t = Table::new(&["word", "bits"]);
    t.push(vec!["message".into(), bits_string(&message).into()]);
    t.push(vec!["outer".into(), bits_string(&trace.outer).into()]);
    t.push(vec!["first".into(), bits_string(&trace.first).into()]);
    t.push(vec!["frame".into(), bits_string(&trace.frame).into()]);
    Ok(t)
}

fn ber(a: &BerArgs) -> Result<Table, CliError> {
    let target = match (&a.outer, a.uncoded) {
        (_, true) => BerTarget::Uncoded {
            frame_bits: a.frame_bits,
        },
        (Some(outer), false) => {
            let ens = ensemble(
                outer,
                a.stages,
                a.length,
                a.block_length,
                Some(DEFAULT_BLOCK_LENGTH),
            )?;
            BerTarget::Coded(CodecSpec::random(ens, a.mc.seed)?)
        }
        (None, false) => return Err(CliError::Usage("ber needs --outer or --uncoded".into())),
    };
    let opts = BerOptions {
        stop: StopRule {
            min_frame_errors: a.min_frame_errors,
            max_frames: a.max_frames,
        },
        max_iterations: a.max_iterations,
        seed: a.mc.seed,
        workers: a.mc.workers,
    };
    let report = ber_curve(&target, &a.ebn0, &opts)?;
    let mut t = Table::new(&[
        "ebn0_db",
        "frames",
        "bit_errors",
        "frame_errors",
        "ber",
        "fer",
        "iter_mean",
        "ber_lo",
        "ber_hi",
        "fer_lo",
        "fer_hi",
    ]);
    for p in &report.points {
        t.push(vec![
            p.ebn0_db.into(),
            p.frames.into(),
            p.bit_errors.into(),
            p.frame_errors.into(),
            p.ber.into(),
            p.fer.into(),
            p.iter_mean.into(),
            p.ber_interval.0.into(),
            p.ber_interval.1.into(),
            p.fer_interval.0.into(),
            p.fer_interval.1.into(),
        ]);
    }
    t.diagnostics = Some(json!({
        "ensemble": report.ensemble,
        "rate": report.rate,
        "message_bits": report.message_bits,
        "stop": report.stop,
        "max_iterations": report.max_iterations,
        "intervals": "95% Wilson",
    }));
    Ok(t)
}

fn exit_options(
    grid: &Option<Vec<f64>>,
    frames: usize,
    activations: usize,
    mc: &MonteCarloArgs,
) -> ExitOptions {
    ExitOptions {
        grid: grid.clone().unwrap_or_else(|| DEFAULT_EXIT_GRID.to_vec()),
        frames_per_point: frames,
        inner_activations: activations,
        seed: mc.seed,
        workers: mc.workers,
        ..ExitOptions::default()
    }
}

fn exit(a: &ExitArgs) -> Result<Table, CliError> {
    let ens = ensemble_of(&a.ensemble, Some(DEFAULT_BLOCK_LENGTH))?;
    let block_length = ens.block_length();
    let codec = CodecSpec::random(ens, a.mc.seed)?;
    let opts = exit_options(&a.grid, a.frames_per_point, a.activations, &a.mc);
    let (outer, inner) = exit_curves(&codec, a.ebn0, &opts)?;
    let mut t = Table::new(&["i_a", "i_e_outer", "i_e_inner"]);
    for (o, i) in outer.samples.iter().zip(&inner.samples) {
        t.push(vec![o.0.into(), o.1.into(), i.1.into()]);
    }
    t.diagnostics = Some(json!({
        "block_length": block_length,
        "methodology": EXIT_METHODOLOGY,
    }));
    Ok(t)
}

fn threshold(a: &ThresholdArgs) -> Result<Table, CliError> {
    let ens = ensemble_of(&a.ensemble, Some(DEFAULT_BLOCK_LENGTH))?;
    let mut opts = exit_options(&a.grid, a.frames_per_point, a.activations, &a.mc);
    opts.step_db = a.step;
    opts.activation_sensitivity = !a.no_sensitivity;
    let (lo, hi) = match a.window.as_deref() {
        Some(&[lo, hi]) => (lo, hi),
        Some(w) => {
            return Err(CliError::Usage(format!(
                "--window takes two values lo,hi; got {}",
                w.len()
            )))
        }
        None => {
            let cap = bpsk_capacity_threshold(ens.rate())?;
            let lo = (cap / a.step).floor() * a.step;
            (lo, lo + 3.0)
        }
    };
    let report = threshold_search(&ens, lo, hi, &opts)?;
    let mut t = Table::new(&["ensemble", "rate", "threshold_db", "capacity_db", "gap_db"]);
    t.push(vec![
        report.ensemble.clone().into(),
        report.rate.into(),
        report.threshold_db.into(),
        report.capacity_db.into(),
        report.gap_db.into(),
    ]);
    t.diagnostics = Some(serde_json::to_value(&report).expect("report serializes"));
    Ok(t)
}
