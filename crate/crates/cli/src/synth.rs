use trajloop::trace::synth::parse_segments;
use trajloop::trace::{generate, write_trace, SynthKind, SynthSpec, Trace, TraceFormat};

use crate::args::{Kind, SynthArgs};
use crate::CliError;

pub fn spec_from_args(args: &SynthArgs) -> Result<SynthSpec, CliError> {
    let segments = match &args.segments {
        Some(s) => parse_segments(s)?,
        None => Vec::new(),
    };
    let kind = match args.kind {
        Kind::RandomWalk => SynthKind::RandomWalk,
        Kind::Periodic => SynthKind::Periodic,
        Kind::Composite => SynthKind::Composite,
    };
    let length = match (args.length, kind) {
        (Some(n), _) => n,
        (None, SynthKind::Composite) => segments.iter().map(|s| s.1).sum(),
        (None, _) => return Err(CliError::Config("--length is required".into())),
    };
    let spec = SynthSpec {
        kind,
        dim: args.dim,
        length,
        period: args.period,
        noise_sigma: args.noise_sigma,
        step_scale: args.step_scale,
        segments,
        seed: args.seed,
    };
    spec.validate()?;
    Ok(spec)
}

fn output_format(args: &SynthArgs) -> TraceFormat {
    match args.format {
        Some(f) => f.into(),
        None if args.output.extension().is_some_and(|e| e == "bin") => TraceFormat::Binary,
        None => TraceFormat::Jsonl,
    }
}

pub fn run(args: &SynthArgs) -> Result<Trace, CliError> {
    let spec = spec_from_args(args)?;
    let trace = generate(&spec)?;
    write_trace(&args.output, &trace, output_format(args))?;
    Ok(trace)
}
