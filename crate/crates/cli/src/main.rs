use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use iiaffine::al_models::{holonomy_numeric, holonomy_phase, unit_complex, DEFAULT_RK4_STEPS};
use iiaffine::dual_bundle::{intersection_count, intersection_number, BundleSection, SectionKind, TorusBundleChart};
use iiaffine::forms::selftest::{self, SelftestConfig};
use iiaffine::io::{parse_rvector_list, rvector_strings};
use iiaffine::scalar::{format_rational, Scalar};
use iiaffine::{
    builtin_presentation, verify_all, AffineTier, EnhancedALModel, Error, FibreLoop, LatticePointSet,
    QuotientPresentation, Rational,
};
use num_traits::Zero;
use serde_json::json;

const RK4_TOLERANCE: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(
    name = "iiaffine",
    version,
    about = "Exact lattice-point, Bohr-Sommerfeld and Riemann-Roch checks for integral-integral affine manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Builtin presentation: torus-<n>, klein or kodaira-thurston.
    #[arg(long, global = true, conflicts_with = "input")]
    builtin: Option<String>,

    /// Scale factor for the builtin presentation.
    #[arg(long, global = true, default_value_t = 1)]
    scale: u32,

    /// Presentation JSON file.
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Maximum word length for orbit enumeration.
    #[arg(long, global = true, default_value_t = iiaffine::DEFAULT_WORD_BOUND)]
    word_bound: usize,

    #[arg(long, global = true, default_value_t = 1_000_000)]
    mc_samples: u64,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the generator tier and that the domain tiles under the group.
    Validate {
        #[arg(long, default_value_t = 4096)]
        samples: usize,
    },
    /// Run the full verification chain and print the report.
    Verify,
    /// Exact and Monte Carlo volume of the fundamental domain.
    Volume,
    /// Integral points of the base.
    Lattice,
    /// Bohr-Sommerfeld fibres.
    Bs,
    /// Holonomy of the prequantum connection around a fibre loop.
    Holonomy {
        /// Base point, comma-separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Winding numbers, comma-separated integers.
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        /// Cross-check against RK4 parallel transport.
        #[arg(long)]
        numeric: bool,
        #[arg(long, default_value_t = DEFAULT_RK4_STEPS)]
        steps: usize,
    },
    /// Intersection of two sections of the torus bundle.
    Intersect {
        #[arg(long, value_parser = parse_section)]
        a: SectionKind,
        #[arg(long, value_parser = parse_section)]
        b: SectionKind,
    },
    /// Symbolic differential-form identities on seeded random forms.
    FormsSelftest {
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
        #[arg(long, hide = true)]
        inject_sign_bug: bool,
    },
}

fn parse_section(s: &str) -> Result<SectionKind, String> {
    SectionKind::from_name(s).ok_or_else(|| {
        let names: Vec<_> = SectionKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown section `{s}`; expected one of {}", names.join(", "))
    })
}

enum Failure {
    Verification(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::Shape(_)
            | Error::UnknownBuiltin(_)
            | Error::Invalid(_)
            | Error::Degenerate { .. }
            | Error::Singular
            | Error::Ambient(_) => Failure::Usage(e.to_string()),
            _ => Failure::Verification(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn load(cli: &Cli) -> Result<QuotientPresentation, Failure> {
    match (&cli.builtin, &cli.input) {
        (Some(name), None) => Ok(builtin_presentation(name, cli.scale)?),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            Ok(QuotientPresentation::from_json(&text)?)
        }
        _ => Err(Failure::Usage("exactly one of --builtin or --input is required".into())),
    }
}

fn emit(cli: &Cli, human: String, value: serde_json::Value) {
    match cli.format {
        Format::Human => print!("{human}"),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("json values serialize")
        ),
    }
}

fn points_json(set: &LatticePointSet) -> serde_json::Value {
    set.iter().map(rvector_strings).collect::<Vec<_>>().into()
}

fn points_human(set: &LatticePointSet) -> String {
    set.iter().fold(String::new(), |mut out, p| {
        let _ = writeln!(out, "  ({})", rvector_strings(p).join(", "));
        out
    })
}

fn validate(cli: &Cli, samples: usize) -> Outcome {
    let q = load(cli)?;
    let tier = q.tier();
    if let Err(e) = q.require_tier(AffineTier::IntegralIntegralAffine) {
        emit(
            cli,
            format!("{}: invalid\n", q.label()),
            json!({"label": q.label(), "tier": tier, "valid": false, "error": e.to_string()}),
        );
        eprintln!("{e}");
        return Ok(false);
    }
    let report = q.validate_tiling(samples, cli.word_bound, cli.seed)?;
    let valid = report.is_clean();
    let mut human = format!(
        "{}: tier {tier:?}\ntiling: {} samples, {} uncovered, {} covered more than once\n",
        q.label(),
        report.samples,
        report.uncovered(),
        report.overcovered()
    );
    human.push_str(if valid {
        "valid\n"
    } else {
        "invalid: domain does not tile\n"
    });
    emit(
        cli,
        human,
        json!({"label": q.label(), "tier": tier, "valid": valid, "tiling": report}),
    );
    Ok(valid)
}

fn verify(cli: &Cli) -> Outcome {
    let q = load(cli)?;
    let report = verify_all(&q, cli.word_bound, cli.mc_samples, cli.seed)?;
    let mark = |b: bool| if b { "pass" } else { "FAIL" };
    let mut h = String::new();
    let _ = writeln!(h, "{} (n = {})", report.label, report.n);
    let _ = writeln!(h, "  vol(B)        = {}", report.vol_b);
    let _ = writeln!(h, "  |B_Z|         = {}", report.count_bz);
    let _ = writeln!(h, "  |BS|          = {}", report.count_bs);
    let _ = writeln!(h, "  RR(M)         = {}   [{}]", report.rr, report.rr_method);
    match report.intersection_signed {
        Some(s) => {
            let _ = writeln!(h, "  D . Z_0       = {s}");
        }
        None => {
            let _ = writeln!(h, "  |D n Z_0|     = {} (unsigned)", report.intersection_unsigned);
        }
    }
    if let Some(mc) = &report.monte_carlo {
        let _ = writeln!(
            h,
            "  Monte Carlo   = {:.6} in [{:.6}, {:.6}] ({} samples)",
            mc.estimate.estimate, mc.estimate.lower, mc.estimate.upper, mc.estimate.samples
        );
    }
    let p = report.passes;
    let _ = writeln!(h, "  downstairs vol(B) = |B_Z|      {}", mark(p.downstairs));
    let _ = writeln!(h, "  BS = B_Z                       {}", mark(p.bs_equals_lattice));
    let _ = writeln!(h, "  upstairs RR(M) = |BS|          {}", mark(p.upstairs));
    let _ = writeln!(h, "  intersection                   {}", mark(p.intersection));
    for w in &report.warnings {
        let _ = writeln!(h, "warning: {w}");
        if cli.format == Format::Json {
            eprintln!("warning: {w}");
        }
    }
    for n in &report.notes {
        let _ = writeln!(h, "note: {n}");
    }
    emit(cli, h, serde_json::to_value(&report).expect("report serializes"));
    Ok(report.passed())
}

fn volume(cli: &Cli) -> Outcome {
    let q = load(cli)?;
    let exact = q.volume();
    let mc = (cli.mc_samples > 0).then(|| q.monte_carlo_volume(cli.mc_samples, cli.seed));
    let mut h = format!("{}: vol = {}\n", q.label(), exact);
    if let Some(mc) = &mc {
        let _ = writeln!(
            h,
            "Monte Carlo: {:.6} in [{:.6}, {:.6}]",
            mc.estimate, mc.lower, mc.upper
        );
    }
    emit(
        cli,
        h,
        json!({"label": q.label(), "volume": format_rational(&exact), "monte_carlo": mc}),
    );
    Ok(mc.is_none_or(|m| m.contains(exact.approx_f64())))
}

fn lattice(cli: &Cli, bs: bool) -> Outcome {
    let q = load(cli)?;
    let set = if bs {
        iiaffine::al_models::bohr_sommerfeld_set(&q, cli.word_bound)?
    } else {
        q.integral_points(cli.word_bound)?
    };
    let what = if bs {
        "Bohr-Sommerfeld fibres"
    } else {
        "integral points"
    };
    let h = format!("{}: {} {what}\n{}", q.label(), set.len(), points_human(&set));
    emit(
        cli,
        h,
        json!({"label": q.label(), "count": set.len(), "points": points_json(&set)}),
    );
    Ok(true)
}

fn holonomy(cli: &Cli, x: &str, m: &str, numeric: bool, steps: usize) -> Outcome {
    let x = parse_rvector_list(x)?;
    let m: Vec<i64> = m
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("not an integer: `{s}`")))
        })
        .collect::<Result<_, _>>()?;
    let lp = FibreLoop::new(x.clone(), m)?;
    let model = EnhancedALModel::around(&x)?;
    let phase = holonomy_phase(&model, &lp)?;
    let value = unit_complex(&phase);
    let shown = if phase.is_zero() {
        "1".to_string()
    } else {
        format!("exp(2πi·{}) = {}", phase, complex_text(&phase, value))
    };
    let mut h = format!("{shown}\n");
    let mut ok = true;
    let mut numeric_json = serde_json::Value::Null;
    if numeric {
        let z = holonomy_numeric::<f64>(&model, &lp, steps)?;
        let err = (z - value).norm();
        ok = err < RK4_TOLERANCE;
        let _ = writeln!(
            h,
            "RK4 ({steps} steps): {:.12}{:+.12}i, |difference| = {err:.3e}",
            z.re, z.im
        );
        numeric_json = json!({"steps": steps, "re": z.re, "im": z.im, "error": err, "agrees": ok});
    }
    emit(
        cli,
        h,
        json!({"phase": format_rational(&phase), "re": value.re, "im": value.im, "numeric": numeric_json}),
    );
    Ok(ok)
}

fn complex_text(phase: &Rational, z: num_complex::Complex<f64>) -> String {
    let quarter = phase * Rational::from_integer(4.into());
    if quarter.is_integer() {
        return match quarter.to_integer().to_string().as_str() {
            "1" => "i".into(),
            "2" => "-1".into(),
            "3" => "-i".into(),
            _ => "1".into(),
        };
    }
    format!("{:.12}{:+.12}i", z.re, z.im)
}

fn intersect(cli: &Cli, a: SectionKind, b: SectionKind) -> Outcome {
    let q = load(cli)?;
    let n = q.dim();
    let (sa, sb) = (BundleSection::of_kind(a, n), BundleSection::of_kind(b, n));
    let chart = TorusBundleChart::over(&q);
    let count = intersection_count(&sa, &sb, &chart, &q, cli.word_bound)?;
    let signed = if q.is_orientable() {
        Some(intersection_number(&sa, &sb, &chart, &q, cli.word_bound)?)
    } else {
        None
    };
    let h = match signed {
        Some(s) => format!("{}: {} . {} = {s} ({count} points)\n", q.label(), a.name(), b.name()),
        None => format!(
            "{}: |{} n {}| = {count} (non-orientable, unsigned)\n",
            q.label(),
            a.name(),
            b.name()
        ),
    };
    emit(
        cli,
        h,
        json!({"label": q.label(), "a": a.name(), "b": b.name(), "signed": signed, "unsigned": count}),
    );
    Ok(true)
}

fn forms_selftest(cli: &Cli, max_dim: usize, inject_sign_bug: bool) -> Outcome {
    if max_dim == 0 || max_dim > 3 {
        return Err(Failure::Usage("--max-dim must be 1, 2 or 3".into()));
    }
    let cfg = SelftestConfig {
        seed: cli.seed,
        max_dim,
        mutate_wedge: inject_sign_bug,
        ..SelftestConfig::default()
    };
    let report = selftest::run(&cfg);
    let mut h = String::new();
    for s in &report.suites {
        let _ = writeln!(
            h,
            "{:<46} {:>4}/{:<4} {}",
            s.name,
            s.cases - s.failures,
            s.cases,
            if s.passed() { "pass" } else { "FAIL" }
        );
        if let Some(c) = &s.counterexample {
            let _ = writeln!(h, "  counterexample: {c}");
        }
    }
    emit(cli, h, serde_json::to_value(&report).expect("report serializes"));
    Ok(report.passed())
}

fn run(cli: &Cli) -> Outcome {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Validate { samples } => validate(cli, *samples),
        Command::Verify => verify(cli),
        Command::Volume => volume(cli),
        Command::Lattice => lattice(cli, false),
        Command::Bs => lattice(cli, true),
        Command::Holonomy { x, m, numeric, steps } => holonomy(cli, x, m, *numeric, *steps),
        Command::Intersect { a, b } => intersect(cli, *a, *b),
        Command::FormsSelftest {
            max_dim,
            inject_sign_bug,
        } => forms_selftest(cli, *max_dim, *inject_sign_bug),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
