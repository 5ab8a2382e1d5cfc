use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use quadzeta::exact::{int, rat_string};
use quadzeta::field::{local_split_type, parse_element, parse_field, primes_above, BaseField};
use quadzeta::global::{global_series, langlands_value, normalized_elliptic_weight};
use quadzeta::kloosterman::{euler_factor_at_2, kloosterman, Variant};
use quadzeta::verify::{run_check, CHECK_NAMES};
use quadzeta::{Error, Result};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "quadzeta", version, about = "Exact zeta functions of quadratic orders, orbital integrals, and their oracles")]
struct Cli {
    /// Output style: JSON lines or aligned tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct FieldDelta {
    /// Base field: Q or Q(sqrt:m).
    #[arg(long, default_value = "Q")]
    field: String,
    /// Algebraic integer, e.g. -4 or 3+2*w.
    #[arg(long, allow_hyphen_values = true)]
    delta: String,
}

#[derive(Subcommand)]
enum Command {
    /// Splitting data of the primes of S_delta (or of one prime with --p).
    Classify {
        #[command(flatten)]
        fd: FieldDelta,
        #[arg(long)]
        p: Option<i64>,
    },
    /// The ideal S_delta with its norm.
    Sgamma {
        #[command(flatten)]
        fd: FieldDelta,
    },
    /// The global orbital series: exact value at s = 1 and the exponential
    /// polynomial.
    Orbital {
        #[arg(long, default_value = "Q")]
        field: String,
        /// Algebraic integer, e.g. -4 or 3+2*w; not needed with --weight.
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<String>,
        /// Normalized section-6 weight for delta = tau^2 - 4*det_sign*p^k.
        #[arg(long, num_args = 4, allow_hyphen_values = true, value_names = ["TAU", "P", "K", "DET_SIGN"])]
        weight: Option<Vec<i64>>,
    },
    /// Zagier zeta data over Q: decomposition, L(s), Lambda(s), functional
    /// equation residual.
    Zagier {
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        re: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        im: f64,
    },
    /// One Kloosterman cell K_{a,d}.
    Kloosterman {
        #[arg(long)]
        a: i64,
        #[arg(long)]
        d: i64,
        #[arg(long)]
        p: i64,
        #[arg(long)]
        k: u32,
        /// +1 or -1: the sign of the 4p^k term in delta = m^2 + sign*4p^k.
        #[arg(long, allow_hyphen_values = true)]
        sign: i8,
    },
    /// Truncated 2-adic Euler factor of the Kloosterman Dirichlet series.
    Euler2 {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, value_enum, default_value_t = CliVariant::WithoutCc)]
        variant: CliVariant,
        #[arg(long, default_value_t = 18)]
        n: u32,
    },
    /// Brute-force verifiers.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Run named verification suites; exits nonzero if any fails.
    Verify {
        /// Checks to run; defaults to all of fe, arthur, congruence,
        /// oracle-local, oracle-tree, zagier-fe.
        checks: Vec<String>,
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Run suites from a key=value config file.
    Sweep {
        config: std::path::PathBuf,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Count lattices in the tree fixed by an integral matrix.
    Tree {
        /// Matrix entries a,b,c,d row-major.
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        gamma: Vec<i64>,
        #[arg(long)]
        p: u64,
    },
    /// Ideal counts of the order of discriminant delta by sublattice
    /// enumeration.
    Ideals {
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum CliVariant {
    WithCc,
    WithoutCc,
}

impl From<CliVariant> for Variant {
    fn from(v: CliVariant) -> Variant {
        match v {
            CliVariant::WithCc => Variant::WithCc,
            CliVariant::WithoutCc => Variant::WithoutCc,
        }
    }
}

fn emit(format: Format, value: &Value) {
    let out = std::io::stdout();
    let mut out = out.lock();
    match format {
        Format::Json => writeln!(out, "{}", value).unwrap(),
        Format::Table => {
            if let Value::Object(map) = value {
                let width = map.keys().map(|k| k.len()).max().unwrap_or(0);
                for (k, v) in map {
                    writeln!(out, "{:width$}  {}", k, v, width = width).unwrap();
                }
            } else {
                writeln!(out, "{}", value).unwrap();
            }
            writeln!(out).unwrap();
        }
    }
}

fn parse_pair(field: &str, delta: &str) -> Result<(BaseField, quadzeta::field::AlgebraicInt)> {
    let f = parse_field(field)?;
    let d = parse_element(delta, &f)?;
    Ok((f, d))
}

fn series_json(field: &str, delta: &str) -> Result<Value> {
    let (f, d) = parse_pair(field, delta)?;
    let s = global_series(&d, &f)?;
    Ok(json!({
        "field": f.to_string(),
        "delta": d.to_string(),
        "S": s.s_delta,
        "norm": s.s_delta.norm().to_string(),
        "value": rat_string(&langlands_value(&s)),
        "series": s.product,
    }))
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Classify { fd, p } => {
            let (f, d) = parse_pair(&fd.field, &fd.delta)?;
            let primes: Vec<_> = match p {
                Some(p) => primes_above(&f, &int(*p)),
                None => {
                    let s = global_series(&d, &f)?;
                    s.locals.into_iter().map(|(q, _, _)| q).collect()
                }
            };
            for q in primes {
                let (ty, n) = local_split_type(&d, &q)?;
                emit(cli.format, &json!({
                    "field": f.to_string(),
                    "delta": d.to_string(),
                    "p": q.p.to_string(),
                    "e": q.e,
                    "f": q.f,
                    "type": ty,
                    "n": n,
                }));
            }
            Ok(true)
        }
        Command::Sgamma { fd } => {
            let (f, d) = parse_pair(&fd.field, &fd.delta)?;
            let s = global_series(&d, &f)?;
            let pairs: Vec<Value> = s
                .s_delta
                .factors
                .iter()
                .map(|(q, e)| json!([q.p.to_string(), e]))
                .collect();
            emit(cli.format, &json!({
                "field": f.to_string(),
                "delta": d.to_string(),
                "S": pairs,
                "norm": s.s_delta.norm().to_string(),
            }));
            Ok(true)
        }
        Command::Orbital { field, delta, weight } => {
            if let Some(w) = weight {
                let nw = normalized_elliptic_weight(w[0], w[1] as u64, w[2] as u32, w[3] as i8)?;
                emit(cli.format, &json!({
                    "tau": w[0], "p": w[1], "k": w[2], "det_sign": w[3],
                    "weight": nw,
                    "weight_f64": nw.to_f64(),
                }));
            } else {
                let delta = delta
                    .as_ref()
                    .ok_or_else(|| Error::Invalid("--delta or --weight is required".into()))?;
                let v = series_json(field, delta)?;
                emit(cli.format, &v);
            }
            Ok(true)
        }
        Command::Zagier { delta, re, im } => {
            let f = BaseField::rational();
            let d = quadzeta::field::AlgebraicInt::from_i64(*delta);
            let dec = quadzeta::zagier::zagier_decompose(&d, &f)?;
            let s = Complex64::new(*re, *im);
            let l = quadzeta::zagier::zagier_l(s, *delta)?;
            let lambda = quadzeta::zagier::completed_lambda(s, *delta)?;
            let residual = quadzeta::zagier::lambda_residual(s, *delta)?;
            let (fund, cond) = quadzeta::zagier::fundamental_discriminant(*delta)?;
            let norms: Vec<String> = dec.admissible.iter().map(|i| i.norm().to_string()).collect();
            emit(cli.format, &json!({
                "delta": delta,
                "fundamental_discriminant": fund,
                "conductor": cond,
                "admissible_norms": norms,
                "Z": dec.z,
                "s": [re, im],
                "L": [l.re, l.im],
                "Lambda": [lambda.re, lambda.im],
                "fe_residual": residual,
            }));
            Ok(true)
        }
        Command::Kloosterman { a, d, p, k, sign } => {
            let cell = kloosterman(*a, *d, *p, *k, *sign)?;
            emit(cli.format, &serde_json::to_value(&cell).unwrap());
            Ok(true)
        }
        Command::Euler2 { k, s, variant, n } => {
            let e = euler_factor_at_2(*k, Complex64::new(*s, 0.0), (*variant).into(), *n)?;
            let mut v = serde_json::to_value(&e).unwrap();
            if let Value::Object(map) = &mut v {
                map.insert(
                    "displayed_closed_form".into(),
                    json!(quadzeta::kloosterman::displayed_closed_form(*k)),
                );
            }
            emit(cli.format, &v);
            Ok(true)
        }
        Command::Oracle(cmd) => {
            match cmd {
                OracleCommand::Tree { gamma, p } => {
                    if gamma.len() != 4 {
                        return Err(Error::Invalid("--gamma needs 4 entries a,b,c,d".into()));
                    }
                    let g = [[gamma[0], gamma[1]], [gamma[2], gamma[3]]];
                    let t = quadzeta::oracle::tree_orbital_oracle(&g, *p)?;
                    emit(cli.format, &serde_json::to_value(&t).unwrap());
                }
                OracleCommand::Ideals { delta, n } => {
                    let counts = quadzeta::oracle::global_ideal_count_oracle(*delta, *n)?;
                    emit(cli.format, &json!({
                        "delta": delta,
                        "counts": &counts[1..],
                    }));
                }
            }
            Ok(true)
        }
        Command::Verify { checks, field, count, seed } => {
            let f = parse_field(field)?;
            let names: Vec<String> = if checks.is_empty() {
                CHECK_NAMES.iter().map(|s| s.to_string()).collect()
            } else {
                checks.clone()
            };
            let mut all_passed = true;
            for name in &names {
                let report = run_check(name, &f, *count, *seed)?;
                all_passed &= report.passed;
                emit(cli.format, &serde_json::to_value(&report).unwrap());
            }
            Ok(all_passed)
        }
        Command::Sweep { config } => {
            let text = std::fs::read_to_string(config)
                .map_err(|e| Error::Invalid(format!("cannot read {}: {}", config.display(), e)))?;
            let cfg = parse_sweep_config(&text)?;
            let mut all_passed = true;
            let mut sink: Box<dyn Write> = match &cfg.output {
                Some(path) => Box::new(
                    std::fs::File::create(path)
                        .map_err(|e| Error::Invalid(format!("cannot write {}: {}", path, e)))?,
                ),
                None => Box::new(std::io::stdout()),
            };
            for field in &cfg.fields {
                let f = parse_field(field)?;
                for name in &cfg.checks {
                    let report = run_check(name, &f, cfg.count, cfg.seed)?;
                    all_passed &= report.passed;
                    writeln!(sink, "{}", serde_json::to_value(&report).unwrap())
                        .map_err(|e| Error::Invalid(e.to_string()))?;
                }
            }
            Ok(all_passed)
        }
    }
}

struct SweepConfig {
    fields: Vec<String>,
    checks: Vec<String>,
    count: usize,
    seed: u64,
    output: Option<String>,
}

fn parse_sweep_config(text: &str) -> Result<SweepConfig> {
    let mut cfg = SweepConfig {
        fields: vec!["Q".to_string()],
        checks: CHECK_NAMES.iter().map(|s| s.to_string()).collect(),
        count: 50,
        seed: 7,
        output: None,
    };
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("line {}: expected key=value", lineno + 1)))?;
        let value = value.trim();
        match key.trim() {
            "field" | "fields" => {
                cfg.fields = value.split(',').map(|s| s.trim().to_string()).collect()
            }
            "checks" => cfg.checks = value.split(',').map(|s| s.trim().to_string()).collect(),
            "count" => {
                cfg.count = value
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad count '{}'", value)))?
            }
            "seed" => {
                cfg.seed = value
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad seed '{}'", value)))?
            }
            "output" => cfg.output = Some(value.to_string()),
            "parallelism" => {}
            other => return Err(Error::Invalid(format!("unknown key '{}'", other))),
        }
    }
    for name in &cfg.checks {
        if !CHECK_NAMES.contains(&name.as_str()) {
            return Err(Error::Invalid(format!("unknown check '{}'", name)));
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e);
            match e {
                Error::Guard(_) => ExitCode::from(3),
                Error::Invalid(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
