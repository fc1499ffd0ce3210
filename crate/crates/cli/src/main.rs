use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anuca::analysis::{
    ball, collision_search, image_window, min_determining_radius, post_surjectivity_lift,
    psi_invertibility_check, stable_injectivity_check, surjectivity_deficit, synthesize_inverse,
    uniform_post_surjectivity_radius, wrap_compatibility, Certificate, LiftProbe, StableVerdict,
};
use anuca::corpus::{builtin, check_expectation, BUILTIN_NAMES};
use anuca::engine::{apply_window_with_background, compose, PeriodizedMap};
use anuca::rules::file::RuleFile;
use anuca::universe::{Cell, CellSet, Cuboid};
use anuca::{Caps, Pattern, RuleConfig, Symbol};
use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

mod report;

use report::{Outcome, Report};

#[derive(Parser)]
#[command(name = "anuca", version, about = "Asynchronous non-uniform cellular automata: evaluation and certificates")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores). Never changes the output.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Replay every emitted certificate with the engine.
    #[arg(long, global = true)]
    verify: bool,
    /// Include wall time in the report.
    #[arg(long, global = true)]
    timing: bool,
    /// Enumeration cap (overrides ANUCA_CAP).
    #[arg(long, global = true)]
    cap: Option<u64>,
}

#[derive(Args)]
struct Rules {
    /// Rule file path, or `builtin:NAME`.
    #[arg(long)]
    rules: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Boundary {
    Periodic,
    Fixed,
}

#[derive(Subcommand)]
enum Command {
    /// Run the automaton on a box.
    Simulate {
        #[command(flatten)]
        rules: Rules,
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        /// Packed initial pattern over the window.
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 1)]
        steps: u32,
        #[arg(long, value_enum, default_value = "periodic")]
        boundary: Boundary,
        /// Symbol outside the window for `--boundary fixed`.
        #[arg(long, default_value_t = 0)]
        background: Symbol,
        /// Print a space-time diagram to stderr.
        #[arg(long)]
        render: bool,
    },
    /// Compose two configurations: `σ_rules ∘ σ_with`.
    Compose {
        #[command(flatten)]
        rules: Rules,
        #[arg(long)]
        with: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exact set of image patterns on a window.
    Image {
        #[command(flatten)]
        rules: Rules,
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        /// List every image pattern.
        #[arg(long)]
        list: bool,
    },
    /// Search for a pattern missing from the image.
    Surjectivity {
        #[command(flatten)]
        rules: Rules,
        #[arg(long, default_value_t = 3)]
        max_radius: u32,
    },
    /// Search for two configurations with the same image.
    Collisions {
        #[command(flatten)]
        rules: Rules,
        #[arg(long, default_value_t = 4)]
        max_radius: u32,
        /// Comma-separated background symbols (default: all).
        #[arg(long, value_delimiter = ',')]
        backgrounds: Vec<Symbol>,
    },
    /// Collision search on the configuration and its limit points.
    StableInjectivity {
        #[command(flatten)]
        rules: Rules,
        #[arg(long, default_value_t = 4)]
        max_radius: u32,
    },
    /// Synthesize a finite-memory left inverse.
    Inverse {
        #[command(flatten)]
        rules: Rules,
        #[arg(long, default_value_t = 3)]
        max_radius: u32,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Smallest radius whose image determines the preimage at a cell.
    DeterminingRadius {
        #[command(flatten)]
        rules: Rules,
        #[arg(long, allow_hyphen_values = true)]
        cell: String,
        #[arg(long, default_value_t = 6)]
        max_radius: u32,
    },
    /// Apply the periodization map of a box.
    Periodize {
        #[command(flatten)]
        rules: Rules,
        #[arg(long = "box", allow_hyphen_values = true)]
        period_box: String,
        #[arg(long)]
        input: String,
    },
    /// Decide bijectivity of the periodization map of a box.
    PsiCheck {
        #[command(flatten)]
        rules: Rules,
        #[arg(long = "box", allow_hyphen_values = true)]
        period_box: String,
    },
    /// Check that rules on the exterior boundary of a box match their wraps.
    WrapCheck {
        #[command(flatten)]
        rules: Rules,
        #[arg(long = "box", allow_hyphen_values = true)]
        period_box: String,
        /// Semicolon-separated offsets, e.g. `-1;0;1` (default: the memory).
        #[arg(long, allow_hyphen_values = true)]
        offsets: Option<String>,
    },
    /// Probe whether image flips lift to finite preimage changes.
    PostSurjectivity {
        #[command(flatten)]
        rules: Rules,
        #[arg(long, allow_hyphen_values = true)]
        cell: Option<String>,
        /// Lift set `E = [-r, r]^d`.
        #[arg(long, default_value_t = 1)]
        lift_radius: u32,
        #[arg(long, default_value_t = 16)]
        trials: u32,
        #[arg(long)]
        window_radius: Option<u32>,
        #[arg(long, default_value_t = 0)]
        background: Symbol,
        /// Report the smallest radius that works at every view class.
        #[arg(long)]
        uniform: bool,
        #[arg(long, default_value_t = 3)]
        max_radius: u32,
    },
    /// Re-check the expected verdicts of the built-in corpus.
    Corpus {
        /// Comma-separated builtin names (default: all).
        #[arg(long, value_delimiter = ',')]
        names: Vec<String>,
    },
}

struct Loaded {
    config: RuleConfig,
    hash: String,
}

fn load(spec: &str) -> Result<Loaded> {
    let file = match spec.strip_prefix("builtin:") {
        Some(name) => builtin(name)?.rule_file(),
        None => {
            let text = std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
            RuleFile::parse(&text).with_context(|| format!("parsing {spec}"))?
        }
    };
    let config = file.to_config().with_context(|| format!("validating {spec}"))?;
    Ok(Loaded {
        config,
        hash: file.hash(),
    })
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn certificate_outcome(
    report: &mut Report,
    loaded: &Loaded,
    cert: Certificate,
    what: &str,
) -> Outcome {
    let summary = format!("{what}: {}", cert.kind());
    let refuted = cert.is_refutation();
    report.replay(&loaded.config, &cert);
    Outcome {
        result: to_value(&cert),
        summary,
        refuted,
    }
}

fn pattern_on(cuboid: &Cuboid, packed: &str) -> Result<Pattern> {
    Ok(Pattern::from_packed(cuboid, packed)?)
}

fn run(cli: &Cli, caps: &Caps) -> Result<(Report, Outcome)> {
    let mut report = Report::new(caps, cli.global.seed, cli.global.verify);
    let outcome = match &cli.command {
        Command::Simulate {
            rules,
            window,
            input,
            steps,
            boundary,
            background,
            render,
        } => {
            let l = load(&rules.rules)?;
            report.hash(&l.hash);
            let k = Cuboid::parse(window)?;
            let mut x = pattern_on(&k, input)?;
            x.check_alphabet(l.config.alphabet())?;
            let psi = PeriodizedMap::new(&l.config, &k)?;
            let mut rows = vec![x.packed()];
            for _ in 0..*steps {
                x = match boundary {
                    Boundary::Periodic => psi.apply(&x)?,
                    Boundary::Fixed => {
                        apply_window_with_background(&l.config, &k.cells(), &x, *background)?
                    }
                };
                rows.push(x.packed());
            }
            if *render {
                for (t, row) in rows.iter().enumerate() {
                    eprintln!("{t:>4} {row}");
                }
            }
            let boundary = match boundary {
                Boundary::Periodic => "periodic",
                Boundary::Fixed => "fixed",
            };
            Outcome {
                summary: format!("simulate: {} step(s) on {k}", steps),
                result: json!({"window": k.to_string(), "boundary": boundary, "steps": rows}),
                refuted: false,
            }
        }
        Command::Compose { rules, with, output } => {
            let a = load(&rules.rules)?;
            let b = load(with)?;
            report.hash(&a.hash);
            let c = compose(&a.config, &b.config, caps)?;
            let file = RuleFile::from_config(&c, &[]);
            if let Some(path) = output {
                std::fs::write(path, file.to_json() + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Outcome {
                summary: format!("compose: memory of {} cells", c.memory().len()),
                result: json!({"with_hash": b.hash, "composite": to_value(&file)}),
                refuted: false,
            }
        }
        Command::Image { rules, window, list } => {
            let l = load(&rules.rules)?;
            report.hash(&l.hash);
            let w = Cuboid::parse(window)?;
            let img = image_window(&l.config, &w.cells(), caps)?;
            let mut result = json!({
                "window": w.to_string(),
                "size": img.len(),
                "universe_size": img.universe_size(),
                "full": img.is_full(),
                "first_missing": img.first_missing().map(|p| p.packed()),
            });
            if *list {
                result["patterns"] = img.patterns().iter().map(|p| p.packed()).collect();
            }
            Outcome {
                summary: format!("image: {} of {} patterns on {w}", img.len(), img.universe_size()),
                result,
                refuted: !img.is_full(),
            }
        }
        Command::Surjectivity { rules, max_radius } => {
            let l = load(&rules.rules)?;
            report.hash(&l.hash);
            let cert = surjectivity_deficit(&l.config, *max_radius, caps)?;
            certificate_outcome(&mut report, &l, cert, "surjectivity")
        }
        Command::Collisions {
            rules,
            max_radius,
            backgrounds,
        } => {
            let l = load(&rules.rules)?;
            report.hash(&l.hash);
            let bgs: Vec<Symbol> = if backgrounds.is_empty() {
                (0..l.config.alphabet()).collect()
            } else {
                backgrounds.clone()
            };
            let cert = collision_search(&l.config, *max_radius, &bgs, caps)?;
            certificate_outcome(&mut report, &l, cert, "collisions")
        }
        Command::StableInjectivity { rules, max_radius } => {
            let l = load(&rules.rules)?;
            report.hash(&l.hash);
            let rep = stable_injectivity_check(&l.config, *max_radius, caps)?;
            for r in &rep.representatives {
                report.replay(&r.config.to_config()?, &r.certificate);
            }
            let summary = match rep.refutation() {
                Some(r) => format!("stable-injectivity: refuted by {} ({})", r.name, r.certificate.kind()),
                None => format!("stable-injectivity: unrefuted up to radius {max_radius}"),
            };
            Outcome {
                summary,
                result: to_value(&rep),
                refuted: rep.verdict == StableVerdict::Refuted,
            }
        }
        Command::Inverse {
            rules,
            max_radius,
            output,
        } => {
            let l = load(&rules.rules)?;
            report.hash(&l.hash);
            let cert = synthesize_inverse(&l.config, *max_radius, caps)?;
            if let (Some(path), Certificate::InverseSynthesized { inverse, .. }) = (output, &cert) {
                std::fs::write(path, inverse.to_json() + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let mut o = certificate_outcome(&mut report, &l, cert, "inverse");
            if let Value::Object(m) = &o.result {
                if let Some(mem) = m.get("memory") {
                    o.summary = format!("{} with memory {mem}", o.summary);
                }
            }
            o
        }
        Command::DeterminingRadius {
            rules,
            cell,
            max_radius,
        } => {
            let l = load(&rules.rules)?;
            report.hash(&l.hash);
            let g = Cell::parse(cell)?;
            let r = min_determining_radius(&l.config, &g, *max_radius, caps)?;
            Outcome {
                summary: match r {
                    Some(r) => format!("determining-radius: {r} at cell {g}"),
                    None => format!("determining-radius: none up to {max_radius} at cell {g}"),
                },
                result: json!({"cell": g.to_string(), "max_radius": max_radius, "radius": r}),
                refuted: false,
            }
        }
        Command::Periodize {
            rules,
            period_box,
            input,
        } => {
            let l = load(&rules.rules)?;
            report.hash(&l.hash);
            let k = Cuboid::parse(period_box)?;
            let out = PeriodizedMap::new(&l.config, &k)?.apply(&pattern_on(&k, input)?)?;
            Outcome {
                summary: format!("periodize: {} -> {}", input, out.packed()),
                result: json!({"box": k.to_string(), "input": input, "output": out.packed()}),
                refuted: false,
            }
        }
        Command::PsiCheck { rules, period_box } => {
            let l = load(&rules.rules)?;
            report.hash(&l.hash);
            let k = Cuboid::parse(period_box)?;
            let cert = psi_invertibility_check(&l.config, &k, caps)?;
            certificate_outcome(&mut report, &l, cert, "psi-check")
        }
        Command::WrapCheck {
            rules,
            period_box,
            offsets,
        } => {
            let l = load(&rules.rules)?;
            report.hash(&l.hash);
            let k = Cuboid::parse(period_box)?;
            let e = match offsets {
                Some(text) => {
                    let cells = text.split(';').map(Cell::parse).collect::<anuca::Result<Vec<_>>>()?;
                    CellSet::new(k.dim(), cells)?
                }
                None => l.config.memory().as_ref().clone(),
            };
            let ok = wrap_compatibility(&l.config, &k, &e)?;
            Outcome {
                summary: format!("wrap-check: {} on {k}", if ok { "compatible" } else { "incompatible" }),
                result: json!({"box": k.to_string(), "offsets": to_value(&e), "compatible": ok}),
                refuted: false,
            }
        }
        Command::PostSurjectivity {
            rules,
            cell,
            lift_radius,
            trials,
            window_radius,
            background,
            uniform,
            max_radius,
        } => {
            let l = load(&rules.rules)?;
            report.hash(&l.hash);
            let d = l.config.dim();
            if *uniform {
                let cells = match cell {
                    Some(c) => vec![Cell::parse(c)?],
                    None => Vec::new(),
                };
                let r = uniform_post_surjectivity_radius(&l.config, &cells, *max_radius, *trials, cli.global.seed, caps)?;
                Outcome {
                    summary: match r {
                        Some(r) => format!("post-surjectivity: uniform lift radius {r}"),
                        None => format!("post-surjectivity: no uniform lift radius up to {max_radius}"),
                    },
                    result: json!({"max_radius": max_radius, "trials": trials, "radius": r}),
                    refuted: false,
                }
            } else {
                let g = match cell {
                    Some(c) => Cell::parse(c)?,
                    None => Cell::zero(d),
                };
                let probe = LiftProbe {
                    trials: *trials,
                    window_radius: window_radius
                        .unwrap_or(lift_radius + l.config.memory().radius() as u32 + 1),
                    seed: cli.global.seed,
                    background: *background,
                };
                let cert = post_surjectivity_lift(&l.config, &g, &ball(d, *lift_radius)?, &probe, caps)?;
                certificate_outcome(&mut report, &l, cert, "post-surjectivity")
            }
        }
        Command::Corpus { names } => {
            let names: Vec<String> = if names.is_empty() {
                BUILTIN_NAMES.iter().map(|s| s.to_string()).collect()
            } else {
                names.clone()
            };
            let mut entries = Vec::new();
            let (mut passed, mut total) = (0, 0);
            for name in &names {
                let ex = builtin(name)?;
                let mut results = Vec::new();
                for e in &ex.expected {
                    let r = check_expectation(&ex.config, e, caps)?;
                    for (file, cert) in &r.certificates {
                        report.replay(&file.to_config()?, cert);
                    }
                    total += 1;
                    passed += usize::from(r.pass);
                    if !r.pass {
                        eprintln!(
                            "corpus: {name} {} expected {} got {}",
                            e.operation, e.verdict, r.actual_verdict
                        );
                    }
                    results.push(to_value(&r));
                }
                entries.push(json!({
                    "name": name,
                    "config_hash": ex.rule_file().hash(),
                    "results": results,
                }));
            }
            Outcome {
                summary: format!("corpus: {passed}/{total} expectations hold"),
                result: json!({"examples": entries, "passed": passed, "total": total}),
                refuted: passed != total,
            }
        }
    };
    Ok((report, outcome))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let started = Instant::now();
    let caps = match cli.global.cap {
        Some(0) => {
            eprintln!("error: --cap must be positive");
            return ExitCode::from(2);
        }
        Some(c) => Caps::uniform(c),
        None => match Caps::from_env() {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
    };
    match run(&cli, &caps) {
        Ok((report, outcome)) => {
            let elapsed = cli.global.timing.then(|| started.elapsed());
            let code = report.finish(outcome, elapsed);
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
