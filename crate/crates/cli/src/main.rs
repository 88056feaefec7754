use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use netgap::bounds::BoundFamily;
use netgap::experiment::{run_preset, FamilySpec, PRESET_NAMES};
use netgap::gap::{gap_report, GapRequest};
use netgap_core::coding::{
    decode_receiver, simulate, solve, verify_solution, verify_solution_sampled, Message,
    NetworkCodeJson, SchemeSpec,
};
use netgap_core::network::{Network, NetworkJson};
use netgap_core::subspace::{factor_prime_power, triple_span_search, SubspaceCodeJson};

#[derive(Parser)]
#[command(
    name = "netgap",
    version,
    about = "Multicast network-coding workbench: generate networks, solve them with scalar or \
             vector codes, verify receiver ranks exactly, and report field-size gaps"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Verification worker threads (0 = all cores); NETGAP_WORKERS is the fallback
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Combination,
    Star,
    Plus,
    Tilde,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    Scalar,
    Vector,
}

#[derive(Args)]
struct SchemeFlags {
    /// Coding scheme
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    /// Scalar field size (any prime power)
    #[arg(long)]
    qs: Option<u64>,
    /// Vector base field (prime)
    #[arg(long)]
    q: Option<u64>,
    /// Vector dimension
    #[arg(long)]
    t: Option<usize>,
}

impl SchemeFlags {
    fn spec(&self) -> Result<SchemeSpec> {
        match self.scheme {
            SchemeArg::Scalar => Ok(SchemeSpec::Scalar {
                qs: self.qs.context("--scheme scalar needs --qs")?,
            }),
            SchemeArg::Vector => Ok(SchemeSpec::Vector {
                q: self.q.context("--scheme vector needs --q")?,
                t: self.t.context("--scheme vector needs --t")?,
            }),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a network and write it as JSON
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Message count (required for combination; overrides for odd-message variants)
        #[arg(long)]
        h: Option<usize>,
        /// Middle-layer size
        #[arg(long)]
        r: usize,
        /// Receiver subset size (combination only; defaults to h)
        #[arg(long)]
        s: Option<usize>,
        /// Bundle width for star/plus
        #[arg(long)]
        ell: Option<usize>,
        /// Extra direct source-to-receiver links
        #[arg(long, default_value_t = 0)]
        extra_links: usize,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Solve a generated network under a scheme and write the code as JSON
    Solve {
        #[command(flatten)]
        scheme: SchemeFlags,
        network: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Verify a code against a network: exit 0 on all-pass, 1 on any failure
    Verify {
        network: PathBuf,
        code: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Check at most this many receivers (seeded sample); default all
        #[arg(long)]
        sample_cap: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Push a seeded random message through the network and decode everywhere
    Simulate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        network: PathBuf,
        code: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Scalar-vs-vector field-size gap for a family instance
    Gap {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long)]
        ell: Option<usize>,
        /// Vector base field (prime)
        #[arg(long)]
        q: u64,
        /// Vector dimension
        #[arg(long)]
        t: usize,
        /// Middle-layer size; defaults to the vector bound
        #[arg(long)]
        r: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        sample_cap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Verify every receiver instead of a sample
        #[arg(long)]
        exhaustive: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Greedy triple-span subspace-code search with exhaustive re-verification
    Search {
        /// Ambient dimension
        #[arg(long)]
        n: usize,
        /// Codeword dimension
        #[arg(long)]
        k: usize,
        /// Field order (prime for the spread seed)
        #[arg(long)]
        q: u64,
        #[arg(long)]
        min_span: usize,
        #[arg(long)]
        target: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a named desk-check preset
    Preset {
        /// One of the named presets, or "all"
        name: String,
        /// Include the exhaustive large-r streaming checks
        #[arg(long)]
        exhaustive: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli
        .workers
        .or_else(|| {
            std::env::var("NETGAP_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    match run(cli.command, workers) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn read_network(path: &Path) -> Result<Network> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let json: NetworkJson = serde_json::from_str(&text)?;
    Ok(json.build()?)
}

fn read_code(path: &Path) -> Result<netgap_core::coding::NetworkCode> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let json: NetworkCodeJson = serde_json::from_str(&text)?;
    Ok(json.build()?)
}

fn run(cmd: Cmd, workers: usize) -> Result<bool> {
    match cmd {
        Cmd::Gen {
            family,
            h,
            r,
            s,
            ell,
            extra_links,
            out,
        } => {
            let spec = FamilySpec {
                kind: match family {
                    FamilyArg::Combination => "combination",
                    FamilyArg::Star => "star",
                    FamilyArg::Plus => "plus",
                    FamilyArg::Tilde => "tilde",
                }
                .to_string(),
                h,
                r,
                s,
                ell,
                extra_links,
            };
            let net = spec.build()?;
            write_json(&out, &NetworkJson::from(&net))?;
            println!(
                "{:<12} h={} nodes={} edges={} receivers={} -> {}",
                spec.kind,
                net.h(),
                net.node_count(),
                net.edges().len(),
                net.receivers().len(),
                out.display()
            );
            Ok(true)
        }
        Cmd::Solve {
            scheme,
            network,
            out,
        } => {
            let net = read_network(&network)?;
            let code = solve(&net, &scheme.spec()?)?;
            write_json(&out, &NetworkCodeJson::from(&code))?;
            println!(
                "solved: {} edges, scheme {:?}, {}",
                code.edge_count(),
                code.scheme().tag(),
                code.provenance()
            );
            Ok(true)
        }
        Cmd::Verify {
            network,
            code,
            out,
            sample_cap,
            seed,
        } => {
            let net = read_network(&network)?;
            let code = read_code(&code)?;
            let report = match sample_cap {
                Some(cap) if cap < net.receivers().len() => {
                    verify_solution_sampled(&net, &code, cap, seed, workers)?
                }
                _ => verify_solution(&net, &code, workers)?,
            };
            println!(
                "receivers {:>8}  checked {:>8}  passed {:>8}  failed {:>6}  required rank {}  ({:.3}s)",
                report.receivers_total,
                report.receivers_checked,
                report.passed,
                report.failed,
                report.required_rank,
                report.elapsed.as_secs_f64()
            );
            for rec in report.records.iter().filter(|r| !r.pass).take(20) {
                println!(
                    "  receiver {:>8}  rank {} < {}",
                    rec.receiver, rec.rank, rec.required
                );
            }
            if let Some(path) = out {
                write_json(&path, &report)?;
            }
            Ok(report.all_pass())
        }
        Cmd::Simulate {
            seed,
            network,
            code,
            out,
        } => {
            let net = read_network(&network)?;
            let code = read_code(&code)?;
            let field = code.scheme().field().clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let msg = Message::random(&field, net.h() * code.t(), &mut rng);
            let observations = simulate(&net, &code, &msg)?;
            let start = Instant::now();
            let mut ok = 0usize;
            let mut mismatches = Vec::new();
            for ridx in 0..net.receivers().len() {
                match decode_receiver(&net, &code, ridx, &observations[ridx]) {
                    Ok(decoded) if decoded == msg => ok += 1,
                    _ => mismatches.push(ridx),
                }
            }
            let decode_time = start.elapsed();
            println!(
                "seed {:>4}  receivers {:>6}  exact recoveries {:>6}  decode wall time {:.3}s",
                seed,
                net.receivers().len(),
                ok,
                decode_time.as_secs_f64()
            );
            if let Some(path) = out {
                #[derive(serde::Serialize)]
                struct SimReport {
                    seed: u64,
                    message: Vec<u64>,
                    receivers: usize,
                    exact_recoveries: usize,
                    mismatched_receivers: Vec<usize>,
                }
                write_json(
                    &path,
                    &SimReport {
                        seed,
                        message: msg.0.iter().map(|e| e.0).collect(),
                        receivers: net.receivers().len(),
                        exact_recoveries: ok,
                        mismatched_receivers: mismatches.clone(),
                    },
                )?;
            }
            Ok(mismatches.is_empty())
        }
        Cmd::Gap {
            family,
            h,
            ell,
            q,
            t,
            r,
            sample_cap,
            seed,
            exhaustive,
            out,
        } => {
            let family = match family {
                FamilyArg::Combination => BoundFamily::Combination {
                    h: h.context("gap for combination needs --h")?,
                },
                FamilyArg::Star => BoundFamily::Star {
                    ell: ell.context("gap for star needs --ell")?,
                },
                FamilyArg::Plus => BoundFamily::Plus {
                    ell: ell.context("gap for plus needs --ell")?,
                },
                FamilyArg::Tilde => BoundFamily::Tilde,
            };
            let report = gap_report(&GapRequest {
                family,
                q,
                t,
                r,
                sample_cap,
                seed,
                exhaustive,
                workers,
            })?;
            println!(
                "{:<12} r={:<8} scalar q_s={:<4} vector q={} t={}  ratio {}  exponent {}{}",
                report.family,
                report.r,
                report.scalar_min_field,
                report.vector_field,
                report.vector_dim,
                report.gap_ratio,
                report.gap_exponent,
                match (report.leading_term, report.residual) {
                    (Some(l), Some(res)) => format!("  (leading {l}, residual {res})"),
                    _ => String::new(),
                }
            );
            println!(
                "verification: {} -> {}",
                report.verification.mode,
                if report.verification.all_pass {
                    "all pass"
                } else {
                    "FAILURES"
                }
            );
            if let Some(path) = out {
                write_json(&path, &report)?;
            }
            Ok(report.verification.all_pass)
        }
        Cmd::Search {
            n,
            k,
            q,
            min_span,
            target,
            out,
        } => {
            let (p, m) =
                factor_prime_power(q).with_context(|| format!("{q} is not a prime power"))?;
            let field = netgap_core::algebra::FieldCtx::new(p, m)?;
            let code = triple_span_search(&field, n, k, min_span, target)?;
            println!(
                "triple-span search in G_{q}({n},{k}), min span {min_span}: found {} (target {target})",
                code.len()
            );
            if let Some(path) = out {
                write_json(&path, &SubspaceCodeJson::from(&code))?;
            }
            Ok(code.len() >= target)
        }
        Cmd::Preset {
            name,
            exhaustive,
            out,
        } => {
            let names: Vec<&str> = if name == "all" {
                PRESET_NAMES.to_vec()
            } else {
                vec![name.as_str()]
            };
            let mut all_pass = true;
            for n in names {
                let outcome = run_preset(n, workers, exhaustive)?;
                print!("{}", outcome.render_text());
                std::io::stdout().flush().ok();
                if let Some(dir) = &out {
                    std::fs::create_dir_all(dir)?;
                    write_json(&dir.join(format!("{n}.json")), &outcome)?;
                }
                all_pass &= outcome.pass;
            }
            Ok(all_pass)
        }
    }
}

