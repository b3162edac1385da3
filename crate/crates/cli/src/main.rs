//! `goldbach`: command-line front end for goldbach-core.
//!
//! Scalar results are printed as CSV with a header row; verification reports
//! are JSON. Exit codes: 0 success, 1 usage or input error, 2 counterexamples
//! found by `verify`.

mod paper_table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use goldbach_core::probmodel::{paper_mode_sizes, LogProb};
use goldbach_core::*;

const CACHE_ENV: &str = "GOLDBACH_CACHE_DIR";
const CACHE_FILE: &str = "primes.bin";

#[derive(Parser)]
#[command(name = "goldbach", version, about = "Prime-like subsets, generalized Goldbach checks and violation probabilities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a subset and write it as text, one element per line.
    Gen {
        #[command(flatten)]
        subset: SubsetArgs,
        #[arg(long, value_parser = parse_count)]
        limit: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest |pi_Q(n) - pi(n)| up to the limit.
    Similarity {
        #[command(flatten)]
        subset: SubsetArgs,
        #[arg(long, value_parser = parse_count)]
        limit: u64,
    },
    /// Check every even number in a range for a representation q1 + q2.
    Verify {
        #[command(flatten)]
        subset: SubsetArgs,
        #[arg(long, default_value_t = 4, value_parser = parse_count)]
        from: u64,
        #[arg(long, value_parser = parse_count)]
        to: u64,
        /// Worker shards; the report does not depend on this.
        #[arg(long)]
        jobs: Option<usize>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Counterexamples at or below this value do not fail the run.
        #[arg(long, default_value_t = 0, value_parser = parse_count)]
        tolerate_below: u64,
    },
    /// Failure probability of a single even number 2n under the random-subset model.
    Prob {
        #[arg(long, value_parser = parse_count)]
        n: u64,
        #[arg(long, value_enum, default_value_t = Form::Exp)]
        form: Form,
        #[arg(long, value_parser = parse_count, requires = "k2")]
        k1: Option<u64>,
        #[arg(long, value_parser = parse_count, requires = "k1")]
        k2: Option<u64>,
    },
    /// Sum of exp(-n / ln^2 n) from N upward.
    Tail {
        #[arg(long, value_parser = parse_count)]
        from: u64,
        #[arg(long, default_value_t = 1e-12)]
        rel_eps: f64,
    },
    /// Root of the alpha equation and the bound exp(-N^alpha).
    Alpha {
        #[arg(long)]
        n: f64,
    },
    /// Where n / ln^2 n starts to exceed sqrt(n) + ln(2 sqrt(n)) for good.
    Crossover {
        #[arg(long, value_parser = parse_count)]
        limit: u64,
    },
    /// Monte Carlo estimate of the disjointness probability.
    Mc {
        #[arg(long, value_parser = parse_count)]
        n: u64,
        #[arg(long, value_parser = parse_count)]
        k1: u64,
        #[arg(long, value_parser = parse_count)]
        k2: u64,
        #[arg(long, value_parser = parse_count)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Recompute every reproducible figure and compare with its reference value.
    PaperTable,
}

#[derive(Args)]
struct SubsetArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Shift amount (shift kind only).
    #[arg(long = "t", allow_negative_numbers = true)]
    t: Option<i64>,
    /// Generator seed (jitter kind only).
    #[arg(long)]
    seed: Option<u64>,
}

impl SubsetArgs {
    fn spec(&self, limit: u64) -> Result<SubsetSpec> {
        let spec = SubsetSpec::from_parts(self.kind.name(), self.t, self.seed, limit)?;
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Primes,
    Shift,
    Jitter,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Primes => "primes",
            Kind::Shift => "shift",
            Kind::Jitter => "jitter",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Form {
    Exact,
    Product,
    Exp,
}

/// Accepts plain integers, `_` separators and exact scientific notation
/// (`4e18`, `2e8`).
fn parse_count(s: &str) -> Result<u64, String> {
    let clean = s.replace('_', "");
    if let Ok(v) = clean.parse::<u64>() {
        return Ok(v);
    }
    let (mantissa, exp) = clean
        .split_once(['e', 'E'])
        .ok_or_else(|| format!("{s:?} is not a non-negative integer"))?;
    let exp: u32 = exp.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int}{frac}");
    let shift = exp
        .checked_sub(frac.len() as u32)
        .ok_or_else(|| format!("{s:?} is not an integer"))?;
    digits
        .parse::<u64>()
        .ok()
        .and_then(|d| 10u64.checked_pow(shift).and_then(|p| d.checked_mul(p)))
        .ok_or_else(|| format!("{s:?} is not a representable non-negative integer"))
}

fn cpu_count() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Primes up to `limit`, reusing `$GOLDBACH_CACHE_DIR/primes.bin` when it
/// covers the limit and refreshing it when it does not.
fn prime_table(limit: u64) -> Result<PrimeTable> {
    let Some(dir) = std::env::var_os(CACHE_ENV) else {
        return Ok(sieve_primes(limit)?);
    };
    let path = Path::new(&dir).join(CACHE_FILE);
    if path.exists() {
        let cached = PrimeTable::load(&path).with_context(|| format!("reading prime cache {}", path.display()))?;
        if cached.limit() >= limit {
            return Ok(cached.truncated(limit)?);
        }
    }
    let table = sieve_primes(limit)?;
    std::fs::create_dir_all(&dir)?;
    table
        .save(&path)
        .with_context(|| format!("writing prime cache {}", path.display()))?;
    Ok(table)
}

fn subset_for(spec: SubsetSpec) -> Result<(IntegerSubset, PrimeTable)> {
    let table = prime_table(spec.required_table_limit())?;
    Ok((build_subset(spec, &table)?, table))
}

fn write_csv<T: Serialize>(rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ProbRow {
    n: u64,
    form: &'static str,
    k1: Option<u64>,
    k2: Option<u64>,
    ln_value: f64,
    log10: f64,
}

#[derive(Serialize)]
struct TailRow {
    from: u64,
    log10_sum: f64,
    terms_used: u64,
    log10_remainder_bound: f64,
}

#[derive(Serialize)]
struct AlphaRow {
    n: f64,
    alpha: f64,
    residual: f64,
    alpha_closed_form: f64,
    log10_bound: f64,
}

#[derive(Serialize)]
struct McRow {
    p_hat: f64,
    stderr: f64,
    exact_log10: f64,
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Gen { subset, limit, out } => {
            let (q, _) = subset_for(subset.spec(limit)?)?;
            match out {
                Some(path) => q.write_text(BufWriter::new(File::create(&path)?))?,
                None => q.write_text(BufWriter::new(io::stdout().lock()))?,
            }
        }
        Command::Similarity { subset, limit } => {
            let (q, table) = subset_for(subset.spec(limit)?)?;
            let r = similarity_deviation(&q, &table)?;
            #[derive(Serialize)]
            struct Row {
                c_observed: u64,
                argmax_n: u64,
            }
            write_csv(&[Row {
                c_observed: r.c_observed,
                argmax_n: r.argmax_n,
            }])?;
        }
        Command::Verify {
            subset,
            from,
            to,
            jobs,
            report,
            tolerate_below,
        } => {
            if from % 2 != 0 || to % 2 != 0 {
                bail!("--from and --to must be even, got {from} and {to}");
            }
            let jobs = jobs.unwrap_or_else(cpu_count);
            let (q, _) = subset_for(subset.spec(to)?)?;
            let r = verify_range_sharded(&q, from, to, jobs)?;
            let json = serde_json::to_string_pretty(&r)?;
            match report {
                Some(path) => std::fs::write(&path, json + "\n")
                    .with_context(|| format!("writing report {}", path.display()))?,
                None => writeln!(io::stdout().lock(), "{json}")?,
            }
            if r.failures_above(tolerate_below).next().is_some() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Prob { n, form, k1, k2 } => {
            if form != Form::Exact && k1.is_some() {
                bail!("--k1/--k2 only apply to --form exact");
            }
            let (name, ks, value): (_, _, LogProb) = match form {
                Form::Exact => {
                    let (a, b) = match (k1, k2) {
                        (Some(a), Some(b)) => (a, b),
                        _ => paper_mode_sizes(n)?,
                    };
                    ("exact", Some((a, b)), exact_disjoint_prob(n, a, b)?)
                }
                Form::Product => ("product", None, lemma_bound(n as f64, BoundForm::Product)?),
                Form::Exp => ("exp", None, lemma_bound(n as f64, BoundForm::Exponential)?),
            };
            write_csv(&[ProbRow {
                n,
                form: name,
                k1: ks.map(|k| k.0),
                k2: ks.map(|k| k.1),
                ln_value: value.ln(),
                log10: value.log10(),
            }])?;
        }
        Command::Tail { from, rel_eps } => {
            let t = tail_sum(from, rel_eps)?;
            write_csv(&[TailRow {
                from,
                log10_sum: t.log10_sum(),
                terms_used: t.terms_used,
                log10_remainder_bound: t.log10_truncation_bound(),
            }])?;
        }
        Command::Alpha { n } => {
            let s = alpha_solve(n)?;
            let bound = alpha_tail_bound(n)?;
            write_csv(&[AlphaRow {
                n,
                alpha: s.alpha,
                residual: s.residual,
                alpha_closed_form: s.alpha_closed_form,
                log10_bound: bound.log10(),
            }])?;
        }
        Command::Crossover { limit } => {
            let n0 = inequality_crossover(limit)?;
            #[derive(Serialize)]
            struct Row {
                scan_limit: u64,
                n0: u64,
            }
            write_csv(&[Row { scan_limit: limit, n0 }])?;
        }
        Command::Mc {
            n,
            k1,
            k2,
            trials,
            seed,
            jobs,
        } => {
            let e = mc_disjoint_sharded(n, k1, k2, trials, seed, jobs.unwrap_or_else(cpu_count))?;
            write_csv(&[McRow {
                p_hat: e.p_hat,
                stderr: e.stderr,
                exact_log10: exact_disjoint_prob(n, k1, k2)?.log10(),
            }])?;
        }
        Command::PaperTable => write_csv(&paper_table::rows()?)?,
    }
    Ok(ExitCode::SUCCESS)
}

/// Output cut short by a closed pipe (`goldbach gen ... | head`) is not an error.
fn is_broken_pipe(e: &anyhow::Error) -> bool {
    let pipe = |io: &io::Error| io.kind() == io::ErrorKind::BrokenPipe;
    e.chain().any(|cause| {
        cause.downcast_ref::<io::Error>().is_some_and(pipe)
            || matches!(cause.downcast_ref::<Error>(), Some(Error::Io(io)) if pipe(io))
            || matches!(
                cause.downcast_ref::<csv::Error>().map(csv::Error::kind),
                Some(csv::ErrorKind::Io(io)) if pipe(io)
            )
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            eprintln!("{}", rendered.lines().next().unwrap_or("error: bad arguments"));
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            if is_broken_pipe(&e) {
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {e:#}");
            let _ = io::stderr().flush();
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::parse_count;

    #[test]
    fn counts() {
        assert_eq!(parse_count("10000"), Ok(10_000));
        assert_eq!(parse_count("2_000"), Ok(2_000));
        assert_eq!(parse_count("1e4"), Ok(10_000));
        assert_eq!(parse_count("4e18"), Ok(4_000_000_000_000_000_000));
        assert_eq!(parse_count("2.5e3"), Ok(2_500));
        assert!(parse_count("2.55e1").is_err());
        assert!(parse_count("1e20").is_err());
        assert!(parse_count("-3").is_err());
        assert!(parse_count("x").is_err());
    }
}
