//! Command-line front end. Every subcommand writes a CSV table or a JSON
//! array; the exit code is 0 on success, 2 when a gating bound check fails
//! and 1 on usage or configuration errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bench::{throughput, write_bench_csv, BenchResult, Scheme, MIN_REPS};
use crate::dump::dump_tables;
use crate::error::{config, Error, Result};
use crate::experiments::{
    chaining_tail, chernoff_tail, exact_uniformity_check, large_mu_tail, lower_bound_instance, measure_dependence,
    survival_d_rounds, survival_exhaustive, survival_one_round, write_reports_csv, ExperimentReport, Verdict,
};
use crate::gf2::{GenKey, KeyLayout};
use crate::hash::TornadoHash;
use crate::linprobe::{probe_experiment, ProbeConfig};
use crate::prg::mix64;
use crate::sample::{distinct_keys, rng, STREAM_KEYS};
use crate::selector::Selector;
use crate::spec::{TornadoSpec, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed `{s}`: {e}"))
}

mod hex_u64 {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{v:#x}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        super::parse_seed(&String::deserialize(d)?).map_err(D::Error::custom)
    }
}

/// A complete invocation. Serializes to JSON and can be replayed with
/// `--config`.
#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "tornado", version, about = "Tornado tabulation hashing: experiments, benchmarks and table dumps")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Master seed (decimal or 0x-prefixed hex); all randomness derives from it.
    #[arg(long, global = true, value_parser = parse_seed, default_value = "0x1")]
    #[serde(with = "hex_u64")]
    pub seed: u64,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Run the invocation stored in a JSON file (as printed by --print-config).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Print this invocation as JSON and exit.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub print_config: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct SpecArgs {
    /// Bits per character (alphabet size 2^bits).
    #[arg(long = "sigma-bits", visible_alias = "char-bits")]
    pub char_bits: Option<u32>,
    /// Characters per key.
    #[arg(long)]
    pub c: Option<u32>,
    /// Derived characters.
    #[arg(long)]
    pub d: Option<u32>,
    /// Output bits.
    #[arg(long)]
    pub out_bits: Option<u32>,
    /// simple-tabulation, simple-tornado, tornado or tornado-mix.
    #[arg(long)]
    pub variant: Option<Variant>,
    /// Tail alphabet bits for tornado-mix.
    #[arg(long)]
    pub psi_bits: Option<u32>,
}

impl SpecArgs {
    fn resolve(&self, defaults: TornadoSpec) -> Result<TornadoSpec> {
        let mut s = defaults;
        if let Some(v) = self.char_bits {
            s.char_bits = v;
        }
        if let Some(v) = self.c {
            s.c = v;
        }
        if let Some(v) = self.out_bits {
            s.out_bits = v;
        }
        if let Some(v) = self.variant {
            s = s.with_variant(v);
            if v == Variant::SimpleTabulation {
                s.d = 0;
            }
            if v == Variant::TornadoMix && s.psi_bits.is_none() {
                s.psi_bits = Some(s.char_bits.max(16));
            }
        }
        if let Some(v) = self.d {
            s.d = v;
        }
        if let Some(v) = self.psi_bits {
            s.psi_bits = Some(v);
        }
        s.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Dependence rate of a random fixed key set versus the bound.
    Independence(IndependenceArgs),
    /// Dependence rate of the lower-bound hard instance.
    Lowerbound(LowerboundArgs),
    /// Survival of a four-key zero-set through one and d rounds.
    Survival(SurvivalArgs),
    /// Fixed-bin load tail of hashing with chaining.
    Chaining(ChainingArgs),
    /// Upper tail of a selected-set size.
    Chernoff(ChernoffArgs),
    /// Linear-probing probe lengths against a fully-random baseline.
    Probing(ProbingArgs),
    /// Hashing throughput.
    Bench(BenchArgs),
    /// Exhaustive micro-oracles.
    Selftest,
    /// Writes every table of one hash function in the plain-text dump format.
    DumpTables(DumpArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct IndependenceArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Size of the random fixed key set.
    #[arg(long, default_value_t = 128)]
    pub set_size: usize,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LowerboundArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SurvivalArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ChainingArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Keys and bins (a power of two).
    #[arg(long, default_value_t = 256)]
    pub n: u64,
    /// Load thresholds, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [4u32, 8])]
    pub k: Vec<u32>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ChernoffArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Size of the key population; keys hashing to bin 0 are selected.
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ProbingArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Table size (a power of two); the output bits default to log2 m.
    #[arg(long, default_value_t = 1 << 16)]
    pub m: usize,
    /// Stored keys; defaults to 3m/4.
    #[arg(long)]
    pub n: Option<usize>,
    /// Fresh queries per trial.
    #[arg(long, default_value_t = 1024)]
    pub queries: usize,
    #[arg(long, default_value_t = 64)]
    pub trials: u64,
    /// Failure probability in n*; defaults to 1/|Sigma|.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Confidence parameter of the dominance tolerance.
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    /// Also write per-trial probe-length histograms as CSV here.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BenchArgs {
    /// Schemes to time; all of them by default.
    #[arg(long = "scheme")]
    pub schemes: Vec<String>,
    #[arg(long, default_value_t = 1 << 20)]
    pub n_keys: usize,
    #[arg(long, default_value_t = MIN_REPS)]
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DumpArgs {
    /// Full spec string such as `tornado:char_bits=8,c=4,d=4,out_bits=24`;
    /// overrides the individual spec flags.
    #[arg(long)]
    pub spec: Option<String>,
    #[command(flatten)]
    pub params: SpecArgs,
}

enum Output {
    Reports(Vec<ExperimentReport>),
    Bench(Vec<BenchResult>),
    Text(String),
}

fn execute(cfg: &RunConfig) -> Result<Output> {
    let seed = cfg.seed;
    let command = cfg
        .command
        .as_ref()
        .ok_or_else(|| Error::Config("no subcommand given".into()))?;
    Ok(match command {
        Command::Independence(a) => {
            let spec = a.spec.resolve(TornadoSpec::tornado(8, 2, 4, 32))?;
            let keys = distinct_keys(&mut rng(seed, STREAM_KEYS), a.set_size, spec.key_mask(), &[])?;
            let sel = Selector::fixed_set(keys, spec.out_bits)?;
            Output::Reports(vec![measure_dependence(&sel, &spec, a.trials, seed)?])
        }
        Command::Lowerbound(a) => {
            let spec = a.spec.resolve(TornadoSpec::tornado(4, 2, 3, 8))?;
            Output::Reports(vec![lower_bound_instance(&spec, a.trials, seed)?])
        }
        Command::Survival(a) => {
            let spec = a.spec.resolve(TornadoSpec::tornado(4, 2, 2, 8))?;
            let ys = default_zero_set(&spec);
            Output::Reports(vec![
                survival_one_round(&spec, &ys, a.trials, seed)?,
                survival_d_rounds(&spec, &ys, a.trials, seed)?,
            ])
        }
        Command::Chaining(a) => {
            if a.n == 0 || !a.n.is_power_of_two() {
                return config(format!("n = {} is not a power of two", a.n));
            }
            let spec = a.spec.resolve(TornadoSpec::tornado(8, 4, 4, a.n.trailing_zeros()))?;
            Output::Reports(chaining_tail(&spec, a.n, &a.k, a.trials, seed)?)
        }
        Command::Chernoff(a) => {
            let spec = a.spec.resolve(TornadoSpec::tornado(8, 2, 4, 4))?;
            let keys = distinct_keys(&mut rng(seed, STREAM_KEYS), a.n, spec.key_mask(), &[])?;
            let sel = Selector::bin(keys, 0, spec.out_bits)?;
            let report = if sel.mu() <= spec.sigma_size() as f64 / 2.0 {
                chernoff_tail(&sel, &spec, a.delta, a.trials, seed)?
            } else {
                large_mu_tail(&sel, &spec, a.delta, a.trials, seed)?
            };
            Output::Reports(vec![report])
        }
        Command::Probing(a) => {
            if a.m == 0 || !a.m.is_power_of_two() {
                return config(format!("m = {} is not a power of two", a.m));
            }
            let spec = a.spec.resolve(TornadoSpec::tornado(16, 2, 4, a.m.trailing_zeros()))?;
            let pc = ProbeConfig {
                n: a.n.unwrap_or(3 * a.m / 4),
                m: a.m,
                queries: a.queries,
                trials: a.trials,
                seed,
                delta: a.delta,
                alpha: a.alpha,
            };
            let report = probe_experiment(&spec, &pc)?;
            if let Some(path) = &a.histogram {
                let file = fs::File::create(path).map_err(|e| io_error(path, e))?;
                report.write_histogram_csv(io::BufWriter::new(file))?;
            }
            Output::Reports(vec![report.summary(&spec, seed, a.trials)])
        }
        Command::Bench(a) => {
            let schemes = if a.schemes.is_empty() {
                Scheme::ALL.to_vec()
            } else {
                a.schemes.iter().map(|s| s.parse()).collect::<Result<_>>()?
            };
            let results = schemes
                .into_iter()
                .map(|s| throughput(s, a.n_keys, a.reps, seed))
                .collect::<Result<_>>()?;
            Output::Bench(results)
        }
        Command::Selftest => Output::Reports(selftest(seed)?),
        Command::DumpTables(a) => {
            let spec = match &a.spec {
                Some(s) => s.parse::<TornadoSpec>()?,
                None => a.params.resolve(TornadoSpec::tornado(8, 4, 4, 24))?,
            };
            let h = TornadoHash::build(spec, seed)?;
            Output::Text(dump_tables(&h))
        }
    })
}

/// `{x_1, x_1'} × {x_2, x_2'}` on the first two positions, other positions 0.
fn default_zero_set(spec: &TornadoSpec) -> Vec<u64> {
    let cb = spec.char_bits;
    let m = crate::spec::mask(cb);
    let (a1, a2, b1, b2) = (1 & m, 2 & m, 0, 3 & m);
    vec![a1 | b1 << cb, a2 | b1 << cb, a1 | b2 << cb, a2 | b2 << cb]
}

fn check(name: &str, passed: bool, seed: u64, detail: impl Into<serde_json::Value>) -> ExperimentReport {
    let mut r = ExperimentReport::from_counts(&format!("selftest:{name}"), passed as u64, 1, 1.0, seed, false);
    r.verdict = if passed { Verdict::WithinBound } else { Verdict::Violation };
    r.with_param("detail", detail)
}

fn selftest(seed: u64) -> Result<Vec<ExperimentReport>> {
    let mut out = Vec::new();

    let layout = std::sync::Arc::new(KeyLayout::uniform(2, 2));
    let independent: Vec<GenKey> = [[0, 0], [1, 0], [0, 1]]
        .iter()
        .map(|c| GenKey::from_chars(layout.clone(), c))
        .collect();
    let zero: Vec<GenKey> = [[0, 0], [1, 0], [0, 1], [1, 1]]
        .iter()
        .map(|c| GenKey::from_chars(layout.clone(), c))
        .collect();
    let uniform = exact_uniformity_check(2, 2, 2, &independent)? && !exact_uniformity_check(2, 2, 2, &zero)?;
    out.push(check("exact-uniformity", uniform, seed, "sigma=4 b=2 r=4"));

    for spec in [TornadoSpec::tornado(8, 4, 3, 32), TornadoSpec::tornado(8, 4, 4, 24)] {
        let mut agree = true;
        for s in 0..4u64 {
            let h = TornadoHash::build(spec, mix64(seed ^ s))?;
            let f = h.fold()?;
            agree &= (0..20_000u64).all(|i| {
                let x = mix64(i ^ s << 32) & spec.key_mask();
                f.eval(x) == h.eval(x)
            });
        }
        out.push(check("folded-equals-reference", agree, seed, spec.to_string()));
    }

    let spec = TornadoSpec::tornado(8, 2, 2, 16);
    let mut bijective = true;
    for s in 0..4u64 {
        bijective &= TornadoHash::build(spec, mix64(seed ^ s))?.twist_is_bijective()?;
    }
    out.push(check("twist-injective", bijective, seed, spec.to_string()));

    let small = TornadoSpec::tornado(2, 2, 1, 4);
    let (survived, total) = survival_exhaustive(&small, &default_zero_set(&small))?;
    out.push(check(
        "survival-exhaustive",
        survived * 8 == total * 5,
        seed,
        format!("{survived}/{total}"),
    ));
    Ok(out)
}

fn io_error(path: &std::path::Path, e: io::Error) -> Error {
    Error::Config(format!("{}: {e}", path.display()))
}

fn render(cfg: &RunConfig, output: &Output) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    let json_err = |e: serde_json::Error| Error::Config(format!("serializing JSON: {e}"));
    match (output, cfg.format) {
        (Output::Reports(r), Format::Csv) => write_reports_csv(r, &mut buf)?,
        (Output::Reports(r), Format::Json) => serde_json::to_writer_pretty(&mut buf, r).map_err(json_err)?,
        (Output::Bench(b), Format::Csv) => write_bench_csv(b, &mut buf)?,
        (Output::Bench(b), Format::Json) => serde_json::to_writer_pretty(&mut buf, b).map_err(json_err)?,
        (Output::Text(t), Format::Csv) => buf.extend_from_slice(t.as_bytes()),
        (Output::Text(t), Format::Json) => {
            let obj = serde_json::json!([{ "seed": format!("{:#x}", cfg.seed), "dump": t }]);
            serde_json::to_writer_pretty(&mut buf, &obj).map_err(json_err)?
        }
    }
    if cfg.format == Format::Json {
        buf.push(b'\n');
    }
    Ok(buf)
}

fn exit_code(output: &Output) -> i32 {
    match output {
        Output::Reports(r) if r.iter().any(ExperimentReport::is_violation) => 2,
        _ => 0,
    }
}

fn run_config(cfg: &RunConfig) -> Result<i32> {
    if cfg.print_config {
        let text = serde_json::to_string_pretty(cfg).map_err(|e| Error::Config(e.to_string()))?;
        println!("{text}");
        return Ok(0);
    }
    let output = execute(cfg)?;
    let bytes = render(cfg, &output)?;
    match &cfg.output {
        Some(path) => fs::write(path, &bytes).map_err(|e| io_error(path, e))?,
        None => io::stdout()
            .lock()
            .write_all(&bytes)
            .map_err(|e| Error::Config(format!("stdout: {e}")))?,
    }
    Ok(exit_code(&output))
}

/// Loads the stored invocation named by `--config`. An `--output` given on
/// the command line replaces the stored one.
fn load_config(cli: &RunConfig) -> Result<RunConfig> {
    let Some(path) = &cli.config else {
        return Ok(cli.clone());
    };
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let mut cfg: RunConfig =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    if cli.output.is_some() {
        cfg.output = cli.output.clone();
    }
    cfg.print_config = cli.print_config;
    Ok(cfg)
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code. `TORNADO_THREADS` caps the worker pool.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = load_config(&cli).and_then(|cfg| match std::env::var("TORNADO_THREADS") {
        Ok(v) => {
            let threads: usize = v
                .parse()
                .map_err(|_| Error::Config(format!("TORNADO_THREADS=`{v}` is not a number")))?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?
                .install(|| run_config(&cfg))
        }
        Err(_) => run_config(&cfg),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("tornado").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn config_round_trips_through_json() {
        for args in [
            &["independence", "--sigma-bits", "8", "--c", "2", "--d", "4", "--set-size", "128", "--seed", "0x1"][..],
            &["--format", "json", "chaining", "--k", "2,3,5", "--n", "64"],
            &["probing", "--m", "4096", "--variant", "tornado-mix", "--psi-bits", "18"],
            &["selftest", "--seed", "77"],
            &["dump-tables", "--spec", "tornado:char_bits=4,c=2,d=1,out_bits=8"],
            &["bench", "--scheme", "poly2-mersenne", "--n-keys", "100"],
        ] {
            let cfg = parse(args);
            let json = serde_json::to_string(&cfg).unwrap();
            assert_eq!(serde_json::from_str::<RunConfig>(&json).unwrap(), cfg, "{json}");
        }
    }

    #[test]
    fn seeds_and_specs() {
        assert_eq!(parse(&["selftest", "--seed", "0x2A"]).seed, 42);
        assert_eq!(parse(&["selftest", "--seed", "42"]).seed, 42);
        assert!(RunConfig::try_parse_from(["tornado", "selftest", "--seed", "zz"]).is_err());
        let a = SpecArgs {
            variant: Some(Variant::SimpleTabulation),
            ..Default::default()
        };
        assert_eq!(a.resolve(TornadoSpec::tornado(8, 2, 4, 8)).unwrap().d, 0);
        let mix = SpecArgs {
            variant: Some(Variant::TornadoMix),
            ..Default::default()
        };
        assert_eq!(mix.resolve(TornadoSpec::tornado(8, 2, 4, 8)).unwrap().psi_bits, Some(16));
        let bad = SpecArgs {
            c: Some(0),
            ..Default::default()
        };
        assert!(bad.resolve(TornadoSpec::tornado(8, 2, 4, 8)).is_err());
    }

    #[test]
    fn selftest_passes() {
        let reports = selftest(1).unwrap();
        assert_eq!(reports.len(), 5);
        assert!(reports.iter().all(|r| r.verdict == Verdict::WithinBound), "{reports:?}");
    }

    #[test]
    fn default_zero_sets_are_valid() {
        for cb in [2, 4, 8, 16] {
            let spec = TornadoSpec::tornado(cb, 2, 1, 8);
            assert!(survival_one_round(&spec, &default_zero_set(&spec), 1, 0).is_ok());
        }
    }
}
