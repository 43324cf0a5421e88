//! Execution of each subcommand into a report in all three output formats.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use inctree::constants::{
    default_cutoff, exact_mean, expected_fringe_count, mu_size_series, sigma2_enumeration, ExpectedTollProfile,
    Provenance, TheoremConstants,
};
use inctree::montecarlo::{
    estimate_toll_decay, expected_toll_profile_mc, normality_report, simulate, worker_rng, HistogramPlan, SeedEntry,
    SimConfig, PILOT_STREAM,
};
use inctree::oracle::{exact_moments, verify_mean_formula, verify_model_probability, verify_uniformity};
use inctree::tree::{
    count_dary, count_plane, count_recursive, enumerate, grow, tree_probability, EnumerationLimits,
};
use inctree::{evaluate_additive, Error, Model, TollSpec};
use serde_json::{json, Value};

use crate::args::*;

pub const SCHEMA_VERSION: u32 = 1;
const WORKERS_ENV: &str = "INCTREE_WORKERS";

#[derive(Debug)]
pub enum CliError {
    Usage { message: String, listing: bool },
    Failed(String),
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError::Usage { message: message.into(), listing: false }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownToll(_) => CliError::Usage { message: e.to_string(), listing: true },
            Error::Toll { .. } | Error::Inspection(_) => CliError::Failed(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// A finished command: the same content rendered three ways, plus whether
/// the checks it ran passed.
pub struct Report {
    pub json: Value,
    pub csv: String,
    pub text: String,
    pub passed: bool,
}

pub struct Rendered {
    pub body: String,
    pub output: Option<PathBuf>,
    pub passed: bool,
}

struct Ctx {
    file: FileConfig,
    format: Format,
    output: Option<PathBuf>,
    timings: bool,
    start: Instant,
}

impl Ctx {
    fn new(common: &Common) -> CliResult<Self> {
        let file = match &common.config {
            Some(path) => {
                let raw = std::fs::read_to_string(path)
                    .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str(&raw)
                    .map_err(|e| CliError::usage(format!("bad config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        Ok(Ctx {
            format: common.format.or(file.format).unwrap_or(Format::Text),
            output: common.output.clone().or_else(|| file.output.clone()),
            timings: common.timings,
            file,
            start: Instant::now(),
        })
    }

    fn model(&self, args: &ModelArgs) -> CliResult<Model> {
        let name = args
            .model
            .clone()
            .or_else(|| self.file.model.clone())
            .ok_or_else(|| CliError::Usage { message: "--model is required".into(), listing: true })?;
        let d = args.d.or(self.file.d);
        let alpha = args.alpha.clone().or_else(|| {
            self.file.alpha.as_ref().map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
        });
        let spec = match (name.contains(':'), name.to_ascii_lowercase().as_str(), d, alpha) {
            (false, "dary" | "d-ary", Some(d), _) => format!("dary:{d}"),
            (false, "gport", _, Some(a)) => format!("gport:{a}"),
            _ => name,
        };
        spec.parse().map_err(|e: Error| CliError::Usage { message: e.to_string(), listing: true })
    }

    fn toll(&self, args: &TollArgs) -> CliResult<TollSpec> {
        let name = args
            .toll
            .clone()
            .or_else(|| self.file.toll.clone())
            .ok_or_else(|| CliError::Usage { message: "--toll is required".into(), listing: true })?;
        let params = match &args.toll_params {
            Some(raw) => Some(
                serde_json::from_str::<Value>(raw)
                    .map_err(|e| CliError::usage(format!("--toll-params is not valid JSON: {e}")))?,
            ),
            // config parameters belong to the config's toll
            None if args.toll.is_none() => self.file.toll_params.clone(),
            None => None,
        };
        match params {
            Some(_) if name.contains(':') => {
                Err(CliError::usage("give toll parameters either inline or with --toll-params, not both"))
            }
            Some(p) => Ok(TollSpec::builtin(&name, &p)?),
            None => Ok(name.parse()?),
        }
    }

    fn workers(&self, flag: Option<usize>) -> CliResult<usize> {
        let w = match flag.or(self.file.workers) {
            Some(w) => w,
            None => match std::env::var(WORKERS_ENV) {
                Ok(v) => v.trim().parse().map_err(|_| CliError::usage(format!("{WORKERS_ENV}={v} is not a count")))?,
                Err(_) => 1,
            },
        };
        if w == 0 {
            return Err(CliError::usage("workers must be at least 1"));
        }
        Ok(w)
    }

    fn finish(&self, mut report: Report) -> Rendered {
        let elapsed = self.start.elapsed().as_secs_f64();
        let body = match self.format {
            Format::Json => {
                if self.timings {
                    report.json["elapsed_seconds"] = json!(elapsed);
                }
                serde_json::to_string_pretty(&report.json).expect("reports serialize") + "\n"
            }
            Format::Csv => report.csv,
            Format::Text => {
                if self.timings {
                    let _ = writeln!(report.text, "elapsed = {elapsed:.3} s");
                }
                report.text
            }
        };
        Rendered { body, output: self.output.clone(), passed: report.passed }
    }
}

fn need<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::usage(format!("--{flag} is required")))
}

fn need_seed(value: Option<u64>) -> CliResult<u64> {
    value.ok_or_else(|| CliError::usage("--seed is required for randomized commands"))
}

fn envelope(command: &str, body: Value) -> Value {
    let mut out = json!({ "schema_version": SCHEMA_VERSION, "command": command });
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn run(cli: Cli) -> CliResult<Rendered> {
    match cli.command {
        Command::Generate(a) => {
            let ctx = Ctx::new(&a.common)?;
            let r = generate(&ctx, &a)?;
            Ok(ctx.finish(r))
        }
        Command::Enumerate(a) => {
            let ctx = Ctx::new(&a.common)?;
            let r = enumerate_cmd(&ctx, &a)?;
            Ok(ctx.finish(r))
        }
        Command::Count(a) => {
            let ctx = Ctx::new(&a.common)?;
            let r = count(&ctx, &a)?;
            Ok(ctx.finish(r))
        }
        Command::Constants(a) => {
            let ctx = Ctx::new(&a.common)?;
            let r = constants(&ctx, &a)?;
            Ok(ctx.finish(r))
        }
        Command::MeanExact(a) => {
            let ctx = Ctx::new(&a.common)?;
            let r = mean_exact(&ctx, &a)?;
            Ok(ctx.finish(r))
        }
        Command::Simulate(a) => {
            let ctx = Ctx::new(&a.common)?;
            let r = simulate_cmd(&ctx, &a)?;
            Ok(ctx.finish(r))
        }
        Command::Verify(VerifyCommand::Uniformity(a)) => {
            let ctx = Ctx::new(&a.common)?;
            let r = uniformity(&ctx, &a)?;
            Ok(ctx.finish(r))
        }
        Command::Verify(VerifyCommand::GportWeights(a)) => {
            let ctx = Ctx::new(&a.common)?;
            let r = gport_weights(&ctx, &a)?;
            Ok(ctx.finish(r))
        }
        Command::Verify(VerifyCommand::Mean(a)) => {
            let ctx = Ctx::new(&a.common)?;
            let r = verify_mean(&ctx, &a)?;
            Ok(ctx.finish(r))
        }
        Command::Decay(a) => {
            let ctx = Ctx::new(&a.common)?;
            let r = decay(&ctx, &a)?;
            Ok(ctx.finish(r))
        }
    }
}

fn generate(ctx: &Ctx, a: &GenerateArgs) -> CliResult<Report> {
    let model = ctx.model(&a.model)?;
    let n = need(a.n.or(ctx.file.n), "n")?;
    let samples = a.samples.or(ctx.file.samples).unwrap_or(1);
    let seed = need_seed(a.seed.or(ctx.file.seed))?;
    if n == 0 {
        return Err(CliError::usage("n must be at least 1"));
    }
    if (n as u64).saturating_mul(samples) > inctree::montecarlo::DEFAULT_BUDGET {
        return Err(CliError::usage("n * samples exceeds the vertex budget"));
    }
    let mut rng = worker_rng(seed, 0);
    let mut trees = Vec::with_capacity(samples as usize);
    for _ in 0..samples {
        trees.push(grow(&model, n, &mut rng)?.to_string());
    }
    let manifest = [SeedEntry { worker: 0, seed, stream: 0, samples }];
    let mut text = String::new();
    let mut csv = String::from("index,tree\n");
    for (i, t) in trees.iter().enumerate() {
        let _ = writeln!(text, "{t}");
        let _ = writeln!(csv, "{i},{}", csv_field(t));
    }
    let json = envelope(
        "generate",
        json!({ "model": model, "n": n, "samples": samples, "seed_manifest": manifest, "trees": trees }),
    );
    Ok(Report { json, csv, text, passed: true })
}

fn enumerate_cmd(ctx: &Ctx, a: &EnumerateArgs) -> CliResult<Report> {
    let model = ctx.model(&a.model)?;
    let n = need(a.n.or(ctx.file.n), "n")?;
    let toll = if a.toll.toll.is_some() || ctx.file.toll.is_some() { Some(ctx.toll(&a.toll)?) } else { None };
    let trees = enumerate(&model, n, &EnumerationLimits::default())?;
    let mut rows = Vec::with_capacity(trees.len());
    let mut text = String::new();
    let mut csv = String::from(if toll.is_some() { "tree,probability,value\n" } else { "tree,probability\n" });
    for t in &trees {
        let p = tree_probability(&model, t)?.to_string();
        let value = match &toll {
            Some(toll) => Some(evaluate_additive(toll, t)?.value),
            None => None,
        };
        let s = t.to_string();
        match value {
            Some(v) => {
                let _ = writeln!(text, "{s}\t{p}\t{v}");
                let _ = writeln!(csv, "{},{p},{v}", csv_field(&s));
            }
            None => {
                let _ = writeln!(text, "{s}\t{p}");
                let _ = writeln!(csv, "{},{p}", csv_field(&s));
            }
        }
        rows.push(json!({ "tree": s, "probability": p, "value": value }));
    }
    let json = envelope(
        "enumerate",
        json!({ "model": model, "n": n, "toll": toll.map(|t| t.to_string()), "count": trees.len(), "trees": rows }),
    );
    Ok(Report { json, csv, text, passed: true })
}

fn count(ctx: &Ctx, a: &CountArgs) -> CliResult<Report> {
    let model = ctx.model(&a.model)?;
    let n = need(a.n.or(ctx.file.n), "n")?;
    let c = match model {
        Model::Dary { d } => count_dary(d, n),
        Model::Recursive => count_recursive(n),
        Model::Gport { .. } => count_plane(n),
    }
    .to_string();
    Ok(Report {
        json: envelope("count", json!({ "model": model, "n": n, "count": c })),
        csv: format!("model,n,count\n{model},{n},{c}\n"),
        text: format!("{c}\n"),
        passed: true,
    })
}

fn constants_text(c: &TheoremConstants) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "model = {}", c.model);
    let _ = writeln!(s, "toll = {}", c.toll);
    let _ = writeln!(s, "method = {}", serde_json::to_value(c.method).unwrap().as_str().unwrap_or(""));
    if let Some(k) = c.truncation.tree_size_cutoff {
        let _ = writeln!(s, "K = {k}");
    }
    if let Some(n) = c.truncation.series_length {
        let _ = writeln!(s, "N = {n}");
    }
    let _ = writeln!(s, "mu = {}", c.mu);
    if let Some(se) = c.mu_std_error {
        let _ = writeln!(s, "mu_std_error = {se}");
    }
    if let Some(t) = c.tail_bound {
        let _ = writeln!(s, "tail_bound = {t}");
    }
    if let Some(v) = c.sigma2 {
        let _ = writeln!(s, "sigma2 = {v}");
    }
    let _ = writeln!(s, "mean_offset = {}", c.mean_offset);
    if c.mu_sequence.len() <= 50 {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "mu_sequence = {}", join(&c.mu_sequence));
        if !c.sigma2_sequence.is_empty() {
            let _ = writeln!(s, "sigma2_sequence = {}", join(&c.sigma2_sequence));
        }
    }
    for v in &c.variants {
        let _ = writeln!(s, "variant {:?}/{:?}: sigma2 = {}", v.sign, v.kernel, v.sigma2);
    }
    for w in &c.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

fn constants(ctx: &Ctx, a: &ConstantsArgs) -> CliResult<Report> {
    let model = ctx.model(&a.model)?;
    let toll = ctx.toll(&a.toll)?;
    let series = a.series.or(ctx.file.series);
    let method = a.method.or(ctx.file.method).unwrap_or(if series.is_some() {
        ConstantsMethod::SizeSeries
    } else {
        ConstantsMethod::Enumeration
    });
    let mut manifest = Vec::new();
    let c = match method {
        ConstantsMethod::Enumeration => {
            let k = a.k.or(ctx.file.k).unwrap_or_else(|| default_cutoff(&model));
            sigma2_enumeration(&model, &toll, k)?
        }
        ConstantsMethod::SizeSeries => {
            let n = need(series, "series")?;
            let samples = a.samples.or(ctx.file.samples);
            let profile = match samples {
                Some(samples) if !toll.meta().size_only => {
                    let seed = need_seed(a.seed.or(ctx.file.seed))?;
                    let cutoff = a.exact_cutoff.or(ctx.file.exact_cutoff).unwrap_or_else(|| default_cutoff(&model));
                    let p = expected_toll_profile_mc(&model, &toll, n, samples, seed, cutoff)?;
                    for e in &p.entries {
                        if let Provenance::Mc { samples, .. } = e.provenance {
                            manifest.push(SeedEntry { worker: 0, seed, stream: e.size as u64, samples });
                        }
                    }
                    p
                }
                _ => ExpectedTollProfile::exact(&model, &toll, n, &EnumerationLimits::default())?,
            };
            mu_size_series(&profile, n)?
        }
    };
    let mut csv = String::from("k,mu,sigma2\n");
    for (i, mu) in c.mu_sequence.iter().enumerate() {
        let _ = writeln!(csv, "{},{mu},{}", i + 1, opt(c.sigma2_sequence.get(i).copied()));
    }
    let json = envelope("constants", json!({ "constants": c, "seed_manifest": manifest }));
    Ok(Report { json, csv, text: constants_text(&c), passed: true })
}

fn mean_exact(ctx: &Ctx, a: &MeanExactArgs) -> CliResult<Report> {
    let model = ctx.model(&a.model)?;
    let toll = ctx.toll(&a.toll)?;
    let n = need(a.n.or(ctx.file.n), "n")?;
    let limits = EnumerationLimits::default();
    let formula = if toll.meta().size_only || n <= limits.max_size(&model) {
        let profile = ExpectedTollProfile::exact(&model, &toll, n, &limits)?;
        Some(exact_mean(&profile, n)?)
    } else {
        None
    };
    let enumerated = match exact_moments(&model, &toll, n, 1) {
        Ok(m) => Some(m.raw),
        Err(Error::ResourceLimit(_)) => None,
        Err(e) => return Err(e.into()),
    };
    if formula.is_none() && enumerated.is_none() {
        return Err(CliError::usage(format!("n = {n} is beyond the enumeration limit for {model}")));
    }
    let fringe_counts: Vec<f64> = (1..n).map(|m| expected_fringe_count(&model, n, m)).collect::<Result<_, _>>()?;
    let mut text = format!("model = {model}\ntoll = {toll}\nn = {n}\n");
    if let Some(f) = formula {
        let _ = writeln!(text, "mean (fringe decomposition) = {f}");
    }
    if let Some(e) = enumerated {
        let _ = writeln!(text, "mean (enumeration) = {e}");
    }
    let csv = format!("n,formula,enumerated\n{n},{},{}\n", opt(formula), opt(enumerated));
    let json = envelope(
        "mean-exact",
        json!({
            "model": model, "toll": toll.to_string(), "n": n,
            "formula": formula, "enumerated": enumerated, "expected_fringe_counts": fringe_counts,
        }),
    );
    Ok(Report { json, csv, text, passed: true })
}

fn verify_mean(ctx: &Ctx, a: &MeanExactArgs) -> CliResult<Report> {
    let model = ctx.model(&a.model)?;
    let toll = ctx.toll(&a.toll)?;
    let n = need(a.n.or(ctx.file.n), "n")?;
    let r = verify_mean_formula(&model, &toll, n)?;
    let verdict = if r.passed { "pass" } else { "FAIL" };
    let text = format!(
        "{verdict}: formula {} vs enumeration {} (|diff| {:e}, tolerance {:e})\n",
        r.formula, r.enumerated, r.abs_diff, r.tolerance
    );
    let csv = format!(
        "model,toll,n,formula,enumerated,abs_diff,tolerance,passed\n{model},{},{n},{},{},{},{},{}\n",
        csv_field(&toll.to_string()),
        r.formula,
        r.enumerated,
        r.abs_diff,
        r.tolerance,
        r.passed
    );
    Ok(Report { json: envelope("verify mean", json!({ "report": r })), csv, text, passed: r.passed })
}

fn uniformity(ctx: &Ctx, a: &UniformityArgs) -> CliResult<Report> {
    let d = need(a.d.or(ctx.file.d), "d")?;
    let n = need(a.n.or(ctx.file.n), "n")?;
    let samples = a.samples.or(ctx.file.samples).unwrap_or(100_000);
    let seed = need_seed(a.seed.or(ctx.file.seed))?;
    let r = verify_uniformity(d, n, samples, seed)?;
    let verdict = if r.passed { "pass" } else { "FAIL" };
    let text = format!(
        "{verdict}: chi2 = {} on {} degrees of freedom over {} trees, p = {}\n",
        r.chi_square, r.degrees_of_freedom, r.cells, r.p_value
    );
    let csv = format!(
        "d,n,samples,seed,cells,chi_square,degrees_of_freedom,p_value,passed\n{d},{n},{samples},{seed},{},{},{},{},{}\n",
        r.cells, r.chi_square, r.degrees_of_freedom, r.p_value, r.passed
    );
    let manifest = [SeedEntry { worker: 0, seed, stream: 0, samples }];
    let json = envelope("verify uniformity", json!({ "report": r, "seed_manifest": manifest }));
    Ok(Report { json, csv, text, passed: r.passed })
}

fn gport_weights(ctx: &Ctx, a: &GportWeightsArgs) -> CliResult<Report> {
    let alpha = a.alpha.clone().or_else(|| {
        ctx.file.alpha.as_ref().map(|v| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        })
    });
    let alpha = inctree::model::parse_rational(&need(alpha, "alpha")?)?;
    let n = need(a.n.or(ctx.file.n), "n")?;
    let r = verify_model_probability(alpha, n)?;
    let verdict = if r.passed { "pass" } else { "FAIL" };
    let mut text = format!("{verdict}: {} trees, total weight {}\n", r.trees, r.total_weight);
    for m in &r.mismatches {
        let _ = writeln!(text, "mismatch: {m}");
    }
    let csv = format!(
        "alpha,n,trees,total_weight,probabilities_sum_to_one,passed\n{},{n},{},{},{},{}\n",
        r.alpha, r.trees, r.total_weight, r.probabilities_sum_to_one, r.passed
    );
    Ok(Report { json: envelope("verify gport-weights", json!({ "report": r })), csv, text, passed: r.passed })
}

fn simulate_cmd(ctx: &Ctx, a: &SimulateArgs) -> CliResult<Report> {
    let model = ctx.model(&a.model)?;
    let toll = ctx.toll(&a.toll)?;
    let n = need(a.n.or(ctx.file.n), "n")?;
    let samples = need(a.samples.or(ctx.file.samples), "samples")?;
    let seed = need_seed(a.seed.or(ctx.file.seed))?;
    let workers = ctx.workers(a.workers)?;
    let bins = a.bins.or(ctx.file.bins).unwrap_or(201);
    let plan = if bins == 0 {
        HistogramPlan::None
    } else {
        let lattice = a.lattice.or(ctx.file.lattice).or_else(|| toll.lattice(&model));
        HistogramPlan::Auto { bins, lattice, center: None, sd: None }
    };
    let cfg = SimConfig::new(model, n, samples, seed).workers(workers).histogram(plan);
    cfg.validate()?;
    let constants = match a.k.or(ctx.file.k) {
        Some(k) => Some(sigma2_enumeration(&model, &toll, k)?),
        None => None,
    };
    let stats = simulate(&cfg, &toll)?;
    let report = normality_report(&stats, constants.as_ref());
    let mut text = format!(
        "model = {model}\ntoll = {toll}\nn = {n}\nsamples = {}\nseed = {seed}\nworkers = {workers}\n\
         mean = {}\nstd_error = {}\nvariance = {}\nvariance/n = {}\nskewness = {} (se {})\n\
         excess_kurtosis = {} (se {})\nmin = {}\nmax = {}\n",
        stats.count,
        stats.mean,
        stats.std_error_of_mean(),
        report.variance,
        report.variance_per_n,
        report.skewness,
        report.skewness_std_error,
        report.excess_kurtosis,
        report.kurtosis_std_error,
        stats.min,
        stats.max,
    );
    if let Some(ks) = report.ks_statistic {
        let _ = writeln!(text, "ks = {ks}");
    }
    if let Some(c) = report.mean_check {
        let _ = writeln!(text, "predicted mean = {} (z = {:.2})", c.predicted, c.z_score);
    }
    if let Some(c) = report.variance_check {
        let _ = writeln!(text, "predicted variance = {} (z = {:.2})", c.predicted, c.z_score);
    }
    if report.sigma_zero {
        let _ = writeln!(text, "warning: degenerate variance, the normal limit does not apply");
    }
    for s in &stats.seed_manifest {
        let who = if s.stream == PILOT_STREAM { "pilot".to_string() } else { format!("worker {}", s.worker) };
        let _ = writeln!(text, "seed manifest: {who} seed {} stream {} samples {}", s.seed, s.stream, s.samples);
    }
    let mut csv = String::from("lower,upper,count\n");
    if let Some(h) = &stats.histogram {
        let _ = writeln!(csv, "-inf,{},{}", h.spec.edge(0), h.below);
        for (i, c) in h.counts.iter().enumerate() {
            let _ = writeln!(csv, "{},{},{c}", h.spec.edge(i), h.spec.edge(i + 1));
        }
        let _ = writeln!(csv, "{},inf,{}", h.spec.edge(h.spec.bins), h.above);
    }
    let json = envelope(
        "simulate",
        json!({
            "config": cfg, "toll": toll.to_string(), "seed_manifest": stats.seed_manifest,
            "stats": stats, "report": report, "constants": constants,
        }),
    );
    Ok(Report { json, csv, text, passed: true })
}

fn decay(ctx: &Ctx, a: &DecayArgs) -> CliResult<Report> {
    let model = ctx.model(&a.model)?;
    let toll = ctx.toll(&a.toll)?;
    let sizes = need(a.sizes.clone().or_else(|| ctx.file.sizes.clone()), "sizes")?;
    let samples = a.samples.or(ctx.file.samples).unwrap_or(1000);
    let seed = need_seed(a.seed.or(ctx.file.seed))?;
    let r = estimate_toll_decay(&model, &toll, &sizes, samples, seed)?;
    let mut text = String::from("size\tmean_abs\tstd_error\n");
    let mut csv = String::from("size,mean_abs,std_error\n");
    for p in &r.points {
        let _ = writeln!(text, "{}\t{}\t{}", p.size, p.mean_abs, p.std_error);
        let _ = writeln!(csv, "{},{},{}", p.size, p.mean_abs, p.std_error);
    }
    if let Some(s) = r.log_log_slope {
        let _ = writeln!(text, "log-log slope = {s}");
    }
    let _ = writeln!(text, "decreasing = {}", r.decreasing);
    let manifest: Vec<SeedEntry> =
        sizes.iter().map(|&m| SeedEntry { worker: 0, seed, stream: m as u64, samples }).collect();
    let json = envelope("decay", json!({ "report": r, "seed_manifest": manifest }));
    Ok(Report { json, csv, text, passed: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("1()"), "1()");
        assert_eq!(csv_field("1[0:_, 1:_]"), "\"1[0:_, 1:_]\"");
        assert_eq!(csv_field("a\"b"), "\"a\"\"b\"");
    }

    #[test]
    fn envelope_leads_with_schema() {
        let v = envelope("count", json!({ "n": 3 }));
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert_eq!(v["n"], 3);
    }

    #[test]
    fn library_errors_map_to_exit_classes() {
        assert!(matches!(CliError::from(Error::UnknownToll("x".into())), CliError::Usage { listing: true, .. }));
        assert!(matches!(CliError::from(Error::Inspection("x".into())), CliError::Failed(_)));
        assert!(matches!(CliError::from(Error::ResourceLimit("x".into())), CliError::Usage { listing: false, .. }));
    }
}
