//! Command-line grammar and the JSON config file that can stand in for flags.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use inctree::functional::REGISTRY;
use serde::Deserialize;
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(name = "inctree", version, about = "Random increasing trees and their additive functionals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample random trees and print them in the textual tree format.
    Generate(GenerateArgs),
    /// List every tree of size n with its probability.
    Enumerate(EnumerateArgs),
    /// Number of increasing trees of size n.
    Count(CountArgs),
    /// Limit constants mu and sigma^2 with their truncation sequences.
    Constants(ConstantsArgs),
    /// Exact mean of F(T_n) from the fringe decomposition, next to enumeration.
    MeanExact(MeanExactArgs),
    /// Monte Carlo sample of F(T_n) with normality diagnostics.
    Simulate(SimulateArgs),
    /// Oracle suites.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Monte Carlo estimates of E|f(T_k)| across sizes.
    Decay(DecayArgs),
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Chi-square test of the d-ary generator against the uniform law.
    Uniformity(UniformityArgs),
    /// Rational identities of the GPORT weights.
    GportWeights(GportWeightsArgs),
    /// Exact mean formula against enumeration.
    Mean(MeanExactArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantsMethod {
    /// Tree sums up to size K.
    Enumeration,
    /// Size-indexed series up to N.
    SizeSeries,
}

#[derive(Args, Debug, Default)]
pub struct Common {
    /// JSON file with default values for any flag; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Add wall-clock timings to the report (they make reruns differ).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Args, Debug, Default)]
pub struct ModelArgs {
    /// Model: dary:D, binary, recursive, port, gport:ALPHA.
    #[arg(long)]
    pub model: Option<String>,
    /// Arity for `--model dary`.
    #[arg(long)]
    pub d: Option<usize>,
    /// Parameter for `--model gport`, e.g. 1/2 or 0.25.
    #[arg(long)]
    pub alpha: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct TollArgs {
    /// Toll name, optionally with compact parameters: fringe-size:k=2.
    #[arg(long)]
    pub toll: Option<String>,
    /// Toll parameters as a JSON object, e.g. '{"k": 2}'.
    #[arg(long)]
    pub toll_params: Option<String>,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of trees.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub n: Option<usize>,
    /// Also evaluate F for this toll on every tree.
    #[command(flatten)]
    pub toll: TollArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ConstantsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub toll: TollArgs,
    #[arg(long, value_enum)]
    pub method: Option<ConstantsMethod>,
    /// Largest tree size in the tree sums.
    #[arg(long)]
    pub k: Option<usize>,
    /// Length N of the size-indexed series.
    #[arg(long)]
    pub series: Option<usize>,
    /// Monte Carlo samples per size for the series, where enumeration is too large.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sizes up to this are enumerated exactly in the series profile.
    #[arg(long)]
    pub exact_cutoff: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct MeanExactArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub toll: TollArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub toll: TollArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to $INCTREE_WORKERS, then 1.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Histogram bins (0 disables the histogram and the KS distance).
    #[arg(long)]
    pub bins: Option<usize>,
    /// Lattice spacing of F for the histogram; defaults to the toll's own.
    #[arg(long)]
    pub lattice: Option<f64>,
    /// Compare against limit constants truncated at this tree size.
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct UniformityArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct GportWeightsArgs {
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct DecayArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub toll: TollArgs,
    /// Comma-separated sizes, e.g. 10,100,1000.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

/// Contents of `--config`. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<String>,
    pub d: Option<usize>,
    pub alpha: Option<Value>,
    pub toll: Option<String>,
    pub toll_params: Option<Value>,
    pub n: Option<usize>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub bins: Option<usize>,
    pub lattice: Option<f64>,
    pub k: Option<usize>,
    pub series: Option<usize>,
    pub exact_cutoff: Option<usize>,
    pub sizes: Option<Vec<usize>>,
    pub method: Option<ConstantsMethod>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

/// Help text listing every model and registered toll.
pub fn registry_listing() -> String {
    let mut s = String::from(
        "Models:\n  \
         dary:D        uniform d-ary increasing trees, D >= 2 (or --model dary --d D)\n  \
         binary        dary:2\n  \
         recursive     uniform recursive trees\n  \
         port          plane-oriented recursive trees, gport:1\n  \
         gport:ALPHA   generalized plane-oriented recursive trees, rational ALPHA > 0 (or --model gport --alpha ALPHA)\n\n\
         Tolls (--toll NAME:key=value,... or --toll NAME --toll-params JSON):\n",
    );
    for (name, params, about) in REGISTRY {
        let head = if params.is_empty() { name.to_string() } else { format!("{name}:{params}") };
        s.push_str(&format!("  {head:<40} {about}\n"));
    }
    s
}
