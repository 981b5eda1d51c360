use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "uniformity-lab", version, about = "Complexity of linear systems, uniformity norms and configuration counts over F_p^n")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand; all of them are echoed in reports.
#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// Odd prime modulus.
    #[arg(long, global = true, default_value_t = 7)]
    pub p: u32,
    /// Dimension of the group F_p^n.
    #[arg(long, global = true, default_value_t = 2)]
    pub n: usize,
    /// Built-in system name or path to a system JSON file.
    #[arg(long, global = true)]
    pub system: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest number of scalar operations a job may perform (e.g. 1e10).
    #[arg(long, global = true, env = "UNIFORMITY_LAB_BUDGET", value_parser = parse_budget, default_value = "1e10")]
    pub budget: u128,
    /// Worker threads; 1 gives a single-threaded run.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Also write the JSON report to this path.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

fn parse_budget(s: &str) -> Result<u128, String> {
    let s = s.trim().replace('_', "");
    if let Ok(v) = s.parse::<u128>() {
        return if v == 0 { Err("budget must be positive".into()) } else { Ok(v) };
    }
    let (mantissa, exp) = s
        .split_once(['e', 'E'])
        .ok_or_else(|| format!("`{s}` is not an operation count"))?;
    let m: u128 = mantissa.parse().map_err(|_| format!("bad mantissa in `{s}`"))?;
    let e: u32 = exp.parse().map_err(|_| format!("bad exponent in `{s}`"))?;
    let v = 10u128
        .checked_pow(e)
        .and_then(|t| t.checked_mul(m))
        .ok_or_else(|| format!("`{s}` overflows"))?;
    if v == 0 {
        Err("budget must be positive".into())
    } else {
        Ok(v)
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Print the CS-complexity of a system.
    Complexity,
    /// Print whether the k-th powers of the forms are linearly independent.
    Independence {
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Print whether the system is in s-normal form.
    NormalForm {
        #[arg(long, default_value_t = 2)]
        s: usize,
    },
    /// Evaluate a uniformity norm.
    Norm {
        #[command(flatten)]
        input: FunctionInput,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_enum, default_value_t = NormMethodArg::Direct)]
        method: NormMethodArg,
    },
    /// Probability that every form lands in a set, or the average of a product of functions.
    Count {
        #[command(flatten)]
        input: FunctionInput,
        #[arg(long, value_enum, default_value_t = CountMethodArg::Both)]
        method: CountMethodArg,
    },
    /// Run one of the verification experiments.
    Verify {
        #[arg(value_enum)]
        experiment: Experiment,
        /// Random instances to draw, where the experiment draws any.
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        d1: usize,
        #[arg(long, default_value_t = 1)]
        d2: usize,
    },
    /// Hypergraph checks on X × Y × Z.
    Octahedron {
        /// Vertex class size for the counterexample.
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, value_enum, default_value_t = OctahedronCheck::Counterexample)]
        check: OctahedronCheck,
    },
    /// Catalog of built-in systems.
    List {
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct FunctionInput {
    /// `quadzero` for {x : xᵀx = 0}, or a function file of mode indicator.
    #[arg(long, conflicts_with = "function")]
    pub set: Option<String>,
    /// Function file; repeat once per form, or give one for all forms.
    #[arg(long)]
    pub function: Vec<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMethodArg {
    Direct,
    Derivative,
    Fourier,
    Exact,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethodArg {
    Direct,
    Dual,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Gauss,
    Badex,
    Gvn,
    Atoms,
    Quadfactor,
    Completefactor,
    Projections,
    Bound1,
    Pythagoras,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OctahedronCheck {
    Lift,
    Counterexample,
}
