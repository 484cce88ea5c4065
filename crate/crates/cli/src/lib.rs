//! Library side of the `virstag` command: argument types, command
//! dispatch and the worked-example checks.

pub mod commands;
pub mod modspec;
pub mod reproduce;

use clap::{Args, Parser, Subcommand};
use virstag_core::VirError;

#[derive(Parser, Debug)]
#[command(name = "virstag", version, about = "Exact computations for rank-2 staggered Virasoro modules")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// Exactly one of `--t` and `--c`.
#[derive(Args, Debug, Clone)]
pub struct Param {
    /// Parameter t, e.g. 3/2.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Central charge; the larger of its two parameters t is used.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct Pair {
    #[command(flatten)]
    pub param: Param,
    /// Left module: `h`, `h/H1[,H2]` (absolute weights) or `h:g1[,g2]`.
    #[arg(long, allow_hyphen_values = true)]
    pub left: String,
    /// Right module, same notation.
    #[arg(long, allow_hyphen_values = true)]
    pub right: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Singular vector lattice of a Verma module.
    Classify {
        #[command(flatten)]
        param: Param,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long, default_value_t = 12)]
        max_grade: usize,
    },
    /// Normalised singular vector at a grade, with rank and prime factors.
    Singular {
        #[command(flatten)]
        param: Param,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long)]
        grade: usize,
    },
    /// Gram matrix of the invariant form.
    Gram {
        #[command(flatten)]
        param: Param,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long)]
        grade: usize,
    },
    /// Checks that det(Gram) over the Kac product formula is independent of h.
    KacdetCheck {
        #[command(flatten)]
        param: Param,
        /// Comma-separated weights; random ones are drawn when omitted.
        #[arg(long, allow_hyphen_values = true)]
        h: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_grade: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Relations U1 L1 + U2 L2 = 0 at grade -m.
    Intersection {
        #[arg(long)]
        m: usize,
    },
    /// Decides which staggered modules exist.
    Exists {
        #[command(flatten)]
        pair: Pair,
    },
    /// Beta invariants of given data (right module taken to be Verma).
    Beta {
        #[command(flatten)]
        pair: Pair,
        /// Target invariants, e.g. `-1/2` or `1,0`; representative data is built.
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
        /// Data as JSON `{"omega1": [...], "omega2": [...]}` over the
        /// left basis, or `@file`.
        #[arg(long)]
        data: Option<String>,
        /// Also test invariance under random gauge transformations.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Searches for the singular vectors Xbar y - varpi directly.
    Oracle {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
        /// Emit the action of L_-2..L_2 on the module with Verma right
        /// module up to this grade.
        #[arg(long)]
        max_grade: Option<usize>,
    },
    /// The generic-t table of beta-bar for ell = 0.
    #[command(name = "table-6-12")]
    Table {
        #[arg(long)]
        r: Option<i64>,
        #[arg(long)]
        s: Option<i64>,
    },
    /// Runs a worked example end to end against its known values.
    Reproduce {
        /// Example id, or `all`.
        id: String,
    },
}

/// Process exit codes.
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INCOMPATIBLE: u8 = 3;
pub const EXIT_UNSUPPORTED: u8 = 4;

pub fn exit_for(e: &VirError) -> u8 {
    match e {
        VirError::Parse(_) | VirError::ZeroParameter | VirError::IrrationalRoots(_) => EXIT_USAGE,
        VirError::Incompatible(_) => EXIT_INCOMPATIBLE,
        VirError::Unsupported(_) => EXIT_UNSUPPORTED,
        _ => 1,
    }
}
