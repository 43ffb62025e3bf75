//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "klab", version, about = "Zero-sum sequences, length sets and Krull monoid models")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Atom cache directory (also KLAB_CACHE_DIR).
    #[arg(long, global = true, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Neither read nor write the atom cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Worker threads (also KLAB_THREADS).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Canonical form and invariants of a group.
    Group {
        #[arg(long)]
        spec: String,
    },
    /// Quotient of a group by the subgroup generated by the given elements.
    Quotient {
        #[arg(long)]
        group: String,
        /// Relation element; repeatable.
        #[arg(long = "rel", value_name = "ELT")]
        relations: Vec<String>,
    },
    /// Krull monoid model whose class group is the direct sum of the given groups.
    Model(ModelArgs),
    /// Localize a presentation by inverting classes or primes.
    Localize(LocalizeArgs),
    /// Atoms of the block monoid over a support.
    Atoms {
        #[command(flatten)]
        target: SupportArgs,
        /// Maximal atom length to enumerate.
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Length set and factorization counts of a zero-sum sequence.
    Lengths {
        #[command(flatten)]
        target: SupportArgs,
        /// Sequence literal, e.g. "[1^3,2^3]".
        #[arg(long)]
        sequence: String,
        #[arg(long)]
        cap: Option<u64>,
        /// Also list every factorization.
        #[arg(long)]
        factorizations: bool,
    },
    /// Set of distances of the block monoid, up to an element cap.
    Delta {
        #[command(flatten)]
        target: SupportArgs,
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Minimal distances over all subsets of a small finite group.
    DeltaStar {
        #[arg(long)]
        group: String,
        #[arg(long)]
        cap: Option<u64>,
        /// Largest group order for the subset sweep.
        #[arg(long)]
        guard: Option<u64>,
    },
    /// Decide whether a finite set is an almost arithmetical multiprogression.
    Aamp {
        /// Comma-separated integers.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        set: Vec<i64>,
        #[arg(long)]
        d: u64,
        /// Bound to test; omitted means report the minimal bound.
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Minimal AAMP bounds over every zero-sum sequence up to a cap.
    AampSurvey {
        #[arg(long)]
        group: String,
        #[arg(long)]
        cap: Option<u64>,
        #[arg(long)]
        guard: Option<u64>,
    },
    /// Look for a sequence with two distinct factorization lengths.
    Halffactorial {
        #[command(flatten)]
        target: SupportArgs,
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Search for a sequence with a prescribed length set and factorization counts.
    Realize(RealizeArgs),
    /// Inspect or clear the atom cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Args)]
pub struct SupportArgs {
    #[arg(long)]
    pub group: String,
    /// Support literal, e.g. "[1,2]"; defaults to the whole (finite) group.
    #[arg(long)]
    pub support: Option<String>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Comma-separated summands, e.g. C2,C3,C2xC2.
    #[arg(long, value_delimiter = ',', required = true)]
    pub groups: Vec<String>,
    /// Coordinate box for free summands.
    #[arg(long = "box", value_name = "R")]
    pub coordinate_box: Option<u64>,
    /// Also localize onto this summand (0-based).
    #[arg(long)]
    pub component: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    /// Presentation JSON file.
    #[arg(long, conflicts_with = "groups", required_unless_present = "groups")]
    pub presentation: Option<PathBuf>,
    /// Build the presentation as with `model --groups`.
    #[arg(long, value_delimiter = ',')]
    pub groups: Option<Vec<String>>,
    #[arg(long = "box", value_name = "R")]
    pub coordinate_box: Option<u64>,
    /// `class=<elt>` or `prime=<label>`; repeatable.
    #[arg(long = "invert", value_name = "SPEC")]
    pub inversions: Vec<String>,
}

#[derive(Debug, Args)]
pub struct RealizeArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub lengths: Vec<usize>,
    /// Minimal factorization counts per length; defaults to all 1.
    #[arg(long, value_delimiter = ',')]
    pub mult: Option<Vec<u64>>,
    /// Comma-separated group family; defaults to the built-in family.
    #[arg(long, value_delimiter = ',')]
    pub family: Option<Vec<String>>,
    #[arg(long)]
    pub max_support: Option<usize>,
    #[arg(long)]
    pub max_length: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum CacheAction {
    /// Print the cache directory.
    Path,
    /// Count entries and bytes.
    Stats,
    /// Remove every entry.
    Clear,
}
