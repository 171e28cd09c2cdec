use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use projlin_core::arrangement::ProjectiveSampler;
use projlin_core::montecarlo::MonteCarloError;
use projlin_core::{
    analyze_treebank, class_formula, count_projective, enumerate_projective, estimate_expected_d,
    expected_projective, make_class, max_expected, min_expected, parse_conllu, seeded_rng, selfcheck,
    write_sentence_csv, write_summary_csv, AnalysisConfig, BootstrapConfig, ConlluItem, Error, ExactRational,
    LengthVariant, MemoTable, Method, ParseOptions, RootedTree, TreeClass, DEFAULT_ENUMERATION_CAP,
    DEFAULT_MINIMA_CAP,
};

#[derive(Parser)]
#[command(name = "projlin", version, about = "Projective linear arrangements of rooted trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact expected sum of edge lengths over random projective arrangements
    Expected {
        #[command(flatten)]
        tree: TreeInput,
        #[arg(long, default_value = "standard")]
        variant: LengthVariant,
        #[arg(long, default_value = "closed")]
        method: Method,
        #[command(flatten)]
        format: Format,
    },
    /// Number of projective arrangements
    Count {
        #[command(flatten)]
        tree: TreeInput,
    },
    /// Every projective arrangement, one vertex order per line
    Enumerate {
        #[command(flatten)]
        tree: TreeInput,
        /// Refuse trees with more arrangements than this
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
    },
    /// Uniformly random projective arrangements, or their mean sum of lengths
    Sample {
        #[command(flatten)]
        tree: TreeInput,
        #[arg(long, default_value_t = 1)]
        z: u64,
        #[arg(long, env = "PROJLIN_SEED", default_value_t = 0)]
        seed: u64,
        /// Print the Monte Carlo mean instead of the arrangements
        #[arg(long)]
        mean: bool,
    },
    /// Closed-form count and expectation for a star, quasi-star or linear tree
    Classes {
        /// star_hub, star_leaf, qstar_hub, qstar_edge_leaf, qstar_far_leaf, qstar_bridge or linear_k
        #[arg(long)]
        class: TreeClass,
        #[arg(long)]
        n: usize,
        /// Root offset from one end, linear trees only
        #[arg(long)]
        k: Option<usize>,
        /// Also print the constructed tree's head vector
        #[arg(long)]
        show_tree: bool,
        #[command(flatten)]
        format: Format,
    },
    /// Trees minimizing the expectation: "n, value, count, head vectors"
    Minima {
        #[arg(long)]
        n: usize,
        /// Print every row from 1 to n
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = DEFAULT_MINIMA_CAP)]
        cap: usize,
        #[command(flatten)]
        format: Format,
    },
    /// Maximum expectation and the tree attaining it
    Maxima {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        format: Format,
    },
    /// Exact and sampled expectations for every sentence of a CoNLL-U file
    Analyze {
        #[arg(long)]
        input: PathBuf,
        /// Sample counts, comma separated
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000")]
        z: Vec<u64>,
        #[arg(long, env = "PROJLIN_SEED", default_value_t = 0)]
        seed: u64,
        /// Drop PUNCT tokens before building trees
        #[arg(long)]
        filter_punct: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Bootstrap resamples for the confidence intervals
        #[arg(long, default_value_t = 1000)]
        resamples: usize,
        #[arg(long, default_value_t = 0.99)]
        confidence: f64,
        #[arg(long, default_value = "sentences.csv")]
        sentences_out: PathBuf,
        #[arg(long, default_value = "summary.csv")]
        summary_out: PathBuf,
    },
    /// Brute-force consistency checks on all small trees
    Selfcheck {
        #[arg(long, default_value_t = 7)]
        max_n: usize,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct TreeInput {
    /// Head vector, e.g. "0 1 1" (0 marks the root)
    #[arg(long)]
    tree: Option<String>,
    /// File holding a whitespace-separated head vector
    #[arg(long)]
    tree_file: Option<PathBuf>,
}

impl TreeInput {
    fn load(&self) -> Result<RootedTree, Error> {
        let text = match (&self.tree, &self.tree_file) {
            (Some(t), _) => t.clone(),
            (None, Some(path)) => std::fs::read_to_string(path)?,
            (None, None) => unreachable!("clap requires one of the two"),
        };
        Ok(text.parse()?)
    }
}

#[derive(Args)]
struct Format {
    /// Print rationals as decimals with this many digits
    #[arg(long)]
    decimal: Option<usize>,
}

impl Format {
    fn show(&self, value: &ExactRational) -> String {
        match self.decimal {
            Some(digits) => value.to_decimal(digits),
            None => value.to_string(),
        }
    }
}

enum Failure {
    Core(Error),
    SelfCheck(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Core(e.into())
    }
}

fn run(command: Command, out: &mut impl Write) -> Result<(), Failure> {
    match command {
        Command::Expected {
            tree,
            variant,
            method,
            format,
        } => {
            let tree = tree.load()?;
            writeln!(out, "{}", format.show(&expected_projective(&tree, variant, method)))?;
        }
        Command::Count { tree } => {
            writeln!(out, "{}", count_projective(&tree.load()?))?;
        }
        Command::Enumerate { tree, cap } => {
            let tree = tree.load()?;
            for arr in enumerate_projective(&tree, cap).map_err(Error::from)? {
                writeln!(out, "{arr}")?;
            }
        }
        Command::Sample { tree, z, seed, mean } => {
            let tree = tree.load()?;
            if mean {
                let estimate = estimate_expected_d(&tree, z, seed).map_err(Error::from)?;
                writeln!(out, "{}", estimate.mean_d)?;
            } else {
                if z == 0 {
                    return Err(Error::from(MonteCarloError::ZeroSamples).into());
                }
                let mut rng = seeded_rng(seed);
                let mut sampler = ProjectiveSampler::new(&tree);
                for _ in 0..z {
                    writeln!(out, "{}", sampler.sample(&mut rng))?;
                }
            }
        }
        Command::Classes {
            class,
            n,
            k,
            show_tree,
            format,
        } => {
            let (count, value) = class_formula(class, n, k).map_err(Error::from)?;
            if show_tree {
                let tree = make_class(class, n, k).map_err(Error::from)?;
                writeln!(out, "{count}, {}, {tree}", format.show(&value))?;
            } else {
                writeln!(out, "{count}, {}", format.show(&value))?;
            }
        }
        Command::Minima { n, all, cap, format } => {
            let mut memo = MemoTable::with_cap(cap);
            min_expected(n, &mut memo).map_err(Error::from)?;
            let first = if all { 1 } else { n };
            for entry in memo.iter().filter(|e| e.n >= first && e.n <= n) {
                let trees: Vec<String> = entry.trees.iter().map(RootedTree::to_string).collect();
                writeln!(
                    out,
                    "{}, {}, {}, {}",
                    entry.n,
                    format.show(&entry.value),
                    entry.trees.len(),
                    trees.join("; ")
                )?;
            }
        }
        Command::Maxima { n, format } => {
            let (value, star) = max_expected(n).map_err(Error::from)?;
            writeln!(out, "{}, {star}", format.show(&value))?;
        }
        Command::Analyze {
            input,
            z,
            seed,
            filter_punct,
            jobs,
            resamples,
            confidence,
            sentences_out,
            summary_out,
        } => {
            let reader = BufReader::new(File::open(&input)?);
            let items: Vec<ConlluItem> =
                parse_conllu(reader, ParseOptions { filter_punct }).collect::<io::Result<_>>()?;
            let config = AnalysisConfig {
                z_values: z,
                seed,
                bootstrap: BootstrapConfig {
                    resamples,
                    confidence,
                    seed,
                },
                jobs,
            };
            let report = analyze_treebank(items, &config).map_err(Error::from)?;
            write_sentence_csv(&report, BufWriter::new(File::create(&sentences_out)?)).map_err(Error::from)?;
            write_summary_csv(&report, BufWriter::new(File::create(&summary_out)?)).map_err(Error::from)?;
            writeln!(
                out,
                "{} sentences analyzed, wrote {} and {}",
                report.sentences.len(),
                sentences_out.display(),
                summary_out.display()
            )?;
            for (reason, count) in &report.skipped {
                eprintln!("skipped {count} sentence(s): {reason}");
            }
        }
        Command::Selfcheck { max_n } => {
            let outcomes = selfcheck::run(max_n);
            for c in &outcomes {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{tag} {}: {}", c.name, c.detail)?;
            }
            let failed = outcomes.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(Failure::SelfCheck(failed));
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match run(cli.command, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(Error::Io(e))) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            let _ = out.flush();
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(if e.is_cap_exceeded() { 3 } else { 2 })
        }
        Err(Failure::SelfCheck(failed)) => {
            let _ = out.flush();
            eprintln!("error: SelfCheckFailed: {failed} check(s) failed");
            ExitCode::from(2)
        }
    }
}
