//! CoNLL-U ingestion and the exact-versus-sampled treebank comparison.
//!
//! Each sentence becomes a rooted tree over its syntactic words (multiword
//! token ranges and empty nodes are dropped) together with its observed
//! arrangement, the surface word order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{self, BufRead, Write};

use rayon::prelude::*;

use crate::arrangement::{count_projective, is_projective, sum_edge_lengths, LengthVariant, LinearArrangement};
use crate::expectation::{expected_d_projective, expected_dprime_projective, Method};
use crate::montecarlo::{aggregate_errors, estimate_expected_d, relative_error, BootstrapConfig, ErrorStats, McEstimate};
use crate::numeric::{BigCount, ExactRational};
use crate::tree::{RootedTree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// Position in the sentence after compaction, `1..=n`.
    pub id: usize,
    pub form: String,
    pub upos: String,
    /// Compacted head id, `0` for the root.
    pub head: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreebankSentence {
    pub sentence_id: String,
    pub tokens: Vec<Token>,
    pub tree: RootedTree,
    /// Identity on the compacted token order.
    pub observed: LinearArrangement,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SkipReason {
    /// A token line without exactly 10 tab-separated columns.
    MalformedLine { line: usize, columns: usize },
    /// An ID or HEAD field that is not a number.
    BadField { line: usize, field: &'static str },
    NoWords,
    NoRoot,
    MultipleRoots,
    HeadOutOfRange { head: String },
    /// A filtered token still heads a kept one.
    FilteredHead,
    Cycle,
}

impl SkipReason {
    /// Stable code used in skip summaries.
    pub fn code(&self) -> &'static str {
        match self {
            SkipReason::MalformedLine { .. } => "MalformedLine",
            SkipReason::BadField { .. } => "BadField",
            SkipReason::NoWords => "NoWords",
            SkipReason::NoRoot => "NoRoot",
            SkipReason::MultipleRoots => "MultipleRoots",
            SkipReason::HeadOutOfRange { .. } => "HeadOutOfRange",
            SkipReason::FilteredHead => "FilteredHead",
            SkipReason::Cycle => "Cycle",
        }
    }
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkipReason::MalformedLine { line, columns } => {
                write!(f, "line {line}: expected 10 columns, found {columns}")
            }
            SkipReason::BadField { line, field } => write!(f, "line {line}: unreadable {field}"),
            SkipReason::HeadOutOfRange { head } => write!(f, "head {head} is not a word of the sentence"),
            other => f.write_str(other.code()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkipRecord {
    pub sentence_id: String,
    pub reason: SkipReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConlluItem {
    Sentence(TreebankSentence),
    Skip(SkipRecord),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Drop tokens whose UPOS is `PUNCT` before building the tree.
    pub filter_punct: bool,
}

/// Streams sentences from CoNLL-U text.
pub fn parse_conllu<R: BufRead>(reader: R, options: ParseOptions) -> ConlluReader<R> {
    ConlluReader {
        lines: reader.lines(),
        line_no: 0,
        ordinal: 0,
        options,
    }
}

pub struct ConlluReader<R> {
    lines: io::Lines<R>,
    line_no: usize,
    ordinal: usize,
    options: ParseOptions,
}

struct RawWord {
    id: usize,
    form: String,
    upos: String,
    head: usize,
}

impl<R: BufRead> ConlluReader<R> {
    /// Reads up to the next blank line. `None` at end of input.
    fn next_block(&mut self) -> io::Result<Option<Vec<(usize, String)>>> {
        let mut block = Vec::new();
        for line in self.lines.by_ref() {
            let line = line?;
            self.line_no += 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                if block.is_empty() {
                    continue;
                }
                return Ok(Some(block));
            }
            block.push((self.line_no, line.to_string()));
        }
        Ok(if block.is_empty() { None } else { Some(block) })
    }

    fn read_sentence(&self, block: &[(usize, String)], sentence_id: &mut String) -> Result<TreebankSentence, SkipReason> {
        let mut words: Vec<RawWord> = Vec::new();
        let mut failure = None;
        for (line_no, line) in block {
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((key, value)) = comment.split_once('=') {
                    if key.trim() == "sent_id" {
                        *sentence_id = value.trim().to_string();
                    }
                }
                continue;
            }
            if failure.is_some() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 10 {
                failure = Some(SkipReason::MalformedLine {
                    line: *line_no,
                    columns: cols.len(),
                });
                continue;
            }
            if cols[0].contains('-') || cols[0].contains('.') {
                continue;
            }
            let Ok(id) = cols[0].parse::<usize>() else {
                failure = Some(SkipReason::BadField { line: *line_no, field: "ID" });
                continue;
            };
            let Ok(head) = cols[6].parse::<usize>() else {
                failure = Some(SkipReason::BadField { line: *line_no, field: "HEAD" });
                continue;
            };
            words.push(RawWord {
                id,
                form: cols[1].to_string(),
                upos: cols[3].to_string(),
                head,
            });
        }
        if let Some(reason) = failure {
            return Err(reason);
        }

        let mut dropped: Vec<usize> = Vec::new();
        if self.options.filter_punct {
            dropped = words.iter().filter(|w| w.upos == "PUNCT").map(|w| w.id).collect();
            words.retain(|w| w.upos != "PUNCT");
        }
        if words.is_empty() {
            return Err(SkipReason::NoWords);
        }
        let compact: HashMap<usize, usize> = words.iter().enumerate().map(|(i, w)| (w.id, i + 1)).collect();
        let mut tokens = Vec::with_capacity(words.len());
        for (i, w) in words.into_iter().enumerate() {
            let head = match w.head {
                0 => 0,
                h => match compact.get(&h) {
                    Some(&c) => c,
                    None if dropped.contains(&h) => return Err(SkipReason::FilteredHead),
                    None => return Err(SkipReason::HeadOutOfRange { head: h.to_string() }),
                },
            };
            tokens.push(Token {
                id: i + 1,
                form: w.form,
                upos: w.upos,
                head,
            });
        }
        match tokens.iter().filter(|t| t.head == 0).count() {
            0 => return Err(SkipReason::NoRoot),
            1 => {}
            _ => return Err(SkipReason::MultipleRoots),
        }
        let heads: Vec<usize> = tokens.iter().map(|t| t.head).collect();
        let tree = RootedTree::from_head_vector(&heads).map_err(|e| match e {
            TreeError::CycleDetected { .. } => SkipReason::Cycle,
            TreeError::Disconnected { .. } | TreeError::MultipleHeads { .. } => SkipReason::Cycle,
            _ => SkipReason::NoRoot,
        })?;
        let observed = LinearArrangement::identity(tree.n());
        Ok(TreebankSentence {
            sentence_id: sentence_id.clone(),
            tokens,
            tree,
            observed,
        })
    }
}

impl<R: BufRead> Iterator for ConlluReader<R> {
    type Item = io::Result<ConlluItem>;

    fn next(&mut self) -> Option<Self::Item> {
        let block = match self.next_block() {
            Ok(Some(block)) => block,
            Ok(None) => return None,
            Err(e) => return Some(Err(e)),
        };
        self.ordinal += 1;
        let mut sentence_id = format!("s{}", self.ordinal);
        let item = match self.read_sentence(&block, &mut sentence_id) {
            Ok(s) => ConlluItem::Sentence(s),
            Err(reason) => ConlluItem::Skip(SkipRecord { sentence_id, reason }),
        };
        Some(Ok(item))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("at least one sample count z is required")]
    NoSampleCounts,
    #[error("sample counts must be positive")]
    ZeroSampleCount,
}

impl AnalysisError {
    pub fn name(&self) -> &'static str {
        match self {
            AnalysisError::NoSampleCounts => "NoSampleCounts",
            AnalysisError::ZeroSampleCount => "ZeroSampleCount",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub z_values: Vec<u64>,
    pub seed: u64,
    pub bootstrap: BootstrapConfig,
    /// Worker threads; results do not depend on it.
    pub jobs: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            z_values: vec![10, 100, 1000, 10_000],
            seed: 0,
            bootstrap: BootstrapConfig::default(),
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledEstimate {
    pub estimate: McEstimate,
    /// `None` for single-vertex trees, whose exact value is zero.
    pub relative_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentenceAnalysis {
    pub sentence_id: String,
    pub n: usize,
    pub observed_d: u64,
    pub observed_d_minus_one: u64,
    pub observed_projective: bool,
    pub n_projective: BigCount,
    pub exact: ExactRational,
    pub exact_minus_one: ExactRational,
    /// One entry per requested `z`, in request order.
    pub estimates: Vec<SampledEstimate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreebankReport {
    pub sentences: Vec<SentenceAnalysis>,
    /// Error statistics by tree size, one list per requested `z`.
    pub summaries: Vec<(u64, Vec<ErrorStats>)>,
    /// Skipped sentence counts by reason code.
    pub skipped: BTreeMap<&'static str, usize>,
}

/// Seed of the `index`-th analyzed sentence.
pub fn sentence_seed(seed: u64, index: usize) -> u64 {
    seed ^ index as u64
}

pub fn analyze_sentence(sentence: &TreebankSentence, index: usize, config: &AnalysisConfig) -> SentenceAnalysis {
    let tree = &sentence.tree;
    let observed = &sentence.observed;
    let exact = expected_d_projective(tree, Method::ClosedForm);
    let seed = sentence_seed(config.seed, index);
    let estimates = config
        .z_values
        .iter()
        .map(|&z| {
            let estimate = estimate_expected_d(tree, z, seed).expect("sample counts are validated");
            let relative_error = relative_error(estimate.mean_d, &exact).ok();
            SampledEstimate { estimate, relative_error }
        })
        .collect();
    SentenceAnalysis {
        sentence_id: sentence.sentence_id.clone(),
        n: tree.n(),
        observed_d: sum_edge_lengths(tree, observed, LengthVariant::Standard).expect("observed order covers the tree"),
        observed_d_minus_one: sum_edge_lengths(tree, observed, LengthVariant::MinusOne)
            .expect("observed order covers the tree"),
        observed_projective: is_projective(tree, observed).expect("observed order covers the tree"),
        n_projective: count_projective(tree),
        exact,
        exact_minus_one: expected_dprime_projective(tree, Method::ClosedForm),
        estimates,
    }
}

/// Runs the exact and sampled estimates on every sentence and summarizes
/// relative errors by sentence length for each `z`.
pub fn analyze_treebank<I>(items: I, config: &AnalysisConfig) -> Result<TreebankReport, AnalysisError>
where
    I: IntoIterator<Item = ConlluItem>,
{
    if config.z_values.is_empty() {
        return Err(AnalysisError::NoSampleCounts);
    }
    if config.z_values.contains(&0) {
        return Err(AnalysisError::ZeroSampleCount);
    }
    let mut skipped: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut sentences = Vec::new();
    for item in items {
        match item {
            ConlluItem::Sentence(s) => sentences.push(s),
            ConlluItem::Skip(rec) => *skipped.entry(rec.reason.code()).or_default() += 1,
        }
    }

    let analyzed: Vec<SentenceAnalysis> = if config.jobs <= 1 {
        sentences.iter().enumerate().map(|(i, s)| analyze_sentence(s, i, config)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .expect("thread pool");
        pool.install(|| {
            sentences
                .par_iter()
                .enumerate()
                .map(|(i, s)| analyze_sentence(s, i, config))
                .collect()
        })
    };

    let summaries = config
        .z_values
        .iter()
        .enumerate()
        .map(|(zi, &z)| {
            let records: Vec<(usize, f64)> = analyzed
                .iter()
                .filter_map(|s| s.estimates[zi].relative_error.map(|e| (s.n, e)))
                .collect();
            let stats = if records.is_empty() {
                Vec::new()
            } else {
                aggregate_errors(&records, &config.bootstrap).expect("records are nonempty")
            };
            (z, stats)
        })
        .collect();

    Ok(TreebankReport {
        sentences: analyzed,
        summaries,
        skipped,
    })
}

pub const SENTENCE_CSV_HEADER: [&str; 11] = [
    "sentence_id",
    "n",
    "observed_d_standard",
    "observed_d_minus_one",
    "observed_projective",
    "n_projective",
    "exact_e_pr_d_standard",
    "exact_e_pr_d_minus_one",
    "z",
    "mc_e_pr_d_standard",
    "rel_error_standard",
];

pub const SUMMARY_CSV_HEADER: [&str; 8] = ["z", "n", "count", "mean_err", "ci_low", "ci_high", "min_err", "max_err"];

/// One row per (sentence, z).
pub fn write_sentence_csv<W: Write>(report: &TreebankReport, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(SENTENCE_CSV_HEADER)?;
    for s in &report.sentences {
        for est in &s.estimates {
            w.write_record([
                s.sentence_id.clone(),
                s.n.to_string(),
                s.observed_d.to_string(),
                s.observed_d_minus_one.to_string(),
                s.observed_projective.to_string(),
                s.n_projective.to_string(),
                s.exact.to_string(),
                s.exact_minus_one.to_string(),
                est.estimate.z.to_string(),
                est.estimate.mean_d.to_string(),
                est.relative_error.map(|e| e.to_string()).unwrap_or_default(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row per (z, tree size).
pub fn write_summary_csv<W: Write>(report: &TreebankReport, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(SUMMARY_CSV_HEADER)?;
    for (z, stats) in &report.summaries {
        for s in stats {
            w.write_record([
                z.to_string(),
                s.n.to_string(),
                s.count.to_string(),
                s.mean_err.to_string(),
                s.ci_low.to_string(),
                s.ci_high.to_string(),
                s.min_err.to_string(),
                s.max_err.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Renders a tree as a CoNLL-U sentence with placeholder fields.
pub fn to_conllu(sentence_id: &str, tree: &RootedTree) -> String {
    let mut out = format!("# sent_id = {sentence_id}\n");
    for v in tree.vertices() {
        let head = tree.parent(v).unwrap_or(0);
        let rel = if head == 0 { "root" } else { "dep" };
        out.push_str(&format!("{v}\tw{v}\tw{v}\tX\t_\t_\t{head}\t{rel}\t_\t_\n"));
    }
    out.push('\n');
    out
}
