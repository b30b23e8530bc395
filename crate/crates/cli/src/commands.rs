use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use antisort::dijkstra::{
    check_distance_ordering_equivalence, check_transcript_equivalence, dijkstra_order, has_unique_ordering,
    DistanceMismatch,
};
use antisort::element::is_permutation;
use antisort::gen;
use antisort::instance::{Instance, InstanceFile};
use antisort::limits::{demonstrate_suboptimality, DemoRow};
use antisort::optimal::{compute_layers, optimal_sort};
use antisort::oracle::ComparisonOracle;
use antisort::par::Exec;
use antisort::sorter::{
    cds_permutations, sample_order, topological_heapsort, validate_cds, validate_cds_sampled, CandidateStructure,
    CdsMismatch, SortOptions, Validated,
};
use antisort::suite::{self, BruteForceConfig, SuiteSummary, C1_CEILING, C2_CEILING, HEAP_CEILING};
use antisort::{Alphabet, Error, Word};

use crate::{BenchArgs, Common, DijkstraArgs, InstanceArgs, Mode, SortArgs, SuiteName, Validate};

/// A failed command and the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn verdict(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    pub fn code(&self) -> u8 {
        self.code
    }

    pub fn message(&self) -> &str {
        &self.message
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::Input(_) | Error::NotChordal(_) | Error::SizeLimit { .. } => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<(), Failure>;

fn load(path: &Path) -> Result<InstanceFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    InstanceFile::parse(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Writes `text` to `--out` or stdout, then turns a pending verdict into
/// the exit status.
fn emit(common: &Common, text: &str, verdict: Outcome) -> Outcome {
    match &common.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    verdict
}

fn word(alphabet: &Alphabet, w: &[antisort::Elem]) -> String {
    alphabet.format_word(w)
}

fn itb_bits(file: &InstanceFile, limit: usize) -> Option<f64> {
    if file.n() > limit {
        return None;
    }
    let count = file.to_mps().ok()?.count_permutations();
    Some((count as f64).log2())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| format!("{v:.4}"))
}

/// Names the prefix in a stall so the user can see where the order broke.
fn run_error(alphabet: &Alphabet, e: Error) -> Failure {
    match e {
        Error::Stall { prefix, output, n } => Failure::verdict(format!(
            "stalled after prefix [{}] ({output} of {n} elements output); the order is not in P",
            word(alphabet, &prefix)
        )),
        e => e.into(),
    }
}

fn describe_mismatch(alphabet: &Alphabet, m: &CdsMismatch) -> String {
    let mut s = format!(
        "prefix [{}] expected {{{}}} got {{{}}}",
        word(alphabet, &m.prefix),
        word(alphabet, &m.expected),
        word(alphabet, &m.actual)
    );
    if let Some(err) = &m.error {
        let _ = write!(s, " ({err})");
    }
    s
}

fn hidden_order(args: &SortArgs, file: &InstanceFile) -> Result<Word, Failure> {
    let text = match (&args.order, &args.order_file) {
        (Some(inline), _) => inline.clone(),
        (None, Some(path)) => {
            fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
        }
        (None, None) => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.common.seed);
            return sample_order(&mut file.cds(), &mut rng).map_err(Failure::from);
        }
    };
    let w = file.alphabet.parse_word(text.trim()).map_err(|e| Failure::usage(format!("order: {e}")))?;
    if !is_permutation(&w, file.n()) {
        return Err(Failure::usage("order: not a permutation of the alphabet"));
    }
    Ok(w)
}

pub fn sort(args: &SortArgs) -> Outcome {
    if args.transcript && args.mode == Mode::Optimal {
        return Err(Failure::usage("--transcript needs --mode plain"));
    }
    let file = load(&args.file)?;
    let alphabet = &file.alphabet;
    let pi = hidden_order(args, &file)?;
    let n = file.n();

    if args.validate == Validate::Full {
        let mps = file.to_mps()?;
        let check = if n <= args.common.bf_limit {
            validate_cds(&mut file.cds(), &mps, args.common.bf_limit)?
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(args.common.seed);
            validate_cds_sampled(&mut file.cds(), &mps, 64, &mut rng)
        };
        if let Err(m) = check {
            return Err(Failure::verdict(format!("backend disagrees with the system: {}", describe_mismatch(alphabet, &m))));
        }
    }

    let mut cds: Box<dyn CandidateStructure + '_> = match args.validate {
        Validate::Off => file.cds(),
        _ => Box::new(Validated::new(file.cds())),
    };
    let oracle = ComparisonOracle::new(pi.clone())?;
    let itb = itb_bits(&file, args.common.bf_limit);

    let mut out = String::new();
    let _ = writeln!(out, "kind={}", file.kind().name());
    let _ = writeln!(out, "n={n}");
    let _ = writeln!(out, "mode={}", if args.mode == Mode::Plain { "plain" } else { "optimal" });
    let _ = writeln!(out, "order={}", word(alphabet, &pi));
    let (report, extra) = match args.mode {
        Mode::Plain => {
            let options = SortOptions { transcript: args.transcript, heap_log: false };
            let run = topological_heapsort(&mut cds, &oracle, options).map_err(|e| run_error(alphabet, e))?;
            let lines = run
                .transcript
                .map(|t| t.render(alphabet).into_iter().enumerate().map(|(i, q)| format!("Q{i}={q}")).collect())
                .unwrap_or_default();
            (run.report, lines)
        }
        Mode::Optimal => {
            let run = optimal_sort(&mut cds, &oracle).map_err(|e| run_error(alphabet, e))?;
            let lines: Vec<String> = vec![
                format!("layers={}", run.layers.k()),
                format!("bottlenecks={}", word(alphabet, &run.bottlenecks.elements)),
                format!("sort_comparisons={}", run.sort_comparisons),
                format!("merge_comparisons={}", run.merge.comparisons),
            ];
            (run.report, lines)
        }
    };
    if args.validate == Validate::Full && !is_permutation(&report.output, n) {
        return Err(Failure::verdict(format!("output [{}] is not a permutation", word(alphabet, &report.output))));
    }
    let _ = writeln!(out, "output={}", word(alphabet, &report.output));
    let _ = writeln!(out, "comparisons={}", report.comparisons);
    let _ = writeln!(out, "cds_steps={}", report.cds_steps);
    let _ = writeln!(out, "queue_events={}", report.queue_events);
    let _ = writeln!(out, "cds_work={}", report.cds_work);
    let _ = writeln!(out, "itb_bits={}", fmt_opt(itb));
    let _ = writeln!(out, "ratio={}", fmt_opt(itb.map(|b| report.comparisons as f64 / (1.0 + b))));
    for line in extra {
        let _ = writeln!(out, "{line}");
    }
    if args.timing {
        let _ = writeln!(out, "elapsed_us={}", report.elapsed.as_micros());
        let _ = writeln!(out, "cds_us={}", report.cds_time.as_micros());
    }
    // An order outside P still yields some member of P; say so.
    let verdict = if report.output == pi {
        Ok(())
    } else {
        Err(Failure::verdict(format!("order [{}] is not in P", word(alphabet, &pi))))
    };
    emit(&args.common, &out, verdict)
}

pub fn enumerate(args: &InstanceArgs) -> Outcome {
    let file = load(&args.file)?;
    let mut words = cds_permutations(&mut file.cds(), args.common.bf_limit)?;
    words.sort();
    let mut out = String::new();
    for w in &words {
        let _ = writeln!(out, "{}", word(&file.alphabet, w));
    }
    emit(&args.common, &out, Ok(()))
}

pub fn check(args: &InstanceArgs) -> Outcome {
    let file = load(&args.file)?;
    let alphabet = &file.alphabet;
    let limit = args.common.bf_limit;
    let mps = file.to_mps()?;
    let language = mps.enumerate_language(limit)?;
    let mut out = String::new();
    let mut failed = Vec::new();

    let show = |w: &Word| word(alphabet, w);
    for (name, verdict) in
        [("antimatroid", language.check_antimatroid_axioms()), ("greedoid", language.check_greedoid_axioms())]
    {
        match verdict {
            Ok(()) => {
                let _ = writeln!(out, "{name}=yes");
            }
            Err(v) => {
                let witness = match v {
                    antisort::language::Violation::NotPrefixClosed { word } => {
                        format!("prefix of [{}] missing", show(&word))
                    }
                    antisort::language::Violation::Exchange { alpha, beta } => {
                        format!("no letter of [{}] extends [{}]", show(&alpha), show(&beta))
                    }
                };
                let _ = writeln!(out, "{name}=no witness={witness}");
                failed.push(name);
            }
        }
    }
    match validate_cds(&mut file.cds(), &mps, limit)? {
        Ok(()) => {
            let _ = writeln!(out, "cds=ok");
        }
        Err(m) => {
            let _ = writeln!(out, "cds=mismatch {}", describe_mismatch(alphabet, &m));
            failed.push("cds");
        }
    }
    let _ = writeln!(out, "words={}", language.len());
    let _ = writeln!(out, "permutations={}", mps.count_permutations());
    for w in &file.warnings {
        let _ = writeln!(out, "warning={w}");
    }
    let verdict = if failed.is_empty() { Ok(()) } else { Err(Failure::verdict(format!("failed: {}", failed.join(", ")))) };
    emit(&args.common, &out, verdict)
}

pub fn layers(args: &InstanceArgs) -> Outcome {
    let file = load(&args.file)?;
    let layers = compute_layers(&mut file.cds())?;
    let beta = layers.bottlenecks();
    let mut out = String::new();
    for (i, layer) in layers.layers.iter().enumerate() {
        let _ = writeln!(out, "L{}={}", i + 1, word(&file.alphabet, layer));
    }
    let _ = writeln!(out, "k={}", layers.k());
    let _ = writeln!(out, "beta={}", word(&file.alphabet, &beta.elements));
    let _ = writeln!(out, "layer_bound_bits={:.4}", layers.layer_bound_bits());
    let _ = writeln!(out, "bottleneck_bound_bits={:.4}", beta.bound_bits());
    emit(&args.common, &out, Ok(()))
}

pub fn bench(args: &BenchArgs) -> Outcome {
    let exec = if args.sequential { Exec::Sequential } else { Exec::Auto };
    let seed = args.common.seed;
    let wants = |s: SuiteName| args.suite == SuiteName::All || args.suite == s;
    let mut rows: Vec<DemoRow> = Vec::new();
    let mut problems = Vec::new();

    let mut judge = |name: &str, s: SuiteSummary, c1: f64, c2: f64, rows: &mut Vec<DemoRow>| {
        if !s.within(c1, c2) {
            problems.push(format!(
                "{name}: plain {:.3} (ceiling {c1}), optimal {:.3} (ceiling {c2}), {} wrong outputs",
                s.max_plain,
                s.max_optimal,
                s.failures.len()
            ));
        }
        eprintln!("{name}: runs={} max_plain={:.3} max_optimal={:.3}", s.runs, s.max_plain, s.max_optimal);
        rows.extend(s.rows);
    };

    if wants(SuiteName::BruteForce) {
        let config = BruteForceConfig { instances: args.instances, max_n: 7, orders: Some(24), seed };
        judge("brute-force", suite::brute_force_suite(config, exec)?, C1_CEILING, C2_CEILING, &mut rows);
    }
    if wants(SuiteName::Chain) {
        let sizes: Vec<usize> = (6..=14).map(|e| 1usize << e).collect();
        judge("chain", suite::chain_suite(&sizes, exec)?, f64::INFINITY, C2_CEILING, &mut rows);
    }
    if wants(SuiteName::Chordal) {
        judge("chordal", suite::chordal_suite(&[8, 100, 1000, 10_000], 2, seed, exec)?, C1_CEILING, C2_CEILING, &mut rows);
    }
    if wants(SuiteName::Heap) {
        let sizes = [100, 1000, 10_000, 100_000];
        judge("heap", suite::heap_suite(&sizes, seed, exec)?, HEAP_CEILING, f64::INFINITY, &mut rows);
    }
    if wants(SuiteName::Limits) {
        // These families are expected to exceed any constant; no ceiling.
        rows.extend(demonstrate_suboptimality(seed)?);
    }

    let mut out = String::new();
    let _ = writeln!(out, "{}", DemoRow::CSV_HEADER);
    for row in &rows {
        let _ = writeln!(out, "{}", row.csv());
    }
    let verdict = if problems.is_empty() { Ok(()) } else { Err(Failure::verdict(problems.join("; "))) };
    emit(&args.common, &out, verdict)
}

fn distance_verdict(alphabet: &Alphabet, r: Result<(), DistanceMismatch>) -> Result<(), String> {
    r.map_err(|m| match m {
        DistanceMismatch::NotRealised { order, got } => format!(
            "search order [{}] not realised (got [{}])",
            word(alphabet, &order),
            word(alphabet, &got)
        ),
        DistanceMismatch::NotSearch { order } => format!("dijkstra order [{}] is not a search order", word(alphabet, &order)),
    })
}

fn dijkstra_file(args: &DijkstraArgs, path: &Path) -> Outcome {
    let file = load(path)?;
    let Instance::WeightedDigraph(g) = &file.instance else {
        return Err(Failure::usage(format!("expected a weighted-digraph instance, got {}", file.kind().name())));
    };
    let alphabet = &file.alphabet;
    let run = dijkstra_order(g)?;
    let mut out = String::new();
    let mut problems = Vec::new();
    let _ = writeln!(out, "order={}", word(alphabet, &run.order));
    let dist: Vec<String> = run.order.iter().map(|&v| format!("{}:{}", alphabet.name(v), run.dist[v.index()])).collect();
    let _ = writeln!(out, "dist={}", dist.join(" "));
    let _ = writeln!(out, "comparisons={}", run.comparisons);
    let _ = writeln!(out, "decrease_keys={}", run.decrease_keys);
    let _ = writeln!(out, "unique={}", if has_unique_ordering(&run) { "yes" } else { "no" });
    if args.transcript {
        for (i, q) in run.transcript.render(alphabet).into_iter().enumerate() {
            let _ = writeln!(out, "Q{i}={q}");
        }
    }
    match check_transcript_equivalence(g)? {
        Ok(()) => {
            let _ = writeln!(out, "transcript_check=pass");
        }
        Err(_) => {
            let _ = writeln!(out, "transcript_check=fail");
            problems.push("heapsort transcript differs".to_string());
        }
    }
    if g.n() <= 7 {
        let mut rng = ChaCha8Rng::seed_from_u64(args.common.seed);
        match distance_verdict(alphabet, check_distance_ordering_equivalence(g.graph(), args.trials, &mut rng)?) {
            Ok(()) => {
                let _ = writeln!(out, "distance_check=pass");
            }
            Err(m) => {
                let _ = writeln!(out, "distance_check=fail {m}");
                problems.push(m);
            }
        }
    } else {
        let _ = writeln!(out, "distance_check=NA");
    }
    let verdict = if problems.is_empty() { Ok(()) } else { Err(Failure::verdict(problems.join("; "))) };
    emit(&args.common, &out, verdict)
}

fn dijkstra_random(args: &DijkstraArgs) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(args.common.seed);
    let (mut distance, mut transcript) = (Vec::new(), Vec::new());
    for t in 0..args.trials {
        let n = 2 + t % 5;
        let g = gen::random_weighted_digraph(n, 1.5, &mut rng);
        if let Err(m) = distance_verdict(&Alphabet::letters(n), check_distance_ordering_equivalence(g.graph(), 4, &mut rng)?) {
            distance.push(m);
        }
        let big = gen::random_weighted_digraph(10 + t % 40, 2.0, &mut rng);
        if check_transcript_equivalence(&big)?.is_err() {
            transcript.push(format!("transcript mismatch on graph {t}"));
        }
    }
    let status = |v: &Vec<String>| if v.is_empty() { "pass" } else { "fail" };
    let mut out = String::new();
    let _ = writeln!(out, "distance_check={} graphs={}", status(&distance), args.trials);
    let _ = writeln!(out, "transcript_check={} graphs={}", status(&transcript), args.trials);
    let problems: Vec<String> = distance.into_iter().chain(transcript).collect();
    let verdict = if problems.is_empty() { Ok(()) } else { Err(Failure::verdict(problems.join("; "))) };
    emit(&args.common, &out, verdict)
}

pub fn dijkstra(args: &DijkstraArgs) -> Outcome {
    match &args.file {
        Some(path) => dijkstra_file(args, path),
        None => dijkstra_random(args),
    }
}
