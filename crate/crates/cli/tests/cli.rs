use std::path::PathBuf;
use std::process::{Command, Output};

const EXAMPLE: &str = "# c needs a or b\nformulas\nalphabet a b c\na: 1\nb: 1\nc: (a | b)\n";

fn write(name: &str, text: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_antisort")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines().find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('='))).unwrap_or_else(|| {
        panic!("no {key} in\n{text}")
    })
}

#[test]
fn enumerate_lists_the_four_orders() {
    let file = write("ex-enum.txt", EXAMPLE);
    let o = run(&["enumerate", file.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "abc\nacb\nbac\nbca\n");
}

#[test]
fn sort_reports_and_recovers_the_order() {
    let file = write("ex-sort.txt", EXAMPLE);
    let o = run(&["sort", file.to_str().unwrap(), "--order", "b a c", "--transcript", "--validate", "full"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(field(&text, "output"), "bac");
    assert_eq!(field(&text, "itb_bits"), "2.0000");
    assert_eq!(field(&text, "Q0"), "{a,b}");
    assert_eq!(field(&text, "Q3"), "{}");
}

#[test]
fn sort_is_deterministic_for_a_seed() {
    let file = write("ex-seed.txt", EXAMPLE);
    let a = run(&["sort", file.to_str().unwrap(), "--seed", "9", "--mode", "optimal"]);
    let b = run(&["sort", file.to_str().unwrap(), "--seed", "9", "--mode", "optimal"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn order_outside_p_is_a_verdict_failure() {
    let file = write("ex-bad-order.txt", EXAMPLE);
    let o = run(&["sort", file.to_str().unwrap(), "--order", "c a b"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn order_file_and_out_flag() {
    let file = write("ex-of.txt", EXAMPLE);
    let order = write("ex-of-order.txt", "b c a\n");
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("ex-of-out.txt");
    let o = run(&[
        "sort",
        file.to_str().unwrap(),
        "--order-file",
        order.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(field(&std::fs::read_to_string(out).unwrap(), "output"), "bca");
}

#[test]
fn chain_needs_few_comparisons_in_optimal_mode() {
    // a single chain leaves nothing to compare
    let file = write("chain.txt", "formulas\nalphabet a b c d\na: 1\nb: a\nc: b\nd: c\n");
    let o = run(&["sort", file.to_str().unwrap(), "--mode", "optimal"]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "comparisons"), "0");
}

#[test]
fn non_chordal_graph_is_a_parse_error() {
    let file = write("c4.txt", "chordal\nalphabet a b c d\na b\nb c\nc d\nd a\n");
    let o = run(&["sort", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["sort", "/nonexistent/file"]).status.code(), Some(2));
    let file = write("ex-usage.txt", EXAMPLE);
    assert_eq!(run(&["sort", file.to_str().unwrap(), "--order", "a b"]).status.code(), Some(2));
}

#[test]
fn check_and_layers() {
    let file = write("ex-check.txt", EXAMPLE);
    let o = run(&["check", file.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(field(&text, "antimatroid"), "yes");
    assert_eq!(field(&text, "cds"), "ok");
    assert_eq!(field(&text, "permutations"), "4");

    let o = run(&["layers", file.to_str().unwrap()]);
    let text = stdout(&o);
    assert_eq!(field(&text, "L1"), "ab");
    assert_eq!(field(&text, "beta"), "c");
}

#[test]
fn bench_rotation_ratios_grow() {
    let o = run(&["bench", "--suite", "limits"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("family,n,itb_bits,comparisons,ratio"));
    let ratios: Vec<f64> = text
        .lines()
        .filter(|l| l.starts_with("rotation,"))
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(ratios.len() >= 4);
    assert!(ratios.windows(2).all(|p| p[0] < p[1]), "{ratios:?}");
}

#[test]
fn bench_sequential_matches_parallel() {
    let a = run(&["bench", "--suite", "brute-force", "--instances", "20"]);
    let b = run(&["bench", "--suite", "brute-force", "--instances", "20", "--sequential"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn dijkstra_file_and_random() {
    let file = write("w.txt", "weighted-digraph\nalphabet r a b c\nroot r\nr a 1\nr b 2\na c 2\nb c 0.5\n");
    let o = run(&["dijkstra", file.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(field(&text, "order"), "rabc");
    assert_eq!(field(&text, "transcript_check"), "pass");
    assert_eq!(field(&text, "distance_check"), "pass");

    let o = run(&["dijkstra", "--trials", "20"]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "distance_check"), "pass graphs=20");

    let wrong = write("not-weighted.txt", EXAMPLE);
    assert_eq!(run(&["dijkstra", wrong.to_str().unwrap()]).status.code(), Some(2));
}
