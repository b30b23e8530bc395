//! Measured-constant suites. The asymptotic bounds are checked as
//! `comparisons ≤ C · bound` with a ceiling on the largest observed `C`.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chordal::SimplicialCds;
use crate::element::Word;
use crate::error::{Error, Result};
use crate::gen;
use crate::limits::DemoRow;
use crate::optimal::{compute_layers, optimal_sort};
use crate::oracle::ComparisonOracle;
use crate::par::{self, Exec};
use crate::repr::{ErcSet, FormulaSystem};
use crate::sorter::{sample_order, topological_heapsort, CandidateStructure, SortOptions, TableCds};
use crate::wsheap::WorkingSetHeap;

pub const C1_CEILING: f64 = 8.0;
pub const C2_CEILING: f64 = 12.0;
pub const HEAP_CEILING: f64 = 8.0;

fn seeded(seed: u64, i: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ i.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Largest ratios seen and any wrong outputs.
#[derive(Debug, Clone, Default)]
pub struct SuiteSummary {
    pub rows: Vec<DemoRow>,
    pub runs: u64,
    pub max_plain: f64,
    pub max_optimal: f64,
    pub failures: Vec<String>,
}

impl SuiteSummary {
    fn absorb(&mut self, other: SuiteSummary) {
        self.rows.extend(other.rows);
        self.runs += other.runs;
        self.max_plain = self.max_plain.max(other.max_plain);
        self.max_optimal = self.max_optimal.max(other.max_optimal);
        self.failures.extend(other.failures);
    }

    pub fn within(&self, c1: f64, c2: f64) -> bool {
        self.failures.is_empty() && self.max_plain <= c1 && self.max_optimal <= c2
    }
}

fn ratio_row(family: &'static str, n: usize, itb: f64, comparisons: u64, bound: f64) -> DemoRow {
    DemoRow { family, n, itb_bits: itb, comparisons: comparisons as f64, ratio: comparisons as f64 / bound }
}

/// Sorts every order in `orders` in plain and optimal mode, recording the
/// worst ratio per mode.
fn measure<C: CandidateStructure + ?Sized>(
    family: (&'static str, &'static str),
    cds: &mut C,
    orders: &[Word],
    itb: f64,
    optimal: bool,
) -> Result<SuiteSummary> {
    let n = cds.size();
    let mut s = SuiteSummary::default();
    let (mut worst_plain, mut worst_opt) = (0, 0);
    for pi in orders {
        let oracle = ComparisonOracle::new(pi.clone())?;
        let run = topological_heapsort(&mut *cds, &oracle, SortOptions::default())?;
        s.runs += 1;
        if &run.report.output != pi {
            s.failures.push(format!("{} plain n={n}: expected {pi:?}, got {:?}", family.0, run.report.output));
        }
        worst_plain = worst_plain.max(run.report.comparisons);
        if optimal {
            let oracle = ComparisonOracle::new(pi.clone())?;
            let run = optimal_sort(&mut *cds, &oracle)?;
            if &run.report.output != pi {
                s.failures.push(format!("{} optimal n={n}: expected {pi:?}, got {:?}", family.0, run.report.output));
            }
            worst_opt = worst_opt.max(run.report.comparisons);
        }
    }
    let plain = ratio_row(family.0, n, itb, worst_plain, n as f64 + itb);
    s.max_plain = plain.ratio;
    s.rows.push(plain);
    if optimal {
        let opt = ratio_row(family.1, n, itb, worst_opt, 1.0 + itb);
        s.max_optimal = opt.ratio;
        s.rows.push(opt);
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy)]
pub struct BruteForceConfig {
    pub instances: usize,
    pub max_n: usize,
    /// Orders tried per instance; `None` means all of `P`.
    pub orders: Option<usize>,
    pub seed: u64,
}

/// Random systems with `n ≤ max_n`, sorted through the table, formula and
/// ERC backends under every (or a sample of) hidden order in `P`.
pub fn brute_force_suite(config: BruteForceConfig, exec: Exec) -> Result<SuiteSummary> {
    if config.max_n > 10 {
        return Err(Error::SizeLimit { n: config.max_n, limit: 10 });
    }
    let parts = par::map_range(exec, config.instances, |i| -> Result<SuiteSummary> {
        let mut rng = seeded(config.seed, i as u64);
        let n = rng.random_range(1..=config.max_n);
        let mps = gen::random_mps(n, &mut rng);
        let all = mps.permutations(config.max_n)?;
        let itb = (all.len() as f64).log2();
        let orders: Vec<Word> = match config.orders {
            Some(k) if k < all.len() => (0..k).map(|_| gen::pick(&all, &mut rng).clone()).collect(),
            _ => all,
        };
        let mut s = measure(("bf-table-plain", "bf-table-optimal"), &mut TableCds::new(&mps), &orders, itb, true)?;
        let formulas = FormulaSystem::from_mps(&mps);
        s.absorb(measure(("bf-formula-plain", "bf-formula-optimal"), &mut formulas.cds(), &orders, itb, true)?);
        let ercs = ErcSet::from_mps(&mps)?;
        s.absorb(measure(("bf-erc-plain", "bf-erc-optimal"), &mut ercs.cds(), &orders, itb, true)?);
        Ok(s)
    });
    let mut total = SuiteSummary::default();
    for part in parts {
        total.absorb(part?);
    }
    Ok(total)
}

/// The bottleneck chain with `|P| = 6` at every size, under all six orders.
pub fn chain_suite(sizes: &[usize], exec: Exec) -> Result<SuiteSummary> {
    let parts = par::map(exec, sizes, |&n| -> Result<SuiteSummary> {
        let sys = gen::bottleneck_chain(n)?;
        let mut cds = sys.cds();
        // every member of P: the free prefix in any order, then the chain
        let orders: Vec<Word> = crate::language::all_permutations(n.min(3))
            .into_iter()
            .map(|head| head.into_iter().chain(crate::element::elements(n).skip(3)).collect())
            .collect();
        measure(("chain-plain", "chain-optimal"), &mut cds, &orders, (6f64).log2(), true)
    });
    let mut total = SuiteSummary::default();
    for part in parts {
        total.absorb(part?);
    }
    Ok(total)
}

/// Random connected chordal graphs sorted in plain mode. Up to 9 vertices
/// the exact PEO count gives the bound. Beyond, a lower bound stands in:
/// the larger of `n − 1` bits and `Σ log2 |L_i|!` over the layers, since
/// every layer-by-layer order is a perfect elimination order.
pub fn chordal_suite(sizes: &[usize], per_size: usize, seed: u64, exec: Exec) -> Result<SuiteSummary> {
    let jobs: Vec<(usize, usize)> = sizes.iter().flat_map(|&n| (0..per_size).map(move |j| (n, j))).collect();
    let parts = par::map(exec, &jobs, |&(n, j)| -> Result<SuiteSummary> {
        let mut rng = seeded(seed, (n * 1000 + j) as u64);
        let g = gen::random_chordal(n, true, &mut rng);
        let mut cds = SimplicialCds::new(&g);
        let itb = if n <= 9 { (g.count_peos()? as f64).log2() } else { peo_lower_bound_bits(&mut cds)? };
        let orders: Vec<Word> = (0..2).map(|_| sample_order(&mut cds, &mut rng)).collect::<Result<_>>()?;
        measure(("chordal-plain", ""), &mut cds, &orders, itb, false)
    });
    let mut total = SuiteSummary::default();
    for part in parts {
        total.absorb(part?);
    }
    Ok(total)
}

/// `log2` of a lower bound on `|P|`: `max(n − 1, Σ log2 |L_i|!)`.
pub fn peo_lower_bound_bits<C: CandidateStructure + ?Sized>(cds: &mut C) -> Result<f64> {
    let layers = compute_layers(cds)?;
    let factorials: f64 = layers.layers.iter().map(|l| (2..=l.len()).map(|k| (k as f64).log2()).sum::<f64>()).sum();
    Ok(factorials.max(cds.size().saturating_sub(1) as f64))
}

/// Random insert/extract interleavings; the ratio is comparisons over
/// `Σ (1 + log2 w'(x))`.
pub fn heap_suite(sizes: &[usize], seed: u64, exec: Exec) -> Result<SuiteSummary> {
    let parts = par::map(exec, sizes, |&n| -> Result<SuiteSummary> {
        let mut rng = seeded(seed, n as u64);
        let mut s = SuiteSummary::default();
        for pattern in 0..3 {
            let order: Word = match pattern {
                0 => gen::shuffled(&crate::element::elements(n).collect::<Vec<_>>(), &mut rng),
                1 => crate::element::elements(n).collect(),
                _ => crate::element::elements(n).rev().collect(),
            };
            let oracle = ComparisonOracle::new(order)?;
            let mut heap = WorkingSetHeap::with_capacity(n).with_log();
            let mut next = 0;
            while next < n || !heap.is_empty() {
                let insert = next < n && (heap.is_empty() || rng.random_bool(0.55));
                if insert {
                    heap.insert(next, &oracle)?;
                    next += 1;
                } else {
                    heap.extract_min(&oracle)?;
                }
            }
            let metrics = heap.metrics()?;
            let bound = metrics.working_set_bound().max(1.0);
            let row = DemoRow {
                family: "heap",
                n,
                itb_bits: bound,
                comparisons: metrics.comparisons as f64,
                ratio: metrics.comparisons as f64 / bound,
            };
            s.max_plain = s.max_plain.max(row.ratio);
            s.rows.push(row);
            s.runs += 1;
        }
        Ok(s)
    });
    let mut total = SuiteSummary::default();
    for part in parts {
        total.absorb(part?);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_brute_force_suite() {
        let config = BruteForceConfig { instances: 12, max_n: 6, orders: Some(20), seed: 1 };
        let s = brute_force_suite(config, Exec::Auto).unwrap();
        assert!(s.failures.is_empty(), "{:?}", s.failures);
        assert!(s.within(C1_CEILING, C2_CEILING), "{} {}", s.max_plain, s.max_optimal);
        let t = brute_force_suite(config, Exec::Sequential).unwrap();
        assert_eq!(s.rows, t.rows);
    }

    #[test]
    fn chain_optimal_is_flat() {
        let s = chain_suite(&[64, 256, 1024], Exec::Auto).unwrap();
        let opt: Vec<f64> = s.rows.iter().filter(|r| r.family == "chain-optimal").map(|r| r.comparisons).collect();
        assert_eq!(opt.len(), 3);
        assert!(opt.iter().all(|&c| c == opt[0]), "{opt:?}");
    }

    #[test]
    fn chordal_and_heap_within_ceiling() {
        let s = chordal_suite(&[5, 9, 200], 3, 3, Exec::Auto).unwrap();
        assert!(s.failures.is_empty() && s.max_plain <= C1_CEILING, "{}", s.max_plain);
        let h = heap_suite(&[10, 100, 1000], 4, Exec::Auto).unwrap();
        assert!(h.max_plain <= HEAP_CEILING, "{}", h.max_plain);
    }
}
