//! Property tests for the invariants of each module.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use antisort::chordal::{CliqueTree, SimplicialCds};
use antisort::dijkstra::{check_transcript_equivalence, dijkstra_order};
use antisort::element::elements;
use antisort::gen;
use antisort::instance::{Instance, InstanceFile};
use antisort::optimal::{compute_layers, exp_search, exp_search_budget, optimal_sort};
use antisort::oracle::ComparisonOracle;
use antisort::repr::{simplify_formula, ErcSet, FormulaSystem};
use antisort::sorter::{sample_order, topological_heapsort, SortOptions, TableCds};
use antisort::wsheap::WorkingSetHeap;
use antisort::{Alphabet, Elem, ElemSet};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// Any interleaving matches a sorted-list priority queue.
    #[test]
    fn heap_matches_sorted_list(ranks in (1usize..60).prop_flat_map(|n| Just((0..n).collect::<Vec<usize>>()).prop_shuffle()),
        ops in proptest::collection::vec(any::<bool>(), 0..160)) {
        let n = ranks.len();
        let order: Vec<Elem> = {
            let mut by_rank = vec![Elem(0); n];
            ranks.iter().enumerate().for_each(|(item, &r)| by_rank[r] = Elem::new(item));
            by_rank
        };
        let oracle = ComparisonOracle::new(order).unwrap();
        let mut heap = WorkingSetHeap::new();
        let mut reference: Vec<usize> = Vec::new();
        let mut next = 0;
        for insert in ops.into_iter().chain(std::iter::repeat_n(false, n)) {
            if insert && next < n {
                heap.insert(next, &oracle).unwrap();
                reference.push(next);
                next += 1;
            } else if let Some(pos) = (0..reference.len()).min_by_key(|&i| ranks[reference[i]]) {
                let want = reference.swap_remove(pos);
                prop_assert_eq!(heap.extract_min(&oracle).unwrap(), want);
            }
            prop_assert_eq!(heap.len(), reference.len());
        }
    }

    /// Heapsort returns the hidden order and its transcript satisfies the
    /// queue invariant, for every backend.
    #[test]
    fn heapsort_recovers_hidden_order(seed in any::<u64>(), n in 0usize..8) {
        let mut r = rng(seed);
        let mps = gen::random_mps(n, &mut r);
        let pi = sample_order(&mut TableCds::new(&mps), &mut r).unwrap();
        let formulas = FormulaSystem::from_mps(&mps);
        let ercs = ErcSet::from_mps(&mps).unwrap();
        let options = SortOptions { transcript: true, heap_log: false };
        for run in [
            topological_heapsort(&mut TableCds::new(&mps), &ComparisonOracle::new(pi.clone()).unwrap(), options).unwrap(),
            topological_heapsort(&mut formulas.cds(), &ComparisonOracle::new(pi.clone()).unwrap(), options).unwrap(),
            topological_heapsort(&mut ercs.cds(), &ComparisonOracle::new(pi.clone()).unwrap(), options).unwrap(),
        ] {
            prop_assert_eq!(&run.report.output, &pi);
            prop_assert!(run.transcript.unwrap().consistent_with(&pi));
        }
        let opt = optimal_sort(&mut formulas.cds(), &ComparisonOracle::new(pi.clone()).unwrap()).unwrap();
        prop_assert_eq!(&opt.report.output, &pi);
    }

    /// Layers give `|P| ≥ 2^(n-k)`.
    #[test]
    fn layers_lower_bound(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let mps = gen::random_mps(n, &mut r);
        let layers = compute_layers(&mut TableCds::new(&mps)).unwrap();
        prop_assert_eq!(layers.n(), n);
        let count = mps.permutations(8).unwrap().len() as f64;
        prop_assert!(count.log2() + 1e-9 >= layers.layer_bound_bits());
    }

    /// Simplification keeps the boolean function.
    #[test]
    fn simplify_preserves_meaning(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let sys = gen::random_formulas(n, &mut r);
        for f in sys.formulas() {
            let s = simplify_formula(f);
            for bits in 0u64..1 << n {
                prop_assert_eq!(s.evaluate(ElemSet(bits)), f.evaluate(ElemSet(bits)));
            }
        }
    }

    /// `exp_search` finds the insertion point within budget.
    #[test]
    fn exp_search_in_budget(len in 0usize..200, at in 0usize..200) {
        let at = at.min(len);
        // g holds ranks 0..len except that d sits between positions at-1 and at
        let d = Elem::new(len);
        let mut order: Vec<Elem> = elements(len).collect();
        order.insert(at, d);
        let oracle = ComparisonOracle::new(order).unwrap();
        let g: Vec<Elem> = elements(len).collect();
        prop_assert_eq!(exp_search(d, &g, &oracle), at);
        prop_assert!(oracle.count() <= exp_search_budget(at));
    }

    /// Clique trees of random chordal graphs list exactly the maximal
    /// cliques and satisfy running intersection.
    #[test]
    fn clique_tree_is_coherent(seed in any::<u64>(), n in 1usize..12, connected in any::<bool>()) {
        let g = gen::random_chordal(n, connected, &mut rng(seed));
        let t = CliqueTree::build(&g);
        prop_assert_eq!(t.clique_sets(), g.maximal_cliques_brute_force());
        prop_assert!(t.is_coherent(n));
        let mut cds = SimplicialCds::new(&g);
        let pi = sample_order(&mut cds, &mut rng(seed ^ 1)).unwrap();
        prop_assert!(g.is_peo(&pi));
    }

    /// Dijkstra settles in nondecreasing distance and matches heapsort's
    /// transcript.
    #[test]
    fn dijkstra_invariants(seed in any::<u64>(), n in 1usize..30) {
        let g = gen::random_weighted_digraph(n, 1.5, &mut rng(seed));
        let run = dijkstra_order(&g).unwrap();
        prop_assert!(run.order.windows(2).all(|p| run.dist[p[0].index()] <= run.dist[p[1].index()]));
        prop_assert!(run.decrease_keys <= g.m() as u64);
        prop_assert_eq!(check_transcript_equivalence(&g).unwrap(), Ok(()));
    }

    /// Printing then parsing gives the same instance.
    #[test]
    fn instance_round_trip(seed in any::<u64>(), n in 0usize..7, kind in 0u8..4) {
        let mut r = rng(seed);
        let alphabet = Alphabet::letters(n);
        let instance = match (kind, n) {
            (0, _) | (_, 0) => Instance::Formulas(gen::random_formulas(n, &mut r)),
            (1, _) => Instance::Ercs(ErcSet::from_mps(&gen::random_mps(n, &mut r)).unwrap()),
            (2, _) => Instance::Chordal(gen::random_chordal(n, false, &mut r)),
            _ => Instance::WeightedDigraph(gen::random_weighted_digraph(n, 1.0, &mut r)),
        };
        let file = InstanceFile { alphabet, instance, warnings: Vec::new() };
        let text = file.print();
        let again = InstanceFile::parse(&text).unwrap();
        prop_assert_eq!(again.print(), text);
        prop_assert_eq!(again.to_mps().unwrap(), file.to_mps().unwrap());
    }
}
