//! Structural checks on the two state spaces: what each can reach,
//! what each generates twice, and how many allocation leaves exist.

use std::collections::HashSet;

use optisched::ao::{AoSpace, AoState};
use optisched::bounds::BoundContext;
use optisched::els::ElsSpace;
use optisched::exhaustive::{self, walk_tree};
use optisched::graph::{generate, GraphStructure, SystemSpec, TaskGraph};
use optisched::search::StateSpace;

fn small_corpus(max_n: usize, ccrs: &[f64]) -> Vec<(String, TaskGraph)> {
    let mut out = Vec::new();
    for structure in GraphStructure::ALL {
        for n in structure.min_tasks().max(3)..=max_n {
            let ccrs: &[f64] =
                if structure == GraphStructure::Independent { &[0.0] } else { ccrs };
            for &ccr in ccrs {
                let g = generate(structure, n, ccr, 7 + n as u64).unwrap();
                out.push((format!("{structure}-n{n}-ccr{ccr}"), g));
            }
        }
    }
    out
}

/// Unpruned ELS expansion reaches exactly the complete schedules the
/// brute-force enumerator counts (distinct up to processor
/// relabeling).
#[test]
fn els_reaches_every_enumerated_schedule() {
    for (name, g) in small_corpus(5, &[1.0]) {
        for procs in [1, 2] {
            let sys = SystemSpec::new(procs);
            let expected = exhaustive::enumerate(&g, &sys).schedule_count;
            let ctx = BoundContext::compute(&g, &sys);
            let space = ElsSpace::new(&g, &sys, &ctx);

            let mut complete_keys = HashSet::new();
            walk_tree(&space, |state, _| {
                if space.is_complete(state) {
                    complete_keys.insert(space.dup_key(state));
                }
            });
            assert_eq!(
                complete_keys.len() as u64, expected,
                "{name} on {procs} procs"
            );
        }
    }
}

/// Independent decisions reach the same partial schedule along
/// different paths, so ELS must produce repeated keys.
#[test]
fn els_generates_duplicate_states() {
    let g = TaskGraph::new(vec![2, 3], vec![]).unwrap();
    let sys = SystemSpec::new(2);
    let ctx = BoundContext::compute(&g, &sys);
    let space = ElsSpace::new(&g, &sys, &ctx);

    let mut seen = HashSet::new();
    let mut repeats = 0;
    walk_tree(&space, |state, _| {
        if !seen.insert(space.dup_key(state)) {
            repeats += 1;
        }
    });
    assert!(repeats >= 1, "expected at least one duplicate key, got none");
}

/// The AO space never builds the same state twice: allocation states
/// extend a unique prefix partition, ordering states extend unique
/// sequence prefixes on a forced processor.
#[test]
fn ao_expansion_is_duplicate_free() {
    for (name, g) in small_corpus(6, &[1.0]) {
        for procs in [2, 3] {
            let sys = SystemSpec::new(procs);
            let ctx = BoundContext::compute(&g, &sys);
            let space = AoSpace::new(&g, &sys, &ctx);

            let mut seen = HashSet::new();
            let mut states = 0u64;
            walk_tree(&space, |state, _| {
                states += 1;
                assert!(
                    seen.insert(space.dup_key(state)),
                    "repeated signature in {name} on {procs} procs"
                );
            });
            assert_eq!(seen.len() as u64, states);
        }
    }
}

fn stirling_partition_count(n: usize, max_blocks: usize) -> u64 {
    // s[k] = ways to partition the prefix into exactly k blocks.
    let mut s = vec![0u64; max_blocks + 1];
    s[0] = 1;
    for _ in 0..n {
        for k in (1..=max_blocks).rev() {
            s[k] = s[k] * k as u64 + s[k - 1];
        }
        s[0] = 0;
    }
    s[1..].iter().sum()
}

#[test]
fn allocation_leaf_count_is_the_partition_count() {
    for n in 4..=8 {
        for procs in [2, 3] {
            let g = TaskGraph::new(vec![1; n], vec![]).unwrap();
            let sys = SystemSpec::new(procs);
            let ctx = BoundContext::compute(&g, &sys);
            let space = AoSpace::new(&g, &sys, &ctx);

            // Walk the allocation phase only; ordering roots are the leaves.
            let mut leaves = 0u64;
            let mut stack = vec![space.initial().0];
            while let Some(s) = stack.pop() {
                match &s {
                    AoState::Ordering(_) => leaves += 1,
                    AoState::Allocation(_) => {
                        stack.extend(space.expand(&s).into_iter().map(|(c, _)| c))
                    }
                }
            }
            assert_eq!(
                leaves,
                stirling_partition_count(n, procs),
                "n={n} procs={procs}"
            );
        }
    }
}

/// Precedence does not change the allocation phase: leaf counts depend
/// only on n and |P|.
#[test]
fn allocation_leaf_count_ignores_edges() {
    let g = generate(GraphStructure::OutTree, 6, 1.0, 3).unwrap();
    let sys = SystemSpec::new(2);
    let ctx = BoundContext::compute(&g, &sys);
    let space = AoSpace::new(&g, &sys, &ctx);

    let mut leaves = 0u64;
    let mut stack = vec![space.initial().0];
    while let Some(s) = stack.pop() {
        match &s {
            AoState::Ordering(_) => leaves += 1,
            AoState::Allocation(_) => {
                stack.extend(space.expand(&s).into_iter().map(|(c, _)| c))
            }
        }
    }
    assert_eq!(leaves, stirling_partition_count(6, 2));
}

/// The minimum over all derived AO schedules is the true optimum, and
/// every derived schedule is well-formed.
#[test]
fn ao_derivations_cover_the_optimum_and_stay_valid() {
    for (name, g) in small_corpus(6, &[0.1, 10.0]) {
        for procs in [2, 3] {
            let sys = SystemSpec::new(procs);
            let expected = exhaustive::optimal_makespan(&g, &sys);
            let ctx = BoundContext::compute(&g, &sys);
            let space = AoSpace::new(&g, &sys, &ctx);

            let mut best = None;
            walk_tree(&space, |state, _| {
                if space.is_complete(state) {
                    let s = space.extract_schedule(state);
                    assert_eq!(s.is_valid(&g, &sys), Ok(true), "{name}");
                    let m = s.makespan(&g).unwrap();
                    best = Some(best.map_or(m, |b: u64| b.min(m)));
                }
            });
            assert_eq!(best, Some(expected), "{name} on {procs} procs");
        }
    }
}
