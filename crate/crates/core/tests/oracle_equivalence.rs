//! Every solver, on both state spaces, must return exactly the optimum
//! found by brute-force enumeration of all assignments and orders.

use optisched::ao::AoSpace;
use optisched::bounds::BoundContext;
use optisched::els::ElsSpace;
use optisched::exhaustive;
use optisched::graph::{generate, GraphStructure, SystemSpec, TaskGraph};
use optisched::parallel::{pastar, pdfs, ParallelConfig};
use optisched::search::{astar, dfbnb, SearchLimits};

fn corpus(sizes: &[usize]) -> Vec<(String, TaskGraph)> {
    let mut out = Vec::new();
    for structure in GraphStructure::ALL {
        for &n in sizes {
            if n < structure.min_tasks() {
                continue;
            }
            let ccrs: &[f64] =
                if structure == GraphStructure::Independent { &[0.0] } else { &[0.1, 10.0] };
            for &ccr in ccrs {
                let g = generate(structure, n, ccr, 20_000 + n as u64).unwrap();
                out.push((format!("{structure}-n{n}-ccr{ccr}"), g));
            }
        }
    }
    out
}

fn desk_cfg(threads: usize) -> ParallelConfig {
    ParallelConfig {
        threads,
        sync_threshold: 100,
        steal_seed: 42,
        limits: SearchLimits::none(),
    }
}

#[test]
fn sequential_solvers_match_the_oracle() {
    for (name, g) in corpus(&[4, 5, 6]) {
        for procs in [2, 3] {
            let sys = SystemSpec::new(procs);
            let expected = exhaustive::optimal_makespan(&g, &sys);
            let ctx = BoundContext::compute(&g, &sys);
            let els = ElsSpace::new(&g, &sys, &ctx);
            let ao = AoSpace::new(&g, &sys, &ctx);
            let limits = SearchLimits::none();

            let runs = [
                ("astar-els", astar(&els, true, &limits).unwrap().makespan),
                ("dfbnb-els", dfbnb(&els, &limits).unwrap().makespan),
                ("astar-ao", astar(&ao, false, &limits).unwrap().makespan),
                ("dfbnb-ao", dfbnb(&ao, &limits).unwrap().makespan),
            ];
            for (solver, makespan) in runs {
                assert_eq!(makespan, expected, "{solver} on {name} with {procs} procs");
            }
        }
    }
}

#[test]
fn parallel_solvers_match_the_oracle() {
    for (name, g) in corpus(&[5, 6]) {
        for procs in [2, 3] {
            let sys = SystemSpec::new(procs);
            let expected = exhaustive::optimal_makespan(&g, &sys);
            let ctx = BoundContext::compute(&g, &sys);
            let els = ElsSpace::new(&g, &sys, &ctx);
            let ao = AoSpace::new(&g, &sys, &ctx);

            for threads in [1, 2, 4] {
                let cfg = desk_cfg(threads);
                let runs = [
                    ("pastar-ao", pastar(&ao, false, &cfg).unwrap().makespan),
                    ("pastar-dd-els", pastar(&els, true, &cfg).unwrap().makespan),
                    ("pdfs-ao", pdfs(&ao, &cfg).unwrap().makespan),
                    ("pdfs-els", pdfs(&els, &cfg).unwrap().makespan),
                ];
                for (solver, makespan) in runs {
                    assert_eq!(
                        makespan, expected,
                        "{solver} x{threads} on {name} with {procs} procs"
                    );
                }
            }
        }
    }
}

#[test]
fn solved_schedules_are_valid_and_consistent() {
    for (name, g) in corpus(&[5]) {
        let sys = SystemSpec::new(2);
        let ctx = BoundContext::compute(&g, &sys);
        let els = ElsSpace::new(&g, &sys, &ctx);
        let r = astar(&els, true, &SearchLimits::none()).unwrap();
        assert_eq!(r.schedule.is_valid(&g, &sys), Ok(true), "{name}");
        assert_eq!(r.schedule.makespan(&g).unwrap(), r.makespan, "{name}");
    }
}
