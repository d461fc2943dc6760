//! f must never exceed the best completion reachable below a state, in
//! either space. One exhaustive sweep per instance computes best
//! completions bottom-up and checks every state on the way.

use optisched::ao::AoSpace;
use optisched::bounds::BoundContext;
use optisched::els::ElsSpace;
use optisched::exhaustive::verify_lower_bounds;
use optisched::graph::{generate, GraphStructure, SystemSpec};

#[test]
fn bounds_are_admissible_everywhere() {
    for structure in GraphStructure::ALL {
        for n in structure.min_tasks().max(4)..=6 {
            let ccrs: &[f64] =
                if structure == GraphStructure::Independent { &[0.0] } else { &[0.1, 1.0, 10.0] };
            for &ccr in ccrs {
                let g = generate(structure, n, ccr, 31 + n as u64).unwrap();
                for procs in [2, 3] {
                    let sys = SystemSpec::new(procs);
                    let ctx = BoundContext::compute(&g, &sys);

                    let els = ElsSpace::new(&g, &sys, &ctx);
                    let visited = verify_lower_bounds(&els).unwrap_or_else(|v| {
                        panic!("els {structure}-n{n}-ccr{ccr} p{procs}: f={} > best={}",
                            v.f, v.best_completion)
                    });
                    assert!(visited > 0);

                    let ao = AoSpace::new(&g, &sys, &ctx);
                    let visited = verify_lower_bounds(&ao).unwrap_or_else(|v| {
                        panic!("ao {structure}-n{n}-ccr{ccr} p{procs}: f={} > best={}",
                            v.f, v.best_completion)
                    });
                    assert!(visited > 0);
                }
            }
        }
    }
}
