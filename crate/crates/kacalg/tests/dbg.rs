use kacalg::algebra::AlgRef;
use kacalg::crossed::CrossedContext;
use kacalg::jones::{solve_jones_element, verify_jones_element, JonesSolveOptions};
use kacalg::tower::{interval_expectation_to, triple_interval_extension};
use kacalg::zoo::{group_algebra, GroupTable};
use std::sync::Arc;

#[test]
fn dbg_left_expectation_matches_oracle() {
    let base = group_algebra(&GroupTable::cyclic(2)).unwrap();
    let ctx = CrossedContext::new(&base).unwrap();
    let big = ctx.interval(-2, 1);
    let sub = ctx.interval(0, 1);
    let formula = interval_expectation_to(&ctx, &big, &sub).unwrap();
    let incl = ctx.natural_inclusion(&sub, &big).unwrap();
    let bigref: AlgRef = Arc::clone(&big) as AlgRef;
    let oracle = kacalg::gns::expectation_onto_image(&bigref, &incl).unwrap();
    let composed = &incl.mat * &formula.mat;
    eprintln!("left-trace-out vs oracle residual: {:.3e}", (&composed - &oracle).norm());
    assert!((composed - oracle).norm() < 1e-9);
}

#[test]
fn dbg_right_extension_with_nontrivial_a() {
    let base = group_algebra(&GroupTable::cyclic(2)).unwrap();
    let ctx = CrossedContext::new(&base).unwrap();
    // A = H_{[0,1]}, B = H_{[0,3]}, C = H_{[0,5]}
    let t = triple_interval_extension(&ctx, 0, 0, 1, 3).unwrap();
    eprintln!("modulus {}", t.modulus);
    match solve_jones_element(&t, &JonesSolveOptions::default()) {
        Ok(e) => {
            let rep = verify_jones_element(&t, &e);
            eprintln!("right triple pass={} maxres {:.2e}", rep.pass(1e-8), rep.max_residual());
        }
        Err(e) => eprintln!("right triple FAILED: {e}"),
    }
}
