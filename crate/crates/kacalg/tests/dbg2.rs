use kacalg::algebra::{multiply, TracedAlgebra};
use kacalg::crossed::CrossedContext;
use kacalg::linalg::Vect;
use kacalg::scalar::C64;
use kacalg::zoo::{group_algebra, GroupTable};
use rand::{Rng, SeedableRng};

#[test]
fn dbg_six_slot_associativity() {
    let base = group_algebra(&GroupTable::cyclic(2)).unwrap();
    let ctx = CrossedContext::new(&base).unwrap();
    let c = ctx.interval(0, 5);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let x = Vect::from_iterator(64, (0..64).map(|_| C64::new(rng.gen::<f64>()-0.5, rng.gen::<f64>()-0.5)));
        let y = Vect::from_iterator(64, (0..64).map(|_| C64::new(rng.gen::<f64>()-0.5, rng.gen::<f64>()-0.5)));
        let z = Vect::from_iterator(64, (0..64).map(|_| C64::new(rng.gen::<f64>()-0.5, rng.gen::<f64>()-0.5)));
        let xy = multiply(c.as_ref(), &x, &y);
        let yz = multiply(c.as_ref(), &y, &z);
        let l = multiply(c.as_ref(), &xy, &z);
        let r = multiply(c.as_ref(), &x, &yz);
        worst = worst.max((l - r).norm());
    }
    eprintln!("assoc residual 6 slots: {worst:.3e}");
    let a = ctx.interval(0, 1);
    let incl = ctx.natural_inclusion(&a, &c).unwrap();
    eprintln!("incl mult residual: {:.3e}", incl.multiplicativity_residual());
    eprintln!("incl unital: {:.3e}", incl.unitality_residual());
    // direct check: does ι(e3) commute with ι-image of ... itself? sanity:
    let g3 = incl.column(3);
    let g0 = incl.column(0);
    let c30 = multiply(c.as_ref(), &g3, &g0);
    let c03 = multiply(c.as_ref(), &g0, &g3);
    let a30 = {
        let p = a.mul_basis(3, 0);
        let mut v = Vect::zeros(4);
        for (k, cc) in p { v[k] += cc; }
        incl.apply(&v)
    };
    eprintln!("ι(e3)ι(e0) vs ι(e3 e0): {:.3e}", (c30.clone() - a30).norm());
    eprintln!("[ι(e3), ι(e0)] norm: {:.3e}", (c30 - c03).norm());
}
