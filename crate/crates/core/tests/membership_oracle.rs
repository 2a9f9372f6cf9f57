mod common;

use qhv_core::{Ideal, Polynomial, VarContext};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn engine_agrees_with_linear_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let t = common::run_membership_oracle(&mut rng, 240);
    assert!(t.instances >= 200, "only {} instances", t.instances);
    assert!(t.members > 20 && t.members < t.instances, "degenerate sample: {}", t.members);
    assert!(t.disagreements.is_empty(), "{:#?}", t.disagreements);
}

#[test]
fn oracle_needs_enough_degree() {
    let ctx = VarContext::grevlex(&["x", "y"], &[]);
    let p = |s: &str| Polynomial::parse(&ctx, s).unwrap();
    // x^3 - 1 = x(x^2 - y) + (xy - 1), a degree-3 certificate
    let gens = vec![p("x^2 - y"), p("x*y - 1")];
    let target = p("x^3 - 1");
    assert!(!common::oracle_member(&gens, &target, 2));
    assert!(common::oracle_member(&gens, &target, 3));
    assert!(Ideal::new(gens).unwrap().contains(&target).unwrap());
}
