use ccf::algorithms::AlgorithmSpec;
use ccf::regions::{verify_geom_hurwitz, Region};
use ccf::util::rat;
use std::time::Instant;

#[test]
fn hurwitz_geometry_holds_for_q_h() {
    let t = Instant::now();
    let r = verify_geom_hurwitz(&AlgorithmSpec::hurwitz(), &Region::q_h(), 128).unwrap();
    for c in &r.conditions {
        println!("{}: {c}", c.name);
    }
    println!("{:?}", t.elapsed());
    assert!(r.passed());
}

#[test]
fn perturbed_geometry_holds_inside_range() {
    let t = Instant::now();
    let r = rat(3, 20);
    let rep = verify_geom_hurwitz(&AlgorithmSpec::perturbed(r.clone()).unwrap(), &Region::q_r(&r), 128).unwrap();
    for c in &rep.conditions {
        println!("{}: {c}", c.name);
    }
    println!("{:?}", t.elapsed());
    assert!(rep.passed());
}

#[test]
fn perturbed_geometry_fails_outside_range() {
    let r = rat(7, 20);
    let rep = verify_geom_hurwitz(&AlgorithmSpec::perturbed_unchecked(r.clone()), &Region::q_r(&r), 128).unwrap();
    for c in &rep.conditions {
        println!("{}: {c}", c.name);
    }
    let bad = rep.first_failure().expect("some condition fails");
    assert!(bad.witness.is_some());
}
