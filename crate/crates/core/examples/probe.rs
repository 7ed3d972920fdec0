use std::time::Instant;
use xordual_core::duality::{dualize, SectorSpec};
use xordual_core::model::generate_tree;
use xordual_core::pauli::TermSum;
use xordual_core::spectrum::{lanczos_lowest, SolverOptions};

fn main() {
    let opts = SolverOptions::default();

    // Raw matvec timing at 2^22
    let t4 = generate_tree(4).unwrap();
    let dm4 = dualize(&t4, None).unwrap();
    println!("tree g=4: r={}", dm4.dual_sites());
    let ts: TermSum = dm4.restrict(&SectorSpec::all_plus(dm4.charge_count()), 0.7).unwrap();
    println!("terms: {}", ts.len());

    let t = Instant::now();
    let x = vec![1.0f64; 1 << 22];
    let y = ts.apply(&x).unwrap();
    println!("apply at 2^22: {:?} (y0={})", t.elapsed(), y[0]);

    let t = Instant::now();
    let vals = lanczos_lowest(&ts, None, 2, &opts).unwrap();
    println!("lanczos k=2 at 2^22 (cold): {:?} -> {:?}", t.elapsed(), vals);

    let t = Instant::now();
    let vals = lanczos_lowest(&ts, None, 4, &opts).unwrap();
    println!("lanczos k=4 at 2^22 (cold): {:?} -> {:?}", t.elapsed(), vals);
}
