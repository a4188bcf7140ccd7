//! Compile an exact cover instance to binary and spin models and check the
//! two agree state for state, with the planted cover at energy zero.

use tailcover::instances::{self, GenerateParams};
use tailcover::model::{self, bits_to_spins};

fn main() -> tailcover::Result<()> {
    let inst = instances::generate(&GenerateParams {
        routes: 10,
        flights: 18,
        solution_size: 3,
        density: 0.6,
        seed: 7,
    })?;

    let q = model::qubo_from_instance(&inst, 0.0)?;
    let m = model::ising_from_instance(&inst, 0.0)?;
    println!(
        "n={} entries={} couplers={} offset={}",
        q.n(),
        q.entries().count(),
        m.num_couplers(),
        q.offset()
    );

    // both formulations assign every assignment the same penalty
    let n = q.n();
    let mut worst = 0.0f64;
    for word in 0u64..(1 << n) {
        let bits: Vec<u8> = (0..n).map(|i| ((word >> i) & 1) as u8).collect();
        let eq = q.energy(&bits)?;
        let em = m.energy(&bits_to_spins(&bits))?;
        worst = worst.max((eq - em).abs());
    }
    println!("max |qubo - ising| over all {} states: {worst:e}", 1u64 << n);

    let planted: Vec<u8> = inst.planted().unwrap().to_vec();
    let planted_energy = q.energy(&planted)?;
    println!("planted cover energy: {planted_energy}");
    assert_eq!(planted_energy, 0.0);

    // a near miss pays for both the uncovered flight and the double cover
    let mut off_by_one = planted.clone();
    off_by_one[planted.iter().position(|&b| b == 1).unwrap()] = 0;
    println!("drop one planted route: {}", q.energy(&off_by_one)?);

    // with costs attached the optimum keeps its structure but pays its price
    let costed = instances::attach_costs(&inst, 7, (10.0, 100.0))?;
    let lambda = 1e-6;
    let qc = model::qubo_from_instance(&costed, lambda)?;
    let cost_term: f64 = costed
        .costs()
        .unwrap()
        .iter()
        .zip(&planted)
        .map(|(c, &b)| c * b as f64)
        .sum();
    let e = qc.energy(&planted)?;
    println!("costed planted energy {e} = lambda * plant cost {}", lambda * cost_term);
    assert!((e - lambda * cost_term).abs() < 1e-9);
    Ok(())
}
