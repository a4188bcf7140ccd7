//! Exhaustively enumerate a model's ground states and check the planted
//! cover is the unique optimum.

use tailcover::instances::{self, GenerateParams};
use tailcover::model;
use tailcover::sampler::{self, Method};

fn main() -> tailcover::Result<()> {
    let inst = instances::generate(&GenerateParams {
        routes: 18,
        flights: 30,
        solution_size: 4,
        density: 0.7,
        seed: 11,
    })?;
    let m = model::ising_from_instance(&inst, 0.0)?;

    let gt = sampler::brute_force(&m, 8)?;
    println!(
        "minimum energy {} over 2^{} states, {} optimal state(s), truncated: {}",
        gt.minimum_energy,
        m.n(),
        gt.states.len(),
        gt.truncated
    );
    assert_eq!(gt.method, Method::Exhaustive);
    assert_eq!(gt.minimum_energy, 0.0);
    assert_eq!(gt.states.len(), 1, "generator certifies uniqueness");

    // the single ground state is the planted cover, bit for bit
    let planted = inst.planted().unwrap();
    let word = planted
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i));
    assert!(gt.contains(gt.states[0]));
    assert_eq!(gt.states[0], word);
    println!("unique ground state matches the planted cover");

    // the binary-model search agrees with the spin-model search
    let q = model::qubo_from_instance(&inst, 0.0)?;
    let gq = sampler::brute_force_qubo(&q, 8)?;
    assert_eq!(gq.minimum_energy, gt.minimum_energy);
    assert_eq!(gq.states, gt.states);
    println!("binary and spin enumerations agree");
    Ok(())
}
