//! Costed models have coefficients far outside what annealing hardware
//! accepts; autoscaling brings them into range without moving the argmin.

use tailcover::instances::{self, GenerateParams, DEFAULT_COST_RANGE};
use tailcover::model::{self, DEFAULT_H_RANGE, DEFAULT_J_RANGE};
use tailcover::sampler;

fn main() -> tailcover::Result<()> {
    let inst = instances::generate(&GenerateParams {
        routes: 14,
        flights: 26,
        solution_size: 3,
        density: 0.7,
        seed: 31,
    })?;
    let costed = instances::attach_costs(&inst, 31, DEFAULT_COST_RANGE)?;
    let m = model::ising_from_instance(&costed, 1e-4)?;
    println!("raw model max coefficient: {:.3}", model::max_strength(&m));

    let (scaled, rep) = model::autoscale(&m, DEFAULT_H_RANGE, DEFAULT_J_RANGE, false)?;
    println!(
        "scaled by {:.6} into h {:?}, J {:?}",
        rep.factor, rep.h_range, rep.j_range
    );
    assert!(model::max_strength(&scaled) <= 2.0 + 1e-12);

    // scaling is a positive multiple of the energy, so the optimum state is
    // untouched even though its energy changes
    let before = sampler::brute_force(&m, 4)?;
    let after = sampler::brute_force(&scaled, 4)?;
    assert_eq!(before.states, after.states);
    println!(
        "argmin preserved; energy {} -> {}",
        before.minimum_energy, after.minimum_energy
    );

    // already-small models are left alone unless upscaling is requested
    let small = model::IsingModel::new(vec![0.25, -0.5], [(0, 1, 0.125)], 0.0)?;
    let (_, rep) = model::autoscale(&small, DEFAULT_H_RANGE, DEFAULT_J_RANGE, false)?;
    assert_eq!(rep.factor, 1.0);
    let (_, rep) = model::autoscale(&small, DEFAULT_H_RANGE, DEFAULT_J_RANGE, true)?;
    println!("with upscaling allowed the factor becomes {}", rep.factor);
    Ok(())
}
