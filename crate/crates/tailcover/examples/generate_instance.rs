//! Generate a crew-pairing exact cover instance with a planted cover, attach
//! per-route costs, and save it as JSON.

use tailcover::instances::{self, GenerateParams, DEFAULT_COST_RANGE};

fn main() -> tailcover::Result<()> {
    let params = GenerateParams {
        routes: 30,
        flights: 120,
        solution_size: 6,
        density: 0.85,
        seed: 42,
    };
    let inst = instances::generate(&params)?;
    let costed = instances::attach_costs(&inst, params.seed, DEFAULT_COST_RANGE)?;

    let planted = costed.planted().expect("generator always plants a cover");
    let cover: Vec<usize> = planted
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == 1)
        .map(|(i, _)| i)
        .collect();
    println!(
        "{} routes over {} flights, planted cover {:?}",
        costed.routes(),
        costed.flights(),
        cover
    );
    println!("uniqueness: {:?}", costed.uniqueness());
    println!(
        "overlapping route pairs: {} of {}",
        costed.nonzero_couplers(),
        costed.routes() * (costed.routes() - 1) / 2
    );

    // the planted routes partition the flights: each column covered once
    for f in 0..costed.flights() {
        let covers: usize = cover.iter().map(|&r| costed.matrix()[r][f] as usize).sum();
        assert_eq!(covers, 1, "flight {f}");
    }
    println!("planted cover partitions all {} flights", costed.flights());

    costed.save("instance_30x120.json")?;
    println!("saved instance_30x120.json");
    Ok(())
}
