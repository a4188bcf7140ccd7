//! Minor-embed a dense problem into chimera with the heuristic search, check
//! the result, and save it for reuse.

use tailcover::embedding::{self, CouplingGraph, EmbedParams};
use tailcover::instances::{self, GenerateParams};
use tailcover::model;
use tailcover::topology;

fn main() -> tailcover::Result<()> {
    let inst = instances::generate(&GenerateParams {
        routes: 24,
        flights: 48,
        solution_size: 4,
        density: 0.8,
        seed: 21,
    })?;
    let m = model::ising_from_instance(&inst, 0.0)?;
    let logical = CouplingGraph::from_model(&m);
    println!(
        "logical problem: {} variables, {} couplers",
        logical.n(),
        logical.num_edges()
    );

    let hw = topology::chimera(8, 8, 4)?;
    let e = embedding::find_embedding(
        &logical,
        &hw,
        &EmbedParams {
            tries: 10,
            seed: 2024,
            ..Default::default()
        },
    )?;

    let metrics = embedding::chain_metrics(&e);
    println!(
        "embedded into {} physical qubits, chain lengths mean {:.2} max {}",
        metrics.physical_qubits, metrics.mean, metrics.max
    );
    for (len, count) in &metrics.histogram {
        println!("  {count:>3} chains of length {len}");
    }

    // validation covers connectivity, overlap, and coupler coverage
    let problems = embedding::embedding_violations(&e, &logical, &hw);
    assert!(problems.is_empty(), "{problems:?}");
    println!("embedding is valid");

    e.save("embedding_24.json")?;
    let back = embedding::Embedding::load("embedding_24.json")?;
    assert_eq!(back.chains(), e.chains());
    println!("saved and reloaded embedding_24.json");
    Ok(())
}
