//! Compare the deterministic clique template against the heuristic search on
//! the same fully connected problem.

use tailcover::embedding::{self, CouplingGraph, EmbedParams};
use tailcover::topology;

fn main() -> tailcover::Result<()> {
    let n = 16;
    let logical = CouplingGraph::complete(n);
    let hw = topology::chimera(8, 8, 4)?;

    let clique = embedding::clique_embedding_chimera(n, &hw)?;
    let cm = embedding::chain_metrics(&clique);
    println!(
        "clique template: {} qubits, every chain length {} (max {})",
        cm.physical_qubits,
        clique.chains()[0].len(),
        cm.max
    );
    assert!(embedding::embedding_violations(&clique, &logical, &hw).is_empty());

    let heuristic = embedding::find_embedding(
        &logical,
        &hw,
        &EmbedParams {
            tries: 16,
            seed: 8,
            ..Default::default()
        },
    )?;
    let hm = embedding::chain_metrics(&heuristic);
    println!(
        "heuristic search: {} qubits, chain lengths mean {:.2} max {}",
        hm.physical_qubits, hm.mean, hm.max
    );
    assert!(embedding::embedding_violations(&heuristic, &logical, &hw).is_empty());

    // the template trades qubit count for its guaranteed regular shape
    println!(
        "template/heuristic qubit ratio: {:.2}",
        cm.physical_qubits as f64 / hm.physical_qubits as f64
    );

    // capacity is sharp: one variable past t*min(m,n) and the template fails
    let cap = 4 * 8;
    assert!(embedding::clique_embedding_chimera(cap, &hw).is_ok());
    assert!(embedding::clique_embedding_chimera(cap + 1, &hw).is_err());
    println!("template capacity on chimera(8,8,4): {cap}");
    Ok(())
}
