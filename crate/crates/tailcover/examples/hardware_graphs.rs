//! Build the two hardware graph families, inspect their shapes, and knock
//! out a few qubits.

use tailcover::topology::{self, TopologyKind};

fn main() -> tailcover::Result<()> {
    for spec in ["chimera:4,4,4", "chimera:16,16,4", "pegasus:6", "pegasus:16"] {
        let kind: TopologyKind = spec.parse()?;
        let hw = kind.build()?;
        let stats = hw.degree_stats();
        println!(
            "{kind}: {} nodes, {} edges, degree {}..{} (mean {:.2})",
            hw.num_nodes(),
            hw.num_edges(),
            stats.min,
            stats.max,
            stats.mean
        );
    }

    // defects keep ids stable: the graph gets holes, not renumbered qubits
    let full = topology::chimera(4, 4, 4)?;
    let dead = full.with_dead_nodes(&[0, 17, 63])?;
    println!(
        "chimera(4,4,4) with 3 dead qubits: {} live nodes, {} edges ({} removed)",
        dead.num_nodes(),
        dead.num_edges(),
        full.num_edges() - dead.num_edges()
    );
    assert!(!dead.is_live(17));
    assert!(dead.is_live(16));
    assert_eq!(dead.total_nodes(), full.total_nodes());

    let path = "chimera_4x4.edges";
    full.save_edge_list(path)?;
    println!("edge list written to {path}");
    Ok(())
}
