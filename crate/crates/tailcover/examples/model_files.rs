//! The plain-text model format and the exact binary/spin conversions.

use tailcover::model::{self, IsingModel, QuboModel};

fn main() -> tailcover::Result<()> {
    let q = QuboModel::new(
        3,
        [
            (0, 0, -2.0),
            (1, 1, -2.0),
            (2, 2, -3.0),
            (0, 1, 4.0),
            (1, 2, 1.5),
        ],
        0.25,
    )?;
    println!("{}", q.to_text());

    // conversion to spins and back is exact for dyadic coefficients
    let m = model::qubo_to_ising(&q);
    let back = model::ising_to_qubo(&m);
    assert_eq!(q, back);
    println!("qubo -> ising -> qubo is the identity here");

    // both views score every state identically
    for word in 0u8..8 {
        let bits: Vec<u8> = (0..3).map(|i| (word >> i) & 1).collect();
        let spins = model::bits_to_spins(&bits);
        assert_eq!(q.energy(&bits)?, m.energy(&spins)?);
    }

    q.save("three_site.qubo")?;
    let loaded = QuboModel::load("three_site.qubo")?;
    assert_eq!(loaded, q);
    println!("round-tripped through three_site.qubo");

    // files are self-describing; loading the wrong kind is a parse error
    let err = IsingModel::load("three_site.qubo").unwrap_err();
    println!("loading it as a spin model fails: {err}");
    Ok(())
}
