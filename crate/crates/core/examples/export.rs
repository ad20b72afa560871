//! Text export of graphs and couplings, read back byte for byte.

use sofic_me::coupling::CouplingMap;
use sofic_me::experiment::SolSetup;
use sofic_me::graph::FolnerGraph;
use sofic_me::quadratic::rational;

fn main() -> sofic_me::Result<()> {
    let setup = SolSetup::new(2, [[2, 1], [1, 1]], rational(1, 4))?;
    let domain = setup.domain(2)?;
    let map = setup.coupling(domain.clone())?;

    let mut g = Vec::new();
    domain.write(&mut g)?;
    let back = FolnerGraph::read(domain.group().clone(), g.as_slice())?;
    let mut g2 = Vec::new();
    back.write(&mut g2)?;
    println!("graph: {} bytes, identical after reading back: {}", g.len(), g == g2);

    let mut m = Vec::new();
    map.write(&mut m)?;
    let back = CouplingMap::read(domain.clone(), setup.lattice.clone(), m.as_slice())?;
    println!("coupling: {} bytes, same values: {}", m.len(), back.values() == map.values());
    print!("{}", String::from_utf8_lossy(&m).lines().take(8).collect::<Vec<_>>().join("\n"));
    println!();

    let broken = String::from_utf8_lossy(&m).replacen("x ", "x nonsense ", 1);
    match CouplingMap::read(domain, setup.lattice.clone(), broken.as_bytes()) {
        Err(e) => println!("corrupted copy: {e}"),
        Ok(_) => println!("corrupted copy parsed"),
    }
    Ok(())
}
