//! Følner graphs on both sides: the lamplighter box and the lattice target.

use sofic_me::experiment::SolSetup;
use sofic_me::metric::bfs_ball;
use sofic_me::quadratic::rational;

fn main() -> sofic_me::Result<()> {
    let setup = SolSetup::new(2, [[2, 1], [1, 1]], rational(1, 4))?;
    for n in 2..=4 {
        let f = setup.domain(n)?;
        let ball = bfs_ball(f.group().as_ref(), 2, 1 << 12)?;
        let comps = f.components().into_iter().max().map_or(0, |c| c + 1);
        let good: Vec<String> = (1..=2).map(|r| format!("r={r} {}/{}", f.good_set(&ball, r).count(), f.len())).collect();
        let target = setup.target(n, &setup.default_thickening(), 1)?;
        println!(
            "n={n}: domain {} vertices in {comps} components, good {}; target core {} enlarged {}",
            f.len(),
            good.join(", "),
            target.core_len,
            target.graph.len()
        );
    }
    Ok(())
}
