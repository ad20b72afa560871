//! Fundamental-domain masses and the covolume ratio `#ℋ'_n / #F_n`.

use sofic_me::experiment::SolSetup;
use sofic_me::metric::bfs_ball;
use sofic_me::quadratic::rational;
use sofic_me::stats::{covolume_ratio, fd_mass_components};

fn main() -> sofic_me::Result<()> {
    let setup = SolSetup::new(2, [[2, 1], [1, 1]], rational(1, 4))?;
    let vol = setup.eigen.fundamental_volume(&setup.t, 64).midpoint_f64();
    println!("fundamental domain volume {vol:.6}");
    for n in 2..=4 {
        let domain = setup.domain(n)?;
        let target = setup.target(n, &setup.default_thickening(), 1)?;
        let map = setup.coupling(domain.clone())?.with_codomain(target.graph.clone())?;
        let ball = bfs_ball(setup.lattice.as_ref(), 6, 1 << 20)?;
        let fd = fd_mass_components(&map, &ball, ball.len(), true)?;
        let sum = fd.total() as f64 / fd.denominator as f64;
        let cov = covolume_ratio(target.graph.len(), domain.len())?;
        println!("n={n}: mass sum {sum:.3}, covolume {cov} = {:.3}, first masses {} {} {}", target.graph.len() as f64 / domain.len() as f64, fd.mass(0), fd.mass(1), fd.mass(2));
    }
    Ok(())
}
