//! The coupling `u_n`: fibers, ranks and how well the image covers the target.

use sofic_me::cocycle::{rho_checks, DomainContext};
use sofic_me::experiment::SolSetup;
use sofic_me::quadratic::rational;
use sofic_me::stats::coboundedness_check;

fn main() -> sofic_me::Result<()> {
    let setup = SolSetup::new(2, [[2, 1], [1, 1]], rational(1, 4))?;
    let n = 4;
    let domain = setup.domain(n)?;
    let target = setup.target(n, &setup.default_thickening(), 1)?;
    let map = setup.coupling(domain.clone())?.with_codomain(target.graph.clone())?;
    let inj = map.injectivity();
    println!("n={n}: image {} of {} target points, {} fibers of size >= 2, largest {}", inj.image, target.graph.len(), inj.multi_fibers, inj.max_fiber);

    let ctx = DomainContext::new(&domain, 2)?;
    let rho = rho_checks(&map, &ctx, inj.max_fiber as u32, 2)?;
    println!("rho bounded {}, separated {}, reaches zero {}", rho.bounded, rho.separated, rho.reaches_zero);
    println!("cobounded on the good set: {}", coboundedness_check(&map, &ctx, 2)?);

    let dist = map.image_distances()?;
    let far = dist.iter().flatten().max().unwrap();
    println!("every target vertex within {far} of the image: {}", dist.iter().all(Option::is_some));
    Ok(())
}
