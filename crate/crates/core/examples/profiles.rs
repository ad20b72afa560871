//! Lipschitz and expansivity profiles, weighted sums and the strong
//! exponential fit. Writes the profiles as CSV to stdout.

use sofic_me::cocycle::DomainContext;
use sofic_me::experiment::SolSetup;
use sofic_me::graph::DomainMetric;
use sofic_me::group::MarkedGroup;
use sofic_me::metric::{bfs_ball, BallCache};
use sofic_me::quadratic::rational;
use sofic_me::stats::{
    default_delta_grid, expansivity_profile, integrability_sum, lipschitz_profile, strong_exp_fit, write_csv, Profile,
    WeightFn,
};

fn main() -> sofic_me::Result<()> {
    let setup = SolSetup::new(2, [[2, 1], [1, 1]], rational(1, 4))?;
    let n = 4;
    let domain = setup.domain(n)?;
    let map = setup.coupling(domain.clone())?;
    let ctx = DomainContext::new(&domain, 1)?;
    let mut out = Vec::new();
    for (s, g) in domain.group().generators().iter().enumerate() {
        let t = Profile::new("example", n, &map.id, format!("lipschitz:{}", g.label));
        out.push(lipschitz_profile(&map, &ctx, s, 10, t)?);
    }

    let cache = BallCache::new(domain.group().clone());
    let probes = bfs_ball(setup.lattice.as_ref(), 2, 1 << 16)?;
    let mut fit_input = Vec::new();
    for (h, l) in probes.iter() {
        let t = Profile::new("example", n, &map.id, format!("expansivity:{h}"));
        fit_input.push((l, expansivity_profile(&map, h, DomainMetric::Ambient { cap: 256 }, &cache, t)?));
    }
    let w = WeightFn::parse("exp", rational(1, 8))?;
    for (l, p) in fit_input.iter().take(4) {
        println!("# |h|={l} {}: mean {:.3}, {} = {:.3}", p.probe, p.mean(), w.label(), integrability_sum(p, &w));
    }
    let fit = strong_exp_fit(&fit_input, 1.0, &default_delta_grid())?;
    println!("# largest passing delta {:?}", fit.delta);
    out.extend(fit_input.into_iter().map(|(_, p)| p));
    write_csv(&out, std::io::stdout())
}
