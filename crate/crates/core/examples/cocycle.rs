//! Transfers `T_n(g, x)`, the cocycle identity and cylinder sets.

use sofic_me::cocycle::{cocycle_defect, cylinder_measure, observed_patterns, transfer, DomainContext, TargetContext};
use sofic_me::experiment::SolSetup;
use sofic_me::group::MarkedGroup;
use sofic_me::quadratic::rational;

fn main() -> sofic_me::Result<()> {
    let setup = SolSetup::new(2, [[2, 1], [1, 1]], rational(1, 4))?;
    let n = 4;
    let domain = setup.domain(n)?;
    let target = setup.target(n, &setup.default_thickening(), 1)?;
    let map = setup.coupling(domain.clone())?.with_codomain(target.graph.clone())?;
    let ctx = DomainContext::new(&domain, 4)?;
    let tctx = TargetContext::new(&map, 8)?;
    let group = domain.group();

    let t = group.generators()[group.generator_index("t").unwrap()].element.clone();
    let a = group.generators()[group.generator_index("a1").unwrap()].element.clone();
    let x = (0..domain.len() as u32).find(|&x| ctx.is_good(x, 2)).unwrap();
    println!("x = {}: T(t, x) = {:?}", domain.vertex(x), transfer(&map, &ctx, Some(&tctx), &t, x)?);
    println!("x = {}: T(a1, x) = {:?}", domain.vertex(x), transfer(&map, &ctx, Some(&tctx), &a, x)?);
    println!("cocycle identity for (t, t): {}", cocycle_defect(&map, &ctx, Some(&tctx), &t, &t)?);
    println!("cocycle identity for (a1, t): {}", cocycle_defect(&map, &ctx, Some(&tctx), &a, &t)?);

    let plain = setup.coupling(domain.clone())?;
    let ctx1 = DomainContext::new(&domain, 1)?;
    let sigma = vec![group.identity(), t];
    let pats = observed_patterns(&plain, &ctx1, &sigma)?;
    let total: u64 = pats.keys().map(|p| cylinder_measure(&plain, &ctx1, p).map(|m| m.count)).sum::<sofic_me::Result<u64>>()?;
    println!("{} cylinders over {{e, t}} cover {total} of {} good vertices", pats.len(), ctx1.good[1].count());
    Ok(())
}
