//! The digit map on `F_n`: Lipschitz certificate, preimage sizes and the decay
//! of large preimages.

use sofic_me::lemma::{expansivity_decay, fiber_bound, DigitBox};

fn main() -> sofic_me::Result<()> {
    let b = DigitBox::new(2, 6)?;
    let cert = b.lipschitz_certificate();
    println!("k=2 n=6: {} edges checked, violation {:?}", cert.edges, cert.violation);
    for q in [1, 2] {
        let stats = b.preimage_stats(q);
        let max = stats.iter().map(|s| s.0).max().unwrap();
        println!("q={q}: largest preimage {max}, bound {}", fiber_bound(2, q));
        for row in expansivity_decay(&stats, 2, q, &[1, 2, 3, 4]) {
            println!(
                "  m={} diameter >= {}: {}/{} = {:.4} against 4/{} ({})",
                row.m,
                row.threshold,
                row.count,
                row.total,
                row.fraction(),
                row.bound.1,
                if row.pass() { "ok" } else { "exceeded" }
            );
        }
    }
    Ok(())
}
