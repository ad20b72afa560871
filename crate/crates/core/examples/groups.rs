//! Words, normal forms and word lengths in the lamplighter and SOL lattice.

use sofic_me::group::{Lamplighter, MarkedGroup, SolLattice};
use sofic_me::metric::BallCache;

fn main() -> sofic_me::Result<()> {
    let l = Lamplighter::new(2);
    let g = l.eval_word(&l.parse_word("a1 t a1 t t a1 T")?);
    let closed = l.word_length_closed_form(&g).unwrap();
    let b = l.length_bounds(&g)?;
    println!("{}: {g}, |g| = {closed}, bounds [{:.2}, {:.2}]", l.descriptor(), b.lower.to_f64(), b.upper.to_f64());
    assert_eq!(l.parse_elem(&g.to_string())?, g);

    let sol = SolLattice::new([[2, 1], [1, 1]])?;
    let cache = BallCache::new(std::sync::Arc::new(sol.clone()));
    for word in ["x", "t x T", "t t x T T", "x y X Y"] {
        let h = sol.eval_word(&sol.parse_word(word)?);
        let len = cache.word_length_growing(&h, 12)?;
        let b = sol.length_bounds(&h)?;
        println!("{word:>10} = {h}: |h| {len:?}, bounds [{:.2}, {:.2}]", b.lower.to_f64(), b.upper.to_f64());
    }
    let ball = cache.ball(6)?;
    let sizes: Vec<usize> = (0..=6).map(|r| ball.count_within(r)).collect();
    println!("SOL ball sizes r = 0..6: {sizes:?}");
    Ok(())
}
