//! Exhaustive check of the word-length upper bound on pairs with nearby
//! images, with a displaced digit map as the negative control.

use sofic_me::geometry::DigitMap;
use sofic_me::lemma::DigitBox;

fn main() -> sofic_me::Result<()> {
    for map in [DigitMap::Standard, DigitMap::Displaced(4)] {
        let r = DigitBox::with_map(2, 5, map)?.claim_j_oracle(1);
        println!("{map:?}: {} pairs, {} violations, first {:?}", r.pairs, r.violations, r.example);
    }
    Ok(())
}
