//! Two ways a dishonest bidder bends the result without breaking a proof:
//! zero noise in a losing cell, and decrypting with a shifted key.

use brandt_lab::adversary::{default_losing_cell, force_zero_noise, wrong_key_decrypt};
use brandt_lab::group::GroupParams;
use brandt_lab::protocol::{AuctionConfig, Outcome};

fn main() -> brandt_lab::Result<()> {
    let config = AuctionConfig::new(GroupParams::small(), 2, 2)?;
    let bids = [2, 1];
    let cell = default_losing_cell(&config, &bids)?;

    let r = force_zero_noise(&config, &bids, cell, 0)?;
    println!("zero noise at {cell:?}: outcome {:?}", r.outcome);

    let mut tally = [0usize; 3];
    for seed in 0..200 {
        let r = wrong_key_decrypt(&config, &bids, 1, seed)?;
        let slot = match r.outcome {
            Some(Outcome::Winner { .. }) => 0,
            Some(Outcome::NoWinner) => 1,
            _ => 2,
        };
        tally[slot] += 1;
    }
    println!("wrong key over 200 seeds: winner {}, no winner {}, several ones {}", tally[0], tally[1], tally[2]);
    Ok(())
}
