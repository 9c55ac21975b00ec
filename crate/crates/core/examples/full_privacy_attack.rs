//! Mallory joins as the last bidder, rewrites her outcome shares so the
//! noise cancels, and reads every bid off the decrypted vector.

use brandt_lab::adversary::{full_privacy_attack_on, AttackerExponent};
use brandt_lab::group::GroupParams;
use brandt_lab::protocol::{AuctionConfig, AuctionRun};

fn main() -> brandt_lab::Result<()> {
    let config = AuctionConfig::new(GroupParams::small(), 4, 3)?;
    let bids = [3, 1, 2, 2];
    for (seed, exponent) in [(0, AttackerExponent::One), (1, AttackerExponent::Random)] {
        let mut run = AuctionRun::new(config.clone(), &bids, seed)?;
        let report = full_privacy_attack_on(&mut run, 4, exponent)?;
        println!("{exponent:?}");
        println!("  true      {:?}", report.true_bids);
        println!("  recovered {:?}", report.recovered_bids);
        println!("  declared  {:?}", report.outcome);
    }
    Ok(())
}
