//! Mallory submits copies of one bidder's encrypted bid under every other
//! name, so the revealed winning price is the target's.

use brandt_lab::adversary::impersonation_attack_on;
use brandt_lab::defenses::DefenseFlags;
use brandt_lab::group::GroupParams;
use brandt_lab::protocol::{AuctionConfig, AuctionRun};

fn main() -> brandt_lab::Result<()> {
    let bids = [2, 3, 1];
    for (label, defenses, rerandomize) in [
        ("exact copies", DefenseFlags::none(), false),
        ("re-randomized", DefenseFlags::none(), true),
        ("authenticated", DefenseFlags { authenticate: true, ..DefenseFlags::none() }, false),
    ] {
        let config = AuctionConfig::new(GroupParams::small(), 3, 3)?.with_defenses(defenses);
        let mut run = AuctionRun::new(config, &bids, 2)?;
        match impersonation_attack_on(&mut run, 1, rerandomize) {
            Ok(r) => println!("{label}: outcome {:?}, target learned = {}", r.outcome, r.success),
            Err(e) => println!("{label}: stopped, {e}"),
        }
    }
    Ok(())
}
