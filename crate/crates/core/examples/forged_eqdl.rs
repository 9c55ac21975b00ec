//! Mallory's outcome shares are not the honest exponentiations, yet her
//! equality-of-logs proof is accepted because the other bidders answer
//! her relayed challenges.

use brandt_lab::adversary::{forge_outcome_eqdl, noise_removal_shares};
use brandt_lab::defenses::DefenseFlags;
use brandt_lab::group::GroupParams;
use brandt_lab::protocol::{AuctionConfig, AuctionRun};
use brandt_lab::sigma::{self, SigmaStatement};

fn attempt(ni_proofs: bool) -> brandt_lab::Result<()> {
    let config = AuctionConfig::new(GroupParams::small(), 3, 2)?
        .with_defenses(DefenseFlags { ni_proofs, ..DefenseFlags::none() });
    let mut run = AuctionRun::new(config, &[1, 2, 2], 4)?;
    for i in 1..=3 {
        run.post_keyshare(i)?;
    }
    for i in 1..=3 {
        run.post_bid(i)?;
    }
    for i in 1..=2 {
        run.post_outcome(i)?;
    }

    let t = run.params().one();
    let share = noise_removal_shares(&run.view(), 3, &t)?;
    let cell = (1, 1);
    let (a, b) = run.view().bases()?[0].clone();
    match forge_outcome_eqdl(&mut run, 3, cell, &share, &t) {
        Ok(transcript) => {
            let st = SigmaStatement::eqdl(a, b, share.gamma[0].clone(), share.delta[0].clone());
            println!("ni_proofs={ni_proofs}: forged proof verifies = {}", sigma::verify(run.params(), &st, &transcript));
        }
        Err(e) => println!("ni_proofs={ni_proofs}: {e}"),
    }
    Ok(())
}

fn main() -> brandt_lab::Result<()> {
    attempt(false)?;
    attempt(true)
}
