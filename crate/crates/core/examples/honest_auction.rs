//! Three bidders, three prices, every party honest.

use brandt_lab::group::GroupParams;
use brandt_lab::protocol::{expected_winner, AuctionConfig, AuctionRun, Honest};

fn main() -> brandt_lab::Result<()> {
    let config = AuctionConfig::new(GroupParams::large(), 3, 3)?;
    let bids = [2, 3, 1];
    let mut run = AuctionRun::new(config, &bids, 7)?;
    let result = run.execute(&mut Honest)?;

    println!("bids      {bids:?}");
    println!("outcome   {:?}", result.outcome);
    println!("expected  {:?}", expected_winner(&bids));
    println!("posts     {}", run.board().posts().len());
    println!("ones at   {:?}", result.ones());
    Ok(())
}
