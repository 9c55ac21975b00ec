//! The linear map from bid vectors to winner-cell exponents, and its
//! inverse.

use brandt_lab::recovery::{apply_f, build_matrix, recover_bids_counted, RecoveredBids};

fn main() -> brandt_lab::Result<()> {
    let m = build_matrix(3, 3);
    for row in m.to_dense() {
        println!("{row:?}");
    }

    let b = RecoveredBids::from_prices(3, &[1, 2, 1])?;
    let l = apply_f(&m, &b.b)?;
    println!("b = {:?}", b.b);
    println!("l = {:?}", l.flat());

    let r = recover_bids_counted(&l)?;
    println!("recovered prices {:?} with {} additions", r.bids.prices(), r.additions);

    let (n, k) = (100, 1000);
    let prices: Vec<usize> = (0..n).map(|i| 1 + (i * 37) % k).collect();
    let l = apply_f(&build_matrix(n, k), &RecoveredBids::from_prices(k, &prices)?.b)?;
    let r = recover_bids_counted(&l)?;
    println!(
        "n={n} k={k}: {} additions, bound {}, correct {}",
        r.additions,
        n * n * k * k,
        r.bids.prices() == prices
    );
    Ok(())
}
