//! Relaying an interactive discrete-log proof so that Victor accepts a
//! claim about `w = g^(h - x)` while Mallory never learns `x`.

use brandt_lab::adversary::{mitm_affine_pdl, AffineClaim};
use brandt_lab::group::GroupParams;
use brandt_lab::sigma::{self, ProofMode, ProverSession, RandomVerifier};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> brandt_lab::Result<()> {
    let p = GroupParams::small();
    let g = p.generator();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let x = p.scalar(3u32);

    let claim = AffineClaim::new(p.one(), 1, -1);
    let mut peggy = ProverSession::pdl(&p, &g, x.clone(), ProofMode::InteractiveMalleable);
    let mut victor = RandomVerifier::new(&p, 9);
    let run = mitm_affine_pdl(&p, &claim, &mut peggy, &mut victor, &mut rng)?;

    println!("Peggy proves log_g {} = x", p.exp_g(&x));
    println!("Victor is shown    {:?}", run.statement);
    println!("Peggy's transcript {:?}", run.peggy);
    println!("Victor's transcript {:?}", run.victor);
    println!("Victor accepts: {}", sigma::verify(&p, &run.statement, &run.victor));

    let mut peggy = ProverSession::pdl(&p, &g, x, ProofMode::FiatShamir);
    match mitm_affine_pdl(&p, &claim, &mut peggy, &mut victor, &mut rng) {
        Ok(_) => println!("relay worked against Fiat-Shamir"),
        Err(e) => println!("against Fiat-Shamir: {e}"),
    }
    Ok(())
}
