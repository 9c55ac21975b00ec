//! Every scenario with and without its countermeasure, via the same path
//! the CLI uses.

use brandt_lab::scenario::{parse_args, run_scenario};

fn main() -> brandt_lab::Result<()> {
    let cases = [
        ("full-privacy-attack", "--ni-proofs"),
        ("mitm-demo", "--ni-proofs"),
        ("forged-eqdl", "--ni-proofs"),
        ("impersonation", "--authenticate"),
        ("exceptional-values", "--noise-product-check"),
        ("wrong-key", "--key-consistency"),
    ];
    for (scenario, flag) in cases {
        for defended in [false, true] {
            let mut argv = vec!["brandt-lab", "run", "--scenario", scenario, "--seed", "3"];
            if defended {
                argv.push(flag);
            }
            let report = run_scenario(&parse_args(argv)?)?.report;
            println!(
                "{scenario:<20} {:<24} success={:<5} blocked_by={}",
                if defended { flag } else { "(none)" },
                report.success.map_or("-".into(), |s| s.to_string()),
                report.blocked_by.as_deref().unwrap_or("-"),
            );
        }
    }
    Ok(())
}
