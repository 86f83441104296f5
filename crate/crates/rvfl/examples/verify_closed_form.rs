//! Check the closed-form trainer against the independent KKT saddle-point
//! oracle, then demonstrate why the check has teeth: flipping the sign of
//! the right-hand-side correction term makes the two routes disagree.
//!
//! ```bash
//! cargo run -p rvfl --example verify_closed_form
//! ```

use rvfl::cli::cmd_verify;

fn main() -> rvfl::Result<()> {
    println!("consistent right-hand side (Y plus the correction term):");
    let ok = cmd_verify(200, 1, false)?;
    println!("{}\n", ok.render());

    println!("flipped right-hand side (Y minus the correction term):");
    let flipped = cmd_verify(200, 1, true)?;
    println!("{}", flipped.render());

    assert!(ok.pass && !flipped.pass);
    println!("\nthe oracle solves the raw saddle-point system, so a sign error");
    println!("in the eliminated closed form cannot hide in both routes at once");
    Ok(())
}
