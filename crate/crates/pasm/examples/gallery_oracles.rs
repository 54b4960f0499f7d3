//! Runs each gallery machine against its brute-force oracle.
//!
//! `cargo run --example gallery_oracles [seed]`

use pasm::gallery::verify_gallery;

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let report = verify_gallery(seed, &mut |_, _, _| {});
    print!("{}", report.render());
    if !report.ok() {
        std::process::exit(2);
    }
}
