//! Writes a synthetic water network as INP text to stdout.
//!
//!     cargo run --example generate_network -- '{"seed": 7, "town_nodes": 300}'

use wdn_lora::synthetic::{generate_inp, SyntheticSpec};

fn main() {
    let spec: SyntheticSpec = match std::env::args().nth(1) {
        Some(json) => serde_json::from_str(&json).unwrap_or_else(|e| {
            eprintln!("bad spec: {e}");
            std::process::exit(2);
        }),
        None => SyntheticSpec::default(),
    };
    print!("{}", generate_inp(&spec));
}
