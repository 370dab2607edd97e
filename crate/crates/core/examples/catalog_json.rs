//! Dumps the equation and inequality registry as JSON.
//!
//! `cargo run --example catalog_json`

fn main() {
    let json = factorial_powers::get_catalog().to_json();
    println!("{}", serde_json::to_string_pretty(&json).unwrap());
}
