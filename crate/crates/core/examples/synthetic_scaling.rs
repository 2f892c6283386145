//! Compare vanilla, vector and graph retrieval on synthetic libraries of
//! growing size.
//!
//!     cargo run --release --example synthetic_scaling -- 50 200 1000

use gos_core::default_config;
use gos_core::eval::{run_eval, summary_table, Strategy, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sizes: Vec<usize> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let config = default_config();
    for (chain_length, noise) in [(2, 0.0), (3, 0.0), (4, 0.0), (3, 0.5), (3, 1.0)] {
        let spec = SyntheticSpec {
            library_sizes: if sizes.is_empty() { vec![50, 200, 1000] } else { sizes.clone() },
            chain_count: 10,
            chain_length,
            paraphrase_noise: noise,
            strategies: Strategy::ALL.to_vec(),
            k_vector: chain_length,
            ..Default::default()
        };
        println!("chain_length = {chain_length}, paraphrase_noise = {noise}");
        println!("{}", summary_table(&run_eval(&spec, &config)?));
    }
    Ok(())
}
