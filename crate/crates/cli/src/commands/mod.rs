pub mod counterexample;
pub mod robustness;
pub mod simulate;
pub mod sweep;
