//! Benchmark-only crate; see `benches/hot_paths.rs`. The paths measured
//! there are the ones that dominate Monte Carlo runs: the streaming
//! monitor, threshold inversion, fractional resampling, and OFDM synthesis.
