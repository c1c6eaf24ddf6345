//! Configurations shipped with the binary, runnable by name.

use crate::config::RunConfig;
use crate::CliError;

pub const BUNDLED: &[(&str, &str)] = &[
    ("ising_afm_chain4", include_str!("../configs/ising_afm_chain4.toml")),
    ("ising_fm_chain4", include_str!("../configs/ising_fm_chain4.toml")),
    ("heisenberg_afm_chain4", include_str!("../configs/heisenberg_afm_chain4.toml")),
    ("heisenberg_fm_chain4", include_str!("../configs/heisenberg_fm_chain4.toml")),
    ("rotator_ferro", include_str!("../configs/rotator_ferro.toml")),
    ("long_range_heisenberg", include_str!("../configs/long_range_heisenberg.toml")),
    ("long_range_heisenberg_fm", include_str!("../configs/long_range_heisenberg_fm.toml")),
    ("majorana_pair", include_str!("../configs/majorana_pair.toml")),
    ("majorana_pair_neg", include_str!("../configs/majorana_pair_neg.toml")),
    ("majorana_random", include_str!("../configs/majorana_random.toml")),
    ("majorana_random_neg", include_str!("../configs/majorana_random_neg.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

pub fn load(name: &str) -> Result<RunConfig, CliError> {
    let text = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            CliError::Config(format!(
                "no bundled config {name:?}; available: {}",
                names().collect::<Vec<_>>().join(", ")
            ))
        })?;
    let mut cfg = RunConfig::from_toml(text)?;
    cfg.name.get_or_insert_with(|| name.to_string());
    Ok(cfg)
}
