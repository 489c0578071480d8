//! Scenarios shipped with the binary.

const CATALOG: &[(&str, &str)] = &[
    ("dephasing_n10", include_str!("../scenarios/dephasing_n10.toml")),
    ("thermal_n10", include_str!("../scenarios/thermal_n10.toml")),
    ("toy_decay", include_str!("../scenarios/toy_decay.toml")),
    ("mr_closed_violation", include_str!("../scenarios/mr_closed_violation.toml")),
    ("mr_toy_satisfied", include_str!("../scenarios/mr_toy_satisfied.toml")),
    ("continuity_witness_demo", include_str!("../scenarios/continuity_witness_demo.toml")),
    ("qsd_dephasing", include_str!("../scenarios/qsd_dephasing.toml")),
];

pub fn names() -> Vec<&'static str> {
    CATALOG.iter().map(|(n, _)| *n).collect()
}

pub fn get(name: &str) -> Option<&'static str> {
    CATALOG.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// `(name, description)` for every bundled scenario.
pub fn list_scenarios() -> Vec<(String, String)> {
    CATALOG
        .iter()
        .map(|(n, text)| {
            let desc = crate::parse(text).map(|s| s.description).unwrap_or_default();
            (n.to_string(), desc)
        })
        .collect()
}
