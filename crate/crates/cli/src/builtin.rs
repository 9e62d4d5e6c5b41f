//! Scenarios shipped with the binary.

/// `(name, TOML source)` for every built-in scenario.
pub const BUILTINS: &[(&str, &str)] = &[
    ("scalar-power-law", include_str!("../scenarios/scalar-power-law.toml")),
    ("unicycle-sinusoid", include_str!("../scenarios/unicycle-sinusoid.toml")),
    ("barrier-default", include_str!("../scenarios/barrier-default.toml")),
    ("lti-full-rank-2state", include_str!("../scenarios/lti-full-rank-2state.toml")),
    ("lti-canonical-4state", include_str!("../scenarios/lti-canonical-4state.toml")),
];

pub fn source(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}
