//! Structures bundled with the crate.

use crate::format::parse_structure;
use crate::rewriting::TwoStructure;

pub const ENTRIES: &[(&str, &str)] = &[
    ("monoidal", include_str!("../corpus/monoidal.struct")),
    ("ex-nested", include_str!("../corpus/ex-nested.struct")),
    ("ex-disjoint", include_str!("../corpus/ex-disjoint.struct")),
    ("prop-nfca", include_str!("../corpus/prop-nfca.struct")),
    ("undecidable-loop", include_str!("../corpus/undecidable-loop.struct")),
    ("imc1", include_str!("../corpus/imc1.struct")),
    ("imc2", include_str!("../corpus/imc2.struct")),
    ("imc3", include_str!("../corpus/imc3.struct")),
];

pub fn source(name: &str) -> Option<&'static str> {
    ENTRIES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Parses a bundled structure by name.
pub fn load(name: &str) -> Option<TwoStructure> {
    source(name).map(|t| parse_structure(t).expect("bundled structures are valid"))
}
