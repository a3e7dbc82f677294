//! Test support for the xml2jsp workspace. Nothing here depends on the
//! translator itself, so the checks it provides stay independent of the
//! code they check.

pub mod flat;
pub mod generator;
pub mod jsp;
pub mod loops;
pub mod mutants;
pub mod xsd;
