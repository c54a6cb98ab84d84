//! Oracles and fixtures shared by the test suites.

pub mod fixtures;
pub mod gen;
pub mod http;
pub mod oracle;
pub mod site;
