//! Holds the workspace acceptance suite, `tests/acceptance.rs`.
//!
//! The package sorts after the library crates, so `cargo test --workspace`
//! runs their tests before the acceptance criteria.
