//! Holds the acceptance test suite in `tests/acceptance.rs`. Run it with
//! `cargo test -p fdakit-acceptance -- --nocapture` to see one line per
//! criterion.
