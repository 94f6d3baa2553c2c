//! Holds the `acceptance` test target, which runs every acceptance criterion and
//! prints one pass/fail line per criterion:
//!
//! ```text
//! cargo test -p fogfed-validation --test acceptance
//! ```
