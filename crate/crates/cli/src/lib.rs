//! Plumbing behind the `naqkit` binary: corpora, pools, fixtures, reports
//! and the verify suites.

pub mod fixtures;
pub mod io;
pub mod report;
pub mod verify;

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const DATA: i32 = 3;
}
