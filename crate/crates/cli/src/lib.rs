//! Library half of the experiment runner: sweep parsing, the CSV format and
//! the experiment implementations. The `nla` binary is a thin dispatcher
//! over these.

pub mod experiments;
pub mod sweep;

pub use experiments::CommonArgs;
