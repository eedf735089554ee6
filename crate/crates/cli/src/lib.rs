//! File formats and report types behind the `linkage` binary, exposed so
//! integration suites can exercise them directly.

pub mod export;
pub mod instance_file;
pub mod report;
