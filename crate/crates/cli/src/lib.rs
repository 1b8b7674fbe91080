//! Library surface of the command line: specification parsing, the
//! simplicity analyzer, the ladderful census, property suites and exports.

pub mod analyze;
pub mod census;
pub mod export;
pub mod spec;
pub mod suites;

pub use analyze::{analyze, AnalysisReport, Collapse, Verdict, VerdictValue};
pub use census::census;
pub use export::{export, ExportFormat, ExportKind};
pub use spec::{parse_spec, BuildingSpec, CliError};
pub use suites::{run_suite, SuiteConfig, SuiteName, SuiteReport};
