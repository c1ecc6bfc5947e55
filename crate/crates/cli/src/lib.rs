//! Model-file language and report rendering behind the `arrayprop` binary.

pub mod parser;
pub mod printer;
pub mod report;

pub use parser::{parse_model, parse_model_with, ParseError};
pub use printer::print_model;
pub use report::{json_report, render_domains, render_solution, render_stats};
