//! Library surface of the experiment driver, exposed so integration tests
//! can run subcommands in-process and compare their byte output.

pub mod args;
pub mod run;
