//! Library side of the `setout` command: the acceptance suite, run records
//! and the subcommand implementations.

pub mod accept;
pub mod cmd;
pub mod record;
