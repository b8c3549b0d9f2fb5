//! Output plumbing: every report is wrapped with the run configuration so a
//! file is self-describing and byte-reproducible given the same flags.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use molab_core::error::Error;

#[derive(Serialize)]
pub struct RunReport<'a, T: Serialize> {
    pub command: &'a str,
    pub function: Option<String>,
    pub threads: usize,
    pub seed: u64,
    pub report: T,
}

/// Write to the path, or stdout when none given.
pub fn write_text(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(text.as_bytes())?;
            Ok(())
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
