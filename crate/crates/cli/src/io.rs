use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use multisis_core::format::{parse_instance, parse_solutions};
use multisis_core::{CombinationVector, SisInstance};

/// Write to `path`, or to stdout when it is absent or `-`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load_instance(path: &Path) -> Result<SisInstance> {
    let text = read(path)?;
    parse_instance(&text).with_context(|| format!("{}", path.display()))
}

pub fn load_solutions(path: &Path) -> Result<(usize, Vec<CombinationVector>)> {
    let text = read(path)?;
    parse_solutions(&text).with_context(|| format!("{}", path.display()))
}
