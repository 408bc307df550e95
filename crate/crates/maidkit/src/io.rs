//! Reading games, policies, κ files and normal forms from disk.

use std::fs;
use std::path::{Path, PathBuf};

use maidkit_core::correlation::CorrelatedDist;
use maidkit_core::model::{import_normal_form, ImportError, NormalFormGame};
use maidkit_core::text::{parse_kappa, parse_maid, parse_normal_form, parse_policy, ParseError, ParsedPolicy};
use maidkit_core::Maid;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Import { path: PathBuf, source: ImportError },
}

pub fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Read { path: path.to_owned(), source })
}

fn parse_err(path: &Path) -> impl FnOnce(ParseError) -> IoError + '_ {
    move |source| IoError::Parse { path: path.to_owned(), source }
}

pub fn is_normal_form(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "nf")
}

pub fn load_normal_form(path: &Path) -> Result<NormalFormGame, IoError> {
    parse_normal_form(&read(path)?).map_err(parse_err(path))
}

/// A `.maid` game, or a `.nf` table imported on the fly.
pub fn load_game(path: &Path) -> Result<Maid, IoError> {
    if is_normal_form(path) {
        let nf = load_normal_form(path)?;
        return import_normal_form(&nf).map_err(|source| IoError::Import { path: path.to_owned(), source });
    }
    parse_maid(&read(path)?).map_err(parse_err(path))
}

pub fn load_policy(m: &Maid, path: &Path) -> Result<ParsedPolicy, IoError> {
    parse_policy(m, &read(path)?).and_then(|f| f.into_policy(m)).map_err(parse_err(path))
}

pub fn load_kappa(m: &Maid, path: &Path) -> Result<CorrelatedDist, IoError> {
    parse_kappa(m, &read(path)?).map_err(parse_err(path))
}
