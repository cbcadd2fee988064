//! File wrappers around the in-memory PGM codec.

use std::fs;
use std::path::{Path, PathBuf};

use fse_conceal_core::imagebuf::{load_mask_pgm, load_pgm, save_pgm, Image, LossMask, PgmError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: PgmError },
}

fn read(path: &Path) -> Result<Vec<u8>, IoError> {
    fs::read(path).map_err(|source| IoError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn read_image(path: &Path) -> Result<Image, IoError> {
    load_pgm(&read(path)?).map_err(|source| IoError::Format {
        path: path.to_owned(),
        source,
    })
}

pub fn read_mask(path: &Path) -> Result<LossMask, IoError> {
    load_mask_pgm(&read(path)?).map_err(|source| IoError::Format {
        path: path.to_owned(),
        source,
    })
}

pub fn write_image(path: &Path, image: &Image) -> Result<(), IoError> {
    fs::write(path, save_pgm(image)).map_err(|source| IoError::Io {
        path: path.to_owned(),
        source,
    })
}
