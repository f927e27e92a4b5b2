//! On-disk cache of generated sets, keyed by a hash of the family spec.
//! Results never depend on whether the cache is used.

use std::fs;
use std::path::PathBuf;

use apxgrp_core::families::{self, FamilySpec};
use apxgrp_core::FinSet;
use sha2::{Digest, Sha256};

use crate::config::OutputBlock;
use crate::error::CliResult;

pub const CACHE_ENV: &str = "APXGRP_CACHE_DIR";

#[derive(Debug, Clone)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn disabled() -> Cache {
        Cache { dir: None }
    }

    pub fn from_output(out: &OutputBlock) -> Cache {
        if !out.cache {
            return Cache::disabled();
        }
        let dir = std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .or_else(|| out.cache_dir.clone())
            .unwrap_or_else(|| out.dir.join(".cache"));
        Cache { dir: Some(dir) }
    }

    pub fn dir(&self) -> Option<&PathBuf> {
        self.dir.as_ref()
    }

    fn key(spec: &FamilySpec) -> String {
        let json = serde_json::to_string(spec).expect("family specs serialize");
        hex::encode(Sha256::digest(format!("family v1\n{json}").as_bytes()))
    }

    /// The set a spec describes, read from the cache when present.
    pub fn family(&self, spec: &FamilySpec) -> CliResult<FinSet> {
        let Some(dir) = &self.dir else {
            return Ok(families::generate(spec)?);
        };
        let path = dir.join(format!("{}.finset", Self::key(spec)));
        if let Ok(text) = fs::read_to_string(&path) {
            // A damaged entry is regenerated below.
            if let Ok(set) = FinSet::from_text(&text) {
                return Ok(set);
            }
        }
        let set = families::generate(spec)?;
        fs::create_dir_all(dir)?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, set.to_text())?;
        fs::rename(&tmp, &path)?;
        Ok(set)
    }
}
