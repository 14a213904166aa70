//! Exact trace tables with a content-addressed JSON cache.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rug::Rational;
use serde::{Deserialize, Serialize};

use super::series::TraceContext;
use crate::error::{Error, Result};

/// `value` is `t(m) / sqrt(Delta)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub m: i64,
    #[serde(with = "crate::serde_rational")]
    pub value: Rational,
    pub err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceTable {
    pub f_id: String,
    #[serde(rename = "N")]
    pub level: u64,
    pub delta: i64,
    pub r: u64,
    /// Sorted by `m`, no repeats.
    pub entries: Vec<TableEntry>,
}

/// `SMT_CACHE_DIR`, or `./.cache`.
pub fn cache_dir() -> PathBuf {
    std::env::var_os("SMT_CACHE_DIR").map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".cache"))
}

impl TraceTable {
    pub fn empty(ctx: &TraceContext) -> Self {
        TraceTable {
            f_id: ctx.f.f_id(),
            level: ctx.spec.level,
            delta: ctx.spec.delta,
            r: ctx.spec.root,
            entries: Vec::new(),
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}-N{}-d{}-r{}.json", self.f_id, self.level, self.delta, self.r)
    }

    fn matches(&self, ctx: &TraceContext) -> bool {
        self.f_id == ctx.f.f_id() && self.level == ctx.spec.level && self.delta == ctx.spec.delta && self.r == ctx.spec.root
    }

    /// The cached table for `ctx` under `dir`, or an empty one.
    pub fn load(ctx: &TraceContext, dir: &Path) -> Result<Self> {
        let empty = TraceTable::empty(ctx);
        let path = dir.join(empty.file_name());
        if !path.exists() {
            return Ok(empty);
        }
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let t = TraceTable::from_json(&text)?;
        if !t.matches(ctx) {
            return Err(Error::Io(format!("{} belongs to a different function or character", path.display())));
        }
        Ok(t)
    }

    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let path = dir.join(self.file_name());
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, self.to_json()).map_err(|e| Error::Io(format!("{}: {e}", tmp.display())))?;
        std::fs::rename(&tmp, &path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut t: TraceTable = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        t.entries.sort_by_key(|e| e.m);
        t.entries.dedup_by_key(|e| e.m);
        Ok(t)
    }

    fn position(&self, m: i64) -> std::result::Result<usize, usize> {
        self.entries.binary_search_by_key(&m, |e| e.m)
    }

    pub fn contains(&self, m: i64) -> bool {
        self.position(m).is_ok()
    }

    pub fn get(&self, m: i64) -> Result<&Rational> {
        self.position(m).map(|i| &self.entries[i].value).map_err(|_| Error::MissingIndex(m))
    }

    pub fn insert(&mut self, e: TableEntry) {
        match self.position(e.m) {
            Ok(i) => self.entries[i] = e,
            Err(i) => self.entries.insert(i, e),
        }
    }

    /// Computes the missing indices in parallel. Successful entries are kept
    /// even when another index fails; the first failure (by index) is returned.
    pub fn fill(&mut self, ctx: &TraceContext, indices: &[i64]) -> Result<()> {
        let mut todo: Vec<i64> = indices.iter().copied().filter(|&m| !self.contains(m)).collect();
        todo.sort_unstable();
        todo.dedup();
        let results: Vec<(i64, Result<TableEntry>)> = todo
            .par_iter()
            .map(|&m| {
                let r = ctx.trace(m).and_then(|t| match t.value.coefficient(ctx.spec.delta) {
                    Some(value) => Ok(TableEntry { m, value, err: t.err }),
                    None => Err(Error::NonRational(m)),
                });
                (m, r)
            })
            .collect();
        let mut first_err = None;
        for (_, r) in results {
            match r {
                Ok(e) => self.insert(e),
                Err(e) if first_err.is_none() => first_err = Some(e),
                Err(_) => {}
            }
        }
        first_err.map_or(Ok(()), Err)
    }
}
