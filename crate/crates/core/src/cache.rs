//! Binary cache of a global election and its catalog.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic            8 bytes   "VSCACHE\0"
//! version          u32       FORMAT_VERSION
//! threshold        f64       approval threshold used at ingest
//! min_approvals    u32
//! n_agents         u32
//! n_resources      u32
//! n_resources ×    id u32, count u32, count × agent u32 (ascending)
//! n_entries        u32
//! n_entries ×      id u32, title (u32 len + UTF-8), n_genres u32, n_genres × (u32 len + UTF-8)
//! checksum         32 bytes  SHA-256 of everything above
//! ```

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::catalog::{Catalog, CatalogEntry};
use crate::election::{ApprovalElection, ResourceId};
use crate::error::{Error, Result};
use crate::ingest::IngestConfig;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"VSCACHE\0";
const CHECKSUM_LEN: usize = 32;

/// Contents of a cache file.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalData {
    pub election: ApprovalElection,
    pub catalog: Catalog,
    pub ingest: IngestConfig,
}

fn put_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn put_str(buf: &mut Vec<u8>, s: &str) {
    put_u32(buf, s.len() as u32);
    buf.extend_from_slice(s.as_bytes());
}

pub fn encode(data: &GlobalData) -> Vec<u8> {
    let e = &data.election;
    let mut buf = Vec::with_capacity(64 + 4 * (e.total_approvals() + 2 * e.n_resources()));
    buf.extend_from_slice(MAGIC);
    put_u32(&mut buf, FORMAT_VERSION);
    buf.extend_from_slice(&data.ingest.approval_threshold.to_le_bytes());
    put_u32(&mut buf, data.ingest.min_approvals as u32);
    put_u32(&mut buf, e.n_agents() as u32);
    put_u32(&mut buf, e.n_resources() as u32);
    for &r in e.resources() {
        let approvers = e.approvers(r);
        put_u32(&mut buf, r.0);
        put_u32(&mut buf, approvers.len() as u32);
        for &a in approvers {
            put_u32(&mut buf, a);
        }
    }
    put_u32(&mut buf, data.catalog.len() as u32);
    for (id, entry) in data.catalog.iter() {
        put_u32(&mut buf, id.0);
        put_str(&mut buf, &entry.title);
        put_u32(&mut buf, entry.genres.len() as u32);
        for g in &entry.genres {
            put_str(&mut buf, g);
        }
    }
    let checksum = Sha256::digest(&buf);
    buf.extend_from_slice(&checksum);
    buf
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&end| end <= self.buf.len())
            .ok_or_else(|| format!("truncated at byte {}", self.pos))?;
        let bytes = &self.buf[self.pos..end];
        self.pos = end;
        Ok(bytes)
    }

    fn u32(&mut self) -> std::result::Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> std::result::Result<f64, String> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> std::result::Result<String, String> {
        let len = self.u32()? as usize;
        String::from_utf8(self.take(len)?.to_vec()).map_err(|_| "invalid UTF-8 text".to_owned())
    }
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<GlobalData> {
    let corrupt = |reason: String| Error::Cache {
        path: path.to_owned(),
        reason,
    };
    if bytes.len() < MAGIC.len() + 4 + CHECKSUM_LEN || &bytes[..MAGIC.len()] != MAGIC {
        return Err(corrupt("not a votesearch cache file".into()));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::CacheVersion {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let (body, checksum) = bytes.split_at(bytes.len() - CHECKSUM_LEN);
    if Sha256::digest(body).as_slice() != checksum {
        return Err(corrupt("checksum mismatch".into()));
    }

    let mut cur = Cursor { buf: body, pos: 12 };
    let parsed = (|| -> std::result::Result<GlobalData, String> {
        let approval_threshold = cur.f64()?;
        let min_approvals = cur.u32()? as usize;
        let n_agents = cur.u32()? as usize;
        let n_resources = cur.u32()? as usize;
        let mut resources = Vec::with_capacity(n_resources);
        let mut columns = Vec::with_capacity(n_resources);
        for _ in 0..n_resources {
            let id = ResourceId(cur.u32()?);
            if resources.last().is_some_and(|&last| last >= id) {
                return Err(format!("resource ids out of order at {id}"));
            }
            let count = cur.u32()? as usize;
            let mut column = Vec::with_capacity(count.min(n_agents));
            for _ in 0..count {
                let a = cur.u32()?;
                if a as usize >= n_agents || column.last().is_some_and(|&last| last >= a) {
                    return Err(format!("bad approver list for resource {id}"));
                }
                column.push(a);
            }
            resources.push(id);
            columns.push(column);
        }
        let mut catalog = Catalog::new();
        for _ in 0..cur.u32()? {
            let id = ResourceId(cur.u32()?);
            let title = cur.string()?;
            let n_genres = cur.u32()?;
            let genres = (0..n_genres)
                .map(|_| cur.string())
                .collect::<std::result::Result<_, _>>()?;
            catalog.insert(id, CatalogEntry { title, genres });
        }
        if cur.pos != body.len() {
            return Err(format!("{} trailing bytes", body.len() - cur.pos));
        }
        Ok(GlobalData {
            election: ApprovalElection::from_columns(resources, n_agents, columns),
            catalog,
            ingest: IngestConfig {
                approval_threshold,
                min_approvals,
            },
        })
    })();
    parsed.map_err(corrupt)
}

pub fn save(data: &GlobalData, path: &Path) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, encode(data))?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<GlobalData> {
    let bytes = fs::read(path)?;
    decode(&bytes, path)
}
