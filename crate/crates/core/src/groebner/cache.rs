//! On-disk cache of reduced Gröbner bases.
//!
//! One file per basis, named by the SHA-256 of the inputs:
//!
//! ```text
//! keller-groebner v1
//! key <hex digest>
//! order grevlex
//! ring Q
//! vars a1,a2,b1
//! size 2
//! <basis element>
//! <basis element>
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::arith::Ring;
use crate::error::{Error, Result};
use crate::poly::{MonomialOrder, Polynomial, VariableSet};

const MAGIC: &str = "keller-groebner v1";

/// `KELLER_CACHE_DIR`, else `$XDG_CACHE_HOME/keller`, else `$HOME/.cache/keller`,
/// else a directory under the system temporary directory.
pub fn default_cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os("KELLER_CACHE_DIR") {
        return PathBuf::from(dir);
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(dir).join("keller");
    }
    if let Some(home) = std::env::var_os("HOME") {
        return PathBuf::from(home).join(".cache").join("keller");
    }
    std::env::temp_dir().join("keller-cache")
}

/// Hex digest identifying a computation.
pub fn cache_key(tag: &str, order: MonomialOrder, ring: Ring, vars: &VariableSet, gens: &[Polynomial]) -> String {
    let mut h = Sha256::new();
    h.update(MAGIC.as_bytes());
    h.update(b"\n");
    h.update(tag.as_bytes());
    h.update(b"\n");
    h.update(order.name().as_bytes());
    h.update(b"\n");
    h.update(ring.to_string().as_bytes());
    h.update(b"\n");
    h.update(vars.to_string().as_bytes());
    for g in gens {
        h.update(b"\n");
        h.update(g.to_string().as_bytes());
    }
    hex::encode(h.finalize())
}

fn path_for(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.gb"))
}

pub(crate) fn parse_ring(text: &str) -> Result<Ring> {
    match text {
        "Z" => Ok(Ring::Integers),
        "Q" => Ok(Ring::Rationals),
        _ => {
            let p = text
                .strip_prefix("F_")
                .and_then(|p| p.parse::<u64>().ok())
                .ok_or_else(|| Error::Invalid(format!("unknown ring `{text}`")))?;
            Ring::prime_field(p)
        }
    }
}

/// Loads a cached basis. A missing file yields `Ok(None)`; a file whose header
/// does not match is reported as an error.
pub fn load(dir: &Path, key: &str, order: MonomialOrder, ring: Ring, vars: &VariableSet) -> Result<Option<Vec<Polynomial>>> {
    let path = path_for(dir, key);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(Error::Cache(format!("{}: {e}", path.display()))),
    };
    let bad = |what: &str| Error::Cache(format!("{}: {what}", path.display()));
    let mut lines = text.lines();
    let mut field = |name: &str| -> Result<String> {
        let line = lines.next().ok_or_else(|| bad("truncated header"))?;
        if name.is_empty() {
            return Ok(line.to_string());
        }
        line.strip_prefix(name)
            .and_then(|r| r.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| bad(&format!("expected `{name}`")))
    };
    if field("")? != MAGIC {
        return Err(bad("unknown format"));
    }
    if field("key")? != key {
        return Err(bad("key mismatch"));
    }
    if field("order")?.parse::<MonomialOrder>()? != order {
        return Err(bad("order mismatch"));
    }
    if parse_ring(&field("ring")?)? != ring {
        return Err(bad("ring mismatch"));
    }
    if VariableSet::parse_list(&field("vars")?)? != *vars {
        return Err(bad("variable mismatch"));
    }
    let size: usize = field("size")?.parse().map_err(|_| bad("bad size"))?;
    let polys = lines.map(|l| Polynomial::parse(l, vars, ring)).collect::<Result<Vec<_>>>()?;
    if polys.len() != size {
        return Err(bad("size mismatch"));
    }
    Ok(Some(polys))
}

pub fn store(dir: &Path, key: &str, order: MonomialOrder, ring: Ring, vars: &VariableSet, basis: &[Polynomial]) -> Result<()> {
    let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let mut body = format!("{MAGIC}\nkey {key}\norder {order}\nring {ring}\nvars {vars}\nsize {}\n", basis.len());
    for g in basis {
        body.push_str(&g.to_string());
        body.push('\n');
    }
    let tmp = dir.join(format!("{key}.tmp{}", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(body.as_bytes()).map_err(io)?;
    drop(f);
    fs::rename(&tmp, path_for(dir, key)).map_err(io)
}
