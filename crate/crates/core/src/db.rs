//! Versioned JSON artifacts: the enumeration database, minimal-vector reports, and DOT
//! exports of the neighbour graph and the strata poset.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::equivalence::fingerprint;
use crate::facelattice::StrataPoset;
use crate::forms::VectorZ;
use crate::jsonfmt::rat_serde;
use crate::minvec::MinData;
use crate::verify::Certificate;
use crate::voronoi::{domain, enumerate_perfect, is_perfect, neighbor, EnumerateOptions, Enumeration};

pub const FORMAT_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "VORONOI_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub wall_time_ms: u64,
}

impl Provenance {
    pub fn new(wall_time_ms: u64) -> Self {
        Provenance {
            tool: "voronoi".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            wall_time_ms,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Database {
    pub version: u32,
    pub g: usize,
    pub classes: Vec<crate::voronoi::PerfectClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poset: Option<StrataPoset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificates: Option<Vec<Certificate>>,
    pub provenance: Provenance,
}

impl Database {
    pub fn from_enumeration(e: Enumeration, wall_time_ms: u64) -> Self {
        Database {
            version: FORMAT_VERSION,
            g: e.g,
            classes: e.classes,
            poset: None,
            certificates: None,
            provenance: Provenance::new(wall_time_ms),
        }
    }

    pub fn enumeration(&self) -> Enumeration {
        Enumeration {
            g: self.g,
            classes: self.classes.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let db: Database = serde_json::from_str(s)?;
        if db.version != FORMAT_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported database version {}",
                db.version
            )));
        }
        Ok(db)
    }

    /// Serialisation without the provenance block, identical across runs.
    pub fn primary_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Some(o) = v.as_object_mut() {
            o.remove("provenance");
        }
        Ok(serde_json::to_string_pretty(&v)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Recompute every stored fingerprint and re-cross every stored neighbour edge,
    /// checking the stored unimodular witness against the target representative.
    pub fn reverify(&self) -> Result<()> {
        for (i, c) in self.classes.iter().enumerate() {
            if c.id != i {
                return Err(Error::InvalidInput(format!("class {i} stored with id {}", c.id)));
            }
            if c.representative.dim() != self.g || !is_perfect(&c.representative)? {
                return Err(Error::NotPerfect);
            }
            if fingerprint(&c.representative)? != c.fingerprint {
                return Err(Error::InvalidInput(format!("class {i}: fingerprint mismatch")));
            }
            let d = domain(&c.representative)?;
            let covered: usize = c.facet_orbits.iter().map(|o| o.len()).sum();
            if d.facet_normals.len() != c.facet_count || covered != c.facet_count {
                return Err(Error::InvalidInput(format!("class {i}: facet accounting")));
            }
            for e in &c.neighbors {
                let target = self
                    .classes
                    .get(e.class_id)
                    .ok_or_else(|| Error::InvalidInput(format!("unknown class {}", e.class_id)))?;
                let nb = neighbor(&d, e.facet)?;
                if e.witness.apply(&nb)? != target.representative {
                    return Err(Error::InvalidInput(format!(
                        "class {i}: witness for facet {} does not map to class {}",
                        e.facet, e.class_id
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Location of the cached database for dimension `g`, if a cache directory is set.
pub fn cache_path(g: usize) -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).map(|d| PathBuf::from(d).join(format!("perfect_g{g}.json")))
}

/// Reuse a cached, re-verified database when available; otherwise enumerate and store.
pub fn load_or_enumerate(g: usize, opts: EnumerateOptions) -> Result<Database> {
    if let Some(p) = cache_path(g) {
        if let Ok(db) = Database::load(&p) {
            if db.g == g && db.reverify().is_ok() {
                return Ok(db);
            }
        }
    }
    let start = Instant::now();
    let e = enumerate_perfect(g, opts)?;
    let db = Database::from_enumeration(e, start.elapsed().as_millis() as u64);
    if let Some(p) = cache_path(g) {
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir)?;
        }
        db.save(&p)?;
    }
    Ok(db)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinDataJson {
    #[serde(with = "rat_serde")]
    pub min: Rat,
    pub vectors: Vec<VectorZ>,
}

impl From<&MinData> for MinDataJson {
    fn from(m: &MinData) -> Self {
        MinDataJson {
            min: Rat::from_integer(m.min_norm.into()),
            vectors: m.vectors.clone(),
        }
    }
}

/// Leading hex digits of the SHA-256 of a serialisable value's JSON.
pub fn short_hash<T: Serialize>(v: &T) -> Result<String> {
    let bytes = serde_json::to_vec(v)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().take(6).map(|b| format!("{b:02x}")).collect())
}

/// Neighbour graph: one node per class labelled with a fingerprint hash, one edge per
/// facet orbit labelled with the orbit size.
pub fn enumeration_dot(e: &Enumeration) -> Result<String> {
    let mut s = String::new();
    writeln!(s, "digraph perfect_g{} {{", e.g).ok();
    for c in &e.classes {
        writeln!(
            s,
            "  c{} [label=\"c{} {} pairs={}\"];",
            c.id,
            c.id,
            short_hash(&c.fingerprint)?,
            c.pair_count
        )
        .ok();
    }
    for c in &e.classes {
        for n in &c.neighbors {
            writeln!(
                s,
                "  c{} -> c{} [label=\"{}\"];",
                c.id, n.class_id, n.orbit_size
            )
            .ok();
        }
    }
    s.push_str("}\n");
    Ok(s)
}

pub fn poset_dot(p: &StrataPoset) -> String {
    let mut s = String::new();
    writeln!(s, "digraph strata_g{} {{", p.g).ok();
    for n in &p.nodes {
        writeln!(
            s,
            "  n{} [label=\"r={}, dim={}, minimal={}\"];",
            n.id, n.rank, n.dim, n.minimal
        )
        .ok();
    }
    for (a, b) in &p.edges {
        writeln!(s, "  n{a} -> n{b};").ok();
    }
    s.push_str("}\n");
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosetFile {
    pub version: u32,
    pub poset: StrataPoset,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub version: u32,
    pub g: usize,
    pub certificates: Vec<Certificate>,
}

/// Pretty JSON with a trailing newline.
pub fn to_json_line<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}
