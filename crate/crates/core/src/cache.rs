//! Optional on-disk memo of computed multidifferentials.
//!
//! Entries are keyed by a content hash of the parsed curve configuration
//! (whitespace and formatting of the original file are irrelevant) plus
//! `(flavor, 2g, arity)`. The stored payload is the canonical text
//! serialization, so a cache hit reproduces the cold run byte for byte; the
//! manifest stores the full canonical configuration and is compared on open,
//! which makes hash collisions harmless.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::algebra::{parse_expr, ratfunc_to_string, ExprNames, ParamTable, Point, RatFunc};
use crate::curve::CurveConfig;
use crate::diff::{Flavor, MultiDiff, PoleSite};

const FORMAT_VERSION: &str = "refrec-cache-1";

/// FNV-1a, 64-bit: stable across platforms and releases.
fn fnv1a(data: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in data {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub struct DiskCache {
    dir: PathBuf,
    params: ParamTable,
}

impl DiskCache {
    /// Open (or create) the cache slot for this configuration under `root`.
    pub fn open(root: &Path, config: &CurveConfig) -> io::Result<DiskCache> {
        let manifest = format!("{FORMAT_VERSION}\n{}", config.canonical_text());
        let key = fnv1a(manifest.as_bytes());
        let dir = root.join(format!("{key:016x}"));
        fs::create_dir_all(&dir)?;
        let manifest_path = dir.join("manifest.txt");
        match fs::read_to_string(&manifest_path) {
            Ok(existing) if existing == manifest => {}
            Ok(_) => {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    "cache slot collision: manifest differs for this configuration",
                ));
            }
            Err(_) => fs::write(&manifest_path, &manifest)?,
        }
        Ok(DiskCache { dir, params: config.params.clone() })
    }

    fn entry_path(&self, flavor: Flavor, two_g: u32, arity: u32) -> PathBuf {
        self.dir.join(format!("{flavor}_{two_g}_{arity}.txt"))
    }

    pub fn save(&self, diff: &MultiDiff) -> io::Result<()> {
        let path = self.entry_path(diff.flavor, diff.two_g, diff.arity);
        let mut out = String::new();
        out.push_str(&format!("expr = {}\n", ratfunc_to_string(&diff.expr, Some(&self.params))));
        for (i, slot) in diff.pole_locus.iter().enumerate() {
            let rendered: Vec<String> = slot
                .iter()
                .map(|(site, order)| format!("{} ^ {order}", render_site(site, &self.params)))
                .collect();
            out.push_str(&format!("poles[{i}] = {}\n", rendered.join(" ; ")));
        }
        fs::write(path, out)
    }

    pub fn load(&self, flavor: Flavor, two_g: u32, arity: u32) -> Option<MultiDiff> {
        let text = fs::read_to_string(self.entry_path(flavor, two_g, arity)).ok()?;
        let mut expr: Option<RatFunc> = None;
        let mut pole_locus: Vec<Vec<(PoleSite, u32)>> = Vec::new();
        for line in text.lines() {
            let (key, value) = line.split_once('=')?;
            let key = key.trim();
            let value = value.trim();
            if key == "expr" {
                expr = Some(self.parse_value(value)?);
            } else if key.starts_with("poles[") {
                let mut slot = Vec::new();
                if !value.is_empty() {
                    for item in value.split(';') {
                        let (site, order) = item.rsplit_once('^')?;
                        slot.push((
                            self.parse_site(site.trim())?,
                            order.trim().parse().ok()?,
                        ));
                    }
                }
                pole_locus.push(slot);
            }
        }
        Some(MultiDiff { two_g, arity, flavor, expr: expr?, pole_locus })
    }

    fn parse_value(&self, s: &str) -> Option<RatFunc> {
        let names = ExprNames { coord: None, params: Some(&self.params), allow_geometry: true };
        parse_expr(s, 1, &names).ok()
    }

    fn parse_site(&self, s: &str) -> Option<PoleSite> {
        if s == "oo" {
            return Some(PoleSite::At(Point::Infinity));
        }
        if let Some(inner) = s.strip_prefix("sigma(z").and_then(|r| r.strip_suffix(')')) {
            return Some(PoleSite::SigmaOfVar(inner.parse().ok()?));
        }
        Some(PoleSite::At(Point::Finite(self.parse_value(s)?)))
    }
}

fn render_site(site: &PoleSite, params: &ParamTable) -> String {
    match site {
        PoleSite::At(Point::Infinity) => "oo".into(),
        PoleSite::At(Point::Finite(v)) => ratfunc_to_string(v, Some(params)),
        PoleSite::SigmaOfVar(j) => format!("sigma(z{j})"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursion::RecursionStore;
    use crate::testcurves::airy_config;

    #[test]
    fn cache_round_trip_is_identical() {
        let tmp = std::env::temp_dir().join(format!("refrec-cache-test-{}", std::process::id()));
        let _ = fs::remove_dir_all(&tmp);
        let cfg = airy_config();
        let cache = DiskCache::open(&tmp, &cfg).unwrap();
        let store = RecursionStore::new(crate::curve::validate_curve(&cfg).unwrap()).unwrap();
        let w = store.omega(1, 2, Flavor::Full).unwrap();
        cache.save(&w).unwrap();
        let back = cache.load(Flavor::Full, 1, 2).expect("entry present");
        assert_eq!(back.expr, w.expr);
        assert_eq!(back.pole_locus.len(), w.pole_locus.len());
        for (a, b) in back.pole_locus.iter().zip(&w.pole_locus) {
            assert_eq!(a, b);
        }
        // A second save/load reproduces the identical file bytes.
        let path = tmp
            .join(fs::read_dir(&tmp).unwrap().next().unwrap().unwrap().file_name())
            .join("full_1_2.txt");
        let first = fs::read(&path).unwrap();
        cache.save(&back).unwrap();
        assert_eq!(fs::read(&path).unwrap(), first);
        let _ = fs::remove_dir_all(&tmp);
    }
}
