//! Ground states cached under `<out>/cache`, keyed by `(N, p, options)`.
//!
//! The cached profile is the full mesh in JSON; norms are recomputed on
//! load, which is cheap and keeps one source of truth. Floats round-trip
//! exactly, so a cache hit gives bit-identical downstream results.

use std::path::{Path, PathBuf};

use nls_core::groundstate::{
    profile_norms, solve_ground_state, GroundState, RadialProfile, ShootingOptions,
};
use nls_core::params_well::derive_exponents;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::failure::Failure;

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    dim: usize,
    p: f64,
    options: ShootingOptions,
    profile: RadialProfile,
}

pub fn cache_key(dim: usize, p: f64, opts: &ShootingOptions) -> String {
    let mut h = Sha256::new();
    h.update(dim.to_le_bytes());
    h.update(p.to_bits().to_le_bytes());
    h.update(serde_json::to_vec(opts).expect("options serialize"));
    let digest = hex::encode(h.finalize());
    format!("gs-N{dim}-p{p}-{}", &digest[..16])
}

pub fn cache_path(out: &Path, dim: usize, p: f64, opts: &ShootingOptions) -> PathBuf {
    out.join("cache")
        .join(format!("{}.json", cache_key(dim, p, opts)))
}

fn from_profile(profile: RadialProfile) -> Result<GroundState, Failure> {
    let exps = derive_exponents(profile.dim, profile.p)?;
    let norms = profile_norms(&profile)?;
    Ok(GroundState {
        exps,
        profile,
        norms,
    })
}

/// Loads the cached ground state, solving and storing it on a miss.
/// A corrupt or mismatched entry is treated as a miss.
pub fn load_or_solve(
    out: &Path,
    dim: usize,
    p: f64,
    opts: &ShootingOptions,
) -> Result<GroundState, Failure> {
    derive_exponents(dim, p)?;
    let path = cache_path(out, dim, p, opts);
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(entry) = serde_json::from_str::<CacheEntry>(&text) {
            if entry.dim == dim && entry.p == p && &entry.options == opts {
                return from_profile(entry.profile);
            }
        }
    }
    let profile = solve_ground_state(dim, p, opts)?;
    let gs = from_profile(profile)?;
    let entry = CacheEntry {
        dim,
        p,
        options: opts.clone(),
        profile: gs.profile.clone(),
    };
    let dir = path.parent().expect("cache path has a parent");
    std::fs::create_dir_all(dir)?;
    // write-then-rename so concurrent readers never see half a file
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(
        &tmp,
        serde_json::to_vec(&entry).map_err(|e| Failure::Runtime(e.to_string()))?,
    )?;
    std::fs::rename(&tmp, &path)?;
    Ok(gs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hit_equals_miss() {
        let dir = tempfile::tempdir().unwrap();
        let opts = ShootingOptions::default();
        let a = load_or_solve(dir.path(), 1, 7.0, &opts).unwrap();
        assert!(cache_path(dir.path(), 1, 7.0, &opts).exists());
        let b = load_or_solve(dir.path(), 1, 7.0, &opts).unwrap();
        assert_eq!(a.profile, b.profile);
        assert_eq!(a.norms, b.norms);
    }

    #[test]
    fn key_depends_on_options() {
        let mut o = ShootingOptions::default();
        let k1 = cache_key(1, 7.0, &o);
        o.rtol = 1e-11;
        assert_ne!(k1, cache_key(1, 7.0, &o));
        assert_ne!(k1, cache_key(1, 5.0, &ShootingOptions::default()));
    }
}
