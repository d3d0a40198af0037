//! Deterministic output plumbing: provenance headers, 17-significant-digit
//! number formatting and the config hash.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::{usage, AppError};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |hash, &byte| {
        (hash ^ u64::from(byte)).wrapping_mul(FNV_PRIME)
    })
}

/// Hash of the canonical JSON form of an effective run spec.
pub fn config_hash<T: Serialize>(spec: &T) -> String {
    let canonical = serde_json::to_string(spec).expect("specs serialize infallibly");
    format!("{:016x}", fnv1a64(canonical.as_bytes()))
}

/// `1.2339999999999999e0` style: 17 significant digits, lossless to parse.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn provenance_header(command: &str, hash: &str, seed: u64) -> String {
    format!(
        "# phasesplit {}\n# command: {command}\n# config: fnv1a64:{hash}\n# seed: {seed}\n",
        env!("CARGO_PKG_VERSION")
    )
}

/// Writes `text` to the path, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), AppError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
                .and_then(|()| lock.flush())
                .map_err(|e| usage(format!("cannot write to stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_matches_reference_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn floats_print_seventeen_significant_digits() {
        assert_eq!(fmt_float(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_float(f64::NAN), "nan");
        let pi = std::f64::consts::PI;
        assert_eq!(fmt_float(pi).parse::<f64>().unwrap(), pi);
    }

    #[test]
    fn header_carries_version_command_hash_and_seed() {
        let header = provenance_header("sweep", "00ff", 9);
        assert!(header.starts_with("# phasesplit "));
        assert!(header.contains("# command: sweep\n"));
        assert!(header.contains("# config: fnv1a64:00ff\n"));
        assert!(header.ends_with("# seed: 9\n"));
    }
}
