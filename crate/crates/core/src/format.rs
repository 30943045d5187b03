//! On-disk formats.
//!
//! ```text
//! GTF1  magic "GTF1", u64 N, N × f64                       (function on Z_N)
//! GTS1  magic "GTS1", u64 limit, primality bits LSB-first,
//!       μ as i8, φ as u64, each over 0..=limit             (sieve tables)
//! ```
//!
//! All integers and floats are little-endian. A cached weight is two GTF1
//! files (ν and f) next to a `key=value` text header.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::arith::{SieveTables, WTrickParams};
use crate::decompose::DecompositionResult;
use crate::error::{GtError, Result};
use crate::weight::Weight;
use crate::zn::GridFunction;

pub const GRID_MAGIC: &[u8; 4] = b"GTF1";
pub const SIEVE_MAGIC: &[u8; 4] = b"GTS1";

fn read_magic(r: &mut impl Read, magic: &[u8; 4]) -> Result<()> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)
        .map_err(|_| GtError::Format("file too short for magic".into()))?;
    if &buf != magic {
        return Err(GtError::Format(format!(
            "expected magic {:?}, found {:?}",
            String::from_utf8_lossy(magic),
            String::from_utf8_lossy(&buf)
        )));
    }
    Ok(())
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)
        .map_err(|_| GtError::Format("truncated integer field".into()))?;
    Ok(u64::from_le_bytes(buf))
}

fn read_exact_len(r: &mut impl Read, len: usize, what: &str) -> Result<Vec<u8>> {
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)
        .map_err(|_| GtError::Format(format!("truncated {what}")))?;
    Ok(buf)
}

fn expect_eof(r: &mut impl Read) -> Result<()> {
    let mut probe = [0u8; 1];
    match r.read(&mut probe)? {
        0 => Ok(()),
        _ => Err(GtError::Format("trailing bytes after payload".into())),
    }
}

pub fn write_grid(w: &mut impl Write, f: &GridFunction) -> Result<()> {
    w.write_all(GRID_MAGIC)?;
    w.write_all(&(f.modulus() as u64).to_le_bytes())?;
    for v in f.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_grid(r: &mut impl Read) -> Result<GridFunction> {
    read_magic(r, GRID_MAGIC)?;
    let n = read_u64(r)?;
    let len = usize::try_from(n)
        .ok()
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| GtError::Format(format!("N = {n} is too large")))?;
    let bytes = read_exact_len(r, len, "values")?;
    expect_eof(r)?;
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    GridFunction::new(values)
}

pub fn save_grid(path: &Path, f: &GridFunction) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_grid(&mut w, f)?;
    w.flush()?;
    Ok(())
}

pub fn load_grid(path: &Path) -> Result<GridFunction> {
    read_grid(&mut BufReader::new(File::open(path)?))
}

pub fn write_sieve(w: &mut impl Write, sieve: &SieveTables) -> Result<()> {
    let limit = sieve.limit();
    w.write_all(SIEVE_MAGIC)?;
    w.write_all(&limit.to_le_bytes())?;
    let mut bits = vec![0u8; (limit as usize + 1).div_ceil(8)];
    for &p in sieve.primes() {
        bits[p as usize / 8] |= 1 << (p % 8);
    }
    w.write_all(&bits)?;
    let mu: Vec<u8> = sieve.mobius_table().iter().map(|&m| m as u8).collect();
    w.write_all(&mu)?;
    for &phi in sieve.phi_table() {
        w.write_all(&(phi as u64).to_le_bytes())?;
    }
    Ok(())
}

pub fn read_sieve(r: &mut impl Read) -> Result<SieveTables> {
    read_magic(r, SIEVE_MAGIC)?;
    let limit = read_u64(r)?;
    if !(2..u32::MAX as u64).contains(&limit) {
        return Err(GtError::Format(format!("sieve limit {limit} out of range")));
    }
    let n = limit as usize + 1;
    let bits = read_exact_len(r, n.div_ceil(8), "primality bits")?;
    let is_prime = (0..n).map(|i| bits[i / 8] >> (i % 8) & 1 == 1).collect();
    let mobius = read_exact_len(r, n, "Möbius table")?
        .into_iter()
        .map(|b| b as i8)
        .collect();
    let phi = read_exact_len(r, 8 * n, "phi table")?
        .chunks_exact(8)
        .map(|c| {
            let v = u64::from_le_bytes(c.try_into().expect("8-byte chunk"));
            u32::try_from(v).map_err(|_| GtError::Format(format!("phi value {v} exceeds 32 bits")))
        })
        .collect::<Result<Vec<u32>>>()?;
    expect_eof(r)?;
    SieveTables::from_parts(limit, is_prime, mobius, phi)
}

pub fn save_sieve(path: &Path, sieve: &SieveTables) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_sieve(&mut w, sieve)?;
    w.flush()?;
    Ok(())
}

pub fn load_sieve(path: &Path) -> Result<SieveTables> {
    read_sieve(&mut BufReader::new(File::open(path)?))
}

/// The sidecar header of a cached weight. Floats are written in Rust's
/// shortest round-trip form, so parsing returns the same bits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightHeader {
    pub k: u32,
    pub n: u64,
    pub alpha: f64,
    pub w: f64,
    pub big_w: u64,
    pub r: f64,
    pub b: u64,
    pub c: f64,
    pub chi_normalization: f64,
}

impl WeightHeader {
    pub fn of(weight: &Weight) -> Self {
        let t = &weight.recipe.wtrick;
        Self {
            k: t.k,
            n: t.n,
            alpha: t.alpha,
            w: t.w,
            big_w: t.big_w,
            r: t.r,
            b: t.b,
            c: weight.c,
            chi_normalization: weight.recipe.cutoff.normalization(),
        }
    }

    pub fn to_text(&self) -> String {
        format!(
            "k={}\nN={}\nalpha={:?}\nw={:?}\nW={}\nR={:?}\nb={}\nc={:?}\nchi_normalization={:?}\n",
            self.k, self.n, self.alpha, self.w, self.big_w, self.r, self.b, self.c, self.chi_normalization
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let map = parse_key_values(text)?;
        fn field<T: std::str::FromStr>(map: &std::collections::BTreeMap<String, String>, key: &str) -> Result<T> {
            map.get(key)
                .ok_or_else(|| GtError::Format(format!("weight header lacks `{key}`")))?
                .parse()
                .map_err(|_| GtError::Format(format!("weight header field `{key}` does not parse")))
        }
        Ok(Self {
            k: field(&map, "k")?,
            n: field(&map, "N")?,
            alpha: field(&map, "alpha")?,
            w: field(&map, "w")?,
            big_w: field(&map, "W")?,
            r: field(&map, "R")?,
            b: field(&map, "b")?,
            c: field(&map, "c")?,
            chi_normalization: field(&map, "chi_normalization")?,
        })
    }

    /// Whether the header was written for these parameters: k, N, α, w and b
    /// must agree exactly.
    pub fn matches(&self, t: &WTrickParams) -> bool {
        self.k == t.k
            && self.n == t.n
            && self.alpha.to_bits() == t.alpha.to_bits()
            && self.w.to_bits() == t.w.to_bits()
            && self.b == t.b
    }
}

/// `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<std::collections::BTreeMap<String, String>> {
    let mut map = std::collections::BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| GtError::Format(format!("line {}: expected key=value", i + 1)))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// ν, f and the header as read back from a cache directory.
#[derive(Clone, Debug)]
pub struct CachedWeight {
    pub header: WeightHeader,
    pub nu: GridFunction,
    pub f: GridFunction,
}

/// Paths `(header, ν, f)` for a cache entry.
pub fn weight_paths(dir: &Path, stem: &str) -> (PathBuf, PathBuf, PathBuf) {
    (
        dir.join(format!("{stem}.txt")),
        dir.join(format!("{stem}.nu.gtf")),
        dir.join(format!("{stem}.f.gtf")),
    )
}

pub fn save_weight(dir: &Path, stem: &str, weight: &Weight) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let (header, nu, f) = weight_paths(dir, stem);
    save_grid(&nu, &weight.nu)?;
    save_grid(&f, &weight.f)?;
    // header last: an entry without one is never trusted
    std::fs::write(header, WeightHeader::of(weight).to_text())?;
    Ok(())
}

pub fn load_weight(dir: &Path, stem: &str) -> Result<CachedWeight> {
    let (header, nu, f) = weight_paths(dir, stem);
    let header = WeightHeader::parse(&std::fs::read_to_string(header)?)?;
    let nu = load_grid(&nu)?;
    let f = load_grid(&f)?;
    if nu.modulus() as u64 != header.n || f.modulus() as u64 != header.n {
        return Err(GtError::Format(format!(
            "cached tables have lengths {} and {}, header says N = {}",
            nu.modulus(),
            f.modulus(),
            header.n
        )));
    }
    Ok(CachedWeight { header, nu, f })
}

fn join_floats(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

/// Plain-text summary of a decomposition.
pub fn write_decomposition_report(w: &mut impl Write, r: &DecompositionResult) -> Result<()> {
    let d = &r.diagnostics;
    writeln!(w, "N={}", r.g.modulus())?;
    writeln!(w, "iterations={}", r.iterations)?;
    writeln!(w, "atoms={}", r.partition.atom_count())?;
    writeln!(w, "omega_size={}", r.omega.values().iter().filter(|&&v| v != 0.0).count())?;
    writeln!(w, "sigma={:?}", r.sigma)?;
    writeln!(w, "width={:?}", r.width)?;
    writeln!(w, "energies={}", join_floats(&r.energies))?;
    writeln!(w, "norms={}", join_floats(&r.norms))?;
    writeln!(w, "alphas={}", join_floats(&r.rules.iter().map(|a| a.alpha).collect::<Vec<_>>()))?;
    writeln!(w, "boundary_masses={}", join_floats(&r.boundary_masses))?;
    writeln!(w, "nu_on_omega={:?}", d.nu_on_omega)?;
    writeln!(w, "nu_deviation={:?}", d.nu_deviation)?;
    writeln!(w, "h_norm={:?}", d.h_norm)?;
    writeln!(w, "g_sup={:?}", d.g_sup)?;
    Ok(())
}

/// Writes `report.txt`, `g.gtf`, `h.gtf` and `omega.gtf` into `dir`.
pub fn save_decomposition(dir: &Path, r: &DecompositionResult) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut report = BufWriter::new(File::create(dir.join("report.txt"))?);
    write_decomposition_report(&mut report, r)?;
    report.flush()?;
    save_grid(&dir.join("g.gtf"), &r.g)?;
    save_grid(&dir.join("h.gtf"), &r.h)?;
    save_grid(&dir.join("omega.gtf"), &r.omega)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::arith::build_sieve;
    use crate::weight::WeightRecipe;

    #[test]
    fn grid_layout_is_exact() {
        let f = GridFunction::new(vec![1.0, -0.5]).unwrap();
        let mut buf = Vec::new();
        write_grid(&mut buf, &f).unwrap();
        let mut expected = b"GTF1".to_vec();
        expected.extend(2u64.to_le_bytes());
        expected.extend(1.0f64.to_le_bytes());
        expected.extend((-0.5f64).to_le_bytes());
        assert_eq!(buf, expected);
        assert_eq!(read_grid(&mut buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn grid_rejects_damage() {
        let f = GridFunction::constant(5, 2.0).unwrap();
        let mut buf = Vec::new();
        write_grid(&mut buf, &f).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_grid(&mut bad.as_slice()), Err(GtError::Format(_))));
        assert!(matches!(read_grid(&mut &buf[..buf.len() - 1]), Err(GtError::Format(_))));
        let mut long = buf.clone();
        long.push(0);
        assert!(matches!(read_grid(&mut long.as_slice()), Err(GtError::Format(_))));
        let mut nan = buf.clone();
        nan[12..20].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(read_grid(&mut nan.as_slice()), Err(GtError::NonFinite { index: 0 })));
    }

    #[test]
    fn sieve_round_trip() {
        let sieve = build_sieve(1_000).unwrap();
        let mut buf = Vec::new();
        write_sieve(&mut buf, &sieve).unwrap();
        assert_eq!(&buf[..4], b"GTS1");
        assert_eq!(buf.len(), 4 + 8 + 126 + 1001 + 8 * 1001);
        // 2, 3, 5, 7 in the first byte
        assert_eq!(buf[12], 0b1010_1100);
        let back = read_sieve(&mut buf.as_slice()).unwrap();
        assert_eq!(back, sieve);
        assert!(read_sieve(&mut &buf[..buf.len() - 3]).is_err());
    }

    #[test]
    fn weight_cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let (recipe, sieve) = WeightRecipe::build(2, 1_000, 0.2, None).unwrap();
        let weight = Weight::build(recipe, &sieve).unwrap();
        save_weight(dir.path(), "w", &weight).unwrap();
        let cached = load_weight(dir.path(), "w").unwrap();
        assert_eq!(cached.header, WeightHeader::of(&weight));
        assert!(cached.header.matches(&recipe.wtrick));
        assert_eq!(cached.nu, weight.nu);
        assert_eq!(cached.f, weight.f);

        let mut other = recipe.wtrick;
        other.b += 2;
        assert!(!cached.header.matches(&other));
        other = recipe.wtrick;
        other.alpha = f64::from_bits(other.alpha.to_bits() + 1);
        assert!(!cached.header.matches(&other));

        let (header, _, _) = weight_paths(dir.path(), "w");
        std::fs::write(&header, "k=2\nN=oops\n").unwrap();
        assert!(load_weight(dir.path(), "w").is_err());
        assert!(load_weight(dir.path(), "missing").is_err());
    }

    #[test]
    fn key_values() {
        let m = parse_key_values("# c\n a = 1 \n\nb=x=y\n").unwrap();
        assert_eq!(m["a"], "1");
        assert_eq!(m["b"], "x=y");
        assert!(parse_key_values("novalue").is_err());
    }

    proptest! {
        #[test]
        fn grid_round_trip(values in prop::collection::vec(-1e300f64..1e300, 1..200)) {
            let f = GridFunction::new(values).unwrap();
            let mut buf = Vec::new();
            write_grid(&mut buf, &f).unwrap();
            prop_assert_eq!(buf.len(), 12 + 8 * f.modulus());
            prop_assert_eq!(read_grid(&mut buf.as_slice()).unwrap(), f);
        }

        #[test]
        fn header_round_trip(alpha in 1e-3f64..0.25, w in 0.1f64..4.5, c in 1e-3f64..1e3) {
            let h = WeightHeader { k: 3, n: 10007, alpha, w, big_w: 6, r: 10.5, b: 5, c, chi_normalization: 2.2 };
            prop_assert_eq!(WeightHeader::parse(&h.to_text()).unwrap(), h);
        }
    }
}
