//! Prime generation by a segmented, odd-only sieve of Eratosthenes.
//!
//! The sieve walks `[3, limit]` in fixed windows of odd numbers, so the working
//! set stays at one segment plus the base primes below `√limit`; only the
//! output sequence grows with the limit. `π(n)` is answered by binary search
//! over that sequence.
//!
//! A table can be cached on disk as little-endian `u64` values: an 8-byte
//! header holding the limit, followed by the primes in ascending order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Odd entries per sieve segment.
pub const DEFAULT_SEGMENT_LEN: usize = 1 << 20;

/// Default cap on the memory a single sieve run may allocate (1 GiB).
pub const DEFAULT_MEMORY_BUDGET: u64 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    pub segment_len: usize,
    pub memory_budget: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            segment_len: DEFAULT_SEGMENT_LEN,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }
}

impl SieveConfig {
    /// Upper estimate of the bytes a sieve to `limit` allocates, using the
    /// Rosser–Schoenfeld bound `π(x) < 1.25506 x / ln x` for the output.
    pub fn estimated_bytes(&self, limit: u64) -> u64 {
        let count = if limit < 17 {
            7
        } else {
            let x = limit as f64;
            (1.25506 * x / x.ln()).ceil() as u64
        };
        let base = limit.isqrt() / 2 + 1;
        count * 8 + base * 16 + self.segment_len as u64
    }
}

/// All primes up to an inclusive limit, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// `π(n)`, the number of primes `≤ n`.
    pub fn prime_count(&self, n: u64) -> Result<u64> {
        if n > self.limit {
            return Err(Error::OutOfRange {
                what: "n",
                value: n,
                limit: self.limit,
            });
        }
        Ok(self.primes.partition_point(|&p| p <= n) as u64)
    }

    pub fn is_prime(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }

    /// The same table cut down to `limit`. Fails if `limit` exceeds the
    /// current one, since the missing primes are unknown.
    pub fn truncated(&self, limit: u64) -> Result<PrimeTable> {
        if limit > self.limit {
            return Err(Error::InsufficientTable {
                need: limit,
                have: self.limit,
            });
        }
        let end = self.primes.partition_point(|&p| p <= limit);
        Ok(PrimeTable {
            limit,
            primes: self.primes[..end].to_vec(),
        })
    }

    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&self.limit.to_le_bytes())?;
        for p in &self.primes {
            w.write_all(&p.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a cached table, rejecting anything that is not a strictly
    /// increasing run of values in `[2, limit]`.
    pub fn read_cache<R: Read>(mut r: R, origin: &str) -> Result<PrimeTable> {
        let bad = |reason: String| Error::Format {
            origin: origin.to_string(),
            reason,
        };
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() < 8 || bytes.len() % 8 != 0 {
            return Err(bad(format!(
                "length {} is not an 8-byte header plus whole 64-bit values",
                bytes.len()
            )));
        }
        let mut words = bytes
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().expect("chunk of 8")));
        let limit = words.next().expect("header present");
        let mut primes = Vec::with_capacity(bytes.len() / 8 - 1);
        let mut prev = 1u64;
        for (i, p) in words.enumerate() {
            if p <= prev {
                return Err(bad(format!("entry {i} ({p}) breaks strict ascending order")));
            }
            if p > limit {
                return Err(bad(format!("entry {i} ({p}) exceeds header limit {limit}")));
            }
            primes.push(p);
            prev = p;
        }
        Ok(PrimeTable { limit, primes })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_cache(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<PrimeTable> {
        let origin = path.display().to_string();
        PrimeTable::read_cache(BufReader::new(File::open(path)?), &origin)
    }
}

/// All primes `≤ limit` under the default configuration.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    sieve_primes_with(limit, &SieveConfig::default())
}

pub fn sieve_primes_with(limit: u64, config: &SieveConfig) -> Result<PrimeTable> {
    let needed = config.estimated_bytes(limit);
    if needed > config.memory_budget {
        return Err(Error::Capacity {
            limit,
            needed,
            budget: config.memory_budget,
        });
    }
    if config.segment_len == 0 {
        return Err(Error::Usage("segment length must be positive".into()));
    }
    if limit < 2 {
        return Ok(PrimeTable {
            limit,
            primes: Vec::new(),
        });
    }

    let base = small_odd_primes(limit.isqrt());
    let mut primes = Vec::with_capacity(estimate_count(limit));
    primes.push(2);

    // next[i] is the next odd multiple of base[i] still to be crossed off.
    let mut next: Vec<u64> = base.iter().map(|&p| p * p).collect();
    let mut segment = vec![true; config.segment_len];
    let span = 2 * config.segment_len as u64;
    let mut low = 3u64;
    while low <= limit {
        let high = limit.min(low + span - 1);
        let len = ((high - low) / 2 + 1) as usize;
        let window = &mut segment[..len];
        window.fill(true);
        for (m, &p) in next.iter_mut().zip(&base) {
            let mut v = *m;
            while v <= high {
                window[((v - low) / 2) as usize] = false;
                v += 2 * p;
            }
            *m = v;
        }
        primes.extend(
            window
                .iter()
                .enumerate()
                .filter(|(_, &keep)| keep)
                .map(|(i, _)| low + 2 * i as u64),
        );
        low += span;
    }
    Ok(PrimeTable { limit, primes })
}

/// Odd primes `≤ n` by a plain sieve; the base set for segmented runs.
fn small_odd_primes(n: u64) -> Vec<u64> {
    if n < 3 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in (3..=n).step_by(2) {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        for j in (i * i..=n).step_by(2 * i) {
            composite[j] = true;
        }
    }
    out
}

fn estimate_count(limit: u64) -> usize {
    if limit < 17 {
        return 7;
    }
    let x = limit as f64;
    (1.25506 * x / x.ln()) as usize + 1
}

/// The asymptotic prime count `n / ln n`.
pub fn pi_approx(n: f64) -> Result<f64> {
    if !(n > 1.0) {
        return Err(Error::Domain(format!("pi_approx needs n > 1, got {n}")));
    }
    Ok(n / n.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn small_limits() {
        assert_eq!(sieve_primes(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert!(sieve_primes(1).unwrap().is_empty());
        assert!(sieve_primes(0).unwrap().is_empty());
        assert_eq!(sieve_primes(2).unwrap().primes(), &[2]);
        assert_eq!(sieve_primes(3).unwrap().primes(), &[2, 3]);
        assert_eq!(sieve_primes(9).unwrap().primes(), &[2, 3, 5, 7]);
    }

    #[test]
    fn matches_trial_division_to_ten_thousand() {
        let oracle: Vec<u64> = (0..=10_000).filter(|&n| trial_division(n)).collect();
        assert_eq!(oracle.len(), 1229);
        let table = sieve_primes(10_000).unwrap();
        assert_eq!(table.primes(), oracle.as_slice());
        for n in 0..=10_000u64 {
            let expected = oracle.iter().filter(|&&p| p <= n).count() as u64;
            assert_eq!(table.prime_count(n).unwrap(), expected, "pi({n})");
        }
    }

    #[test]
    fn tiny_segments_agree_with_default() {
        let config = SieveConfig {
            segment_len: 7,
            ..SieveConfig::default()
        };
        let a = sieve_primes_with(5_000, &config).unwrap();
        let b = sieve_primes(5_000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn segment_boundaries_on_large_run() {
        // Primes straddling the first segment edge at 3 + 2^21.
        let table = sieve_primes(3_000_000).unwrap();
        assert_eq!(table.prime_count(3_000_000).unwrap(), 216_816);
        for &p in table.primes().iter().filter(|&&p| (2_097_000..2_098_000).contains(&p)) {
            assert!(trial_division(p), "{p}");
        }
    }

    #[test]
    fn counts() {
        let table = sieve_primes(10_000).unwrap();
        assert_eq!(table.prime_count(2).unwrap(), 1);
        assert_eq!(table.prime_count(100).unwrap(), 25);
        assert_eq!(table.prime_count(10_000).unwrap(), 1229);
        assert!(matches!(
            table.prime_count(10_001),
            Err(Error::OutOfRange { value: 10_001, .. })
        ));
    }

    #[test]
    fn over_budget_names_the_budget() {
        let config = SieveConfig {
            memory_budget: 1 << 20,
            ..SieveConfig::default()
        };
        let err = sieve_primes_with(100_000_000, &config).unwrap_err();
        assert!(matches!(err, Error::Capacity { budget, .. } if budget == 1 << 20));
        assert!(err.to_string().contains("1048576"));
    }

    #[test]
    fn approx() {
        let e2 = std::f64::consts::E.powi(2);
        assert!((pi_approx(e2).unwrap() - e2 / 2.0).abs() < 1e-12);
        let x = pi_approx(1e4).unwrap();
        assert!((x - 1_085.736_204_758_129).abs() < 1e-9);
        assert!(((x - 1229.0).abs() / 1229.0 - 0.116_569_4).abs() < 1e-6);
        assert!(pi_approx(1.0).is_err());
        assert!(pi_approx(0.5).is_err());
        assert!(pi_approx(f64::NAN).is_err());
    }

    #[test]
    fn cache_round_trip_and_validation() {
        let table = sieve_primes(1_000).unwrap();
        let mut buf = Vec::new();
        table.write_cache(&mut buf).unwrap();
        assert_eq!(&buf[..8], &1_000u64.to_le_bytes());
        assert_eq!(buf.len(), 8 * (1 + 168));
        assert_eq!(PrimeTable::read_cache(buf.as_slice(), "mem").unwrap(), table);

        // swap two entries so the sequence is no longer ascending
        let mut broken = buf.clone();
        broken[8..16].copy_from_slice(&3u64.to_le_bytes());
        broken[16..24].copy_from_slice(&2u64.to_le_bytes());
        let err = PrimeTable::read_cache(broken.as_slice(), "mem").unwrap_err();
        assert!(err.to_string().contains("ascending"), "{err}");

        let mut header = buf.clone();
        header[..8].copy_from_slice(&500u64.to_le_bytes());
        assert!(PrimeTable::read_cache(header.as_slice(), "mem").is_err());

        assert!(PrimeTable::read_cache(&buf[..12], "mem").is_err());
    }

    #[test]
    fn truncation() {
        let table = sieve_primes(100).unwrap();
        let t = table.truncated(10).unwrap();
        assert_eq!(t.primes(), &[2, 3, 5, 7]);
        assert_eq!(t.limit(), 10);
        assert!(table.truncated(101).is_err());
    }
}
