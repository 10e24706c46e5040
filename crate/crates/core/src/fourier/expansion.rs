use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use sha2::{Digest, Sha256};

use super::index::{enumerate_indices, FourierIndex};
use crate::{Error, Result};

/// A Fourier expansion `Σ_T a(T) e^{πi tr(TZ)}` truncated at `tr T ≤ B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    genus: usize,
    weight: Rational64,
    trace_bound: i64,
    label: String,
    coeffs: BTreeMap<FourierIndex, BigInt>,
}

impl Expansion {
    pub fn new(
        genus: usize,
        weight: Rational64,
        trace_bound: i64,
        label: impl Into<String>,
        coeffs: BTreeMap<FourierIndex, BigInt>,
    ) -> Result<Self> {
        if trace_bound < 0 || trace_bound % 2 != 0 {
            return Err(Error::InvalidIndex(format!(
                "trace bound {trace_bound} must be even and nonnegative"
            )));
        }
        if weight < Rational64::zero() {
            return Err(Error::Incompatible(format!("negative weight {weight}")));
        }
        for t in coeffs.keys() {
            if t.genus() != genus {
                return Err(Error::InvalidGenus(format!(
                    "index {t} in an expansion of genus {genus}"
                )));
            }
            if t.trace() > trace_bound {
                return Err(Error::InvalidIndex(format!(
                    "index {t} exceeds trace bound {trace_bound}"
                )));
            }
        }
        Ok(Self {
            genus,
            weight,
            trace_bound,
            label: label.into(),
            coeffs,
        })
    }

    /// The zero form, with an explicit zero at every index.
    pub fn zero(genus: usize, weight: Rational64, trace_bound: i64, label: impl Into<String>) -> Result<Self> {
        let coeffs = enumerate_indices(genus, trace_bound)
            .into_iter()
            .map(|t| (t, BigInt::zero()))
            .collect();
        Self::new(genus, weight, trace_bound, label, coeffs)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn weight(&self) -> Rational64 {
        self.weight
    }

    pub fn trace_bound(&self) -> i64 {
        self.trace_bound
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `a(T)`; indices not stored have coefficient 0.
    pub fn coefficient(&self, t: &FourierIndex) -> BigInt {
        self.coeffs.get(t).cloned().unwrap_or_default()
    }

    pub fn set_coefficient(&mut self, t: FourierIndex, value: BigInt) -> Result<()> {
        if t.genus() != self.genus || t.trace() > self.trace_bound {
            return Err(Error::InvalidIndex(format!(
                "{t} is outside genus {} and trace bound {}",
                self.genus, self.trace_bound
            )));
        }
        self.coeffs.insert(t, value);
        Ok(())
    }

    /// Stored coefficients in graded order.
    pub fn coefficients(&self) -> impl Iterator<Item = (&FourierIndex, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(Zero::is_zero)
    }

    pub fn max_abs_coefficient(&self) -> BigInt {
        self.coeffs.values().map(|c| c.abs()).max().unwrap_or_default()
    }

    /// Plain-text cache: a header, one `upper-triangle: coefficient` line per
    /// stored index in graded order, and a SHA-256 trailer over everything
    /// before it.
    pub fn to_cache_string(&self) -> String {
        let mut body = format!(
            "expansion genus={} weight={}/{} trace_bound={} form={}\n",
            self.genus,
            self.weight.numer(),
            self.weight.denom(),
            self.trace_bound,
            self.label
        );
        for (t, c) in &self.coeffs {
            let upper: Vec<String> = t.upper_triangle().iter().map(|v| v.to_string()).collect();
            let _ = writeln!(body, "{}: {}", upper.join(" "), c);
        }
        let digest = hex(&Sha256::digest(body.as_bytes()));
        let _ = writeln!(body, "checksum sha256={digest}");
        body
    }

    pub fn from_cache_str(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::CacheFormat(msg.to_string());
        let trailer_at = text
            .trim_end_matches('\n')
            .rfind('\n')
            .map(|p| p + 1)
            .ok_or_else(|| bad("missing checksum line"))?;
        let (body, trailer) = text.split_at(trailer_at);
        let expected = trailer
            .trim_end()
            .strip_prefix("checksum sha256=")
            .ok_or_else(|| bad("missing checksum line"))?;
        if hex(&Sha256::digest(body.as_bytes())) != expected {
            return Err(bad("checksum mismatch"));
        }
        let mut lines = body.lines();
        let header = lines.next().ok_or_else(|| bad("empty cache"))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("expansion") {
            return Err(bad("header must start with 'expansion'"));
        }
        let mut field = |name: &str| -> Result<String> {
            fields
                .next()
                .and_then(|f| f.strip_prefix(name))
                .and_then(|f| f.strip_prefix('='))
                .map(str::to_string)
                .ok_or_else(|| Error::CacheFormat(format!("header field '{name}' missing")))
        };
        let genus: usize = field("genus")?.parse().map_err(|_| bad("genus"))?;
        let weight = field("weight")?;
        let (p, q) = weight.split_once('/').ok_or_else(|| bad("weight must be p/q"))?;
        let p: i64 = p.parse().map_err(|_| bad("weight numerator"))?;
        let q: i64 = q.parse().map_err(|_| bad("weight denominator"))?;
        if q == 0 {
            return Err(bad("weight denominator is zero"));
        }
        let trace_bound: i64 = field("trace_bound")?.parse().map_err(|_| bad("trace_bound"))?;
        let label = field("form")?;
        let mut coeffs = BTreeMap::new();
        let mut last: Option<FourierIndex> = None;
        for line in lines {
            let (lhs, rhs) = line.split_once(':').ok_or_else(|| bad("coefficient line without ':'"))?;
            let upper: Vec<i64> = lhs
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad("index entry"))?;
            let t = FourierIndex::from_upper(genus, &upper)?;
            let c: BigInt = rhs.trim().parse().map_err(|_| bad("coefficient"))?;
            if last.as_ref().is_some_and(|l| *l >= t) {
                return Err(bad("indices out of graded order"));
            }
            last = Some(t.clone());
            coeffs.insert(t, c);
        }
        Self::new(genus, Rational64::new(p, q), trace_bound, label, coeffs)
    }

    pub fn write_cache(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_cache_string())?;
        Ok(())
    }

    pub fn read_cache(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_cache_str(&std::fs::read_to_string(path)?)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Coefficient-wise `a − b`.
pub fn expansion_sub(a: &Expansion, b: &Expansion) -> Result<Expansion> {
    if a.genus != b.genus || a.weight != b.weight || a.trace_bound != b.trace_bound {
        return Err(Error::Incompatible(format!(
            "genus {} weight {} bound {} vs genus {} weight {} bound {}",
            a.genus, a.weight, a.trace_bound, b.genus, b.weight, b.trace_bound
        )));
    }
    let mut coeffs = a.coeffs.clone();
    for (t, c) in &b.coeffs {
        *coeffs.entry(t.clone()).or_default() -= c;
    }
    Expansion::new(
        a.genus,
        a.weight,
        a.trace_bound,
        format!("{}-{}", a.label, b.label),
        coeffs,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Expansion {
        let mut e = Expansion::zero(2, Rational64::new(4, 1), 4, "E8").unwrap();
        e.set_coefficient(FourierIndex::zero(2), BigInt::from(1)).unwrap();
        e.set_coefficient(FourierIndex::from_upper(2, &[2, 1, 2]).unwrap(), BigInt::from(13440))
            .unwrap();
        e
    }

    #[test]
    fn cache_round_trip() {
        let e = sample();
        let text = e.to_cache_string();
        assert!(text.starts_with("expansion genus=2 weight=4/1 trace_bound=4 form=E8\n0 0 0: 1\n"));
        assert!(text.contains("2 1 2: 13440\n"));
        assert_eq!(Expansion::from_cache_str(&text).unwrap(), e);
    }

    #[test]
    fn tampered_cache_is_rejected() {
        let text = sample().to_cache_string().replace("13440", "13441");
        assert!(matches!(Expansion::from_cache_str(&text), Err(Error::CacheFormat(_))));
        let no_trailer: String = sample()
            .to_cache_string()
            .lines()
            .filter(|l| !l.starts_with("checksum"))
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(Expansion::from_cache_str(&no_trailer).is_err());
    }

    #[test]
    fn genus_zero_line() {
        let mut e = Expansion::zero(0, Rational64::new(8, 1), 0, "E8E8").unwrap();
        e.set_coefficient(FourierIndex::zero(0), BigInt::from(1)).unwrap();
        let text = e.to_cache_string();
        assert!(text.contains("\n: 1\n"));
        assert_eq!(Expansion::from_cache_str(&text).unwrap(), e);
    }

    #[test]
    fn subtraction() {
        let e = sample();
        assert!(expansion_sub(&e, &e).unwrap().is_zero());
        let z = Expansion::zero(2, Rational64::new(4, 1), 4, "0").unwrap();
        let d = expansion_sub(&e, &z).unwrap();
        assert_eq!(d.coefficients().collect::<Vec<_>>(), e.coefficients().collect::<Vec<_>>());
        let other = Expansion::zero(2, Rational64::new(8, 1), 4, "x").unwrap();
        assert!(expansion_sub(&e, &other).is_err());
    }
}
