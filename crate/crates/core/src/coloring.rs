//! Finitely described colorings of the naturals and of the nonzero or
//! positive rationals.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{enumerate_rationals, Rational, RationalMode};
use crate::error::ColoringError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColorId(pub u64);

impl fmt::Display for ColorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    /// Positive integers.
    #[serde(rename = "n")]
    Naturals,
    #[serde(rename = "q-positive")]
    PositiveRationals,
    #[serde(rename = "q-nonzero")]
    NonzeroRationals,
}

impl Domain {
    pub fn contains(self, q: &Rational) -> bool {
        match self {
            Domain::Naturals => q.is_integer() && q.is_positive(),
            Domain::PositiveRationals => q.is_positive(),
            Domain::NonzeroRationals => !q.is_zero(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::Naturals => "n",
            Domain::PositiveRationals => "q-positive",
            Domain::NonzeroRationals => "q-nonzero",
        }
    }

    pub fn parse(s: &str) -> Option<Domain> {
        match s {
            "n" | "N" | "naturals" => Some(Domain::Naturals),
            "q+" | "q-positive" | "positive" => Some(Domain::PositiveRationals),
            "q" | "q*" | "q-nonzero" | "nonzero" => Some(Domain::NonzeroRationals),
            _ => None,
        }
    }

    /// The rational mode matching this domain's multipliers and enumerations.
    pub fn rational_mode(self) -> RationalMode {
        match self {
            Domain::NonzeroRationals => RationalMode::FullNonzero,
            _ => RationalMode::PositiveOnly,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Serializable description from which a [`Coloring`] is rebuilt exactly.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Descriptor {
    /// Integers by residue mod `modulus`; rationals by the residue of the
    /// reduced numerator.
    ModResidue { modulus: u32, domain: Domain },
    /// `n = 3^v * y` with `3 ∤ y`, colored by `y mod 3` (red for 1, blue for 2).
    PadicSec6,
    /// `x ↦ (base(K x))_K` over nonzero `K` with size at most `bound`.
    Product { base: Box<Descriptor>, bound: u64 },
    Table {
        domain: Domain,
        palette: u32,
        default: u32,
        entries: Vec<(Rational, u32)>,
    },
    SeededRandom { domain: Domain, palette: u32, seed: u64 },
    /// `C ↦ base(d x + C d²)` on the naturals.
    Composed {
        base: Box<Descriptor>,
        d: Rational,
        x: Rational,
    },
}

pub const RED: ColorId = ColorId(0);
pub const BLUE: ColorId = ColorId(1);

enum Kind {
    ModResidue(u32),
    PadicSec6,
    Product {
        base: Box<Coloring>,
        multipliers: Vec<Rational>,
        // Some(radix) when the full palette fits in a u64 and colors are
        // encoded positionally; None when tuples are interned on first sight.
        radix: Option<u64>,
        interner: Arc<Mutex<HashMap<Vec<u64>, u64>>>,
    },
    Table {
        map: HashMap<Rational, u32>,
        default: u32,
    },
    SeededRandom {
        palette: u32,
        seed: u64,
    },
    Composed {
        base: Box<Coloring>,
        dx: Rational,
        d2: Rational,
    },
}

/// A total, deterministic map from a domain to `[0, palette_size)`.
pub struct Coloring {
    descriptor: Descriptor,
    domain: Domain,
    palette: u64,
    kind: Kind,
}

impl fmt::Debug for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Coloring")
            .field("descriptor", &self.descriptor)
            .field("palette", &self.palette)
            .finish()
    }
}

impl Clone for Coloring {
    fn clone(&self) -> Self {
        Coloring::from_descriptor(&self.descriptor).expect("descriptor was valid at construction")
    }
}

impl Coloring {
    pub fn from_descriptor(desc: &Descriptor) -> Result<Coloring, ColoringError> {
        let (domain, palette, kind) = match desc {
            Descriptor::ModResidue { modulus, domain } => {
                if *modulus == 0 {
                    return Err(ColoringError::Invalid("modulus must be positive".into()));
                }
                (*domain, *modulus as u64, Kind::ModResidue(*modulus))
            }
            Descriptor::PadicSec6 => (Domain::Naturals, 2, Kind::PadicSec6),
            Descriptor::Product { base, bound } => {
                let base = Coloring::from_descriptor(base)?;
                if base.domain == Domain::Naturals {
                    return Err(ColoringError::Invalid(
                        "product coloring needs a rational base domain".into(),
                    ));
                }
                if *bound == 0 {
                    return Err(ColoringError::Invalid("bound must be positive".into()));
                }
                let multipliers: Vec<Rational> =
                    enumerate_rationals(*bound, base.domain.rational_mode()).collect();
                let radix = base.palette;
                let palette = (0..multipliers.len())
                    .try_fold(1u64, |acc, _| acc.checked_mul(radix));
                let (palette, radix) = match palette {
                    Some(p) => (p, Some(radix)),
                    None => (u64::MAX, None),
                };
                (
                    base.domain,
                    palette,
                    Kind::Product {
                        base: Box::new(base),
                        multipliers,
                        radix,
                        interner: Arc::new(Mutex::new(HashMap::new())),
                    },
                )
            }
            Descriptor::Table {
                domain,
                palette,
                default,
                entries,
            } => {
                if *palette == 0 || default >= palette {
                    return Err(ColoringError::Invalid("table colors exceed palette".into()));
                }
                let mut map = HashMap::with_capacity(entries.len());
                for (q, c) in entries {
                    if !domain.contains(q) {
                        return Err(ColoringError::OutOfDomain {
                            value: q.to_string(),
                            domain: domain.to_string(),
                        });
                    }
                    if c >= palette {
                        return Err(ColoringError::Invalid(format!("color {c} >= palette")));
                    }
                    map.insert(q.clone(), *c);
                }
                (
                    *domain,
                    *palette as u64,
                    Kind::Table {
                        map,
                        default: *default,
                    },
                )
            }
            Descriptor::SeededRandom {
                domain,
                palette,
                seed,
            } => {
                if *palette == 0 {
                    return Err(ColoringError::Invalid("palette must be positive".into()));
                }
                (
                    *domain,
                    *palette as u64,
                    Kind::SeededRandom {
                        palette: *palette,
                        seed: *seed,
                    },
                )
            }
            Descriptor::Composed { base, d, x } => {
                if d.is_zero() {
                    return Err(ColoringError::Invalid("d must be nonzero".into()));
                }
                let base = Coloring::from_descriptor(base)?;
                let palette = base.palette;
                (
                    Domain::Naturals,
                    palette,
                    Kind::Composed {
                        base: Box::new(base),
                        dx: d * x,
                        d2: d * d,
                    },
                )
            }
        };
        Ok(Coloring {
            descriptor: desc.clone(),
            domain,
            palette,
            kind,
        })
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Upper bound on color ids (saturates at `u64::MAX` for huge products).
    pub fn palette_size(&self) -> u64 {
        self.palette
    }

    pub fn color(&self, q: &Rational) -> Result<ColorId, ColoringError> {
        if !self.domain.contains(q) {
            return Err(ColoringError::OutOfDomain {
                value: q.to_string(),
                domain: self.domain.to_string(),
            });
        }
        Ok(match &self.kind {
            Kind::ModResidue(m) => {
                let r = q.numer().mod_floor(&BigInt::from(*m));
                ColorId(r.to_u64().expect("residue below modulus"))
            }
            Kind::PadicSec6 => padic_sec6_color(q.numer()),
            Kind::Product {
                base,
                multipliers,
                radix,
                interner,
            } => {
                let mut tuple = Vec::with_capacity(multipliers.len());
                for k in multipliers {
                    tuple.push(base.color(&(k * q))?.0);
                }
                match radix {
                    Some(r) => ColorId(tuple.iter().fold(0u64, |acc, &c| acc * r + c)),
                    None => {
                        let mut table = interner.lock().expect("interner poisoned");
                        let next = table.len() as u64;
                        ColorId(*table.entry(tuple).or_insert(next))
                    }
                }
            }
            Kind::Table { map, default } => ColorId(*map.get(q).unwrap_or(default) as u64),
            Kind::SeededRandom { palette, seed } => {
                ColorId(stable_hash(*seed, &q.to_string()) % *palette as u64)
            }
            Kind::Composed { base, dx, d2 } => base.color(&(dx + &(d2 * q)))?,
        })
    }

    /// Color of an integer.
    pub fn color_int(&self, n: i64) -> Result<ColorId, ColoringError> {
        self.color(&Rational::from(n))
    }

    /// Human-facing name for a color id.
    pub fn color_name(&self, c: ColorId) -> String {
        match (&self.kind, c) {
            (Kind::PadicSec6, RED) => "red".into(),
            (Kind::PadicSec6, BLUE) => "blue".into(),
            _ => c.to_string(),
        }
    }

    /// Multipliers `K` of a product coloring, in canonical order.
    pub fn multipliers(&self) -> Option<&[Rational]> {
        match &self.kind {
            Kind::Product { multipliers, .. } => Some(multipliers),
            _ => None,
        }
    }
}

/// `stable_hash(seed, s)`: the first eight bytes (little endian) of
/// SHA-256 over the seed's little-endian bytes followed by the UTF-8 of `s`.
pub fn stable_hash(seed: u64, s: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(s.as_bytes());
    let out = h.finalize();
    u64::from_le_bytes(out[..8].try_into().expect("digest has 32 bytes"))
}

fn padic_sec6_color(n: &BigInt) -> ColorId {
    let three = BigInt::from(3);
    let mut y = n.clone();
    loop {
        let (q, r) = y.div_rem(&three);
        if !r.is_zero() {
            return if r == BigInt::from(1) { RED } else { BLUE };
        }
        y = q;
    }
}

pub fn mod_coloring(modulus: u32, domain: Domain) -> Coloring {
    Coloring::from_descriptor(&Descriptor::ModResidue { modulus, domain })
        .expect("positive modulus")
}

pub fn constant_coloring(domain: Domain) -> Coloring {
    mod_coloring(1, domain)
}

pub fn padic_sec6_coloring() -> Coloring {
    Coloring::from_descriptor(&Descriptor::PadicSec6).expect("static descriptor")
}

pub fn seeded_random_coloring(domain: Domain, palette: u32, seed: u64) -> Coloring {
    Coloring::from_descriptor(&Descriptor::SeededRandom {
        domain,
        palette,
        seed,
    })
    .expect("positive palette")
}

/// The auxiliary coloring `x ↦ (base(K x))` over all `K` of size at most
/// `bound`. Colors are the tuple of base colors, encoded positionally when
/// the palette fits in 64 bits and interned lazily otherwise.
pub fn product_coloring(base: &Coloring, bound: u64) -> Result<Coloring, ColoringError> {
    Coloring::from_descriptor(&Descriptor::Product {
        base: Box::new(base.descriptor.clone()),
        bound,
    })
}

/// `C ↦ base(d x + C d²)` on the naturals.
pub fn compose_affine(base: &Coloring, d: &Rational, x: &Rational) -> Result<Coloring, ColoringError> {
    Coloring::from_descriptor(&Descriptor::Composed {
        base: Box::new(base.descriptor.clone()),
        d: d.clone(),
        x: x.clone(),
    })
}

pub fn table_coloring(
    domain: Domain,
    palette: u32,
    entries: impl IntoIterator<Item = (Rational, u32)>,
    default: u32,
) -> Result<Coloring, ColoringError> {
    let mut entries: Vec<(Rational, u32)> = entries.into_iter().collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    entries.dedup_by(|later, earlier| {
        if later.0 == earlier.0 {
            earlier.1 = later.1;
            true
        } else {
            false
        }
    });
    Coloring::from_descriptor(&Descriptor::Table {
        domain,
        palette,
        default,
        entries,
    })
}

/// Named colorings accepted by [`parse_coloring`], with a short description.
pub fn catalog_colorings() -> Vec<(&'static str, &'static str)> {
    vec![
        ("constant", "single color"),
        ("parity", "integers by parity; rationals by numerator parity"),
        ("mod3", "residue mod 3 (of the numerator on rationals)"),
        ("mod:<m>", "residue mod m"),
        ("padic-sec6", "n = 3^v y, 3 ∤ y, colored red if y ≡ 1, blue if y ≡ 2 (mod 3); naturals only"),
        ("random:<palette>:<seed>", "seeded pseudo-random coloring via SHA-256"),
    ]
}

/// Parse a catalog coloring name on the given domain.
pub fn parse_coloring(spec: &str, domain: Domain) -> Result<Descriptor, ColoringError> {
    let bad = || ColoringError::Unknown(spec.to_string());
    let parts: Vec<&str> = spec.split(':').collect();
    let desc = match parts.as_slice() {
        ["constant"] => Descriptor::ModResidue { modulus: 1, domain },
        ["parity"] => Descriptor::ModResidue { modulus: 2, domain },
        ["mod3"] => Descriptor::ModResidue { modulus: 3, domain },
        ["mod", m] => Descriptor::ModResidue {
            modulus: m.parse().map_err(|_| bad())?,
            domain,
        },
        ["padic-sec6"] => {
            if domain != Domain::Naturals {
                return Err(ColoringError::Invalid("padic-sec6 is defined on n".into()));
            }
            Descriptor::PadicSec6
        }
        ["random2"] => Descriptor::SeededRandom { domain, palette: 2, seed: 0 },
        ["random3"] => Descriptor::SeededRandom { domain, palette: 3, seed: 0 },
        ["random", p, s] => Descriptor::SeededRandom {
            domain,
            palette: p.parse().map_err(|_| bad())?,
            seed: s.parse().map_err(|_| bad())?,
        },
        _ => return Err(bad()),
    };
    Coloring::from_descriptor(&desc)?;
    Ok(desc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn mod_coloring_on_naturals() {
        let parity = mod_coloring(2, Domain::Naturals);
        assert_eq!(parity.color_int(7).unwrap(), ColorId(1));
        assert!(parity.color(&q("1/2")).is_err());
        assert!(parity.color_int(0).is_err());
        let qpar = mod_coloring(2, Domain::NonzeroRationals);
        assert_eq!(qpar.color(&q("-3/4")).unwrap(), ColorId(1));
        assert_eq!(qpar.color(&q("2/3")).unwrap(), ColorId(0));
        assert!(qpar.color(&Rational::zero()).is_err());
    }

    #[test]
    fn padic_examples() {
        let c = padic_sec6_coloring();
        assert_eq!(c.color_int(7).unwrap(), RED);
        assert_eq!(c.color_int(6).unwrap(), BLUE);
        assert_eq!(c.color_int(9).unwrap(), RED);
        assert_eq!(c.color_int(2).unwrap(), BLUE);
        assert_eq!(c.color_int(12).unwrap(), RED);
        assert_eq!(c.color_name(RED), "red");
        assert!(c.color(&q("1/3")).is_err());
    }

    #[test]
    fn padic_is_invariant_under_tripling() {
        let c = padic_sec6_coloring();
        for n in 1..=1_000_000i64 {
            assert_eq!(c.color_int(3 * n).unwrap(), c.color_int(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn product_coloring_sizes() {
        let base = seeded_random_coloring(Domain::PositiveRationals, 2, 1);
        let p = product_coloring(&base, 1).unwrap();
        assert_eq!(p.multipliers().unwrap().len(), 1);
        for x in enumerate_rationals(20, RationalMode::PositiveOnly) {
            assert_eq!(p.color(&x).unwrap(), base.color(&x).unwrap());
        }
        let base = seeded_random_coloring(Domain::NonzeroRationals, 2, 1);
        let p = product_coloring(&base, 1).unwrap();
        assert_eq!(p.multipliers().unwrap().len(), 2);
        assert_eq!(p.palette_size(), 4);
        assert!(product_coloring(&mod_coloring(2, Domain::Naturals), 1).is_err());
    }

    #[test]
    fn interned_product_is_consistent() {
        // palette 1000^14 overflows u64, forcing interning
        let base = seeded_random_coloring(Domain::NonzeroRationals, 1000, 3);
        let p = product_coloring(&base, 3).unwrap();
        assert_eq!(p.palette_size(), u64::MAX);
        let xs: Vec<Rational> = enumerate_rationals(6, RationalMode::FullNonzero).collect();
        let first: Vec<ColorId> = xs.iter().map(|x| p.color(x).unwrap()).collect();
        let again: Vec<ColorId> = xs.iter().map(|x| p.color(x).unwrap()).collect();
        assert_eq!(first, again);
    }

    #[test]
    fn compose_affine_substitutes() {
        let parity = mod_coloring(2, Domain::Naturals);
        let g = compose_affine(&parity, &Rational::one(), &Rational::zero()).unwrap();
        for c in 1..50 {
            assert_eq!(g.color_int(c).unwrap(), parity.color_int(c).unwrap());
        }
        let f = seeded_random_coloring(Domain::Naturals, 3, 9);
        let g = compose_affine(&f, &q("2"), &q("3")).unwrap();
        assert_eq!(g.color_int(1).unwrap(), f.color_int(10).unwrap());
        assert!(compose_affine(&f, &Rational::zero(), &q("1")).is_err());
    }

    #[test]
    fn table_lookup_and_default() {
        let t = table_coloring(Domain::Naturals, 2, [], 0).unwrap();
        assert!((1..20).all(|n| t.color_int(n).unwrap() == ColorId(0)));
        let t = table_coloring(Domain::Naturals, 2, [(q("3"), 1)], 0).unwrap();
        assert_eq!(t.color_int(3).unwrap(), ColorId(1));
        assert_eq!(t.color_int(4).unwrap(), ColorId(0));
        assert!(table_coloring(Domain::Naturals, 2, [(q("1/2"), 1)], 0).is_err());
        assert!(table_coloring(Domain::Naturals, 2, [(q("2"), 5)], 0).is_err());
    }

    #[test]
    fn descriptors_round_trip_through_json() {
        let desc = Descriptor::Product {
            base: Box::new(Descriptor::SeededRandom {
                domain: Domain::PositiveRationals,
                palette: 2,
                seed: 7,
            }),
            bound: 2,
        };
        let json = serde_json::to_string(&desc).unwrap();
        assert_eq!(serde_json::from_str::<Descriptor>(&json).unwrap(), desc);
        let a = Coloring::from_descriptor(&desc).unwrap();
        let b = Coloring::from_descriptor(&serde_json::from_str(&json).unwrap()).unwrap();
        for x in enumerate_rationals(15, RationalMode::PositiveOnly) {
            assert_eq!(a.color(&x).unwrap(), b.color(&x).unwrap());
        }
    }

    #[test]
    fn colorings_are_pure() {
        let c = seeded_random_coloring(Domain::NonzeroRationals, 3, 42);
        let x = q("-17/5");
        let first = c.color(&x).unwrap();
        for _ in 0..1000 {
            assert_eq!(c.color(&x).unwrap(), first);
        }
    }

    #[test]
    fn parse_catalog_names() {
        assert!(parse_coloring("parity", Domain::Naturals).is_ok());
        assert!(parse_coloring("random:3:5", Domain::PositiveRationals).is_ok());
        assert!(parse_coloring("padic-sec6", Domain::PositiveRationals).is_err());
        assert!(parse_coloring("nope", Domain::Naturals).is_err());
    }
}
