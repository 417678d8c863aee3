//! Executable corner strategies.
//!
//! Each strategy is a complete placement/delivery/decoding triple for one
//! corner of the achievable region, implemented behind the [`Scheme`]
//! trait and registered by name. Strategies are stateless; a composed
//! code (see [`crate::compose`]) runs several of them side by side on
//! disjoint bit segments of every file.
//!
//! Files are opaque bit strings with explicit lengths. A strategy's
//! resource signature `(m1, m2, rp1, rp2, rc)` is exact per unit file:
//! cache payloads and transcript parts always have exactly
//! `signature * file_bits` bits.

use bitvec::prelude::{BitSlice, BitVec, Msb0};
use num::Zero;
use serde::{Deserialize, Serialize};

use crate::rational::{rat, rint, rone, rzero, to_u64, Rat};
use crate::{Error, Result};

mod points;

/// Bit strings used for files, caches and transcripts.
pub type Bits = BitVec<u8, Msb0>;
/// Borrowed view of a bit string.
pub type BitsSlice = BitSlice<u8, Msb0>;

pub(crate) fn xor_bits(a: &BitsSlice, b: &BitsSlice) -> Bits {
    assert_eq!(a.len(), b.len(), "xor of unequal bit lengths");
    let mut out = a.to_bitvec();
    out ^= b;
    out
}

/// The file library held by the server.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Library {
    n: u32,
    file_bits: u64,
    files: Vec<Bits>,
}

impl Library {
    pub fn new(files: Vec<Bits>) -> Result<Self> {
        if files.len() < 2 {
            return Err(Error::Domain("library needs at least 2 files".into()));
        }
        let file_bits = files[0].len() as u64;
        if file_bits == 0 {
            return Err(Error::Domain("files must be nonempty".into()));
        }
        if files.iter().any(|f| f.len() as u64 != file_bits) {
            return Err(Error::Domain("all files must have equal length".into()));
        }
        Ok(Library { n: files.len() as u32, file_bits, files })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn file_bits(&self) -> u64 {
        self.file_bits
    }

    /// File `i`, 1-based.
    pub fn file(&self, i: u32) -> &BitsSlice {
        &self.files[(i - 1) as usize]
    }

    /// The sub-library made of one bit range of every file.
    pub fn segment(&self, start: u64, len: u64) -> Library {
        let files = self
            .files
            .iter()
            .map(|f| f[start as usize..(start + len) as usize].to_bitvec())
            .collect();
        Library { n: self.n, file_bits: len, files }
    }
}

/// A demand pair: the 1-based file indices requested by the two users.
/// Equal demands are permitted everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demand {
    pub d1: u32,
    pub d2: u32,
}

impl Demand {
    pub fn new(d1: u32, d2: u32) -> Demand {
        Demand { d1, d2 }
    }

    pub fn validate(&self, n: u32) -> Result<()> {
        if self.d1 == 0 || self.d1 > n || self.d2 == 0 || self.d2 > n {
            return Err(Error::Domain(format!(
                "demand ({}, {}) out of range for {n} files",
                self.d1, self.d2
            )));
        }
        Ok(())
    }

    pub fn of(&self, user: User) -> u32 {
        match user {
            User::One => self.d1,
            User::Two => self.d2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum User {
    One,
    Two,
}

impl User {
    pub const BOTH: [User; 2] = [User::One, User::Two];
}

/// Cache contents after placement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub cache1: Bits,
    pub cache2: Bits,
}

impl Placement {
    pub fn cache(&self, user: User) -> &BitsSlice {
        match user {
            User::One => &self.cache1,
            User::Two => &self.cache2,
        }
    }
}

/// What the server sends for one demand.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Transcript {
    pub common: Bits,
    pub private1: Bits,
    pub private2: Bits,
}

impl Transcript {
    pub fn private(&self, user: User) -> &BitsSlice {
        match user {
            User::One => &self.private1,
            User::Two => &self.private2,
        }
    }
}

/// Per-unit-file resource usage of a strategy: cache budgets, private
/// rates and the shared rate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    #[serde(with = "crate::rational::serde_pq")]
    pub m1: Rat,
    #[serde(with = "crate::rational::serde_pq")]
    pub m2: Rat,
    #[serde(with = "crate::rational::serde_pq")]
    pub rp1: Rat,
    #[serde(with = "crate::rational::serde_pq")]
    pub rp2: Rat,
    #[serde(with = "crate::rational::serde_pq")]
    pub rc: Rat,
}

impl Signature {
    pub fn zero() -> Signature {
        Signature { m1: rzero(), m2: rzero(), rp1: rzero(), rp2: rzero(), rc: rzero() }
    }

    pub(crate) fn from_tuple(m1: Rat, m2: Rat, rp1: Rat, rp2: Rat, rc: Rat) -> Signature {
        Signature { m1, m2, rp1, rp2, rc }
    }

    /// Componentwise `self + w * other`.
    pub fn add_scaled(&self, other: &Signature, w: &Rat) -> Signature {
        Signature {
            m1: &self.m1 + w * &other.m1,
            m2: &self.m2 + w * &other.m2,
            rp1: &self.rp1 + w * &other.rp1,
            rp2: &self.rp2 + w * &other.rp2,
            rc: &self.rc + w * &other.rc,
        }
    }

    /// The signature with user roles exchanged.
    pub fn swapped(&self) -> Signature {
        Signature {
            m1: self.m2.clone(),
            m2: self.m1.clone(),
            rp1: self.rp2.clone(),
            rp2: self.rp1.clone(),
            rc: self.rc.clone(),
        }
    }

    pub fn cache(&self, user: User) -> &Rat {
        match user {
            User::One => &self.m1,
            User::Two => &self.m2,
        }
    }

    pub fn private_rate(&self, user: User) -> &Rat {
        match user {
            User::One => &self.rp1,
            User::Two => &self.rp2,
        }
    }
}

/// Exact bit count `coeff * file_bits`; errors if it is not an integer.
pub(crate) fn scaled_bits(coeff: &Rat, file_bits: u64) -> Result<u64> {
    let exact = coeff * rint(file_bits as i64);
    to_u64(&exact).map_err(|_| {
        Error::Sizing(format!("{coeff} of a {file_bits}-bit file is not a whole number of bits"))
    })
}

/// Names of the twelve corner strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SchemeId {
    #[serde(rename = "P_A")]
    PA,
    #[serde(rename = "P_B")]
    PB,
    #[serde(rename = "P_C")]
    PC,
    #[serde(rename = "P_D")]
    PD,
    #[serde(rename = "P_E")]
    PE,
    #[serde(rename = "P_F")]
    PF,
    #[serde(rename = "P_G")]
    PG,
    #[serde(rename = "P_H")]
    PH,
    #[serde(rename = "P_I")]
    PI,
    #[serde(rename = "P_J")]
    PJ,
    #[serde(rename = "P_K")]
    PK,
    #[serde(rename = "P_L")]
    PL,
}

impl SchemeId {
    pub const ALL: [SchemeId; 12] = [
        SchemeId::PA,
        SchemeId::PB,
        SchemeId::PC,
        SchemeId::PD,
        SchemeId::PE,
        SchemeId::PF,
        SchemeId::PG,
        SchemeId::PH,
        SchemeId::PI,
        SchemeId::PJ,
        SchemeId::PK,
        SchemeId::PL,
    ];

    /// The strategy that plays this one's role when the users swap.
    pub fn mirrored(self) -> SchemeId {
        match self {
            SchemeId::PD => SchemeId::PE,
            SchemeId::PE => SchemeId::PD,
            SchemeId::PF => SchemeId::PG,
            SchemeId::PG => SchemeId::PF,
            SchemeId::PI => SchemeId::PJ,
            SchemeId::PJ => SchemeId::PI,
            SchemeId::PK => SchemeId::PL,
            SchemeId::PL => SchemeId::PK,
            other => other,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::PA => "P_A",
            SchemeId::PB => "P_B",
            SchemeId::PC => "P_C",
            SchemeId::PD => "P_D",
            SchemeId::PE => "P_E",
            SchemeId::PF => "P_F",
            SchemeId::PG => "P_G",
            SchemeId::PH => "P_H",
            SchemeId::PI => "P_I",
            SchemeId::PJ => "P_J",
            SchemeId::PK => "P_K",
            SchemeId::PL => "P_L",
        }
    }
}

impl std::fmt::Display for SchemeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<SchemeId> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown scheme {s:?}")))
    }
}

/// Everything a user's decoder may look at: its own cache, the shared
/// transcript and its own private transcript. Never the other user's.
pub struct DecodeInput<'a> {
    pub user: User,
    pub n: u32,
    pub file_bits: u64,
    pub demand: Demand,
    pub cache: &'a BitsSlice,
    pub common: &'a BitsSlice,
    pub private: &'a BitsSlice,
}

impl DecodeInput<'_> {
    /// Rejects structurally inconsistent inputs before any bit is used.
    fn check_against(&self, sig: &Signature) -> Result<()> {
        self.demand.validate(self.n)?;
        let want_cache = scaled_bits(sig.cache(self.user), self.file_bits)?;
        let want_common = scaled_bits(&sig.rc, self.file_bits)?;
        let want_private = scaled_bits(sig.private_rate(self.user), self.file_bits)?;
        let checks = [
            ("cache", self.cache.len() as u64, want_cache),
            ("common transcript", self.common.len() as u64, want_common),
            ("private transcript", self.private.len() as u64, want_private),
        ];
        for (what, got, want) in checks {
            if got != want {
                return Err(Error::Decode(format!("{what} has {got} bits, expected {want}")));
            }
        }
        Ok(())
    }
}

/// A corner caching-and-delivery strategy.
pub trait Scheme: Send + Sync {
    fn id(&self) -> SchemeId;

    /// Exact per-unit-file resource usage for an `n`-file library.
    fn signature(&self, n: u32) -> Signature;

    /// Required divisor of the file size in bits.
    fn file_divisor(&self) -> u64 {
        1
    }

    /// Fills both caches. Deterministic in the library.
    fn place(&self, lib: &Library) -> Result<Placement>;

    /// Produces the transcripts for one demand. Equal demands reuse the
    /// distinct-demand rule unchanged so rates stay demand-invariant.
    fn deliver(&self, lib: &Library, demand: Demand) -> Result<Transcript>;

    /// Reconstructs the requesting user's file from its cache and links.
    fn decode(&self, input: &DecodeInput<'_>) -> Result<Bits>;
}

/// Looks up a strategy by id.
pub fn scheme(id: SchemeId) -> &'static dyn Scheme {
    points::scheme(id)
}

/// All registered strategies, in id order.
pub fn all_schemes() -> impl Iterator<Item = &'static dyn Scheme> {
    SchemeId::ALL.into_iter().map(scheme)
}

pub(crate) fn validate_library_for(s: &dyn Scheme, lib: &Library) -> Result<()> {
    if lib.n() < 2 {
        return Err(Error::Domain("library needs at least 2 files".into()));
    }
    let div = s.file_divisor();
    if lib.file_bits() % div != 0 {
        return Err(Error::Sizing(format!(
            "{} needs the file size divisible by {div}, got {}",
            s.id(),
            lib.file_bits()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Deterministic patterned library for scheme-level tests.
    fn test_library(n: u32, file_bits: u64, salt: u64) -> Library {
        let files = (0..n)
            .map(|i| {
                let mut bits = Bits::new();
                let mut state = salt
                    .wrapping_mul(0x9e37_79b9_7f4a_7c15)
                    .wrapping_add(i as u64 + 1);
                for k in 0..file_bits {
                    state = state
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    bits.push((state >> 63) & 1 == 1 || k % 7 == (i as u64) % 7);
                }
                bits
            })
            .collect();
        Library::new(files).unwrap()
    }

    fn run_and_check(id: SchemeId, lib: &Library, demand: Demand) {
        let s = scheme(id);
        let n = lib.n();
        let f = lib.file_bits();
        let sig = s.signature(n);
        let placement = s.place(lib).unwrap();
        // Budget exactness, not just the budget inequality.
        assert_eq!(
            placement.cache1.len() as u64,
            scaled_bits(&sig.m1, f).unwrap(),
            "{id} cache 1 size"
        );
        assert_eq!(
            placement.cache2.len() as u64,
            scaled_bits(&sig.m2, f).unwrap(),
            "{id} cache 2 size"
        );
        let tr = s.deliver(lib, demand).unwrap();
        assert_eq!(tr.common.len() as u64, scaled_bits(&sig.rc, f).unwrap(), "{id} common len");
        assert_eq!(tr.private1.len() as u64, scaled_bits(&sig.rp1, f).unwrap(), "{id} rp1 len");
        assert_eq!(tr.private2.len() as u64, scaled_bits(&sig.rp2, f).unwrap(), "{id} rp2 len");
        for user in User::BOTH {
            let got = s
                .decode(&DecodeInput {
                    user,
                    n,
                    file_bits: f,
                    demand,
                    cache: placement.cache(user),
                    common: &tr.common,
                    private: tr.private(user),
                })
                .unwrap();
            assert_eq!(
                got.as_bitslice(),
                lib.file(demand.of(user)),
                "{id} user {user:?} demand {demand:?}"
            );
        }
    }

    #[test]
    fn every_scheme_decodes_every_demand() {
        for id in SchemeId::ALL {
            let div = scheme(id).file_divisor();
            for n in 2..=8u32 {
                for f in [div, 3 * div] {
                    let lib = test_library(n, f, (n as u64) << 8 | f);
                    for d1 in 1..=n {
                        for d2 in 1..=n {
                            run_and_check(id, &lib, Demand::new(d1, d2));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn published_signatures() {
        let n = 5;
        let sig = |id: SchemeId| scheme(id).signature(n);
        let t = |a: Rat, b: Rat, c: Rat, d: Rat, e: Rat| Signature::from_tuple(a, b, c, d, e);
        assert_eq!(sig(SchemeId::PA), t(rzero(), rzero(), rzero(), rzero(), rint(2)));
        assert_eq!(sig(SchemeId::PB), t(rat(5, 2), rat(5, 2), rzero(), rzero(), rat(1, 2)));
        assert_eq!(sig(SchemeId::PC), t(rint(5), rint(5), rzero(), rzero(), rzero()));
        assert_eq!(sig(SchemeId::PD), t(rint(5), rzero(), rzero(), rzero(), rone()));
        assert_eq!(sig(SchemeId::PE), t(rzero(), rint(5), rzero(), rzero(), rone()));
        assert_eq!(sig(SchemeId::PF), t(rint(4), rzero(), rzero(), rzero(), rone()));
        assert_eq!(sig(SchemeId::PG), t(rzero(), rint(4), rzero(), rzero(), rone()));
        assert_eq!(sig(SchemeId::PH), t(rzero(), rzero(), rone(), rone(), rzero()));
        assert_eq!(sig(SchemeId::PI), t(rzero(), rzero(), rone(), rzero(), rone()));
        assert_eq!(sig(SchemeId::PJ), t(rzero(), rzero(), rzero(), rone(), rone()));
        assert_eq!(sig(SchemeId::PK), t(rzero(), rint(5), rone(), rzero(), rzero()));
        assert_eq!(sig(SchemeId::PL), t(rint(5), rzero(), rzero(), rone(), rzero()));
    }

    #[test]
    fn chain_decode_stays_short() {
        // The coded-cache decoder walks adjacent blocks from the delivered
        // index to its own; never more than n-1 steps.
        for n in 2..=8u32 {
            for d1 in 1..=n {
                for d2 in 1..=n {
                    let steps = points::chain_steps(d1, d2);
                    assert!(steps <= (n - 1) as usize);
                }
            }
        }
    }

    #[test]
    fn divisibility_enforced() {
        let lib = test_library(4, 3, 1); // odd file size
        assert!(matches!(scheme(SchemeId::PB).place(&lib), Err(Error::Sizing(_))));
        assert!(scheme(SchemeId::PF).place(&lib).is_ok());
    }

    #[test]
    fn decode_rejects_inconsistent_inputs() {
        let lib = test_library(4, 4, 9);
        let s = scheme(SchemeId::PF);
        let placement = s.place(&lib).unwrap();
        let demand = Demand::new(1, 4);
        let tr = s.deliver(&lib, demand).unwrap();
        // Truncated cache must be reported, never silently decoded.
        let bad = &placement.cache1[..8];
        let err = s.decode(&DecodeInput {
            user: User::One,
            n: 4,
            file_bits: 4,
            demand,
            cache: bad,
            common: &tr.common,
            private: &tr.private1,
        });
        assert!(matches!(err, Err(Error::Decode(_))));
    }

    #[test]
    fn ids_round_trip() {
        for id in SchemeId::ALL {
            assert_eq!(id.name().parse::<SchemeId>().unwrap(), id);
            assert_eq!(id.mirrored().mirrored(), id);
        }
        assert!("P_X".parse::<SchemeId>().is_err());
    }
}
