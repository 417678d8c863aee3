//! Problem instances and latency values.

use num::Signed;
use serde::{Deserialize, Serialize};

use crate::rational::{fmt_rat, rint, serde_pq, Rat};
use crate::{Error, Result};

/// A two-user delivery problem: `n` files of unit size, per-user cache
/// budgets `m1`/`m2` in file units, and link capacities in files per unit
/// time (`rc` shared, `rp1`/`rp2` private).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub n: u32,
    #[serde(with = "serde_pq")]
    pub m1: Rat,
    #[serde(with = "serde_pq")]
    pub m2: Rat,
    #[serde(with = "serde_pq")]
    pub rc: Rat,
    #[serde(with = "serde_pq")]
    pub rp1: Rat,
    #[serde(with = "serde_pq")]
    pub rp2: Rat,
    /// True when a cache budget larger than the library was clipped to `n`.
    #[serde(default)]
    pub clipped: bool,
}

impl Instance {
    /// Validates and normalizes an instance. Cache budgets above `n` are
    /// clipped to `n` (the extra cache cannot help) and flagged. A user
    /// with no shared and no private capacity is unservable unless its
    /// cache already holds the whole library.
    pub fn new(n: u32, m1: Rat, m2: Rat, rc: Rat, rp1: Rat, rp2: Rat) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("need at least 2 files, got {n}")));
        }
        for (name, m) in [("m1", &m1), ("m2", &m2)] {
            if m.is_negative() {
                return Err(Error::Domain(format!("{name} must be nonnegative, got {}", fmt_rat(m))));
            }
        }
        for (name, r) in [("rc", &rc), ("rp1", &rp1), ("rp2", &rp2)] {
            if r.is_negative() {
                return Err(Error::Domain(format!("{name} must be nonnegative, got {}", fmt_rat(r))));
            }
        }
        let nn = rint(n as i64);
        let clipped = m1 > nn || m2 > nn;
        let m1 = m1.min(nn.clone());
        let m2 = m2.min(nn.clone());
        let zero = Rat::from_integer(0.into());
        if rc == zero && rp1 == zero && m1 < nn {
            return Err(Error::Infeasible(
                "user 1 has no link capacity and an incomplete cache".into(),
            ));
        }
        if rc == zero && rp2 == zero && m2 < nn {
            return Err(Error::Infeasible(
                "user 2 has no link capacity and an incomplete cache".into(),
            ));
        }
        Ok(Instance { n, m1, m2, rc, rp1, rp2, clipped })
    }

    /// The same problem with the user roles exchanged.
    pub fn swapped(&self) -> Instance {
        Instance {
            n: self.n,
            m1: self.m2.clone(),
            m2: self.m1.clone(),
            rc: self.rc.clone(),
            rp1: self.rp2.clone(),
            rp2: self.rp1.clone(),
            clipped: self.clipped,
        }
    }
}

/// Delivery rates actually sent for a demand, in file units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateTriple {
    #[serde(with = "serde_pq")]
    pub rp1: Rat,
    #[serde(with = "serde_pq")]
    pub rp2: Rat,
    #[serde(with = "serde_pq")]
    pub rc: Rat,
}

/// A worst-case delivery latency. `x/0` with `x > 0` is unbounded;
/// `0/0` counts as zero (an unused link costs nothing).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Latency {
    Finite(Rat),
    Unbounded,
}

impl Latency {
    /// Completion time of `amount` over a link of capacity `cap`.
    pub fn ratio(amount: &Rat, cap: &Rat) -> Latency {
        use num::Zero;
        if amount.is_zero() {
            Latency::Finite(Rat::zero())
        } else if cap.is_zero() {
            Latency::Unbounded
        } else {
            Latency::Finite(amount / cap)
        }
    }

    pub fn finite(self) -> Result<Rat> {
        match self {
            Latency::Finite(t) => Ok(t),
            Latency::Unbounded => Err(Error::Infeasible("latency is unbounded".into())),
        }
    }
}

impl std::fmt::Display for Latency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Latency::Finite(t) => write!(f, "{t}"),
            Latency::Unbounded => write!(f, "inf"),
        }
    }
}

impl Serialize for Latency {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_string().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Latency {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "inf" {
            return Ok(Latency::Unbounded);
        }
        s.parse::<Rat>()
            .map(Latency::Finite)
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rzero};

    #[test]
    fn clips_oversized_caches() {
        let inst = Instance::new(4, rint(7), rat(1, 2), rint(1), rzero(), rzero()).unwrap();
        assert!(inst.clipped);
        assert_eq!(inst.m1, rint(4));
        assert_eq!(inst.m2, rat(1, 2));
    }

    #[test]
    fn rejects_unservable_users() {
        let err = Instance::new(4, rint(4), rint(1), rzero(), rzero(), rzero());
        assert!(matches!(err, Err(Error::Infeasible(_))));
        // A full cache excuses a dead link.
        assert!(Instance::new(4, rint(1), rint(4), rzero(), rint(1), rzero()).is_ok());
    }

    #[test]
    fn latency_division_conventions() {
        assert_eq!(Latency::ratio(&rzero(), &rzero()), Latency::Finite(rzero()));
        assert_eq!(Latency::ratio(&rint(1), &rzero()), Latency::Unbounded);
        assert_eq!(Latency::ratio(&rint(1), &rint(2)), Latency::Finite(rat(1, 2)));
        assert!(Latency::Unbounded > Latency::Finite(rint(1000)));
    }
}
