//! The twelve registered corner strategies.

use super::{
    validate_library_for, xor_bits, Bits, BitsSlice, DecodeInput, Demand, Library, Placement,
    Scheme, SchemeId, Signature, Transcript, User,
};
use crate::rational::{rat, rint, rone, rzero};
use crate::Result;

pub(super) fn scheme(id: SchemeId) -> &'static dyn Scheme {
    match id {
        SchemeId::PA => &UncodedBroadcast,
        SchemeId::PB => &HalfSplitExchange,
        SchemeId::PC => &FullCachesBoth,
        SchemeId::PD => &FullCacheUser1,
        SchemeId::PE => &FullCacheUser2,
        SchemeId::PF => &CodedChainUser1,
        SchemeId::PG => &CodedChainUser2,
        SchemeId::PH => &PrivateBoth,
        SchemeId::PI => &Private1Shared2,
        SchemeId::PJ => &Private2Shared1,
        SchemeId::PK => &FullCache2Private1,
        SchemeId::PL => &FullCache1Private2,
    }
}

/// Adjacent-XOR chain length between the delivered and requested index.
pub(super) fn chain_steps(own: u32, delivered: u32) -> usize {
    own.abs_diff(delivered) as usize
}

fn concat_all(lib: &Library) -> Bits {
    let mut out = Bits::with_capacity((lib.n() as usize) * lib.file_bits() as usize);
    for i in 1..=lib.n() {
        out.extend_from_bitslice(lib.file(i));
    }
    out
}

fn stored_file(cache: &BitsSlice, i: u32, file_bits: u64) -> Bits {
    let f = file_bits as usize;
    cache[(i as usize - 1) * f..(i as usize) * f].to_bitvec()
}

/// No caches; both requested files go uncoded over the shared link,
/// user 1's file first.
struct UncodedBroadcast;

impl Scheme for UncodedBroadcast {
    fn id(&self) -> SchemeId {
        SchemeId::PA
    }

    fn signature(&self, _n: u32) -> Signature {
        Signature::from_tuple(rzero(), rzero(), rzero(), rzero(), rint(2))
    }

    fn place(&self, lib: &Library) -> Result<Placement> {
        validate_library_for(self, lib)?;
        Ok(Placement { cache1: Bits::new(), cache2: Bits::new() })
    }

    fn deliver(&self, lib: &Library, demand: Demand) -> Result<Transcript> {
        validate_library_for(self, lib)?;
        demand.validate(lib.n())?;
        let mut common = lib.file(demand.d1).to_bitvec();
        common.extend_from_bitslice(lib.file(demand.d2));
        Ok(Transcript { common, ..Transcript::default() })
    }

    fn decode(&self, input: &DecodeInput<'_>) -> Result<Bits> {
        input.check_against(&self.signature(input.n))?;
        let f = input.file_bits as usize;
        Ok(match input.user {
            User::One => input.common[..f].to_bitvec(),
            User::Two => input.common[f..].to_bitvec(),
        })
    }
}

/// Every file splits into two halves; user k caches half k of everything
/// and the server sends the XOR of the two missing halves.
struct HalfSplitExchange;

impl Scheme for HalfSplitExchange {
    fn id(&self) -> SchemeId {
        SchemeId::PB
    }

    fn signature(&self, n: u32) -> Signature {
        let half_n = rat(n as i64, 2);
        Signature::from_tuple(half_n.clone(), half_n, rzero(), rzero(), rat(1, 2))
    }

    fn file_divisor(&self) -> u64 {
        2
    }

    fn place(&self, lib: &Library) -> Result<Placement> {
        validate_library_for(self, lib)?;
        let h = (lib.file_bits() / 2) as usize;
        let mut cache1 = Bits::new();
        let mut cache2 = Bits::new();
        for i in 1..=lib.n() {
            cache1.extend_from_bitslice(&lib.file(i)[..h]);
            cache2.extend_from_bitslice(&lib.file(i)[h..]);
        }
        Ok(Placement { cache1, cache2 })
    }

    fn deliver(&self, lib: &Library, demand: Demand) -> Result<Transcript> {
        validate_library_for(self, lib)?;
        demand.validate(lib.n())?;
        let h = (lib.file_bits() / 2) as usize;
        let common = xor_bits(&lib.file(demand.d1)[h..], &lib.file(demand.d2)[..h]);
        Ok(Transcript { common, ..Transcript::default() })
    }

    fn decode(&self, input: &DecodeInput<'_>) -> Result<Bits> {
        input.check_against(&self.signature(input.n))?;
        let h = (input.file_bits / 2) as u64;
        let slot = |i: u32| stored_file(input.cache, i, h);
        let (own, other) = match input.user {
            User::One => (input.demand.d1, input.demand.d2),
            User::Two => (input.demand.d2, input.demand.d1),
        };
        let cached_half = slot(own);
        let missing_half = xor_bits(input.common, &slot(other));
        Ok(match input.user {
            User::One => {
                let mut out = cached_half;
                out.extend_from_bitslice(&missing_half);
                out
            }
            User::Two => {
                let mut out = missing_half;
                out.extend_from_bitslice(&cached_half);
                out
            }
        })
    }
}

/// Both caches hold the entire library; nothing is transmitted.
struct FullCachesBoth;

impl Scheme for FullCachesBoth {
    fn id(&self) -> SchemeId {
        SchemeId::PC
    }

    fn signature(&self, n: u32) -> Signature {
        Signature::from_tuple(rint(n as i64), rint(n as i64), rzero(), rzero(), rzero())
    }

    fn place(&self, lib: &Library) -> Result<Placement> {
        validate_library_for(self, lib)?;
        Ok(Placement { cache1: concat_all(lib), cache2: concat_all(lib) })
    }

    fn deliver(&self, lib: &Library, demand: Demand) -> Result<Transcript> {
        validate_library_for(self, lib)?;
        demand.validate(lib.n())?;
        Ok(Transcript::default())
    }

    fn decode(&self, input: &DecodeInput<'_>) -> Result<Bits> {
        input.check_against(&self.signature(input.n))?;
        Ok(stored_file(input.cache, input.demand.of(input.user), input.file_bits))
    }
}

/// User 1 caches everything; user 2's request goes over the shared link.
struct FullCacheUser1;

impl Scheme for FullCacheUser1 {
    fn id(&self) -> SchemeId {
        SchemeId::PD
    }

    fn signature(&self, n: u32) -> Signature {
        Signature::from_tuple(rint(n as i64), rzero(), rzero(), rzero(), rone())
    }

    fn place(&self, lib: &Library) -> Result<Placement> {
        validate_library_for(self, lib)?;
        Ok(Placement { cache1: concat_all(lib), cache2: Bits::new() })
    }

    fn deliver(&self, lib: &Library, demand: Demand) -> Result<Transcript> {
        validate_library_for(self, lib)?;
        demand.validate(lib.n())?;
        Ok(Transcript { common: lib.file(demand.d2).to_bitvec(), ..Transcript::default() })
    }

    fn decode(&self, input: &DecodeInput<'_>) -> Result<Bits> {
        input.check_against(&self.signature(input.n))?;
        Ok(match input.user {
            User::One => stored_file(input.cache, input.demand.d1, input.file_bits),
            User::Two => input.common.to_bitvec(),
        })
    }
}

/// Mirror image of [`FullCacheUser1`].
struct FullCacheUser2;

impl Scheme for FullCacheUser2 {
    fn id(&self) -> SchemeId {
        SchemeId::PE
    }

    fn signature(&self, n: u32) -> Signature {
        Signature::from_tuple(rzero(), rint(n as i64), rzero(), rzero(), rone())
    }

    fn place(&self, lib: &Library) -> Result<Placement> {
        validate_library_for(self, lib)?;
        Ok(Placement { cache1: Bits::new(), cache2: concat_all(lib) })
    }

    fn deliver(&self, lib: &Library, demand: Demand) -> Result<Transcript> {
        validate_library_for(self, lib)?;
        demand.validate(lib.n())?;
        Ok(Transcript { common: lib.file(demand.d1).to_bitvec(), ..Transcript::default() })
    }

    fn decode(&self, input: &DecodeInput<'_>) -> Result<Bits> {
        input.check_against(&self.signature(input.n))?;
        Ok(match input.user {
            User::One => input.common.to_bitvec(),
            User::Two => stored_file(input.cache, input.demand.d2, input.file_bits),
        })
    }
}

/// User 1 caches the XOR of every pair of label-adjacent files and
/// recovers its request by successive cancellation from the delivered
/// file; user 2 reads its file straight off the shared link.
struct CodedChainUser1;

fn chain_decode(cache: &BitsSlice, delivered: &BitsSlice, from: u32, to: u32, file_bits: u64) -> Bits {
    let f = file_bits as usize;
    let block = |i: u32| &cache[(i as usize - 1) * f..(i as usize) * f]; // W_i ^ W_{i+1}
    let mut cur = delivered.to_bitvec();
    let mut j = from;
    while j > to {
        cur = xor_bits(block(j - 1), &cur);
        j -= 1;
    }
    while j < to {
        cur = xor_bits(block(j), &cur);
        j += 1;
    }
    cur
}

impl Scheme for CodedChainUser1 {
    fn id(&self) -> SchemeId {
        SchemeId::PF
    }

    fn signature(&self, n: u32) -> Signature {
        Signature::from_tuple(rint(n as i64 - 1), rzero(), rzero(), rzero(), rone())
    }

    fn place(&self, lib: &Library) -> Result<Placement> {
        validate_library_for(self, lib)?;
        let mut cache1 = Bits::new();
        for i in 1..lib.n() {
            cache1.extend_from_bitslice(&xor_bits(lib.file(i), lib.file(i + 1)));
        }
        Ok(Placement { cache1, cache2: Bits::new() })
    }

    fn deliver(&self, lib: &Library, demand: Demand) -> Result<Transcript> {
        validate_library_for(self, lib)?;
        demand.validate(lib.n())?;
        Ok(Transcript { common: lib.file(demand.d2).to_bitvec(), ..Transcript::default() })
    }

    fn decode(&self, input: &DecodeInput<'_>) -> Result<Bits> {
        input.check_against(&self.signature(input.n))?;
        Ok(match input.user {
            User::One => chain_decode(
                input.cache,
                input.common,
                input.demand.d2,
                input.demand.d1,
                input.file_bits,
            ),
            User::Two => input.common.to_bitvec(),
        })
    }
}

/// Mirror image of [`CodedChainUser1`].
struct CodedChainUser2;

impl Scheme for CodedChainUser2 {
    fn id(&self) -> SchemeId {
        SchemeId::PG
    }

    fn signature(&self, n: u32) -> Signature {
        Signature::from_tuple(rzero(), rint(n as i64 - 1), rzero(), rzero(), rone())
    }

    fn place(&self, lib: &Library) -> Result<Placement> {
        validate_library_for(self, lib)?;
        let mut cache2 = Bits::new();
        for i in 1..lib.n() {
            cache2.extend_from_bitslice(&xor_bits(lib.file(i), lib.file(i + 1)));
        }
        Ok(Placement { cache1: Bits::new(), cache2 })
    }

    fn deliver(&self, lib: &Library, demand: Demand) -> Result<Transcript> {
        validate_library_for(self, lib)?;
        demand.validate(lib.n())?;
        Ok(Transcript { common: lib.file(demand.d1).to_bitvec(), ..Transcript::default() })
    }

    fn decode(&self, input: &DecodeInput<'_>) -> Result<Bits> {
        input.check_against(&self.signature(input.n))?;
        Ok(match input.user {
            User::One => input.common.to_bitvec(),
            User::Two => chain_decode(
                input.cache,
                input.common,
                input.demand.d1,
                input.demand.d2,
                input.file_bits,
            ),
        })
    }
}

/// No caches; each private link carries its user's whole request.
struct PrivateBoth;

impl Scheme for PrivateBoth {
    fn id(&self) -> SchemeId {
        SchemeId::PH
    }

    fn signature(&self, _n: u32) -> Signature {
        Signature::from_tuple(rzero(), rzero(), rone(), rone(), rzero())
    }

    fn place(&self, lib: &Library) -> Result<Placement> {
        validate_library_for(self, lib)?;
        Ok(Placement { cache1: Bits::new(), cache2: Bits::new() })
    }

    fn deliver(&self, lib: &Library, demand: Demand) -> Result<Transcript> {
        validate_library_for(self, lib)?;
        demand.validate(lib.n())?;
        Ok(Transcript {
            common: Bits::new(),
            private1: lib.file(demand.d1).to_bitvec(),
            private2: lib.file(demand.d2).to_bitvec(),
        })
    }

    fn decode(&self, input: &DecodeInput<'_>) -> Result<Bits> {
        input.check_against(&self.signature(input.n))?;
        Ok(input.private.to_bitvec())
    }
}

/// User 1 served over its private link, user 2 over the shared link.
struct Private1Shared2;

impl Scheme for Private1Shared2 {
    fn id(&self) -> SchemeId {
        SchemeId::PI
    }

    fn signature(&self, _n: u32) -> Signature {
        Signature::from_tuple(rzero(), rzero(), rone(), rzero(), rone())
    }

    fn place(&self, lib: &Library) -> Result<Placement> {
        validate_library_for(self, lib)?;
        Ok(Placement { cache1: Bits::new(), cache2: Bits::new() })
    }

    fn deliver(&self, lib: &Library, demand: Demand) -> Result<Transcript> {
        validate_library_for(self, lib)?;
        demand.validate(lib.n())?;
        Ok(Transcript {
            common: lib.file(demand.d2).to_bitvec(),
            private1: lib.file(demand.d1).to_bitvec(),
            private2: Bits::new(),
        })
    }

    fn decode(&self, input: &DecodeInput<'_>) -> Result<Bits> {
        input.check_against(&self.signature(input.n))?;
        Ok(match input.user {
            User::One => input.private.to_bitvec(),
            User::Two => input.common.to_bitvec(),
        })
    }
}

/// Mirror image of [`Private1Shared2`].
struct Private2Shared1;

impl Scheme for Private2Shared1 {
    fn id(&self) -> SchemeId {
        SchemeId::PJ
    }

    fn signature(&self, _n: u32) -> Signature {
        Signature::from_tuple(rzero(), rzero(), rzero(), rone(), rone())
    }

    fn place(&self, lib: &Library) -> Result<Placement> {
        validate_library_for(self, lib)?;
        Ok(Placement { cache1: Bits::new(), cache2: Bits::new() })
    }

    fn deliver(&self, lib: &Library, demand: Demand) -> Result<Transcript> {
        validate_library_for(self, lib)?;
        demand.validate(lib.n())?;
        Ok(Transcript {
            common: lib.file(demand.d1).to_bitvec(),
            private1: Bits::new(),
            private2: lib.file(demand.d2).to_bitvec(),
        })
    }

    fn decode(&self, input: &DecodeInput<'_>) -> Result<Bits> {
        input.check_against(&self.signature(input.n))?;
        Ok(match input.user {
            User::One => input.common.to_bitvec(),
            User::Two => input.private.to_bitvec(),
        })
    }
}

/// User 2 caches the whole library; user 1 is served privately.
struct FullCache2Private1;

impl Scheme for FullCache2Private1 {
    fn id(&self) -> SchemeId {
        SchemeId::PK
    }

    fn signature(&self, n: u32) -> Signature {
        Signature::from_tuple(rzero(), rint(n as i64), rone(), rzero(), rzero())
    }

    fn place(&self, lib: &Library) -> Result<Placement> {
        validate_library_for(self, lib)?;
        Ok(Placement { cache1: Bits::new(), cache2: concat_all(lib) })
    }

    fn deliver(&self, lib: &Library, demand: Demand) -> Result<Transcript> {
        validate_library_for(self, lib)?;
        demand.validate(lib.n())?;
        Ok(Transcript {
            common: Bits::new(),
            private1: lib.file(demand.d1).to_bitvec(),
            private2: Bits::new(),
        })
    }

    fn decode(&self, input: &DecodeInput<'_>) -> Result<Bits> {
        input.check_against(&self.signature(input.n))?;
        Ok(match input.user {
            User::One => input.private.to_bitvec(),
            User::Two => stored_file(input.cache, input.demand.d2, input.file_bits),
        })
    }
}

/// Mirror image of [`FullCache2Private1`].
struct FullCache1Private2;

impl Scheme for FullCache1Private2 {
    fn id(&self) -> SchemeId {
        SchemeId::PL
    }

    fn signature(&self, n: u32) -> Signature {
        Signature::from_tuple(rint(n as i64), rzero(), rzero(), rone(), rzero())
    }

    fn place(&self, lib: &Library) -> Result<Placement> {
        validate_library_for(self, lib)?;
        Ok(Placement { cache1: concat_all(lib), cache2: Bits::new() })
    }

    fn deliver(&self, lib: &Library, demand: Demand) -> Result<Transcript> {
        validate_library_for(self, lib)?;
        demand.validate(lib.n())?;
        Ok(Transcript {
            common: Bits::new(),
            private1: Bits::new(),
            private2: lib.file(demand.d2).to_bitvec(),
        })
    }

    fn decode(&self, input: &DecodeInput<'_>) -> Result<Bits> {
        input.check_against(&self.signature(input.n))?;
        Ok(match input.user {
            User::One => stored_file(input.cache, input.demand.d1, input.file_bits),
            User::Two => input.private.to_bitvec(),
        })
    }
}
