//! Memory- and time-sharing composition.
//!
//! Any resource target `(m1, m2, rp1, rp2)` inside the achievable region
//! decomposes into a convex combination of nine derived sharing points,
//! each of which is itself a three-way split of every file between one
//! base strategy (on the part both users may need from the shared link),
//! the all-private strategy (on the part both private links can carry)
//! and either an uncoded-shared or cache-at-user-2 strategy (on the part
//! only the stronger private link can carry). Instantiating the convex
//! weights over an `F`-bit file yields a concrete code whose per-demand
//! transcripts hit the closed-form rates bit for bit.
//!
//! All weight solving is exact rational Gaussian elimination on systems
//! of size at most 3x3; region dispatch happens by testing which
//! candidate rate plane is active, so boundaries are handled exactly.

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rates::{min_shared_rate_any, rate_planes, Plane, PlaneKind};
use crate::rational::{lcm_of_denominators, rint, rone, rzero, serde_pq, to_u64, Rat};
use crate::schemes::{
    scheme, Bits, DecodeInput, Demand, Library, Placement, SchemeId, Signature, Transcript, User,
};
use crate::{Error, Result};
use num::bigint::BigInt;
use num::Integer;

/// Names of the nine derived sharing points. Primed points cache the
/// stronger-private-link part at user 2 instead of sending it uncoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DerivedId {
    A,
    B,
    #[serde(rename = "B'")]
    BPrime,
    #[serde(rename = "C'")]
    CPrime,
    D,
    #[serde(rename = "E'")]
    EPrime,
    F,
    G,
    #[serde(rename = "G'")]
    GPrime,
}

impl DerivedId {
    pub const ALL: [DerivedId; 9] = [
        DerivedId::A,
        DerivedId::B,
        DerivedId::BPrime,
        DerivedId::CPrime,
        DerivedId::D,
        DerivedId::EPrime,
        DerivedId::F,
        DerivedId::G,
        DerivedId::GPrime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DerivedId::A => "A",
            DerivedId::B => "B",
            DerivedId::BPrime => "B'",
            DerivedId::CPrime => "C'",
            DerivedId::D => "D",
            DerivedId::EPrime => "E'",
            DerivedId::F => "F",
            DerivedId::G => "G",
            DerivedId::GPrime => "G'",
        }
    }

    fn base(self) -> SchemeId {
        match self {
            DerivedId::A => SchemeId::PA,
            DerivedId::B | DerivedId::BPrime => SchemeId::PB,
            DerivedId::CPrime => SchemeId::PC,
            DerivedId::D => SchemeId::PD,
            DerivedId::EPrime => SchemeId::PE,
            DerivedId::F => SchemeId::PF,
            DerivedId::G | DerivedId::GPrime => SchemeId::PG,
        }
    }

    /// Primed points park the singly-wanted file parts in user 2's cache;
    /// unprimed points ship them uncoded over the shared link.
    fn third(self) -> SchemeId {
        match self {
            DerivedId::BPrime | DerivedId::CPrime | DerivedId::EPrime | DerivedId::GPrime => {
                SchemeId::PK
            }
            _ => SchemeId::PI,
        }
    }
}

impl std::fmt::Display for DerivedId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A derived sharing point: base constituents with fractions summing to
/// one, plus the resulting exact resource signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedPoint {
    pub id: DerivedId,
    pub parts: Vec<(SchemeId, Rat)>,
    pub signature: Signature,
}

fn derived_point(n: u32, id: DerivedId, l1: &Rat, l2: &Rat, mirrored: bool) -> DerivedPoint {
    let fractions = [
        (id.base(), l1.clone()),
        (SchemeId::PH, rone() - l2),
        (id.third(), l2 - l1),
    ];
    let mut parts = Vec::new();
    let mut signature = Signature::zero();
    for (base, frac) in fractions {
        if frac.is_zero() {
            continue;
        }
        let base = if mirrored { base.mirrored() } else { base };
        signature = signature.add_scaled(&scheme(base).signature(n), &frac);
        parts.push((base, frac));
    }
    DerivedPoint { id, parts, signature }
}

/// The nine derived points for private rates `rp1 >= rp2`.
pub fn nine_points(n: u32, rp1: &Rat, rp2: &Rat) -> Result<Vec<DerivedPoint>> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 files, got {n}")));
    }
    if rp2.is_negative() || rp1 > &rone() || rp2 > rp1 {
        return Err(Error::Domain(format!(
            "private rates must satisfy 0 <= rp2 <= rp1 <= 1, got ({rp1}, {rp2})"
        )));
    }
    let l1 = rone() - rp1;
    let l2 = rone() - rp2;
    Ok(DerivedId::ALL
        .into_iter()
        .map(|id| derived_point(n, id, &l1, &l2, false))
        .collect())
}

/// Cache-plane region labels. M1-M5 carry the five candidate rate
/// formulas; M6 needs no shared transmission at all; M7/M8 waste cache
/// at user 1 resp. user 2 down to the rectangle of useful sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    M1,
    M2,
    M3,
    M4,
    M5,
    M6,
    M7,
    M8,
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let i = *self as u8 + 1;
        write!(f, "M{i}")
    }
}

fn check_target(n: u32, m1: &Rat, m2: &Rat, rp1: &Rat, rp2: &Rat) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 files, got {n}")));
    }
    for (name, m) in [("m1", m1), ("m2", m2)] {
        if m.is_negative() || *m > rint(n as i64) {
            return Err(Error::Domain(format!("{name} must lie in [0, {n}], got {m}")));
        }
    }
    for (name, r) in [("rp1", rp1), ("rp2", rp2)] {
        if r.is_negative() || *r > rone() {
            return Err(Error::Domain(format!("{name} must lie in [0, 1], got {r}")));
        }
    }
    Ok(())
}

/// Region planes in label order, for the given private-rate ordering.
fn region_planes(n: u32, m1: &Rat, m2: &Rat, rp1_ge_rp2: bool) -> Vec<(Region, Plane)> {
    let planes = rate_planes(n, m1, m2);
    let pick = |kind: PlaneKind| planes.iter().find(|p| p.kind == kind).cloned();
    let mut out = Vec::new();
    if n == 2 {
        out.push((Region::M1, pick(PlaneKind::PairCut).unwrap()));
    } else {
        out.push((Region::M1, pick(PlaneKind::Joint12).unwrap()));
        out.push((Region::M2, pick(PlaneKind::Joint21).unwrap()));
    }
    let mixed = if rp1_ge_rp2 { PlaneKind::Mixed1 } else { PlaneKind::Mixed2 };
    out.push((Region::M3, pick(mixed).unwrap()));
    out.push((Region::M4, pick(PlaneKind::Cut2).unwrap()));
    out.push((Region::M5, pick(PlaneKind::Cut1).unwrap()));
    out
}

/// Region of a cache pair for fixed private rates: the lowest-index
/// region whose rate formula attains the rate floor, with the waste
/// regions M6/M7/M8 claiming targets outside the useful rectangle
/// `[0, n*(1-rp1)] x [0, n*(1-rp2)]`.
pub fn region_of(n: u32, m1: &Rat, m2: &Rat, rp1: &Rat, rp2: &Rat) -> Result<Region> {
    check_target(n, m1, m2, rp1, rp2)?;
    let cap1 = rint(n as i64) * (rone() - rp1);
    let cap2 = rint(n as i64) * (rone() - rp2);
    if m1 > &cap1 || m2 > &cap2 {
        return Ok(if m1 >= &cap1 && m2 >= &cap2 {
            Region::M6
        } else if m1 > &cap1 {
            Region::M7
        } else {
            Region::M8
        });
    }
    let floor = min_shared_rate_any(n, m1, m2, rp1, rp2);
    for (region, plane) in region_planes(n, m1, m2, rp1 >= rp2) {
        if plane.at(rp1, rp2) == floor {
            return Ok(region);
        }
    }
    // The floor is zero and no plane touches it: both caches cover the
    // whole useful rectangle, which the branch above already claimed.
    Ok(Region::M6)
}

/// Vertex table of each region in the canonical orientation
/// (`rp1 >= rp2`), as a convex polygon boundary walk.
fn region_vertices(n: u32, region: Region) -> &'static [DerivedId] {
    use DerivedId::*;
    if n == 2 {
        match region {
            Region::M1 => &[A, F, G],
            Region::M3 => &[F, BPrime, GPrime, G],
            Region::M4 => &[F, D, CPrime, BPrime],
            Region::M5 => &[GPrime, BPrime, CPrime, EPrime],
            _ => &[],
        }
    } else {
        match region {
            Region::M1 => &[A, B, F],
            Region::M2 => &[A, B, G],
            Region::M3 => &[B, BPrime, GPrime, G],
            Region::M4 => &[F, D, CPrime, BPrime, B],
            Region::M5 => &[GPrime, BPrime, CPrime, EPrime],
            _ => &[],
        }
    }
}

#[derive(Clone)]
struct Vertex {
    id: DerivedId,
    x: Rat,
    y: Rat,
    rc: Rat,
}

fn dedup_vertices(vs: Vec<Vertex>) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = Vec::new();
    for v in vs {
        if !out.iter().any(|o| o.x == v.x && o.y == v.y) {
            out.push(v);
        }
    }
    out
}

fn try_single(v: &Vertex, tx: &Rat, ty: &Rat) -> Option<Vec<(DerivedId, Rat)>> {
    (&v.x == tx && &v.y == ty).then(|| vec![(v.id, rone())])
}

fn try_segment(a: &Vertex, b: &Vertex, tx: &Rat, ty: &Rat) -> Option<Vec<(DerivedId, Rat)>> {
    let (ex, ey) = (&b.x - &a.x, &b.y - &a.y);
    let (dx, dy) = (tx - &a.x, ty - &a.y);
    if &ex * &dy != &ey * &dx {
        return None; // not collinear
    }
    let w = if !ex.is_zero() {
        &dx / &ex
    } else if !ey.is_zero() {
        &dy / &ey
    } else {
        return None; // coincident endpoints
    };
    if w.is_negative() || w > rone() {
        return None;
    }
    if &a.x + &w * &ex != *tx || &a.y + &w * &ey != *ty {
        return None;
    }
    Some(vec![(a.id, rone() - &w), (b.id, w)])
}

/// Exact 2x2 elimination for barycentric weights inside a triangle.
fn try_triangle(a: &Vertex, b: &Vertex, c: &Vertex, tx: &Rat, ty: &Rat) -> Option<Vec<(DerivedId, Rat)>> {
    let (e1x, e1y) = (&b.x - &a.x, &b.y - &a.y);
    let (e2x, e2y) = (&c.x - &a.x, &c.y - &a.y);
    let det = &e1x * &e2y - &e1y * &e2x;
    if det.is_zero() {
        return None;
    }
    let (dx, dy) = (tx - &a.x, ty - &a.y);
    let w1 = (&dx * &e2y - &dy * &e2x) / &det;
    let w2 = (&e1x * &dy - &e1y * &dx) / &det;
    let w0 = rone() - &w1 - &w2;
    if w0.is_negative() || w1.is_negative() || w2.is_negative() {
        return None;
    }
    Some(vec![(a.id, w0), (b.id, w1), (c.id, w2)])
}

fn solve_in_polygon(vs: &[Vertex], tx: &Rat, ty: &Rat) -> Option<Vec<(DerivedId, Rat)>> {
    match vs.len() {
        0 => None,
        1 => try_single(&vs[0], tx, ty),
        2 => try_segment(&vs[0], &vs[1], tx, ty),
        _ => {
            for i in 1..vs.len() - 1 {
                if let Some(w) = try_triangle(&vs[0], &vs[i], &vs[i + 1], tx, ty) {
                    return Some(w);
                }
            }
            None
        }
    }
}

/// Last-resort exact search over all derived points: smallest support
/// first, deterministic order, weighted rate pinned to the floor.
fn fallback_scan(vs: &[Vertex], tx: &Rat, ty: &Rat, floor: &Rat) -> Option<Vec<(DerivedId, Rat)>> {
    let rc_of = |ws: &[(DerivedId, Rat)]| -> Rat {
        ws.iter()
            .map(|(id, w)| {
                let v = vs.iter().find(|v| v.id == *id).unwrap();
                w * &v.rc
            })
            .fold(rzero(), |acc, x| acc + x)
    };
    for v in vs {
        if let Some(ws) = try_single(v, tx, ty) {
            if rc_of(&ws) == *floor {
                return Some(ws);
            }
        }
    }
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            if let Some(ws) = try_segment(&vs[i], &vs[j], tx, ty) {
                if rc_of(&ws) == *floor {
                    return Some(ws);
                }
            }
        }
    }
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            for k in j + 1..vs.len() {
                if let Some(ws) = try_triangle(&vs[i], &vs[j], &vs[k], tx, ty) {
                    if rc_of(&ws) == *floor {
                        return Some(ws);
                    }
                }
            }
        }
    }
    None
}

/// The cache/private-rate target a plan was asked to hit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareTarget {
    #[serde(with = "serde_pq")]
    pub m1: Rat,
    #[serde(with = "serde_pq")]
    pub m2: Rat,
    #[serde(with = "serde_pq")]
    pub rp1: Rat,
    #[serde(with = "serde_pq")]
    pub rp2: Rat,
}

/// One derived point and its convex weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub point: DerivedId,
    #[serde(with = "serde_pq")]
    pub weight: Rat,
}

/// Convex weights over derived points realizing a resource target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharePlan {
    pub n: u32,
    pub requested: ShareTarget,
    /// Requested target after discarding cache beyond the useful
    /// rectangle; this is what the entries reproduce exactly.
    pub effective: ShareTarget,
    pub region: Region,
    /// True when the plan was solved with user roles exchanged
    /// (`rp1 < rp2`); base constituents are mirrored accordingly.
    pub mirrored: bool,
    pub entries: Vec<PlanEntry>,
    /// Exact shared-link rate the composed code will achieve.
    #[serde(with = "serde_pq")]
    pub predicted_rc: Rat,
}

impl SharePlan {
    fn canonical_levels(&self) -> (Rat, Rat) {
        let (rp1, rp2) = if self.mirrored {
            (&self.effective.rp2, &self.effective.rp1)
        } else {
            (&self.effective.rp1, &self.effective.rp2)
        };
        (rone() - rp1, rone() - rp2)
    }

    /// The derived point behind one entry, with mirroring applied.
    pub fn derived(&self, id: DerivedId) -> DerivedPoint {
        let (l1, l2) = self.canonical_levels();
        let mut p = derived_point(self.n, id, &l1, &l2, self.mirrored);
        if self.mirrored {
            p.signature = p.signature.swapped();
        }
        p
    }

    /// Convex weights collapsed onto base strategies, in id order.
    pub fn base_weights(&self) -> Vec<(SchemeId, Rat)> {
        let mut acc: Vec<(SchemeId, Rat)> = Vec::new();
        for entry in &self.entries {
            for (base, frac) in self.derived(entry.point).parts {
                let w = &entry.weight * &frac;
                if w.is_zero() {
                    continue;
                }
                match acc.iter_mut().find(|(id, _)| *id == base) {
                    Some((_, total)) => *total += w,
                    None => acc.push((base, w)),
                }
            }
        }
        acc.sort_by_key(|(id, _)| *id);
        acc
    }

    /// Exact weighted resource signature of the plan.
    pub fn signature(&self) -> Signature {
        let mut sig = Signature::zero();
        for (id, w) in self.base_weights() {
            sig = sig.add_scaled(&scheme(id).signature(self.n), &w);
        }
        sig
    }
}

/// Solves the memory-sharing weights for a target, n >= 2.
///
/// Cache beyond the useful rectangle is discarded first; the remaining
/// target is expressed as a convex combination of the active region's
/// vertices. Degenerate vertex constellations fall back to an exact
/// search over all nine points.
pub fn share_plan(n: u32, m1: &Rat, m2: &Rat, rp1: &Rat, rp2: &Rat) -> Result<SharePlan> {
    check_target(n, m1, m2, rp1, rp2)?;
    let region = region_of(n, m1, m2, rp1, rp2)?;
    let mirrored = rp1 < rp2;
    let (m1c, m2c, rp1c, rp2c) = if mirrored {
        (m2.clone(), m1.clone(), rp2.clone(), rp1.clone())
    } else {
        (m1.clone(), m2.clone(), rp1.clone(), rp2.clone())
    };
    let l1 = rone() - &rp1c;
    let l2 = rone() - &rp2c;
    let cap1 = rint(n as i64) * &l1;
    let cap2 = rint(n as i64) * &l2;
    let m1e = m1c.clone().min(cap1);
    let m2e = m2c.clone().min(cap2);

    let points: Vec<DerivedPoint> = DerivedId::ALL
        .into_iter()
        .map(|id| derived_point(n, id, &l1, &l2, false))
        .collect();
    let vertex = |id: DerivedId| -> Vertex {
        let p = points.iter().find(|p| p.id == id).unwrap();
        Vertex {
            id,
            x: p.signature.m1.clone(),
            y: p.signature.m2.clone(),
            rc: p.signature.rc.clone(),
        }
    };

    let solve_region = if matches!(region, Region::M6 | Region::M7 | Region::M8) {
        // Region of the clipped target in the canonical orientation.
        region_of(n, &m1e, &m2e, &rp1c, &rp2c)?
    } else if mirrored {
        region_of(n, &m1e, &m2e, &rp1c, &rp2c)?
    } else {
        region
    };

    let region_vs = dedup_vertices(
        region_vertices(n, solve_region).iter().map(|&id| vertex(id)).collect(),
    );
    let floor = min_shared_rate_any(n, &m1e, &m2e, &rp1c, &rp2c);
    let weights = solve_in_polygon(&region_vs, &m1e, &m2e).or_else(|| {
        let all = dedup_vertices(DerivedId::ALL.into_iter().map(vertex).collect());
        fallback_scan(&all, &m1e, &m2e, &floor)
    });
    let Some(weights) = weights else {
        return Err(Error::Infeasible(format!(
            "target ({m1}, {m2}, {rp1}, {rp2}) is not a convex combination of the sharing points"
        )));
    };

    let mut entries: Vec<PlanEntry> = weights
        .into_iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|(point, weight)| PlanEntry { point, weight })
        .collect();
    entries.sort_by_key(|e| e.point);

    let (em1, em2) = if mirrored { (m2e.clone(), m1e.clone()) } else { (m1e.clone(), m2e.clone()) };
    let plan = SharePlan {
        n,
        requested: ShareTarget { m1: m1.clone(), m2: m2.clone(), rp1: rp1.clone(), rp2: rp2.clone() },
        effective: ShareTarget { m1: em1, m2: em2, rp1: rp1.clone(), rp2: rp2.clone() },
        region,
        mirrored,
        entries,
        predicted_rc: floor.clone(),
    };

    // The solved weights must reproduce the clipped target and sit on the
    // lower envelope; anything else is a bug, not an input problem.
    let sig = plan.signature();
    if sig.m1 != plan.effective.m1
        || sig.m2 != plan.effective.m2
        || sig.rp1 != plan.effective.rp1
        || sig.rp2 != plan.effective.rp2
        || sig.rc != floor
    {
        return Err(Error::Internal(format!(
            "share plan mismatch at ({m1}, {m2}, {rp1}, {rp2}): got rc {}, want {floor}",
            sig.rc
        )));
    }
    Ok(plan)
}

/// Least file size every weight and per-strategy divisor accepts.
pub fn min_file_size(plan: &SharePlan) -> Result<u64> {
    let bw = plan.base_weights();
    if bw.is_empty() {
        return Err(Error::Internal("empty share plan".into()));
    }
    let base = lcm_of_denominators(bw.iter().map(|(_, w)| w));
    let mut mult = BigInt::from(1u32);
    for (id, w) in &bw {
        let seg_per_base = w.numer() * (&base / w.denom());
        let div = BigInt::from(scheme(*id).file_divisor());
        let need = &div / seg_per_base.gcd(&div);
        mult = mult.lcm(&need);
    }
    let f = base * mult;
    to_u64(&Rat::from_integer(f))
}

/// One contiguous per-file bit range run by one base strategy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub scheme: SchemeId,
    pub start_bit: u64,
    pub len_bits: u64,
}

/// A concrete code over `F`-bit files realizing a share plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposedCode {
    pub format_version: u32,
    pub n: u32,
    pub file_bits: u64,
    pub plan: SharePlan,
    pub segments: Vec<Segment>,
    /// Achieved resources; equal to the plan's weighted signature.
    pub signature: Signature,
}

pub const CODE_FORMAT_VERSION: u32 = 1;

/// Instantiates a plan over `file_bits`-bit files.
pub fn compose(plan: &SharePlan, file_bits: u64) -> Result<ComposedCode> {
    let unit = min_file_size(plan)?;
    if file_bits == 0 || file_bits % unit != 0 {
        return Err(Error::Sizing(format!(
            "file size {file_bits} is not a positive multiple of the plan's unit {unit}"
        )));
    }
    let mut segments = Vec::new();
    let mut start = 0u64;
    for (id, w) in plan.base_weights() {
        let len = to_u64(&(&w * rint(file_bits as i64)))?;
        if len == 0 {
            continue;
        }
        segments.push(Segment { scheme: id, start_bit: start, len_bits: len });
        start += len;
    }
    if start != file_bits {
        return Err(Error::Internal("segments do not partition the file".into()));
    }
    Ok(ComposedCode {
        format_version: CODE_FORMAT_VERSION,
        n: plan.n,
        file_bits,
        plan: plan.clone(),
        segments,
        signature: plan.signature(),
    })
}

impl ComposedCode {
    fn check_library(&self, lib: &Library) -> Result<()> {
        if lib.n() != self.n || lib.file_bits() != self.file_bits {
            return Err(Error::Domain(format!(
                "library is {} files of {} bits, code wants {} of {}",
                lib.n(),
                lib.file_bits(),
                self.n,
                self.file_bits
            )));
        }
        Ok(())
    }

    /// Per-segment views of the library, in segment order.
    pub fn segment_libraries(&self, lib: &Library) -> Result<Vec<Library>> {
        self.check_library(lib)?;
        Ok(self
            .segments
            .iter()
            .map(|s| lib.segment(s.start_bit, s.len_bits))
            .collect())
    }

    /// Fills both caches by running every segment's strategy.
    pub fn place(&self, lib: &Library) -> Result<Placement> {
        let seg_libs = self.segment_libraries(lib)?;
        let mut cache1 = Bits::new();
        let mut cache2 = Bits::new();
        for (seg, seg_lib) in self.segments.iter().zip(&seg_libs) {
            let p = scheme(seg.scheme).place(seg_lib)?;
            cache1.extend_from_bitslice(&p.cache1);
            cache2.extend_from_bitslice(&p.cache2);
        }
        Ok(Placement { cache1, cache2 })
    }

    /// Transcripts for one demand: the concatenation of every segment's
    /// transcripts, stream by stream.
    pub fn deliver(&self, lib: &Library, demand: Demand) -> Result<Transcript> {
        let seg_libs = self.segment_libraries(lib)?;
        self.deliver_prepared(&seg_libs, demand)
    }

    /// Like [`ComposedCode::deliver`] with the segment libraries reused
    /// across demands.
    pub fn deliver_prepared(&self, seg_libs: &[Library], demand: Demand) -> Result<Transcript> {
        demand.validate(self.n)?;
        let mut tr = Transcript::default();
        for (seg, seg_lib) in self.segments.iter().zip(seg_libs) {
            let part = scheme(seg.scheme).deliver(seg_lib, demand)?;
            tr.common.extend_from_bitslice(&part.common);
            tr.private1.extend_from_bitslice(&part.private1);
            tr.private2.extend_from_bitslice(&part.private2);
        }
        Ok(tr)
    }

    /// Reconstructs one user's requested file from its cache and links.
    pub fn decode(
        &self,
        user: User,
        cache: &crate::schemes::BitsSlice,
        transcript: &Transcript,
        demand: Demand,
    ) -> Result<Bits> {
        demand.validate(self.n)?;
        let mut out = Bits::with_capacity(self.file_bits as usize);
        let (mut cache_at, mut common_at, mut private_at) = (0usize, 0usize, 0usize);
        let private_all = transcript.private(user);
        for seg in &self.segments {
            let s = scheme(seg.scheme);
            let sig = s.signature(self.n);
            let cache_len = crate::schemes::scaled_bits(sig.cache(user), seg.len_bits)? as usize;
            let common_len = crate::schemes::scaled_bits(&sig.rc, seg.len_bits)? as usize;
            let private_len =
                crate::schemes::scaled_bits(sig.private_rate(user), seg.len_bits)? as usize;
            let end_c = cache_at + cache_len;
            let end_x = common_at + common_len;
            let end_p = private_at + private_len;
            if end_c > cache.len() || end_x > transcript.common.len() || end_p > private_all.len() {
                return Err(Error::Decode("transcript or cache shorter than the code's segment map".into()));
            }
            let part = s.decode(&DecodeInput {
                user,
                n: self.n,
                file_bits: seg.len_bits,
                demand,
                cache: &cache[cache_at..end_c],
                common: &transcript.common[common_at..end_x],
                private: &private_all[private_at..end_p],
            })?;
            out.extend_from_bitslice(&part);
            cache_at = end_c;
            common_at = end_x;
            private_at = end_p;
        }
        if cache_at != cache.len() || common_at != transcript.common.len() || private_at != private_all.len() {
            return Err(Error::Decode("cache or transcript longer than the code's segment map".into()));
        }
        Ok(out)
    }

    /// Compact JSON form; parses back byte-identically.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("composed code serializes")
    }

    pub fn from_json(s: &str) -> Result<ComposedCode> {
        let code: ComposedCode =
            serde_json::from_str(s).map_err(|e| Error::Domain(format!("bad code JSON: {e}")))?;
        code.validate()?;
        Ok(code)
    }

    /// Structural checks after deserialization.
    pub fn validate(&self) -> Result<()> {
        if self.format_version != CODE_FORMAT_VERSION {
            return Err(Error::Domain(format!(
                "unsupported code format version {}",
                self.format_version
            )));
        }
        let rebuilt = compose(&self.plan, self.file_bits)?;
        if rebuilt.segments != self.segments || rebuilt.signature != self.signature {
            return Err(Error::Domain("code JSON disagrees with its own plan".into()));
        }
        Ok(())
    }
}
