//! Operating-point planner.
//!
//! Given an instance, picks delivery rates `(rp1, rp2, rc)` on the lower
//! envelope of the achievable set whose worst-case latency equals the
//! closed-form optimum exactly.
//!
//! The search space is one-dimensional: with the stronger private link
//! labelled 1, the candidate rates either lie on the ray
//! `rp2 = (Rp2/Rp1) * rp1` (balancing all three link completion times) or
//! on an edge of the useful rectangle `[0, 1-m1/n] x [0, 1-m2/n]` where
//! one private rate is pinned to its cap. On each segment the relevant
//! ratio of transmitted amounts to capacities is monotone, so a root is
//! bracketed by bisection and then snapped: the active linear branch of
//! the rate floor is substituted and the resulting linear equation is
//! solved exactly in rationals. A failed snap falls back to enumerating
//! every branch root and kink.

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::instance::{Instance, Latency};
use crate::rates::{min_shared_rate_any, optimal_latency, optimal_shared_rate, rate_planes};
use crate::rational::{rint, rone, rzero, serde_pq, Rat};
use crate::{Error, Result};

/// Which branch of the case analysis produced a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanCase {
    /// Balanced point on the capacity ray; all three completion times equal.
    #[serde(rename = "balanced-line-OP")]
    BalancedLineOp,
    /// User 1's private rate pinned to its cap; shared link balances user 2.
    #[serde(rename = "edge-QR")]
    EdgeQr,
    /// Balanced point when the ray leaves through the top of the rectangle.
    #[serde(rename = "balanced-line-OP-mirror")]
    BalancedLineOpMirror,
    /// User 2's private rate pinned to its cap; shared link balances user 1.
    #[serde(rename = "edge-SR")]
    EdgeSr,
    /// No private capacity (or nothing to send): pure shared-link problem.
    #[serde(rename = "trivial-reduction")]
    TrivialReduction,
}

/// An operating point attaining the optimal worst-case latency.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    #[serde(with = "serde_pq")]
    pub rp1: Rat,
    #[serde(with = "serde_pq")]
    pub rp2: Rat,
    #[serde(with = "serde_pq")]
    pub rc: Rat,
    #[serde(rename = "T", with = "serde_pq")]
    pub latency: Rat,
    pub case_label: PlanCase,
}

impl Plan {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plan serializes")
    }
}

/// The four monotone ratio functions solved during planning. Rays carry
/// a slope parameter; edges carry the pinned coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GFunction {
    /// `r / (floor + rp2)` along `rp = (r, slope*r)`; increasing from 0.
    RayPrimary,
    /// `rp2 / (floor + rp1)` along the same ray; increasing from 0.
    RayMirror,
    /// `floor / rp2` along `rp1 = pinned`; decreasing to 0.
    EdgeUser2,
    /// `floor / rp1` along `rp2 = pinned`; decreasing to 0.
    EdgeUser1,
}

impl GFunction {
    fn increasing(self) -> bool {
        matches!(self, GFunction::RayPrimary | GFunction::RayMirror)
    }
}

/// Value of a ratio function: finite or `+inf` (positive amount over a
/// vanished denominator).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum GVal {
    Fin(Rat),
    Inf,
}

/// One ratio function restricted to its segment, with the rate-floor
/// branches reduced to affine functions of the segment parameter.
struct SegmentFn {
    kind: GFunction,
    /// rp1(r) = o1 + u1*r, rp2(r) = o2 + u2*r.
    o1: Rat,
    u1: Rat,
    o2: Rat,
    u2: Rat,
    /// Floor branches as (value at 0, slope); the constant-zero branch is
    /// implicit in the clipping.
    branches: Vec<(Rat, Rat)>,
}

impl SegmentFn {
    fn new(n: u32, m1: &Rat, m2: &Rat, kind: GFunction, param: &Rat) -> SegmentFn {
        let (o1, u1, o2, u2) = match kind {
            GFunction::RayPrimary | GFunction::RayMirror => {
                (rzero(), rone(), rzero(), param.clone())
            }
            GFunction::EdgeUser2 => (param.clone(), rzero(), rzero(), rone()),
            GFunction::EdgeUser1 => (rzero(), rone(), param.clone(), rzero()),
        };
        let branches = rate_planes(n, m1, m2)
            .iter()
            .map(|p| {
                let at0 = &p.c + &p.a1 * &o1 + &p.a2 * &o2;
                let slope = &p.a1 * &u1 + &p.a2 * &u2;
                (at0, slope)
            })
            .collect();
        SegmentFn { kind, o1, u1, o2, u2, branches }
    }

    fn rp1(&self, r: &Rat) -> Rat {
        &self.o1 + &self.u1 * r
    }

    fn rp2(&self, r: &Rat) -> Rat {
        &self.o2 + &self.u2 * r
    }

    fn floor(&self, r: &Rat) -> Rat {
        self.branches
            .iter()
            .map(|(c, s)| c + s * r)
            .fold(rzero(), |acc, v| acc.max(v))
    }

    /// Numerator and denominator of the ratio at `r`, as affine values.
    fn num_den(&self, r: &Rat) -> (Rat, Rat) {
        let fl = self.floor(r);
        match self.kind {
            GFunction::RayPrimary => (self.rp1(r), fl + self.rp2(r)),
            GFunction::RayMirror => (self.rp2(r), fl + self.rp1(r)),
            GFunction::EdgeUser2 => (fl, self.rp2(r)),
            GFunction::EdgeUser1 => (fl, self.rp1(r)),
        }
    }

    fn eval(&self, r: &Rat) -> GVal {
        let (num, den) = self.num_den(r);
        if den.is_zero() {
            if num.is_zero() {
                GVal::Fin(rzero())
            } else {
                GVal::Inf
            }
        } else {
            GVal::Fin(num / den)
        }
    }

    /// Smallest `r` in `[0, hi]` where the floor hits zero. All branches
    /// are nonincreasing along planner segments, so this is the largest
    /// root among branches positive at 0.
    fn floor_vanish(&self, hi: &Rat) -> Result<Rat> {
        let mut r0 = rzero();
        for (c, s) in &self.branches {
            if c.is_positive() {
                if !s.is_negative() {
                    return Err(Error::Internal("rate floor does not vanish on segment".into()));
                }
                r0 = r0.max(-(c / s));
            }
        }
        if &r0 > hi || !self.floor(&r0).is_zero() {
            return Err(Error::Internal("rate floor vanishes outside the segment".into()));
        }
        Ok(r0)
    }

    /// Affine numerator/denominator pair of the ratio when branch `b`
    /// (as (value at 0, slope); the zero branch is `(0, 0)`) is active.
    fn ratio_parts(&self, b: &(Rat, Rat)) -> ((Rat, Rat), (Rat, Rat)) {
        match self.kind {
            GFunction::RayPrimary => (
                (self.o1.clone(), self.u1.clone()),
                (&b.0 + &self.o2, &b.1 + &self.u2),
            ),
            GFunction::RayMirror => (
                (self.o2.clone(), self.u2.clone()),
                (&b.0 + &self.o1, &b.1 + &self.u1),
            ),
            GFunction::EdgeUser2 => (b.clone(), (self.o2.clone(), self.u2.clone())),
            GFunction::EdgeUser1 => (b.clone(), (self.o1.clone(), self.u1.clone())),
        }
    }

    fn branch_active(&self, b: &(Rat, Rat), r: &Rat) -> bool {
        let v = &b.0 + &b.1 * r;
        !v.is_negative() && v == self.floor(r)
    }

    /// All branches including the implicit zero branch.
    fn branches_with_zero(&self) -> Vec<(Rat, Rat)> {
        let mut out = self.branches.clone();
        out.push((rzero(), rzero()));
        out
    }

    /// Solves `g(r) = target` on branch `b`; `None` if the equation is
    /// degenerate or has no solution on the branch.
    fn solve_branch(&self, b: &(Rat, Rat), target: &Rat, hi: &Rat) -> Option<Rat> {
        let ((nc, ns), (dc, ds)) = self.ratio_parts(b);
        let coef = &ns - target * &ds;
        let rhs = target * &dc - &nc;
        if coef.is_zero() {
            return None; // flat stretch; handled by the kink scan
        }
        let r = rhs / coef;
        if r.is_negative() || &r > hi {
            return None;
        }
        if !self.branch_active(b, &r) {
            return None;
        }
        (self.eval(&r) == GVal::Fin(target.clone())).then_some(r)
    }

    /// Every parameter value where the active branch can change, plus the
    /// segment ends.
    fn kink_candidates(&self, hi: &Rat) -> Vec<Rat> {
        let mut out = vec![rzero(), hi.clone()];
        let bs = self.branches_with_zero();
        for i in 0..bs.len() {
            for j in i + 1..bs.len() {
                let dc = &bs[i].0 - &bs[j].0;
                let dsl = &bs[i].1 - &bs[j].1;
                if !dsl.is_zero() {
                    let r = -(dc / dsl);
                    if !r.is_negative() && &r <= hi {
                        out.push(r);
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Finds the smallest `r` in `[0, hi]` with `g(r) = target` exactly
/// (`None` target means `+inf`). Bisection brackets the root; the active
/// linear branch of the rate floor is then solved exactly. If the snap
/// misses (flat stretches, degenerate segments) every branch root and
/// kink is enumerated instead.
pub fn solve_monotone(
    n: u32,
    m1: &Rat,
    m2: &Rat,
    g: GFunction,
    param: &Rat,
    target: Option<&Rat>,
    hi: &Rat,
) -> Result<Rat> {
    let seg = SegmentFn::new(n, m1, m2, g, param);
    if hi.is_negative() {
        return Err(Error::Domain("segment of negative length".into()));
    }
    let inc = g.increasing();
    let Some(target) = target else {
        return if inc {
            if seg.u2.is_positive() || matches!(g, GFunction::RayMirror) {
                Err(Error::Internal("infinite target on a finite ratio".into()))
            } else {
                // Ray with a dead second private link: the ratio blows up
                // exactly where the rate floor vanishes.
                seg.floor_vanish(hi)
            }
        } else {
            Ok(rzero()) // decreasing from +inf
        };
    };
    if target.is_zero() {
        return if inc { Ok(rzero()) } else { seg.floor_vanish(hi) };
    }

    // Bisection to a 2^-48 bracket, exact arithmetic throughout.
    let tv = GVal::Fin(target.clone());
    let bracket_ok = if inc {
        seg.eval(&rzero()) <= tv && seg.eval(hi) >= tv
    } else {
        seg.eval(&rzero()) >= tv && seg.eval(hi) <= tv
    };
    if bracket_ok && !hi.is_zero() {
        let (mut lo, mut hi_b) = (rzero(), hi.clone());
        for _ in 0..48 {
            let mid = (&lo + &hi_b) / rint(2);
            let below = seg.eval(&mid) < tv;
            if below == inc {
                lo = mid;
            } else {
                hi_b = mid;
            }
        }
        let mid = (&lo + &hi_b) / rint(2);
        for b in seg.branches_with_zero() {
            if seg.branch_active(&b, &mid) {
                if let Some(r) = seg.solve_branch(&b, target, hi) {
                    return Ok(r);
                }
            }
        }
    }

    // Exhaustive branch enumeration: solve every branch, scan every kink,
    // keep the smallest exact root.
    let mut best: Option<Rat> = None;
    let mut consider = |r: Rat| {
        if seg.eval(&r) == tv && best.as_ref().is_none_or(|b| &r < b) {
            best = Some(r);
        }
    };
    for b in seg.branches_with_zero() {
        if let Some(r) = seg.solve_branch(&b, target, hi) {
            consider(r);
        }
    }
    for r in seg.kink_candidates(hi) {
        consider(r);
    }
    best.ok_or_else(|| Error::Internal(format!("no root for target {target} on segment")))
}

#[cfg(test)]
pub(crate) fn eval_g(n: u32, m1: &Rat, m2: &Rat, g: GFunction, param: &Rat, r: &Rat) -> Option<Rat> {
    match SegmentFn::new(n, m1, m2, g, param).eval(r) {
        GVal::Fin(v) => Some(v),
        GVal::Inf => None,
    }
}

/// Ratio of two capacities with `x/0 = +inf`.
fn ext_ratio(num: &Rat, den: &Rat) -> GVal {
    if den.is_zero() {
        GVal::Inf
    } else {
        GVal::Fin(num / den)
    }
}

/// Picks delivery rates on the achievable lower envelope whose worst-case
/// latency is optimal, together with the case that produced them.
pub fn plan(inst: &Instance) -> Result<Plan> {
    let optimum = optimal_latency(inst)?;
    let built = plan_point(inst)?;
    let t = [
        Latency::ratio(&built.0, &inst.rp1),
        Latency::ratio(&built.1, &inst.rp2),
        Latency::ratio(&built.2, &inst.rc),
    ]
    .into_iter()
    .max()
    .unwrap()
    .finite()?;
    // The case analysis promises the converse value; check, don't assume.
    if t != optimum {
        return Err(Error::Internal(format!(
            "planned latency {t} differs from the optimum {optimum}"
        )));
    }
    Ok(Plan { rp1: built.0, rp2: built.1, rc: built.2, latency: t, case_label: built.3 })
}

fn plan_point(inst: &Instance) -> Result<(Rat, Rat, Rat, PlanCase)> {
    let n = inst.n;
    let shared_only = optimal_shared_rate(n, &inst.m1, &inst.m2)?;
    if shared_only.is_zero() {
        return Ok((rzero(), rzero(), rzero(), PlanCase::TrivialReduction));
    }
    let mirrored = inst.rp1 < inst.rp2;
    let c = if mirrored { inst.swapped() } else { inst.clone() };
    if c.rp1.is_zero() {
        return Ok((rzero(), rzero(), shared_only, PlanCase::TrivialReduction));
    }

    let nn = rint(n as i64);
    let cap1 = rone() - &c.m1 / &nn;
    let cap2 = rone() - &c.m2 / &nn;
    let rho = &c.rp2 / &c.rp1;

    let (rp1, rp2, case) = if &rho * &cap1 <= cap2 {
        // The capacity ray leaves through the right edge of the rectangle.
        let target = ext_ratio(&c.rp1, &(&c.rc + &c.rp2));
        let seg = SegmentFn::new(n, &c.m1, &c.m2, GFunction::RayPrimary, &rho);
        if target <= seg.eval(&cap1) {
            let t = match &target {
                GVal::Fin(v) => Some(v),
                GVal::Inf => None,
            };
            let r = solve_monotone(n, &c.m1, &c.m2, GFunction::RayPrimary, &rho, t, &cap1)?;
            let rp2 = &rho * &r;
            (r, rp2, PlanCase::BalancedLineOp)
        } else {
            // Pin rp1 to its cap; balance the shared link against user 2.
            let t2 = if c.rp2.is_zero() { None } else { Some(&c.rc / &c.rp2) };
            let s = solve_monotone(
                n,
                &c.m1,
                &c.m2,
                GFunction::EdgeUser2,
                &cap1,
                t2.as_ref(),
                &cap2,
            )?;
            (cap1.clone(), s, PlanCase::EdgeQr)
        }
    } else {
        // The ray leaves through the top edge; rho > 0 here.
        let r_end = &cap2 / &rho;
        let target = &c.rp2 / (&c.rc + &c.rp1);
        let seg = SegmentFn::new(n, &c.m1, &c.m2, GFunction::RayMirror, &rho);
        if GVal::Fin(target.clone()) <= seg.eval(&r_end) {
            let r = solve_monotone(
                n,
                &c.m1,
                &c.m2,
                GFunction::RayMirror,
                &rho,
                Some(&target),
                &r_end,
            )?;
            let rp2 = &rho * &r;
            (r, rp2, PlanCase::BalancedLineOpMirror)
        } else {
            // Pin rp2 to its cap; balance the shared link against user 1.
            let t4 = &c.rc / &c.rp1;
            let s = solve_monotone(
                n,
                &c.m1,
                &c.m2,
                GFunction::EdgeUser1,
                &cap2,
                Some(&t4),
                &cap1,
            )?;
            (s, cap2.clone(), PlanCase::EdgeSr)
        }
    };

    let rc = min_shared_rate_any(n, &c.m1, &c.m2, &rp1, &rp2);
    debug_assert!(rp1 <= cap1 && rp2 <= cap2);
    if mirrored {
        Ok((rp2, rp1, rc, case))
    } else {
        Ok((rp1, rp2, rc, case))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn inst(n: u32, m1: Rat, m2: Rat, rc: Rat, rp1: Rat, rp2: Rat) -> Instance {
        Instance::new(n, m1, m2, rc, rp1, rp2).unwrap()
    }

    #[test]
    fn g_endpoint_identities() {
        let (n, m1, m2) = (4u32, rint(1), rint(2));
        let cap1 = rone() - rat(1, 4);
        let cap2 = rone() - rat(2, 4);
        let rho = rat(1, 2);
        // Ray ratio starts at zero.
        assert_eq!(eval_g(n, &m1, &m2, GFunction::RayPrimary, &rho, &rzero()), Some(rzero()));
        // At the right edge it equals (n - m1)/(n - m2).
        assert_eq!(
            eval_g(n, &m1, &m2, GFunction::RayPrimary, &rho, &cap1),
            Some(rat(3, 2))
        );
        // The pinned-edge ratio vanishes at the far corner.
        assert_eq!(
            eval_g(n, &m1, &m2, GFunction::EdgeUser2, &cap1, &cap2),
            Some(rzero())
        );
        // And blows up at the near corner.
        assert_eq!(eval_g(n, &m1, &m2, GFunction::EdgeUser2, &cap1, &rzero()), None);
    }

    #[test]
    fn trivial_reductions() {
        let i = inst(4, rzero(), rzero(), rint(1), rzero(), rzero());
        let p = plan(&i).unwrap();
        assert_eq!((p.rp1.clone(), p.rp2.clone(), p.rc.clone()), (rzero(), rzero(), rint(2)));
        assert_eq!(p.latency, rint(2));
        assert_eq!(p.case_label, PlanCase::TrivialReduction);

        let i = inst(4, rint(4), rint(4), rzero(), rzero(), rzero());
        let p = plan(&i).unwrap();
        assert_eq!(p.latency, rzero());
    }

    #[test]
    fn all_private_point() {
        let i = inst(4, rzero(), rzero(), rzero(), rint(1), rint(1));
        let p = plan(&i).unwrap();
        assert_eq!((p.rp1.clone(), p.rp2.clone(), p.rc.clone()), (rone(), rone(), rzero()));
        assert_eq!(p.latency, rint(1));
        assert_eq!(p.case_label, PlanCase::BalancedLineOp);
    }

    #[test]
    fn balanced_case_equalizes_ratios() {
        let i = inst(4, rint(1), rint(1), rint(1), rat(1, 2), rat(1, 4));
        let p = plan(&i).unwrap();
        assert_eq!(p.case_label, PlanCase::BalancedLineOp);
        assert_eq!(&p.rp1 / &i.rp1, &p.rc / &i.rc);
        assert_eq!(&p.rp2 / &i.rp2, &p.rc / &i.rc);
    }

    #[test]
    fn pinned_edge_case_contracts() {
        // Strong private link 1: rp1 rides its cap and the latency is the
        // user-2 cut value.
        let i = inst(4, rint(2), rint(1), rint(1), rint(2), rat(1, 2));
        let p = plan(&i).unwrap();
        assert_eq!(p.case_label, PlanCase::EdgeQr);
        assert_eq!(p.rp1, rone() - rat(2, 4));
        let expect = (rone() - rat(1, 4)) / (rint(1) + rat(1, 2));
        assert_eq!(p.latency, expect);
        assert!(&p.rp2 / &i.rp2 >= &p.rp1 / &i.rp1);

        // Mirror-side pinning.
        let i = inst(4, rint(1), rint(3), rat(1, 2), rint(1), rint(1));
        let p = plan(&i).unwrap();
        assert_eq!(p.case_label, PlanCase::EdgeSr);
        assert_eq!(p.rp2, rone() - rat(3, 4));
        let expect = (rone() - rat(1, 4)) / (rat(1, 2) + rint(1));
        assert_eq!(p.latency, expect);
    }

    #[test]
    fn plan_json_shape() {
        let i = inst(4, rzero(), rzero(), rzero(), rint(1), rint(1));
        let p = plan(&i).unwrap();
        let json = p.to_json();
        assert!(json.contains("\"case_label\":\"balanced-line-OP\""));
        assert!(json.contains("\"T\":\"1\""));
        let back: Plan = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    fn rat_in(hi: i64) -> impl Strategy<Value = Rat> {
        (1i64..=6, 0i64..=1).prop_flat_map(move |(q, _)| (0i64..=hi * q).prop_map(move |p| rat(p, q)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(160))]

        #[test]
        fn planned_latency_is_optimal(
            n in 2u32..=6,
            m1 in rat_in(6), m2 in rat_in(6),
            rc in rat_in(2), rp1 in rat_in(2), rp2 in rat_in(2),
        ) {
            let hi = rint(n as i64);
            let (m1, m2) = (m1.min(hi.clone()), m2.min(hi));
            if let Ok(i) = Instance::new(n, m1, m2, rc, rp1, rp2) {
                let p = plan(&i).unwrap();
                prop_assert_eq!(&p.latency, &optimal_latency(&i).unwrap());
                // Lower envelope, inside the useful rectangle.
                prop_assert_eq!(
                    &p.rc,
                    &min_shared_rate_any(i.n, &i.m1, &i.m2, &p.rp1, &p.rp2)
                );
                let nn = rint(i.n as i64);
                prop_assert!(p.rp1 <= rone() - &i.m1 / &nn);
                prop_assert!(p.rp2 <= rone() - &i.m2 / &nn);
            }
        }
    }
}
