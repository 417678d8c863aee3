//! End-to-end execution of composed codes on concrete bit libraries.
//!
//! The simulator never trusts the closed forms: it places caches, runs
//! every demand pair, decodes with nothing but each user's cache and
//! links, and counts transcript bits exactly. Reports state whether the
//! measured rates equal the code's declared signature and whether every
//! decode was bit-exact.

use serde::{Deserialize, Serialize};

use crate::compose::ComposedCode;
use crate::instance::{Instance, Latency};
use crate::rates::optimal_latency;
use crate::rational::{rat, rint, Rat};
use crate::schemes::{Bits, Demand, Library, Placement, Transcript, User};
use crate::{Error, Result};

/// Multiplier/increment of the report PRNG, a 64-bit linear congruential
/// generator with the MMIX constants. Published so that independently
/// written simulators can reproduce every library bit.
pub const LCG_MULTIPLIER: u64 = 6364136223846793005;
pub const LCG_INCREMENT: u64 = 1442695040888963407;

/// The deterministic generator behind seeded libraries and test
/// instances. Each step emits the top byte of the new state.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Lcg {
        Lcg { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(LCG_MULTIPLIER).wrapping_add(LCG_INCREMENT);
        self.state
    }

    pub fn next_byte(&mut self) -> u8 {
        (self.next_u64() >> 56) as u8
    }

    /// Uniform-ish draw from `0..bound` (bound > 0); bias is irrelevant
    /// for test-instance sampling.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}

/// Builds the seeded pseudo-random library: files are drawn in index
/// order, each as `ceil(file_bits/8)` generator bytes truncated to
/// `file_bits` bits.
pub fn make_library(n: u32, file_bits: u64, seed: u64) -> Result<Library> {
    if n < 2 || file_bits == 0 {
        return Err(Error::Domain(format!(
            "library needs n >= 2 files of at least one bit, got n={n}, file_bits={file_bits}"
        )));
    }
    let mut gen = Lcg::new(seed);
    let bytes_per_file = file_bits.div_ceil(8) as usize;
    let files = (0..n)
        .map(|_| {
            let bytes: Vec<u8> = (0..bytes_per_file).map(|_| gen.next_byte()).collect();
            let mut bits = Bits::from_vec(bytes);
            bits.truncate(file_bits as usize);
            bits
        })
        .collect();
    Library::new(files)
}

/// Measured outcome of one demand pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandRow {
    pub d1: u32,
    pub d2: u32,
    pub common_bits: u64,
    pub private1_bits: u64,
    pub private2_bits: u64,
    pub decode1_ok: bool,
    pub decode2_ok: bool,
    pub equal_demand: bool,
}

/// Full record of a simulation over all demand pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub format_version: u32,
    pub n: u32,
    pub file_bits: u64,
    /// One row per demand pair, sorted by `(d1, d2)`.
    pub rows: Vec<DemandRow>,
    /// Worst completion time over the distinct-demand rows for the link
    /// capacities the run was measured against.
    pub worst_case_latency: Latency,
    /// True iff every decode succeeded and every distinct-demand row's
    /// rates equal the code's declared signature exactly.
    pub formula_match: bool,
}

pub const REPORT_FORMAT_VERSION: u32 = 1;

impl SimulationReport {
    /// Fixed-order CSV: one demand per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "d1,d2,common_bits,private1_bits,private2_bits,decode1_ok,decode2_ok,equal_demand\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.d1,
                r.d2,
                r.common_bits,
                r.private1_bits,
                r.private2_bits,
                r.decode1_ok,
                r.decode2_ok,
                r.equal_demand
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn all_decoded(&self) -> bool {
        self.rows.iter().all(|r| r.decode1_ok && r.decode2_ok)
    }
}

/// Decodes both users from a given transcript and reports bit-exactness
/// against the library. Lets tests inject transcript faults.
pub fn decode_and_check(
    code: &ComposedCode,
    placement: &Placement,
    lib: &Library,
    demand: Demand,
    transcript: &Transcript,
) -> (bool, bool, [Option<Bits>; 2]) {
    let mut oks = [false, false];
    let mut files: [Option<Bits>; 2] = [None, None];
    for (k, user) in User::BOTH.into_iter().enumerate() {
        match code.decode(user, placement.cache(user), transcript, demand) {
            Ok(bits) => {
                oks[k] = bits.as_bitslice() == lib.file(demand.of(user));
                files[k] = Some(bits);
            }
            Err(_) => {
                oks[k] = false;
            }
        }
    }
    (oks[0], oks[1], files)
}

fn row_for(
    code: &ComposedCode,
    placement: &Placement,
    seg_libs: &[Library],
    lib: &Library,
    demand: Demand,
) -> Result<(Transcript, [Option<Bits>; 2], DemandRow)> {
    let transcript = code.deliver_prepared(seg_libs, demand)?;
    let (ok1, ok2, files) = decode_and_check(code, placement, lib, demand, &transcript);
    let row = DemandRow {
        d1: demand.d1,
        d2: demand.d2,
        common_bits: transcript.common.len() as u64,
        private1_bits: transcript.private1.len() as u64,
        private2_bits: transcript.private2.len() as u64,
        decode1_ok: ok1,
        decode2_ok: ok2,
        equal_demand: demand.d1 == demand.d2,
    };
    Ok((transcript, files, row))
}

/// Runs one demand end to end: placement, delivery, decoding, accounting.
pub fn run_demand(
    code: &ComposedCode,
    lib: &Library,
    demand: Demand,
) -> Result<(Transcript, [Option<Bits>; 2], DemandRow)> {
    let placement = code.place(lib)?;
    let seg_libs = code.segment_libraries(lib)?;
    row_for(code, &placement, &seg_libs, lib, demand)
}

/// Runs all `n^2` demand pairs and measures the worst-case latency over
/// the distinct-demand rows for the given link capacities. Equal-demand
/// rows are reported but excluded from the worst case.
pub fn run_all(
    code: &ComposedCode,
    lib: &Library,
    rc: &Rat,
    rp1: &Rat,
    rp2: &Rat,
) -> Result<SimulationReport> {
    let placement = code.place(lib)?;
    let seg_libs = code.segment_libraries(lib)?;
    let f = rint(code.file_bits as i64);
    let mut rows = Vec::with_capacity((code.n * code.n) as usize);
    let mut worst = Latency::Finite(Rat::from_integer(0.into()));
    let mut formula_match = true;
    for d1 in 1..=code.n {
        for d2 in 1..=code.n {
            let demand = Demand::new(d1, d2);
            let (_, _, row) = row_for(code, &placement, &seg_libs, lib, demand)?;
            formula_match &= row.decode1_ok && row.decode2_ok;
            if !row.equal_demand {
                let rc_rate = rat(row.common_bits as i64, 1) / &f;
                let rp1_rate = rat(row.private1_bits as i64, 1) / &f;
                let rp2_rate = rat(row.private2_bits as i64, 1) / &f;
                formula_match &= rc_rate == code.signature.rc
                    && rp1_rate == code.signature.rp1
                    && rp2_rate == code.signature.rp2;
                let t = [
                    Latency::ratio(&rc_rate, rc),
                    Latency::ratio(&rp1_rate, rp1),
                    Latency::ratio(&rp2_rate, rp2),
                ]
                .into_iter()
                .max()
                .unwrap();
                worst = worst.max(t);
            }
            rows.push(row);
        }
    }
    Ok(SimulationReport {
        format_version: REPORT_FORMAT_VERSION,
        n: code.n,
        file_bits: code.file_bits,
        rows,
        worst_case_latency: worst,
        formula_match,
    })
}

/// True iff the measured rates match the code's declared signature, every
/// decode is bit-exact, and the measured worst-case latency does not
/// exceed the instance's optimum. Planner-produced codes meet the
/// optimum with equality.
pub fn verify_against_formula(report: &SimulationReport, inst: &Instance) -> bool {
    if !report.formula_match {
        return false;
    }
    match (&report.worst_case_latency, optimal_latency(inst)) {
        (Latency::Finite(t), Ok(opt)) => *t <= opt,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compose::{compose, min_file_size, share_plan};
    use crate::rational::{rone, rzero};
    use crate::schemes::SchemeId;

    #[test]
    fn library_generation_is_deterministic() {
        let a = make_library(4, 8, 0).unwrap();
        let b = make_library(4, 8, 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n(), 4);
        assert_eq!(a.file_bits(), 8);
        let c = make_library(4, 8, 1).unwrap();
        assert_ne!(a, c);
        // Odd bit lengths truncate the final byte.
        let d = make_library(3, 5, 7).unwrap();
        assert_eq!(d.file(1).len(), 5);
    }

    fn single_scheme_code(id: SchemeId, n: u32) -> ComposedCode {
        let sig = crate::schemes::scheme(id).signature(n);
        let plan = share_plan(n, &sig.m1, &sig.m2, &sig.rp1, &sig.rp2).unwrap();
        compose(&plan, min_file_size(&plan).unwrap()).unwrap()
    }

    #[test]
    fn chain_scheme_sends_the_other_request() {
        // Coded cache at user 1: the shared link carries user 2's file.
        let code = single_scheme_code(SchemeId::PF, 4);
        let lib = make_library(4, code.file_bits, 11).unwrap();
        let (tr, files, row) = run_demand(&code, &lib, Demand::new(1, 4)).unwrap();
        assert_eq!(tr.common.as_bitslice(), lib.file(4));
        assert!(row.decode1_ok && row.decode2_ok);
        assert_eq!(files[0].as_ref().unwrap().as_bitslice(), lib.file(1));
    }

    #[test]
    fn full_cache_code_sends_nothing() {
        let code = single_scheme_code(SchemeId::PC, 4);
        let lib = make_library(4, code.file_bits, 3).unwrap();
        let (tr, _, row) = run_demand(&code, &lib, Demand::new(2, 3)).unwrap();
        assert_eq!(tr.common.len() + tr.private1.len() + tr.private2.len(), 0);
        assert!(row.decode1_ok && row.decode2_ok);
    }

    #[test]
    fn run_all_enumerates_every_demand() {
        let plan = share_plan(4, &rint(1), &rint(1), &rzero(), &rzero()).unwrap();
        let code = compose(&plan, min_file_size(&plan).unwrap()).unwrap();
        let lib = make_library(4, code.file_bits, 5).unwrap();
        let report = run_all(&code, &lib, &rone(), &rzero(), &rzero()).unwrap();
        assert_eq!(report.rows.len(), 16);
        assert!(report.all_decoded());
        assert!(report.formula_match);
        // Shared rate 5/4 over capacity 1.
        assert_eq!(report.worst_case_latency, Latency::Finite(rat(5, 4)));
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 17);
        assert!(csv.starts_with("d1,d2,common_bits"));
    }

    #[test]
    fn corrupted_transcript_is_flagged_not_hidden() {
        let code = single_scheme_code(SchemeId::PB, 4);
        let lib = make_library(4, code.file_bits, 9).unwrap();
        let placement = code.place(&lib).unwrap();
        let demand = Demand::new(1, 2);
        let mut tr = code.deliver(&lib, demand).unwrap();
        let flipped = !tr.common[0];
        tr.common.set(0, flipped);
        let (ok1, ok2, _) = decode_and_check(&code, &placement, &lib, demand, &tr);
        assert!(!ok1 || !ok2);
    }

    #[test]
    fn report_json_round_trips() {
        let code = single_scheme_code(SchemeId::PH, 3);
        let lib = make_library(3, code.file_bits, 2).unwrap();
        let report = run_all(&code, &lib, &rzero(), &rone(), &rone()).unwrap();
        let json = report.to_json();
        let back: SimulationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.to_json(), json);
    }
}
