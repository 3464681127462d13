//! Sign analysis of the power-sum sequence s(r) = sum_k v_k^r for one
//! multiset of coefficient values.
//!
//! Exact fourth-root units make s periodic with period 4; everything of
//! magnitude < 1 decays geometrically. The universal quantifier over r is
//! closed residue class by residue class: once the decaying tail drops
//! below the periodic part, the sign is locked in. Anything that escapes
//! that structure is verified exactly (or within a numeric dead band) up
//! to the power cutoff and reported as a bounded certificate.

use crate::number_kernel::PowerSumValue;
use crate::value::ComplexRational;
use num::complex::Complex64;
use num::{BigRational, Signed, ToPrimitive, Zero};

/// Numeric dead band: a numerically computed sum inside the band is never
/// turned into a witness, only into an Undecided result.
pub(crate) const DEAD_BAND: f64 = 1e-9;

/// One coefficient value as seen by the sign engine.
#[derive(Clone, Debug)]
pub(crate) enum AnalysisValue {
    Exact(ComplexRational),
    /// phase * x with x in (0, bound]; phase an exact fourth root of unity.
    /// `val` carries the concrete x when analyzing a specific prime.
    Decay {
        phase: ComplexRational,
        bound: f64,
        val: Option<f64>,
    },
    /// magnitude <= bound with unknown direction (numeric-phase decay in an
    /// abstract prime class).
    Disc { bound: f64 },
    Numeric(Complex64),
}

/// Outcome of analyzing one value multiset.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum TupleOutcome {
    /// s(r) >= 0 certified for every r >= 1.
    NonnegativeComplete,
    /// s(r) >= 0 verified for r <= checked_to; no closure beyond.
    NonnegativeBounded { checked_to: u32 },
    /// s(r) not in [0, infinity) certified at this r.
    Violation { r: u32, value: PowerSumValue },
    /// sign of s(r) could not be decided (numeric dead band or unknown
    /// decay contributions).
    Undecided { r: u32 },
}

pub(crate) fn analyze(values: &[AnalysisValue], r_cap: u32) -> TupleOutcome {
    if values
        .iter()
        .any(|v| matches!(v, AnalysisValue::Numeric(_)))
    {
        return numeric_analysis(values, r_cap);
    }

    let mut units4: Vec<ComplexRational> = Vec::new();
    let mut weird_units: Vec<ComplexRational> = Vec::new();
    let mut small_exact: Vec<ComplexRational> = Vec::new();
    let mut decays: Vec<(ComplexRational, f64, Option<f64>)> = Vec::new();
    let mut discs: Vec<f64> = Vec::new();
    for v in values {
        match v {
            AnalysisValue::Exact(x) => {
                if x.is_zero() {
                    continue;
                }
                if x.is_fourth_root_of_unity() {
                    units4.push(x.clone());
                } else if x.is_unit() {
                    weird_units.push(x.clone());
                } else {
                    small_exact.push(x.clone());
                }
            }
            AnalysisValue::Decay { phase, bound, val } => {
                decays.push((phase.clone(), *bound, *val))
            }
            AnalysisValue::Disc { bound } => discs.push(*bound),
            AnalysisValue::Numeric(_) => unreachable!(),
        }
    }

    let tail = |r: u32| -> f64 {
        let mut t = 0.0f64;
        for x in &small_exact {
            t += norm_upper(x).powi(r as i32);
        }
        for (_, bound, _) in &decays {
            t += bound.powi(r as i32);
        }
        for bound in &discs {
            t += bound.powi(r as i32);
        }
        t * (1.0 + 1e-9) + 1e-300
    };

    let checker = Checker {
        units4: &units4,
        weird_units: &weird_units,
        small_exact: &small_exact,
        decays: &decays,
        discs: &discs,
    };

    // Units outside {1,-1,i,-i} have no usable periodicity; exact checks
    // only, never complete.
    if !weird_units.is_empty() || !discs.is_empty() {
        return bounded_scan(&checker, r_cap);
    }

    // Closure needs every power sum real, i.e. the multiset closed under
    // conjugation (decays pair by equal profile and conjugate phases).
    if !conjugation_closed(&units4, &small_exact, &decays) {
        return bounded_scan(&checker, r_cap);
    }

    // Periodic part per residue class r mod 4 (index 0 <-> r = 4).
    let s_u: Vec<ComplexRational> = (1..=4u64)
        .map(|r| {
            let mut acc = ComplexRational::zero();
            for u in &units4 {
                acc = &acc + &u.pow(r);
            }
            acc
        })
        .collect();
    debug_assert!(s_u.iter().all(|s| s.is_real()), "conjugation closure");

    // Residue closure thresholds. closed_from[rho] = least r in the class
    // from which the sign is locked; None = no closure for that class.
    let mut closed_from: Vec<Option<u32>> = vec![None; 4];
    let mut bad_residue: Vec<bool> = vec![false; 4];
    let search_cap = r_cap.max(256);
    for rho in 0..4usize {
        let su = &s_u[rho];
        if su.is_zero() {
            if residue_zero_closed(rho, &small_exact, &decays) {
                closed_from[rho] = Some(first_r_in_class(rho, 1));
            }
            continue;
        }
        let su_f = su.re.to_f64().unwrap_or(0.0);
        let threshold = su_f.abs() * (1.0 - 1e-12);
        let mut r = first_r_in_class(rho, 1);
        while r <= search_cap {
            if tail(r) < threshold {
                closed_from[rho] = Some(r);
                break;
            }
            r += 4;
        }
        if su.re.is_negative() {
            bad_residue[rho] = true;
        }
    }

    // Walk r ascending: certified-nonnegative classes are skipped, bad
    // classes produce the violation at the first locked r, everything else
    // is checked explicitly. The first conclusive r wins.
    let mut first_undecided: Option<u32> = None;
    let mut pows = checker.start_powers();
    let walk_cap = {
        let locked = (0..4)
            .filter_map(|rho| closed_from[rho])
            .max()
            .unwrap_or(r_cap);
        r_cap.max(locked)
    };
    for r in 1..=walk_cap {
        checker.step_powers(&mut pows);
        let rho = ((r - 1) % 4) as usize;
        let locked = closed_from[rho].map(|from| r >= from).unwrap_or(false);
        if locked {
            if bad_residue[rho] {
                // tail < |s_U| and s_U < 0: certain violation; report the
                // exactly computed value.
                let value = checker.exact_sum(&pows);
                return TupleOutcome::Violation {
                    r,
                    value: PowerSumValue::Exact(value),
                };
            }
            continue;
        }
        if r > r_cap {
            continue;
        }
        match checker.check_at(r, &pows) {
            CheckResult::Nonnegative => {}
            CheckResult::Violation(value) => return TupleOutcome::Violation { r, value },
            CheckResult::NotSure => {
                first_undecided.get_or_insert(r);
            }
        }
    }
    if let Some(r) = first_undecided {
        return TupleOutcome::Undecided { r };
    }
    if (0..4).all(|rho| closed_from[rho].is_some() && !bad_residue[rho]) {
        TupleOutcome::NonnegativeComplete
    } else {
        TupleOutcome::NonnegativeBounded { checked_to: r_cap }
    }
}

fn first_r_in_class(rho: usize, at_least: u32) -> u32 {
    let target = (rho + 1) as u32; // class rho holds r with (r-1) % 4 == rho
    let mut r = target;
    while r < at_least {
        r += 4;
    }
    r
}

fn conjugation_closed(
    units4: &[ComplexRational],
    small_exact: &[ComplexRational],
    decays: &[(ComplexRational, f64, Option<f64>)],
) -> bool {
    fn multiset_conj_closed(values: &[ComplexRational]) -> bool {
        let mut pool: Vec<ComplexRational> = values.to_vec();
        while let Some(v) = pool.pop() {
            if v.is_real() {
                continue;
            }
            let c = v.conj();
            match pool.iter().position(|w| *w == c) {
                Some(i) => {
                    pool.swap_remove(i);
                }
                None => return false,
            }
        }
        true
    }
    if !multiset_conj_closed(units4) || !multiset_conj_closed(small_exact) {
        return false;
    }
    // Decay values conjugate-pair only when phases pair at equal profile.
    let mut pool: Vec<&(ComplexRational, f64, Option<f64>)> = decays.iter().collect();
    while let Some(entry) = pool.pop() {
        let (phase, bound, val) = entry;
        if phase.is_real() {
            continue;
        }
        let conj = phase.conj();
        match pool
            .iter()
            .position(|(p2, b2, v2)| *p2 == conj && b2 == bound && v2 == val)
        {
            Some(i) => {
                pool.swap_remove(i);
            }
            None => return false,
        }
    }
    true
}

/// Closure for a residue class whose periodic part vanishes: the decaying
/// values alone must keep s(r) >= 0 for every r in the class.
fn residue_zero_closed(
    rho: usize,
    small_exact: &[ComplexRational],
    decays: &[(ComplexRational, f64, Option<f64>)],
) -> bool {
    // Complex contributions oscillate in sign; only the all-real case closes.
    if small_exact.iter().any(|v| !v.is_real()) {
        return false;
    }
    if decays.iter().any(|(phase, _, _)| !phase.is_real()) {
        return false;
    }
    let even_class = rho == 1 || rho == 3; // r = 2, 4 mod 4
    if even_class {
        // real^even >= 0 termwise
        return true;
    }
    // Odd r: negatives must be dominated by known positives of at least
    // equal magnitude, term by term.
    if decays.is_empty() {
        // all-exact case: compare squared magnitudes exactly.
        let mut negatives: Vec<BigRational> = Vec::new();
        let mut positives: Vec<BigRational> = Vec::new();
        for v in small_exact {
            if v.re.is_negative() {
                negatives.push(v.norm_sqr());
            } else if v.re.is_positive() {
                positives.push(v.norm_sqr());
            }
        }
        if negatives.is_empty() {
            return true;
        }
        negatives.sort_by(|a, b| b.cmp(a));
        positives.sort_by(|a, b| b.cmp(a));
        return positives.len() >= negatives.len()
            && negatives
                .iter()
                .zip(positives.iter())
                .all(|(n, p)| p >= n);
    }
    // Mixed exact/decay magnitudes: conservative f64 comparison.
    let mut negatives: Vec<f64> = Vec::new();
    let mut positives: Vec<f64> = Vec::new();
    for v in small_exact {
        let mag = norm_upper(v);
        if v.re.is_negative() {
            negatives.push(mag);
        } else if v.re.is_positive() {
            positives.push(mag * (1.0 - 1e-9));
        }
    }
    for (phase, bound, val) in decays {
        if phase.re.is_negative() {
            negatives.push(*bound);
        } else if let Some(x) = val {
            positives.push(x * (1.0 - 1e-9));
        }
        // positive-phase decay with unknown value cannot dominate anything
    }
    if negatives.is_empty() {
        return true;
    }
    negatives.sort_by(|a, b| b.total_cmp(a));
    positives.sort_by(|a, b| b.total_cmp(a));
    positives.len() >= negatives.len()
        && negatives
            .iter()
            .zip(positives.iter())
            .all(|(n, p)| p >= n)
}

struct Checker<'a> {
    units4: &'a [ComplexRational],
    weird_units: &'a [ComplexRational],
    small_exact: &'a [ComplexRational],
    decays: &'a [(ComplexRational, f64, Option<f64>)],
    discs: &'a [f64],
}

struct Powers {
    exact: Vec<ComplexRational>,
    r: u32,
}

enum CheckResult {
    Nonnegative,
    Violation(PowerSumValue),
    NotSure,
}

impl<'a> Checker<'a> {
    fn exact_values(&self) -> impl Iterator<Item = &ComplexRational> {
        self.units4
            .iter()
            .chain(self.weird_units)
            .chain(self.small_exact)
    }

    fn start_powers(&self) -> Powers {
        Powers {
            exact: self.exact_values().map(|_| ComplexRational::one()).collect(),
            r: 0,
        }
    }

    fn step_powers(&self, pows: &mut Powers) {
        for (acc, base) in pows.exact.iter_mut().zip(self.exact_values()) {
            *acc = &*acc * base;
        }
        pows.r += 1;
    }

    fn exact_sum(&self, pows: &Powers) -> ComplexRational {
        let mut acc = ComplexRational::zero();
        for p in &pows.exact {
            acc = &acc + p;
        }
        acc
    }

    /// Decides the sign of s(r) from the exact part plus intervals for the
    /// decay and disc contributions.
    fn check_at(&self, r: u32, pows: &Powers) -> CheckResult {
        debug_assert_eq!(pows.r, r);
        let exact = self.exact_sum(pows);
        if self.decays.is_empty() && self.discs.is_empty() {
            return if !exact.is_real() || exact.re.is_negative() {
                CheckResult::Violation(PowerSumValue::Exact(exact))
            } else {
                CheckResult::Nonnegative
            };
        }
        let re_exact = ratio_f64(&exact.re);
        let im_exact = ratio_f64(&exact.im);
        let widen = 1e-12 * (1.0 + re_exact.abs().max(im_exact.abs())) + 1e-300;
        let mut re_lo = re_exact - widen;
        let mut re_hi = re_exact + widen;
        let mut im_lo = im_exact - widen;
        let mut im_hi = im_exact + widen;
        let mut im_structural_zero = exact.im.is_zero();
        for (phase, bound, val) in self.decays {
            let dir = phase.pow(r as u64);
            let (lo, hi) = match val {
                Some(x) => {
                    let xr = x.powi(r as i32);
                    (xr * (1.0 - 1e-9), xr * (1.0 + 1e-9) + 1e-300)
                }
                None => (0.0, bound.powi(r as i32) * (1.0 + 1e-9) + 1e-300),
            };
            // dir is one of 1, -1, i, -i
            if dir.is_real() {
                if dir.re.is_positive() {
                    re_lo += lo;
                    re_hi += hi;
                } else {
                    re_lo -= hi;
                    re_hi -= lo;
                }
            } else {
                im_structural_zero = false;
                if dir.im.is_positive() {
                    im_lo += lo;
                    im_hi += hi;
                } else {
                    im_lo -= hi;
                    im_hi -= lo;
                }
            }
        }
        for bound in self.discs {
            let b = bound.powi(r as i32) * (1.0 + 1e-9) + 1e-300;
            re_lo -= b;
            re_hi += b;
            im_lo -= b;
            im_hi += b;
            im_structural_zero = false;
        }
        if im_lo > 0.0 || im_hi < 0.0 || re_hi < 0.0 {
            let mid = Complex64::new((re_lo + re_hi) / 2.0, (im_lo + im_hi) / 2.0);
            return CheckResult::Violation(PowerSumValue::Numeric(mid));
        }
        if im_structural_zero && re_lo >= 0.0 {
            return CheckResult::Nonnegative;
        }
        CheckResult::NotSure
    }
}

fn bounded_scan(checker: &Checker<'_>, r_cap: u32) -> TupleOutcome {
    let mut pows = checker.start_powers();
    let mut first_undecided = None;
    for r in 1..=r_cap {
        checker.step_powers(&mut pows);
        match checker.check_at(r, &pows) {
            CheckResult::Nonnegative => {}
            CheckResult::Violation(value) => return TupleOutcome::Violation { r, value },
            CheckResult::NotSure => {
                first_undecided.get_or_insert(r);
            }
        }
    }
    match first_undecided {
        Some(r) => TupleOutcome::Undecided { r },
        None => TupleOutcome::NonnegativeBounded { checked_to: r_cap },
    }
}

fn numeric_analysis(values: &[AnalysisValue], r_cap: u32) -> TupleOutcome {
    let nums: Vec<Complex64> = values
        .iter()
        .map(|v| match v {
            AnalysisValue::Exact(x) => x.to_complex64(),
            AnalysisValue::Decay { val, bound, phase } => {
                phase.to_complex64() * val.unwrap_or(*bound)
            }
            AnalysisValue::Disc { bound } => Complex64::new(*bound, 0.0),
            AnalysisValue::Numeric(z) => *z,
        })
        .collect();
    let mut pows = vec![Complex64::new(1.0, 0.0); nums.len()];
    let mut first_undecided = None;
    for r in 1..=r_cap {
        let mut s = Complex64::new(0.0, 0.0);
        for (acc, base) in pows.iter_mut().zip(&nums) {
            *acc *= base;
            s += *acc;
        }
        if s.im.abs() > DEAD_BAND || s.re < -DEAD_BAND {
            return TupleOutcome::Violation {
                r,
                value: PowerSumValue::Numeric(s),
            };
        }
        if s.re < DEAD_BAND && (s.re != 0.0 || s.im != 0.0) {
            // could be slightly negative or non-real; never a witness
            first_undecided.get_or_insert(r);
        }
    }
    match first_undecided {
        Some(r) => TupleOutcome::Undecided { r },
        None => TupleOutcome::NonnegativeBounded { checked_to: r_cap },
    }
}

fn norm_upper(v: &ComplexRational) -> f64 {
    ratio_f64(&v.norm_sqr()).sqrt() * (1.0 + 1e-12)
}

fn ratio_f64(r: &BigRational) -> f64 {
    crate::value::ratio_to_f64(r)
}
