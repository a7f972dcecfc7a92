//! Constructive certificates that a horizontal fibre contains an interval.
//!
//! For a dyadic y whose binary expansion keeps its zero count at or above
//! 0.4 n from position N on, every x in `[0, 1/(56 * 2^N)]` belongs to the
//! fibre at height y. The witness is explicit: expand `2^N x` greedily in
//! base 8, read the digits as a sparse base-2 sequence d* supported past N
//! on a mod-3 progression, cut the support into length-N windows, select
//! unused zero positions of y below each window, and substitute
//! `d**_i = d*_{f(i)} / 2^{f(i)-i}` along the order-preserving matching f.
//! Every d** is again a digit value, and the weighted sum over the selected
//! zero positions reproduces x exactly (or up to a declared dyadic tail for
//! truncated infinite expansions).

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::expansion::{embed_base2, greedy_base8, DigitAlphabet, GreedyExpansion, SparseBase2};
use crate::rational::Rational;

/// Terminating binary expansion of a dyadic y in [0, 1). Digit i (1-based)
/// is `bits[i-1]`; positions beyond the stored length are zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryExpansion {
    y: Rational,
    bits: Vec<bool>,
}

impl BinaryExpansion {
    pub fn y(&self) -> &Rational {
        &self.y
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bit(&self, pos: usize) -> bool {
        pos >= 1 && pos <= self.bits.len() && self.bits[pos - 1]
    }

    /// Zero positions (elements of Z) up to and including `limit`.
    pub fn zero_positions(&self, limit: usize) -> Vec<usize> {
        (1..=limit).filter(|&i| !self.bit(i)).collect()
    }

    pub fn zero_count(&self, limit: usize) -> usize {
        (1..=limit).filter(|&i| !self.bit(i)).count()
    }

    /// Position of the last 1-digit, or `None` for y = 0.
    pub fn last_one(&self) -> Option<usize> {
        (1..=self.bits.len()).rev().find(|&i| self.bit(i))
    }

    pub fn ones_total(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Computes the terminating binary expansion of a dyadic y in [0, 1),
/// storing digits through at least `length`. Non-dyadic y has no terminating
/// expansion and y = 1 only the all-ones tail, so both are rejected.
pub fn binary_expand(y: &Rational, length: usize) -> Result<BinaryExpansion> {
    if y.is_negative() || *y >= Rational::one() {
        return Err(Error::OutOfRange(format!(
            "y = {y} has no terminating binary expansion in [0, 1)"
        )));
    }
    let exp = y.dyadic_exponent().ok_or_else(|| {
        Error::InvalidArgument(format!("y = {y} is not dyadic (denominator not a power of 2)"))
    })? as usize;
    let stored = length.max(exp);
    let mut bits = Vec::with_capacity(stored);
    let mut rest = y.clone();
    for i in 1..=stored {
        let weight = Rational::pow2(-(i as i64));
        if rest >= weight {
            bits.push(true);
            rest = &rest - &weight;
        } else {
            bits.push(false);
        }
    }
    debug_assert!(rest.is_zero());
    Ok(BinaryExpansion { y: y.clone(), bits })
}

/// Decision record for membership in A_N: zero count at least 0.4 n for all
/// n >= N, read as the exact inequality `5 * zeros(n) >= 2n`. For a
/// terminating expansion the check is finite: past the horizon
/// `n* = max(N, ceil(5 * ones / 3))` every digit is zero and the inequality
/// holds automatically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnMembership {
    pub n_start: usize,
    pub horizon: usize,
    pub verdict: bool,
    pub first_failure: Option<usize>,
    /// Per-n zero counts for n_start <= n <= horizon.
    pub trace: Vec<(usize, usize)>,
}

pub fn check_an(y: &BinaryExpansion, n_start: usize) -> AnMembership {
    let ones = y.ones_total();
    let horizon = n_start.max((5 * ones).div_ceil(3));
    let mut trace = Vec::new();
    let mut first_failure = None;
    let mut zeros_so_far = y.zero_count(n_start.saturating_sub(1));
    for n in n_start..=horizon {
        if n >= 1 && !y.bit(n) {
            zeros_so_far += 1;
        }
        trace.push((n, zeros_so_far));
        if first_failure.is_none() && 5 * zeros_so_far < 2 * n {
            first_failure = Some(n);
        }
    }
    AnMembership {
        n_start,
        horizon,
        verdict: first_failure.is_none(),
        first_failure,
        trace,
    }
}

/// One window of the d* support: positions in `(kN, (k+1)N]` carrying a
/// nonzero digit. A length-N window on a mod-3 progression holds at most
/// ceil(N/3) positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub k: usize,
    pub positions: Vec<usize>,
}

/// The zero positions of y consumed for window k, each at most kN.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub k: usize,
    pub positions: Vec<usize>,
    /// Zero positions that were still free below kN before this selection.
    pub available: usize,
    /// Whether the inductive surplus `available > ceil(N/3)` held here. Not
    /// required for feasibility (small N can succeed without it), but
    /// recorded because it is what guarantees every later window.
    pub exceeds_third_bound: bool,
}

/// One substituted digit: `digit = d*_{dst} / 2^{dst-src}`, placed at the
/// zero position `src`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignedDigit {
    pub src: usize,
    pub dst: usize,
    pub digit: Rational,
}

/// A fibre-membership certificate for the point (x, y).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibreCertificate {
    pub(crate) y: BinaryExpansion,
    pub(crate) n_offset: usize,
    pub(crate) x: Rational,
    pub(crate) sparse: SparseBase2,
    pub(crate) windows: Vec<Window>,
    pub(crate) selections: Vec<Selection>,
    pub(crate) assignment: Vec<AssignedDigit>,
    /// Exact truncation tail `x - sum of assigned digits`; zero when the
    /// greedy expansion terminated.
    pub(crate) tail: Rational,
    /// Declared bound: `tail <= 2^-P`. Always present; exact certificates
    /// satisfy it trivially.
    pub(crate) tail_bound_log2: usize,
    pub(crate) verified: bool,
}

impl FibreCertificate {
    pub fn y(&self) -> &BinaryExpansion {
        &self.y
    }

    pub fn n_offset(&self) -> usize {
        self.n_offset
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    pub fn sparse(&self) -> &SparseBase2 {
        &self.sparse
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn selections(&self) -> &[Selection] {
        &self.selections
    }

    pub fn assignment(&self) -> &[AssignedDigit] {
        &self.assignment
    }

    pub fn tail(&self) -> &Rational {
        &self.tail
    }

    pub fn tail_bound_log2(&self) -> usize {
        self.tail_bound_log2
    }

    pub fn is_exact(&self) -> bool {
        self.tail.is_zero()
    }

    pub fn verified(&self) -> bool {
        self.verified
    }

    /// `sum of digit / 2^src` over the assignment, exact.
    pub fn assigned_sum(&self) -> Rational {
        self.assignment
            .iter()
            .map(|a| &a.digit * &Rational::pow2(-(a.src as i64)))
            .sum()
    }
}

/// Upper end of the certified interval: `1 / (56 * 2^n)`.
pub fn fibre_interval_upper(n_offset: usize) -> Rational {
    Rational::new(1, num_bigint::BigInt::from(56) << n_offset).expect("constant")
}

/// Builds a fibre certificate for x in `[0, 1/(56 * 2^N)]` at a dyadic
/// y in A_N.
///
/// `window_budget` caps how many length-N windows are materialized. When the
/// greedy expansion of `2^N x` terminates inside the budget the certificate
/// is exact (tail 0); otherwise it covers the computed prefix and declares
/// the remaining tail, which is bounded by `(1/56) * 8^-M * 2^-N` for M
/// computed digits. Only nonempty windows consume zero positions.
pub fn certify_fibre_point(
    x: &Rational,
    y: &Rational,
    n_offset: usize,
    window_budget: usize,
    alphabet: &DigitAlphabet,
) -> Result<FibreCertificate> {
    if n_offset == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if window_budget == 0 {
        return Err(Error::InvalidArgument("window budget must be at least 1".into()));
    }
    let upper = fibre_interval_upper(n_offset);
    if x.is_negative() || *x > upper {
        return Err(Error::OutOfRange(format!(
            "x = {x} outside [0, 1/(56*2^{n_offset})]"
        )));
    }
    let bits_needed = (window_budget + 1) * n_offset;
    let y_bits = binary_expand(y, bits_needed)?;
    let membership = check_an(&y_bits, n_offset);
    if !membership.verdict {
        return Err(Error::InvalidArgument(format!(
            "y = {y} fails the zero-density check at n = {}",
            membership.first_failure.unwrap_or(n_offset)
        )));
    }

    // Greedy digits of 2^N x; digit j sits at base-2 position N + 3j, and
    // positions must stay within the window budget.
    let scaled = x * &Rational::pow2(n_offset as i64);
    // Digit j lands at position N + 3j, which must stay within the budgeted
    // windows; with no room for digits the whole value goes into the tail.
    let max_steps = (window_budget * n_offset) / 3;
    let expansion = greedy_base8(&scaled, max_steps, alphabet)?;
    let sparse = embed_base2(&expansion, n_offset);
    let tail = x - &sparse.value();
    let tail_bound_log2 = n_offset + 3 * expansion.len() + 5;

    let cert = assemble_certificate(
        y_bits, n_offset, x.clone(), sparse, tail, tail_bound_log2,
    )?;
    Ok(cert)
}

/// Window/selection/assignment construction shared by the public
/// constructor; split out so tests can drive it with custom d*.
fn assemble_certificate(
    y_bits: BinaryExpansion,
    n_offset: usize,
    x: Rational,
    sparse: SparseBase2,
    tail: Rational,
    tail_bound_log2: usize,
) -> Result<FibreCertificate> {
    let support: Vec<usize> = sparse.positions().collect();
    let window_of = |pos: usize| (pos - 1) / n_offset; // pos in (kN, (k+1)N]
    let k_max = support.last().map_or(0, |&p| window_of(p));

    let third_bound = n_offset.div_ceil(3);
    let mut windows = Vec::new();
    let mut selections = Vec::new();
    let mut assignment = Vec::new();
    let mut used: Vec<usize> = Vec::new();

    for k in 1..=k_max {
        let positions: Vec<usize> = support
            .iter()
            .copied()
            .filter(|&p| window_of(p) == k)
            .collect();
        windows.push(Window { k, positions: positions.clone() });
        if positions.is_empty() {
            continue;
        }
        let need = positions.len();
        let free: Vec<usize> = y_bits
            .zero_positions(k * n_offset)
            .into_iter()
            .filter(|p| !used.contains(p))
            .collect();
        let available = free.len();
        if available < need {
            return Err(Error::InfeasibleMatching { window: k, need, available });
        }
        let chosen: Vec<usize> = free.into_iter().take(need).collect();
        // Order-preserving matching: smallest source to smallest target.
        for (&src, &dst) in chosen.iter().zip(&positions) {
            debug_assert!(dst > src, "window targets exceed kN >= sources");
            let digit = sparse
                .entries
                .iter()
                .find(|(p, _)| *p == dst)
                .map(|(_, v)| v / &Rational::pow2((dst - src) as i64))
                .expect("dst taken from support");
            assignment.push(AssignedDigit { src, dst, digit });
        }
        used.extend_from_slice(&chosen);
        selections.push(Selection {
            k,
            positions: chosen,
            available,
            exceeds_third_bound: available > third_bound,
        });
    }

    let mut cert = FibreCertificate {
        y: y_bits,
        n_offset,
        x,
        sparse,
        windows,
        selections,
        assignment,
        tail,
        tail_bound_log2,
        verified: false,
    };
    cert.verified = verify_fibre_certificate(&cert).ok;
    Ok(cert)
}

/// One named check inside a verification report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    pub(crate) fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibreReport {
    pub ok: bool,
    pub checks: Vec<CheckResult>,
}

/// Exactly re-checks a fibre certificate from its stored fields: the d*
/// structure, window partition and cardinality bound, selection validity,
/// bijectivity of the assignment onto the d* support with f(i) > i, the
/// substitution formula and digit-set membership of every d**, and the
/// exact sum identity `assigned_sum + tail = x` with the declared tail
/// bound.
pub fn verify_fibre_certificate(cert: &FibreCertificate) -> FibreReport {
    let mut checks = Vec::new();
    let n = cert.n_offset;

    // y really is a terminating expansion of a dyadic in A_N.
    let y_ok = binary_expand(cert.y.y(), cert.y.bits.len())
        .map(|fresh| fresh.bits == cert.y.bits)
        .unwrap_or(false);
    let an = check_an(&cert.y, n);
    checks.push(CheckResult::new(
        "y-expansion",
        y_ok && an.verdict,
        format!("dyadic expansion valid: {y_ok}, zero-density verdict: {}", an.verdict),
    ));

    let upper = fibre_interval_upper(n);
    checks.push(CheckResult::new(
        "x-range",
        !cert.x.is_negative() && cert.x <= upper,
        format!("x = {} vs upper bound {upper}", cert.x),
    ));

    let sparse_ok = cert.sparse.offset == n && cert.sparse.check_invariants().is_ok();
    checks.push(CheckResult::new(
        "sparse-structure",
        sparse_ok,
        "d* supported past N on the mod-3 progression, unit-fraction values",
    ));

    // Windows partition the support and respect the ceil(N/3) bound.
    let support: Vec<usize> = cert.sparse.positions().collect();
    let third_bound = n.div_ceil(3);
    let mut windows_ok = true;
    let mut window_detail = String::new();
    let mut rebuilt: Vec<usize> = Vec::new();
    for w in &cert.windows {
        if w.positions.len() > third_bound {
            windows_ok = false;
            window_detail = format!("window {} holds {} > {third_bound}", w.k, w.positions.len());
        }
        for &p in &w.positions {
            if p <= w.k * n || p > (w.k + 1) * n {
                windows_ok = false;
                window_detail = format!("position {p} outside window {}", w.k);
            }
            rebuilt.push(p);
        }
    }
    if rebuilt != support {
        windows_ok = false;
        window_detail = "windows do not partition the d* support".into();
    }
    checks.push(CheckResult::new(
        "windows",
        windows_ok,
        if window_detail.is_empty() {
            format!("all window cardinalities <= {third_bound}")
        } else {
            window_detail
        },
    ));

    // Selections: zero positions of y, within kN, disjoint, matching counts.
    let mut selections_ok = true;
    let mut seen: Vec<usize> = Vec::new();
    for s in &cert.selections {
        let window = cert.windows.iter().find(|w| w.k == s.k);
        let need = window.map_or(0, |w| w.positions.len());
        if s.positions.len() != need {
            selections_ok = false;
        }
        for &p in &s.positions {
            if p > s.k * n || cert.y.bit(p) || seen.contains(&p) {
                selections_ok = false;
            }
            seen.push(p);
        }
    }
    checks.push(CheckResult::new(
        "selections",
        selections_ok,
        "selected positions are unused zeros of y at or below kN",
    ));

    // Assignment: bijection onto the support with f(i) > i.
    let mut sources: Vec<usize> = cert.assignment.iter().map(|a| a.src).collect();
    let mut targets: Vec<usize> = cert.assignment.iter().map(|a| a.dst).collect();
    let increasing = cert.assignment.iter().all(|a| a.dst > a.src);
    sources.sort_unstable();
    sources.dedup();
    targets.sort_unstable();
    targets.dedup();
    let mut selected: Vec<usize> = cert
        .selections
        .iter()
        .flat_map(|s| s.positions.iter().copied())
        .collect();
    selected.sort_unstable();
    let mut support_sorted = support.clone();
    support_sorted.sort_unstable();
    let bijection_ok = sources.len() == cert.assignment.len()
        && targets.len() == cert.assignment.len()
        && sources == selected
        && targets == support_sorted;
    checks.push(CheckResult::new(
        "bijection",
        bijection_ok && increasing,
        format!("sources = union of selections, targets = d* support, f(i) > i: {increasing}"),
    ));

    // Substitution formula and digit-set membership.
    let mut formula_ok = true;
    for a in &cert.assignment {
        let star = cert
            .sparse
            .entries
            .iter()
            .find(|(p, _)| *p == a.dst)
            .map(|(_, v)| v.clone());
        match star {
            Some(v) if a.dst > a.src => {
                let expected = &v / &Rational::pow2((a.dst - a.src) as i64);
                if expected != a.digit || !a.digit.is_unit_fraction() {
                    formula_ok = false;
                }
            }
            _ => formula_ok = false,
        }
    }
    checks.push(CheckResult::new(
        "substitution",
        formula_ok,
        "each d** equals d*_{f(i)} / 2^{f(i)-i} and is a digit value",
    ));

    // Exact sum: assigned digits plus the declared tail reproduce x.
    let sum = cert.assigned_sum();
    let sum_ok = &sum + &cert.tail == cert.x;
    let tail_ok = !cert.tail.is_negative()
        && cert.tail <= Rational::pow2(-(cert.tail_bound_log2 as i64));
    checks.push(CheckResult::new(
        "sum",
        sum_ok && tail_ok,
        format!(
            "sum {sum} + tail {} == x {}; tail within 2^-{}",
            cert.tail, cert.x, cert.tail_bound_log2
        ),
    ));

    FibreReport { ok: checks.iter().all(|c| c.passed), checks }
}

impl Serialize for FibreCertificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("FibreCertificate", 9)?;
        s.serialize_field("y", self.y.y())?;
        s.serialize_field("N", &self.n_offset)?;
        s.serialize_field("x", &self.x)?;
        s.serialize_field("windows", &self.windows)?;
        s.serialize_field("selections", &self.selections)?;
        s.serialize_field("assignment", &self.assignment)?;
        s.serialize_field("tail", &self.tail)?;
        s.serialize_field("tailBoundLog2", &self.tail_bound_log2)?;
        s.serialize_field("verified", &self.verified)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for FibreCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            y: Rational,
            #[serde(rename = "N")]
            n_offset: usize,
            x: Rational,
            windows: Vec<Window>,
            selections: Vec<Selection>,
            assignment: Vec<AssignedDigit>,
            tail: Rational,
            #[serde(rename = "tailBoundLog2")]
            tail_bound_log2: usize,
            verified: bool,
        }
        let raw = Raw::deserialize(deserializer)?;
        let bits_needed = raw
            .windows
            .last()
            .map_or(raw.n_offset, |w| (w.k + 1) * raw.n_offset);
        let y = binary_expand(&raw.y, bits_needed).map_err(serde::de::Error::custom)?;
        // d* is recovered from the assignment: d*_{dst} = digit * 2^{dst-src}.
        let mut entries: Vec<(usize, Rational)> = raw
            .assignment
            .iter()
            .map(|a| (a.dst, &a.digit * &Rational::pow2((a.dst - a.src) as i64)))
            .collect();
        entries.sort_by_key(|(p, _)| *p);
        Ok(FibreCertificate {
            y,
            n_offset: raw.n_offset,
            x: raw.x,
            sparse: SparseBase2 { offset: raw.n_offset, entries },
            windows: raw.windows,
            selections: raw.selections,
            assignment: raw.assignment,
            tail: raw.tail,
            tail_bound_log2: raw.tail_bound_log2,
            verified: raw.verified,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn binary_expansion_examples() {
        let e = binary_expand(&rat("1/2"), 5).unwrap();
        assert_eq!(e.bits(), &[true, false, false, false, false]);
        assert_eq!(e.zero_positions(5), vec![2, 3, 4, 5]);

        let e = binary_expand(&rat("3/4"), 4).unwrap();
        assert_eq!(e.bits(), &[true, true, false, false]);

        let e = binary_expand(&rat("5/8"), 5).unwrap();
        assert_eq!(e.bits(), &[true, false, true, false, false]);
        assert_eq!(e.zero_positions(5), vec![2, 4, 5]);
    }

    #[test]
    fn binary_expand_rejects_non_dyadic_and_one() {
        assert!(binary_expand(&rat("1/3"), 4).is_err());
        assert!(binary_expand(&rat("1"), 4).is_err());
        assert!(binary_expand(&rat("-1/2"), 4).is_err());
        assert!(binary_expand(&rat("0"), 4).is_ok());
    }

    #[test]
    fn an_membership_examples() {
        let half = binary_expand(&rat("1/2"), 8).unwrap();
        let at_one = check_an(&half, 1);
        assert!(!at_one.verdict);
        assert_eq!(at_one.first_failure, Some(1));

        let at_two = check_an(&half, 2);
        assert!(at_two.verdict);
        assert_eq!(at_two.horizon, 2);

        let zero = binary_expand(&rat("0"), 8).unwrap();
        for n in 1..5 {
            assert!(check_an(&zero, n).verdict);
        }
    }

    #[test]
    fn worked_example_1_over_448() {
        let cert = certify_fibre_point(
            &rat("1/448"),
            &rat("1/2"),
            2,
            8,
            &DigitAlphabet::full(),
        )
        .unwrap();
        assert!(cert.verified());
        assert!(cert.is_exact());
        // d*_5 = 1/14, W_2 = {5}, S_2 = {2}, substituted digit 1/112.
        assert_eq!(cert.sparse().entries, vec![(5, rat("1/14"))]);
        assert_eq!(
            cert.windows()
                .iter()
                .map(|w| (w.k, w.positions.clone()))
                .collect::<Vec<_>>(),
            vec![(1, vec![]), (2, vec![5])]
        );
        assert_eq!(cert.selections().len(), 1);
        assert_eq!(cert.selections()[0].positions, vec![2]);
        assert_eq!(cert.assignment().len(), 1);
        let a = &cert.assignment()[0];
        assert_eq!((a.src, a.dst, a.digit.clone()), (2, 5, rat("1/112")));
        assert_eq!(cert.assigned_sum(), rat("1/448"));
    }

    #[test]
    fn worked_example_interval_endpoint() {
        let cert = certify_fibre_point(
            &rat("1/224"),
            &rat("1/2"),
            2,
            8,
            &DigitAlphabet::full(),
        )
        .unwrap();
        assert!(cert.verified());
        assert_eq!(cert.sparse().entries, vec![(5, rat("1/7"))]);
        let a = &cert.assignment()[0];
        assert_eq!((a.src, a.dst, a.digit.clone()), (2, 5, rat("1/56")));
    }

    #[test]
    fn zero_point_gives_empty_assignment() {
        let cert =
            certify_fibre_point(&rat("0"), &rat("5/8"), 3, 6, &DigitAlphabet::full()).unwrap();
        assert!(cert.verified());
        assert!(cert.assignment().is_empty());
        assert!(cert.is_exact());
    }

    #[test]
    fn rejects_bad_inputs() {
        let full = DigitAlphabet::full();
        // x out of range.
        assert!(certify_fibre_point(&rat("1/100"), &rat("1/2"), 2, 8, &full).is_err());
        // y outside A_N (y = 7/8 has zeros only past position 3).
        assert!(matches!(
            certify_fibre_point(&rat("1/448"), &rat("7/8"), 2, 8, &full),
            Err(Error::InvalidArgument(_))
        ));
        // Non-dyadic y.
        assert!(certify_fibre_point(&rat("1/448"), &rat("1/3"), 2, 8, &full).is_err());
    }

    #[test]
    fn tampered_self_pair_fails_verification() {
        let mut cert = certify_fibre_point(
            &rat("1/448"),
            &rat("1/2"),
            2,
            8,
            &DigitAlphabet::full(),
        )
        .unwrap();
        cert.assignment[0].src = 5; // f(i) > i violated
        let report = verify_fibre_certificate(&cert);
        assert!(!report.ok);
        assert!(report
            .checks
            .iter()
            .any(|c| c.name == "bijection" && !c.passed));
    }

    #[test]
    fn tampered_unscaled_digit_fails_sum_check() {
        let mut cert = certify_fibre_point(
            &rat("1/448"),
            &rat("1/2"),
            2,
            8,
            &DigitAlphabet::full(),
        )
        .unwrap();
        cert.assignment[0].digit = rat("1/14"); // forgot the 2^{dst-src} factor
        let report = verify_fibre_certificate(&cert);
        assert!(!report.ok);
        assert!(report
            .checks
            .iter()
            .any(|c| (c.name == "sum" || c.name == "substitution") && !c.passed));
    }

    #[test]
    fn truncated_certificate_declares_tail() {
        // x = 1/(3*224) has a non-terminating greedy expansion at N = 2; the
        // certificate must cover the computed windows and bound the rest.
        let x = rat("1/672");
        let cert = certify_fibre_point(&x, &rat("1/2"), 2, 10, &DigitAlphabet::default_capped())
            .unwrap();
        assert!(cert.verified());
        assert!(!cert.is_exact());
        assert!(cert.tail() > &rat("0"));
        assert!(cert.tail() <= &Rational::pow2(-(cert.tail_bound_log2() as i64)));
        assert_eq!(&(cert.assigned_sum() + cert.tail().clone()), cert.x());
    }

    #[test]
    fn serde_round_trip_preserves_verification() {
        let cert = certify_fibre_point(
            &rat("1/448"),
            &rat("1/2"),
            2,
            8,
            &DigitAlphabet::full(),
        )
        .unwrap();
        let json = serde_json::to_string_pretty(&cert).unwrap();
        assert!(json.contains("\"y\": \"1/2\""));
        assert!(json.contains("\"N\": 2"));
        let back: FibreCertificate = serde_json::from_str(&json).unwrap();
        assert!(verify_fibre_certificate(&back).ok);
        assert_eq!(back.assignment(), cert.assignment());
    }
}
