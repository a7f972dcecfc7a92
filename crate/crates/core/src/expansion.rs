//! Greedy base-8 expansions over the unit-fraction digit set.
//!
//! Any x in [0, 1/56] expands as `x = sum of d_i / 8^i` with every digit
//! either 0 or a unit fraction: at each step take the largest admissible
//! digit not exceeding 8 times the remainder. The remainder then stays in
//! [0, 1/56] (for the digit 1/n with n >= 8 the leftover is below
//! `1/(n(n-1)) <= 1/56`; 1/7 only fires on exactly 1/7). Read in base 2, the
//! expansion places its nonzero digits on a mod-3 progression, which is what
//! the fibre certificates consume ([`embed_base2`]).

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Hard upper bound for the interval: 1/56.
pub fn interval_upper_bound() -> Rational {
    Rational::new(1, 56).expect("constant")
}

/// The digit alphabet: 0 together with the unit fractions 1/n, either for
/// all n >= 1 or capped at n <= max_n.
///
/// The uncapped greedy digit for a remainder r > 0 is 1/ceil(1/r), whose n
/// grows without bound as remainders shrink; the capped alphabet keeps n
/// bounded by emitting 0 whenever even 1/max_n overshoots. Any cap >= 56
/// preserves the remainder invariant: a remainder above 1/56 always has an
/// admissible digit 1/n with n <= 56, and where only 0 fits the remainder
/// was already at most 1/56.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitAlphabet {
    max_n: Option<u32>,
}

/// Default cap: digits 1/n with 7 <= n <= 248 suffice for the whole
/// interval, and the bounded alphabet is what the acceptance checks pin.
pub const DEFAULT_DIGIT_CAP: u32 = 248;

impl DigitAlphabet {
    /// All unit fractions 1/n, n >= 1.
    pub fn full() -> Self {
        DigitAlphabet { max_n: None }
    }

    /// Unit fractions 1/n with n <= max_n. Caps below 56 would break the
    /// remainder invariant and are rejected.
    pub fn capped(max_n: u32) -> Result<Self> {
        if max_n < 56 {
            return Err(Error::InvalidArgument(format!(
                "digit cap {max_n} < 56 cannot keep remainders in [0, 1/56]"
            )));
        }
        Ok(DigitAlphabet { max_n: Some(max_n) })
    }

    pub fn default_capped() -> Self {
        DigitAlphabet { max_n: Some(DEFAULT_DIGIT_CAP) }
    }

    pub fn cap(&self) -> Option<u32> {
        self.max_n
    }

    /// True when `digit` (0 or 1/n) belongs to this alphabet.
    pub fn contains(&self, digit: &Rational) -> bool {
        if digit.is_zero() {
            return true;
        }
        if !digit.is_unit_fraction() || digit.is_negative() {
            return false;
        }
        match self.max_n {
            None => true,
            Some(cap) => *digit.denom() <= cap.into(),
        }
    }

    /// The largest alphabet element <= r (r >= 0); 0 when nothing else fits.
    pub fn greedy_digit(&self, r: &Rational) -> Rational {
        if r.is_zero() || r.is_negative() {
            return Rational::zero();
        }
        let n = r.ceil_recip().expect("positive remainder");
        match self.max_n {
            Some(cap) if n > cap.into() => Rational::zero(),
            _ => Rational::new(1, n).expect("n >= 1"),
        }
    }

    /// Greedy maximality: `digit <= r` and no larger alphabet element fits.
    pub fn is_greedy_maximal(&self, digit: &Rational, r: &Rational) -> bool {
        if !self.contains(digit) || digit > r {
            return false;
        }
        &self.greedy_digit(r) == digit
    }
}

/// A greedy base-8 expansion: digits d_1..d_M and exact remainders x_1..x_M
/// with `x = sum d_i/8^i + x_M/8^M`. The digit list stops early when a
/// remainder hits exactly zero (all later digits are zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyExpansion {
    pub(crate) x: Rational,
    pub(crate) digits: Vec<Rational>,
    pub(crate) remainders: Vec<Rational>,
    pub(crate) alphabet: DigitAlphabet,
}

impl GreedyExpansion {
    pub fn x(&self) -> &Rational {
        &self.x
    }

    pub fn digits(&self) -> &[Rational] {
        &self.digits
    }

    pub fn remainders(&self) -> &[Rational] {
        &self.remainders
    }

    pub fn alphabet(&self) -> &DigitAlphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// The remainder after the last computed digit (x itself when empty).
    pub fn final_remainder(&self) -> &Rational {
        self.remainders.last().unwrap_or(&self.x)
    }

    /// True when the expansion is exact: the final remainder is zero, so
    /// `x = sum d_i/8^i` with no tail.
    pub fn is_terminating(&self) -> bool {
        self.final_remainder().is_zero()
    }

    /// `sum of d_i / 8^i` over the computed digits, exact.
    pub fn partial_sum(&self) -> Rational {
        let eighth = Rational::new(1, 8).expect("constant");
        let mut scale = Rational::one();
        let mut sum = Rational::zero();
        for d in &self.digits {
            scale = &scale * &eighth;
            sum = sum + d * &scale;
        }
        sum
    }

    /// The exact truncation tail `x - partial_sum() = x_M / 8^M`.
    pub fn tail(&self) -> Rational {
        self.final_remainder() * &Rational::pow2(-3 * self.len() as i64)
    }
}

/// Runs the greedy expansion of x in [0, 1/56] for at most `steps` digits,
/// stopping early on an exact hit. Each step checks the contraction
/// invariant `0 <= 8 x_{i-1} - d_i <= 1/56` before committing the digit.
pub fn greedy_base8(
    x: &Rational,
    steps: usize,
    alphabet: &DigitAlphabet,
) -> Result<GreedyExpansion> {
    let bound = interval_upper_bound();
    if x.is_negative() || *x > bound {
        return Err(Error::OutOfRange(format!("x = {x} not in [0, 1/56]")));
    }
    let eight = Rational::from_int(8);
    let mut digits = Vec::new();
    let mut remainders = Vec::new();
    let mut current = x.clone();
    for _ in 0..steps {
        if current.is_zero() {
            break;
        }
        let scaled = &eight * &current;
        let digit = alphabet.greedy_digit(&scaled);
        let remainder = &scaled - &digit;
        assert!(
            !remainder.is_negative() && remainder <= bound,
            "contraction invariant violated: 8*{current} - {digit} = {remainder}"
        );
        digits.push(digit);
        remainders.push(remainder.clone());
        current = remainder;
    }
    Ok(GreedyExpansion {
        x: x.clone(),
        digits,
        remainders,
        alphabet: *alphabet,
    })
}

/// A finite base-2 digit configuration: entries `(position, value)` with all
/// positions beyond `offset`, congruent to `offset` mod 3, strictly
/// increasing, and all values unit fractions. Represents
/// `sum of value / 2^position`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseBase2 {
    pub offset: usize,
    pub entries: Vec<(usize, Rational)>,
}

impl SparseBase2 {
    pub fn value(&self) -> Rational {
        self.entries
            .iter()
            .map(|(pos, v)| v * &Rational::pow2(-(*pos as i64)))
            .sum()
    }

    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|(pos, _)| *pos)
    }

    pub fn check_invariants(&self) -> Result<()> {
        let mut prev: Option<usize> = None;
        for (pos, value) in &self.entries {
            if *pos <= self.offset || (*pos - self.offset) % 3 != 0 {
                return Err(Error::InvalidArgument(format!(
                    "position {pos} not on the mod-3 progression past {}",
                    self.offset
                )));
            }
            if prev.is_some_and(|p| *pos <= p) {
                return Err(Error::InvalidArgument(format!(
                    "positions not strictly increasing at {pos}"
                )));
            }
            if !value.is_unit_fraction() {
                return Err(Error::InvalidArgument(format!(
                    "entry value {value} is not a unit fraction"
                )));
            }
            prev = Some(*pos);
        }
        Ok(())
    }
}

/// Reads a greedy base-8 expansion of `2^offset * x` as a sparse base-2
/// configuration for x itself: digit j lands at position `offset + 3j`, so
/// the first `offset` base-2 digits vanish and all later nonzero digits sit
/// on the mod-3 progression. The represented value is `x` minus the scaled
/// truncation tail `e.tail() / 2^offset`.
pub fn embed_base2(e: &GreedyExpansion, offset: usize) -> SparseBase2 {
    let entries = e
        .digits
        .iter()
        .enumerate()
        .filter(|(_, d)| !d.is_zero())
        .map(|(idx, d)| (offset + 3 * (idx + 1), d.clone()))
        .collect();
    SparseBase2 { offset, entries }
}

/// Outcome of [`verify_expansion`]: success, or the first violated index
/// with a description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub ok: bool,
    pub first_violation: Option<(usize, String)>,
}

impl ExpansionReport {
    fn fail(index: usize, message: String) -> Self {
        ExpansionReport { ok: false, first_violation: Some((index, message)) }
    }

    fn success() -> Self {
        ExpansionReport { ok: true, first_violation: None }
    }
}

/// Re-checks every expansion invariant exactly: x and all remainders in
/// [0, 1/56], the per-step identity `x_i = 8 x_{i-1} - d_i`, and greedy
/// maximality of each digit within the recorded alphabet.
pub fn verify_expansion(e: &GreedyExpansion) -> ExpansionReport {
    let bound = interval_upper_bound();
    if e.x.is_negative() || e.x > bound {
        return ExpansionReport::fail(0, format!("x = {} outside [0, 1/56]", e.x));
    }
    if e.digits.len() != e.remainders.len() {
        return ExpansionReport::fail(0, "digit/remainder length mismatch".into());
    }
    let eight = Rational::from_int(8);
    let mut prev = e.x.clone();
    for (idx, (digit, remainder)) in e.digits.iter().zip(&e.remainders).enumerate() {
        let i = idx + 1;
        if remainder.is_negative() || *remainder > bound {
            return ExpansionReport::fail(i, format!("remainder {remainder} outside [0, 1/56]"));
        }
        let scaled = &eight * &prev;
        if &scaled - digit != *remainder {
            return ExpansionReport::fail(
                i,
                format!("identity broken: 8*{prev} - {digit} != {remainder}"),
            );
        }
        if !e.alphabet.is_greedy_maximal(digit, &scaled) {
            return ExpansionReport::fail(
                i,
                format!("digit {digit} is not the greedy choice for {scaled}"),
            );
        }
        prev = remainder.clone();
    }
    ExpansionReport::success()
}

// Serialized form: {"x":"p/q","digits":[...],"remainder":"p/q"} plus the cap
// needed to re-run the greedy rule on load.
impl Serialize for GreedyExpansion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("GreedyExpansion", 4)?;
        s.serialize_field("x", &self.x)?;
        s.serialize_field("digits", &self.digits)?;
        s.serialize_field("remainder", self.final_remainder())?;
        s.serialize_field("digitCapN", &self.alphabet.max_n)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for GreedyExpansion {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            x: Rational,
            digits: Vec<Rational>,
            remainder: Rational,
            #[serde(rename = "digitCapN")]
            digit_cap_n: Option<u32>,
        }
        let raw = Raw::deserialize(deserializer)?;
        // Rebuild the remainder chain from the per-step identity.
        let eight = Rational::from_int(8);
        let mut remainders = Vec::with_capacity(raw.digits.len());
        let mut prev = raw.x.clone();
        for digit in &raw.digits {
            let remainder = &(&eight * &prev) - digit;
            remainders.push(remainder.clone());
            prev = remainder;
        }
        if let Some(last) = remainders.last() {
            if *last != raw.remainder {
                return Err(serde::de::Error::custom(format!(
                    "stored remainder {} does not match recomputed {last}",
                    raw.remainder
                )));
            }
        } else if raw.remainder != raw.x {
            return Err(serde::de::Error::custom(
                "empty digit list must carry remainder == x",
            ));
        }
        Ok(GreedyExpansion {
            x: raw.x,
            digits: raw.digits,
            remainders,
            alphabet: DigitAlphabet { max_n: raw.digit_cap_n },
        })
    }
}
