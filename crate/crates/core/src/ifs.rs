//! The planar map family, finite compositions, and depth-m covers.
//!
//! The attractor is generated by countably many similarities of ratio 1/2:
//! an "up" map `U(x,y) = (x/2, (y+1)/2)`, the translation-free "down" map
//! `D0(x,y) = (x/2, y/2)`, and for every k >= 0, n >= 1 the translated down
//! map `D_{k,n}(x,y) = ((x + 1/(2^k n))/2, y/2)`. Everything here is exact:
//! points, triangles and strips carry [`Rational`] coordinates only.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Budget, Error, Result};
use crate::rational::Rational;

/// One generator of the family: `U`, `D0`, or `D(k, n)`.
///
/// Descriptors are kept symbolic. Distinct descriptors may share a
/// translation value (`D(1,1)` and `D(0,2)` both translate by 1/2); geometry
/// depends only on the value, so enumeration dedupes by value while the
/// descriptor level preserves the redundancy. `D0` translates by exactly 0
/// and is distinct from every `D(k,n)` (whose translations are positive),
/// even though it is the limit of `D(k,n)` as the translation shrinks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op")]
pub enum MapDescriptor {
    U,
    D0,
    D { k: u32, n: u32 },
}

impl MapDescriptor {
    /// Validated constructor for `D(k, n)`.
    pub fn d(k: u32, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("D(k, n) requires n >= 1".into()));
        }
        Ok(MapDescriptor::D { k, n })
    }

    /// The x-translation applied before halving: 0 for `U` and `D0`,
    /// `1/(2^k n)` for `D(k, n)`.
    pub fn translation(&self) -> Rational {
        match self {
            MapDescriptor::U | MapDescriptor::D0 => Rational::zero(),
            MapDescriptor::D { k, n } => {
                digit_value(*k, *n).expect("descriptor invariant: n >= 1")
            }
        }
    }

    pub fn is_up(&self) -> bool {
        matches!(self, MapDescriptor::U)
    }

    /// Applies the similarity to a point, exactly.
    pub fn apply(&self, p: &Point) -> Point {
        let half = Rational::pow2(-1);
        match self {
            MapDescriptor::U => Point {
                x: &p.x * &half,
                y: (&p.y + &Rational::one()) * &half,
            },
            MapDescriptor::D0 => Point {
                x: &p.x * &half,
                y: &p.y * &half,
            },
            MapDescriptor::D { .. } => Point {
                x: (&p.x + &self.translation()) * &half,
                y: &p.y * &half,
            },
        }
    }
}

/// The translation value `t_{k,n} = 1/(2^k n)`, in lowest terms.
pub fn digit_value(k: u32, n: u32) -> Result<Rational> {
    if n == 0 {
        return Err(Error::InvalidArgument("digit_value requires n >= 1".into()));
    }
    Rational::new(1, num_bigint::BigInt::from(n) << k as usize)
}

/// A finite composition of generators, applied outermost-first: the word
/// `[f1, f2, ..., fm]` denotes `f1 ∘ f2 ∘ ... ∘ fm`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<MapDescriptor>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(f1 ∘ ... ∘ fm)(p)`, computed exactly. Position i contributes
    /// `t_i / 2^i` to x and (for `U`) `1 / 2^i` to y.
    pub fn apply(&self, p: &Point) -> Point {
        let mut out = p.clone();
        for map in self.0.iter().rev() {
            out = map.apply(&out);
        }
        out
    }

    /// The horizontal strip of height `2^-m` containing the image of the
    /// base triangle: `[sum over U positions of 2^-i, + 2^-m]`.
    pub fn strip(&self) -> Result<StripInterval> {
        if self.0.is_empty() {
            return Err(Error::InvalidArgument(
                "strip of the empty word is undefined".into(),
            ));
        }
        let mut lo = Rational::zero();
        for (idx, map) in self.0.iter().enumerate() {
            if map.is_up() {
                lo = lo + Rational::pow2(-(idx as i64 + 1));
            }
        }
        let hi = &lo + &Rational::pow2(-(self.len() as i64));
        Ok(StripInterval { lo, hi })
    }

    /// The image of the base triangle under this word.
    pub fn triangle(&self) -> Triangle {
        Triangle {
            v0: self.apply(&Point::origin()),
            v1: self.apply(&Point::new(Rational::one(), Rational::zero())),
            v2: self.apply(&Point::new(Rational::zero(), Rational::one())),
        }
    }
}

/// A point of the plane with exact coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn origin() -> Self {
        Point::new(Rational::zero(), Rational::zero())
    }

    pub fn distance_sq(&self, other: &Point) -> Rational {
        let dx = &self.x - &other.x;
        let dy = &self.y - &other.y;
        &dx * &dx + &dy * &dy
    }
}

/// An axis-aligned right triangle: `v0` the right-angle vertex, `v1` the end
/// of the horizontal leg, `v2` the apex. Images of the base triangle
/// `(0,0), (1,0), (0,1)` under depth-m words have legs of length `2^-m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangle {
    pub v0: Point,
    pub v1: Point,
    pub v2: Point,
}

impl Triangle {
    /// The base triangle with vertices (0,0), (1,0), (0,1).
    pub fn base() -> Self {
        Triangle {
            v0: Point::origin(),
            v1: Point::new(Rational::one(), Rational::zero()),
            v2: Point::new(Rational::zero(), Rational::one()),
        }
    }

    pub fn apex(&self) -> &Point {
        &self.v2
    }

    /// Exact closed point-in-triangle test for axis-aligned right triangles
    /// of this orientation: x >= x0, y >= y0, and (x - x0) + (y - y0) <= leg.
    pub fn contains(&self, p: &Point) -> bool {
        let leg = &self.v1.x - &self.v0.x;
        p.x >= self.v0.x
            && p.y >= self.v0.y
            && (&p.x - &self.v0.x) + (&p.y - &self.v0.y) <= leg
    }

    /// True when every vertex of `other` lies inside `self` (sufficient for
    /// containment of convex sets).
    pub fn contains_triangle(&self, other: &Triangle) -> bool {
        self.contains(&other.v0) && self.contains(&other.v1) && self.contains(&other.v2)
    }
}

/// A horizontal strip `[lo, hi]` with `hi - lo = 2^-m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl StripInterval {
    pub fn height(&self) -> Rational {
        &self.hi - &self.lo
    }
}

/// A single x-digit: either 0 or a unit fraction 1/q. Every positive unit
/// fraction is a translation value (write q = 2^k * n with n odd), and every
/// translation value is a unit fraction, so this is exactly the closure of
/// the digit set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DigitChoice(Rational);

impl DigitChoice {
    pub fn new(value: Rational) -> Result<Self> {
        if value.is_zero() || value.is_unit_fraction() {
            Ok(DigitChoice(value))
        } else {
            Err(Error::InvalidArgument(format!(
                "digit {value} is neither 0 nor a unit fraction"
            )))
        }
    }

    pub fn zero() -> Self {
        DigitChoice(Rational::zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }
}

/// All distinct digit values >= eps, descending: 1/1, 1/2, ..., 1/floor(1/eps).
pub fn truncated_digit_values(eps: &Rational) -> Result<Vec<Rational>> {
    if eps.is_zero() || eps.is_negative() || *eps > Rational::one() {
        return Err(Error::OutOfRange(format!("eps {eps} not in (0, 1]")));
    }
    let q_max = eps
        .recip()?
        .floor()
        .try_into()
        .map_err(|_| Error::Resource("1/eps too large to enumerate".into()))?;
    Ok((1u64..=q_max)
        .map(|q| Rational::new(1, q as i64).expect("q >= 1"))
        .collect())
}

/// The eps-truncated depth-m cover: all images of the base triangle under
/// depth-m words whose translated maps all have translation >= eps (`U` and
/// `D0` are always admitted). Triangles are deduplicated by geometry and
/// returned sorted by (strip lo, apex x).
///
/// The full (untruncated) cover contains the attractor; every full-cover
/// apex x-coordinate is within `eps * (1 - 2^-m)` of a truncated-cover apex
/// in the same strip (replace each digit below eps by zero).
pub fn cover(m: u32, eps: &Rational, budget: &Budget) -> Result<Vec<Triangle>> {
    if m == 0 {
        return Err(Error::InvalidArgument("cover requires m >= 1".into()));
    }
    let values = truncated_digit_values(eps)?;
    budget.check_cover_words(2 + values.len() as u128, m)?;

    // Accumulate (strip lo, apex x) pairs; the leg length 2^-m fixes the rest.
    let mut keys: BTreeSet<(Rational, Rational)> = BTreeSet::new();
    let mut stack: Vec<(u32, Rational, Rational)> = vec![(0, Rational::zero(), Rational::zero())];
    while let Some((depth, lo, tx)) = stack.pop() {
        if depth == m {
            keys.insert((lo, tx));
            continue;
        }
        let weight = Rational::pow2(-(depth as i64 + 1));
        // U branch.
        stack.push((depth + 1, &lo + &weight, tx.clone()));
        // D0 branch (digit value 0).
        stack.push((depth + 1, lo.clone(), tx.clone()));
        for v in &values {
            stack.push((depth + 1, lo.clone(), &tx + &(v * &weight)));
        }
    }

    let leg = Rational::pow2(-(m as i64));
    Ok(keys
        .into_iter()
        .map(|(lo, tx)| Triangle {
            v0: Point::new(tx.clone(), lo.clone()),
            v1: Point::new(&tx + &leg, lo.clone()),
            v2: Point::new(tx, &lo + &leg),
        })
        .collect())
}

/// Truncated digit-sum sample of the attractor.
///
/// `bits` is the binary prefix of the y-coordinate (position 1 first);
/// positions beyond `bits.len()` follow the all-zero-tail convention.
/// `digits` supplies at most one digit per zero position i <= depth. The
/// result `(sum of d_i/2^i, sum of a_i/2^i)` is an exact member of the
/// depth-`depth` approximant, and extending the tail moves each coordinate
/// by less than `2^-depth` (so the point is within `2^-depth * sqrt(2)` of
/// the attractor; see [`sample_proximity_sq_bound`]).
pub fn sample_point(
    bits: &[bool],
    digits: &BTreeMap<usize, DigitChoice>,
    depth: usize,
) -> Result<Point> {
    let bit_at = |pos: usize| pos >= 1 && pos <= bits.len() && bits[pos - 1];
    let mut x = Rational::zero();
    for (&pos, digit) in digits {
        if pos == 0 || pos > depth {
            return Err(Error::InvalidArgument(format!(
                "digit position {pos} outside 1..={depth}"
            )));
        }
        if bit_at(pos) {
            return Err(Error::InvalidArgument(format!(
                "digit supplied at position {pos}, but that binary digit is 1"
            )));
        }
        x = x + digit.value() * &Rational::pow2(-(pos as i64));
    }
    let mut y = Rational::zero();
    for pos in 1..=depth {
        if bit_at(pos) {
            y = y + Rational::pow2(-(pos as i64));
        }
    }
    Ok(Point::new(x, y))
}

/// Squared Euclidean distance bound from a depth-`depth` sample to the
/// attractor: `2 * 4^-depth` (i.e. `(2^-depth * sqrt(2))^2`), kept squared so
/// the bound stays rational.
pub fn sample_proximity_sq_bound(depth: usize) -> Rational {
    Rational::pow2(1 - 2 * depth as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn word(maps: &[MapDescriptor]) -> Word {
        Word(maps.to_vec())
    }

    #[test]
    fn digit_values_match_direct_evaluation() {
        assert_eq!(digit_value(0, 1).unwrap(), rat("1"));
        assert_eq!(digit_value(1, 1).unwrap(), rat("1/2"));
        assert_eq!(digit_value(0, 2).unwrap(), rat("1/2"));
        assert_eq!(digit_value(3, 14).unwrap(), rat("1/112"));
        assert!(digit_value(5, 0).is_err());
    }

    #[test]
    fn apply_word_examples() {
        let p = Point::origin();
        assert_eq!(
            word(&[MapDescriptor::U]).apply(&p),
            Point::new(rat("0"), rat("1/2"))
        );
        assert_eq!(
            word(&[MapDescriptor::d(0, 1).unwrap()]).apply(&p),
            Point::new(rat("1/2"), rat("0"))
        );
        // Hand-composed: D(3,14) sends (0,1) to (1/224, 1/2), then U lifts to
        // (1/448, 3/4).
        let w = word(&[MapDescriptor::U, MapDescriptor::d(3, 14).unwrap()]);
        assert_eq!(
            w.apply(&Point::new(rat("0"), rat("1"))),
            Point::new(rat("1/448"), rat("3/4"))
        );
    }

    #[test]
    fn strip_examples() {
        assert_eq!(
            word(&[MapDescriptor::U]).strip().unwrap(),
            StripInterval { lo: rat("1/2"), hi: rat("1") }
        );
        assert_eq!(
            word(&[MapDescriptor::D0]).strip().unwrap(),
            StripInterval { lo: rat("0"), hi: rat("1/2") }
        );
        assert_eq!(
            word(&[MapDescriptor::U, MapDescriptor::D0, MapDescriptor::U])
                .strip()
                .unwrap(),
            StripInterval { lo: rat("5/8"), hi: rat("3/4") }
        );
        assert!(word(&[]).strip().is_err());
    }

    #[test]
    fn cover_depth_one_examples() {
        let budget = Budget::default();
        let triangles = cover(1, &rat("1"), &budget).unwrap();
        let apexes: Vec<Point> = triangles.iter().map(|t| t.apex().clone()).collect();
        assert_eq!(
            apexes,
            vec![
                Point::new(rat("0"), rat("1/2")),
                Point::new(rat("1/2"), rat("1/2")),
                Point::new(rat("0"), rat("1")),
            ]
        );
        // eps = 1/2 admits the value 1/2 once (D(1,1) and D(0,2) coincide).
        assert_eq!(cover(1, &rat("1/2"), &budget).unwrap().len(), 4);
    }

    #[test]
    fn cover_triangles_stay_inside_base_and_nest() {
        let budget = Budget::default();
        let base = Triangle::base();
        for eps in [rat("1"), rat("1/2"), rat("1/4")] {
            let coarse = cover(1, &eps, &budget).unwrap();
            let fine = cover(2, &eps, &budget).unwrap();
            for t in &fine {
                assert!(base.contains_triangle(t));
                assert!(
                    coarse.iter().any(|c| c.contains_triangle(t)),
                    "triangle with apex {:?} not nested at eps {eps}",
                    t.apex()
                );
            }
        }
    }

    #[test]
    fn cover_word_budget_guard() {
        let budget = Budget { max_cover_words: 100, ..Budget::default() };
        assert!(matches!(
            cover(4, &rat("1/8"), &budget),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn strip_matches_triangle_y_extent() {
        let w = word(&[
            MapDescriptor::U,
            MapDescriptor::d(2, 3).unwrap(),
            MapDescriptor::D0,
            MapDescriptor::U,
        ]);
        let strip = w.strip().unwrap();
        let t = w.triangle();
        assert_eq!(t.v0.y, strip.lo);
        assert_eq!(t.v2.y, strip.hi);
        assert_eq!(strip.height(), Rational::pow2(-4));
    }

    #[test]
    fn sample_point_examples() {
        let no_digits = BTreeMap::new();
        // All bits one: x = 0, y = 1 - 2^-depth.
        let p = sample_point(&[true; 6], &no_digits, 6).unwrap();
        assert_eq!(p, Point::new(rat("0"), rat("63/64")));

        // All bits zero, all digits one: x = 1 - 2^-depth, y = 0.
        let ones: BTreeMap<usize, DigitChoice> = (1..=6)
            .map(|i| (i, DigitChoice::new(rat("1")).unwrap()))
            .collect();
        let p = sample_point(&[], &ones, 6).unwrap();
        assert_eq!(p, Point::new(rat("63/64"), rat("0")));

        // a = (1, 0, 0, ...), d2 = 1/112: the point (1/448, 1/2).
        let mut digits = BTreeMap::new();
        digits.insert(2, DigitChoice::new(rat("1/112")).unwrap());
        let p = sample_point(&[true], &digits, 8).unwrap();
        assert_eq!(p, Point::new(rat("1/448"), rat("1/2")));
    }

    #[test]
    fn sample_point_rejects_digit_on_one_bit() {
        let mut digits = BTreeMap::new();
        digits.insert(1, DigitChoice::new(rat("1/2")).unwrap());
        assert!(sample_point(&[true], &digits, 4).is_err());
        digits.clear();
        digits.insert(9, DigitChoice::new(rat("1/2")).unwrap());
        assert!(sample_point(&[true], &digits, 4).is_err());
    }

    #[test]
    fn sample_point_lands_in_its_own_word_triangle() {
        // The sample built from (bits, digits) is the right-angle vertex of
        // the triangle of the corresponding word.
        let bits = [true, false, true, false];
        let mut digits = BTreeMap::new();
        digits.insert(2, DigitChoice::new(rat("1/3")).unwrap());
        digits.insert(4, DigitChoice::new(rat("1/7")).unwrap());
        let p = sample_point(&bits, &digits, 4).unwrap();
        let w = Word(vec![
            MapDescriptor::U,
            MapDescriptor::d(0, 3).unwrap(),
            MapDescriptor::U,
            MapDescriptor::d(0, 7).unwrap(),
        ]);
        assert!(w.triangle().contains(&p));
        assert_eq!(w.apply(&Point::origin()), p);
    }

    proptest! {
        /// Every positive integer q is 2^k * n with n odd, so every unit
        /// fraction is a translation value; conversely every translation
        /// value is a unit fraction.
        #[test]
        fn digit_set_identity(q in 1u32..500) {
            let k = q.trailing_zeros();
            let n = q >> k;
            prop_assert_eq!(
                digit_value(k, n).unwrap(),
                Rational::new(1, q as i64).unwrap()
            );
            prop_assert!(digit_value(k, n).unwrap().is_unit_fraction());
        }

        /// Each generator is a similarity of ratio exactly 1/2.
        #[test]
        fn maps_halve_distances(
            ax in -20i64..20, ay in -20i64..20,
            bx in -20i64..20, by in -20i64..20,
            k in 0u32..8, n in 1u32..40,
            which in 0usize..3,
        ) {
            let map = match which {
                0 => MapDescriptor::U,
                1 => MapDescriptor::D0,
                _ => MapDescriptor::d(k, n).unwrap(),
            };
            let a = Point::new(Rational::from_int(ax), Rational::from_int(ay));
            let b = Point::new(Rational::from_int(bx), Rational::from_int(by));
            let lhs = map.apply(&a).distance_sq(&map.apply(&b));
            let rhs = a.distance_sq(&b) * rat("1/4");
            prop_assert_eq!(lhs, rhs);
        }

        /// Extending a sample's tail moves it by less than 2^-depth in each
        /// coordinate, which is the content of the proximity bound.
        #[test]
        fn sample_tail_extension_stays_close(
            bits in proptest::collection::vec(any::<bool>(), 1..8),
            extra in proptest::collection::vec(any::<bool>(), 1..8),
        ) {
            let depth = bits.len();
            let no_digits = BTreeMap::new();
            let p = sample_point(&bits, &no_digits, depth).unwrap();
            let mut extended = bits.clone();
            extended.extend_from_slice(&extra);
            let q = sample_point(&extended, &no_digits, extended.len()).unwrap();
            let step = Rational::pow2(-(depth as i64));
            prop_assert!((&q.y - &p.y).abs() < step);
            prop_assert!(p.distance_sq(&q) < sample_proximity_sq_bound(depth));
        }
    }

    #[test]
    fn word_serde_schema() {
        let w = Word(vec![
            MapDescriptor::U,
            MapDescriptor::D0,
            MapDescriptor::d(3, 14).unwrap(),
        ]);
        let json = serde_json::to_string(&w).unwrap();
        assert_eq!(json, r#"[{"op":"U"},{"op":"D0"},{"op":"D","k":3,"n":14}]"#);
        let back: Word = serde_json::from_str(&json).unwrap();
        assert_eq!(back, w);
    }
}
