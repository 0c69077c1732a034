//! Closed-form counts of merged-label trees per error pattern and degree
//! sequence.
//!
//! All counts use the (distinct-label tree, merge choice) weight: a tree
//! with labels `0..=n-2` where label `n - 2` is identified with label `0`,
//! times `n - 2` for the choice of the shared label. Totals are exact
//! integers. The per-code-class constituents are kept as rationals because
//! they exist to localize discrepancies, not to be summed blindly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::math::{exact_div, BigCount, DegreeCensus, DegreeSequence};
use crate::trees::count_trees;

fn require(n: usize, min_n: usize, formula: &'static str) -> Result<()> {
    if n < min_n {
        Err(Error::Domain { formula, n, min_n })
    } else {
        Ok(())
    }
}

fn ratio(num: BigInt, den: i128) -> BigRational {
    BigRational::new(num, BigInt::from(den))
}

fn big(x: i128) -> BigInt {
    BigInt::from(x)
}

struct Vars {
    n: i128,
    t: BigCount,
    census: DegreeCensus,
    x2: i128,
    x3: i128,
    x4: i128,
}

impl Vars {
    fn new(delta: &DegreeSequence) -> Result<Self> {
        let census = delta.census();
        Ok(Self {
            n: delta.n() as i128,
            t: count_trees(delta)?,
            x2: census.moment(2) as i128,
            x3: census.moment(3) as i128,
            x4: census.moment(4) as i128,
            census,
        })
    }

    fn alpha(&self, d: usize) -> i128 {
        self.census.alpha(d) as i128
    }
}

/// Merged-label trees whose repeated edges share a vertex:
/// `(n-2) T(delta) sum_d C(d,2) alpha_d / C(n-1, 2)`.
pub fn count_xx(delta: &DegreeSequence) -> Result<BigCount> {
    require(delta.n(), 4, "T_xx")?;
    let v = Vars::new(delta)?;
    let n = v.n;
    let pairs: i128 = (1..delta.n()).map(|d| (d * (d - 1) / 2) as i128 * v.alpha(d)).sum();
    let numerator = &v.t * big((n - 2) * pairs * 2);
    exact_div(&numerator, &big((n - 1) * (n - 2)), "T_xx")
}

/// The five code classes of the `xx` pattern, in order:
/// `C = (n-2, ..)` and `C = (n-1, ..)` with `0` absent, `C = (0, ..)`, and
/// the first `0` preceded by `n-2` or by `n-1`.
pub fn xx_classes(delta: &DegreeSequence) -> Result<[BigRational; 5]> {
    require(delta.n(), 4, "T_xx classes")?;
    let v = Vars::new(delta)?;
    let n = v.n;
    let a1 = v.alpha(1);
    let s1: i128 = (3..delta.n()).map(|d| ((d - 2) * (d - 1)) as i128 * v.alpha(d)).sum();
    let q: i128 = (n - 2) * (n - 2) - (2..delta.n()).map(|d| ((d - 1) * (d - 1)) as i128 * v.alpha(d)).sum::<i128>();
    let t = &v.t;
    Ok([
        ratio(t * big(a1 * s1), (n - 1) * (n - 3)),
        ratio(t * big(a1 * q), (n - 1) * (n - 2) * (n - 3)),
        ratio(t * big(q), (n - 1) * (n - 3)),
        ratio(t * big((n - 1 - a1) * s1), (n - 1) * (n - 3)),
        ratio(t * big((n - 2 - a1) * q), (n - 1) * (n - 2) * (n - 3)),
    ])
}

/// One `(d0, d)` slice of the `xyx` census.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XyxSlice {
    /// Degree of the path end beyond the original label-0 edge.
    pub d0: usize,
    /// Degree of the path end beyond the other repeated edge.
    pub d: usize,
    pub count: BigCount,
}

fn xyx_slice_polynomial(v: &Vars, d0: i128, d: i128) -> i128 {
    let (n, x2, x3) = (v.n, v.x2, v.x3);
    6 * d * d * d + 2 * (3 * d - 10) * d0 * d0 + 6 * d0 * d0 * d0 + (d + d0 - 10) * n * n
        - (3 * x2 - 8) * d
        - 20 * d * d
        + (6 * d * d - 3 * x2 - 20 * d + 8) * d0
        - (4 * d * d + (4 * d - 21) * d0 + 4 * d0 * d0 - 2 * x2 - 21 * d + 18) * n
        + 10 * x2
        - 2 * x3
        + 16
}

/// Merged trees with pattern `xyx` whose path ends have degrees `d0` (beyond
/// the label-0 edge) and `d` (beyond the other repeated edge). Ordered slices;
/// summing over all `(d0, d)` gives [`count_xyx_total`].
pub fn count_xyx(delta: &DegreeSequence, d0: usize, d: usize) -> Result<BigCount> {
    require(delta.n(), 5, "T_xyx slice")?;
    let n = delta.n();
    if d0 == 0 || d == 0 || d0 >= n || d >= n {
        return Err(Error::InvalidInput(format!("slice degrees ({d0}, {d}) outside 1..{n}")));
    }
    let v = Vars::new(delta)?;
    let pairs = v.alpha(d0) * (v.alpha(d) - i128::from(d0 == d));
    if pairs == 0 {
        return Ok(BigCount::zero());
    }
    let nn = v.n;
    let numerator = &v.t * big(pairs * xyx_slice_polynomial(&v, d0 as i128, d as i128));
    exact_div(&numerator, &big((nn - 1) * (nn - 2) * (nn - 3) * (nn - 4)), "T_xyx slice")
}

/// All non-zero slices, ordered by `(d0, d)`.
pub fn xyx_slices(delta: &DegreeSequence) -> Result<Vec<XyxSlice>> {
    require(delta.n(), 5, "T_xyx slice")?;
    let census = delta.census();
    let support: Vec<usize> = census.support().collect();
    let mut slices = Vec::new();
    for &d0 in &support {
        for &d in &support {
            let count = count_xyx(delta, d0, d)?;
            if count.is_negative() {
                return Err(Error::InexactDivision {
                    formula: "T_xyx slice (negative)",
                    numerator: count.to_string(),
                    denominator: "1".into(),
                });
            }
            if !count.is_zero() {
                slices.push(XyxSlice { d0, d, count });
            }
        }
    }
    Ok(slices)
}

/// `T(delta) (-6n^2 + 10n - 4 + 2 X_2 (n+1) - 2 X_3) / ((n-1)(n-2))`.
pub fn count_xyx_total(delta: &DegreeSequence) -> Result<BigCount> {
    require(delta.n(), 4, "T_xyx")?;
    let v = Vars::new(delta)?;
    let n = v.n;
    let numerator = &v.t * big(-6 * n * n + 10 * n - 4 + 2 * v.x2 * (n + 1) - 2 * v.x3);
    exact_div(&numerator, &big((n - 1) * (n - 2)), "T_xyx")
}

/// The per-code-class `xyx` formulas at a given slice, as printed.
/// `d_far` is the degree of the path end beyond the second repeated edge
/// (the free variable named after edge `n-1` or `n-2` in the class list).
#[derive(Clone, Debug, PartialEq)]
pub struct XyxClassTerms {
    /// Class 1; class 3 has the same value. Only `d0 = 1` contributes.
    pub class_1: BigRational,
    pub class_2: BigRational,
    pub class_3: BigRational,
    pub classes_4_5: BigRational,
    pub classes_6_8: BigRational,
    pub classes_7_9: BigRational,
}

impl XyxClassTerms {
    pub fn sum(&self) -> BigRational {
        &self.class_1 + &self.class_2 + &self.class_3 + &self.classes_4_5 + &self.classes_6_8 + &self.classes_7_9
    }
}

pub fn xyx_class_terms(delta: &DegreeSequence, d0: usize, d_far: usize) -> Result<XyxClassTerms> {
    require(delta.n(), 5, "T_xyx classes")?;
    let v = Vars::new(delta)?;
    let (n, x2, x3) = (v.n, v.x2, v.x3);
    let den = (n - 1) * (n - 2) * (n - 3) * (n - 4);
    let a1 = v.alpha(1);
    let dd = d_far as i128;
    let ad = v.alpha(d_far);
    let z = BigRational::zero();

    let (class_1, class_2) = if d0 == 1 {
        let c1 = 4 * n * n - 6 * n + 2 - x2 * (n + 2)
            + x3
            + (2 * dd * dd * dd - dd * dd * n - x2 * (dd - n - 3) - 6 * dd * dd + 7 * dd * n - 4 * n * n - x3 - 2 * dd + 4)
                * ad;
        let c2 = ad * (dd - 1) * (n * n + (1 - 2 * dd) * n - 2 + 2 * dd * dd - x2);
        (ratio(&v.t * big(a1 * c1), den), ratio(&v.t * big(a1 * c2), den))
    } else {
        (z.clone(), z.clone())
    };
    let class_3 = class_1.clone();

    let a0 = v.alpha(d0);
    let e = d0 as i128;
    let p45 = -12 * e * e * e - (e - 5) * n * n + x2 * (3 * e - n - 5) + 30 * e * e + 3 * (2 * e * e - 7 * e + 3) * n
        + (4 * e * e * e + 3 * e * e * dd + 3 * e * dd * dd + 2 * dd * dd * dd + (e - 5) * n * n
            - x2 * (2 * e + dd - n - 5)
            - 11 * e * e
            - 10 * e * dd
            - 9 * dd * dd
            - (3 * e * e + 2 * e * dd + dd * dd - 12 * e - 9 * dd + 9) * n
            - x3
            + 3 * e
            + 5 * dd
            + 8)
            * ad
        + x3
        - 8 * e
        - 8;
    let (classes_6_8, classes_7_9) = if d0 >= 2 {
        let p68 = -6 * e * e * e + x2 * (2 * e - n - 4) + 20 * e * e + 2 * (e * e - 7 * e + 3) * n + 4 * n * n
            + (2 * e * e * e + e * e * dd + e * dd * dd + 2 * dd * dd * dd - x2 * (e + dd - n - 4)
                - 7 * e * e
                - 6 * e * dd
                - 7 * dd * dd
                - (e * e + dd * dd - 7 * e - 7 * dd + 6) * n
                - 4 * n * n
                - x3
                + 3 * e
                + 3 * dd
                + 6)
                * ad
            + x3
            - 6 * e
            - 6;
        let p79 = if d_far >= 2 {
            -6 * e * e * e - (e - 1) * n * n + x2 * (e - 1) + 10 * e * e + (4 * e * e - 7 * e + 3) * n
                + (2 * e * e * dd + 2 * e * dd * dd + 2 * dd * dd * dd + (dd - 1) * n * n
                    - 2 * e * e
                    - x2 * (dd - 1)
                    - 4 * e * dd
                    - 4 * dd * dd
                    - (2 * e * dd + 2 * dd * dd - 2 * e - 5 * dd + 3) * n
                    + 2 * e
                    + 2)
                    * ad
                - 2 * e
                - 2
        } else {
            0
        };
        (ratio(&v.t * big(a0 * p68), den), ratio(&v.t * big(a0 * p79), den))
    } else {
        (z.clone(), z)
    };
    Ok(XyxClassTerms {
        class_1,
        class_2,
        class_3,
        classes_4_5: ratio(&v.t * big(a0 * p45), den),
        classes_6_8,
        classes_7_9,
    })
}

/// Merged trees whose repeated edges are two edges apart:
/// `T(delta) (-10n^3 - 12n^2 + 50n - 28 + 3(n^2 + 9n - 4) X_2 - 3 X_2^2
///  - 2(3n + 7) X_3 + 6 X_4) / ((n-1)(n-2)(n-3))`.
///
/// Obtained by summing, over all 4-edge paths, the number of trees with
/// degree sequence `delta` that contain the path. Differs from
/// [`count_xyzx_printed`] by the `-3 X_2^2` term; see that function.
pub fn count_xyzx(delta: &DegreeSequence) -> Result<BigCount> {
    require(delta.n(), 6, "T_xyzx")?;
    let v = Vars::new(delta)?;
    let numerator = &v.t * big(xyzx_printed_polynomial(&v) - 3 * v.x2 * v.x2);
    let n = v.n;
    exact_div(&numerator, &big((n - 1) * (n - 2) * (n - 3)), "T_xyzx")
}

fn xyzx_printed_polynomial(v: &Vars) -> i128 {
    let (n, x2, x3, x4) = (v.n, v.x2, v.x3, v.x4);
    -10 * n * n * n - 12 * n * n + 50 * n - 28 + 3 * (n * n + 9 * n - 4) * x2 - 2 * x3 * (3 * n + 7) + 6 * x4
}

/// The `xyzx` total exactly as printed in the literature formula. It is
/// non-zero for degree sequences that cannot contain the pattern at all
/// (e.g. a star), so it is kept only as a diagnostic.
pub fn count_xyzx_printed(delta: &DegreeSequence) -> Result<BigRational> {
    require(delta.n(), 6, "T_xyzx (printed)")?;
    let v = Vars::new(delta)?;
    let n = v.n;
    Ok(ratio(&v.t * big(xyzx_printed_polynomial(&v)), (n - 1) * (n - 2) * (n - 3)))
}

/// The printed grouped `xyzx` class formulas.
#[derive(Clone, Debug, PartialEq)]
pub struct XyzxGroups {
    /// The common value of classes 1, 3 and 4 (each).
    pub class_1: BigRational,
    pub class_2: BigRational,
    pub classes_5_8: BigRational,
    pub classes_9_12: BigRational,
    pub classes_13_16: BigRational,
}

impl XyzxGroups {
    /// Classes 1 through 16, counting the shared value of 1, 3, 4 three times.
    pub fn sum(&self) -> BigRational {
        BigRational::from_integer(3.into()) * &self.class_1
            + &self.class_2
            + &self.classes_5_8
            + &self.classes_9_12
            + &self.classes_13_16
    }
}

pub fn xyzx_groups_printed(delta: &DegreeSequence) -> Result<XyzxGroups> {
    require(delta.n(), 6, "T_xyzx groups")?;
    let v = Vars::new(delta)?;
    let (n, x2, x3, x4) = (v.n, v.x2, v.x3, v.x4);
    let a1 = v.alpha(1);
    let t = &v.t;
    let den4 = (n - 1) * (n - 2) * (n - 3) * (n - 5);
    let den5 = (n - 1) * (n - 2) * (n - 3) * (n - 4) * (n - 5);

    let g1 = -4 * n * n * n - 6 * n * n + 22 * n - 12 + x2 * (n * n + 11 * n - 4) - 2 * x3 * (n + 3) + 2 * x4;
    let g2 = n.pow(4) + 10 * n.pow(3) - 5 * n * n - 22 * n + 16 - 6 * x2 * (n * n + 3 * n - 2) + 8 * x3 * (n + 1)
        - 6 * x4;
    let a = 2 * n.pow(3) + 3 * n * n - 11 * n + 6;
    let b = n * n + 11 * n - 4;
    let g58 = -7 * n.pow(4) + 22 * n.pow(3) + 75 * n * n + 4 * a * a1 - 178 * n
        + 88
        + 2 * (n.pow(3) + 5 * n * n - b * a1 - 46 * n + 18) * x2
        - 4 * (n * n - (n + 3) * a1 - 2 * n - 11) * x3
        + 2 * x4 * (2 * n - 2 * a1 - 9);
    let g912 = -2 * a * (n - 3) + 2 * a * a1 + (b * (n - 3) - b * a1) * x2 - 2 * ((n + 3) * (n - 3) - (n + 3) * a1) * x3
        + 2 * x4 * (n - a1 - 3);
    let c = n.pow(4) + 10 * n.pow(3) - 5 * n * n - 22 * n + 16;
    let e = n * n + 3 * n - 2;
    let g1316 = c * (n - 4) - c * a1 - 6 * (e * (n - 4) - e * a1) * x2 + 8 * ((n + 1) * (n - 4) - (n + 1) * a1) * x3
        - 6 * x4 * (n - a1 - 4);
    Ok(XyzxGroups {
        class_1: ratio(t * big(a1 * g1), den4),
        class_2: ratio(t * big(a1 * g2), den5),
        classes_5_8: ratio(t * big(g58), den4),
        classes_9_12: ratio(t * big(g912), den5),
        classes_13_16: ratio(t * big(g1316), den4),
    })
}

/// Merged trees with none of the three patterns:
/// `(n-2) T(delta) - T_xx - T_xyx - T_xyzx`. A negative value is an error.
pub fn count_free(delta: &DegreeSequence) -> Result<BigCount> {
    require(delta.n(), 6, "T_free")?;
    let all = count_trees(delta)? * BigCount::from(delta.n() - 2);
    let free = all - count_xx(delta)? - count_xyx_total(delta)? - count_xyzx(delta)?;
    if free.is_negative() {
        return Err(Error::InexactDivision {
            formula: "T_free (over-subtracted)",
            numerator: free.to_string(),
            denominator: "1".into(),
        });
    }
    Ok(free)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::degree_sequences;

    fn seq(d: &[usize]) -> DegreeSequence {
        DegreeSequence::new(d.to_vec()).unwrap()
    }

    #[test]
    fn xx_at_four() {
        assert_eq!(count_xx(&seq(&[1, 2, 2, 1])).unwrap(), BigCount::from(4));
        assert_eq!(count_xx(&seq(&[1, 1, 1, 3])).unwrap(), BigCount::from(2));
        assert!(matches!(count_xx(&seq(&[1, 1, 2])), Err(Error::Domain { .. })));
    }

    #[test]
    fn xx_classes_sum_to_total() {
        for n in 4..=10 {
            for delta in degree_sequences(n).unwrap() {
                let sum: BigRational = xx_classes(&delta).unwrap().iter().sum();
                assert_eq!(sum, BigRational::from_integer(count_xx(&delta).unwrap()), "{delta}");
            }
        }
    }

    #[test]
    fn xyx_totals() {
        assert_eq!(count_xyx_total(&seq(&[1, 2, 2, 1])).unwrap(), BigCount::from(2));
        assert_eq!(count_xyx_total(&seq(&[1, 2, 2, 2, 1])).unwrap(), BigCount::from(12));
        let slices: BigCount = xyx_slices(&seq(&[1, 1, 2, 2, 2])).unwrap().iter().map(|s| s.count.clone()).sum();
        assert_eq!(slices, BigCount::from(12));
    }

    #[test]
    fn xyx_slices_sum_to_total() {
        for n in 5..=14 {
            for delta in degree_sequences(n).unwrap() {
                let slices: BigCount = xyx_slices(&delta).unwrap().into_iter().map(|s| s.count).sum();
                assert_eq!(slices, count_xyx_total(&delta).unwrap(), "{delta}");
            }
        }
    }

    #[test]
    fn xyx_slice_vanishes_without_degree() {
        let delta = seq(&[1, 1, 2, 2, 2]);
        assert!(count_xyx(&delta, 3, 1).unwrap().is_zero());
        assert!(count_xyx(&delta, 1, 4).unwrap().is_zero());
        assert!(count_xyx(&delta, 0, 1).is_err());
        assert!(matches!(count_xyx(&seq(&[1, 2, 2, 1]), 1, 1), Err(Error::Domain { .. })));
    }

    #[test]
    fn xyzx_cannot_exist_without_three_inner_vertices() {
        // a 4-edge path needs three vertices of degree >= 2
        let delta = seq(&[1, 1, 1, 1, 1, 5]);
        assert!(count_xyzx(&delta).unwrap().is_zero());
        assert!(!count_xyzx_printed(&delta).unwrap().is_zero());
        assert!(matches!(count_xyzx(&seq(&[1, 1, 2, 2, 2])), Err(Error::Domain { .. })));
    }

    #[test]
    fn free_count_is_nonnegative() {
        for n in 6..=16 {
            for delta in degree_sequences(n).unwrap() {
                count_free(&delta).unwrap();
            }
        }
    }
}
