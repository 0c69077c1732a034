//! From proper counts to lattice counts and back, perimeter polynomials and
//! cluster densities.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::enumerate::{default_budget, enumerate_proper, Enumerator};
use crate::error::{Error, Result};
use crate::math::{binomial, BigCount};
use crate::proper::{g1, g2, PerimeterTable};

/// Where a table came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Formula,
    Enumeration,
    Inversion,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Formula => "formula",
            Provenance::Enumeration => "enumeration",
            Provenance::Inversion => "inversion",
        })
    }
}

/// `G^{(i)}_{n,t}` for every proper dimension `i` of size `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProperFamily {
    pub n: usize,
    tables: BTreeMap<usize, (PerimeterTable, Provenance)>,
}

impl ProperFamily {
    pub fn new(n: usize) -> Self {
        Self { n, tables: BTreeMap::new() }
    }

    pub fn insert(&mut self, table: PerimeterTable, provenance: Provenance) -> Result<()> {
        if table.n != self.n || table.dim >= self.n.max(2) || (self.n >= 2 && table.dim == 0) {
            return Err(Error::InvalidInput(format!(
                "table for n = {}, i = {} does not belong to a size-{} family",
                table.n, table.dim, self.n
            )));
        }
        self.tables.insert(table.dim, (table, provenance));
        Ok(())
    }

    pub fn get(&self, i: usize) -> Option<&PerimeterTable> {
        self.tables.get(&i).map(|(t, _)| t)
    }

    pub fn provenance(&self, i: usize) -> Option<Provenance> {
        self.tables.get(&i).map(|(_, p)| *p)
    }

    pub fn dims(&self) -> impl Iterator<Item = usize> + '_ {
        self.tables.keys().copied()
    }

    /// Proper dimensions a polycube of this size can have.
    pub fn possible_dims(&self) -> std::ops::RangeInclusive<usize> {
        if self.n == 1 {
            0..=0
        } else {
            1..=self.n - 1
        }
    }

    pub fn is_complete(&self) -> bool {
        self.possible_dims().all(|i| self.tables.contains_key(&i))
    }

    /// The single-cell family `{i = 0: {t = 0: 1}}`.
    pub fn single_cell() -> Self {
        let mut f = Self::new(1);
        f.tables.insert(0, (PerimeterTable::from_counts(1, 0, [(0, BigCount::one())]), Provenance::Formula));
        f
    }
}

/// `g^{(d)}_{n,t} = sum_i C(d, i) G^{(i)}_{n, t - 2(d-i)n}`.
pub fn expand(family: &ProperFamily, d: usize) -> Result<PerimeterTable> {
    if !family.is_complete() {
        return Err(Error::InvalidInput(format!("family for n = {} is missing dimensions", family.n)));
    }
    let n = family.n as i64;
    let mut out = PerimeterTable::new(family.n, d);
    for (&i, (table, _)) in &family.tables {
        let weight = binomial(d as i64, i as i64);
        if weight.is_zero() {
            continue;
        }
        let shift = 2 * (d as i64 - i as i64) * n;
        for (t, c) in table.iter() {
            out.add(t + shift, &(&weight * c));
        }
    }
    Ok(out)
}

/// `G^{(i)}_{n,t} = sum_{d=1}^{i} (-1)^(i-d) C(i, d) g^{(d)}_{n, t + 2(d-i)n}`,
/// with `lattice[d - 1]` holding `g^{(d)}` for `d = 1..=i`.
pub fn invert(lattice: &[PerimeterTable], i: usize) -> Result<PerimeterTable> {
    if i == 0 || lattice.len() < i {
        return Err(Error::InvalidInput(format!("inverting to i = {i} needs g for d = 1..={i}")));
    }
    let n = lattice[0].n;
    if n < 2 {
        return Err(Error::InvalidInput("inversion needs n >= 2".into()));
    }
    if let Some((k, t)) = lattice.iter().enumerate().find(|(k, t)| t.n != n || t.dim != k + 1) {
        return Err(Error::InvalidInput(format!("lattice[{k}] is for n = {}, d = {}", t.n, t.dim)));
    }
    let mut out = PerimeterTable::new(n, i);
    for d in 1..=i {
        let sign = if (i - d).is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
        let weight = sign * binomial(i as i64, d as i64);
        let shift = 2 * (i as i64 - d as i64) * n as i64;
        for (t, c) in lattice[d - 1].iter() {
            out.add(t + shift, &(&weight * c));
        }
    }
    if out.has_negative() {
        return Err(Error::InvalidInput(format!("inversion left negative counts: {out}")));
    }
    Ok(out)
}

/// `P(q) = sum_t g_{n,t} q^t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerimeterPolynomial {
    pub n: usize,
    pub d: usize,
    pub coefficients: BTreeMap<i64, BigCount>,
}

impl PerimeterPolynomial {
    pub fn from_table(table: &PerimeterTable) -> Self {
        Self { n: table.n, d: table.dim, coefficients: table.counts().clone() }
    }

    pub fn evaluate(&self, q: &BigRational) -> BigRational {
        self.coefficients
            .iter()
            .map(|(&t, c)| BigRational::from_integer(c.clone()) * rational_pow(q, t))
            .sum()
    }

    /// `A_d(n) = P(1)`.
    pub fn total(&self) -> BigCount {
        self.coefficients.values().sum()
    }
}

fn rational_pow(x: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

pub fn perimeter_polynomial(family: &ProperFamily, d: usize) -> Result<PerimeterPolynomial> {
    Ok(PerimeterPolynomial::from_table(&expand(family, d)?))
}

/// Mean number of clusters of size `n` per site at occupation probability
/// `p`: `sum_t g_{n,t} p^n (1-p)^t`.
pub fn evaluate_density(poly: &PerimeterPolynomial, p: &BigRational) -> Result<BigRational> {
    if p.is_negative() || p > &BigRational::one() {
        return Err(Error::InvalidInput(format!("occupation probability {p} outside [0, 1]")));
    }
    let q = BigRational::one() - p;
    Ok(rational_pow(p, poly.n as i64) * poly.evaluate(&q))
}

/// `g^{(d)}_{n,t}` as a polynomial in `d`: one term per proper dimension
/// `i`, weight `C(d, i)`, and each entry `G^{(i)}_{n,t'}` sitting at
/// `t = 2n d + (t' - 2 i n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicFamily {
    pub n: usize,
    pub terms: Vec<SymbolicTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicTerm {
    /// Proper dimension; the weight is `C(d, i)`.
    pub i: usize,
    /// `(offset, count)`: `count` polycubes at `t = slope * d + offset`.
    pub entries: Vec<(i64, String)>,
    pub slope: i64,
}

pub fn symbolic_in_d(family: &ProperFamily) -> Result<SymbolicFamily> {
    if !family.is_complete() {
        return Err(Error::InvalidInput(format!("family for n = {} is missing dimensions", family.n)));
    }
    let n = family.n as i64;
    let terms = family
        .tables
        .iter()
        .map(|(&i, (table, _))| SymbolicTerm {
            i,
            slope: 2 * n,
            entries: table.iter().map(|(t, c)| (t - 2 * i as i64 * n, c.to_string())).collect(),
        })
        .collect();
    Ok(SymbolicFamily { n: family.n, terms })
}

impl SymbolicFamily {
    pub fn evaluate(&self, d: usize) -> Result<PerimeterTable> {
        let mut out = PerimeterTable::new(self.n, d);
        for term in &self.terms {
            let weight = binomial(d as i64, term.i as i64);
            for (offset, c) in &term.entries {
                let c: BigCount = c.parse().map_err(|_| Error::Format(format!("bad count {c}")))?;
                out.add(term.slope * d as i64 + offset, &(&weight * c));
            }
        }
        Ok(out)
    }
}

fn binomial_in_d(i: usize) -> String {
    match i {
        0 => "1".into(),
        1 => "d".into(),
        _ => {
            let falling: String = (0..i).map(|k| if k == 0 { "d".to_string() } else { format!("(d-{k})") }).collect();
            let fact: u64 = (1..=i as u64).product();
            format!("{falling}/{fact}")
        }
    }
}

fn linear_in_d(slope: i64, offset: i64) -> String {
    match offset.signum() {
        0 => format!("{slope}d"),
        1 => format!("{slope}d+{offset}"),
        _ => format!("{slope}d-{}", -offset),
    }
}

impl fmt::Display for SymbolicFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g_{{{},t}}^{{(d)}} =", self.n)?;
        for (k, term) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " +")?;
            }
            write!(f, " {} [", binomial_in_d(term.i))?;
            for (j, (offset, c)) in term.entries.iter().enumerate() {
                if j > 0 {
                    write!(f, " + ")?;
                }
                write!(f, "{c} delta(t, {})", linear_in_d(term.slope, *offset))?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// Family from the formulas where they apply (`i = n - 1`, and `i = n - 2`
/// for `n >= 6`) and from proper enumeration elsewhere, within the cost budget.
pub fn hybrid_family(n: usize) -> Result<ProperFamily> {
    if n == 0 {
        return Err(Error::InvalidInput("size must be at least 1".into()));
    }
    if n == 1 {
        return Ok(ProperFamily::single_cell());
    }
    let mut family = ProperFamily::new(n);
    family.insert(g1(n)?, Provenance::Formula)?;
    let mut lowest_formula = n - 1;
    if n >= 6 {
        family.insert(g2(n)?, Provenance::Formula)?;
        lowest_formula = n - 2;
    }
    for i in 1..lowest_formula {
        Enumerator::new(n, i)?.check_budget(default_budget())?;
        let table = enumerate_proper(n, i)?.pop().expect("nmax tables");
        family.insert(table, Provenance::Enumeration)?;
    }
    Ok(family)
}

/// Family entirely from proper enumeration.
pub fn enumerated_family(n: usize) -> Result<ProperFamily> {
    if n == 1 {
        return Ok(ProperFamily::single_cell());
    }
    let mut family = ProperFamily::new(n);
    for i in 1..n {
        Enumerator::new(n, i)?.check_budget(default_budget())?;
        family.insert(enumerate_proper(n, i)?.pop().expect("nmax tables"), Provenance::Enumeration)?;
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_four() -> ProperFamily {
        let mut f = ProperFamily::new(4);
        let t = |i, rows: &[(i64, i64)]| PerimeterTable::from_counts(4, i, rows.iter().map(|&(t, c)| (t, c.into())));
        f.insert(t(1, &[(2, 1)]), Provenance::Formula).unwrap();
        f.insert(t(2, &[(8, 9), (9, 8)]), Provenance::Formula).unwrap();
        f.insert(t(3, &[(15, 8), (16, 24)]), Provenance::Formula).unwrap();
        f
    }

    #[test]
    fn expands_golden_family() {
        let f = golden_four();
        assert_eq!(expand(&f, 3).unwrap().to_string(), "{15: 8, 16: 51, 17: 24, 18: 3}");
        assert_eq!(expand(&f, 1).unwrap().to_string(), "{2: 1}");
        assert_eq!(expand(&f, 3).unwrap().total(), BigCount::from(86));
    }

    #[test]
    fn inverts_golden_family() {
        let f = golden_four();
        let lattice: Vec<_> = (1..=3).map(|d| expand(&f, d).unwrap()).collect();
        for i in 1..=3 {
            assert_eq!(&invert(&lattice, i).unwrap(), f.get(i).unwrap());
        }
    }

    #[test]
    fn symbolic_display() {
        let s = symbolic_in_d(&golden_four()).unwrap();
        assert_eq!(
            s.to_string(),
            "g_{4,t}^{(d)} = d [1 delta(t, 8d-6)] + d(d-1)/2 [9 delta(t, 8d-8) + 8 delta(t, 8d-7)] \
             + d(d-1)(d-2)/6 [8 delta(t, 8d-9) + 24 delta(t, 8d-8)]"
        );
        assert_eq!(s.evaluate(3).unwrap(), expand(&golden_four(), 3).unwrap());
    }

    #[test]
    fn density_edges() {
        let poly = perimeter_polynomial(&golden_four(), 2).unwrap();
        assert!(evaluate_density(&poly, &BigRational::zero()).unwrap().is_zero());
        assert!(evaluate_density(&poly, &BigRational::one()).unwrap().is_zero());
        assert_eq!(poly.evaluate(&BigRational::one()), BigRational::from_integer(19.into()));
        assert!(evaluate_density(&poly, &BigRational::from_integer(2.into())).is_err());
    }

    #[test]
    fn single_cell() {
        let f = ProperFamily::single_cell();
        assert_eq!(expand(&f, 3).unwrap().to_string(), "{6: 1}");
    }
}
