use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use proper_polycubes::assemble::{
    enumerated_family, evaluate_density, expand, hybrid_family, invert, perimeter_polynomial, symbolic_in_d,
    PerimeterPolynomial, ProperFamily, Provenance,
};
use proper_polycubes::enumerate::enumerate_g;
use proper_polycubes::PerimeterTable;

fn families() -> &'static Vec<ProperFamily> {
    static CELL: OnceLock<Vec<ProperFamily>> = OnceLock::new();
    CELL.get_or_init(|| (1..=7).map(|n| enumerated_family(n).unwrap()).collect())
}

fn family(n: usize) -> &'static ProperFamily {
    &families()[n - 1]
}

#[test]
fn density_of_triominoes_at_one_half() {
    let poly = perimeter_polynomial(family(3), 2).unwrap();
    let half = BigRational::new(1.into(), 2.into());
    assert_eq!(evaluate_density(&poly, &half).unwrap(), BigRational::new(5.into(), 1024.into()));
}

#[test]
fn density_rejects_probabilities_outside_unit_interval() {
    let poly = perimeter_polynomial(family(3), 2).unwrap();
    assert!(evaluate_density(&poly, &BigRational::new(3.into(), 2.into())).is_err());
    assert!(evaluate_density(&poly, &BigRational::new((-1).into(), 2.into())).is_err());
}

#[test]
fn hybrid_family_agrees_with_enumeration() {
    for n in 1..=7 {
        let hybrid = hybrid_family(n).unwrap();
        let enumerated = family(n);
        for i in enumerated.possible_dims() {
            assert_eq!(hybrid.get(i), enumerated.get(i), "n = {n}, i = {i}");
        }
        let formula_dims: Vec<usize> = hybrid.dims().filter(|&i| hybrid.provenance(i) == Some(Provenance::Formula)).collect();
        let expected: Vec<usize> = match n {
            1 => vec![0],
            2..=5 => vec![n - 1],
            _ => vec![n - 2, n - 1],
        };
        assert_eq!(formula_dims, expected);
    }
}

#[test]
fn expansion_matches_lattice_enumeration() {
    for d in 1..=4 {
        let lattice = enumerate_g(7 - d.min(2), d).unwrap();
        for (k, table) in lattice.iter().enumerate() {
            assert_eq!(&expand(family(k + 1), d).unwrap(), table, "n = {}, d = {d}", k + 1);
        }
    }
}

#[test]
fn symbolic_form_at_d_equals_expansion() {
    for n in 2..=7 {
        let symbolic = symbolic_in_d(family(n)).unwrap();
        for d in 1..=9 {
            assert_eq!(symbolic.evaluate(d).unwrap(), expand(family(n), d).unwrap(), "n = {n}, d = {d}");
        }
    }
}

#[test]
fn totals_follow_from_polynomial_at_one() {
    let poly = perimeter_polynomial(family(6), 4).unwrap();
    assert_eq!(poly.total(), BigInt::from(21272));
    assert_eq!(poly.evaluate(&BigRational::from_integer(1.into())), BigRational::from_integer(21272.into()));
    let table = expand(family(6), 4).unwrap();
    assert_eq!(PerimeterPolynomial::from_table(&table), poly);
}

fn synthetic_family(n: usize, seeds: &[Vec<(i64, u32)>]) -> ProperFamily {
    let mut f = ProperFamily::new(n);
    for i in 1..n {
        let counts: BTreeMap<i64, BigInt> =
            seeds[i - 1].iter().map(|&(t, c)| (t, BigInt::from(c))).collect();
        f.insert(PerimeterTable::from_counts(n, i, counts), Provenance::Formula).unwrap();
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn inversion_undoes_expansion(
        n in 2usize..=8,
        seeds in prop::collection::vec(prop::collection::vec((0i64..60, 1u32..1000), 0..6), 7),
    ) {
        let f = synthetic_family(n, &seeds);
        let lattice: Vec<PerimeterTable> = (1..n).map(|d| expand(&f, d).unwrap()).collect();
        for i in 1..n {
            prop_assert_eq!(&invert(&lattice, i).unwrap(), f.get(i).unwrap());
        }
    }

    #[test]
    fn symbolic_matches_numeric(n in 2usize..=7, d in 1usize..=8) {
        let symbolic = symbolic_in_d(family(n)).unwrap();
        prop_assert_eq!(symbolic.evaluate(d).unwrap(), expand(family(n), d).unwrap());
    }
}
