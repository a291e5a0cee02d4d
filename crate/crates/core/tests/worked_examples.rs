use std::time::Instant;

use gblearn::algebra::{Binomial, Exponent};
use gblearn::groebner::{buchberger, verify_groebner, BuchbergerOptions, GeneratorSet};

fn ideal(rows: &[[u32; 10]]) -> Vec<Binomial> {
    rows.iter()
        .map(|r| Binomial::new(Exponent::from(&r[..5]), Exponent::from(&r[5..])).unwrap())
        .collect()
}

fn table_ideal(v: &[u32; 30]) -> Vec<Binomial> {
    v.chunks(6)
        .map(|c| Binomial::new(Exponent::from(&c[..3]), Exponent::from(&c[3..])).unwrap())
        .collect()
}

#[test]
fn five_variable_example() {
    let gens = ideal(&[
        [0, 0, 7, 0, 8, 2, 0, 2, 1, 2],
        [0, 0, 13, 2, 0, 3, 3, 5, 0, 1],
        [6, 4, 1, 3, 0, 0, 3, 2, 4, 3],
        [0, 2, 5, 2, 2, 0, 1, 2, 1, 6],
        [3, 2, 0, 5, 1, 3, 1, 1, 3, 2],
    ]);
    let start = Instant::now();
    let r = buchberger(&GeneratorSet::from_binomials(&gens).unwrap(), &BuchbergerOptions::default()).unwrap();
    eprintln!("{:?} pairs={} zero={}", start.elapsed(), r.pairs_processed, r.reductions_to_zero);
    assert_eq!((r.cardinality, r.max_total_degree), (226, 29));
}

#[test]
fn table_one_sizes() {
    let i = [3, 3, 1, 1, 3, 3, 6, 1, 0, 2, 1, 4, 1, 5, 1, 4, 1, 2, 0, 6, 1, 3, 2, 2, 6, 1, 0, 1, 3, 3];
    let j = [6, 0, 1, 3, 2, 2, 1, 3, 3, 1, 0, 6, 0, 7, 0, 0, 4, 3, 4, 1, 2, 1, 1, 5, 1, 6, 0, 0, 3, 4];
    let k = [5, 2, 0, 0, 1, 6, 6, 1, 0, 2, 2, 3, 3, 4, 0, 3, 1, 3, 0, 3, 4, 1, 0, 6, 3, 4, 0, 0, 7, 0];
    let sizes: Vec<usize> = [i, j, k]
        .iter()
        .map(|v| {
            let r = buchberger(&GeneratorSet::from_binomials(&table_ideal(v)).unwrap(), &BuchbergerOptions::default()).unwrap();
            assert!(verify_groebner(&r.basis));
            r.cardinality
        })
        .collect();
    assert_eq!(sizes, vec![7, 13, 14]);
}
