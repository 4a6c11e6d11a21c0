use ghostdisk::hadamard::{gram_coefficients, random_pattern_set, reduce, sylvester_hadamard, PatternSet};
use ghostdisk::{HadamardMatrix, Matrix, ReducedPatternSet};
use proptest::prelude::*;

/// Plain triple-loop inner products, independent of `Matrix::gram`.
fn brute_gram(rows: &[Vec<u8>]) -> Vec<Vec<i64>> {
    rows.iter()
        .map(|a| rows.iter().map(|b| a.iter().zip(b).map(|(&x, &y)| i64::from(x & y)).sum()).collect())
        .collect()
}

fn rows_of(set: &PatternSet) -> Vec<Vec<u8>> {
    set.patterns().map(<[u8]>::to_vec).collect()
}

/// Recursive doubling, the textbook statement of the construction.
fn doubling(order: usize) -> Vec<Vec<i8>> {
    let mut h = vec![vec![1i8]];
    while h.len() < order {
        let m = h.len();
        let mut next = vec![vec![0i8; 2 * m]; 2 * m];
        for i in 0..m {
            for j in 0..m {
                next[i][j] = h[i][j];
                next[i][j + m] = h[i][j];
                next[i + m][j] = h[i][j];
                next[i + m][j + m] = -h[i][j];
            }
        }
        h = next;
    }
    h
}

#[test]
fn eight_by_eight_matches_published_matrix() {
    let published: [[i8; 8]; 8] = [
        [1, 1, 1, 1, 1, 1, 1, 1],
        [1, -1, 1, -1, 1, -1, 1, -1],
        [1, 1, -1, -1, 1, 1, -1, -1],
        [1, -1, -1, 1, 1, -1, -1, 1],
        [1, 1, 1, 1, -1, -1, -1, -1],
        [1, -1, 1, -1, -1, 1, -1, 1],
        [1, 1, -1, -1, -1, -1, 1, 1],
        [1, -1, -1, 1, -1, 1, 1, -1],
    ];
    let h = sylvester_hadamard(8).unwrap();
    for (r, row) in published.iter().enumerate() {
        assert_eq!(h.entries().row(r), row);
    }
}

#[test]
fn reduced_eight_matches_published_matrix() {
    let published: [[u8; 7]; 7] = [
        [0, 1, 0, 1, 0, 1, 0],
        [1, 0, 0, 1, 1, 0, 0],
        [0, 0, 1, 1, 0, 0, 1],
        [1, 1, 1, 0, 0, 0, 0],
        [0, 1, 0, 0, 1, 0, 1],
        [1, 0, 0, 0, 0, 1, 1],
        [0, 0, 1, 0, 1, 1, 0],
    ];
    let r = reduce(&sylvester_hadamard(8).unwrap());
    for (i, row) in published.iter().enumerate() {
        assert_eq!(r.pattern(i), row);
    }
    let gram = brute_gram(&rows_of(r.as_set()));
    for (i, row) in gram.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            assert_eq!(v, if i == j { 3 } else { 1 });
        }
    }
}

#[test]
fn sylvester_matches_recursive_doubling() {
    for order in [2, 4, 8, 16, 32, 64] {
        let h = sylvester_hadamard(order).unwrap();
        let d = doubling(order);
        for (r, row) in d.iter().enumerate() {
            assert_eq!(h.entries().row(r), row.as_slice());
        }
        let hi = h.entries().map(i64::from);
        assert_eq!(hi.matmul(&hi.transpose()).unwrap(), Matrix::from_fn(order, order, |i, j| if i == j { order as i64 } else { 0 }));
    }
}

#[test]
fn reduced_gram_structure_for_all_supported_orders() {
    for order in [4usize, 8, 16, 32, 64] {
        let r = reduce(&sylvester_hadamard(order).unwrap());
        let n = order - 1;
        let rows = rows_of(r.as_set());
        let gram = brute_gram(&rows);
        let (diag, off) = (order as i64 / 2 - 1, order as i64 / 4 - 1);
        for i in 0..n {
            assert_eq!(rows[i].iter().filter(|&&b| b == 1).count() as i64, diag);
            for j in 0..n {
                assert_eq!(gram[i][j], if i == j { diag } else { off }, "order {order} ({i},{j})");
            }
        }
        // G − c_min·J = (c_max − c_min)·I
        let c = gram_coefficients(n).unwrap();
        let g = r.gram();
        for i in 0..n {
            for j in 0..n {
                let lhs = g.get(i, j) - c.c_min as i64;
                let rhs = if i == j { (c.c_max - c.c_min) as i64 } else { 0 };
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn gram_fifteen_and_thirty_one() {
    let g15 = brute_gram(&rows_of(reduce(&sylvester_hadamard(16).unwrap()).as_set()));
    assert!(g15.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &v)| v == if i == j { 7 } else { 3 })));
    let g31 = brute_gram(&rows_of(reduce(&sylvester_hadamard(32).unwrap()).as_set()));
    let c = gram_coefficients(31).unwrap();
    assert_eq!((c.c_min, c.c_max), (7, 15));
    assert_eq!(g31[0][0], 15);
    assert_eq!(g31[4][9], 7);
}

#[test]
fn random_baseline_density() {
    let set = random_pattern_set(7, 10_000, 2024).unwrap();
    let ones: usize = set.patterns().map(|p| p.iter().filter(|&&b| b == 1).count()).sum();
    let mean = ones as f64 / 10_000.0;
    assert!((3.3..=3.7).contains(&mean), "{mean}");
    assert_eq!(random_pattern_set(7, 7, 11).unwrap(), random_pattern_set(7, 7, 11).unwrap());
    assert_ne!(random_pattern_set(7, 7, 11).unwrap(), random_pattern_set(7, 7, 12).unwrap());
}

#[test]
fn pattern_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let r = reduce(&sylvester_hadamard(8).unwrap());
    let txt = dir.path().join("patterns.txt");
    r.as_set().write_text(&txt).unwrap();
    assert_eq!(std::fs::read_to_string(&txt).unwrap().lines().next(), Some("0 1 0 1 0 1 0"));
    assert_eq!(&PatternSet::read_text(&txt).unwrap(), r.as_set());
    r.as_set().write_pgms(dir.path()).unwrap();
    assert_eq!(std::fs::read(dir.path().join("pattern_0.pgm")).unwrap(), b"P5\n7 1\n255\n\x00\xff\x00\xff\x00\xff\x00");
    let back = PatternSet::read_pgms(dir.path()).unwrap();
    assert_eq!(ReducedPatternSet::try_from_set(back).unwrap(), r);
}

#[test]
fn pgm_import_rejects_gray_levels() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("pattern_0.pgm"), b"P5\n3 1\n255\n\x00\x80\xff").unwrap();
    let err = PatternSet::read_pgms(dir.path()).unwrap_err().to_string();
    assert!(err.contains("128"), "{err}");
    let empty = tempfile::tempdir().unwrap();
    assert!(PatternSet::read_pgms(empty.path()).is_err());
}

#[test]
fn hadamard_validation_accepts_reconstructed_sylvester() {
    let h = sylvester_hadamard(16).unwrap();
    let rows: Vec<Vec<i8>> = h.entries().iter_rows().map(<[i8]>::to_vec).collect();
    let m = Matrix::from_rows(&rows).unwrap();
    assert_eq!(HadamardMatrix::from_matrix(m).unwrap(), h);
}

proptest! {
    #[test]
    fn text_format_round_trips(len in 1usize..20, count in 1usize..20, seed in any::<u64>()) {
        let set = random_pattern_set(len, count, seed).unwrap();
        prop_assert_eq!(PatternSet::from_text(&set.to_text()).unwrap(), set);
    }

    #[test]
    fn random_sets_are_reproducible(len in 1usize..40, count in 1usize..40, seed in any::<u64>()) {
        prop_assert_eq!(random_pattern_set(len, count, seed).unwrap(), random_pattern_set(len, count, seed).unwrap());
    }
}
