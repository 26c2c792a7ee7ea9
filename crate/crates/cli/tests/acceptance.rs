//! Acceptance suite: one test per criterion, each printing a pass line.
//! Run with `cargo test -p posbasis-cli --test acceptance -- --nocapture`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use posbasis::random::{random_orthonormal, random_unit_vector};
use posbasis::*;
use posbasis_cli::render_table;

fn planar_triangle_in_r3() -> Mat {
    let h = 3.0_f64.sqrt() / 2.0;
    Mat::from_rows(&[&[1.0, -0.5, -0.5], &[0.0, h, -h], &[0.0, 0.0, 0.0]])
}

fn example_d35() -> Mat {
    let h = 3.0_f64.sqrt() / 2.0;
    Mat::from_rows(&[
        &[1.0, -0.5, -0.5, 0.0, 0.0],
        &[0.0, h, -h, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0, -1.0],
    ])
}

fn example_d35_shifted_normalized() -> Mat {
    let h = 3.0_f64.sqrt() / 2.0;
    let r = 1.0 / 2.0_f64.sqrt();
    Mat::from_rows(&[
        &[1.0, -0.5, -0.5, -r, -r],
        &[0.0, h, -h, 0.0, 0.0],
        &[0.0, 0.0, 0.0, r, -r],
    ])
}

#[test]
fn criterion_01_minimal_optimal_values() {
    let start = Instant::now();
    for n in 1..=8usize {
        let d = optimal_minimal(n, n, 0).unwrap();
        let value = cosine_measure_full(&d).unwrap().value;
        let expect = 1.0 / n as f64;
        assert!(
            (value - expect).abs() <= 1e-10,
            "n={n}: got {value}, expected {expect}"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1 s");
    println!("[PASS] criterion 1: minimal bases measure 1/n for n=1..8 ({elapsed:?})");
}

#[test]
fn criterion_02_maximal_optimal_values() {
    let start = Instant::now();
    for n in 1..=8usize {
        let (d, _) = maximal(n);
        let value = cosine_measure_full(&d).unwrap().value;
        let expect = 1.0 / (n as f64).sqrt();
        assert!(
            (value - expect).abs() <= 1e-10,
            "n={n}: got {value}, expected {expect}"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}, budget 30 s");
    println!("[PASS] criterion 2: maximal bases measure 1/sqrt(n) for n=1..8 ({elapsed:?})");
}

#[test]
fn criterion_03_intermediate_r3_value() {
    let (d, _) = optimal_intermediate(3, 5).unwrap();
    let value = cosine_measure_full(&d).unwrap().value;
    let expect = 1.0 / 5.0_f64.sqrt();
    assert!((value - expect).abs() <= 1e-10, "got {value}, expected {expect}");
    let formula = cm_formula(3, 5).unwrap();
    assert!((value - formula).abs() <= 1e-10);
    println!("[PASS] criterion 3: intermediate (3,5) measures 1/sqrt(5)");
}

#[test]
fn criterion_04_closed_form_agreement_sweep() {
    let start = Instant::now();
    for n in 2..=8usize {
        for s in n + 1..=2 * n {
            let (d, _) = optimal_intermediate(n, s).unwrap();
            let value = cosine_measure_full(&d).unwrap().value;
            let formula = cm_formula(n, s).unwrap();
            assert!(
                (value - formula).abs() <= 1e-10,
                "n={n} s={s}: enumeration {value} vs formula {formula}"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}, budget 2 min");
    println!("[PASS] criterion 4: closed form matches enumeration on the full sweep ({elapsed:?})");
}

#[test]
fn criterion_05_structured_equals_full_sweep() {
    for n in 2..=8usize {
        for s in n + 1..=2 * n {
            let (d, part) = optimal_intermediate(n, s).unwrap();
            let full = cosine_measure_full(&d).unwrap().value;
            let structured = cosine_measure_structured(&d, &part).unwrap().value;
            assert!(
                (full - structured).abs() <= 1e-10,
                "n={n} s={s}: structured {structured} vs full {full}"
            );
            let expected: usize = part.dims().iter().map(|&m| m + 1).product();
            assert_eq!(structured_bases(&part).len(), expected, "n={n} s={s}");
            assert_eq!(count_bases(&part), expected, "n={n} s={s}");
        }
    }
    println!("[PASS] criterion 5: structured route agrees and enumerates prod(m_i + 1) bases");
}

#[test]
fn criterion_06_table_matches_golden_transcription() {
    let rendered = render_table(8);
    let golden = include_str!("golden/table1.txt");
    assert_eq!(rendered, golden, "table output diverged from the golden file");

    // independent transcription of the published grid, descending block order
    let cells: &[(usize, usize, &str)] = &[
        (2, 3, "D2"),
        (2, 4, "(D1)^2"),
        (3, 4, "D3"),
        (3, 5, "D2,D1"),
        (3, 6, "(D1)^3"),
        (4, 5, "D4"),
        (4, 6, "(D2)^2"),
        (4, 7, "D2,(D1)^2"),
        (4, 8, "(D1)^4"),
        (5, 6, "D5"),
        (5, 7, "D3,D2"),
        (5, 8, "(D2)^2,D1"),
        (5, 9, "D2,(D1)^3"),
        (5, 10, "(D1)^5"),
        (6, 7, "D6"),
        (6, 8, "(D3)^2"),
        (6, 9, "(D2)^3"),
        (6, 10, "(D2)^2,(D1)^2"),
        (6, 11, "D2,(D1)^4"),
        (6, 12, "(D1)^6"),
        (7, 8, "D7"),
        (7, 9, "D4,D3"),
        (7, 10, "D3,(D2)^2"),
        (7, 11, "(D2)^3,D1"),
        (7, 12, "(D2)^2,(D1)^3"),
        (7, 13, "D2,(D1)^5"),
        (7, 14, "(D1)^7"),
        (8, 9, "D8"),
        (8, 10, "(D4)^2"),
        (8, 11, "(D3)^2,D2"),
        (8, 12, "(D2)^4"),
        (8, 13, "(D2)^3,(D1)^2"),
        (8, 14, "(D2)^2,(D1)^4"),
        (8, 15, "D2,(D1)^6"),
        (8, 16, "(D1)^8"),
    ];
    let grid: Vec<Vec<&str>> = rendered
        .lines()
        .take_while(|line| !line.is_empty())
        .map(|line| line.split('\t').collect())
        .collect();
    // grid[0] is the header; row for size s sits at index s - 2
    for (n, s, expect) in cells {
        let cell = grid[s - 2][n - 1];
        assert_eq!(&cell, expect, "cell n={n} s={s}");
    }
    // every other in-range position must be a dash
    for s in 3..=16usize {
        for n in 2..=8usize {
            let cell = grid[s - 2][n - 1];
            let in_range = s > n && s <= 2 * n;
            assert_eq!(
                cell != "-",
                in_range,
                "dash placement wrong at n={n} s={s}"
            );
        }
    }
    println!("[PASS] criterion 6: table output matches the golden transcription cell-for-cell");
}

#[test]
fn criterion_07_sampling_oracle_bound() {
    let start = Instant::now();
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(40_000 + seed);
        let n = rng.random_range(1..=3usize);
        let s = rng.random_range(n + 1..=2 * n);
        let q = s - n;
        let mut dims = vec![1usize; q];
        for _ in 0..n - q {
            let i = rng.random_range(0..q);
            dims[i] += 1;
        }
        let rotation = random_orthonormal(n, rng.random());
        let mut blocks = Vec::new();
        let mut offset = 0;
        for &m in &dims {
            let block = optimal_minimal(m, n, offset).unwrap();
            blocks.push((rotation.matmul(&block), VecN::zeros(n)));
            offset += m;
        }
        let (d, _) = compose_partition(&blocks).unwrap();
        let deterministic = cosine_measure_full(&d).unwrap().value;
        let sampled = cosine_measure_sampled(&d, 1_000_000, seed);
        assert!(
            sampled >= deterministic - 1e-12,
            "seed {seed}: sampled {sampled} below {deterministic}"
        );
        assert!(
            sampled - deterministic <= 5e-3,
            "seed {seed}: sampled {sampled} too far above {deterministic}"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}, budget 1 min");
    println!("[PASS] criterion 7: sampling bounds the measure within 5e-3 on 50 random bases ({elapsed:?})");
}

#[test]
fn criterion_08_grand_sum_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut orthogonal_checked = 0usize;
    let mut tilted_checked = 0usize;
    while orthogonal_checked + tilted_checked < 1000 {
        let want_orthogonal = (orthogonal_checked + tilted_checked).is_multiple_of(2);
        let a = random_unit_vector(3, rng.random());
        let mut b;
        loop {
            b = random_unit_vector(3, rng.random());
            if a.dot(&b).abs() < 0.9 {
                break;
            }
        }
        let b2 = Mat::from_cols(&[a.clone(), b.clone()]);
        // exactly orthogonal to both columns
        let cross = VecN::from_slice(&[
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]);
        let b1 = if want_orthogonal {
            match cross.normalized() {
                Ok(v) => v,
                Err(_) => continue,
            }
        } else {
            let v = random_unit_vector(3, rng.random());
            // keep the configuration well-conditioned: the triple product
            // is the volume spanned by the three unit columns
            if cross.dot(&v).abs() < 0.15 {
                continue;
            }
            v
        };
        let coupling = b2.transpose().matvec(&b1).norm();
        if !want_orthogonal && coupling <= 1e-3 {
            continue;
        }
        let Ok((lhs, rhs)) = grand_sum_decomposition_check(&b2, &b1) else {
            continue;
        };
        assert!(
            (lhs - rhs).abs() <= 1e-10,
            "identity violated: lhs {lhs}, rhs {rhs}"
        );
        let base = grand_sum(&invert(&gram(&b2)).unwrap()) + 1.0;
        if coupling <= 1e-12 {
            assert!(
                (lhs - base).abs() <= 1e-10,
                "orthogonal case should collapse: lhs {lhs}, base {base}"
            );
            orthogonal_checked += 1;
        } else {
            assert!(
                (lhs - base).abs() > 1e-10,
                "tilted case (|v| = {coupling}) should not collapse: lhs {lhs}, base {base}"
            );
            tilted_checked += 1;
        }
    }
    assert!(orthogonal_checked >= 400 && tilted_checked >= 400);
    println!(
        "[PASS] criterion 8: grand-sum identity on 1000 configurations \
         ({orthogonal_checked} orthogonal, {tilted_checked} tilted)"
    );
}

#[test]
fn criterion_09_verification_soundness() {
    let mut verified = 0usize;
    let mut deletions = 0usize;
    let mut seed = 0u64;
    while verified < 500 {
        for n in 1..=8usize {
            for s in n + 1..=2 * n {
                if verified >= 500 {
                    break;
                }
                let (d, _) = optimal_intermediate(n, s).unwrap();
                let rotation = random_orthonormal(n, 90_000 + seed);
                seed += 1;
                let d = rotation.matmul(&d);
                let check = is_positive_spanning(&d).unwrap();
                assert!(check.is_yes(), "n={n} s={s}");
                assert!(certificate_holds(&d, check.certificate()), "n={n} s={s}");
                assert!(is_positive_basis(&d).unwrap(), "n={n} s={s}");
                verified += 1;

                if s == n + 1 {
                    // delete one column from the minimal basis
                    let keep: Vec<usize> = (0..d.cols()).skip(1).collect();
                    let truncated = d.select_cols(&keep);
                    let check = is_positive_spanning(&truncated).unwrap();
                    assert!(!check.is_yes(), "n={n}: deletion still spans");
                    assert!(certificate_holds(&truncated, check.certificate()));
                    assert_eq!(
                        rank(&truncated, tol::rank_tol(n, truncated.cols())),
                        n,
                        "n={n}: deletion lost linear span"
                    );
                    deletions += 1;
                }
            }
        }
    }
    assert!(deletions >= 100);
    println!(
        "[PASS] criterion 9: {verified} generated bases verify with self-checking certificates \
         ({deletions} deletion probes)"
    );
}

#[test]
fn criterion_10_worked_r3_examples() {
    assert!(is_positive_basis(&example_d35()).unwrap());
    assert!(is_positive_basis(&example_d35_shifted_normalized()).unwrap());
    let triangle = planar_triangle_in_r3();
    assert!(is_critical_vector_minimal(&triangle, &VecN::from_slice(&[-1.0, 0.0, 0.0])).unwrap());
    assert!(!is_critical_vector_minimal(&triangle, &VecN::from_slice(&[0.0, 1.0, 0.0])).unwrap());
    println!("[PASS] criterion 10: the two worked R^3 example sets and their critical vectors check out");
}

#[test]
fn criterion_11_dims_optimality_brute_force() {
    fn min_sum_of_squares(n: usize, q: usize) -> usize {
        fn go(remaining: usize, parts: usize, acc: usize, best: &mut usize) {
            if parts == 1 {
                *best = (*best).min(acc + remaining * remaining);
                return;
            }
            for first in 1..=remaining - (parts - 1) {
                go(remaining - first, parts - 1, acc + first * first, best);
            }
        }
        let mut best = usize::MAX;
        go(n, q, 0, &mut best);
        best
    }

    for n in 2..=12usize {
        for q in 2..=6usize.min(n) {
            let s = n + q;
            if s > 2 * n {
                continue;
            }
            let dims = dims_for(n, s).unwrap();
            assert_eq!(dims.len(), q);
            assert_eq!(dims.iter().sum::<usize>(), n);
            let achieved: usize = dims.iter().map(|&m| m * m).sum();
            let best = min_sum_of_squares(n, q);
            assert_eq!(achieved, best, "n={n} q={q}: {achieved} vs brute-force {best}");
        }
    }
    println!("[PASS] criterion 11: block dimensions minimize the squared sum for n<=12, 2<=s-n<=6");
}
