//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its runtime (visible with `--nocapture`) and enforcing
//! its time budget.

mod common;

use std::time::{Duration, Instant};

use common::*;
use dpda_core::bounds::{bound_jmqx, bound_new, classify, compare_report, ratio};
use dpda_core::construction::{construct_general, construct_i, construct_ii};
use dpda_core::design::grid_mcrd;
use dpda_core::pda::{
    equivalent, parse_entry_grid, validate_dpda, validate_pda, ArrayParams, Condition, Location,
};
use dpda_core::sim::{random_demand, run, FileLibrary};
use num::BigUint;

fn finish(criterion: &str, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    println!("criterion {criterion}: PASS ({elapsed:?})");
    assert!(
        elapsed < budget,
        "criterion {criterion} took {elapsed:?}, budget {budget:?}"
    );
}

#[test]
fn criterion_01_golden_arrays() {
    let start = Instant::now();
    let cases = [
        (
            "I over 2x2 grid",
            construct_i(&grid_mcrd(2).unwrap()).unwrap(),
            GOLDEN_I_N2,
        ),
        (
            "I over 3x3 grid",
            construct_i(&grid_mcrd(3).unwrap()).unwrap(),
            GOLDEN_I_N3,
        ),
        (
            "II over 3x3 grid",
            construct_ii(&grid_mcrd(3).unwrap()).unwrap(),
            GOLDEN_II_N3,
        ),
        (
            "II over 4x4 grid",
            construct_ii(&grid_mcrd(4).unwrap()).unwrap(),
            GOLDEN_II_N4,
        ),
        (
            "general over GF(3) code design",
            construct_general(&gf3_design()).unwrap(),
            GOLDEN_GENERAL_GF3,
        ),
    ];
    for (label, built, expected) in &cases {
        assert!(
            equivalent(built.array(), &golden(expected)).unwrap(),
            "{label} differs from the expected grid"
        );
    }
    finish("01 golden arrays", start, Duration::from_secs(1));
}

#[test]
fn criterion_02_reference_array_end_to_end() {
    let start = Instant::now();
    let dpda = validate_dpda(&ref_array(), None).expect("reference array is a valid DPDA");
    assert!(
        dpda.phi().is_identity(),
        "derived sender map must be the identity"
    );
    let library = FileLibrary::synthetic(6, 4096, 2024).unwrap();
    let report = run(&dpda, &[4, 2, 1, 5, 6, 3], &library).unwrap();
    assert_eq!(report.transmissions.len(), 6);
    assert!(report.all_decoded(), "every user decodes byte-exactly");
    for outcome in &report.outcomes {
        assert_eq!(outcome.bytes, library.file(outcome.file - 1));
    }
    assert_eq!(report.measured_load, ratio(3, 2));
    finish("02 reference end-to-end", start, Duration::from_secs(1));
}

#[test]
fn criterion_03_parameter_contracts() {
    let start = Instant::now();
    for n in 2..=8usize {
        let grid = grid_mcrd(n).unwrap();
        let one = construct_i(&grid).unwrap();
        assert_eq!(
            one.params(),
            ArrayParams {
                k: 2 * n,
                f: n * n,
                z: n,
                s: n * n * (n - 1)
            },
            "point-rows parameters, n={n}"
        );
        let two = construct_ii(&grid).unwrap();
        assert_eq!(
            two.params(),
            ArrayParams {
                k: n * n,
                f: 2 * n,
                z: 2,
                s: n * n * (n - 1)
            },
            "block-rows parameters, n={n}"
        );
    }
    finish("03 parameter contracts", start, Duration::from_secs(5));
}

#[test]
fn criterion_04_bound_equality() {
    let start = Instant::now();
    for n in 2..=8usize {
        let grid = grid_mcrd(n).unwrap();

        let one = construct_i(&grid).unwrap();
        let report = classify(one.dpda()).unwrap();
        assert_eq!(report.bound_jmqx, bound_jmqx(n * n, n).unwrap());
        assert_eq!(report.load, ratio(n as u64 - 1, 1), "load is n-1, n={n}");
        assert!(report.meets_jmqx, "n={n}");
        assert!(
            report.evidence.uniform_kzf_multiplicity,
            "symbols appear KZ/F = 2 times, n={n}"
        );
        assert!(
            report.evidence.rows_have_kzf_stars,
            "rows hold KZ/F = 2 stars, n={n}"
        );
        for cells in one.dpda().array().occurrences().values() {
            assert_eq!(cells.len(), 2);
        }
        for row in 0..one.params().f {
            assert_eq!(one.dpda().array().star_cols(row).len(), 2);
        }

        let two = construct_ii(&grid).unwrap();
        let report = classify(two.dpda()).unwrap();
        assert_eq!(report.bound_new, bound_new(n * n, 2 * n, 2).unwrap());
        assert_eq!(
            report.load,
            ratio((n * (n - 1)) as u64, 2),
            "load is n(n-1)/2, n={n}"
        );
        assert!(report.meets_new, "n={n}");
        assert!(
            report.evidence.uniform_z_multiplicity,
            "symbols appear Z = 2 times, n={n}"
        );
        for cells in two.dpda().array().occurrences().values() {
            assert_eq!(cells.len(), 2);
        }
    }
    finish("04 bound equality", start, Duration::from_secs(5));
}

#[test]
fn criterion_05_tightness_crossover() {
    let start = Instant::now();
    for k in 1..=50usize {
        for f in 2..=50usize {
            for z in 1..f {
                let new = bound_new(k, f, z).unwrap();
                let jmqx = bound_jmqx(f, z).unwrap();
                match k.cmp(&f) {
                    std::cmp::Ordering::Greater => {
                        assert!(
                            new > jmqx,
                            "K={k} F={f} Z={z}: expected the per-user bound tighter"
                        )
                    }
                    std::cmp::Ordering::Equal => {
                        assert_eq!(new, jmqx, "K={k} F={f} Z={z}: bounds must coincide")
                    }
                    std::cmp::Ordering::Less => {
                        assert!(
                            new < jmqx,
                            "K={k} F={f} Z={z}: expected the F/Z bound tighter"
                        )
                    }
                }
            }
        }
    }
    finish("05 tightness crossover", start, Duration::from_secs(5));
}

#[test]
fn criterion_06_design_oracle() {
    let start = Instant::now();
    let res = gf3_design();
    let labels = |class: usize| -> Vec<String> {
        res.class(class)
            .iter()
            .map(|&b| res.design().block_label(b))
            .collect()
    };
    assert_eq!(labels(0), vec!["012", "345", "678"]);
    assert_eq!(labels(1), vec!["036", "147", "258"]);
    assert_eq!(labels(2), vec!["057", "138", "246"]);
    assert_eq!(labels(3), vec!["048", "237", "156"]);
    let profile = res.cross_profile().unwrap();
    assert_eq!(profile.mu2(), Some(1));
    finish("06 design oracle", start, Duration::from_secs(1));
}

#[test]
fn criterion_07_grid_cross_intersections() {
    let start = Instant::now();
    for n in 2..=10usize {
        let grid = grid_mcrd(n).unwrap();
        // Exhaustive direct check over all n^2 cross-class block pairs.
        let mut pairs = 0;
        for &row_block in grid.class(0) {
            for &col_block in grid.class(1) {
                let a = grid.design().block(row_block);
                let b = grid.design().block(col_block);
                let overlap = a.iter().filter(|p| b.contains(p)).count();
                assert_eq!(overlap, 1, "n={n}: blocks {row_block} and {col_block}");
                pairs += 1;
            }
        }
        assert_eq!(pairs, n * n);
        assert!(grid.cross_profile().unwrap().is_mcrd, "n={n}");
    }
    finish("07 grid cross intersections", start, Duration::from_secs(5));
}

#[test]
fn criterion_08_decode_property_suite() {
    let start = Instant::now();
    let mut arrays = vec![construct_general(&gf3_design()).unwrap()];
    for n in 2..=6usize {
        let grid = grid_mcrd(n).unwrap();
        arrays.push(construct_i(&grid).unwrap());
        arrays.push(construct_ii(&grid).unwrap());
    }
    let files = 5usize;
    let library = FileLibrary::synthetic(files, 1024, 8080).unwrap();
    for built in &arrays {
        let params = built.params();
        for trial in 0..20u64 {
            let demand = random_demand(params.k, files, 31 * trial + params.k as u64);
            let report = run(built.dpda(), &demand, &library)
                .unwrap_or_else(|e| panic!("{} n/a: {e}", built.construction()));
            assert!(
                report.all_decoded(),
                "{} trial {trial}",
                built.construction()
            );
            assert!(report.one_shot_verified);
            for outcome in &report.outcomes {
                assert_eq!(outcome.bytes, library.file(outcome.file - 1));
                assert_eq!(outcome.packets_from_cache, params.z);
                assert_eq!(outcome.packets_from_transmissions, params.f - params.z);
            }
        }
    }
    finish("08 decode property suite", start, Duration::from_secs(30));
}

#[test]
fn criterion_09_table_reproduction() {
    let start = Instant::now();
    let rows = compare_report(&[2], None).unwrap();
    let find = |scheme: &str, f: u64| {
        rows.iter()
            .find(|r| r.scheme == scheme && r.params.subpacketization == BigUint::from(f))
            .unwrap_or_else(|| panic!("missing {scheme} row with F={f}"))
    };
    let jcm = find("jcm", 12);
    assert_eq!(jcm.params.users, BigUint::from(4u32));
    assert_eq!(jcm.params.memory_ratio.clone().unwrap(), ratio(1, 2));
    assert_eq!(jcm.params.load, ratio(1, 1));
    let hypercube = find("hypercube", 4);
    assert_eq!(hypercube.params.users, BigUint::from(4u32));
    assert_eq!(hypercube.params.memory_ratio.clone().unwrap(), ratio(1, 2));
    assert_eq!(hypercube.params.load, ratio(2, 1));
    let proposed = find("constr-ii", 4);
    assert_eq!(proposed.params.users, BigUint::from(4u32));
    assert_eq!(proposed.params.memory_ratio.clone().unwrap(), ratio(1, 2));
    assert_eq!(proposed.params.load, ratio(1, 1));

    let rows = compare_report(&[25], None).unwrap();
    let one = rows.iter().find(|r| r.scheme == "constr-i").unwrap();
    assert_eq!(one.params.users, BigUint::from(50u32));
    assert_eq!(one.params.subpacketization, BigUint::from(625u32));
    assert_eq!(one.params.load, ratio(24, 1));
    let jcm_matched = rows
        .iter()
        .find(|r| r.scheme == "jcm" && r.params.users == BigUint::from(50u32))
        .unwrap();
    assert_eq!(jcm_matched.params.subpacketization, BigUint::from(2450u32));
    assert_eq!(jcm_matched.params.load, ratio(24, 1));
    finish("09 table reproduction", start, Duration::from_secs(1));
}

#[test]
fn criterion_10_negative_validation() {
    let start = Instant::now();
    let two_by_two = parse_entry_grid("* 1\n1 *").unwrap();
    let params = validate_pda(&two_by_two).expect("C1-C3 hold");
    assert_eq!(
        params,
        ArrayParams {
            k: 2,
            f: 2,
            z: 1,
            s: 1
        }
    );
    let violations = validate_dpda(&two_by_two, None).unwrap_err();
    assert!(
        violations
            .iter()
            .any(|v| v.condition == Condition::C4 && v.location == Location::Symbol { symbol: 1 }),
        "the sender condition must fail for symbol 1"
    );

    // Flip entry (row 1, col 2) of the reference array from 3 to 1.
    let mutated = REF_6_4_2_6.replacen("* 3 *", "* 1 *", 1);
    let violations = validate_pda(&parse_entry_grid(&mutated).unwrap()).unwrap_err();
    assert!(
        violations.iter().any(|v| v.condition == Condition::C3b
            && v.location
                == Location::Pair {
                    symbol: 1,
                    rows: (1, 2),
                    cols: (2, 3)
                }),
        "expected a crossing-star violation at rows 1,2 / cols 2,3"
    );
    finish("10 negative validation", start, Duration::from_secs(1));
}
