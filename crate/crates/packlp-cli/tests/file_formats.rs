//! Instance and solution files must round-trip bit-exactly and reject
//! malformed or invariant-violating input with useful positions.

use std::io::Write;

use packlp_cli::io::{read_instance, read_solution, write_instance, write_solution, IoError};
use packlp_core::gen::{generate_random, BRule, RandomSpec};
use packlp_core::rng::SplitMix64;
use packlp_core::PackingLp;
use tempfile::tempdir;

#[test]
fn instance_round_trip_is_bit_exact() {
    let dir = tempdir().unwrap();
    let spec = RandomSpec {
        m: 10,
        n: 50,
        density: 0.6,
        b_rule: BRule::FractionOfN(0.1),
        c_range: (1.0, 100.0),
        seed: 424242,
    };
    let lp = generate_random(&spec).unwrap();
    let path = dir.path().join("inst.lp");
    write_instance(&lp, &path).unwrap();
    let back = read_instance(&path).unwrap();
    assert_eq!(lp, back);
}

#[test]
fn empty_matrix_round_trips() {
    let dir = tempdir().unwrap();
    let lp = PackingLp::from_entries(2, 3, &[], vec![1.0, 2.0], vec![0.5, 0.25, 0.125]).unwrap();
    let path = dir.path().join("empty.lp");
    write_instance(&lp, &path).unwrap();
    assert_eq!(read_instance(&path).unwrap(), lp);
}

#[test]
fn awkward_doubles_survive() {
    // Values chosen to lose digits under any formatting shorter than 17
    // significant digits.
    let dir = tempdir().unwrap();
    let entries = [
        (0usize, 0usize, 0.1 + 0.2),
        (0, 1, 1.0 / 3.0),
        (0, 2, f64::MIN_POSITIVE),
        (0, 3, 1.0 - f64::EPSILON),
    ];
    let lp = PackingLp::from_entries(
        1,
        4,
        &entries,
        vec![std::f64::consts::PI],
        vec![std::f64::consts::E, 2.0f64.sqrt(), 1e-300, 123.456789012345678],
    )
    .unwrap();
    let path = dir.path().join("awkward.lp");
    write_instance(&lp, &path).unwrap();
    assert_eq!(read_instance(&path).unwrap(), lp);
}

#[test]
fn coefficient_above_one_is_rejected() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("bad.lp");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "1 2 1").unwrap();
    writeln!(f, "1.0").unwrap();
    writeln!(f, "1.0 2.0").unwrap();
    writeln!(f, "0 0 1.5").unwrap();
    drop(f);
    match read_instance(&path) {
        Err(IoError::Validation { .. }) => {}
        other => panic!("expected validation error, got {other:?}"),
    }
}

#[test]
fn duplicate_entry_is_rejected() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("dup.lp");
    std::fs::write(&path, "1 2 2\n1.0\n1.0 2.0\n0 0 0.5\n0 0 0.25\n").unwrap();
    match read_instance(&path) {
        Err(IoError::Validation { .. }) => {}
        other => panic!("expected validation error, got {other:?}"),
    }
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("broken.lp");
    std::fs::write(&path, "2 2 1\n1.0 2.0\n1.0 oops\n0 0 0.5\n").unwrap();
    match read_instance(&path) {
        Err(IoError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected parse error, got {other:?}"),
    }

    std::fs::write(&path, "2 2\n").unwrap();
    match read_instance(&path) {
        Err(IoError::Parse { line, .. }) => assert_eq!(line, 1),
        other => panic!("expected parse error, got {other:?}"),
    }

    // Truncated entry list.
    std::fs::write(&path, "1 1 2\n1.0\n1.0\n0 0 0.5\n").unwrap();
    match read_instance(&path) {
        Err(IoError::Parse { line, msg }) => {
            assert_eq!(line, 5);
            assert!(msg.contains("end of file"));
        }
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn solution_round_trip() {
    let dir = tempdir().unwrap();
    let mut rng = SplitMix64::new(9);
    let x: Vec<f64> = (0..200).map(|_| rng.next_f64()).collect();
    let path = dir.path().join("sol.txt");
    write_solution(&x, &path).unwrap();
    assert_eq!(read_solution(&path, Some(200)).unwrap(), x);
    assert!(read_solution(&path, Some(199)).is_err());
}
