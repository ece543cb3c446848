//! File formats, method names and error mapping.

use std::fs;

use btf::drivers::{autocorrelation, median_by_eta, BoundaryCheck, EtaRecord, Method};
use btf::io::{fmt_f64, read_dataset, read_summary, sha256_hex, write_summary, KeyValues, SummaryRow};
use btf::CliError;
use btf_core::{Constraint, Dataset, PriorKind};
use tempfile::TempDir;

#[test]
fn summary_round_trips_exactly() {
    let tmp = TempDir::new().unwrap();
    let path = tmp.path().join("summary.csv");
    let rows: Vec<SummaryRow> = (1..=50)
        .map(|i| {
            let t = i as f64;
            SummaryRow {
                x: t,
                y: (t / 7.0).sin(),
                mean: 1.0 / 3.0 + t.ln(),
                lo: -t.sqrt() * 1e-300,
                hi: t * 1e300,
                ess: if i % 2 == 0 { f64::NAN } else { t * 0.1 },
            }
        })
        .collect();
    write_summary(&path, &rows).unwrap();
    let back = read_summary(&path).unwrap();
    for (a, b) in rows.iter().zip(&back) {
        assert_eq!(
            [a.x, a.y, a.mean, a.lo, a.hi].map(f64::to_bits),
            [b.x, b.y, b.mean, b.lo, b.hi].map(f64::to_bits)
        );
        assert!(a.ess.to_bits() == b.ess.to_bits() || (a.ess.is_nan() && b.ess.is_nan()));
    }
}

#[test]
fn float_formatting_keeps_every_bit() {
    for v in [0.1, 1.0 / 3.0, f64::MIN_POSITIVE, f64::MAX, -2.5e-17, 0.0] {
        assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
    }
    assert_eq!(fmt_f64(f64::NAN), "NaN");
}

#[test]
fn dataset_reader_accepts_spaces_and_rejects_empty_files() {
    let tmp = TempDir::new().unwrap();
    let p = tmp.path().join("d.csv");
    fs::write(&p, "x, y\n1, 2.5\n2,3e-1\n").unwrap();
    let d = read_dataset(&p).unwrap();
    assert_eq!(d, Dataset::new(vec![1.0, 2.0], vec![2.5, 0.3]).unwrap());
    fs::write(&p, "x,y\n").unwrap();
    assert_eq!(read_dataset(&p).unwrap_err().exit_code(), 3);
}

#[test]
fn key_values_skip_comments() {
    let tmp = TempDir::new().unwrap();
    let p = tmp.path().join("c.txt");
    let kv = KeyValues::parse(&p, "# note\n\n seed = 4 \nprior=hs\n").unwrap();
    assert_eq!(kv.get("seed"), Some("4"));
    assert_eq!(kv.get("prior"), Some("hs"));
    kv.write(&p).unwrap();
    assert_eq!(KeyValues::read(&p).unwrap(), kv);
    assert_eq!(KeyValues::parse(&p, "seed\n").unwrap_err().exit_code(), 2);
}

#[test]
fn checksum_matches_known_digest() {
    assert_eq!(
        sha256_hex(b"abc"),
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
    );
}

#[test]
fn errors_map_to_exit_codes() {
    let conditioning = btf_core::Error::Conditioning { pivot: 3 };
    assert_eq!(CliError::from(conditioning).exit_code(), 4);
    let wrapped = btf_core::Error::Sweep {
        sweep: 7,
        source: Box::new(btf_core::Error::Conditioning { pivot: 1 }),
    };
    assert_eq!(CliError::from(wrapped).exit_code(), 4);
    assert_eq!(CliError::from(btf_core::Error::EmptyDraws).exit_code(), 1);
    assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
}

#[test]
fn method_names() {
    let m = Method::parse("hsni").unwrap();
    assert_eq!((m.prior, m.constraint), (PriorKind::Horseshoe, Constraint::NearlyIncreasing));
    assert_eq!(m.name, "hsni");
    let list = Method::parse_list("lap, NOR,").unwrap();
    assert_eq!(list.iter().map(|m| m.name.as_str()).collect::<Vec<_>>(), ["lap", "nor"]);
    assert!(Method::parse("ridge").is_err());
    assert!(Method::parse("ni").is_err());
}

#[test]
fn boundary_check_counts_violations() {
    let data = Dataset::new(vec![1.0, 2.0, 3.0, 4.0], vec![1.0, 1.0, 1.0, 1.0]).unwrap();
    let b = BoundaryCheck::new(&[1.0, 1.5, 0.99, 2.0], &data);
    assert_eq!(b.feasible, 0.75);
    assert!((b.max_violation - 0.01).abs() < 1e-12);
    assert!(!b.passes(500.0));
    let all = BoundaryCheck::new(&[1.0; 4], &data);
    assert!(all.passes(500.0));
}

#[test]
fn autocorrelation_of_alternating_series() {
    let xs: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let acf = autocorrelation(&xs, 2);
    assert_eq!(acf.len(), 3);
    assert!((acf[0] - 1.0).abs() < 1e-12);
    assert!((acf[1] + 0.99).abs() < 1e-12);
    assert!((acf[2] - 0.98).abs() < 1e-12);
}

#[test]
fn medians_per_eta() {
    let rec = |eta: f64, rep: usize, rmse: f64| EtaRecord {
        eta,
        rep,
        rmse,
        boundary: BoundaryCheck {
            feasible: 1.0,
            max_violation: 0.0,
        },
    };
    let records = [rec(100.0, 0, 3.0), rec(100.0, 1, 1.0), rec(200.0, 0, 2.0), rec(100.0, 2, 2.0)];
    assert_eq!(median_by_eta(&records, &[100.0, 200.0]), vec![(100.0, 2.0), (200.0, 2.0)]);
}
