use std::fs;
use std::path::PathBuf;

use ebel::bel::BlockRule;
use ebel::blocking::{BlockScheme, WeightFn};
use ebel::io::{read_quantile_csv, read_series_csv, write_quantile_csv, MethodSpec};
use ebel::limit_law::Discretization;
use ebel::processes::Process;

fn corpus(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<_> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(!files.is_empty(), "no seeds in {}", dir.display());
    files.into_iter().map(|p| fs::read(p).unwrap()).collect()
}

fn reparses<T>(text: &str) -> bool
where
    T: std::str::FromStr + std::fmt::Display,
{
    match text.parse::<T>() {
        Ok(v) => {
            let again: T = v.to_string().parse().ok().expect("display output reparses");
            assert_eq!(again.to_string(), v.to_string());
            true
        }
        Err(_) => false,
    }
}

#[test]
fn series_seeds() {
    let accepted = corpus("series_csv").iter().filter(|s| read_series_csv(s.as_slice()).is_ok()).count();
    assert_eq!(accepted, 2);
}

#[test]
fn quantile_seeds_round_trip() {
    let mut accepted = 0;
    for seed in corpus("quantile_csv") {
        if let Ok(table) = read_quantile_csv(seed.as_slice()) {
            let mut out = Vec::new();
            write_quantile_csv(&table, &[], &mut out).unwrap();
            assert_eq!(read_quantile_csv(out.as_slice()).unwrap(), table);
            accepted += 1;
        }
    }
    assert_eq!(accepted, 2);
}

#[test]
fn spec_seeds_round_trip() {
    let text = |t: &str| -> Vec<String> { corpus(t).into_iter().map(|s| String::from_utf8(s).unwrap()).collect() };
    assert_eq!(text("weight_spec").iter().filter(|s| reparses::<WeightFn>(s)).count(), 6);
    assert_eq!(text("process_spec").iter().filter(|s| reparses::<Process>(s)).count(), 7);
    assert_eq!(text("method_spec").iter().filter(|s| reparses::<MethodSpec>(s)).count(), 6);
    for s in text("scheme_spec") {
        if let Ok(r) = s.parse::<BlockRule>() {
            assert_eq!(r.to_string().parse::<BlockRule>().unwrap(), r);
        }
        if let Ok(b) = s.parse::<BlockScheme>() {
            assert_eq!(b.name().parse::<BlockScheme>().unwrap(), b);
        }
        if let Ok(d) = s.parse::<Discretization>() {
            assert_eq!(d.name().parse::<Discretization>().unwrap(), d);
        }
    }
}
