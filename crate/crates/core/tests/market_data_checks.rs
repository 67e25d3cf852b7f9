use std::path::PathBuf;

use isocorr::market_data::{
    drop_incomplete_assets, load_price_csv, parse_price_csv, parse_returns_csv, to_returns,
    write_price_csv, write_returns_csv,
};
use isocorr::Error;
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn emit(panel: &isocorr::market_data::PricePanel) -> String {
    let mut buf = Vec::new();
    write_price_csv(panel, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn golden_fixture_loads() {
    let p = load_price_csv(fixture("prices_3x5.csv")).unwrap();
    assert_eq!(p.asset_ids(), ["AAPL", "MSFT", "XOM"]);
    assert_eq!(p.n_dates(), 5);
    assert_eq!(p.missing_cells(), 0);
    assert_eq!(p.price(2, 2), Some(121.06));
}

#[test]
fn row_order_does_not_matter() {
    let a = load_price_csv(fixture("prices_3x5.csv")).unwrap();
    let b = load_price_csv(fixture("prices_3x5_shuffled.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn canonical_round_trip_is_byte_exact() {
    for name in ["prices_3x5.csv", "fetcher_golden.csv"] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let p = parse_price_csv(text.as_bytes()).unwrap();
        assert_eq!(emit(&p), text, "{name}");
    }
    let shuffled = load_price_csv(fixture("prices_3x5_shuffled.csv")).unwrap();
    let canonical = std::fs::read_to_string(fixture("prices_3x5.csv")).unwrap();
    assert_eq!(emit(&shuffled), canonical);
}

#[test]
fn fetcher_contract_fixture() {
    let p = load_price_csv(fixture("fetcher_golden.csv")).unwrap();
    assert_eq!(p.n_assets(), 2);
    assert_eq!(p.n_dates(), 5);
    let text = std::fs::read_to_string(fixture("fetcher_golden.csv")).unwrap();
    assert!(text.starts_with("date,asset_id,adjusted_close\n"));
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn negative_price_names_the_row() {
    let err = load_price_csv(fixture("prices_negative.csv")).unwrap_err();
    match &err {
        Error::NonPositivePrice { line, asset, .. } => {
            assert_eq!(*line, 9);
            assert_eq!(asset, "MSFT");
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(err.to_string().contains("line 9"));
}

#[test]
fn missing_file_names_the_path() {
    let err = load_price_csv("/nonexistent/prices.csv").unwrap_err();
    assert_eq!(err.kind(), isocorr::ErrorKind::Io);
    assert!(err.to_string().contains("/nonexistent/prices.csv"));
}

#[test]
fn returns_have_one_fewer_row_and_same_assets() {
    let p = load_price_csv(fixture("prices_3x5.csv")).unwrap();
    let r = to_returns(&p).unwrap();
    assert_eq!(r.n_periods(), p.n_dates() - 1);
    assert_eq!(r.asset_ids(), p.asset_ids());
    assert_eq!(r.period_stamps(), &p.dates()[1..]);
    assert!((r.column(0)[0] - (226.78 / 226.21 - 1.0)).abs() < 1e-15);
}

#[test]
fn simple_return_reference_values() {
    let text = "date,asset_id,adjusted_close\n2024-01-02,X,100\n2024-01-03,X,110\n2024-01-02,Y,5\n2024-01-03,Y,5\n";
    let r = to_returns(&parse_price_csv(text.as_bytes()).unwrap()).unwrap();
    assert!((r.column(0)[0] - 0.10).abs() < 1e-15);
    assert_eq!(r.column(1)[0], 0.0);
}

#[test]
fn returns_csv_round_trip() {
    let p = load_price_csv(fixture("prices_3x5.csv")).unwrap();
    let r = to_returns(&p).unwrap();
    let mut buf = Vec::new();
    write_returns_csv(&r, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("date,asset_id,return\n"));
    let back = parse_returns_csv(text.as_bytes()).unwrap();
    assert_eq!(back, r);
    let mut again = Vec::new();
    write_returns_csv(&back, &mut again).unwrap();
    assert_eq!(String::from_utf8(again).unwrap(), text);
}

#[test]
fn complete_panel_drops_nothing() {
    let p = load_price_csv(fixture("prices_3x5.csv")).unwrap();
    let (q, report) = drop_incomplete_assets(&p, 0.9).unwrap();
    assert_eq!(q, p);
    assert_eq!(report.assets_dropped, 0);
    assert!(report.dates_dropped.is_empty());
}

fn expect_dropped_at(min: f64, coverage: &dyn Fn(&str) -> f64) -> Vec<&'static str> {
    ["AAA", "BBB", "CCC"]
        .into_iter()
        .filter(|a| coverage(a) < min)
        .collect()
}

#[test]
fn coverage_report_matches_recount() {
    let p = load_price_csv(fixture("prices_gappy.csv")).unwrap();
    // brute-force recount from the raw rows
    let text = std::fs::read_to_string(fixture("prices_gappy.csv")).unwrap();
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    let mut dates: Vec<&str> = rows.iter().map(|r| r[0]).collect();
    dates.sort();
    dates.dedup();
    let coverage =
        |asset: &str| rows.iter().filter(|r| r[1] == asset).count() as f64 / dates.len() as f64;
    assert_eq!(coverage("CCC"), 0.5);
    assert_eq!(expect_dropped_at(0.9, &coverage), ["BBB", "CCC"]);

    let (q, report) = drop_incomplete_assets(&p, 0.8).unwrap();
    let expect_dropped: Vec<&str> = ["AAA", "BBB", "CCC"]
        .into_iter()
        .filter(|a| coverage(a) < 0.8)
        .collect();
    assert_eq!(
        report
            .dropped
            .iter()
            .map(|d| d.asset_id.as_str())
            .collect::<Vec<_>>(),
        expect_dropped
    );
    assert_eq!(report.assets_loaded + report.assets_dropped, 3);
    // BBB missing on 2024-10-04 -> that date goes
    assert_eq!(report.dates_dropped.len(), 1);
    assert_eq!(q.n_dates(), 5);
    assert_eq!(report.periods, 5);
    assert_eq!(q.missing_cells(), 0);
    assert!(to_returns(&q).is_ok());

    let (_, strict) = drop_incomplete_assets(&p, 0.9).unwrap();
    assert_eq!(strict.assets_dropped, 2);
    let (_, loose) = drop_incomplete_assets(&p, 0.5).unwrap();
    assert_eq!(loose.assets_dropped, 0);
    assert_eq!(loose.periods, 2);
    assert!(drop_incomplete_assets(&p, 0.0).is_err());
}

#[test]
fn window_trims_dates() {
    let p = load_price_csv(fixture("prices_3x5.csv")).unwrap();
    let d = |s: &str| chrono::NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap();
    let w = p
        .window(Some(d("2024-10-02")), Some(d("2024-10-04")))
        .unwrap();
    assert_eq!(w.n_dates(), 3);
    assert!(p.window(Some(d("2025-01-01")), None).is_err());
}

proptest! {
    #[test]
    fn simple_returns_match_log_identity(prices in prop::collection::vec(0.01f64..1e4, 2..30)) {
        let mut text = String::from("date,asset_id,adjusted_close\n");
        let start = chrono::NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        for (i, p) in prices.iter().enumerate() {
            let day = start + chrono::Days::new(i as u64);
            text.push_str(&format!("{day},Z,{p}\n"));
        }
        let panel = parse_price_csv(text.as_bytes()).unwrap();
        prop_assert_eq!(emit(&panel), text.clone());
        let r = to_returns(&panel).unwrap();
        for (i, ret) in r.column(0).iter().enumerate() {
            let via_log = ((prices[i + 1].ln() - prices[i].ln()).exp()) - 1.0;
            prop_assert!((ret - via_log).abs() <= 1e-12 * (1.0 + ret.abs()));
        }
    }
}
