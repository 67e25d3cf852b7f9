//! Price and return panels in the canonical long-form CSV layout.
//!
//! Prices: header `date,asset_id,adjusted_close`, one row per observation,
//! ISO-8601 dates, dot decimals, UTF-8, LF line endings. Returns use the same
//! layout with header `date,asset_id,return`. Input row order does not
//! matter; output rows are sorted by date and then asset id.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::panel::ReturnsPanel;

pub const PRICE_HEADER: [&str; 3] = ["date", "asset_id", "adjusted_close"];
pub const RETURN_HEADER: [&str; 3] = ["date", "asset_id", "return"];
const DATE_FORMAT: &str = "%Y-%m-%d";

/// Adjusted closes on a date x asset grid. Cells absent from the input are
/// `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    asset_ids: Vec<String>,
    dates: Vec<NaiveDate>,
    /// Row-major by date.
    prices: Vec<Option<f64>>,
}

impl PricePanel {
    pub fn asset_ids(&self) -> &[String] {
        &self.asset_ids
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn n_assets(&self) -> usize {
        self.asset_ids.len()
    }

    pub fn n_dates(&self) -> usize {
        self.dates.len()
    }

    pub fn price(&self, date: usize, asset: usize) -> Option<f64> {
        self.prices[date * self.n_assets() + asset]
    }

    pub fn missing_cells(&self) -> usize {
        self.prices.iter().filter(|p| p.is_none()).count()
    }

    /// Dates on which at least one asset has no price.
    pub fn gap_dates(&self) -> Vec<NaiveDate> {
        let n = self.n_assets();
        self.dates
            .iter()
            .enumerate()
            .filter(|(d, _)| self.prices[d * n..(d + 1) * n].iter().any(Option::is_none))
            .map(|(_, &date)| date)
            .collect()
    }

    /// Restricts to dates in `[from, to]` (either bound optional).
    pub fn window(&self, from: Option<NaiveDate>, to: Option<NaiveDate>) -> Result<Self> {
        let keep: Vec<usize> = (0..self.n_dates())
            .filter(|&d| {
                let date = self.dates[d];
                from.is_none_or(|f| date >= f) && to.is_none_or(|t| date <= t)
            })
            .collect();
        self.select(&(0..self.n_assets()).collect::<Vec<_>>(), &keep)
    }

    fn select(&self, assets: &[usize], dates: &[usize]) -> Result<Self> {
        if assets.is_empty() {
            return Err(Error::EmptyPanel("no assets left".into()));
        }
        if dates.is_empty() {
            return Err(Error::EmptyPanel("no dates left".into()));
        }
        let mut prices = Vec::with_capacity(assets.len() * dates.len());
        for &d in dates {
            for &a in assets {
                prices.push(self.price(d, a));
            }
        }
        Ok(Self {
            asset_ids: assets.iter().map(|&a| self.asset_ids[a].clone()).collect(),
            dates: dates.iter().map(|&d| self.dates[d]).collect(),
            prices,
        })
    }
}

fn check_header(headers: &csv::StringRecord, expected: &[&str; 3]) -> Result<()> {
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::MalformedRow {
            line: 1,
            msg: format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    Ok(())
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input)
}

struct Cell {
    line: u64,
    date: NaiveDate,
    asset: String,
    value: f64,
}

/// Parses rows of `date,asset_id,<value>` with line-numbered errors.
fn read_long<R: Read>(input: R, header: &[&str; 3]) -> Result<Vec<Cell>> {
    let mut rdr = reader(input);
    check_header(rdr.headers()?, header)?;
    let mut cells = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| match e.position() {
            Some(p) if !e.is_io_error() => Error::MalformedRow {
                line: p.line(),
                msg: e.to_string(),
            },
            _ => Error::Csv(e),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |msg: String| Error::MalformedRow { line, msg };
        if rec.len() != 3 {
            return Err(bad(format!("expected 3 fields, found {}", rec.len())));
        }
        let date = NaiveDate::parse_from_str(&rec[0], DATE_FORMAT)
            .map_err(|e| bad(format!("bad date `{}`: {e}", &rec[0])))?;
        let asset = rec[1].to_string();
        if asset.is_empty() {
            return Err(bad("empty asset_id".into()));
        }
        let value: f64 = rec[2]
            .parse()
            .map_err(|_| bad(format!("bad number `{}`", &rec[2])))?;
        if !value.is_finite() {
            return Err(bad(format!("non-finite value `{}`", &rec[2])));
        }
        cells.push(Cell {
            line,
            date,
            asset,
            value,
        });
    }
    Ok(cells)
}

type Grid = (
    Vec<String>,
    Vec<NaiveDate>,
    BTreeMap<(NaiveDate, String), f64>,
);

fn to_grid(cells: Vec<Cell>) -> Result<Grid> {
    let mut map = BTreeMap::new();
    let mut assets = BTreeSet::new();
    let mut dates = BTreeSet::new();
    for c in cells {
        assets.insert(c.asset.clone());
        dates.insert(c.date);
        if map.insert((c.date, c.asset.clone()), c.value).is_some() {
            return Err(Error::DuplicateEntry {
                line: c.line,
                date: c.date.format(DATE_FORMAT).to_string(),
                asset: c.asset,
            });
        }
    }
    if map.is_empty() {
        return Err(Error::EmptyPanel("no data rows".into()));
    }
    Ok((
        assets.into_iter().collect(),
        dates.into_iter().collect(),
        map,
    ))
}

/// Parses a canonical price CSV from any reader.
pub fn parse_price_csv<R: Read>(input: R) -> Result<PricePanel> {
    let cells = read_long(input, &PRICE_HEADER)?;
    if let Some(c) = cells.iter().find(|c| c.value <= 0.0) {
        return Err(Error::NonPositivePrice {
            line: c.line,
            asset: c.asset.clone(),
            date: c.date.format(DATE_FORMAT).to_string(),
            price: c.value,
        });
    }
    let (asset_ids, dates, map) = to_grid(cells)?;
    let mut prices = Vec::with_capacity(asset_ids.len() * dates.len());
    for d in &dates {
        for a in &asset_ids {
            prices.push(map.get(&(*d, a.clone())).copied());
        }
    }
    Ok(PricePanel {
        asset_ids,
        dates,
        prices,
    })
}

pub fn load_price_csv(path: impl AsRef<Path>) -> Result<PricePanel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_price_csv(file)
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// Emits the canonical form: sorted rows, missing cells omitted, shortest
/// round-trip decimal for each price.
pub fn write_price_csv<W: Write>(panel: &PricePanel, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(PRICE_HEADER)?;
    for (d, date) in panel.dates.iter().enumerate() {
        let date = date.format(DATE_FORMAT).to_string();
        for (a, id) in panel.asset_ids.iter().enumerate() {
            if let Some(p) = panel.price(d, a) {
                w.write_record([date.as_str(), id.as_str(), &p.to_string()])?;
            }
        }
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn save_price_csv(panel: &PricePanel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_price_csv(panel, std::io::BufWriter::new(file))
}

/// Simple returns `P_t / P_{t-1} - 1`, stamped with the later date.
pub fn to_returns(p: &PricePanel) -> Result<ReturnsPanel> {
    let missing = p.missing_cells();
    if missing > 0 {
        return Err(Error::IncompletePanel(missing));
    }
    if p.n_dates() < 2 {
        return Err(Error::InsufficientObservations {
            need: 2,
            got: p.n_dates(),
        });
    }
    let columns = (0..p.n_assets())
        .map(|a| {
            (1..p.n_dates())
                .map(|d| {
                    let (prev, cur) = (p.price(d - 1, a).unwrap(), p.price(d, a).unwrap());
                    cur / prev - 1.0
                })
                .collect()
        })
        .collect();
    ReturnsPanel::from_columns(p.asset_ids.clone(), p.dates[1..].to_vec(), columns)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroppedAsset {
    pub asset_id: String,
    pub coverage: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestReport {
    pub assets_input: usize,
    pub assets_loaded: usize,
    pub assets_dropped: usize,
    pub dropped: Vec<DroppedAsset>,
    pub dates_input: usize,
    /// Price rows kept; the returns panel has one fewer.
    pub periods: usize,
    pub dates_dropped: Vec<NaiveDate>,
    pub missing_cell_policy: String,
}

/// Drops assets observed on fewer than `min_coverage` of the dates, then
/// drops every date on which a remaining asset is still missing.
pub fn drop_incomplete_assets(
    p: &PricePanel,
    min_coverage: f64,
) -> Result<(PricePanel, IngestReport)> {
    if !(min_coverage > 0.0 && min_coverage <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "min_coverage must lie in (0, 1], got {min_coverage}"
        )));
    }
    let t = p.n_dates() as f64;
    let mut keep_assets = Vec::new();
    let mut dropped = Vec::new();
    for (a, id) in p.asset_ids.iter().enumerate() {
        let present = (0..p.n_dates())
            .filter(|&d| p.price(d, a).is_some())
            .count();
        let coverage = present as f64 / t;
        if coverage >= min_coverage {
            keep_assets.push(a);
        } else {
            dropped.push(DroppedAsset {
                asset_id: id.clone(),
                coverage,
                reason: format!("coverage {coverage:.4} below {min_coverage}"),
            });
        }
    }
    let mut keep_dates = Vec::new();
    let mut dates_dropped = Vec::new();
    for d in 0..p.n_dates() {
        if keep_assets.iter().all(|&a| p.price(d, a).is_some()) {
            keep_dates.push(d);
        } else {
            dates_dropped.push(p.dates[d]);
        }
    }
    let out = p.select(&keep_assets, &keep_dates)?;
    let report = IngestReport {
        assets_input: p.n_assets(),
        assets_loaded: keep_assets.len(),
        assets_dropped: dropped.len(),
        dropped,
        dates_input: p.n_dates(),
        periods: keep_dates.len(),
        dates_dropped,
        missing_cell_policy: "drop assets below coverage, then drop dates with any remaining gap"
            .into(),
    };
    Ok((out, report))
}

/// Returns panel in long form, header `date,asset_id,return`.
pub fn write_returns_csv<W: Write>(panel: &ReturnsPanel, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(RETURN_HEADER)?;
    for (d, date) in panel.period_stamps().iter().enumerate() {
        let date = date.format(DATE_FORMAT).to_string();
        for (a, id) in panel.asset_ids().iter().enumerate() {
            w.write_record([date.as_str(), id.as_str(), &panel.column(a)[d].to_string()])?;
        }
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn save_returns_csv(panel: &ReturnsPanel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_returns_csv(panel, std::io::BufWriter::new(file))
}

/// Parses a returns CSV; every (date, asset) cell must be present.
pub fn parse_returns_csv<R: Read>(input: R) -> Result<ReturnsPanel> {
    let cells = read_long(input, &RETURN_HEADER)?;
    let (asset_ids, dates, map) = to_grid(cells)?;
    let missing = asset_ids.len() * dates.len() - map.len();
    if missing > 0 {
        return Err(Error::IncompletePanel(missing));
    }
    let columns = asset_ids
        .iter()
        .map(|a| dates.iter().map(|d| map[&(*d, a.clone())]).collect())
        .collect();
    ReturnsPanel::from_columns(asset_ids, dates, columns)
}

pub fn load_returns_csv(path: impl AsRef<Path>) -> Result<ReturnsPanel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_returns_csv(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "date,asset_id,adjusted_close\n\
2024-10-01,AAA,100\n2024-10-01,BBB,50\n\
2024-10-02,AAA,110\n2024-10-02,BBB,50\n";

    #[test]
    fn parse_and_return() {
        let p = parse_price_csv(FIXTURE.as_bytes()).unwrap();
        assert_eq!(p.n_assets(), 2);
        assert_eq!(p.n_dates(), 2);
        let r = to_returns(&p).unwrap();
        assert_eq!(r.n_periods(), 1);
        assert!((r.column(0)[0] - 0.1).abs() < 1e-15);
        assert_eq!(r.column(1)[0], 0.0);
    }

    #[test]
    fn header_must_match() {
        let err = parse_price_csv("date,ticker,close\n2024-10-01,A,1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MalformedRow { line: 1, .. }));
    }

    #[test]
    fn bad_rows_carry_line_numbers() {
        let neg = "date,asset_id,adjusted_close\n2024-10-01,A,1\n2024-10-02,A,-3\n";
        assert!(matches!(
            parse_price_csv(neg.as_bytes()),
            Err(Error::NonPositivePrice { line: 3, .. })
        ));
        let dup = "date,asset_id,adjusted_close\n2024-10-01,A,1\n2024-10-01,A,2\n";
        assert!(matches!(
            parse_price_csv(dup.as_bytes()),
            Err(Error::DuplicateEntry { line: 3, .. })
        ));
        let date = "date,asset_id,adjusted_close\n10/01/2024,A,1\n";
        assert!(matches!(
            parse_price_csv(date.as_bytes()),
            Err(Error::MalformedRow { line: 2, .. })
        ));
        let comma = "date,asset_id,adjusted_close\n2024-10-01,A,1,5\n";
        assert!(matches!(
            parse_price_csv(comma.as_bytes()),
            Err(Error::MalformedRow { line: 2, .. })
        ));
    }

    #[test]
    fn missing_cells_block_returns() {
        let gap = "date,asset_id,adjusted_close\n2024-10-01,A,1\n2024-10-01,B,1\n2024-10-02,A,2\n";
        let p = parse_price_csv(gap.as_bytes()).unwrap();
        assert_eq!(p.missing_cells(), 1);
        assert_eq!(p.gap_dates().len(), 1);
        assert!(matches!(to_returns(&p), Err(Error::IncompletePanel(1))));
    }
}
