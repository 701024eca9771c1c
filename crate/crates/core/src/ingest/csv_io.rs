use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::NaiveDate;
use csv::{ReaderBuilder, StringRecord, Trim};

use crate::demography::AgePyramid;
use crate::error::{Error, Result};
use crate::linkage::{GdpSeries, QuarterStamp};
use crate::market::DailySeries;
use crate::series::MonthStamp;

const MAX_AGE: usize = 100;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reads all rows after checking the header; yields `(line, record)`.
fn records<R: Read>(reader: R, header: &[&str]) -> Result<Vec<(usize, StringRecord)>> {
    let mut rdr = ReaderBuilder::new()
        .has_headers(true)
        .trim(Trim::All)
        .from_reader(reader);
    let found = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if found.iter().collect::<Vec<_>>() != header {
        return Err(parse_err(
            1,
            format!("header must be '{}', found '{}'", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        // header is line 1
        let fallback = i + 2;
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(fallback);
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(fallback);
        out.push((line, rec));
    }
    Ok(out)
}

fn field<'a>(rec: &'a StringRecord, line: usize, idx: usize, name: &str) -> Result<&'a str> {
    rec.get(idx)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| parse_err(line, format!("missing {name}")))
}

fn number(rec: &StringRecord, line: usize, idx: usize, name: &str) -> Result<f64> {
    let s = field(rec, line, idx, name)?;
    let v: f64 = s
        .parse()
        .map_err(|_| parse_err(line, format!("{name} '{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("{name} '{s}' is not finite")));
    }
    Ok(v)
}

pub fn read_sp500<R: Read>(reader: R) -> Result<DailySeries> {
    let mut days: Vec<(NaiveDate, f64)> = Vec::new();
    for (line, rec) in records(reader, &["date", "close"])? {
        let s = field(&rec, line, 0, "date")?;
        let date = NaiveDate::parse_from_str(s, "%Y-%m-%d")
            .map_err(|_| parse_err(line, format!("date '{s}' is not YYYY-MM-DD")))?;
        let close = number(&rec, line, 1, "close")?;
        if let Some(&(prev, _)) = days.last() {
            if date == prev {
                return Err(parse_err(line, format!("duplicate date {date}")));
            }
            if date < prev {
                return Err(parse_err(line, format!("date {date} is earlier than {prev}")));
            }
        }
        if !(close > 0.0) {
            return Err(Error::Domain(format!("line {line}: close {close} on {date} is not positive")));
        }
        days.push((date, close));
    }
    DailySeries::new(days)
}

pub fn write_sp500<W: Write>(d: &DailySeries, mut w: W) -> Result<()> {
    writeln!(w, "date,close")?;
    for (date, close) in d.days() {
        writeln!(w, "{},{}", date.format("%Y-%m-%d"), close)?;
    }
    Ok(())
}

/// Reads single-year-of-age counts. Months absent from the file but lying
/// between two present months are filled by linear interpolation in levels
/// and flagged in the pyramid.
pub fn read_population<R: Read>(reader: R) -> Result<AgePyramid> {
    let mut cells: BTreeMap<MonthStamp, BTreeMap<usize, f64>> = BTreeMap::new();
    for (line, rec) in records(reader, &["month", "age", "population"])? {
        let month: MonthStamp = field(&rec, line, 0, "month")?
            .parse()
            .map_err(|e: Error| parse_err(line, e.to_string()))?;
        let s = field(&rec, line, 1, "age")?;
        let age: usize = s
            .parse()
            .map_err(|_| parse_err(line, format!("age '{s}' is not a non-negative integer")))?;
        if age > MAX_AGE {
            return Err(parse_err(line, format!("age {age} exceeds {MAX_AGE}")));
        }
        let count = number(&rec, line, 2, "population")?;
        if count < 0.0 {
            return Err(Error::Validation(format!(
                "line {line}: negative population {count} at {month} age {age}"
            )));
        }
        if cells.entry(month).or_default().insert(age, count).is_some() {
            return Err(parse_err(line, format!("duplicate cell {month} age {age}")));
        }
    }
    let max_age = cells
        .values()
        .flat_map(|ages| ages.keys().copied())
        .max()
        .ok_or_else(|| Error::Validation("population file has no rows".into()))?;
    let mut known: Vec<(MonthStamp, Vec<f64>)> = Vec::with_capacity(cells.len());
    for (month, ages) in cells {
        let mut row = Vec::with_capacity(max_age + 1);
        for age in 0..=max_age {
            let v = ages.get(&age).ok_or_else(|| {
                Error::Validation(format!("missing cell: month {month}, age {age}"))
            })?;
            row.push(*v);
        }
        known.push((month, row));
    }

    let start = known[0].0;
    let mut counts = Vec::new();
    let mut interpolated = Vec::new();
    for pair in known.windows(2) {
        let (m0, ref a) = pair[0];
        let (m1, ref b) = pair[1];
        let span = m0.months_until(m1);
        counts.push(a.clone());
        interpolated.push(false);
        for step in 1..span {
            let w = step as f64 / span as f64;
            counts.push(a.iter().zip(b).map(|(x, y)| x + w * (y - x)).collect());
            interpolated.push(true);
        }
    }
    let (_, last) = known.pop().expect("at least one month");
    counts.push(last);
    interpolated.push(false);
    AgePyramid::with_interpolation(start, counts, interpolated)
}

pub fn write_population<W: Write>(p: &AgePyramid, mut w: W) -> Result<()> {
    writeln!(w, "month,age,population")?;
    for (k, row) in p.counts().iter().enumerate() {
        let month = p.start().add_months(k as i64);
        for (age, v) in row.iter().enumerate() {
            writeln!(w, "{month},{age},{v}")?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GdpRow {
    pub quarter: QuarterStamp,
    pub real_gdp: f64,
    pub population: f64,
}

/// Raw quarterly GDP file contents.
#[derive(Debug, Clone, PartialEq)]
pub struct GdpTable {
    pub rows: Vec<GdpRow>,
}

impl GdpTable {
    pub fn per_capita(&self) -> Result<GdpSeries> {
        let first = self
            .rows
            .first()
            .ok_or_else(|| Error::Validation("GDP file has no rows".into()))?;
        GdpSeries::new(
            first.quarter,
            self.rows.iter().map(|r| r.real_gdp / r.population).collect(),
        )
    }
}

pub fn read_gdp_table<R: Read>(reader: R) -> Result<GdpTable> {
    let mut rows: Vec<GdpRow> = Vec::new();
    for (line, rec) in records(reader, &["quarter", "real_gdp", "population"])? {
        let quarter: QuarterStamp = field(&rec, line, 0, "quarter")?
            .parse()
            .map_err(|e: Error| parse_err(line, e.to_string()))?;
        let real_gdp = number(&rec, line, 1, "real_gdp")?;
        let population = number(&rec, line, 2, "population")?;
        if !(real_gdp > 0.0) || !(population > 0.0) {
            return Err(Error::Validation(format!(
                "line {line}: real_gdp and population must be positive"
            )));
        }
        if let Some(prev) = rows.last() {
            if quarter != prev.quarter.next() {
                return Err(Error::Validation(format!(
                    "line {line}: quarter gap, {quarter} does not follow {}",
                    prev.quarter
                )));
            }
        }
        rows.push(GdpRow {
            quarter,
            real_gdp,
            population,
        });
    }
    if rows.is_empty() {
        return Err(Error::Validation("GDP file has no rows".into()));
    }
    Ok(GdpTable { rows })
}

pub fn write_gdp_table<W: Write>(t: &GdpTable, mut w: W) -> Result<()> {
    writeln!(w, "quarter,real_gdp,population")?;
    for r in &t.rows {
        writeln!(w, "{},{},{}", r.quarter, r.real_gdp, r.population)?;
    }
    Ok(())
}
