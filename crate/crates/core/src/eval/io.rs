//! CSV formats.
//!
//! Gold set: header `id,topic,text`.
//! Mapping: header `gen_id,gold_id,relevant,shared`, optionally followed by
//! a `review` column. Empty cells mean "not given"; booleans are `true` or
//! `false`; `review` is empty or `unreviewed`.

use thiserror::Error;

use super::{GoldRequirement, MappingRecord};

pub const GOLD_HEADER: [&str; 3] = ["id", "topic", "text"];
pub const MAPPING_HEADER: [&str; 4] = ["gen_id", "gold_id", "relevant", "shared"];
const REVIEW_COLUMN: &str = "review";
const UNREVIEWED: &str = "unreviewed";

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {reason}")]
pub struct CsvError {
    pub line: u64,
    pub reason: String,
}

fn err(line: u64, reason: impl Into<String>) -> CsvError {
    CsvError {
        line,
        reason: reason.into(),
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
}

fn check_header(rdr: &mut csv::Reader<&[u8]>, allowed: &[&[&str]]) -> Result<usize, CsvError> {
    let header = rdr.headers().map_err(|e| err(1, e.to_string()))?.clone();
    let got: Vec<&str> = header.iter().collect();
    allowed
        .iter()
        .find(|h| **h == got.as_slice())
        .map(|h| h.len())
        .ok_or_else(|| {
            err(
                header.position().map_or(1, |p| p.line()),
                format!("header {:?}, expected {:?}", got.join(","), allowed[0].join(",")),
            )
        })
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

fn opt(cell: &str) -> Option<String> {
    (!cell.is_empty()).then(|| cell.to_string())
}

fn parse_bool(cell: &str, column: &str, line: u64) -> Result<Option<bool>, CsvError> {
    match cell.to_ascii_lowercase().as_str() {
        "" => Ok(None),
        "true" => Ok(Some(true)),
        "false" => Ok(Some(false)),
        other => Err(err(line, format!("{column}: expected true, false or empty, got {other:?}"))),
    }
}

pub fn read_gold(text: &str) -> Result<Vec<GoldRequirement>, CsvError> {
    let mut rdr = reader(text);
    check_header(&mut rdr, &[&GOLD_HEADER])?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = line_of(&rec);
        let (id, topic, text) = (&rec[0], &rec[1], &rec[2]);
        if id.is_empty() || text.is_empty() {
            return Err(err(line, "id and text must not be empty"));
        }
        out.push(GoldRequirement {
            id: id.to_string(),
            topic: topic.to_string(),
            text: text.to_string(),
        });
    }
    Ok(out)
}

pub fn read_mapping(text: &str) -> Result<Vec<MappingRecord>, CsvError> {
    let with_review: Vec<&str> = MAPPING_HEADER.iter().copied().chain([REVIEW_COLUMN]).collect();
    let mut rdr = reader(text);
    let columns = check_header(&mut rdr, &[&MAPPING_HEADER, &with_review])?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = line_of(&rec);
        if rec[0].is_empty() {
            return Err(err(line, "gen_id must not be empty"));
        }
        let unreviewed = match (columns, rec.get(4)) {
            (5, Some(UNREVIEWED)) => true,
            (5, Some("")) | (4, None) => false,
            (_, other) => return Err(err(line, format!("review: unexpected value {other:?}"))),
        };
        out.push(MappingRecord {
            gen_id: rec[0].to_string(),
            gold_id: opt(&rec[1]),
            relevant: parse_bool(&rec[2], "relevant", line)?,
            shared: parse_bool(&rec[3], "shared", line)?,
            unreviewed,
        });
    }
    Ok(out)
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 input")
}

pub fn write_gold(gold: &[GoldRequirement]) -> String {
    let mut w = writer();
    w.write_record(GOLD_HEADER).expect("in-memory write");
    for g in gold {
        w.write_record([&g.id, &g.topic, &g.text]).expect("in-memory write");
    }
    finish(w)
}

pub fn write_mapping(mapping: &[MappingRecord]) -> String {
    let review = mapping.iter().any(|m| m.unreviewed);
    let b = |v: Option<bool>| v.map_or(String::new(), |v| v.to_string());
    let mut w = writer();
    let mut header: Vec<&str> = MAPPING_HEADER.to_vec();
    if review {
        header.push(REVIEW_COLUMN);
    }
    w.write_record(&header).expect("in-memory write");
    for m in mapping {
        let mut row = vec![
            m.gen_id.clone(),
            m.gold_id.clone().unwrap_or_default(),
            b(m.relevant),
            b(m.shared),
        ];
        if review {
            row.push(if m.unreviewed { UNREVIEWED.into() } else { String::new() });
        }
        w.write_record(&row).expect("in-memory write");
    }
    finish(w)
}
