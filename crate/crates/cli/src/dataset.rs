//! Population files: UTF-8 CSV with header `name,population[,now_seats]`.
//!
//! Numbers may carry thousands separators (`81 802 257`, `81_802_257`, or a
//! quoted `"81,802,257"`). An empty, `-` or `--` status-quo cell means the
//! state holds no seats today.

use apportion::presets::{self, Preset};
use apportion::MemberState;
use std::collections::{BTreeMap, HashSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopulationDataset {
    pub states: Vec<MemberState>,
    pub status_quo_seats: BTreeMap<String, u64>,
    pub source_label: String,
    pub snapshot_date: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: u64,
    pub message: String,
}

impl ParseError {
    fn new(line: u64, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

fn parse_count(raw: &str) -> Option<u64> {
    let digits: String = raw
        .chars()
        .filter(|c| !matches!(c, ',' | '_' | ' ' | '\'' | '\u{a0}' | '\u{202f}'))
        .collect();
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

pub fn parse_population_file(bytes: &[u8]) -> Result<PopulationDataset, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ParseError::new(0, format!("not UTF-8: {e}")))?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());

    let mut records = reader.records();
    let header = match records.next() {
        None => return Err(ParseError::new(1, "empty file: expected header name,population[,now_seats]")),
        Some(record) => record.map_err(|e| csv_error(&e))?,
    };
    let header_line = header.position().map_or(1, |p| p.line());
    let columns: Vec<String> = header.iter().map(|c| c.to_ascii_lowercase()).collect();
    let with_status_quo = match columns.as_slice() {
        [name, population] if name == "name" && population == "population" => false,
        [name, population, now] if name == "name" && population == "population" && now == "now_seats" => true,
        _ => {
            return Err(ParseError::new(
                header_line,
                format!("expected header name,population[,now_seats], found {}", columns.join(",")),
            ))
        }
    };

    let mut states = Vec::new();
    let mut status_quo_seats = BTreeMap::new();
    let mut seen = HashSet::new();
    for record in records {
        let record = record.map_err(|e| csv_error(&e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let expected = if with_status_quo { 3 } else { 2 };
        if record.len() != expected {
            return Err(ParseError::new(
                line,
                format!(
                    "expected {expected} fields, found {} (quote numbers that contain commas)",
                    record.len()
                ),
            ));
        }
        let name = record[0].to_string();
        if name.is_empty() {
            return Err(ParseError::new(line, "empty state name"));
        }
        let population = parse_count(&record[1])
            .ok_or_else(|| ParseError::new(line, format!("invalid population {:?}", &record[1])))?;
        if population == 0 {
            return Err(ParseError::new(line, format!("population of {name} must be positive")));
        }
        if !seen.insert(name.clone()) {
            return Err(ParseError::new(line, format!("duplicate state name {name}")));
        }
        if with_status_quo && !matches!(&record[2], "" | "-" | "--") {
            let seats = parse_count(&record[2])
                .ok_or_else(|| ParseError::new(line, format!("invalid now_seats {:?}", &record[2])))?;
            status_quo_seats.insert(name.clone(), seats);
        }
        states.push(MemberState { name, population });
    }
    if states.is_empty() {
        return Err(ParseError::new(header_line, "no states after the header"));
    }
    Ok(PopulationDataset {
        states,
        status_quo_seats,
        source_label: "csv".into(),
        snapshot_date: String::new(),
    })
}

fn csv_error(e: &csv::Error) -> ParseError {
    ParseError::new(e.position().map_or(0, |p| p.line()), e.to_string())
}

impl PopulationDataset {
    pub fn from_preset(preset: &Preset) -> Self {
        PopulationDataset {
            states: preset.states.clone(),
            status_quo_seats: preset.status_quo.iter().cloned().collect(),
            source_label: format!("{} ({})", preset.label, presets::SOURCE_LABEL),
            snapshot_date: presets::SNAPSHOT_DATE.into(),
        }
    }

    pub fn with_label(mut self, source_label: impl Into<String>) -> Self {
        self.source_label = source_label.into();
        self
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let with_status_quo = !self.status_quo_seats.is_empty();
        let write = |w: &mut csv::Writer<Vec<u8>>, row: &[String]| {
            w.write_record(row).expect("writing to memory");
        };
        if with_status_quo {
            write(&mut writer, &["name".into(), "population".into(), "now_seats".into()]);
        } else {
            write(&mut writer, &["name".into(), "population".into()]);
        }
        for state in &self.states {
            let mut row = vec![state.name.clone(), state.population.to_string()];
            if with_status_quo {
                row.push(
                    self.status_quo_seats
                        .get(&state.name)
                        .map_or(String::new(), u64::to_string),
                );
            }
            write(&mut writer, &row);
        }
        String::from_utf8(writer.into_inner().expect("flush to memory")).expect("utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_row() {
        let d = parse_population_file(b"name,population\nMalta,412970\n").unwrap();
        assert_eq!(d.states, vec![MemberState { name: "Malta".into(), population: 412_970 }]);
        assert!(d.status_quo_seats.is_empty());
    }

    #[test]
    fn status_quo_column() {
        let d = parse_population_file(b"name,population,now_seats\nGermany,81802257,99\nCroatia,4425747,--\n").unwrap();
        assert_eq!(d.states[0].population, 81_802_257);
        assert_eq!(d.status_quo_seats.get("Germany"), Some(&99));
        assert_eq!(d.status_quo_seats.get("Croatia"), None);
    }

    #[test]
    fn thousands_separators() {
        let d = parse_population_file(b"name,population\nGermany,\"81,802,257\"\nFrance,64 714 074\nUK,62_008_048\n").unwrap();
        let pops: Vec<u64> = d.states.iter().map(|s| s.population).collect();
        assert_eq!(pops, vec![81_802_257, 64_714_074, 62_008_048]);
    }

    #[test]
    fn empty_and_header_only_files_fail() {
        assert!(parse_population_file(b"").is_err());
        let err = parse_population_file(b"name,population\n").unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_population_file(b"name,population\nA,10\nB,0\n").unwrap_err();
        assert_eq!(err.line, 3);
        let err = parse_population_file(b"name,population\nA,10\nA,12\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("duplicate"));
        let err = parse_population_file(b"name,population\nA,10\nB,ten\n").unwrap_err();
        assert_eq!(err.line, 3);
        let err = parse_population_file(b"name,population\nA,10,3\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_population_file(b"state,people\nA,10\n").unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let d = parse_population_file(b"# snapshot\nname,population\n\nA,10\n\nB,20\n").unwrap();
        assert_eq!(d.states.len(), 2);
    }

    #[test]
    fn preset_round_trips() {
        let d = PopulationDataset::from_preset(&presets::eu29());
        let again = parse_population_file(d.to_csv().as_bytes()).unwrap();
        assert_eq!(again.states, d.states);
        assert_eq!(again.status_quo_seats, d.status_quo_seats);
    }
}
