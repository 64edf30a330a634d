//! Hourly (or sub-hourly) weather CSV.
//!
//! Header `timestamp,t_ext_c,wind_ms,wind_deg`; extra columns such as
//! radiation are ignored. Timestamps are ISO-8601 local date-times.

use std::path::Path;

use chrono::NaiveDateTime;

#[derive(Debug, Clone, PartialEq)]
pub struct WeatherRecord {
    pub timestamp: NaiveDateTime,
    /// Outdoor dry-bulb temperature, °C.
    pub exterior_temperature: f64,
    /// m/s, >= 0.
    pub wind_speed: f64,
    /// Direction the wind blows from, degrees in [0, 360).
    pub wind_direction: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum WeatherError {
    #[error("cannot read weather file: {0}")]
    Io(#[from] std::io::Error),
    #[error("weather file is missing column '{0}'")]
    MissingColumn(&'static str),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("line {line}: timestamp {timestamp} is not after the previous record")]
    NonMonotone { line: u64, timestamp: NaiveDateTime },
    #[error("weather file has no data rows")]
    Empty,
}

pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

const ACCEPTED_FORMATS: [&str; 4] = ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M"];

pub fn parse_timestamp(text: &str) -> Option<NaiveDateTime> {
    let text = text.trim();
    ACCEPTED_FORMATS.iter().find_map(|f| NaiveDateTime::parse_from_str(text, f).ok())
}

pub fn format_timestamp(t: &NaiveDateTime) -> String {
    t.format(TIMESTAMP_FORMAT).to_string()
}

pub fn parse_weather(path: impl AsRef<Path>) -> Result<Vec<WeatherRecord>, WeatherError> {
    let text = std::fs::read_to_string(path)?;
    parse_weather_str(&text)
}

pub fn parse_weather_str(text: &str) -> Result<Vec<WeatherRecord>, WeatherError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| WeatherError::Row { line: 1, message: e.to_string() })?.clone();
    let column = |name: &'static str| headers.iter().position(|h| h == name).ok_or(WeatherError::MissingColumn(name));
    let cols = [column("timestamp")?, column("t_ext_c")?, column("wind_ms")?, column("wind_deg")?];

    let mut records: Vec<WeatherRecord> = Vec::new();
    for row in reader.records() {
        let row =
            row.map_err(|e| WeatherError::Row { line: e.position().map_or(0, |p| p.line()), message: e.to_string() })?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| row.get(cols[i]).unwrap_or("");
        let number = |i: usize, name: &str| -> Result<f64, WeatherError> {
            field(i)
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| WeatherError::Row { line, message: format!("bad {name} '{}'", field(i)) })
        };
        let timestamp = parse_timestamp(field(0))
            .ok_or_else(|| WeatherError::Row { line, message: format!("bad timestamp '{}'", field(0)) })?;
        let exterior_temperature = number(1, "t_ext_c")?;
        if exterior_temperature <= -crate::network::CELSIUS_OFFSET {
            return Err(WeatherError::Row {
                line,
                message: format!("temperature {exterior_temperature} below absolute zero"),
            });
        }
        let wind_speed = number(2, "wind_ms")?;
        if wind_speed < 0.0 {
            return Err(WeatherError::Row { line, message: format!("negative wind speed {wind_speed}") });
        }
        let wind_direction = number(3, "wind_deg")?.rem_euclid(360.0);
        if let Some(prev) = records.last() {
            if timestamp <= prev.timestamp {
                return Err(WeatherError::NonMonotone { line, timestamp });
            }
        }
        records.push(WeatherRecord { timestamp, exterior_temperature, wind_speed, wind_direction });
    }
    if records.is_empty() {
        return Err(WeatherError::Empty);
    }
    Ok(records)
}

/// Serializes records in the same CSV dialect.
pub fn write_weather_string(records: &[WeatherRecord]) -> String {
    let mut out = String::from("timestamp,t_ext_c,wind_ms,wind_deg\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_timestamp(&r.timestamp),
            r.exterior_temperature,
            r.wind_speed,
            r.wind_direction
        ));
    }
    out
}
