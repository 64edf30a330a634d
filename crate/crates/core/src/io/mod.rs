//! File formats: weather input, scenario descriptions and result tables.

pub mod results;
pub mod scenario;
pub mod weather;

pub use results::{write_results, ResultsError};
pub use scenario::{parse_scenario, parse_scenario_str, write_scenario, ScenarioError};
pub use weather::{parse_weather, parse_weather_str, WeatherError, WeatherRecord};
