//! Reference configurations with known answers.

use chrono::{NaiveDate, NaiveDateTime};

use crate::engine::{Scenario, VentDensity};
use crate::io::weather::WeatherRecord;
use crate::network::{
    density, CpTable, LargeOpening, MechanicalVent, NetworkDescription, SmallOpening, Zone, DEFAULT_RHO_REF, GRAVITY,
    STANDARD_RHO_REF,
};
use crate::solver::SolverOptions;

pub const STACK_PERMEABILITY: f64 = 0.5;
pub const STACK_EXPONENT: f64 = 0.67;
pub const STACK_LOW: f64 = 0.5;
pub const STACK_HIGH: f64 = 2.5;
pub const STACK_INDOOR_C: f64 = 0.0;
pub const OUTDOOR_C: f64 = 25.0;
pub const WIND_SPEED: f64 = 2.0;
/// Wind from the south.
pub const WIND_DIRECTION: f64 = 180.0;

/// Nominal extraction of the ventilation day, m³/h.
pub const VMC_NOMINAL: f64 = 3000.0;

/// Hourly fraction of nominal extraction: off, 10 %, 100 %, off.
pub fn vmc_fraction(hour: usize) -> f64 {
    match hour {
        7..=12 => 0.1,
        13..=18 => 1.0,
        _ => 0.0,
    }
}

pub fn south_facade() -> CpTable {
    CpTable::new("south", vec![(0.0, -0.3), (180.0, 0.7)]).expect("valid table")
}

pub fn north_facade() -> CpTable {
    CpTable::new("north", vec![(0.0, 0.7), (180.0, -0.3)]).expect("valid table")
}

fn reference_day() -> NaiveDate {
    NaiveDate::from_ymd_opt(2024, 6, 21).expect("valid date")
}

pub fn hour_of(day: NaiveDate, hour: u32) -> NaiveDateTime {
    day.and_hms_opt(hour, 0, 0).expect("hour in range")
}

/// 24 hourly records at 25 °C with a 2 m/s southerly wind.
pub fn artificial_day() -> Vec<WeatherRecord> {
    (0..24)
        .map(|h| WeatherRecord {
            timestamp: hour_of(reference_day(), h),
            exterior_temperature: OUTDOOR_C,
            wind_speed: WIND_SPEED,
            wind_direction: WIND_DIRECTION,
        })
        .collect()
}

/// One zone at 0 °C with two openings on the south wall.
pub fn stack_case() -> Scenario {
    let desc = NetworkDescription {
        zones: vec![Zone::new(1, "enclosure", 0.0)],
        small_openings: vec![
            SmallOpening::new(1, 0, 1, STACK_LOW, STACK_PERMEABILITY, STACK_EXPONENT, Some(south_facade())),
            SmallOpening::new(2, 0, 1, STACK_HIGH, STACK_PERMEABILITY, STACK_EXPONENT, Some(south_facade())),
        ],
        ..Default::default()
    };
    Scenario::new(desc, DEFAULT_RHO_REF, SolverOptions::default(), &[vec![STACK_INDOOR_C]], VentDensity::ZoneAir)
        .expect("valid case")
}

/// Through-flow of a single zone with two identical openings driven by
/// buoyancy alone: the neutral plane sits midway, so each opening sees half
/// of the column pressure difference.
pub fn stack_closed_form(k: f64, n: f64, t_inside: f64, t_outside: f64, z1: f64, z2: f64, rho_ref: f64) -> f64 {
    let drho = density(t_inside, rho_ref) - density(t_outside, rho_ref);
    k * (drho.abs() / 2.0 * GRAVITY * (z1 - z2).abs()).powf(n)
}

/// The stack case value under this crate's density convention.
pub fn stack_expected() -> f64 {
    stack_closed_form(
        STACK_PERMEABILITY,
        STACK_EXPONENT,
        STACK_INDOOR_C,
        OUTDOOR_C,
        STACK_LOW,
        STACK_HIGH,
        DEFAULT_RHO_REF,
    )
}

/// One zone at outdoor temperature, a windward opening low on the south
/// wall, a leeward one high on the north wall, and scheduled extraction.
pub fn vmc_day() -> Scenario {
    let rates: Vec<f64> = (0..24).map(|h| VMC_NOMINAL * vmc_fraction(h)).collect();
    let desc = NetworkDescription {
        zones: vec![Zone::new(1, "enclosure", 0.0)],
        small_openings: vec![
            SmallOpening::new(1, 0, 1, STACK_LOW, STACK_PERMEABILITY, STACK_EXPONENT, Some(south_facade())),
            SmallOpening::new(2, 0, 1, STACK_HIGH, STACK_PERMEABILITY, STACK_EXPONENT, Some(north_facade())),
        ],
        large_openings: vec![],
        vents: vec![MechanicalVent::new(1, &rates).expect("24 rates")],
    };
    Scenario::new(desc, STANDARD_RHO_REF, SolverOptions::default(), &[vec![OUTDOOR_C]], VentDensity::Reference)
        .expect("valid case")
}

pub const DOORWAY_COLD_C: f64 = 0.0;
pub const DOORWAY_WARM_C: f64 = 25.0;
pub const DOORWAY_HEIGHT: f64 = 2.0;
pub const DOORWAY_WIDTH: f64 = 1.0;

/// Cold and warm rooms joined by a 2 m × 1 m doorway, each with the same
/// small crack to a calm exterior.
pub fn counterflow_doorway() -> Scenario {
    let calm = CpTable::uniform("calm", 0.0).expect("valid table");
    let desc = NetworkDescription {
        zones: vec![Zone::new(1, "cold", 0.0), Zone::new(2, "warm", 0.0)],
        small_openings: vec![
            SmallOpening::new(1, 0, 1, 1.0, 0.01, 0.65, Some(calm.clone())),
            SmallOpening::new(2, 0, 2, 1.0, 0.01, 0.65, Some(calm)),
        ],
        large_openings: vec![LargeOpening::new(3, 1, 2, 0.0, DOORWAY_HEIGHT, DOORWAY_WIDTH, None)],
        vents: vec![],
    };
    Scenario::new(
        desc,
        DEFAULT_RHO_REF,
        SolverOptions::default(),
        &[vec![DOORWAY_COLD_C], vec![DOORWAY_WARM_C]],
        VentDensity::ZoneAir,
    )
    .expect("valid case")
}

/// A single calm record at the doorway's mean temperature.
pub fn doorway_weather() -> WeatherRecord {
    WeatherRecord {
        timestamp: hour_of(reference_day(), 12),
        exterior_temperature: (DOORWAY_COLD_C + DOORWAY_WARM_C) / 2.0,
        wind_speed: 0.0,
        wind_direction: 0.0,
    }
}
