//! Static description of an airflow network: zones, openings, wind pressure
//! coefficient tables and mechanical extraction vents.
//!
//! The raw description ([`NetworkDescription`]) may contain large openings.
//! [`build_network`] turns it into the canonical [`AirflowNetwork`], in which
//! every large opening has been replaced by its two equivalent small openings
//! and every flow element carries a sequential index.

use std::fmt;

/// Absolute zero offset between Celsius and Kelvin.
pub const CELSIUS_OFFSET: f64 = 273.15;

/// Default reference density of air at 0 °C, kg/m³.
pub const DEFAULT_RHO_REF: f64 = 1.2;

/// Alternative reference density of dry air at 0 °C and 101325 Pa, kg/m³.
pub const STANDARD_RHO_REF: f64 = 1.293;

/// Gravitational acceleration, m/s².
pub const GRAVITY: f64 = 9.81;

/// Relative height of the lower equivalent opening of a large opening.
pub const WALTON_LOWER_FRACTION: f64 = 5.0 / 18.0;
/// Relative height of the upper equivalent opening of a large opening.
pub const WALTON_UPPER_FRACTION: f64 = 13.0 / 18.0;
/// Discharge coefficient of the equivalent openings.
pub const WALTON_DISCHARGE_COEFFICIENT: f64 = 0.78;
/// Flow exponent of the equivalent openings.
pub const WALTON_EXPONENT: f64 = 0.5;

/// Index of a node in the network. `0` is the exterior.
pub type ZoneId = usize;

/// Node index reserved for the outdoor environment.
pub const EXTERIOR: ZoneId = 0;

/// Air density at `temperature` (°C) from the density at 0 °C.
pub fn air_density(temperature: f64, rho_ref: f64) -> Result<f64, NetworkError> {
    if !temperature.is_finite() || temperature <= -CELSIUS_OFFSET {
        return Err(NetworkError::NonPhysicalTemperature(temperature));
    }
    Ok(density(temperature, rho_ref))
}

/// Unchecked density law, for temperatures already validated.
#[inline]
pub(crate) fn density(temperature: f64, rho_ref: f64) -> f64 {
    rho_ref * CELSIUS_OFFSET / (CELSIUS_OFFSET + temperature)
}

/// Identifies the component an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Zone(usize),
    Opening(usize),
    LargeOpening(usize),
    Vent(ZoneId),
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Zone(id) => write!(f, "zone {id}"),
            Component::Opening(id) => write!(f, "opening {id}"),
            Component::LargeOpening(id) => write!(f, "large opening {id}"),
            Component::Vent(zone) => write!(f, "vent on zone {zone}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NetworkError {
    #[error("non-physical temperature {0} °C")]
    NonPhysicalTemperature(f64),
    #[error("cp table '{name}' has no entries")]
    EmptyCpTable { name: String },
    #[error("cp table '{name}': azimuth {azimuth} outside [0, 360) or not finite")]
    CpAzimuthRange { name: String, azimuth: f64 },
    #[error("cp table '{name}': azimuths must be strictly increasing")]
    CpAzimuthOrder { name: String },
    #[error("cp table '{name}': non-finite coefficient")]
    CpValue { name: String },
    #[error("duplicate zone id {0}")]
    DuplicateZone(usize),
    #[error("duplicate opening id {0}")]
    DuplicateOpening(usize),
    #[error("zone ids must be contiguous from 1 to {count}; missing {missing}")]
    NonContiguousZones { count: usize, missing: usize },
    #[error("{0}: zone id 0 is reserved for the exterior")]
    ReservedZoneId(Component),
    #[error("{0}: reference height must be finite")]
    NonFiniteHeight(Component),
    #[error("{component}: references undeclared zone {zone}")]
    DanglingZone { component: Component, zone: ZoneId },
    #[error("{0}: both endpoints are the same zone")]
    SelfLoop(Component),
    #[error("{component}: permeability must be > 0 (got {value})")]
    InvalidPermeability { component: Component, value: f64 },
    #[error("{component}: exponent must lie in [0.5, 1] (got {value})")]
    InvalidExponent { component: Component, value: f64 },
    #[error("{component}: elevation must be finite")]
    NonFiniteElevation { component: Component },
    #[error("{0}: exterior openings need a cp table")]
    MissingCpTable(Component),
    #[error("{0}: interior openings must not carry a cp table")]
    UnexpectedCpTable(Component),
    #[error("{component}: {what} must be > 0 (got {value})")]
    InvalidDimension { component: Component, what: &'static str, value: f64 },
    #[error("{component}: discharge coefficient must lie in (0, 1] (got {value})")]
    InvalidDischargeCoefficient { component: Component, value: f64 },
    #[error("{0}: vents must extract from an interior zone")]
    VentOnExterior(Component),
    #[error("{component}: schedule needs 1 or 24 values (got {len})")]
    ScheduleArity { component: Component, len: usize },
    #[error("{component}: extraction rates must be finite and >= 0")]
    NegativeRate { component: Component },
    #[error("{0}: no temperature schedule")]
    MissingTemperature(Component),
    #[error("{0}: zone has extraction but no flow element to balance it")]
    VentWithoutOpenings(Component),
}

/// All problems found while building a network.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct BuildError(pub Vec<NetworkError>);

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} network error(s)", self.0.len())?;
        for e in &self.0 {
            write!(f, "\n  - {e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Zone {
    pub id: ZoneId,
    pub name: String,
    /// Height above the building datum at which the zone pressure is defined.
    pub reference_height: f64,
}

impl Zone {
    pub fn new(id: ZoneId, name: impl Into<String>, reference_height: f64) -> Self {
        Self { id, name: name.into(), reference_height }
    }
}

/// Wind pressure coefficients against wind direction, interpolated linearly
/// around the compass.
#[derive(Debug, Clone, PartialEq)]
pub struct CpTable {
    name: String,
    entries: Vec<(f64, f64)>,
}

impl CpTable {
    pub fn new(name: impl Into<String>, entries: Vec<(f64, f64)>) -> Result<Self, NetworkError> {
        let name = name.into();
        if entries.is_empty() {
            return Err(NetworkError::EmptyCpTable { name });
        }
        for &(az, cp) in &entries {
            if !az.is_finite() || !(0.0..360.0).contains(&az) {
                return Err(NetworkError::CpAzimuthRange { name, azimuth: az });
            }
            if !cp.is_finite() {
                return Err(NetworkError::CpValue { name });
            }
        }
        if entries.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(NetworkError::CpAzimuthOrder { name });
        }
        Ok(Self { name, entries })
    }

    /// Direction-independent coefficient, for leakage paths not exposed to wind.
    pub fn uniform(name: impl Into<String>, cp: f64) -> Result<Self, NetworkError> {
        Self::new(name, vec![(0.0, cp)])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    /// Coefficient for a wind blowing from `direction` degrees.
    pub fn lookup(&self, direction: f64) -> f64 {
        let d = direction.rem_euclid(360.0);
        let e = &self.entries;
        if e.len() == 1 {
            return e[0].1;
        }
        // index of the first azimuth strictly greater than d
        let upper = e.partition_point(|&(az, _)| az <= d);
        let (lo, hi) = match upper {
            0 => {
                let (az, cp) = e[e.len() - 1];
                ((az - 360.0, cp), e[0])
            }
            u if u == e.len() => {
                let (az, cp) = e[0];
                (e[u - 1], (az + 360.0, cp))
            }
            u => (e[u - 1], e[u]),
        };
        let t = (d - lo.0) / (hi.0 - lo.0);
        lo.1 + t * (hi.1 - lo.1)
    }
}

/// Origin of a canonical flow element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    /// Small opening (crack, vent grille, leakage path).
    SmallOpening,
    /// Equivalent opening produced from a large opening.
    LargeOpening,
}

impl ElementKind {
    pub fn tag(self) -> &'static str {
        match self {
            ElementKind::SmallOpening => "PO",
            ElementKind::LargeOpening => "GO",
        }
    }
}

/// Power-law opening: `flow = K * dp^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallOpening {
    pub id: usize,
    pub zone_a: ZoneId,
    pub zone_b: ZoneId,
    pub elevation: f64,
    /// Mass flow at 1 Pa, kg·s⁻¹·Pa⁻ⁿ.
    pub permeability: f64,
    pub exponent: f64,
    pub cp_table: Option<CpTable>,
    pub kind: ElementKind,
}

impl SmallOpening {
    pub fn new(
        id: usize,
        zone_a: ZoneId,
        zone_b: ZoneId,
        elevation: f64,
        permeability: f64,
        exponent: f64,
        cp_table: Option<CpTable>,
    ) -> Self {
        Self { id, zone_a, zone_b, elevation, permeability, exponent, cp_table, kind: ElementKind::SmallOpening }
    }
}

/// Door or window sized aperture that may carry two-way flow.
#[derive(Debug, Clone, PartialEq)]
pub struct LargeOpening {
    pub id: usize,
    pub zone_a: ZoneId,
    pub zone_b: ZoneId,
    pub sill_elevation: f64,
    pub height: f64,
    pub width: f64,
    pub discharge_coefficient: f64,
    pub cp_table: Option<CpTable>,
}

impl LargeOpening {
    /// Large opening with the standard 0.78 discharge coefficient.
    pub fn new(
        id: usize,
        zone_a: ZoneId,
        zone_b: ZoneId,
        sill_elevation: f64,
        height: f64,
        width: f64,
        cp_table: Option<CpTable>,
    ) -> Self {
        Self {
            id,
            zone_a,
            zone_b,
            sill_elevation,
            height,
            width,
            discharge_coefficient: WALTON_DISCHARGE_COEFFICIENT,
            cp_table,
        }
    }
}

/// Replaces a large opening by two orifices of half its area, 5/18 and 13/18
/// of the way up the opening, with exponent 0.5.
///
/// Each orifice gets `K = Cd * (w*h/2) * sqrt(2 * rho_ref)` so that
/// `flow = K * dp^0.5` is the usual orifice mass-flow law.
pub fn decompose_large_opening(lo: &LargeOpening, rho_ref: f64) -> [SmallOpening; 2] {
    let half_area = 0.5 * lo.width * lo.height;
    let k = lo.discharge_coefficient * half_area * (2.0 * rho_ref).sqrt();
    let make = |fraction: f64| SmallOpening {
        id: lo.id,
        zone_a: lo.zone_a,
        zone_b: lo.zone_b,
        elevation: lo.sill_elevation + fraction * lo.height,
        permeability: k,
        exponent: WALTON_EXPONENT,
        cp_table: lo.cp_table.clone(),
        kind: ElementKind::LargeOpening,
    };
    [make(WALTON_LOWER_FRACTION), make(WALTON_UPPER_FRACTION)]
}

/// Pressure-independent scheduled extraction from a zone.
#[derive(Debug, Clone, PartialEq)]
pub struct MechanicalVent {
    pub zone: ZoneId,
    /// Hourly extraction rates, m³/h, hour 0 first.
    pub schedule: [f64; 24],
}

impl MechanicalVent {
    /// Accepts either 24 hourly rates or a single constant rate.
    pub fn new(zone: ZoneId, rates: &[f64]) -> Result<Self, NetworkError> {
        let component = Component::Vent(zone);
        let schedule = expand_hourly(rates).ok_or(NetworkError::ScheduleArity { component, len: rates.len() })?;
        if schedule.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(NetworkError::NegativeRate { component });
        }
        Ok(Self { zone, schedule })
    }

    pub fn constant(zone: ZoneId, rate: f64) -> Result<Self, NetworkError> {
        Self::new(zone, &[rate])
    }

    /// Volumetric rate, m³/h, at `hour` (0..24).
    pub fn rate_at(&self, hour: usize) -> f64 {
        self.schedule[hour % 24]
    }

    pub fn is_active(&self) -> bool {
        self.schedule.iter().any(|r| *r > 0.0)
    }
}

/// Expands a 1- or 24-entry schedule to 24 hourly values.
pub fn expand_hourly(values: &[f64]) -> Option<[f64; 24]> {
    match values.len() {
        1 => Some([values[0]; 24]),
        24 => {
            let mut out = [0.0; 24];
            out.copy_from_slice(values);
            Some(out)
        }
        _ => None,
    }
}

/// One canonical opening of the network.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowElement {
    /// Sequential index, 1-based.
    pub id: usize,
    pub kind: ElementKind,
    /// Id of the small or large opening this element came from.
    pub source_id: usize,
    pub zone_a: ZoneId,
    pub zone_b: ZoneId,
    pub elevation: f64,
    pub permeability: f64,
    pub exponent: f64,
    pub cp_table: Option<CpTable>,
}

impl FlowElement {
    pub fn is_exterior(&self) -> bool {
        self.zone_a == EXTERIOR || self.zone_b == EXTERIOR
    }

    pub fn connects(&self, zone: ZoneId) -> bool {
        self.zone_a == zone || self.zone_b == zone
    }
}

impl From<&FlowElement> for SmallOpening {
    fn from(e: &FlowElement) -> Self {
        SmallOpening {
            id: e.source_id,
            zone_a: e.zone_a,
            zone_b: e.zone_b,
            elevation: e.elevation,
            permeability: e.permeability,
            exponent: e.exponent,
            cp_table: e.cp_table.clone(),
            kind: e.kind,
        }
    }
}

/// Raw component lists, before large-opening decomposition.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NetworkDescription {
    pub zones: Vec<Zone>,
    pub small_openings: Vec<SmallOpening>,
    pub large_openings: Vec<LargeOpening>,
    pub vents: Vec<MechanicalVent>,
}

/// Canonical network: zones `1..=N`, power-law elements, vents.
#[derive(Debug, Clone, PartialEq)]
pub struct AirflowNetwork {
    zones: Vec<Zone>,
    elements: Vec<FlowElement>,
    vents: Vec<MechanicalVent>,
}

impl AirflowNetwork {
    pub fn zones(&self) -> &[Zone] {
        &self.zones
    }

    pub fn zone_count(&self) -> usize {
        self.zones.len()
    }

    /// Zone by 1-based id.
    pub fn zone(&self, id: ZoneId) -> Option<&Zone> {
        id.checked_sub(1).and_then(|i| self.zones.get(i))
    }

    pub fn elements(&self) -> &[FlowElement] {
        &self.elements
    }

    pub fn vents(&self) -> &[MechanicalVent] {
        &self.vents
    }

    /// Description that rebuilds into this exact network.
    pub fn to_description(&self) -> NetworkDescription {
        NetworkDescription {
            zones: self.zones.clone(),
            small_openings: self.elements.iter().map(SmallOpening::from).collect(),
            large_openings: Vec::new(),
            vents: self.vents.clone(),
        }
    }
}

fn check_endpoints(
    component: Component,
    zone_a: ZoneId,
    zone_b: ZoneId,
    zone_count: usize,
    has_cp: bool,
    errors: &mut Vec<NetworkError>,
) {
    for zone in [zone_a, zone_b] {
        if zone > zone_count {
            errors.push(NetworkError::DanglingZone { component, zone });
        }
    }
    if zone_a == zone_b {
        errors.push(NetworkError::SelfLoop(component));
        return;
    }
    let exterior = zone_a == EXTERIOR || zone_b == EXTERIOR;
    match (exterior, has_cp) {
        (true, false) => errors.push(NetworkError::MissingCpTable(component)),
        (false, true) => errors.push(NetworkError::UnexpectedCpTable(component)),
        _ => {}
    }
}

fn check_small_opening(o: &SmallOpening, zone_count: usize, errors: &mut Vec<NetworkError>) {
    let component = Component::Opening(o.id);
    check_endpoints(component, o.zone_a, o.zone_b, zone_count, o.cp_table.is_some(), errors);
    if !o.elevation.is_finite() {
        errors.push(NetworkError::NonFiniteElevation { component });
    }
    if !o.permeability.is_finite() || o.permeability <= 0.0 {
        errors.push(NetworkError::InvalidPermeability { component, value: o.permeability });
    }
    if !(0.5..=1.0).contains(&o.exponent) {
        errors.push(NetworkError::InvalidExponent { component, value: o.exponent });
    }
}

fn check_large_opening(o: &LargeOpening, zone_count: usize, errors: &mut Vec<NetworkError>) {
    let component = Component::LargeOpening(o.id);
    check_endpoints(component, o.zone_a, o.zone_b, zone_count, o.cp_table.is_some(), errors);
    if !o.sill_elevation.is_finite() {
        errors.push(NetworkError::NonFiniteElevation { component });
    }
    for (what, value) in [("height", o.height), ("width", o.width)] {
        if !value.is_finite() || value <= 0.0 {
            errors.push(NetworkError::InvalidDimension { component, what, value });
        }
    }
    let cd = o.discharge_coefficient;
    if !(cd > 0.0 && cd <= 1.0) {
        errors.push(NetworkError::InvalidDischargeCoefficient { component, value: cd });
    }
}

/// Validates a description and produces the canonical network.
///
/// Every problem found is reported, not just the first one.
pub fn build_network(description: &NetworkDescription, rho_ref: f64) -> Result<AirflowNetwork, BuildError> {
    let mut errors = Vec::new();

    let mut zones = description.zones.clone();
    zones.sort_by_key(|z| z.id);
    for w in zones.windows(2) {
        if w[0].id == w[1].id {
            errors.push(NetworkError::DuplicateZone(w[0].id));
        }
    }
    zones.dedup_by_key(|z| z.id);
    for z in &zones {
        if z.id == EXTERIOR {
            errors.push(NetworkError::ReservedZoneId(Component::Zone(z.id)));
        }
        if !z.reference_height.is_finite() {
            errors.push(NetworkError::NonFiniteHeight(Component::Zone(z.id)));
        }
    }
    zones.retain(|z| z.id != EXTERIOR);
    let count = zones.len();
    if let Some((i, _)) = zones.iter().enumerate().find(|(i, z)| z.id != i + 1) {
        errors.push(NetworkError::NonContiguousZones { count, missing: i + 1 });
    }

    let mut ids: Vec<usize> = description
        .small_openings
        .iter()
        .filter(|o| o.kind == ElementKind::SmallOpening)
        .map(|o| o.id)
        .chain(description.large_openings.iter().map(|o| o.id))
        .collect();
    ids.sort_unstable();
    for w in ids.windows(2) {
        if w[0] == w[1] && errors.last() != Some(&NetworkError::DuplicateOpening(w[0])) {
            errors.push(NetworkError::DuplicateOpening(w[0]));
        }
    }

    for o in &description.small_openings {
        check_small_opening(o, count, &mut errors);
    }
    for o in &description.large_openings {
        check_large_opening(o, count, &mut errors);
    }

    let canonical = description
        .small_openings
        .iter()
        .cloned()
        .chain(description.large_openings.iter().flat_map(|lo| decompose_large_opening(lo, rho_ref)));
    let elements: Vec<FlowElement> = canonical
        .enumerate()
        .map(|(i, o)| FlowElement {
            id: i + 1,
            kind: o.kind,
            source_id: o.id,
            zone_a: o.zone_a,
            zone_b: o.zone_b,
            elevation: o.elevation,
            permeability: o.permeability,
            exponent: o.exponent,
            cp_table: o.cp_table,
        })
        .collect();

    for v in &description.vents {
        let component = Component::Vent(v.zone);
        if v.zone == EXTERIOR {
            errors.push(NetworkError::VentOnExterior(component));
            continue;
        }
        if v.zone > count {
            errors.push(NetworkError::DanglingZone { component, zone: v.zone });
            continue;
        }
        if v.schedule.iter().any(|r| !r.is_finite() || *r < 0.0) {
            errors.push(NetworkError::NegativeRate { component });
        }
        if v.is_active() && !elements.iter().any(|e| e.connects(v.zone)) {
            errors.push(NetworkError::VentWithoutOpenings(component));
        }
    }

    if !errors.is_empty() {
        return Err(BuildError(errors));
    }
    Ok(AirflowNetwork { zones, elements, vents: description.vents.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point_table() -> CpTable {
        CpTable::new("t", vec![(0.0, 0.7), (180.0, -0.3)]).unwrap()
    }

    #[test]
    fn density_examples() {
        assert_eq!(air_density(0.0, 1.2).unwrap(), 1.2);
        assert_close!(air_density(25.0, 1.2).unwrap(), 1.099_379_506_959_584, 1e-12);
        assert_close!(air_density(-10.0, 1.2).unwrap(), 1.245_601_368_041_041, 1e-12);
        assert!(air_density(-273.15, 1.2).is_err());
        assert!(air_density(-300.0, 1.2).is_err());
        assert!(air_density(f64::NAN, 1.2).is_err());
    }

    #[test]
    fn cp_lookup_examples() {
        let t = two_point_table();
        assert_eq!(t.lookup(0.0), 0.7);
        assert_close!(t.lookup(90.0), 0.2, 1e-12);
        assert_close!(t.lookup(270.0), 0.2, 1e-12);
        assert_eq!(t.lookup(180.0), -0.3);
        assert_close!(t.lookup(360.0), 0.7, 1e-12);
        assert_close!(t.lookup(-90.0), 0.2, 1e-12);
    }

    #[test]
    fn cp_lookup_wraps_below_first_entry() {
        let t = CpTable::new("t", vec![(90.0, 1.0), (270.0, -1.0)]).unwrap();
        // 0° sits halfway between 270° (-1) and 450° (+1)
        assert_close!(t.lookup(0.0), 0.0, 1e-12);
        assert_close!(t.lookup(45.0), 0.5, 1e-12);
    }

    #[test]
    fn cp_table_rejects_bad_entries() {
        assert!(matches!(CpTable::new("e", vec![]), Err(NetworkError::EmptyCpTable { .. })));
        assert!(CpTable::new("r", vec![(360.0, 0.1)]).is_err());
        assert!(CpTable::new("o", vec![(10.0, 0.1), (10.0, 0.2)]).is_err());
        assert!(CpTable::new("o", vec![(20.0, 0.1), (10.0, 0.2)]).is_err());
    }

    #[test]
    fn decomposition_geometry() {
        let lo = LargeOpening::new(7, 1, 2, 0.0, 2.0, 1.0, None);
        let [low, high] = decompose_large_opening(&lo, 1.2);
        assert_close!(low.elevation, 0.555_555_555_555_555_6, 1e-12);
        assert_close!(high.elevation, 1.444_444_444_444_444_4, 1e-12);
        assert_close!(low.permeability, 1.208_370_804_016_714, 1e-12);
        assert_eq!(low.permeability, high.permeability);
        assert_eq!(low.exponent, 0.5);
        assert_eq!(high.exponent, 0.5);
        assert_eq!((low.zone_a, low.zone_b), (1, 2));
        assert_eq!(low.kind, ElementKind::LargeOpening);
        assert_close!(0.5 * (low.elevation + high.elevation), 1.0, 1e-12);
    }

    fn zones(n: usize) -> Vec<Zone> {
        (1..=n).map(|i| Zone::new(i, format!("z{i}"), 0.0)).collect()
    }

    #[test]
    fn small_openings_only() {
        let t = two_point_table();
        let desc = NetworkDescription {
            zones: zones(1),
            small_openings: vec![
                SmallOpening::new(10, 0, 1, 0.5, 0.5, 0.67, Some(t.clone())),
                SmallOpening::new(11, 0, 1, 2.5, 0.5, 0.67, Some(t)),
            ],
            ..Default::default()
        };
        let net = build_network(&desc, 1.2).unwrap();
        assert_eq!(net.elements().len(), 2);
        assert!(net.elements().iter().all(|e| e.kind == ElementKind::SmallOpening));
        assert_eq!(net.elements()[0].id, 1);
        assert_eq!(net.elements()[1].id, 2);
        assert_eq!(net.elements()[1].source_id, 11);
    }

    #[test]
    fn interior_large_opening_yields_two_elements() {
        let desc = NetworkDescription {
            zones: zones(2),
            large_openings: vec![LargeOpening::new(1, 1, 2, 0.0, 2.0, 1.0, None)],
            ..Default::default()
        };
        let net = build_network(&desc, 1.2).unwrap();
        assert_eq!(net.elements().len(), 2);
        for e in net.elements() {
            assert_eq!(e.kind.tag(), "GO");
            assert_eq!((e.zone_a, e.zone_b), (1, 2));
        }
    }

    #[test]
    fn vent_without_openings_is_rejected() {
        let desc = NetworkDescription {
            zones: zones(1),
            vents: vec![MechanicalVent::constant(1, 100.0).unwrap()],
            ..Default::default()
        };
        let err = build_network(&desc, 1.2).unwrap_err();
        assert_eq!(err.0, vec![NetworkError::VentWithoutOpenings(Component::Vent(1))]);
    }

    #[test]
    fn all_errors_are_collected() {
        let desc = NetworkDescription {
            zones: vec![Zone::new(1, "a", 0.0), Zone::new(1, "b", 0.0), Zone::new(3, "c", 0.0)],
            small_openings: vec![
                SmallOpening::new(4, 1, 9, 0.0, 0.5, 0.67, None),
                SmallOpening::new(5, 0, 1, 0.0, -1.0, 2.0, None),
            ],
            ..Default::default()
        };
        let err = build_network(&desc, 1.2).unwrap_err();
        let e = &err.0;
        assert!(e.contains(&NetworkError::DuplicateZone(1)));
        assert!(e.contains(&NetworkError::NonContiguousZones { count: 2, missing: 2 }));
        assert!(e.contains(&NetworkError::DanglingZone { component: Component::Opening(4), zone: 9 }));
        assert!(e.contains(&NetworkError::MissingCpTable(Component::Opening(5))));
        assert!(e.iter().any(|x| matches!(x, NetworkError::InvalidExponent { .. })));
        assert!(e.iter().any(|x| matches!(x, NetworkError::InvalidPermeability { .. })));
        assert!(err.to_string().contains("opening 4"));
    }

    #[test]
    fn opening_ids_are_shared_and_unique() {
        let desc = NetworkDescription {
            zones: zones(2),
            small_openings: vec![
                SmallOpening::new(2, 1, 2, 0.0, 0.5, 0.67, None),
                SmallOpening::new(2, 1, 2, 1.0, 0.5, 0.67, None),
            ],
            large_openings: vec![LargeOpening::new(2, 1, 2, 0.0, 2.0, 1.0, None)],
            ..Default::default()
        };
        let err = build_network(&desc, 1.2).unwrap_err();
        assert_eq!(err.0, vec![NetworkError::DuplicateOpening(2)]);
    }

    #[test]
    fn cp_table_rule() {
        let t = two_point_table();
        let desc = NetworkDescription {
            zones: zones(2),
            small_openings: vec![SmallOpening::new(1, 1, 2, 0.0, 0.5, 0.67, Some(t))],
            ..Default::default()
        };
        let err = build_network(&desc, 1.2).unwrap_err();
        assert_eq!(err.0, vec![NetworkError::UnexpectedCpTable(Component::Opening(1))]);
    }

    #[test]
    fn vent_schedule_arity() {
        let err = MechanicalVent::new(1, &[1.0; 23]).unwrap_err();
        assert_eq!(err, NetworkError::ScheduleArity { component: Component::Vent(1), len: 23 });
        assert!(MechanicalVent::new(1, &[-1.0]).is_err());
        assert_eq!(MechanicalVent::new(1, &[3.0]).unwrap().rate_at(17), 3.0);
    }

    #[test]
    fn rebuild_is_identity() {
        let desc = NetworkDescription {
            zones: zones(2),
            small_openings: vec![SmallOpening::new(3, 0, 1, 1.0, 0.1, 0.6, Some(two_point_table()))],
            large_openings: vec![LargeOpening::new(9, 1, 2, 0.2, 2.1, 0.9, None)],
            vents: vec![MechanicalVent::constant(2, 50.0).unwrap()],
        };
        let net = build_network(&desc, 1.2).unwrap();
        let again = build_network(&net.to_description(), 1.2).unwrap();
        assert_eq!(net, again);
    }
}
