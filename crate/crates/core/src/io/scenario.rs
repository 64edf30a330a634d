//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! [constants]
//! rho_ref = 1.2
//! vent_density = zone            # zone | reference
//!
//! [zones]
//! # id name reference_height
//! 1 room 0.0
//!
//! [cp]
//! # name azimuth:cp ...
//! south 0:-0.3 180:0.7
//!
//! [openings]
//! # id zone_a zone_b elevation permeability exponent [cp]
//! 1 0 1 0.5 0.5 0.67 south
//!
//! [large_openings]
//! # id zone_a zone_b sill height width cd [cp]
//! 2 1 2 0.0 2.0 0.9 0.78
//!
//! [vents]
//! # zone rates_m3h (1 or 24 values)
//! 1 300
//!
//! [schedules]
//! # temperature zone values_c (1 or 24 values)
//! temperature 1 20
//! ```
//!
//! Every line-level problem in a file is reported together, each with its
//! line number.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use crate::engine::{EngineError, Scenario, VentDensity};
use crate::network::{
    CpTable, LargeOpening, MechanicalVent, NetworkDescription, SmallOpening, Zone, DEFAULT_RHO_REF, GRAVITY,
};
use crate::solver::SolverOptions;

/// One problem found in a scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct Issue {
    /// 1-based line, when the problem belongs to a single line.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("{}", format_issues(.0))]
    Invalid(Vec<Issue>),
}

impl ScenarioError {
    pub fn issues(&self) -> &[Issue] {
        match self {
            ScenarioError::Invalid(v) => v,
            ScenarioError::Io(_) => &[],
        }
    }
}

fn format_issues(issues: &[Issue]) -> String {
    let mut s = format!("{} scenario error(s)", issues.len());
    for i in issues {
        let _ = write!(s, "\n  - {i}");
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Section {
    Constants,
    Zones,
    Cp,
    Openings,
    LargeOpenings,
    Vents,
    Schedules,
}

impl Section {
    fn from_header(name: &str) -> Option<Self> {
        Some(match name {
            "constants" => Section::Constants,
            "zones" => Section::Zones,
            "cp" => Section::Cp,
            "openings" => Section::Openings,
            "large_openings" => Section::LargeOpenings,
            "vents" => Section::Vents,
            "schedules" => Section::Schedules,
            _ => return None,
        })
    }
}

struct Line<'a> {
    number: usize,
    tokens: Vec<&'a str>,
}

#[derive(Default)]
struct Collector {
    issues: Vec<Issue>,
}

impl Collector {
    fn at(&mut self, line: usize, message: impl Into<String>) {
        self.issues.push(Issue { line: Some(line), message: message.into() });
    }

    fn number(&mut self, line: &Line, index: usize, field: &str) -> Option<f64> {
        let Some(tok) = line.tokens.get(index) else {
            self.at(line.number, format!("missing field '{field}'"));
            return None;
        };
        match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => Some(v),
            _ => {
                self.at(line.number, format!("field '{field}': '{tok}' is not a finite number"));
                None
            }
        }
    }

    fn integer(&mut self, line: &Line, index: usize, field: &str) -> Option<usize> {
        let Some(tok) = line.tokens.get(index) else {
            self.at(line.number, format!("missing field '{field}'"));
            return None;
        };
        match tok.parse::<usize>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.at(line.number, format!("field '{field}': '{tok}' is not a non-negative integer"));
                None
            }
        }
    }

    fn numbers(&mut self, line: &Line, from: usize, field: &str) -> Option<Vec<f64>> {
        let mut out = Vec::new();
        let mut ok = true;
        for i in from..line.tokens.len() {
            match self.number(line, i, field) {
                Some(v) => out.push(v),
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn arity(&mut self, line: &Line, min: usize, max: usize, layout: &str) -> bool {
        let n = line.tokens.len();
        if n < min || n > max {
            self.at(line.number, format!("expected `{layout}`, found {n} field(s)"));
            return false;
        }
        true
    }
}

struct Constants {
    rho_ref: f64,
    options: SolverOptions,
    vent_density: VentDensity,
}

fn parse_constants(lines: &[Line], c: &mut Collector) -> Constants {
    let mut out =
        Constants { rho_ref: DEFAULT_RHO_REF, options: SolverOptions::default(), vent_density: VentDensity::ZoneAir };
    let mut seen: HashMap<String, usize> = HashMap::new();
    for line in lines {
        let joined = line.tokens.join(" ");
        let Some((key, value)) = joined.split_once('=') else {
            c.at(line.number, "expected `key = value`");
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if let Some(prev) = seen.insert(key.to_string(), line.number) {
            c.at(line.number, format!("constant '{key}' already set on line {prev}"));
            continue;
        }
        let float = |c: &mut Collector| match value.parse::<f64>() {
            Ok(v) if v.is_finite() => Some(v),
            _ => {
                c.at(line.number, format!("field '{key}': '{value}' is not a finite number"));
                None
            }
        };
        let int = |c: &mut Collector| match value.parse::<u64>() {
            Ok(v) => Some(v),
            Err(_) => {
                c.at(line.number, format!("field '{key}': '{value}' is not a non-negative integer"));
                None
            }
        };
        match key {
            "rho_ref" => {
                if let Some(v) = float(c) {
                    if v > 0.0 {
                        out.rho_ref = v;
                    } else {
                        c.at(line.number, "rho_ref must be > 0");
                    }
                }
            }
            "g" => {
                if let Some(v) = float(c) {
                    if v != GRAVITY {
                        c.at(line.number, format!("g is fixed at {GRAVITY} m/s² (got {v})"));
                    }
                }
            }
            "residual_tolerance" => out.options.residual_tolerance = float(c).unwrap_or(f64::NAN),
            "linearization_epsilon" => out.options.linearization_epsilon = float(c).unwrap_or(f64::NAN),
            "damping" => out.options.damping = float(c).unwrap_or(f64::NAN),
            "max_iterations" => out.options.max_iterations = int(c).unwrap_or(0) as usize,
            "max_halvings" => out.options.max_halvings = int(c).map_or(0, |v| v.min(u32::MAX as u64) as u32),
            "vent_density" => match value {
                "zone" => out.vent_density = VentDensity::ZoneAir,
                "reference" => out.vent_density = VentDensity::Reference,
                _ => c.at(line.number, format!("vent_density must be 'zone' or 'reference' (got '{value}')")),
            },
            _ => c.at(line.number, format!("unknown constant '{key}'")),
        }
    }
    if let Err(e) = out.options.validate() {
        // a malformed value was already reported on its own line
        if c.issues.is_empty() {
            c.issues.push(Issue { line: None, message: e.to_string() });
        }
    }
    out
}

/// Parses scenario text and builds the canonical network.
pub fn parse_scenario_str(text: &str) -> Result<Scenario, ScenarioError> {
    let mut c = Collector::default();
    let mut sections: HashMap<Section, Vec<Line>> = HashMap::new();
    let mut current: Option<Section> = None;
    let mut header_lines: HashMap<Section, usize> = HashMap::new();

    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            match Section::from_header(name.trim()) {
                Some(s) => {
                    if let Some(prev) = header_lines.insert(s, number) {
                        c.at(number, format!("section [{name}] already opened on line {prev}"));
                    }
                    current = Some(s);
                }
                None => {
                    c.at(number, format!("unknown section [{name}]"));
                    current = None;
                }
            }
            continue;
        }
        match current {
            Some(s) => {
                sections.entry(s).or_default().push(Line { number, tokens: content.split_whitespace().collect() })
            }
            None if header_lines.is_empty() => c.at(number, "content before the first section header"),
            None => {}
        }
    }
    let get = |s: Section| sections.get(&s).map(Vec::as_slice).unwrap_or(&[]);

    let constants = parse_constants(get(Section::Constants), &mut c);

    let mut zones = Vec::new();
    for line in get(Section::Zones) {
        if !c.arity(line, 3, 3, "id name reference_height") {
            continue;
        }
        let id = c.integer(line, 0, "id");
        let h = c.number(line, 2, "reference_height");
        if let (Some(id), Some(h)) = (id, h) {
            zones.push(Zone::new(id, line.tokens[1], h));
        }
    }

    let mut tables: HashMap<String, CpTable> = HashMap::new();
    for line in get(Section::Cp) {
        if !c.arity(line, 2, usize::MAX, "name azimuth:cp ...") {
            continue;
        }
        let name = line.tokens[0];
        let mut entries = Vec::new();
        let mut ok = true;
        for tok in &line.tokens[1..] {
            let parsed = tok.split_once(':').and_then(|(a, v)| Some((a.parse::<f64>().ok()?, v.parse::<f64>().ok()?)));
            match parsed {
                Some(e) => entries.push(e),
                None => {
                    c.at(line.number, format!("cp entry '{tok}' is not azimuth:cp"));
                    ok = false;
                }
            }
        }
        if !ok {
            continue;
        }
        match CpTable::new(name, entries) {
            Ok(t) => {
                if tables.insert(name.to_string(), t).is_some() {
                    c.at(line.number, format!("cp table '{name}' defined twice"));
                }
            }
            Err(e) => c.at(line.number, e.to_string()),
        }
    }
    let lookup_cp = |c: &mut Collector, line: &Line, index: usize| -> Result<Option<CpTable>, ()> {
        match line.tokens.get(index) {
            None => Ok(None),
            Some(name) => match tables.get(*name) {
                Some(t) => Ok(Some(t.clone())),
                None => {
                    c.at(line.number, format!("unknown cp table '{name}'"));
                    Err(())
                }
            },
        }
    };

    let mut small_openings = Vec::new();
    for line in get(Section::Openings) {
        if !c.arity(line, 6, 7, "id zone_a zone_b elevation permeability exponent [cp]") {
            continue;
        }
        let id = c.integer(line, 0, "id");
        let a = c.integer(line, 1, "zone_a");
        let b = c.integer(line, 2, "zone_b");
        let z = c.number(line, 3, "elevation");
        let k = c.number(line, 4, "permeability");
        let n = c.number(line, 5, "exponent");
        let cp = lookup_cp(&mut c, line, 6);
        if let (Some(id), Some(a), Some(b), Some(z), Some(k), Some(n), Ok(cp)) = (id, a, b, z, k, n, cp) {
            small_openings.push(SmallOpening::new(id, a, b, z, k, n, cp));
        }
    }

    let mut large_openings = Vec::new();
    for line in get(Section::LargeOpenings) {
        if !c.arity(line, 7, 8, "id zone_a zone_b sill height width cd [cp]") {
            continue;
        }
        let id = c.integer(line, 0, "id");
        let a = c.integer(line, 1, "zone_a");
        let b = c.integer(line, 2, "zone_b");
        let sill = c.number(line, 3, "sill");
        let h = c.number(line, 4, "height");
        let w = c.number(line, 5, "width");
        let cd = c.number(line, 6, "cd");
        let cp = lookup_cp(&mut c, line, 7);
        if let (Some(id), Some(a), Some(b), Some(sill), Some(h), Some(w), Some(cd), Ok(cp)) =
            (id, a, b, sill, h, w, cd, cp)
        {
            let mut lo = LargeOpening::new(id, a, b, sill, h, w, cp);
            lo.discharge_coefficient = cd;
            large_openings.push(lo);
        }
    }

    let mut vents = Vec::new();
    for line in get(Section::Vents) {
        if !c.arity(line, 2, usize::MAX, "zone rate ...") {
            continue;
        }
        let zone = c.integer(line, 0, "zone");
        let rates = c.numbers(line, 1, "rate");
        if let (Some(zone), Some(rates)) = (zone, rates) {
            match MechanicalVent::new(zone, &rates) {
                Ok(v) => vents.push(v),
                Err(e) => c.at(line.number, e.to_string()),
            }
        }
    }

    let mut temperatures: HashMap<usize, (usize, Vec<f64>)> = HashMap::new();
    for line in get(Section::Schedules) {
        if line.tokens[0] != "temperature" {
            c.at(line.number, format!("unknown schedule kind '{}'", line.tokens[0]));
            continue;
        }
        if !c.arity(line, 3, usize::MAX, "temperature zone value ...") {
            continue;
        }
        let zone = c.integer(line, 1, "zone");
        let values = c.numbers(line, 2, "temperature");
        if let (Some(zone), Some(values)) = (zone, values) {
            if ![1, 24].contains(&values.len()) {
                c.at(line.number, format!("zone {zone}: schedule needs 1 or 24 values (got {})", values.len()));
            } else if let Some((prev, _)) = temperatures.insert(zone, (line.number, values)) {
                c.at(line.number, format!("zone {zone}: temperature schedule already given on line {prev}"));
            }
        }
    }
    let mut zone_ids: Vec<usize> = zones.iter().map(|z| z.id).collect();
    zone_ids.sort_unstable();
    let mut schedules = Vec::new();
    for id in &zone_ids {
        match temperatures.remove(id) {
            Some((_, v)) => schedules.push(v),
            None => c.issues.push(Issue { line: None, message: format!("zone {id}: no temperature schedule") }),
        }
    }
    for (zone, (line, _)) in temperatures {
        c.at(line, format!("temperature schedule for undeclared zone {zone}"));
    }

    let description = NetworkDescription { zones, small_openings, large_openings, vents };
    if !c.issues.is_empty() {
        return Err(ScenarioError::Invalid(c.issues));
    }
    Scenario::new(description, constants.rho_ref, constants.options, &schedules, constants.vent_density).map_err(|e| {
        match e {
            EngineError::Network(b) => {
                ScenarioError::Invalid(b.0.into_iter().map(|e| Issue { line: None, message: e.to_string() }).collect())
            }
            other => ScenarioError::Invalid(vec![Issue { line: None, message: other.to_string() }]),
        }
    })
}

pub fn parse_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario_str(&text)
}

fn token(name: &str) -> String {
    let t: String = name.chars().map(|ch| if ch.is_whitespace() || ch == '#' { '_' } else { ch }).collect();
    if t.is_empty() {
        "_".into()
    } else {
        t
    }
}

fn join(values: &[f64]) -> String {
    let all_equal = values.iter().all(|v| *v == values[0]);
    let shown = if all_equal { &values[..1] } else { values };
    shown.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// Writes a scenario in the format read by [`parse_scenario_str`].
pub fn write_scenario(scenario: &Scenario) -> String {
    let d = scenario.description();
    let o = &scenario.options;
    let mut s = String::new();
    let _ = writeln!(s, "[constants]");
    let _ = writeln!(s, "rho_ref = {}", scenario.rho_ref);
    let _ = writeln!(s, "g = {GRAVITY}");
    let _ = writeln!(s, "residual_tolerance = {}", o.residual_tolerance);
    let _ = writeln!(s, "max_iterations = {}", o.max_iterations);
    let _ = writeln!(s, "linearization_epsilon = {}", o.linearization_epsilon);
    let _ = writeln!(s, "damping = {}", o.damping);
    let _ = writeln!(s, "max_halvings = {}", o.max_halvings);
    let _ = writeln!(s, "vent_density = {}", scenario.vent_density.keyword());

    let _ = writeln!(s, "\n[zones]");
    for z in &d.zones {
        let _ = writeln!(s, "{} {} {}", z.id, token(&z.name), z.reference_height);
    }

    let mut tables: Vec<&CpTable> = Vec::new();
    let used = d
        .small_openings
        .iter()
        .filter_map(|o| o.cp_table.as_ref())
        .chain(d.large_openings.iter().filter_map(|o| o.cp_table.as_ref()));
    for t in used {
        if !tables.iter().any(|x| x.name() == t.name()) {
            tables.push(t);
        }
    }
    let _ = writeln!(s, "\n[cp]");
    for t in tables {
        let entries: Vec<String> = t.entries().iter().map(|(a, c)| format!("{a}:{c}")).collect();
        let _ = writeln!(s, "{} {}", token(t.name()), entries.join(" "));
    }
    let cp_name = |t: &Option<CpTable>| t.as_ref().map(|t| format!(" {}", token(t.name()))).unwrap_or_default();

    let _ = writeln!(s, "\n[openings]");
    for o in &d.small_openings {
        let _ = writeln!(
            s,
            "{} {} {} {} {} {}{}",
            o.id,
            o.zone_a,
            o.zone_b,
            o.elevation,
            o.permeability,
            o.exponent,
            cp_name(&o.cp_table)
        );
    }
    let _ = writeln!(s, "\n[large_openings]");
    for o in &d.large_openings {
        let _ = writeln!(
            s,
            "{} {} {} {} {} {} {}{}",
            o.id,
            o.zone_a,
            o.zone_b,
            o.sill_elevation,
            o.height,
            o.width,
            o.discharge_coefficient,
            cp_name(&o.cp_table)
        );
    }
    let _ = writeln!(s, "\n[vents]");
    for v in &d.vents {
        let _ = writeln!(s, "{} {}", v.zone, join(&v.schedule));
    }
    let _ = writeln!(s, "\n[schedules]");
    let mut ids: Vec<usize> = d.zones.iter().map(|z| z.id).collect();
    ids.sort_unstable();
    for (id, sched) in ids.iter().zip(scenario.zone_temperature_schedules()) {
        let _ = writeln!(s, "temperature {id} {}", join(sched));
    }
    s
}
