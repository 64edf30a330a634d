#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use zonalflow::network::{
    build_network, CpTable, LargeOpening, MechanicalVent, NetworkDescription, SmallOpening, Zone,
};
use zonalflow::solver::{BoundaryState, PressureSystem, PressureVector};
use zonalflow::AirflowNetwork;

pub const RHO_REF: f64 = 1.2;
pub const EXPONENTS: [f64; 3] = [0.5, 0.67, 1.0];

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn random_cp(rng: &mut ChaCha8Rng, name: &str) -> CpTable {
    let n = rng.gen_range(1..=6);
    let mut az: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..360.0)).collect();
    az.sort_by(f64::total_cmp);
    az.dedup();
    let entries = az.into_iter().map(|a| (a, rng.gen_range(-0.8..0.9))).collect();
    CpTable::new(name, entries).unwrap()
}

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub zones: usize,
    /// Chance of each zone pair sharing a crack.
    pub interior_density: f64,
    pub large_openings: bool,
    pub vents: bool,
}

/// A random network where every zone has at least one exterior opening.
pub fn random_network(rng: &mut ChaCha8Rng, shape: Shape) -> (AirflowNetwork, NetworkDescription) {
    let mut desc = NetworkDescription {
        zones: (1..=shape.zones).map(|i| Zone::new(i, format!("z{i}"), rng.gen_range(0.0..3.0))).collect(),
        ..Default::default()
    };
    let mut id = 1;
    for zone in 1..=shape.zones {
        for _ in 0..rng.gen_range(1..=3) {
            let cp = random_cp(rng, &format!("cp{id}"));
            let (a, b) = if rng.gen_bool(0.5) { (0, zone) } else { (zone, 0) };
            desc.small_openings.push(SmallOpening::new(
                id,
                a,
                b,
                rng.gen_range(0.0..6.0),
                rng.gen_range(0.01..2.0),
                *EXPONENTS.choose(rng).unwrap(),
                Some(cp),
            ));
            id += 1;
        }
    }
    for a in 1..=shape.zones {
        for b in a + 1..=shape.zones {
            if rng.gen_bool(shape.interior_density) {
                desc.small_openings.push(SmallOpening::new(
                    id,
                    a,
                    b,
                    rng.gen_range(0.0..6.0),
                    rng.gen_range(0.01..2.0),
                    *EXPONENTS.choose(rng).unwrap(),
                    None,
                ));
                id += 1;
            }
            if shape.large_openings && rng.gen_bool(0.2) {
                desc.large_openings.push(LargeOpening::new(
                    id,
                    a,
                    b,
                    rng.gen_range(0.0..1.0),
                    rng.gen_range(1.0..2.5),
                    rng.gen_range(0.5..1.5),
                    None,
                ));
                id += 1;
            }
        }
    }
    if shape.vents {
        for zone in 1..=shape.zones {
            if rng.gen_bool(0.3) {
                desc.vents.push(MechanicalVent::constant(zone, rng.gen_range(0.0..400.0)).unwrap());
            }
        }
    }
    (build_network(&desc, RHO_REF).unwrap(), desc)
}

pub fn random_state(rng: &mut ChaCha8Rng, network: &AirflowNetwork, vents: bool) -> BoundaryState {
    let n = network.zone_count();
    let mut s = BoundaryState::uniform(n, rng.gen_range(0.0..35.0), rng.gen_range(0.0..6.0), rng.gen_range(0.0..360.0));
    s.zone_temperatures = (0..n).map(|_| rng.gen_range(0.0..35.0)).collect();
    if vents {
        for v in network.vents() {
            s.extraction_rates[v.zone - 1] += v.rate_at(0) / 3600.0 * 1.2;
        }
    }
    s
}

/// Largest bracket expansion before giving up, Pa.
const BRACKET_LIMIT: f64 = 1e7;

/// Root of a decreasing scalar function by bisection, to `tol` in p.
pub fn bisect(f: impl Fn(f64) -> f64, tol: f64) -> f64 {
    let (mut lo, mut hi) = (-1.0, 1.0);
    while f(lo) < 0.0 {
        lo *= 2.0;
        assert!(lo > -BRACKET_LIMIT, "no bracket below");
    }
    while f(hi) > 0.0 {
        hi *= 2.0;
        assert!(hi < BRACKET_LIMIT, "no bracket above");
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Single-zone pressure by bisection on the mass balance.
pub fn bisection_one_zone(system: &PressureSystem) -> f64 {
    assert_eq!(system.dimension(), 1);
    bisect(|p| system.residuals(&[p])[0], 1e-13)
}

/// Two-zone pressures by nested bisection: the inner solve balances zone 2
/// for a given p1, the outer one balances zone 1 along that curve.
pub fn bisection_two_zone(system: &PressureSystem) -> [f64; 2] {
    assert_eq!(system.dimension(), 2);
    let inner = |p1: f64| bisect(|p2| system.residuals(&[p1, p2])[1], 1e-12);
    let p1 = bisect(|p1| system.residuals(&[p1, inner(p1)])[0], 1e-10);
    [p1, inner(p1)]
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn pressure(v: Vec<f64>) -> PressureVector {
    PressureVector::new(v)
}
