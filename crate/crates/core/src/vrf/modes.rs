use serde::Serialize;

use crate::timeseries::SeriesStore;

/// Port linkage of the four-way reversing valve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FourWayValveState {
    /// A-D and B-C linked.
    AdBc,
    /// A-B and C-D linked.
    AbCd,
}

impl FourWayValveState {
    pub const ALL: [FourWayValveState; 2] = [FourWayValveState::AdBc, FourWayValveState::AbCd];
}

/// Solenoid valves connecting one indoor unit to the three-pipe system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SolenoidStates {
    pub liquid: bool,
    pub suction: bool,
    pub hot_gas: bool,
}

impl SolenoidStates {
    pub fn new(liquid: bool, suction: bool, hot_gas: bool) -> Self {
        SolenoidStates {
            liquid,
            suction,
            hot_gas,
        }
    }

    /// All eight open/closed combinations.
    pub fn all() -> impl Iterator<Item = SolenoidStates> {
        (0u8..8).map(|bits| SolenoidStates::new(bits & 4 != 0, bits & 2 != 0, bits & 1 != 0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum UnitMode {
    /// Cooling the space.
    Evaporator,
    /// Heating the space.
    Condenser,
    Off,
    Invalid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SystemMode {
    Cooling,
    Heating,
    Mixed,
    Off,
}

pub fn system_mode_from_four_way(s: FourWayValveState) -> SystemMode {
    match s {
        FourWayValveState::AdBc => SystemMode::Cooling,
        FourWayValveState::AbCd => SystemMode::Heating,
    }
}

pub fn unit_mode_from_solenoids(s: SolenoidStates) -> UnitMode {
    match (s.liquid, s.suction, s.hot_gas) {
        (true, true, false) => UnitMode::Evaporator,
        (true, false, true) => UnitMode::Condenser,
        (false, false, false) => UnitMode::Off,
        _ => UnitMode::Invalid,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SystemCondition {
    pub mode: SystemMode,
    /// Some unit reported an impossible valve combination; it is left out of
    /// the mode decision.
    pub invalid: bool,
}

/// Aggregates indoor unit modes into the system's working condition.
pub fn system_condition(modes: &[UnitMode]) -> SystemCondition {
    let cooling = modes.contains(&UnitMode::Evaporator);
    let heating = modes.contains(&UnitMode::Condenser);
    let mode = match (cooling, heating) {
        (true, true) => SystemMode::Mixed,
        (true, false) => SystemMode::Cooling,
        (false, true) => SystemMode::Heating,
        (false, false) => SystemMode::Off,
    };
    SystemCondition {
        mode,
        invalid: modes.contains(&UnitMode::Invalid),
    }
}

/// Point IRIs of one indoor unit's solenoid valve status streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolenoidPoints {
    pub liquid: String,
    pub suction: String,
    pub hot_gas: String,
}

/// Valve states from the latest samples at or before `t`; a non-zero value
/// means open. `None` when any stream has no sample yet.
pub fn solenoids_at(store: &SeriesStore, points: &SolenoidPoints, t: i64) -> Option<SolenoidStates> {
    let open = |id: &str| store.latest_at(id, t).map(|s| s.value != 0.0);
    Some(SolenoidStates {
        liquid: open(&points.liquid)?,
        suction: open(&points.suction)?,
        hot_gas: open(&points.hot_gas)?,
    })
}

/// Four-way valve state from a status stream: zero is the A-D/B-C linkage,
/// non-zero (energized) is A-B/C-D.
pub fn four_way_at(store: &SeriesStore, point: &str, t: i64) -> Option<FourWayValveState> {
    store.latest_at(point, t).map(|s| {
        if s.value == 0.0 {
            FourWayValveState::AdBc
        } else {
            FourWayValveState::AbCd
        }
    })
}

/// Working condition of a heat-recovery system at time `t` from the valve
/// streams of its indoor units. Units without data count as off.
pub fn system_condition_at(store: &SeriesStore, units: &[SolenoidPoints], t: i64) -> SystemCondition {
    let modes: Vec<UnitMode> = units
        .iter()
        .map(|u| solenoids_at(store, u, t).map_or(UnitMode::Off, unit_mode_from_solenoids))
        .collect();
    system_condition(&modes)
}
