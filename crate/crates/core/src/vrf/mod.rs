//! VRF operating-mode logic and model generators.

mod models;
mod modes;

pub use models::{
    application_meter, application_outside_temperature, generate_application_model, generate_validation_model,
    ModelParams, APPLICATION_GRAPH, INDOOR_POINTS, VALIDATION_GRAPH, VALIDATION_QUERY,
};
pub use modes::{
    four_way_at, solenoids_at, system_condition, system_condition_at, system_mode_from_four_way,
    unit_mode_from_solenoids, FourWayValveState, SolenoidPoints, SolenoidStates, SystemCondition, SystemMode, UnitMode,
};
