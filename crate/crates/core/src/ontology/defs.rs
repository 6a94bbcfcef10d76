use super::{compile_ontology, load_definitions, ClassDef, ClassGraph};

/// Definition source for the minimal Brick core shipped with the crate.
pub const BRICK_CORE_JSON: &str = include_str!("../../data/brick_core.json");

/// Definition source for the VRF module.
pub const VRF_MODULE_JSON: &str = include_str!("../../data/vrf_module.json");

pub fn brick_core_defs() -> Vec<ClassDef> {
    load_definitions(BRICK_CORE_JSON)
        .expect("bundled core definitions are valid")
        .classes
}

pub fn vrf_module_defs() -> Vec<ClassDef> {
    load_definitions(VRF_MODULE_JSON)
        .expect("bundled VRF definitions are valid")
        .classes
}

/// Core plus VRF module, compiled.
pub fn default_ontology() -> ClassGraph {
    let mut defs = brick_core_defs();
    defs.extend(vrf_module_defs());
    compile_ontology(&defs).expect("bundled definitions compile")
}
