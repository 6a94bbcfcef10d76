use crate::rdf::{default_namespaces, Graph, Term, Triple};

/// Query over the validation model: every indoor unit located in an office
/// of the first floor.
pub const VALIDATION_QUERY: &str = "PREFIX brick: <https://brickschema.org/schema/Brick#>
PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>
PREFIX br: <http://vocab.deri.ie/br#>
PREFIX b66: <http://example.com/b66#>
PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>
SELECT DISTINCT ?VRF_Indoor from <http://example.com/b66#>
WHERE {
  values ?Floor {b66:Floor_1} .
  ?Floor rdf:type brick:Floor .
  ?Office rdf:type brick:Office .
  ?VRF_Indoor rdf:type brick:VRF_Indoor .
  ?Office brick:isPartOf ?Floor .
  ?Office brick:isLocationOf ?VRF_Indoor .
}
";

pub const VALIDATION_GRAPH: &str = "http://example.com/b66#";
pub const APPLICATION_GRAPH: &str = "http://example.com/b6#";

/// Point suffixes attached to every indoor unit, with their point classes.
pub const INDOOR_POINTS: [(&str, &str); 4] = [
    ("T1", "Return_Air_Temperature_Sensor"),
    ("T2", "Temperature_Sensor"),
    ("T2B", "Temperature_Sensor"),
    ("On_Off_Command", "On_Off_Command"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelParams {
    pub floors: usize,
    pub offices_per_floor: usize,
    pub indoor_units_per_office: usize,
    pub outdoor_units_per_office: usize,
    /// Namespace for generated entities; also the graph name.
    pub graph_iri: String,
    pub prefix: String,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            floors: 1,
            offices_per_floor: 5,
            indoor_units_per_office: 10,
            outdoor_units_per_office: 1,
            graph_iri: VALIDATION_GRAPH.to_string(),
            prefix: "b66".to_string(),
        }
    }
}

impl ModelParams {
    /// Number of triples `generate_validation_model` emits.
    pub fn expected_triples(&self) -> usize {
        let f = self.floors;
        let o = self.offices_per_floor;
        let u = self.indoor_units_per_office;
        let d = self.outdoor_units_per_office;
        1 + 2 * f + 4 * f * o + 11 * f * o * u + f * o * d * (3 + u)
    }
}

struct Builder {
    ns: String,
    graph: Graph,
}

impl Builder {
    fn new(ns: &str, prefix: &str) -> Self {
        let mut namespaces = default_namespaces();
        namespaces.insert(prefix.to_string(), ns.to_string());
        let graph = Graph::named(ns).with_namespaces(namespaces);
        Builder {
            ns: ns.to_string(),
            graph,
        }
    }

    fn node(&self, local: &str) -> Term {
        Term::iri(format!("{}{}", self.ns, local))
    }

    fn a(&mut self, local: &str, class: &str) {
        let t = Triple::new(self.node(local), Term::rdf_type(), Term::brick(class)).expect("valid triple");
        self.graph.insert(t);
    }

    fn rel(&mut self, s: &str, p: &str, o: &str) {
        let t = Triple::new(self.node(s), Term::brick(p), self.node(o)).expect("valid triple");
        self.graph.insert(t);
    }

    /// An indoor unit with its four points, located in `office` and feeding `zone`.
    fn indoor_unit(&mut self, unit: &str, office: &str, zone: &str) {
        self.a(unit, "VRF_Indoor");
        self.rel(office, "isLocationOf", unit);
        self.rel(unit, "feeds", zone);
        for (suffix, class) in INDOOR_POINTS {
            let point = format!("{unit}_{suffix}");
            self.rel(unit, "hasPoint", &point);
            self.a(&point, class);
        }
    }
}

/// Building → floors → offices with an HVAC zone each, indoor units located in
/// the office feeding its zone, and outdoor units feeding the indoor units.
pub fn generate_validation_model(p: &ModelParams) -> Graph {
    let mut b = Builder::new(&p.graph_iri, &p.prefix);
    b.a("Building", "Building");
    for i in 1..=p.floors {
        let floor = format!("Floor_{i}");
        b.a(&floor, "Floor");
        b.rel(&floor, "isPartOf", "Building");
        for j in 1..=p.offices_per_floor {
            let office = format!("{floor}_Office_{j}");
            let zone = format!("{office}_HVAC");
            b.a(&office, "Office");
            b.rel(&office, "isPartOf", &floor);
            b.a(&zone, "HVAC_Zone");
            b.rel(&zone, "isPartOf", &office);
            let units: Vec<String> = (1..=p.indoor_units_per_office)
                .map(|k| format!("{office}_VRF_Indoor_{k}"))
                .collect();
            for unit in &units {
                b.indoor_unit(unit, &office, &zone);
            }
            for m in 1..=p.outdoor_units_per_office {
                let outdoor = format!("{office}_VRF_Outdoor_{m}");
                let cmd = format!("{outdoor}_On_Off_Command");
                b.a(&outdoor, "VRF_Outdoor");
                b.rel(&outdoor, "hasPoint", &cmd);
                b.a(&cmd, "On_Off_Command");
                for unit in &units {
                    b.rel(&outdoor, "feeds", unit);
                }
            }
        }
    }
    b.graph
}

/// IRI of an office's energy meter in the application model (`office` is 1 or 2).
pub fn application_meter(office: usize) -> String {
    format!("{APPLICATION_GRAPH}Office_{office}_Energy_Meter")
}

/// IRI of the building's outside-air temperature point in the application model.
pub fn application_outside_temperature() -> String {
    format!("{APPLICATION_GRAPH}Outside_Air_Temperature")
}

/// Two offices, each with an HVAC and a lighting zone, three indoor units,
/// one outdoor unit and an energy meter; plus a building outside-air
/// temperature point.
pub fn generate_application_model() -> Graph {
    let mut b = Builder::new(APPLICATION_GRAPH, "b6");
    b.a("Building", "Building");
    b.a("Outside_Air_Temperature", "Outside_Air_Temperature_Sensor");
    b.rel("Building", "hasPoint", "Outside_Air_Temperature");
    for n in 1..=2 {
        let office = format!("Office_{n}");
        let zone = format!("{office}_HVAC");
        let lighting = format!("{office}_lighting");
        let meter = format!("{office}_Energy_Meter");
        b.a(&office, "Office");
        b.rel(&office, "isPartOf", "Building");
        b.a(&zone, "HVAC_Zone");
        b.rel(&zone, "isPartOf", &office);
        b.a(&lighting, "Lighting_Zone");
        b.rel(&lighting, "isPartOf", &office);
        b.a(&meter, "Energy_Sensor");
        b.rel(&zone, "hasPoint", &meter);

        let units: Vec<String> = (1..=3).map(|k| format!("{office}_VRF_Indoor_{k}")).collect();
        for unit in &units {
            b.indoor_unit(unit, &office, &zone);
        }
        let outdoor = format!("{office}_VRF_outdoor");
        let cmd = format!("{outdoor}_On_Off_Command");
        b.a(&outdoor, "VRF_Outdoor");
        b.rel(&outdoor, "hasPoint", &cmd);
        b.a(&cmd, "On_Off_Command");
        for unit in &units {
            b.rel(&outdoor, "feeds", unit);
        }
    }
    b.graph
}
