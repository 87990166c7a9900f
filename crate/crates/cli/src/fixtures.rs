//! Input documents shipped with the binary, addressed as `@name`.

pub const FIXTURES: &[(&str, &str)] = &[
    ("theorem6-free-model", include_str!("../fixtures/theorem6-free-model.json")),
    ("cones", include_str!("../fixtures/cones.json")),
    ("square-lattice", include_str!("../fixtures/square-lattice.json")),
    ("counterexample-gluing", include_str!("../fixtures/counterexample-gluing.json")),
];

pub fn get(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn names() -> Vec<&'static str> {
    FIXTURES.iter().map(|(n, _)| *n).collect()
}
