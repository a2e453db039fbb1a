//! Fixture loading shared by the benchmarks.

use polyinv::Network;

pub const CLASSIFIER: &str = include_str!("../../../fixtures/classifier.json");
pub const CLASSIFIER_LEAKY: &str = include_str!("../../../fixtures/classifier_leaky.json");
pub const PARABOLA: &str = include_str!("../../../fixtures/parabola.json");
pub const XOR: &str = include_str!("../../../fixtures/xor.json");

pub fn network(text: &str) -> Network {
    Network::from_json(text).expect("fixture network parses")
}
