//! Regenerates the sample instance documents under `data/`.

use smoothcx::cli_io::{mc_doc, serialize_instance, to_json};
use smoothcx::fixtures::{self, BananaCase};
use smoothcx::scalar::Scalar;

fn main() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    std::fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, text: String| std::fs::write(dir.join(name), text).unwrap();
    write("ebif.json", serialize_instance(&fixtures::ebif()));
    write("nonsolvable_cycle.json", serialize_instance(&fixtures::nonsolvable_cycle()));
    for case in 1..=3 {
        write(&format!("lattice_{case}.json"), serialize_instance(&fixtures::lattice(case)));
    }
    write("beta_forcing.json", serialize_instance(&fixtures::beta_forcing()));
    write("single_edge.json", serialize_instance(&fixtures::single_edge(2, Scalar::one())));
    write("loop_closing.json", serialize_instance(&fixtures::loop_with_minima(&[true])));
    write("loop_opening.json", serialize_instance(&fixtures::loop_with_minima(&[false])));
    let cands: Vec<_> =
        [BananaCase::Level, BananaCase::QHigher, BananaCase::PHigher].iter().map(|&c| fixtures::banana_fills(c)).collect();
    write("banana_positive.json", to_json(&mc_doc(&fixtures::banana_mc(["0", "1", "2"], ["0", "1", "2"]), &cands)));
    write("banana_negative.json", to_json(&mc_doc(&fixtures::banana_mc(["0", "1", "2"], ["0", "1", "3"]), &cands)));
}
