//! One-shot fixture generator: writes the reference graph and family
//! documents under fixtures/.

use std::fs;

use wzeta::corpus::tensor_family;
use wzeta::graph::{fixture, Fixture};
use wzeta::translations::Lattice;

fn family_doc(lattice_rows: &[Vec<i64>]) -> String {
    let lattice = Lattice::new(lattice_rows.to_vec()).unwrap();
    let fam = tensor_family::<f64>(lattice);
    let gens: Vec<Vec<f64>> = fam
        .generators()
        .iter()
        .map(|g| {
            let mut flat = Vec::with_capacity(g.rows() * g.cols());
            for i in 0..g.rows() {
                for j in 0..g.cols() {
                    flat.push(g[(i, j)]);
                }
            }
            flat
        })
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({
        "d": fam.rank(),
        "dim": fam.dim(),
        "generators": gens,
        "lattice": { "gens": lattice_rows },
    }))
    .unwrap()
}

fn main() {
    fs::create_dir_all("fixtures").unwrap();
    let graphs = [
        ("g1_c05.json", fixture::<f64>(Fixture::Loop { c: 0.5 })),
        ("g1_c1.json", fixture::<f64>(Fixture::Loop { c: 1.0 })),
        ("g1_c2.json", fixture::<f64>(Fixture::Loop { c: 2.0 })),
        ("g2_1_1.json", fixture::<f64>(Fixture::TwoCycle { p: 1.0, q: 1.0 })),
        ("g2_2_3.json", fixture::<f64>(Fixture::TwoCycle { p: 2.0, q: 3.0 })),
        ("g3.json", fixture::<f64>(Fixture::SharedTriangles)),
        ("g4.json", fixture::<f64>(Fixture::LoopedTriangles)),
    ];
    for (name, g) in graphs {
        fs::write(format!("fixtures/{name}"), g.to_json() + "\n").unwrap();
    }
    fs::write(
        "fixtures/family_f1.json",
        family_doc(&[vec![1, 0], vec![0, 1]]) + "\n",
    )
    .unwrap();
    fs::write(
        "fixtures/family_f1_even.json",
        family_doc(&[vec![1, 0], vec![1, 2]]) + "\n",
    )
    .unwrap();
}
