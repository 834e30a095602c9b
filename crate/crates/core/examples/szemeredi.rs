//! Amalgamation solutions over Z_N and the progressions they encode.

use amalgam::szemeredi::{run_pipeline, CyclicInstance, PipelineOptions};
use amalgam::Budget;

fn main() -> amalgam::Result<()> {
    let budget = Budget::from_env()?;
    let opts = PipelineOptions {
        samples: 200,
        seed: 1,
        show: 4,
    };
    for (modulus, n, set) in [
        (7, 3, vec![0, 1, 2]),
        (11, 3, vec![1, 3, 4, 5, 9]),
        (13, 4, vec![0, 1, 2, 3, 5, 8]),
    ] {
        let inst = CyclicInstance::new(modulus, n, set.clone())?;
        let r = run_pipeline(&inst, &opts, &budget)?;
        println!(
            "N = {modulus}, n = {n}, A = {set:?}: |E| = {}, solutions {}, nondegenerate {}, hypotheses hold {}",
            r.e_size,
            r.solutions,
            r.nondegenerate,
            r.hypotheses.holds()
        );
        for (p, terms) in &r.progressions {
            println!("  AP {} {} : {terms:?}", p.a, p.d);
        }
    }
    Ok(())
}
