//! The flower and glued structures, and the exact inequalities behind the
//! counterexample for f = log_b(x + 1).

use amalgam::counterexample::{build_flower, build_glued, flower_kf_parametric, verify_hrcon, FlowerParams};
use amalgam::{delta, find_leq_embeddings, kf_member, Budget, ControlFunction};

fn main() -> amalgam::Result<()> {
    let budget = Budget::from_env()?;

    // Small enough to build and check by brute force.
    let p = FlowerParams::new(3, 3)?;
    let flower = build_flower(&p, &budget)?;
    let all: Vec<usize> = flower.points().collect();
    println!(
        "flower(3,3): {} points, delta {}, parametric K_f {}",
        flower.size(),
        delta(&flower, &all)?,
        flower_kf_parametric(&p)
    );
    let glued = build_glued(&p, &budget)?;
    let all: Vec<usize> = glued.points().collect();
    println!("glued(3,3): {} points, delta {}", glued.size(), delta(&glued, &all)?);
    println!("flower ≤-embeddings into glued: {}", find_leq_embeddings(&flower, &glued).len());
    let big = Budget { subset_points: 21, ..budget };
    println!("glued(3,3) in K_f for log_3: {}", kf_member(&glued, &ControlFunction::log(3)?, &big)?.member);

    // Far too large to build; the closed forms decide it.
    for (n, b) in [(3, 8), (10, 8), (40, 16)] {
        let r = verify_hrcon(n, b)?;
        println!("--- n = {n}, base = {b}");
        println!("{r}");
    }
    Ok(())
}
