//! Seeded finite approximation to the generic structure, saved and reloaded.

use amalgam::generic::{acl, build_generic, load_chain, same_type, save_chain, validate, BuildOptions};
use amalgam::{Budget, ControlFunction, Signature};

fn main() -> amalgam::Result<()> {
    let budget = Budget::from_env()?;
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let opts = BuildOptions {
        rounds: 2,
        max_base: 2,
        max_new: 2,
        max_points: 14,
        seed,
    };
    let chain = build_generic(ControlFunction::log(8)?, "R:3".parse::<Signature>()?, &opts, &budget)?;
    println!("seed {seed}: {} stages", chain.stages().len());
    let tail = chain.tail();
    println!("tail: {} points, {} tuples", tail.size(), tail.tuple_count());
    println!("validation: {:?}", validate(&chain, &budget)?);

    if tail.size() >= 2 {
        println!("acl({{0}}) = {:?}", acl(&chain, &[0])?);
        println!("tp(0) = tp(1)? {}", same_type(&chain, &[0], &[1])?);
    }

    let dir = std::env::temp_dir().join(format!("amalgam-chain-{seed}"));
    save_chain(&chain, &dir)?;
    let back = load_chain(&dir)?;
    println!("reloaded from {}: identical {}", dir.display(), back == chain);
    Ok(())
}
