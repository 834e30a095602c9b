//! The gadget F glued from C and T, and the first non-orthogonality step.

use amalgam::counterexample::{build_tech_f, nonorthogonal_step1, verify_tech_f};
use amalgam::{Budget, ControlFunction, FinStruct};

fn main() -> amalgam::Result<()> {
    let budget = Budget::from_env()?;
    let f = ControlFunction::log(8)?;

    // C = {a, c}, T = {a, t1, t2}, no tuples: F adds s1, s2 with R(c, s_i, t_i).
    let c = FinStruct::parse("points 2\nrel R 3\n")?;
    let t = FinStruct::parse("points 3\nrel R 3\n")?;
    let g = build_tech_f(&c, &t, &[(0, 0)], 1, &[1, 2])?;
    print!("{}", g.structure);
    let r = verify_tech_f(&g, &f, &budget)?;
    println!("{r:?}\nall conclusions hold: {}", r.all_hold());

    // Preconditions are checked, not assumed.
    match build_tech_f(&c, &t, &[(0, 0), (1, 1)], 1, &[2]) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => println!("unexpectedly accepted"),
    }

    // B = one free point b over the empty set; three copies in T.
    let b = FinStruct::parse("points 1\nrel R 3\n")?;
    let step = nonorthogonal_step1(&b, &[], 0, 3)?;
    let r = verify_tech_f(&step.gadget, &f, &budget)?;
    println!("step 1 with r = 3: witness {:?}, conclusions hold {}", step.witness, r.all_hold());
    Ok(())
}
