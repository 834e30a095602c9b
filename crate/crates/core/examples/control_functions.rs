//! Control functions, exact K_f membership and the free-amalgamation check.

use amalgam::control::check_free_amalgamation_instance;
use amalgam::{good_f_report, kf_member, Budget, ControlFunction, FinStruct};

fn main() -> amalgam::Result<()> {
    let budget = Budget::from_env()?;
    for spec in ["log:2", "log:3", "log:8"] {
        let f: ControlFunction = spec.parse()?;
        let r = good_f_report(&f);
        println!(
            "{f}: free amalgamation {}, dimension theorem {}, slow growth {}",
            r.free_amalgamation, r.dim_theorem, r.slow_growth
        );
    }

    // A piecewise-linear table is only sampled, so its report is advisory.
    let table = ControlFunction::parse_table("0 0\n4 1\n16 2\n64 3\n")?;
    println!("{table}: {:?}", good_f_report(&table));

    // Three points, one tuple: delta 2. Fine under log_2 (2^2 >= 4) but a
    // pair of tuples on four points drops delta to 2 with size 4: 4 < 5.
    let f = ControlFunction::log(2)?;
    for text in ["points 3\nrel R 3\nR 0 1 2\n", "points 4\nrel R 3\nR 0 1 2\nR 1 2 3\n"] {
        let s = FinStruct::parse(text)?;
        let m = kf_member(&s, &f, &budget)?;
        println!("{} points, {} tuples: member {}, witness {:?}", s.size(), s.tuple_count(), m.member, m.witness);
    }

    // A0 = one point, A1 = A2 = a tuple through it.
    let a0 = FinStruct::parse("points 1\nrel R 3\n")?;
    let a1 = FinStruct::parse("points 3\nrel R 3\nR 0 1 2\n")?;
    let f = ControlFunction::log(8)?;
    let check = check_free_amalgamation_instance(&a0, &a1, &a1, &[0], &[0], &f, &budget)?;
    println!(
        "amalgam over a point: {} points, conclusion holds {}",
        check.amalgam.size(),
        check.holds()
    );
    Ok(())
}
