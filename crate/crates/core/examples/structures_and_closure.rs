//! Predimension, self-sufficiency and closure on a small 3-hypergraph.

use amalgam::{closure, delta, dim, free_amalgam, in_k0, is_self_sufficient, FinStruct};

fn main() -> amalgam::Result<()> {
    // Two triangles' worth of R-tuples sharing the edge {0,1}.
    let b = FinStruct::parse(
        "points 5\n\
         rel R 3\n\
         R 0 1 2\n\
         R 0 1 3\n\
         R 2 3 4\n",
    )?;
    println!("{b}");
    println!("delta(B) = {}, in K_0: {}", delta(&b, &[0, 1, 2, 3, 4])?, in_k0(&b));

    for x in [vec![0, 1], vec![0, 1, 2], vec![2, 3], vec![4]] {
        let c = closure(&b, &x)?;
        println!(
            "X = {x:?}: delta {}, self-sufficient {}, closure {:?}, d {}",
            delta(&b, &x)?,
            is_self_sufficient(&b, &x)?,
            c.closure,
            dim(&b, &x)?
        );
    }

    // Free amalgam of B with itself over {0,1}: no tuples across the two sides.
    let am = free_amalgam(&b, &b, &[(0, 0), (1, 1)])?;
    println!(
        "B ⊔ B over {{0,1}}: {} points, {} tuples, delta {}",
        am.structure.size(),
        am.structure.tuple_count(),
        delta(&am.structure, &am.structure.points().collect::<Vec<_>>())?
    );
    Ok(())
}
