//! Dimension/measure catalogs: a generated finite model, the squaring map on
//! Z_m, and a doctored catalog that breaks Fubini.

use amalgam::measure::{check_all, cyclic_square_catalog, nu_normalize, DimMeasureCatalog, FiniteModel};

fn report(name: &str, c: &DimMeasureCatalog) -> amalgam::Result<()> {
    println!("== {name}");
    for r in check_all(c)? {
        println!("  {} {} ({} checked)", r.axiom, if r.passed() { "PASS" } else { "FAIL" }, r.checked);
        for f in &r.failures {
            println!("    {f}");
        }
    }
    Ok(())
}

fn main() -> amalgam::Result<()> {
    let mut m = FiniteModel::new();
    let x = m.add_set("X", 6);
    let y = m.add_set("Y", 3);
    m.add_map("f", x, y, vec![0, 0, 1, 1, 2, 2])?;
    m.add_product("XY", &[x, y]);
    let c = m.to_catalog();
    report("finite model", &c)?;

    let sq = cyclic_square_catalog(13, 4)?;
    report("squaring on Z_13", &sq)?;
    println!("  nu^Z1(D) = {}", nu_normalize(&sq, "Z1", "D")?);

    // Same map, but X now claims measure 8 in dimension 2 against fibres of
    // measure 1 over a 1-dimensional base of measure 4.
    let bad = DimMeasureCatalog::parse(
        "set X 2 8\nset Y 1 4\nmap f from X to Y\nfibre f over Y value 1 1\n",
    )?;
    report("doctored", &bad)?;
    print!("{bad}");
    Ok(())
}
