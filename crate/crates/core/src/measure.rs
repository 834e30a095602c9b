//! Explicit dimension-measure catalogs and the finite consequences of the
//! measurability axioms that can be checked on them.
//!
//! "Definable" is modelled as "declared": a catalog lists sets with their
//! `h = (dim, μ)` values, subset relations, maps with their fibre pieces,
//! families of sets that must share values piece by piece, and products.
//!
//! ```text
//! set X 0 6 explicit 6
//! set Z 1 3/2
//! set Y 0 3 explicit 3
//! map f from X to Y
//! fibre f over Y value 0 2 count 2
//! family F = A,B | C
//! product P = S1,S2
//! subset D of S1
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{parse_err, Error, Result};

/// A dimension-measure value `(dim, μ)` with `μ > 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HValue {
    pub dim: u32,
    pub mu: BigRational,
}

impl HValue {
    pub fn new(dim: u32, mu: BigRational) -> Result<Self> {
        if !mu.is_positive() {
            return Err(Error::InvalidParams(format!("measure must be positive, got {mu}")));
        }
        Ok(HValue { dim, mu })
    }

    pub fn counting(size: u64) -> Self {
        HValue {
            dim: 0,
            mu: BigRational::from_integer(BigInt::from(size)),
        }
    }
}

impl fmt::Display for HValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.dim, self.mu)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogSet {
    pub name: String,
    pub h: HValue,
    /// Cardinality, for sets given as explicit finite sets.
    pub explicit: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapDecl {
    pub name: String,
    pub from: String,
    pub to: String,
}

/// Over every point of `piece`, the fibre of `map` has value `value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibreDecl {
    pub map: String,
    pub piece: String,
    pub value: HValue,
    /// Cardinality of each fibre, when the fibres are finite.
    pub count: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyDecl {
    pub name: String,
    /// Sets within one piece must carry equal values.
    pub pieces: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductDecl {
    pub name: String,
    pub factors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DimMeasureCatalog {
    pub sets: Vec<CatalogSet>,
    /// `(subset, superset)` pairs.
    pub subsets: Vec<(String, String)>,
    pub maps: Vec<MapDecl>,
    pub fibres: Vec<FibreDecl>,
    pub families: Vec<FamilyDecl>,
    pub products: Vec<ProductDecl>,
}

fn parse_rat(tok: &str) -> std::result::Result<BigRational, String> {
    let (n, d) = tok.split_once('/').unwrap_or((tok, "1"));
    let n: BigInt = n.parse().map_err(|_| format!("bad numerator in {tok:?}"))?;
    let d: BigInt = d.parse().map_err(|_| format!("bad denominator in {tok:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in {tok:?}"));
    }
    Ok(BigRational::new(n, d))
}

fn parse_h(dim: &str, mu: &str) -> std::result::Result<HValue, String> {
    let dim: u32 = dim.parse().map_err(|_| format!("bad dimension {dim:?}"))?;
    let mu = parse_rat(mu)?;
    HValue::new(dim, mu).map_err(|e| e.to_string())
}

fn names(list: &str) -> Vec<String> {
    list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

impl DimMeasureCatalog {
    pub fn set(&self, name: &str) -> Option<&CatalogSet> {
        self.sets.iter().find(|s| s.name == name)
    }

    pub fn h(&self, name: &str) -> Option<&HValue> {
        self.set(name).map(|s| &s.h)
    }

    fn map(&self, name: &str) -> Option<&MapDecl> {
        self.maps.iter().find(|m| m.name == name)
    }

    pub fn is_declared_subset(&self, sub: &str, sup: &str) -> bool {
        sub == sup || self.subsets.iter().any(|(a, b)| a == sub && b == sup)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = DimMeasureCatalog::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| parse_err(line_no, m);
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                ["set", name, dim, mu, rest @ ..] => {
                    let h = parse_h(dim, mu).map_err(err)?;
                    let explicit = match rest {
                        [] => None,
                        ["explicit", k] => Some(k.parse().map_err(|_| err(format!("bad size {k:?}")))?),
                        _ => return Err(err("expected `explicit <k>` after the value".into())),
                    };
                    if c.set(name).is_some() {
                        return Err(err(format!("set {name} declared twice")));
                    }
                    c.sets.push(CatalogSet {
                        name: name.to_string(),
                        h,
                        explicit,
                    });
                }
                ["subset", sub, "of", sup] => {
                    for n in [sub, sup] {
                        if c.set(n).is_none() {
                            return Err(err(format!("unknown set {n}")));
                        }
                    }
                    c.subsets.push((sub.to_string(), sup.to_string()));
                }
                ["map", name, "from", x, "to", y] => {
                    for n in [x, y] {
                        if c.set(n).is_none() {
                            return Err(err(format!("unknown set {n}")));
                        }
                    }
                    if c.map(name).is_some() {
                        return Err(err(format!("map {name} declared twice")));
                    }
                    c.maps.push(MapDecl {
                        name: name.to_string(),
                        from: x.to_string(),
                        to: y.to_string(),
                    });
                }
                ["fibre", map, "over", piece, "value", dim, mu, rest @ ..] => {
                    if c.map(map).is_none() {
                        return Err(err(format!("unknown map {map}")));
                    }
                    let value = parse_h(dim, mu).map_err(err)?;
                    let count = match rest {
                        [] => None,
                        ["count", k] => Some(k.parse().map_err(|_| err(format!("bad count {k:?}")))?),
                        _ => return Err(err("expected `count <n>` after the value".into())),
                    };
                    c.fibres.push(FibreDecl {
                        map: map.to_string(),
                        piece: piece.to_string(),
                        value,
                        count,
                    });
                }
                ["family", name, "=", ..] => {
                    let body = line.split_once('=').map(|(_, b)| b).unwrap_or("");
                    let pieces: Vec<Vec<String>> = body.split('|').map(names).collect();
                    if pieces.iter().any(|p| p.is_empty()) {
                        return Err(err("empty family piece".into()));
                    }
                    for n in pieces.iter().flatten() {
                        if c.set(n).is_none() {
                            return Err(err(format!("unknown set {n}")));
                        }
                    }
                    c.families.push(FamilyDecl {
                        name: name.to_string(),
                        pieces,
                    });
                }
                ["product", name, "=", ..] => {
                    let factors = names(line.split_once('=').map(|(_, b)| b).unwrap_or(""));
                    if factors.len() < 2 {
                        return Err(err("a product needs at least two factors".into()));
                    }
                    for n in factors.iter().chain(std::iter::once(&name.to_string())) {
                        if c.set(n).is_none() {
                            return Err(err(format!("unknown set {n}")));
                        }
                    }
                    c.products.push(ProductDecl {
                        name: name.to_string(),
                        factors,
                    });
                }
                _ => return Err(err(format!("unrecognized line {line:?}"))),
            }
        }
        Ok(c)
    }
}

fn rat_str(r: &BigRational) -> String {
    r.to_string()
}

impl fmt::Display for DimMeasureCatalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sets {
            write!(f, "set {} {} {}", s.name, s.h.dim, rat_str(&s.h.mu))?;
            if let Some(k) = s.explicit {
                write!(f, " explicit {k}")?;
            }
            writeln!(f)?;
        }
        for (a, b) in &self.subsets {
            writeln!(f, "subset {a} of {b}")?;
        }
        for m in &self.maps {
            writeln!(f, "map {} from {} to {}", m.name, m.from, m.to)?;
        }
        for fb in &self.fibres {
            write!(f, "fibre {} over {} value {} {}", fb.map, fb.piece, fb.value.dim, rat_str(&fb.value.mu))?;
            if let Some(k) = fb.count {
                write!(f, " count {k}")?;
            }
            writeln!(f)?;
        }
        for fam in &self.families {
            let pieces: Vec<String> = fam.pieces.iter().map(|p| p.join(",")).collect();
            writeln!(f, "family {} = {}", fam.name, pieces.join(" | "))?;
        }
        for p in &self.products {
            writeln!(f, "product {} = {}", p.name, p.factors.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for DimMeasureCatalog {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DimMeasureCatalog::parse(s)
    }
}

/// Outcome of one axiom check over a catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom: &'static str,
    /// Number of individual conditions evaluated.
    pub checked: usize,
    pub failures: Vec<String>,
}

impl AxiomReport {
    fn new(axiom: &'static str) -> Self {
        AxiomReport {
            axiom,
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, failure: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(failure());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Finite sets have `h = (0, |X|)`.
pub fn check_axiom_finite(c: &DimMeasureCatalog) -> AxiomReport {
    let mut r = AxiomReport::new("finite");
    for s in &c.sets {
        if let Some(k) = s.explicit {
            let want = HValue::counting(k);
            r.expect(s.h == want, || format!("{}: explicit with {k} elements but h = {}", s.name, s.h));
        }
    }
    r
}

/// Within each declared piece of a family the value is constant. The
/// finiteness of the value set is automatic for a finite catalog.
pub fn check_axiom_family(c: &DimMeasureCatalog) -> AxiomReport {
    let mut r = AxiomReport::new("family");
    for fam in &c.families {
        for (i, piece) in fam.pieces.iter().enumerate() {
            let first = c.h(&piece[0]);
            for name in &piece[1..] {
                let h = c.h(name);
                r.expect(h == first, || {
                    format!(
                        "family {} piece {i}: {} has {} but {} has {}",
                        fam.name,
                        piece[0],
                        first.map_or("?".into(), |v| v.to_string()),
                        name,
                        h.map_or("?".into(), |v| v.to_string())
                    )
                });
            }
        }
    }
    r
}

/// The value the Fubini rule assigns to the source of `map`.
pub fn fubini_value(c: &DimMeasureCatalog, map: &str) -> Result<HValue> {
    let m = c
        .map(map)
        .ok_or_else(|| Error::InvalidParams(format!("unknown map {map}")))?;
    let pieces: Vec<&FibreDecl> = c.fibres.iter().filter(|f| f.map == map).collect();
    if pieces.is_empty() {
        return Err(Error::Precondition(format!("map {map} declares no fibre pieces")));
    }
    let mut best: Option<(u32, BigRational)> = None;
    for p in &pieces {
        let h = c
            .h(&p.piece)
            .ok_or_else(|| Error::Precondition(format!("map {map}: undeclared fibre class {}", p.piece)))?;
        if !c.is_declared_subset(&p.piece, &m.to) {
            return Err(Error::Precondition(format!(
                "map {map}: fibre class {} is not declared inside {}",
                p.piece, m.to
            )));
        }
        let dim = p.value.dim + h.dim;
        let term = &p.value.mu * &h.mu;
        best = match best {
            Some((d, _)) if d > dim => best,
            Some((d, mu)) if d == dim => Some((d, mu + term)),
            _ => Some((dim, term)),
        };
    }
    let (dim, mu) = best.expect("at least one piece");
    HValue::new(dim, mu)
}

/// For each map: the Fubini rule reproduces `h(source)`; finite fibres have
/// `h = (0, count)`; and, when everything is explicit, the pieces partition
/// the target and the fibre counts add up to the source.
pub fn check_axiom_fubini(c: &DimMeasureCatalog) -> Result<AxiomReport> {
    let mut r = AxiomReport::new("fubini");
    for m in &c.maps {
        let value = fubini_value(c, &m.name)?;
        let declared = c.h(&m.from).expect("validated at parse time");
        r.expect(&value == declared, || {
            format!("map {}: fibres give {} but h({}) = {}", m.name, value, m.from, declared)
        });
        let pieces: Vec<&FibreDecl> = c.fibres.iter().filter(|f| f.map == m.name).collect();
        for p in &pieces {
            if let Some(k) = p.count {
                r.expect(p.value == HValue::counting(k), || {
                    format!("map {} over {}: {k}-element fibres but value {}", m.name, p.piece, p.value)
                });
            }
        }
        let sizes: Option<Vec<(u64, u64)>> = pieces
            .iter()
            .map(|p| Some((c.set(&p.piece)?.explicit?, p.count?)))
            .collect();
        if let (Some(sizes), Some(src), Some(tgt)) = (
            sizes,
            c.set(&m.from).and_then(|s| s.explicit),
            c.set(&m.to).and_then(|s| s.explicit),
        ) {
            let covered: u64 = sizes.iter().map(|(y, _)| y).sum();
            r.expect(covered == tgt, || {
                format!("map {}: pieces cover {covered} of {tgt} target points", m.name)
            });
            let total: u64 = sizes.iter().map(|(y, k)| y * k).sum();
            r.expect(total == src, || {
                format!("map {}: fibres hold {total} points but the source has {src}", m.name)
            });
        }
    }
    Ok(r)
}

/// `ν^S(D) = μ(D)/μ(S)` when `dim D = dim S`, else 0.
pub fn nu_normalize(c: &DimMeasureCatalog, s: &str, d: &str) -> Result<BigRational> {
    if !c.is_declared_subset(d, s) {
        return Err(Error::Precondition(format!("{d} is not declared a subset of {s}")));
    }
    let hs = c.h(s).ok_or_else(|| Error::InvalidParams(format!("unknown set {s}")))?;
    let hd = c.h(d).ok_or_else(|| Error::InvalidParams(format!("unknown set {d}")))?;
    Ok(if hd.dim == hs.dim {
        &hd.mu / &hs.mu
    } else {
        BigRational::zero()
    })
}

/// For each product `S = S_1 × … × S_n`: `dim` adds and `μ` multiplies over
/// the factors, and for every declared subset `D` of a factor `S_i`, the
/// push-forward `ν^S(D × S_rest)` equals `ν^{S_i}(D)`.
pub fn check_product_pushforward(c: &DimMeasureCatalog) -> AxiomReport {
    let mut r = AxiomReport::new("product");
    for p in &c.products {
        let hp = c.h(&p.name).expect("validated at parse time");
        let factors: Vec<&HValue> = p.factors.iter().map(|f| c.h(f).expect("validated")).collect();
        let dim: u32 = factors.iter().map(|h| h.dim).sum();
        let mu = factors.iter().fold(BigRational::one(), |acc, h| acc * &h.mu);
        r.expect(hp.dim == dim, || format!("product {}: dim {} but factors add to {dim}", p.name, hp.dim));
        r.expect(hp.mu == mu, || format!("product {}: mu {} but factors multiply to {mu}", p.name, hp.mu));

        for (i, factor) in p.factors.iter().enumerate() {
            let rest_dim = dim - factors[i].dim;
            let rest_mu = &mu / &factors[i].mu;
            for (d, _) in c.subsets.iter().filter(|(_, sup)| sup == factor) {
                let hd = c.h(d).expect("validated");
                // h(D × S_rest) by the Fubini rule over the projection to S_i
                let cyl_dim = hd.dim + rest_dim;
                let pushed = if cyl_dim == hp.dim {
                    &hd.mu * &rest_mu / &hp.mu
                } else {
                    BigRational::zero()
                };
                let direct = nu_normalize(c, factor, d).expect("declared subset");
                r.expect(pushed == direct, || {
                    format!("product {}: push-forward of {d} is {pushed} but nu^{factor}({d}) = {direct}", p.name)
                });
            }
        }
    }
    r
}

/// All four checks, in a fixed order.
pub fn check_all(c: &DimMeasureCatalog) -> Result<Vec<AxiomReport>> {
    Ok(vec![
        check_axiom_finite(c),
        check_axiom_family(c),
        check_axiom_fubini(c)?,
        check_product_pushforward(c),
    ])
}

/// Finite sets and functions from which a counting catalog is generated:
/// every set gets `(0, |X|)`, every map its fibre pieces grouped by fibre
/// size, and every product its coordinate projections.
#[derive(Debug, Clone, Default)]
pub struct FiniteModel {
    sets: Vec<(String, u64)>,
    subsets: Vec<(String, usize, u64)>,
    maps: Vec<(String, usize, usize, Vec<usize>)>,
    products: Vec<(String, Vec<usize>)>,
}

impl FiniteModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Panics on an empty set: catalog measures are positive.
    pub fn add_set(&mut self, name: &str, size: u64) -> usize {
        assert!(size > 0, "catalog sets are non-empty");
        self.sets.push((name.to_string(), size));
        self.sets.len() - 1
    }

    pub fn add_subset(&mut self, name: &str, of: usize, size: u64) -> Result<()> {
        if size == 0 {
            return Err(Error::InvalidParams(format!("{name} is empty")));
        }
        if size > self.sets[of].1 {
            return Err(Error::InvalidParams(format!("{name} is larger than its superset")));
        }
        self.subsets.push((name.to_string(), of, size));
        Ok(())
    }

    /// A surjection `from → to` given by its values.
    pub fn add_map(&mut self, name: &str, from: usize, to: usize, values: Vec<usize>) -> Result<()> {
        let (src, tgt) = (self.sets[from].1 as usize, self.sets[to].1 as usize);
        if values.len() != src || values.iter().any(|&v| v >= tgt) {
            return Err(Error::InvalidParams(format!("map {name} is not a function between the sets")));
        }
        let mut hit = vec![false; tgt];
        for &v in &values {
            hit[v] = true;
        }
        if hit.contains(&false) {
            return Err(Error::InvalidParams(format!("map {name} is not surjective")));
        }
        self.maps.push((name.to_string(), from, to, values));
        Ok(())
    }

    /// `name = factors[0] × …`, with its projections to each factor.
    pub fn add_product(&mut self, name: &str, factors: &[usize]) -> usize {
        let size = factors.iter().map(|&f| self.sets[f].1).product();
        let idx = self.add_set(name, size);
        self.products.push((name.to_string(), factors.to_vec()));
        idx
    }

    pub fn to_catalog(&self) -> DimMeasureCatalog {
        let mut c = DimMeasureCatalog::default();
        let add = |c: &mut DimMeasureCatalog, name: &str, size: u64| {
            c.sets.push(CatalogSet {
                name: name.to_string(),
                h: HValue::counting(size),
                explicit: Some(size),
            })
        };
        for (name, size) in &self.sets {
            add(&mut c, name, *size);
        }
        for (name, of, size) in &self.subsets {
            add(&mut c, name, *size);
            c.subsets.push((name.clone(), self.sets[*of].0.clone()));
        }
        // per map: target point -> fibre size
        let mut maps: Vec<(String, usize, usize, Vec<u64>)> = Vec::new();
        for (name, from, to, values) in &self.maps {
            let mut fibre = vec![0u64; self.sets[*to].1 as usize];
            for &v in values {
                fibre[v] += 1;
            }
            maps.push((name.clone(), *from, *to, fibre));
        }
        for (name, factors) in &self.products {
            let total: u64 = factors.iter().map(|&f| self.sets[f].1).product();
            let product = self.sets.iter().position(|(n, _)| n == name).expect("product is a set");
            for (i, &f) in factors.iter().enumerate() {
                let size = self.sets[f].1;
                maps.push((format!("{name}_pi{i}"), product, f, vec![total / size.max(1); size as usize]));
            }
            c.products.push(ProductDecl {
                name: name.clone(),
                factors: factors.iter().map(|&f| self.sets[f].0.clone()).collect(),
            });
        }
        for (name, from, to, fibre) in maps {
            let source = self.sets[from].0.clone();
            let target = self.sets[to].0.clone();
            c.maps.push(MapDecl {
                name: name.clone(),
                from: source.clone(),
                to: target.clone(),
            });
            // each fibre is a set of its own; fibres of equal size form one family piece
            let mut by_size: BTreeMap<u64, Vec<String>> = BTreeMap::new();
            for (y, &k) in fibre.iter().enumerate() {
                let at = format!("{name}_at{y}");
                add(&mut c, &at, k);
                c.subsets.push((at.clone(), source.clone()));
                by_size.entry(k).or_default().push(at);
            }
            let single = by_size.len() == 1;
            for (&k, members) in &by_size {
                let piece = if single {
                    target.clone()
                } else {
                    let piece = format!("{name}_fib{k}");
                    add(&mut c, &piece, members.len() as u64);
                    c.subsets.push((piece.clone(), target.clone()));
                    piece
                };
                c.fibres.push(FibreDecl {
                    map: name.clone(),
                    piece,
                    value: HValue::counting(k),
                    count: Some(k),
                });
            }
            c.families.push(FamilyDecl {
                name: format!("{name}_fibres"),
                pieces: by_size.into_values().collect(),
            });
        }
        c
    }
}

/// The counting catalog on `Z_m × Z_m` with a declared subset `D ⊆ Z_m` of
/// size `d` and the squaring map on `Z_m`.
pub fn cyclic_square_catalog(m: u64, d: u64) -> Result<DimMeasureCatalog> {
    let mut model = FiniteModel::new();
    let x = model.add_set("Z1", m);
    let y = model.add_set("Z2", m);
    model.add_product("P", &[x, y]);
    model.add_subset("D", x, d)?;
    let sq = model.add_set("Squares", {
        let mut s: Vec<u64> = (0..m).map(|v| v * v % m).collect();
        s.sort_unstable();
        s.dedup();
        s.len() as u64
    });
    let mut squares: Vec<u64> = (0..m).map(|v| v * v % m).collect();
    squares.sort_unstable();
    squares.dedup();
    let values = (0..m)
        .map(|v| squares.binary_search(&(v * v % m)).expect("listed"))
        .collect();
    model.add_map("square", x, sq, values)?;
    Ok(model.to_catalog())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat(text: &str) -> DimMeasureCatalog {
        DimMeasureCatalog::parse(text).unwrap()
    }

    #[test]
    fn finite_axiom() {
        assert!(check_axiom_finite(&cat("set X 0 5 explicit 5\n")).passed());
        assert!(!check_axiom_finite(&cat("set X 0 4 explicit 5\n")).passed());
        assert!(!check_axiom_finite(&cat("set X 1 5 explicit 5\n")).passed());
    }

    #[test]
    fn family_axiom() {
        let base = "set A 0 2 explicit 2\nset B 0 2 explicit 2\nset C 0 3 explicit 3\n";
        assert!(check_axiom_family(&cat(&format!("{base}family F = A,B\n"))).passed());
        assert!(check_axiom_family(&cat(&format!("{base}family F = A,B | C\n"))).passed());
        let r = check_axiom_family(&cat(&format!("{base}family F = A,C\n")));
        assert_eq!(r.failures.len(), 1);
    }

    #[test]
    fn fubini_counting() {
        let c = cat("set X 0 6 explicit 6\nset Y 0 3 explicit 3\nmap f from X to Y\nfibre f over Y value 0 2 count 2\n");
        assert!(check_axiom_fubini(&c).unwrap().passed());
        let c = cat("set X 2 2\nset Y 1 2\nmap f from X to Y\nfibre f over Y value 1 1\n");
        assert!(check_axiom_fubini(&c).unwrap().passed());
    }

    #[test]
    fn fubini_drops_lower_pieces() {
        let text = |mu: &str| {
            format!(
                "set X 2 {mu}\nset Y 1 4\nset Y1 1 3\nset Y2 1 1\nsubset Y1 of Y\nsubset Y2 of Y\n\
                 map f from X to Y\nfibre f over Y1 value 1 1\nfibre f over Y2 value 0 5\n"
            )
        };
        assert!(check_axiom_fubini(&cat(&text("3"))).unwrap().passed());
        assert!(!check_axiom_fubini(&cat(&text("8"))).unwrap().passed());
        let undeclared = cat("set X 0 1\nset Y 0 1\nmap f from X to Y\nfibre f over Z value 0 1\n");
        assert!(matches!(check_axiom_fubini(&undeclared), Err(Error::Precondition(_))));
    }

    #[test]
    fn bijections_force_equal_values() {
        let c = cat("set X 1 3\nset Y 1 2\nmap f from X to Y\nfibre f over Y value 0 1 count 1\n");
        assert!(!check_axiom_fubini(&c).unwrap().passed());
    }

    #[test]
    fn normalization() {
        let c = cat("set S 1 4\nset D 1 1\nset L 0 9\nsubset D of S\nsubset L of S\nset T 1 1\n");
        assert_eq!(nu_normalize(&c, "S", "S").unwrap(), BigRational::one());
        assert_eq!(nu_normalize(&c, "S", "D").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(nu_normalize(&c, "S", "L").unwrap(), BigRational::zero());
        assert!(nu_normalize(&c, "S", "T").is_err());
    }

    #[test]
    fn cyclic_catalog_passes() {
        let c = cyclic_square_catalog(7, 3).unwrap();
        for r in check_all(&c).unwrap() {
            assert!(r.passed(), "{r:?}");
            assert!(r.checked > 0, "{r:?}");
        }
        assert_eq!(c.h("P").unwrap(), &HValue::counting(49));
        assert_eq!(DimMeasureCatalog::parse(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn doctored_product_fails() {
        let c = cat("set A 0 7 explicit 7\nset B 0 7 explicit 7\nset P 0 48\nproduct P = A,B\n");
        let r = check_product_pushforward(&c);
        assert_eq!(r.failures.len(), 1);
    }

    #[test]
    fn parse_errors_have_lines() {
        assert!(matches!(
            DimMeasureCatalog::parse("set X 0 1\nmap f from X to Y\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(DimMeasureCatalog::parse("set X 0 0\n").is_err());
        assert!(DimMeasureCatalog::parse("set X -1 1\n").is_err());
        assert!(DimMeasureCatalog::parse("bogus\n").is_err());
    }
}
