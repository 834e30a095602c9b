//! The `amalgam` command line. Exit codes: 0 when the computation succeeded
//! and every reported property holds, 1 when a verified property is false,
//! 2 on usage or input errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::amalgamation::free_amalgam;
use crate::budget::Budget;
use crate::control::{good_f_report, kf_member, ControlFunction};
use crate::counterexample::{
    build_flower, build_glued, build_tech_f, cor23_search, flower_kf_parametric, verify_hrcon, verify_tech_f,
    FlowerParams,
};
use crate::error::{Error, Result};
use crate::generic::{build_generic, load_chain, save_chain, validate, BuildOptions};
use crate::measure::{check_all, nu_normalize, DimMeasureCatalog};
use crate::predim::{closure, delta, dim_rel, in_k0, is_self_sufficient};
use crate::structure::{FinStruct, Signature};
use crate::szemeredi::{run_pipeline, CyclicInstance, PipelineOptions};

#[derive(Parser, Debug)]
#[command(name = "amalgam", version, about = "Predimension calculus, amalgamation classes and exact counterexample checks")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Predimension of a subset (the whole structure by default).
    Delta {
        file: PathBuf,
        #[arg(long)]
        subset: Option<String>,
    },
    /// Whether a subset is self-sufficient.
    Selfsuff {
        file: PathBuf,
        #[arg(long)]
        subset: String,
    },
    /// Self-sufficient closure of a subset and its dimension.
    Closure {
        file: PathBuf,
        #[arg(long)]
        subset: String,
    },
    /// Dimension d(X), or d(X/Y) with --over.
    Dim {
        file: PathBuf,
        #[arg(long)]
        subset: String,
        #[arg(long)]
        over: Option<String>,
    },
    /// Exhaustive membership in K_f.
    Kf {
        file: PathBuf,
        /// `log:<base>` or `table:<file>`.
        #[arg(long)]
        f: String,
    },
    /// Which good-f criteria a control function meets; exit 0 iff free amalgamation holds.
    Goodf {
        #[arg(long)]
        f: String,
    },
    /// Free amalgam of two structures glued along `l:r` point pairs.
    Amalgam {
        left: PathBuf,
        right: PathBuf,
        /// Comma list of `left:right` pairs.
        #[arg(long, default_value = "")]
        glue: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a seeded finite approximation to the generic structure.
    GenericBuild {
        #[arg(long)]
        f: String,
        #[arg(long)]
        signature: String,
        #[arg(long, default_value_t = 2)]
        rounds: usize,
        #[arg(long, default_value_t = 2)]
        max_base: usize,
        #[arg(long, default_value_t = 2)]
        max_new: usize,
        #[arg(long, default_value_t = 20)]
        max_points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory to save the chain in.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The flower structure and its parametric K_f check.
    Flower {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        base: u32,
        /// Override the petal count.
        #[arg(long)]
        petals: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The glued structure built from n flower copies.
    Glued {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        base: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact arithmetic of the counterexample.
    VerifyHrcon {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        base: u32,
    },
    /// Build the gadget F from C and T and check its conclusions.
    TechF {
        c: PathBuf,
        t: PathBuf,
        /// Common part as `c_point:t_point` pairs.
        #[arg(long)]
        common: String,
        /// The point c of C outside the common part.
        #[arg(long = "c-point")]
        c_point: usize,
        /// The points t_i of T, comma separated.
        #[arg(long = "t-points", default_value = "")]
        t_points: String,
        #[arg(long, default_value = "log:8")]
        f: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search amalgamation solutions over flower images in a chain tail or structure.
    Cor23Search {
        /// A chain directory or a structure file.
        path: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        base: u32,
    },
    /// Arithmetic progressions from amalgamation solutions over Z_N.
    Szemeredi {
        #[arg(long)]
        modulus: u64,
        #[arg(long)]
        len: usize,
        /// Elements of A, comma separated.
        #[arg(long, default_value = "")]
        set: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        show: usize,
    },
    /// Check a dimension-measure catalog against the axioms.
    MsCheck {
        catalog: PathBuf,
        /// Also print ν^S(D) for `S:D`.
        #[arg(long)]
        normalize: Vec<String>,
    },
}

/// Runs the command line on `args` (program name first), writing the report to `out`
/// and diagnostics to `err`. Returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    match execute(&cli.command) {
        Ok(report) => {
            let text = match cli.format {
                Format::Text => report.text,
                Format::Json => serde_json::to_string_pretty(&report.json).expect("values serialize") + "\n",
            };
            let _ = out.write_all(text.as_bytes());
            if report.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

struct Report {
    text: String,
    json: Value,
    ok: bool,
}

impl Report {
    fn new(text: String, json: Value, ok: bool) -> Self {
        let text = if text.ends_with('\n') { text } else { text + "\n" };
        Report { text, json, ok }
    }
}

fn read_structure(path: &Path) -> Result<FinStruct> {
    FinStruct::parse(&fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?)
}

fn points(list: &str) -> Result<Vec<usize>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::InvalidParams(format!("bad point {s:?}"))))
        .collect()
}

fn pairs(list: &str) -> Result<Vec<(usize, usize)>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (a, b) = s
                .split_once(':')
                .ok_or_else(|| Error::InvalidParams(format!("expected `a:b`, got {s:?}")))?;
            let p = |x: &str| x.trim().parse().map_err(|_| Error::InvalidParams(format!("bad point {x:?}")));
            Ok((p(a)?, p(b)?))
        })
        .collect()
}

fn show(points: &[usize]) -> String {
    let v: Vec<String> = points.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

fn write_out(path: &Option<PathBuf>, s: &FinStruct) -> Result<()> {
    if let Some(p) = path {
        fs::write(p, s.serialize())?;
    }
    Ok(())
}

fn execute(cmd: &Command) -> Result<Report> {
    let budget = Budget::from_env()?;
    Ok(match cmd {
        Command::Delta { file, subset } => {
            let s = read_structure(file)?;
            let x = match subset {
                Some(l) => points(l)?,
                None => s.points().collect(),
            };
            let d = delta(&s, &x)?;
            Report::new(d.to_string(), json!({ "subset": x, "delta": d }), true)
        }
        Command::Selfsuff { file, subset } => {
            let s = read_structure(file)?;
            let x = points(subset)?;
            let v = is_self_sufficient(&s, &x)?;
            Report::new(v.to_string(), json!({ "subset": x, "self_sufficient": v }), v)
        }
        Command::Closure { file, subset } => {
            let s = read_structure(file)?;
            let x = points(subset)?;
            let c = closure(&s, &x)?;
            let outside = !in_k0(&s);
            let mut text = format!("closure {}\ndim {}", show(&c.closure), c.dimension);
            if outside {
                text.push_str("\nwarning: structure is outside K_0");
            }
            Report::new(
                text,
                json!({ "subset": x, "closure": c.closure, "dim": c.dimension, "outside_k0": outside }),
                true,
            )
        }
        Command::Dim { file, subset, over } => {
            let s = read_structure(file)?;
            let x = points(subset)?;
            let y = match over {
                Some(l) => points(l)?,
                None => Vec::new(),
            };
            let d = dim_rel(&s, &x, &y)?;
            let outside = !in_k0(&s);
            let mut text = d.to_string();
            if outside {
                text.push_str("\nwarning: structure is outside K_0");
            }
            Report::new(text, json!({ "subset": x, "over": y, "dim": d, "outside_k0": outside }), true)
        }
        Command::Kf { file, f } => {
            let s = read_structure(file)?;
            let f = ControlFunction::from_spec(f)?;
            let m = kf_member(&s, &f, &budget)?;
            let mut text = format!("member {}", m.member);
            if let Some(w) = &m.witness {
                text.push_str(&format!("\nwitness {} delta {}", show(w), delta(&s, w)?));
            }
            Report::new(text, json!({ "member": m.member, "witness": m.witness }), m.member)
        }
        Command::Goodf { f } => {
            let f = ControlFunction::from_spec(f)?;
            let r = good_f_report(&f);
            let text = format!(
                "free_amalgamation {}\ndim_theorem {}\nslow_growth {}\nauthoritative {}",
                r.free_amalgamation, r.dim_theorem, r.slow_growth, r.authoritative
            );
            Report::new(text, serde_json::to_value(r).expect("plain struct"), r.free_amalgamation)
        }
        Command::Amalgam { left, right, glue, out } => {
            let (l, r) = (read_structure(left)?, read_structure(right)?);
            let am = free_amalgam(&l, &r, &pairs(glue)?)?;
            write_out(out, &am.structure)?;
            let text = am.structure.serialize();
            Report::new(
                text.clone(),
                json!({ "structure": text, "left": am.left, "right": am.right }),
                true,
            )
        }
        Command::GenericBuild {
            f,
            signature,
            rounds,
            max_base,
            max_new,
            max_points,
            seed,
            out,
        } => {
            let f = ControlFunction::from_spec(f)?;
            let sig: Signature = signature.parse()?;
            let opts = BuildOptions {
                rounds: *rounds,
                max_base: *max_base,
                max_new: *max_new,
                max_points: *max_points,
                seed: *seed,
            };
            let chain = build_generic(f, sig, &opts, &budget)?;
            if let Some(dir) = out {
                save_chain(&chain, dir)?;
            }
            let tail = chain.tail();
            let valid = match validate(&chain, &budget) {
                Ok(v) => Some(v.ok()),
                Err(Error::CapExceeded { .. }) => None,
                Err(e) => return Err(e),
            };
            let text = format!(
                "seed {seed}\nstages {}\ntail points {}\ntail tuples {}\ntail delta {}\nvalidated {}",
                chain.stages().len(),
                tail.size(),
                tail.tuple_count(),
                crate::predim::delta_all(tail),
                valid.map_or("skipped (over budget)".to_string(), |v| v.to_string())
            );
            Report::new(
                text,
                json!({
                    "seed": seed,
                    "stages": chain.stages().len(),
                    "tail_points": tail.size(),
                    "tail_tuples": tail.tuple_count(),
                    "tail_delta": crate::predim::delta_all(tail),
                    "validated": valid,
                    "tail": tail.serialize(),
                }),
                valid != Some(false),
            )
        }
        Command::Flower { n, base, petals, out } => {
            let mut p = FlowerParams::new(*n, *base)?;
            if let Some(k) = petals {
                p = p.with_petals(k.parse().map_err(|_| Error::InvalidParams(format!("bad petal count {k:?}")))?);
            }
            let kf = flower_kf_parametric(&p);
            if out.is_some() {
                write_out(out, &build_flower(&p, &budget)?)?;
            }
            let points = p.flower_points();
            let text = format!(
                "points {points}\ntuples {}\ndelta {}\nkf {kf}",
                p.flower_tuples(),
                n - 1
            );
            Report::new(
                text,
                json!({ "n": n, "base": base, "petals": p.petals.to_string(), "points": points.to_string(),
                        "tuples": p.flower_tuples().to_string(), "delta": n - 1, "kf": kf }),
                kf,
            )
        }
        Command::Glued { n, base, out } => {
            let p = FlowerParams::new(*n, *base)?;
            let mut direct = None;
            if out.is_some() || p.glued_points() <= budget.materialize.into() {
                let b = build_glued(&p, &budget)?;
                write_out(out, &b)?;
                direct = Some(crate::predim::delta_all(&b));
            }
            let text = format!(
                "points {}\ntuples {}\ndelta {}",
                p.glued_points(),
                p.glued_tuples(),
                direct.map_or(format!("{n} (closed form)"), |d| d.to_string())
            );
            Report::new(
                text,
                json!({ "points": p.glued_points().to_string(), "tuples": p.glued_tuples().to_string(),
                        "delta": direct.unwrap_or(*n as i64), "materialized": direct.is_some() }),
                true,
            )
        }
        Command::VerifyHrcon { n, base } => {
            let r = verify_hrcon(*n, *base)?;
            Report::new(r.to_string(), serde_json::to_value(&r).expect("plain struct"), r.overall)
        }
        Command::TechF {
            c,
            t,
            common,
            c_point,
            t_points,
            f,
            out,
        } => {
            let (cs, ts) = (read_structure(c)?, read_structure(t)?);
            let f = ControlFunction::from_spec(f)?;
            let g = build_tech_f(&cs, &ts, &pairs(common)?, *c_point, &points(t_points)?)?;
            write_out(out, &g.structure)?;
            let r = verify_tech_f(&g, &f, &budget)?;
            let text = format!(
                "points {}\ndelta {}\nA+s self-sufficient {}\nC self-sufficient {}\nT self-sufficient {}\nin K_f {}\ndelta identity {}",
                g.structure.size(),
                r.delta_f,
                r.a_s_self_sufficient,
                r.c_self_sufficient,
                r.t_self_sufficient,
                r.in_kf,
                r.delta_identity
            );
            let mut json = serde_json::to_value(r).expect("plain struct");
            json["points"] = json!(g.structure.size());
            Report::new(text, json, r.all_hold())
        }
        Command::Cor23Search { path, n, base } => {
            let tail = if path.is_dir() {
                load_chain(path)?.tail().clone()
            } else {
                read_structure(path)?
            };
            let p = FlowerParams::new(*n, *base)?;
            let r = cor23_search(&tail, &p, &budget)?;
            let by_dim: Vec<String> = r.by_dimension.iter().map(|(d, c)| format!("{d}:{c}")).collect();
            let text = format!(
                "E {}\nsolutions {}\nnew solutions {}\nmax d {}\ntarget d {}\nby dimension {}",
                r.e_size,
                r.solutions,
                r.new_solutions,
                r.max_d.map_or("none".into(), |d| d.to_string()),
                n,
                by_dim.join(" ")
            );
            Report::new(text, serde_json::to_value(&r).expect("plain struct"), true)
        }
        Command::Szemeredi {
            modulus,
            len,
            set,
            seed,
            samples,
            show: k,
        } => {
            let a: Vec<u64> = set
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().map_err(|_| Error::InvalidParams(format!("bad element {s:?}"))))
                .collect::<Result<_>>()?;
            let inst = CyclicInstance::new(*modulus, *len, a)?;
            let opts = PipelineOptions {
                samples: *samples,
                seed: *seed,
                show: *k,
            };
            let r = run_pipeline(&inst, &opts, &budget)?;
            let mut text = format!(
                "seed {seed}\nprime modulus {}\n|E| {}\nnu_J(pi_J E) {}\nfibre bound {}\nk ratio {}\nsolutions {}\nnondegenerate {}\ninvalid {}\n",
                r.prime_modulus,
                r.e_size,
                r.hypotheses.a,
                r.hypotheses.fibre_bound,
                r.hypotheses.k_ratio.as_ref().map_or("none".into(), |k| k.to_string()),
                r.solutions,
                r.nondegenerate,
                r.invalid
            );
            match &r.lemma26 {
                Some(l) => text.push_str(&format!(
                    "lemma inequalities {} checked, {} violations\n",
                    l.checked,
                    l.violations.len()
                )),
                None => text.push_str("lemma inequalities skipped (over budget)\n"),
            }
            for (p, terms) in &r.progressions {
                let t: Vec<String> = terms.iter().map(|x| x.to_string()).collect();
                text.push_str(&format!("AP {} {} : {}\n", p.a, p.d, t.join(", ")));
            }
            let ok = r.invalid == 0 && r.lemma26.as_ref().is_none_or(|l| l.violations.is_empty());
            Report::new(text, serde_json::to_value(&r).expect("plain struct"), ok)
        }
        Command::MsCheck { catalog, normalize } => {
            let c = DimMeasureCatalog::parse(&fs::read_to_string(catalog)?)?;
            let reports = check_all(&c)?;
            let mut text = String::new();
            for r in &reports {
                text.push_str(&format!(
                    "{} {} ({} checked)\n",
                    r.axiom,
                    if r.passed() { "PASS" } else { "FAIL" },
                    r.checked
                ));
                for f in &r.failures {
                    text.push_str(&format!("  {f}\n"));
                }
            }
            let mut nus = Vec::new();
            for spec in normalize {
                let (s, d) = spec
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidParams(format!("expected S:D, got {spec:?}")))?;
                let v = nu_normalize(&c, s, d)?;
                text.push_str(&format!("nu^{s}({d}) = {v}\n"));
                nus.push(json!({ "set": s, "subset": d, "value": v.to_string() }));
            }
            let ok = reports.iter().all(|r| r.passed());
            Report::new(text, json!({ "checks": reports, "normalize": nus }), ok)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["amalgam"];
        argv.extend_from_slice(args);
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn hrcon_exit_codes() {
        let (code, out, _) = run_capture(&["verify-hrcon", "--n", "10", "--base", "8"]);
        assert_eq!(code, 0);
        assert!(out.trim_end().ends_with("OVERALL PASS"));
        assert_eq!(run_capture(&["verify-hrcon", "--n", "3", "--base", "8"]).0, 1);
        assert_eq!(run_capture(&["verify-hrcon", "--n", "3"]).0, 2);
        assert_eq!(run_capture(&["verify-hrcon", "--n", "3", "--base", "8", "--bogus"]).0, 2);
        assert_eq!(run_capture(&["verify-hrcon", "--n", "1", "--base", "8"]).0, 2);
    }

    #[test]
    fn help_is_success() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        for sub in ["delta", "selfsuff", "closure", "dim", "kf", "goodf", "amalgam", "generic-build", "flower",
                    "glued", "verify-hrcon", "tech-f", "cor23-search", "szemeredi", "ms-check"] {
            assert!(out.contains(sub), "{sub} missing from help");
        }
    }

    #[test]
    fn goodf_codes() {
        assert_eq!(run_capture(&["goodf", "--f", "log:8"]).0, 0);
        assert_eq!(run_capture(&["goodf", "--f", "log:2"]).0, 1);
        assert_eq!(run_capture(&["goodf", "--f", "exp:2"]).0, 2);
    }

    #[test]
    fn szemeredi_output() {
        let (code, out, _) = run_capture(&["szemeredi", "--modulus", "7", "--len", "3", "--set", "0,1,2", "--show", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("|E| 21"));
        assert!(out.contains("AP 0 1 : 0, 1, 2"));
    }
}
