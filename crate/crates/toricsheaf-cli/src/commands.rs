use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use anyhow::{Context, Result};
use serde_json::{json, Value};
use toricsheaf::cohomology::{
    cohomology_table, degree_support_box, euler_equivariant, euler_total_mobius, global_sections, spectral_e1,
    DegreeBox, GradedCohomologyTable, Method, PolyhedralEngine,
};
use toricsheaf::extension::universal_extension;
use toricsheaf::io::{self, DecorationJson, MorphismJson, Session, VarietyJson};
use toricsheaf::rational::format_q;
use toricsheaf::{Divisor, Error, Fan, WeilDecoration};

use crate::args::{
    BoxedSheafArgs, CohomologyArgs, DegreeArgs, ExtensionArgs, KlyachkoArgs, MethodArg, Request, SheafArgs,
};

/// Where named inputs come from: files on disk, or the objects of a session.
pub enum Source {
    Files,
    Session(Session),
}

impl Source {
    fn sheaf(&self, name: &str) -> Result<WeilDecoration> {
        match self {
            Source::Files => {
                let text = std::fs::read_to_string(name).with_context(|| format!("reading {name}"))?;
                Ok(io::decoration_from_json(&text)?)
            }
            Source::Session(s) => s
                .decorations
                .get(name)
                .cloned()
                .ok_or_else(|| Error::Schema(format!("no decoration named {name:?}")).into()),
        }
    }

    fn variety(&self, name: &str) -> Result<Arc<Fan>> {
        match self {
            Source::Session(s) => Ok(s.fan.clone()),
            Source::Files if std::path::Path::new(name).is_file() => {
                let text = std::fs::read_to_string(name).with_context(|| format!("reading {name}"))?;
                Ok(io::parse_json::<VarietyJson>(&text)?.build()?)
            }
            Source::Files => Ok(io::named_fan(name)?),
        }
    }

    fn divisor(&self, fan: &Fan, text: &str) -> Result<Divisor> {
        if let Source::Session(s) = self {
            if let Some(d) = s.divisors.get(text) {
                return Ok(d.clone());
            }
        }
        let coeffs = parse_ints(text)?;
        if coeffs.len() != fan.num_rays() {
            return Err(Error::RankMismatch { expected: fan.num_rays(), found: coeffs.len() }.into());
        }
        Ok(Divisor::new(coeffs))
    }
}

/// A machine-readable result and its human rendering.
pub struct Output {
    pub json: Value,
    pub text: String,
}

pub fn parse_ints(text: &str) -> Result<Vec<i64>> {
    text.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Schema(format!("not an integer list: {text:?}")).into()))
        .collect()
}

fn parse_box(text: &str, dim: usize) -> Result<Option<DegreeBox>> {
    if text == "auto" {
        return Ok(None);
    }
    let (lo, hi) = text.split_once(':').ok_or_else(|| Error::Schema(format!("box must be lo:hi, got {text:?}")))?;
    let (lo, hi) = (parse_ints(lo)?, parse_ints(hi)?);
    if lo.len() != dim || hi.len() != dim || lo.iter().zip(&hi).any(|(a, b)| a > b) {
        return Err(Error::Schema(format!("box {text:?} is not a {dim}-dimensional interval product")).into());
    }
    Ok(Some(DegreeBox::new(lo, hi)))
}

fn parse_degree(text: &str, fan: &Fan) -> Result<Vec<i64>> {
    let m = parse_ints(text)?;
    if m.len() != fan.dim() {
        return Err(Error::Precondition(format!("degree {m:?} must have {} entries", fan.dim())).into());
    }
    Ok(m)
}

fn provenance(fan: &Fan, twist: u64, degree_box: Option<&DegreeBox>) -> Value {
    json!({
        "tool": "toricsheaf",
        "version": env!("CARGO_PKG_VERSION"),
        "fan_hash": fan.hash_hex(),
        "twist": twist,
        "box": degree_box.map(|b| json!({"lo": b.lo, "hi": b.hi})),
    })
}

fn with_provenance(mut body: Value, prov: Value) -> Value {
    body.as_object_mut().expect("bodies are objects").insert("provenance".into(), prov);
    body
}

fn fmt_degree(m: &[i64]) -> String {
    format!("({})", m.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
}

fn fmt_box(b: &DegreeBox) -> String {
    format!("{}..{}", fmt_degree(&b.lo), fmt_degree(&b.hi))
}

fn rat_rows(rows: &[Vec<toricsheaf::rational::Q>]) -> Vec<Vec<String>> {
    rows.iter().map(|r| r.iter().map(format_q).collect()).collect()
}

pub fn execute(req: &Request, src: &Source, verbose: bool) -> Result<Output> {
    match req {
        Request::Validate(a) => validate(a, src),
        Request::Cohomology(a) => cohomology(a, src, verbose),
        Request::Euler(a) => euler(a, src),
        Request::EquivariantEuler(a) => equivariant(a, src),
        Request::Sections(a) => sections(a, src),
        Request::Klyachko(a) => klyachko(a, src),
        Request::Extension(a) => extension(a, src),
        Request::ExportHasse(a) => {
            let dec = src.sheaf(&a.sheaf)?;
            let dot = dec.hasse_dot();
            let json = with_provenance(json!({ "dot": dot }), provenance(dec.fan(), 0, None));
            Ok(Output { json, text: dot })
        }
        Request::ExportE1(a) => {
            let dec = src.sheaf(&a.sheaf)?;
            let m = parse_degree(&a.degree, dec.fan())?;
            let report = spectral_e1(&dec, &m)?;
            let k = PolyhedralEngine::new(&dec)?.k();
            let mut text = format!("E1 at {}\n", fmt_degree(&m));
            for e in &report.entries {
                let _ = writeln!(text, "  E1[{},{}] = {}", -(e.ell as i64), e.q, e.dim);
            }
            let json = with_provenance(serde_json::to_value(&report)?, provenance(dec.fan(), k, None));
            Ok(Output { json, text })
        }
        Request::ExportCells(a) => {
            let dec = src.sheaf(&a.sheaf)?;
            let m = parse_degree(&a.degree, dec.fan())?;
            let engine = PolyhedralEngine::new(&dec)?;
            let cells = engine.subdivision(&m)?.to_json();
            let text = serde_json::to_string_pretty(&cells)?;
            let json =
                with_provenance(json!({ "degree": m, "complex": cells }), provenance(dec.fan(), engine.k(), None));
            Ok(Output { json, text })
        }
    }
}

fn validate(a: &SheafArgs, src: &Source) -> Result<Output> {
    let (json, text) = match src.sheaf(&a.sheaf) {
        Ok(dec) => {
            let locally_free = dec.is_locally_free();
            let body = json!({
                "valid": true,
                "violations": [],
                "rank": dec.rank(),
                "strata": dec.len(),
                "height": dec.height(),
                "locally_free": locally_free,
            });
            let text = format!(
                "valid: rank {}, {} strata, height {}, {}\n",
                dec.rank(),
                dec.len(),
                dec.height(),
                if locally_free { "locally free" } else { "not locally free" }
            );
            (with_provenance(body, provenance(dec.fan(), 0, None)), text)
        }
        Err(e) => match e.downcast_ref::<Error>() {
            Some(Error::InvalidDecoration(v)) => {
                let mut text = String::from("invalid:\n");
                for msg in v {
                    let _ = writeln!(text, "  {msg}");
                }
                (json!({ "valid": false, "violations": v }), text)
            }
            _ => return Err(e),
        },
    };
    Ok(Output { json, text })
}

fn methods(arg: MethodArg, interior_check: bool) -> Vec<Method> {
    let mut out = match arg {
        MethodArg::Cech => vec![Method::Cech],
        MethodArg::Polyhedral => vec![Method::Polyhedral],
        MethodArg::Interior => vec![Method::Interior],
        MethodArg::Both => vec![Method::Cech, Method::Polyhedral],
    };
    if interior_check && !out.contains(&Method::Interior) {
        out.push(Method::Interior);
    }
    out
}

/// Degrees where two tables differ, as readable lines.
fn table_diff(a: &GradedCohomologyTable, b: &GradedCohomologyTable) -> Vec<String> {
    let degrees: std::collections::BTreeSet<&Vec<i64>> = a.entries.keys().chain(b.entries.keys()).collect();
    degrees
        .into_iter()
        .filter(|m| a.dims(m) != b.dims(m))
        .map(|m| {
            format!("{}: {} {:?} vs {} {:?}", fmt_degree(m), a.method.name(), a.dims(m), b.method.name(), b.dims(m))
        })
        .collect()
}

fn cohomology(a: &CohomologyArgs, src: &Source, verbose: bool) -> Result<Output> {
    let dec = src.sheaf(&a.sheaf)?;
    let requested = parse_box(&a.degree_box, dec.fan().dim())?;
    let tables = methods(a.method, a.interior_check)
        .into_iter()
        .map(|m| cohomology_table(&dec, m, requested.clone()))
        .collect::<toricsheaf::Result<Vec<_>>>()?;
    let first = &tables[0];
    for other in &tables[1..] {
        let diff = table_diff(first, other);
        if !diff.is_empty() {
            return Err(Error::Mismatch(diff.join("; ")).into());
        }
    }
    let twist = tables.iter().map(|t| t.twist).max().unwrap_or(0);
    let shown = |t: &GradedCohomologyTable| -> Vec<(Vec<i64>, Vec<usize>)> {
        t.entries
            .iter()
            .filter(|(_, d)| verbose || d.iter().any(|&h| h > 0))
            .map(|(m, d)| (m.clone(), d.clone()))
            .collect()
    };
    let entries: Vec<Value> = tables
        .iter()
        .flat_map(|t| {
            shown(t)
                .into_iter()
                .map(move |(m, d)| json!({"degree": m, "dims": d, "method": t.method.name(), "twist": t.twist}))
        })
        .collect();
    let body = json!({
        "methods": tables.iter().map(|t| t.method.name()).collect::<Vec<_>>(),
        "entries": entries,
        "totals": first.totals(),
        "euler": first.euler(),
    });
    let json = with_provenance(body, provenance(dec.fan(), twist, Some(&first.degree_box)));

    let names = tables.iter().map(|t| t.method.name()).collect::<Vec<_>>().join(" = ");
    let mut text = format!("method {names}, box {}, twist {twist}\n", fmt_box(&first.degree_box));
    let n = first.degree_box.dim();
    let _ =
        writeln!(text, "{:<14}{}", "degree", (0..=n).map(|l| format!("{:>5}", format!("h{l}"))).collect::<String>());
    for (m, d) in shown(first) {
        let _ = writeln!(text, "{:<14}{}", fmt_degree(&m), d.iter().map(|h| format!("{h:>5}")).collect::<String>());
    }
    let _ = writeln!(text, "{:<14}{}", "total", first.totals().iter().map(|h| format!("{h:>5}")).collect::<String>());
    let _ = writeln!(text, "euler {}", first.euler());
    Ok(Output { json, text })
}

/// A box holding the support of the sheaf and of every line bundle of a
/// stratum, which is where the equivariant formula lives.
fn equivariant_box(dec: &WeilDecoration) -> Result<DegreeBox> {
    let mut b = degree_support_box(dec);
    for s in dec.nonzero() {
        let line = WeilDecoration::line_bundle(dec.fan().clone(), dec.divisor(s).clone())?;
        b = b.hull(&degree_support_box(&line));
    }
    Ok(b)
}

fn euler(a: &SheafArgs, src: &Source) -> Result<Output> {
    let dec = src.sheaf(&a.sheaf)?;
    let table = cohomology_table(&dec, Method::Cech, None)?;
    let from_table = table.euler();
    let from_mobius = euler_total_mobius(&dec)?;
    let eq_box = equivariant_box(&dec)?;
    let from_equivariant: i64 = euler_equivariant(&dec, &eq_box)?.values().sum();
    if from_table != from_mobius || from_table != from_equivariant {
        return Err(Error::Mismatch(format!(
            "euler characteristic: table {from_table}, mobius {from_mobius}, equivariant {from_equivariant}"
        ))
        .into());
    }
    let k = PolyhedralEngine::new(&dec)?.k();
    let body = json!({
        "euler": from_table,
        "table": from_table,
        "mobius": from_mobius,
        "equivariant_at_one": from_equivariant,
    });
    let json = with_provenance(body, provenance(dec.fan(), k, Some(&table.degree_box)));
    Ok(Output { json, text: format!("{from_table}\n") })
}

fn equivariant(a: &BoxedSheafArgs, src: &Source) -> Result<Output> {
    let dec = src.sheaf(&a.sheaf)?;
    let b = match parse_box(&a.degree_box, dec.fan().dim())? {
        Some(b) => b,
        None => equivariant_box(&dec)?,
    };
    let coeffs: BTreeMap<Vec<i64>, i64> = euler_equivariant(&dec, &b)?;
    let terms: Vec<Value> = coeffs.iter().map(|(m, c)| json!({"degree": m, "coefficient": c})).collect();
    let mut text = String::new();
    for (m, c) in &coeffs {
        let _ = writeln!(text, "{:<14}{c:>5}", fmt_degree(m));
    }
    let _ = writeln!(text, "at 1: {}", coeffs.values().sum::<i64>());
    let k = PolyhedralEngine::new(&dec)?.k();
    let json = with_provenance(json!({ "terms": terms }), provenance(dec.fan(), k, Some(&b)));
    Ok(Output { json, text })
}

fn sections(a: &DegreeArgs, src: &Source) -> Result<Output> {
    let dec = src.sheaf(&a.sheaf)?;
    let m = parse_degree(&a.degree, dec.fan())?;
    let space = global_sections(&dec, &m)?;
    let basis = rat_rows(space.basis());
    let mut text = format!("H0 at {} has dimension {}\n", fmt_degree(&m), space.dim());
    for v in &basis {
        let _ = writeln!(text, "  [{}]", v.join(", "));
    }
    let k = PolyhedralEngine::new(&dec)?.k();
    let body = json!({ "degree": m, "dim": space.dim(), "basis": basis });
    Ok(Output { json: with_provenance(body, provenance(dec.fan(), k, None)), text })
}

fn klyachko(a: &KlyachkoArgs, src: &Source) -> Result<Output> {
    let dec = src.sheaf(&a.sheaf)?;
    let n = dec.fan().num_rays();
    let rays: Vec<usize> = match a.ray {
        Some(r) if r >= n => return Err(Error::Precondition(format!("ray {r} out of range 0..{n}")).into()),
        Some(r) => vec![r],
        None => (0..n).collect(),
    };
    let mut out = Vec::new();
    let mut text = String::new();
    for r in rays {
        // the filtration only jumps at coefficients of the strata
        let mut levels: Vec<i64> = dec.nonzero().map(|s| dec.divisor(s).coeffs()[r]).collect();
        levels.sort_unstable_by(|x, y| y.cmp(x));
        levels.dedup();
        let _ = writeln!(text, "ray {r} {:?}", dec.fan().ray(r));
        let steps: Vec<Value> = levels
            .iter()
            .map(|&l| {
                let sub = dec.klyachko_filtration(r, l);
                let _ = writeln!(text, "  level {l:>4}: dim {}", sub.dim());
                json!({"level": l, "dim": sub.dim(), "basis": rat_rows(sub.basis())})
            })
            .collect();
        out.push(json!({"ray": r, "steps": steps}));
    }
    let json = with_provenance(json!({ "rank": dec.rank(), "rays": out }), provenance(dec.fan(), 0, None));
    Ok(Output { json, text })
}

fn extension(a: &ExtensionArgs, src: &Source) -> Result<Output> {
    let fan = src.variety(&a.variety)?;
    let dminus = src.divisor(&fan, &a.dminus)?;
    let dplus = src.divisor(&fan, &a.dplus)?;
    let ext = universal_extension(&fan, &dminus, &dplus)?;
    let coeffs = |ds: &[Divisor]| ds.iter().map(|d| d.coeffs().to_vec()).collect::<Vec<_>>();
    let mut body = json!({
        "ext_dim": ext.ext_dim,
        "trivial": ext.trivial,
        "k": ext.k,
        "delta": ext.delta.coeffs(),
        "component_divisors": coeffs(&ext.component_divisors),
        "untwisted_components": coeffs(&ext.untwisted_components()),
        "decoration": DecorationJson::from_decoration(&ext.decoration),
        "sequence": ext.sequence.iter().map(MorphismJson::from_morphism).collect::<Vec<_>>(),
        "exact": true,
    });
    let mut text = format!("ext dimension {}, twist k = {}\n", ext.ext_dim, ext.k);
    if ext.trivial {
        text.push_str("no nontrivial extensions\n");
    }
    for (nu, d) in ext.untwisted_components().iter().enumerate() {
        let _ = writeln!(text, "  component {nu}: {}", d.pretty());
    }
    for s in ext.decoration.nonzero() {
        let _ = writeln!(
            text,
            "  stratum {s}: dim {} -> {}",
            ext.decoration.stratum(s).dim(),
            ext.decoration.divisor(s).pretty()
        );
    }
    if a.hasse {
        let dot = ext.decoration.hasse_dot();
        text.push_str(&dot);
        body.as_object_mut().expect("object").insert("hasse".into(), dot.into());
    }
    Ok(Output { json: with_provenance(body, provenance(&fan, ext.k, None)), text })
}
