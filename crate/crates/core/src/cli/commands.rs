use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::time::Instant;

use serde_json::{json, Map, Value};

use super::report::render;
use super::{bench, BackendChoice, Command, GenerateArgs, InputArgs, Mode, RunConfig};
use crate::aggregate::{continuous_mean_with, discrete_from, wiener_from, Backend, MeanOptions};
use crate::closed_forms::auto_mean;
use crate::error::{Error, Result};
use crate::graph::{
    parse_graph_checked, to_edge_list, to_json, GeneratorSpec, GraphKind, ParsedGraph, WeightSpec, WeightedGraph,
};
use crate::oracle::{oracle_graph_mean, OracleConfig};
use crate::paths::{all_pairs_distances_with, DistanceMatrix};
use crate::roof::{build_roof, roof_mean, roof_mean_prisms, roof_pair_mean};
use crate::spt::{classify_pair, pair_mean};
use crate::subdivision::{
    line_graph_bounds, omega_sandwich_capped, pair_bounds, subdivision_limits, tree_subdivision_bound_check,
    Placement, DEFAULT_MATERIALIZE_CAP,
};

/// What a command produced: text for stdout, warnings for stderr and the
/// exit status.
#[derive(Debug, Default)]
pub struct Output {
    pub text: String,
    pub warnings: Vec<String>,
    pub code: i32,
}

fn input_args(command: &Command) -> Option<&InputArgs> {
    match command {
        Command::Mean { input, .. }
        | Command::Distances { input }
        | Command::EdgePair { input, .. }
        | Command::Roof { input, .. }
        | Command::Bounds { input }
        | Command::Subdivide { input, .. }
        | Command::Oracle { input, .. } => Some(input),
        Command::Generate(_) | Command::Bench(_) => None,
    }
}

/// Parses a `--generate` value: `KIND:N`, `KIND:N:ALPHA` or `KIND:N:LO..HI`.
pub fn parse_generate_spec(spec: &str) -> Result<(GraphKind, usize, WeightSpec)> {
    let bad = || Error::InvalidParameter(format!("invalid --generate value `{spec}`"));
    let mut parts = spec.split(':');
    let kind: GraphKind = parts.next().ok_or_else(bad)?.parse()?;
    let n: usize = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let weights = match parts.next() {
        None => WeightSpec::Uniform(1.0),
        Some(w) => match w.split_once("..") {
            Some((lo, hi)) => WeightSpec::Random {
                lo: lo.parse().map_err(|_| bad())?,
                hi: hi.parse().map_err(|_| bad())?,
            },
            None => WeightSpec::Uniform(w.parse().map_err(|_| bad())?),
        },
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((kind, n, weights))
}

/// Reads and validates the input graph before any worker pool starts.
pub fn load_input(command: &Command, cfg: &RunConfig, stdin: &mut dyn Read) -> Result<Option<ParsedGraph>> {
    let Some(args) = input_args(command) else {
        return Ok(None);
    };
    let text = if let Some(spec) = &args.generate {
        let (kind, n, weights) = parse_generate_spec(spec)?;
        to_edge_list(&GeneratorSpec::new(kind, n, weights).seed(cfg.seed).build()?)
    } else {
        match args.input.as_deref().or(cfg.input.as_deref()) {
            None | Some("-") => {
                let mut s = String::new();
                stdin
                    .read_to_string(&mut s)
                    .map_err(|e| Error::InvalidParameter(format!("cannot read stdin: {e}")))?;
                s
            }
            Some(path) => fs::read_to_string(path)
                .map_err(|e| Error::InvalidParameter(format!("cannot read {path}: {e}")))?,
        }
    };
    parse_graph_checked(&text, cfg.shortcut_policy, cfg.tolerance).map(Some)
}

pub fn execute(command: &Command, cfg: &RunConfig, input: Option<ParsedGraph>) -> Result<Output> {
    let mut out = Output::default();
    if let Some(pg) = &input {
        for s in &pg.shortcut_edges {
            out.warnings.push(format!(
                "edge {} has length {} but its endpoints are {} apart",
                s.edge, s.length, s.distance
            ));
        }
    }
    let graph = input.as_ref().map(|pg| &pg.graph);
    let record = match (command, graph) {
        (Command::Mean { contributions, .. }, Some(g)) => {
            let mut record = mean(g, cfg, *contributions)?;
            if let Some(pg) = &input {
                if !pg.shortcut_edges.is_empty() {
                    record.insert("shortcut_edges".into(), json!(pg.shortcut_edges));
                }
            }
            Value::Object(record)
        }
        (Command::Distances { .. }, Some(g)) => {
            out.text = distances_csv(g, &all_pairs_distances_with(g, cfg.tolerance));
            return Ok(out);
        }
        (Command::EdgePair { pair, .. }, Some(g)) => edge_pair(g, cfg, pair[0], pair[1])?,
        (Command::Roof { pair, .. }, Some(g)) => roof(g, cfg, pair[0], pair[1])?,
        (Command::Bounds { .. }, Some(g)) => {
            let record = bounds(g, cfg)?;
            if record["holds"] == Value::Bool(false) {
                out.code = 1;
            }
            record
        }
        (Command::Subdivide { k, materialize, tree_points, .. }, Some(g)) => {
            let record = subdivide(g, cfg, *k, *materialize, *tree_points)?;
            if record["holds"] == Value::Bool(false) {
                out.code = 1;
            }
            record
        }
        (Command::Oracle { resolution, .. }, Some(g)) => oracle(g, cfg, *resolution)?,
        (Command::Generate(args), _) => {
            out.text = generate(args, cfg)?;
            return Ok(out);
        }
        (Command::Bench(args), _) => bench::run(args, cfg)?,
        (_, None) => unreachable!("graph commands always load an input"),
    };
    out.text = render(&record, cfg.format);
    Ok(out)
}

fn backend_of(choice: BackendChoice) -> Backend {
    match choice {
        BackendChoice::Roof => Backend::Roof,
        _ => Backend::Spt,
    }
}

fn check_edge(g: &WeightedGraph, e: usize) -> Result<()> {
    if e < g.edge_count() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "edge index {e} out of range (graph has {} edges)",
            g.edge_count()
        )))
    }
}

fn mean(g: &WeightedGraph, cfg: &RunConfig, contributions: bool) -> Result<Map<String, Value>> {
    let start = Instant::now();
    let dm = all_pairs_distances_with(g, cfg.tolerance);
    let opts = MeanOptions { threads: None, contributions };
    let mut record = Map::new();
    let mut backend = match cfg.backend {
        BackendChoice::Auto => "auto".to_string(),
        b => backend_of(b).name().to_string(),
    };
    let mut extra = None;
    let mut class = None;
    let continuous = if cfg.mode == Mode::Discrete {
        None
    } else {
        let result = match cfg.backend {
            BackendChoice::Auto => {
                let (c, r) = auto_mean(g, &dm, &opts)?;
                class = Some(c);
                r
            }
            b => continuous_mean_with(g, &dm, backend_of(b), &opts)?,
        };
        backend = result.backend.to_string();
        extra = result.contributions;
        Some(result.value)
    };
    let (discrete, wiener) = if cfg.mode == Mode::Continuous {
        (None, None)
    } else {
        (Some(discrete_from(&dm)), Some(wiener_from(&dm)))
    };
    record.insert("continuous_mean".into(), json!(continuous));
    record.insert("discrete_mean".into(), json!(discrete));
    record.insert("wiener".into(), json!(wiener));
    record.insert("n".into(), json!(g.vertex_count()));
    record.insert("m".into(), json!(g.edge_count()));
    record.insert("total_length".into(), json!(g.total_length()));
    record.insert("backend".into(), json!(backend));
    if let Some(c) = class {
        record.insert("class".into(), json!(c));
    }
    record.insert("elapsed_ms".into(), json!(start.elapsed().as_secs_f64() * 1e3));
    if let Some(rows) = extra {
        record.insert("contributions".into(), json!(rows));
    }
    Ok(record)
}

fn distances_csv(g: &WeightedGraph, dm: &DistanceMatrix) -> String {
    let mut s = String::from("vertex");
    for label in g.labels() {
        let _ = write!(s, ",{label}");
    }
    s.push('\n');
    for u in 0..g.vertex_count() {
        s.push_str(g.label(u));
        for d in dm.row(u) {
            let _ = write!(s, ",{d}");
        }
        s.push('\n');
    }
    s
}

fn edge_pair(g: &WeightedGraph, cfg: &RunConfig, e: usize, f: usize) -> Result<Value> {
    check_edge(g, e)?;
    check_edge(g, f)?;
    let dm = all_pairs_distances_with(g, cfg.tolerance);
    let spt = pair_mean(g, &dm, e, f);
    let roof = roof_pair_mean(g, &dm, e, f);
    let bounds = if e == f { None } else { Some(pair_bounds(g, &dm, e, f)?) };
    Ok(json!({
        "first": e,
        "second": f,
        "lengths": [g.edge(e).length, g.edge(f).length],
        "classification": classify_pair(g, &dm, e, f),
        "spt_mean": spt,
        "roof_mean": roof,
        "difference": (spt - roof).abs(),
        "bounds": bounds,
    }))
}

fn roof(g: &WeightedGraph, cfg: &RunConfig, e: usize, f: usize) -> Result<Value> {
    check_edge(g, e)?;
    check_edge(g, f)?;
    let dm = all_pairs_distances_with(g, cfg.tolerance);
    let diagram = build_roof(g, &dm, e, f);
    Ok(json!({
        "mean": roof_mean(&diagram),
        "prism_mean": roof_mean_prisms(&diagram),
        "diagram": diagram,
    }))
}

fn bounds(g: &WeightedGraph, cfg: &RunConfig) -> Result<Value> {
    let dm = all_pairs_distances_with(g, cfg.tolerance);
    let m = g.edge_count();
    let mut pairs = 0usize;
    let mut violations = Vec::new();
    let (mut lower_gap, mut upper_gap) = (f64::INFINITY, f64::INFINITY);
    for e in 0..m {
        for f in e + 1..m {
            let b = pair_bounds(g, &dm, e, f)?;
            let mu = pair_mean(g, &dm, e, f);
            let slack = cfg.tolerance.slack(b.upper);
            pairs += 1;
            lower_gap = lower_gap.min(mu - b.lower);
            upper_gap = upper_gap.min(b.upper - mu);
            if mu < b.lower - slack || mu > b.upper + slack {
                violations.push(json!({"first": e, "second": f, "mean": mu, "bounds": b}));
            }
        }
    }
    let finite = |x: f64| x.is_finite().then_some(x);
    let mut holds = violations.is_empty();
    let line = match g.uniform_length(&cfg.tolerance) {
        Some(_) if m > 0 => {
            let lb = line_graph_bounds(g)?;
            let mu = continuous_mean_with(g, &dm, Backend::Spt, &MeanOptions::default())?.value;
            let slack = cfg.tolerance.slack(lb.upper);
            let ok = lb.lower - slack <= mu && mu <= lb.upper + slack;
            holds &= ok;
            Some(json!({
                "continuous_mean": mu,
                "line_discrete_mean": lb.line_discrete_mean,
                "line_wiener": lb.line_wiener,
                "lower": lb.lower,
                "upper": lb.upper,
                "holds": ok,
            }))
        }
        _ => None,
    };
    Ok(json!({
        "pairs": pairs,
        "violations": violations,
        "min_lower_gap": finite(lower_gap),
        "min_upper_gap": finite(upper_gap),
        "line_graph": line,
        "holds": holds,
    }))
}

fn subdivide(g: &WeightedGraph, cfg: &RunConfig, k: u32, materialize: bool, tree_points: Option<usize>) -> Result<Value> {
    let sandwich = omega_sandwich_capped(g, k, materialize.then_some(DEFAULT_MATERIALIZE_CAP))?;
    let limits = subdivision_limits(g)?;
    let dm = all_pairs_distances_with(g, cfg.tolerance);
    let (_, continuous) = auto_mean(g, &dm, &MeanOptions::default())?;
    // Only the upper bound is enforced; the lower bound is reported.
    let (mut holds, lower_holds) = match sandwich.mu_d_actual {
        Some(actual) => (actual <= sandwich.upper + cfg.tolerance.slack(sandwich.upper), Some(sandwich.lower < actual)),
        None => (true, None),
    };
    let tree = match tree_points {
        None => None,
        Some(points) => {
            let report = tree_subdivision_bound_check(g, points, Placement::Random { seed: cfg.seed })?;
            holds &= report.holds;
            Some(report)
        }
    };
    Ok(json!({
        "k": k,
        "vertex_count": sandwich.vertex_count,
        "omega": sandwich.omega,
        "lower": sandwich.lower,
        "upper": sandwich.upper,
        "rho": sandwich.rho,
        "mu_d_actual": sandwich.mu_d_actual,
        "limits": limits,
        "continuous_mean": continuous.value,
        "tree_bound": tree,
        "lower_bound_holds": lower_holds,
        "holds": holds,
    }))
}

fn oracle(g: &WeightedGraph, cfg: &RunConfig, resolution: usize) -> Result<Value> {
    let oc = OracleConfig::new(resolution)?;
    let start = Instant::now();
    let dm = all_pairs_distances_with(g, cfg.tolerance);
    let value = oracle_graph_mean(g, &dm, &oc)?;
    Ok(json!({
        "continuous_mean": value,
        "discrete_mean": discrete_from(&dm),
        "wiener": wiener_from(&dm),
        "n": g.vertex_count(),
        "m": g.edge_count(),
        "total_length": g.total_length(),
        "backend": "oracle",
        "resolution": resolution,
        "elapsed_ms": start.elapsed().as_secs_f64() * 1e3,
    }))
}

fn generate(args: &GenerateArgs, cfg: &RunConfig) -> Result<String> {
    let weights = match (&args.weights, args.lo.zip(args.hi)) {
        (Some(ws), _) => WeightSpec::Explicit(ws.clone()),
        (None, Some((lo, hi))) => WeightSpec::Random { lo, hi },
        (None, None) => WeightSpec::Uniform(args.alpha.unwrap_or(1.0)),
    };
    let mut spec = GeneratorSpec::new(args.kind, args.n, weights)
        .seed(cfg.seed)
        .parallel_prob(args.parallel_prob);
    if let Some(m) = args.edges {
        spec = spec.edges(m);
    }
    let g = spec.build()?;
    Ok(if args.json { to_json(&g) + "\n" } else { to_edge_list(&g) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generate_specs() {
        assert_eq!(
            parse_generate_spec("cycle:4").unwrap(),
            (GraphKind::Cycle, 4, WeightSpec::Uniform(1.0))
        );
        assert_eq!(
            parse_generate_spec("random_tree:10:0.5..2").unwrap(),
            (GraphKind::RandomTree, 10, WeightSpec::Random { lo: 0.5, hi: 2.0 })
        );
        assert_eq!(
            parse_generate_spec("star:5:2.5").unwrap(),
            (GraphKind::Star, 5, WeightSpec::Uniform(2.5))
        );
        for bad in ["", "cycle", "cycle:x", "blob:3", "cycle:3:1:2", "path:3:a..b"] {
            assert!(parse_generate_spec(bad).is_err(), "{bad}");
        }
    }
}
