//! The `hypercone` command line tool.
//!
//! Exit codes: 0 on success, 2 when a predicate lands in its degeneracy
//! window, 1 on any other error (including a failed certificate or self-test).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ball_model::{BallPoint, SphereDirection};
use crate::charge::{compose, exchange_statistics, Composite};
use crate::constructions::{
    avoid_ball_inside, common_complement_cone, contracting_boosts, enclose_shadow, escape_ball,
    funnel_from_exhaustion, funnel_in, path_connect_avoiding, robust_enclosure_lorentz,
    shadow_certificate, shrink_across_shells, shrink_for_connectivity, translate_enclosure,
    translation_certificate, wrap_ball_in_complement, ConePath, LorentzNeighbourhood, ShrinkCase,
};
use crate::hypercone::{
    cone_leq_margin, cone_leq_with, disjoint_with, enclosing_cone_with, hyperball_disjoint_margin,
    hyperball_in_cone_margin, in_causal_completion, BallCone, Disjointness, Hypercone, Plane,
};
use crate::minkowski::{FourVector, LorentzTransform};
use crate::render::{render_svg, SectionPlane};
use crate::scene::Scene;
use crate::selftest::{self, sampled_inclusion, sampled_separation, DEFAULT_BUDGET, DEFAULT_SEED};
use crate::{Error, Result, Tolerances};

const CONSTRUCT_BUDGET: usize = 2000;

#[derive(Debug, Parser)]
#[command(name = "hypercone", version, about = "Hypercones in the forward light cone: queries, constructions, figures and a self-test")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Sampling budget (self-test instance scale or points per certificate).
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// JSON file overriding numerical tolerances.
    #[arg(long, global = true)]
    pub tolerances: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one predicate on a scene, e.g. "disjoint A B".
    ///
    /// Queries: disjoint A B | leq A B | enclose A B | contains K (x,y,z | event | hyperball)
    /// | in-causal-completion (event | x0,x1,x2,x3) K | compose s t | statistics s [t]
    Check {
        scene: PathBuf,
        #[arg(required = true, num_args = 1.., allow_hyphen_values = true)]
        query: Vec<String>,
    },
    /// Run construction A1..A13 on named scene objects and certify the result.
    Construct {
        scene: PathBuf,
        lemma: String,
        names: Vec<String>,
        /// Funnel length for A1.
        #[arg(long)]
        depth: Option<usize>,
        /// Source shell for A9 and A10 (the scene shell is the target).
        #[arg(long)]
        sigma: Option<f64>,
        /// Translation x0,x1,x2,x3 for A13, repeatable.
        #[arg(long = "t", allow_hyphen_values = true)]
        t: Vec<String>,
        /// Generator of the neighbourhood for A12 as x,y,z,rapidity, repeatable.
        #[arg(long, allow_hyphen_values = true)]
        boost: Vec<String>,
        /// Neighbourhood radius for A12.
        #[arg(long)]
        eps: Option<f64>,
        /// Hyperball to funnel past (A1) or escape from (A11).
        #[arg(long)]
        probe: Option<String>,
        /// Boost direction x,y,z for A11 (defaults to the cap axis).
        #[arg(long, allow_hyphen_values = true)]
        dir: Option<String>,
        /// Rapidity for A11.
        #[arg(long, allow_hyphen_values = true)]
        chi: Option<f64>,
        /// Write the scene with the new cones here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Interpolating path between two cones, optionally avoiding others.
    Path {
        scene: PathBuf,
        from: String,
        to: String,
        /// Cone the path must stay disjoint from, repeatable.
        #[arg(long)]
        avoid: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw the section of the scene by a plane (x=0, z=0.3 or a,b,c,d) as SVG.
    Render {
        scene: PathBuf,
        plane: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-check the invariants of every module on seeded random instances.
    Selftest,
}

/// Parses `argv` and runs the command, printing to `out` and `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) if e.is_degenerate() => {
            let _ = writeln!(err, "degenerate: {e}");
            2
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::InvalidInput(format!("output: {e}"))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let tol = match &cli.tolerances {
        Some(p) => Tolerances::from_json(
            &std::fs::read_to_string(p)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", p.display())))?,
        )?,
        None => Tolerances::DEFAULT,
    };
    match &cli.command {
        Command::Check { scene, query } => {
            let scene = Scene::load(scene)?;
            let line = check(&scene, &query.join(" "), &tol)?;
            writeln!(out, "{line}").map_err(io)?;
            Ok(0)
        }
        Command::Construct {
            scene,
            lemma,
            names,
            depth,
            sigma,
            t,
            boost,
            eps,
            probe,
            dir,
            chi,
            out: out_path,
        } => {
            let mut scene = Scene::load(scene)?;
            let args = ConstructArgs {
                names,
                depth: *depth,
                sigma: *sigma,
                t,
                boost,
                eps: *eps,
                probe: probe.as_deref(),
                dir: dir.as_deref(),
                chi: *chi,
            };
            let budget = cli.budget.unwrap_or(CONSTRUCT_BUDGET);
            let report = construct(&mut scene, lemma, &args, cli.seed, budget)?;
            write!(out, "{}", report.text).map_err(io)?;
            if let Some(p) = out_path {
                scene.save(p)?;
                writeln!(out, "wrote {}", p.display()).map_err(io)?;
            }
            Ok(if report.passed { 0 } else { 1 })
        }
        Command::Path {
            scene,
            from,
            to,
            avoid,
            out: out_path,
        } => {
            let mut scene = Scene::load(scene)?;
            let ka = *scene.cone(from)?;
            let kb = *scene.cone(to)?;
            let forbidden = avoid
                .iter()
                .map(|n| scene.cone(n).copied())
                .collect::<Result<Vec<_>>>()?;
            let p = path_connect_avoiding(&forbidden, &ka, &kb)?;
            p.verify(&forbidden)?;
            let text = store_path(&mut scene, "path", &p)?;
            write!(out, "{text}").map_err(io)?;
            if let Some(pth) = out_path {
                scene.save(pth)?;
                writeln!(out, "wrote {}", pth.display()).map_err(io)?;
            }
            Ok(0)
        }
        Command::Render { scene, plane, out: path } => {
            let scene = Scene::load(scene)?;
            let plane = SectionPlane::parse(plane)?;
            write_file(path, &render_svg(&scene, &plane))?;
            writeln!(out, "wrote {}", path.display()).map_err(io)?;
            Ok(0)
        }
        Command::Selftest => {
            let report = selftest::run(cli.seed, cli.budget.unwrap_or(DEFAULT_BUDGET), &tol)?;
            write!(out, "{}", report.render()).map_err(io)?;
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

/// Shortest decimal for `x` with at most six places, without `-0`.
fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn vec3(v: &Vector3<f64>) -> String {
    format!("({},{},{})", num(v.x), num(v.y), num(v.z))
}

fn plane_text(p: &Plane) -> String {
    for (i, axis) in ["x", "y", "z"].iter().enumerate() {
        let c = p.normal[i];
        if (c.abs() - 1.0).abs() < 1e-9 {
            return format!("plane {axis}={}", num(p.offset / c));
        }
    }
    format!("plane n={} offset={}", vec3(&p.normal), num(p.offset))
}

fn cone_text(k: &BallCone) -> String {
    format!(
        "cone apex={} axis={} half_angle_deg={}",
        vec3(k.apex().coords()),
        vec3(k.base().n()),
        num(k.base().half_angle().to_degrees())
    )
}

fn parse_floats<const N: usize>(s: &str, what: &str) -> Result<[f64; N]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidInput(format!("{what}: cannot parse {s:?}")))?;
    v.try_into()
        .map_err(|_| Error::InvalidInput(format!("{what}: expected {N} comma-separated numbers, got {s:?}")))
}

fn event_arg(scene: &Scene, s: &str) -> Result<FourVector> {
    match scene.events.get(s) {
        Some(e) => Ok(*e),
        None => Ok(FourVector::from(parse_floats::<4>(s, "event")?)),
    }
}

fn want(args: &[&str], n: usize, usage: &str) -> Result<()> {
    if args.len() == n {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("usage: {usage}")))
    }
}

/// Evaluates one query and returns the line to print.
pub fn check(scene: &Scene, query: &str, tol: &Tolerances) -> Result<String> {
    let words: Vec<&str> = query.split_whitespace().collect();
    let (verb, args) = words
        .split_first()
        .ok_or_else(|| Error::InvalidInput("empty query".into()))?;
    match *verb {
        "disjoint" => {
            want(args, 2, "disjoint A B")?;
            if let Some(o) = scene.hyperballs.get(args[0]) {
                let k = scene.cone(args[1])?;
                let m = hyperball_disjoint_margin(o, k);
                return ball_verdict("hyperball_disjoint_from_cone", m, tol);
            }
            let (a, b) = (scene.cone(args[0])?, scene.cone(args[1])?);
            Ok(match disjoint_with(a, b, tol)? {
                Disjointness::Disjoint { plane, margin } => {
                    format!("true, margin={margin:.6e}, {}", plane_text(&plane))
                }
                Disjointness::Intersecting { point, margin } => {
                    format!("false, margin={margin:.6e}, common point {}", vec3(point.coords()))
                }
            })
        }
        "leq" => {
            want(args, 2, "leq A B")?;
            let (a, b) = (scene.cone(args[0])?, scene.cone(args[1])?);
            Ok(format!("{}, margin={:.6e}", cone_leq_with(a, b, tol), cone_leq_margin(a, b)))
        }
        "enclose" => {
            want(args, 2, "enclose A B")?;
            let (a, b) = (scene.cone(args[0])?, scene.cone(args[1])?);
            Ok(match enclosing_cone_with(a, b, tol) {
                Some(k) => format!("true, {}", describe(scene, &k)),
                None => "false, no cone of the family contains both".into(),
            })
        }
        "contains" => {
            want(args, 2, "contains K (x,y,z | event | hyperball)")?;
            let k = scene.cone(args[0])?;
            if let Some(o) = scene.hyperballs.get(args[1]) {
                return ball_verdict("hyperball_in_cone", hyperball_in_cone_margin(o, k), tol);
            }
            if scene.events.contains_key(args[1]) {
                let e = scene.event(args[1])?;
                let inside = in_causal_completion(e, &Hypercone::new(scene.shell, *k))?;
                return Ok(format!("{inside}, event {e} against the hypercone of {}", args[0]));
            }
            let u = BallPoint::new(Vector3::from(parse_floats::<3>(args[1], "point")?))?;
            let d = k.depth(u.coords());
            Ok(format!("{}, margin={d:.6e}", k.contains(u.coords())))
        }
        "in-causal-completion" => {
            want(args, 2, "in-causal-completion (event | x0,x1,x2,x3) K")?;
            let e = event_arg(scene, args[0])?;
            let k = scene.cone(args[1])?;
            let inside = in_causal_completion(&e, &Hypercone::new(scene.shell, *k))?;
            Ok(format!("{inside}, event {e}"))
        }
        "compose" => {
            want(args, 2, "compose s t")?;
            let (s, t) = (scene.morphism(args[0])?, scene.morphism(args[1])?);
            Ok(match compose(s, t)? {
                Composite::Localized(m) => {
                    format!("charge={:?}, localized in {}", m.charge.coords(), describe(scene, &m.localization))
                }
                Composite::Unlocalized { charge, .. } => {
                    format!("charge={:?}, unlocalized", charge.coords())
                }
            })
        }
        "statistics" => {
            if args.len() == 1 {
                let s = scene.morphism(args[0])?;
                let e = scene.statistics.eval(&s.charge)?;
                return Ok(format!("epsilon={e}, charge={:?}", s.charge.coords()));
            }
            want(args, 2, "statistics s [t]")?;
            let (s, t) = (scene.morphism(args[0])?, scene.morphism(args[1])?);
            let x = exchange_statistics(s, t, &scene.statistics)?;
            Ok(format!("epsilon={}, exchange through {}", x.sign, cone_text(&x.complement)))
        }
        other => Err(Error::InvalidInput(format!("unknown query {other:?}"))),
    }
}

fn ball_verdict(predicate: &'static str, m: f64, tol: &Tolerances) -> Result<String> {
    if m.abs() <= tol.margin {
        return Err(Error::Degenerate {
            predicate,
            margin: m,
            tolerance: tol.margin,
        });
    }
    Ok(format!("{}, margin={m:.6e}", m > 0.0))
}

fn describe(scene: &Scene, k: &BallCone) -> String {
    match scene.name_of(k) {
        Some(n) => n.to_string(),
        None => cone_text(k),
    }
}

pub struct ConstructArgs<'a> {
    pub names: &'a [String],
    pub depth: Option<usize>,
    pub sigma: Option<f64>,
    pub t: &'a [String],
    pub boost: &'a [String],
    pub eps: Option<f64>,
    pub probe: Option<&'a str>,
    pub dir: Option<&'a str>,
    pub chi: Option<f64>,
}

pub struct ConstructReport {
    pub text: String,
    pub passed: bool,
}

/// Pass/fail marks collected while certifying a witness.
struct Cert {
    marks: Vec<(String, bool)>,
    notes: Vec<String>,
    worst: f64,
    samples: usize,
}

impl Cert {
    fn new() -> Self {
        Self {
            marks: Vec::new(),
            notes: Vec::new(),
            worst: f64::INFINITY,
            samples: 0,
        }
    }

    fn mark(&mut self, label: impl Into<String>, ok: bool) {
        self.marks.push((label.into(), ok));
    }

    fn margin(&mut self, label: impl Into<String>, m: f64) {
        self.mark(label, m > 0.0);
        self.worst = self.worst.min(m);
    }

    fn sampled(&mut self, label: impl Into<String>, r: Result<()>, n: usize) {
        self.samples += n;
        if let Err(e) = &r {
            self.notes.push(format!("sampling violation: {e}"));
        }
        self.mark(label, r.is_ok());
    }

    fn passed(&self) -> bool {
        self.marks.iter().all(|(_, ok)| *ok)
    }

    fn render(&self) -> String {
        let marks: Vec<String> = self
            .marks
            .iter()
            .map(|(l, ok)| format!("{l} {}", if *ok { "✓" } else { "✗" }))
            .collect();
        let mut s = format!("certificate: {}\n", marks.join(" "));
        for n in &self.notes {
            s.push_str(n);
            s.push('\n');
        }
        let worst = if self.worst.is_finite() { format!("{:.6e}", self.worst) } else { "-".into() };
        s.push_str(&format!(
            "samples: {}, worst margin: {worst}, status: {}\n",
            self.samples,
            if self.passed() { "pass" } else { "FAIL" }
        ));
        s
    }
}

fn disjoint_margin(a: &BallCone, b: &BallCone) -> f64 {
    match disjoint_with(a, b, &Tolerances::DEFAULT) {
        Ok(Disjointness::Disjoint { margin, .. }) => margin,
        Ok(Disjointness::Intersecting { margin, .. }) => -margin,
        Err(_) => 0.0,
    }
}

fn leq_mark(cert: &mut Cert, a: (&str, &BallCone), b: (&str, &BallCone)) {
    cert.margin(format!("leq({},{})", a.0, b.0), if cone_leq_with(a.1, b.1, &Tolerances::DEFAULT) {
        cone_leq_margin(a.1, b.1).max(f64::MIN_POSITIVE)
    } else {
        -1.0
    });
}

fn store(scene: &mut Scene, prefix: &str, k: &BallCone) -> Result<(String, BallCone)> {
    if let Some(n) = scene.name_of(k) {
        return Ok((n.to_string(), *k));
    }
    let name = scene.fresh_name(prefix);
    let stored = scene.add_cone(&name, k)?;
    Ok((name, stored))
}

/// Stores a sequence as `<prefix>_<n>_<i>` with the first free `n`.
fn store_seq(scene: &mut Scene, prefix: &str, ks: &[BallCone]) -> Result<Vec<(String, BallCone)>> {
    let n = (1..)
        .find(|n| {
            let p = format!("{prefix}_{n}_");
            !scene.cones.keys().any(|k| k.starts_with(&p))
        })
        .expect("unbounded");
    ks.iter()
        .enumerate()
        .map(|(i, k)| match scene.name_of(k) {
            Some(name) => Ok((name.to_string(), *k)),
            None => {
                let name = format!("{prefix}_{n}_{i}");
                scene.add_cone(&name, k).map(|s| (name, s))
            }
        })
        .collect()
}

fn store_path(scene: &mut Scene, prefix: &str, p: &ConePath) -> Result<String> {
    let nodes = store_seq(scene, prefix, &p.nodes)?;
    let wit = store_seq(scene, &format!("{prefix}w"), &p.witnesses)?;
    let names: Vec<&str> = nodes.iter().map(|(n, _)| n.as_str()).collect();
    let mut s = format!("path: {} node(s): {}\n", nodes.len(), names.join(" -> "));
    for (i, (w, _)) in wit.iter().enumerate() {
        s.push_str(&format!("  {w} lies in {} and {}\n", names[i], names[i + 1]));
    }
    Ok(s)
}

fn names_of<'a>(args: &'a ConstructArgs, n: usize, usage: &str) -> Result<Vec<&'a str>> {
    if args.names.len() != n {
        return Err(Error::InvalidInput(format!("usage: construct {usage}")));
    }
    Ok(args.names.iter().map(String::as_str).collect())
}

/// Runs a construction, adds its witness cones to `scene` and certifies them
/// by exact predicates and by membership sampling with `budget` points.
pub fn construct(
    scene: &mut Scene,
    lemma: &str,
    args: &ConstructArgs,
    seed: u64,
    budget: usize,
) -> Result<ConstructReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rng = &mut rng;
    let mut cert = Cert::new();
    let mut text = String::new();
    let tau = scene.shell.tau();
    match lemma {
        "A1" => {
            let n = names_of(args, 1, "A1 K --probe O [--depth n]")?;
            let k = *scene.cone(n[0])?;
            let probe = args
                .probe
                .ok_or_else(|| Error::InvalidInput("A1 needs --probe".into()))?;
            let o = *scene.hyperball(probe)?;
            let f = funnel_in(&k, args.depth.unwrap_or(3), &o)?;
            let stored = store_seq(scene, "A1", &f.cones)?;
            text += &format!("funnel: {}\n", stored.iter().map(|s| s.0.as_str()).collect::<Vec<_>>().join(" > "));
            leq_mark(&mut cert, (&stored[0].0, &stored[0].1), (n[0], &k));
            for w in stored.windows(2) {
                leq_mark(&mut cert, (&w[1].0, &w[1].1), (&w[0].0, &w[0].1));
                cert.sampled(format!("sampled({}⊆{})", w[1].0, w[0].0), sampled_inclusion(&w[1].1, &w[0].1, rng, budget), budget);
            }
            let last = stored.last().expect("nonempty funnel");
            cert.margin(format!("disjoint({},{probe})", last.0), hyperball_disjoint_margin(&o, &last.1));
        }
        "A2" => {
            if args.names.is_empty() {
                return Err(Error::InvalidInput("usage: construct A2 K1 K2 ...".into()));
            }
            let ks = args
                .names
                .iter()
                .map(|n| scene.cone(n).copied())
                .collect::<Result<Vec<_>>>()?;
            let f = funnel_from_exhaustion(&ks)?;
            let stored = store_seq(scene, "A2", &f.cones)?;
            text += &format!("funnel: {}\n", stored.iter().map(|s| s.0.as_str()).collect::<Vec<_>>().join(" > "));
            for ((on, o), (kn, k)) in stored.iter().zip(args.names.iter().zip(&ks)) {
                cert.margin(format!("disjoint({on},{kn})"), disjoint_margin(o, k));
                cert.sampled(format!("sampled({on}∩{kn}=∅)"), sampled_separation(o, k, rng, budget), budget);
            }
            for w in stored.windows(2) {
                leq_mark(&mut cert, (&w[1].0, &w[1].1), (&w[0].0, &w[0].1));
            }
        }
        "A3" | "A4" => {
            let n = names_of(args, 2, &format!("{lemma} O K"))?;
            let o = *scene.hyperball(n[0])?;
            let k = *scene.cone(n[1])?;
            let w = if lemma == "A3" { avoid_ball_inside(&o, &k)? } else { wrap_ball_in_complement(&o, &k)? };
            let (name, w) = store(scene, lemma, &w)?;
            text += &format!("witness: {name} = {}\n", cone_text(&w));
            if lemma == "A3" {
                leq_mark(&mut cert, (&name, &w), (n[1], &k));
                cert.margin(format!("disjoint({},{name})", n[0]), hyperball_disjoint_margin(&o, &w));
                cert.sampled(format!("sampled({name}⊆{})", n[1]), sampled_inclusion(&w, &k, rng, budget), budget);
            } else {
                cert.margin(format!("inside({},{name})", n[0]), hyperball_in_cone_margin(&o, &w));
                cert.margin(format!("disjoint({name},{})", n[1]), disjoint_margin(&w, &k));
                cert.sampled(format!("sampled({name}∩{}=∅)", n[1]), sampled_separation(&w, &k, rng, budget), budget);
            }
        }
        "A5" | "A6" => {
            let (forbidden, a, b) = if lemma == "A5" {
                let n = names_of(args, 2, "A5 A B")?;
                (None, n[0], n[1])
            } else {
                let n = names_of(args, 3, "A6 K A B")?;
                (Some((n[0], *scene.cone(n[0])?)), n[1], n[2])
            };
            let (ka, kb) = (*scene.cone(a)?, *scene.cone(b)?);
            let fb: Vec<BallCone> = forbidden.iter().map(|f| f.1).collect();
            let p = path_connect_avoiding(&fb, &ka, &kb)?;
            let nodes = store_seq(scene, lemma, &p.nodes)?;
            let wit = store_seq(scene, &format!("{lemma}w"), &p.witnesses)?;
            text += &format!(
                "path: {} node(s): {}\n",
                nodes.len(),
                nodes.iter().map(|s| s.0.as_str()).collect::<Vec<_>>().join(" -> ")
            );
            cert.mark("endpoints", p.nodes.first() == Some(&ka) && p.nodes.last() == Some(&kb));
            let per = budget / (2 * wit.len()).max(1);
            for (i, (wn, w)) in wit.iter().enumerate() {
                for (nn, node) in [&nodes[i], &nodes[i + 1]] {
                    leq_mark(&mut cert, (wn, w), (nn, node));
                    cert.sampled(format!("sampled({wn}⊆{nn})"), sampled_inclusion(w, node, rng, per), per);
                }
            }
            if let Some((fname, f)) = forbidden {
                for (nn, node) in &nodes {
                    cert.margin(format!("disjoint({nn},{fname})"), disjoint_margin(node, &f));
                }
            }
        }
        "A7" => {
            let n = names_of(args, 2, "A7 A B")?;
            let (ka, kb) = (*scene.cone(n[0])?, *scene.cone(n[1])?);
            let r = shrink_for_connectivity(&ka, &kb)?;
            let (name, w) = store(scene, "A7", &r.cone)?;
            text += &format!("witness: {name} = {} ({:?})\n", cone_text(&w), r.case);
            leq_mark(&mut cert, (&name, &w), (n[0], &ka));
            cert.sampled(format!("sampled({name}⊆{})", n[0]), sampled_inclusion(&w, &ka, rng, budget), budget);
            match r.case {
                ShrinkCase::DisjointCaps => cert.margin(format!("disjoint({name},{})", n[1]), disjoint_margin(&w, &kb)),
                ShrinkCase::OverlappingCaps => leq_mark(&mut cert, (&name, &w), (n[1], &kb)),
            }
        }
        "A8" => {
            let n = names_of(args, 2, "A8 A B")?;
            let (ka, kb) = (*scene.cone(n[0])?, *scene.cone(n[1])?);
            let c = common_complement_cone(&ka, &kb)?;
            let (name, c) = store(scene, "A8", &c)?;
            text += &format!("witness: {name} = {}\n", cone_text(&c));
            for (kn, k) in [(n[0], &ka), (n[1], &kb)] {
                cert.margin(format!("disjoint({name},{kn})"), disjoint_margin(&c, k));
                cert.sampled(format!("sampled({name}∩{kn}=∅)"), sampled_separation(&c, k, rng, budget), budget);
            }
        }
        "A9" | "A10" => {
            let n = names_of(args, 1, &format!("{lemma} K --sigma s"))?;
            let k = *scene.cone(n[0])?;
            let sigma = args
                .sigma
                .ok_or_else(|| Error::InvalidInput(format!("{lemma} needs --sigma")))?;
            let w = if lemma == "A9" { enclose_shadow(&k, sigma, tau)? } else { shrink_across_shells(&k, sigma, tau)? };
            let (name, w) = store(scene, lemma, &w)?;
            text += &format!("witness: {name} = {}\n", cone_text(&w));
            let (inner, outer) = if lemma == "A9" { ((n[0], k), (name.as_str(), w)) } else { ((name.as_str(), w), (n[0], k)) };
            leq_mark(&mut cert, (inner.0, &inner.1), (outer.0, &outer.1));
            cert.samples += budget;
            match shadow_certificate(&inner.1, &outer.1, sigma, tau, rng, budget) {
                Ok(m) => cert.margin(format!("shadow({}⊆{})", inner.0, outer.0), m),
                Err(e) => {
                    cert.notes.push(e.to_string());
                    cert.mark(format!("shadow({}⊆{})", inner.0, outer.0), false);
                }
            }
        }
        "A11" => {
            let n = names_of(args, 1, "A11 K [--dir x,y,z] [--chi c] [--probe O]")?;
            let k = *scene.cone(n[0])?;
            let l = match args.dir {
                Some(d) => SphereDirection::normalize(Vector3::from(parse_floats::<3>(d, "--dir")?))?,
                None => *k.base().axis(),
            };
            let chi = args.chi.unwrap_or(1.0);
            let cb = contracting_boosts(&k);
            let img = cb.image(&l, chi)?;
            let (name, img) = store(scene, "A11", &img)?;
            text += &format!("witness: {name} = {}\n", cone_text(&img));
            leq_mark(&mut cert, (&name, &img), (n[0], &k));
            cert.sampled(format!("sampled({name}⊆{})", n[0]), sampled_inclusion(&img, &k, rng, budget), budget);
            if let Some(p) = args.probe {
                let o = *scene.hyperball(p)?;
                let steps = escape_ball(&k, &o, &l, 64)?;
                text += &format!("escape: {steps} unit boost(s) move {} off {p}\n", n[0]);
                let moved = k.transform(&cb.boost(&l, steps as f64)?)?;
                cert.margin(format!("disjoint(boosted {},{p})", n[0]), hyperball_disjoint_margin(&o, &moved));
            }
        }
        "A12" => {
            let n = names_of(args, 1, "A12 K [--boost x,y,z,chi]... [--eps e]")?;
            let k = *scene.cone(n[0])?;
            let gens = args
                .boost
                .iter()
                .map(|b| {
                    let [x, y, z, chi] = parse_floats::<4>(b, "--boost")?;
                    LorentzTransform::boost(&Vector3::new(x, y, z).try_normalize(0.0).ok_or_else(|| {
                        Error::InvalidInput(format!("--boost {b}: zero direction"))
                    })?, chi)
                })
                .collect::<Result<Vec<_>>>()?;
            let eps = args.eps.unwrap_or(0.01);
            let nbhd = LorentzNeighbourhood::new(gens, eps)?;
            let w = robust_enclosure_lorentz(&k, &nbhd)?;
            let (name, w) = store(scene, "A12", &w)?;
            text += &format!("witness: {name} = {}\n", cone_text(&w));
            let words = nbhd.words();
            let per = (budget / (8 * words.len())).max(1);
            for (i, word) in words.iter().enumerate() {
                let mut ok = true;
                let mut worst = f64::INFINITY;
                for _ in 0..8 {
                    let lam = word.compose(&selftest::near_identity(rng, eps / 4.0));
                    if word.distance(&lam) > eps {
                        continue;
                    }
                    let img = k.transform(&lam)?;
                    ok &= cone_leq_with(&img, &w, &Tolerances::DEFAULT);
                    worst = worst.min(cone_leq_margin(&img, &w));
                    ok &= sampled_inclusion(&img, &w, rng, per).is_ok();
                    cert.samples += per;
                }
                cert.mark(format!("perturbed word {i} ⊆ {name}"), ok);
                if worst.is_finite() {
                    cert.worst = cert.worst.min(worst);
                }
            }
        }
        "A13" => {
            let n = names_of(args, 1, "A13 K --t x0,x1,x2,x3 ...")?;
            let k = *scene.cone(n[0])?;
            if args.t.is_empty() {
                return Err(Error::InvalidInput("A13 needs at least one --t".into()));
            }
            let ts = args
                .t
                .iter()
                .map(|t| parse_floats::<4>(t, "--t").map(FourVector::from))
                .collect::<Result<Vec<_>>>()?;
            let w = translate_enclosure(&k, tau, &ts)?;
            let (name, w) = store(scene, "A13", &w)?;
            text += &format!("witness: {name} = {}\n", cone_text(&w));
            leq_mark(&mut cert, (n[0], &k), (&name, &w));
            let r = translation_certificate(&k, &w, tau, &ts, rng, budget);
            cert.sampled(format!("sampled in_causal_completion(C({})+t, C({name}))", n[0]), r, budget * ts.len());
        }
        other => return Err(Error::InvalidInput(format!("unknown construction {other:?} (use A1..A13)"))),
    }
    text += &cert.render();
    Ok(ConstructReport {
        text,
        passed: cert.passed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCENE: &str = r#"{
        "schema": 1, "tau": 1.0,
        "cones": {
            "A": {"apex": [0, 0, 0.2], "axis": [0, 0, 1], "half_angle_deg": 30},
            "B": {"apex": [0, 0, -0.2], "axis": [0, 0, -1], "half_angle_deg": 30},
            "W": {"apex": [0, 0, -0.5], "axis": [0, 0, 1], "half_angle_deg": 80}
        },
        "hyperballs": {"O": {"center": [0, 0, 0.5], "radius": 0.3}},
        "events": {"e": [3, 0, 0, 2.5]},
        "morphisms": {"s": {"charge": [1], "cone": "A"}, "t": {"charge": [2], "cone": "B"}, "u": {"charge": [1], "cone": "B"}}
    }"#;

    fn scene() -> Scene {
        Scene::parse(SCENE).unwrap()
    }

    #[test]
    fn mirrored_cones_are_separated_by_the_equator() {
        let line = check(&scene(), "disjoint A B", &Tolerances::DEFAULT).unwrap();
        assert!(line.starts_with("true, margin="), "{line}");
        assert!(line.ends_with("plane z=0"), "{line}");
    }

    #[test]
    fn compose_reports_charge_and_localization() {
        let line = check(&scene(), "compose s t", &Tolerances::DEFAULT).unwrap();
        assert!(line.starts_with("charge=[3], "), "{line}");
        let line = check(&scene(), "statistics s u", &Tolerances::DEFAULT).unwrap();
        assert!(line.starts_with("epsilon=1, exchange through cone"), "{line}");
    }

    #[test]
    fn construct_a5_on_one_cone_is_a_single_node() {
        let mut s = scene();
        let names = vec!["A".to_string(), "A".to_string()];
        let args = ConstructArgs { names: &names, depth: None, sigma: None, t: &[], boost: &[], eps: None, probe: None, dir: None, chi: None };
        let r = construct(&mut s, "A5", &args, 1, 100).unwrap();
        assert!(r.passed);
        assert!(r.text.starts_with("path: 1 node(s): A\n"), "{}", r.text);
    }

    #[test]
    fn construct_a8_certifies() {
        let mut s = scene();
        let names = vec!["A".to_string(), "B".to_string()];
        let args = ConstructArgs { names: &names, depth: None, sigma: None, t: &[], boost: &[], eps: None, probe: None, dir: None, chi: None };
        let r = construct(&mut s, "A8", &args, 1, 500).unwrap();
        assert!(r.passed, "{}", r.text);
        assert!(r.text.contains("disjoint(A8_1,A) ✓"), "{}", r.text);
        assert!(r.text.contains("disjoint(A8_1,B) ✓"), "{}", r.text);
        assert!(s.cones.contains_key("A8_1"));
    }
}
