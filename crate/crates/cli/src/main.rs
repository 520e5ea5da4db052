use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use flipforge::chain_path::trace_of;
use flipforge::convert::{flips_to_rsa_report, rsa_to_flips};
use flipforge::double_chain::build_double_chain;
use flipforge::io::{self, Manifest, ManifestFile, Provenance};
use flipforge::reduction::{self, build_instance, verify_instance, PolyFlipInstance, ReductionParams};
use flipforge::rsa::{self, Arborescence};
use flipforge::search::{flip_distance, SearchBudget};
use flipforge::{svg, FlipSequence, SimplePolygon, Triangulation};

#[derive(Parser)]
#[command(name = "flipforge", version, about = "Flip distance and Steiner arborescence toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Double chain generation.
    Dc {
        #[command(subcommand)]
        cmd: DcCmd,
    },
    /// Exact flip distance between two triangulations.
    Flipdist {
        #[arg(long)]
        polygon: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 64)]
        max_depth: usize,
        /// Write the witness flip sequence here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rectilinear Steiner arborescences.
    Rsa {
        #[command(subcommand)]
        cmd: RsaCmd,
    },
    /// Build the polygon instance for a YRSA instance.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        beta: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long = "override")]
        allow_override: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert between arborescences and flip sequences of an instance.
    Convert {
        #[command(subcommand)]
        cmd: ConvertCmd,
    },
    /// Check an artifact and report violations.
    Verify(VerifyArgs),
    /// Render an artifact as SVG.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum DcCmd {
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        with_apex: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum RsaCmd {
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = rsa::SOLVER_CAP)]
        max_sinks: usize,
    },
    Perturb {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// A random valid arborescence.
    Random {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum ConvertCmd {
    RsaToFlips {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    FlipsToRsa {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Artifact file, or an instance directory.
    path: PathBuf,
    /// Start triangulation for a flips file.
    #[arg(long)]
    start: Option<PathBuf>,
    /// Instance directory for a flips file.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Sink file for an rsa file.
    #[arg(long)]
    sinks: Option<PathBuf>,
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Usage>() => {
            eprintln!("usage error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn kind_of(text: &str) -> Option<&str> {
    text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#'))?.split_whitespace().next()
}

fn load_triangulation(path: &Path) -> anyhow::Result<Triangulation> {
    let text = read(path)?;
    let (poly_file, _) = io::parse_triangulation_header(&text)?;
    let poly_path = path.parent().unwrap_or(Path::new(".")).join(poly_file);
    let polygon = Arc::new(io::parse_polygon(&read(&poly_path)?)?);
    Ok(io::parse_triangulation(&text, polygon)?)
}

fn max_states() -> anyhow::Result<Option<usize>> {
    match std::env::var("FLIPFORGE_MAX_STATES") {
        Ok(v) => v.parse().map(Some).map_err(|_| usage(format!("FLIPFORGE_MAX_STATES={v:?} is not a number"))),
        Err(_) => Ok(None),
    }
}

fn run(cmd: Cmd) -> anyhow::Result<()> {
    match cmd {
        Cmd::Dc { cmd: DcCmd::Gen { n, with_apex, out } } => dc_gen(n, with_apex, &out),
        Cmd::Flipdist { polygon, a, b, max_depth, out } => flipdist(&polygon, &a, &b, max_depth, out.as_deref()),
        Cmd::Rsa { cmd } => match cmd {
            RsaCmd::Solve { input, out, max_sinks } => rsa_solve(&input, out.as_deref(), max_sinks),
            RsaCmd::Perturb { input, out } => rsa_perturb(&input, &out),
            RsaCmd::Random { input, seed, out } => rsa_random(&input, seed, &out),
        },
        Cmd::Reduce { input, beta, d, allow_override, out } => reduce(&input, beta, d, allow_override, &out),
        Cmd::Convert { cmd } => match cmd {
            ConvertCmd::RsaToFlips { instance, input, out } => convert_rsa_to_flips(&instance, &input, &out),
            ConvertCmd::FlipsToRsa { instance, input, out, trace } => {
                convert_flips_to_rsa(&instance, &input, &out, trace.as_deref())
            }
        },
        Cmd::Verify(args) => verify(&args),
        Cmd::Render { input, out } => render(&input, &out),
    }
}

fn dc_gen(n: usize, with_apex: bool, out: &Path) -> anyhow::Result<()> {
    let dc = build_double_chain(n)?;
    let poly = if with_apex { dc.polygon_pdp(&dc.default_apex())? } else { dc.polygon_pd() };
    let (tu, tl) = poly.extreme_triangulations();
    fs::create_dir_all(out)?;
    write(&out.join("polygon.txt"), &io::write_polygon(&poly.polygon))?;
    write(&out.join("tu.txt"), &io::write_triangulation(&tu, "polygon.txt"))?;
    write(&out.join("tl.txt"), &io::write_triangulation(&tl, "polygon.txt"))?;
    println!("vertices {}", poly.polygon.len());
    Ok(())
}

fn flipdist(polygon: &Path, a: &Path, b: &Path, max_depth: usize, out: Option<&Path>) -> anyhow::Result<()> {
    let poly = Arc::new(io::parse_polygon(&read(polygon)?)?);
    let ta = io::parse_triangulation(&read(a)?, poly.clone())?;
    let tb = io::parse_triangulation(&read(b)?, poly.clone())?;
    let mut budget = SearchBudget::with_depth(max_depth);
    if let Some(m) = max_states()? {
        budget.max_states = m;
    }
    let res = flip_distance(&poly, &ta, &tb, budget)?;
    match (res.distance, res.witness) {
        (Some(d), Some(w)) => {
            println!("distance {d}");
            if let Some(out) = out {
                write(out, &io::write_flips(&w.flips))?;
            }
        }
        _ => println!("budget exceeded after {} states", res.states_expanded),
    }
    Ok(())
}

fn rsa_solve(input: &Path, out: Option<&Path>, max_sinks: usize) -> anyhow::Result<()> {
    let (s, k) = io::parse_sinks(&read(input)?)?;
    let a = rsa::solve_exact_with_cap(&s, max_sinks)?;
    println!("length {}", a.length());
    if let Some(k) = k {
        println!("within k {}", if a.length() <= k { "yes" } else { "no" });
    }
    if let Some(out) = out {
        write(out, &io::write_arborescence(&a))?;
    }
    Ok(())
}

fn rsa_perturb(input: &Path, out: &Path) -> anyhow::Result<()> {
    let (s, k) = io::parse_sinks(&read(input)?)?;
    let k = k.ok_or_else(|| anyhow!("{} has no budget k in its header", input.display()))?;
    let (s2, k2) = rsa::perturb_to_yrsa(&s, k);
    write(out, &io::write_sinks(&s2, Some(k2)))?;
    println!("k {k2}");
    Ok(())
}

fn rsa_random(input: &Path, seed: u64, out: &Path) -> anyhow::Result<()> {
    let (s, _) = io::parse_sinks(&read(input)?)?;
    let a = rsa::random_arborescence(&s, &mut ChaCha8Rng::seed_from_u64(seed));
    write(out, &io::write_arborescence(&a))?;
    println!("length {}", a.length());
    Ok(())
}

fn reduce(input: &Path, beta: Option<usize>, d: Option<usize>, allow: bool, out: &Path) -> anyhow::Result<()> {
    let (s, k) = io::parse_sinks(&read(input)?)?;
    let k = k.ok_or_else(|| anyhow!("{} has no budget k in its header", input.display()))?;
    let def = ReductionParams::defaults(&s);
    let params = match (beta, d, allow) {
        (None, None, _) => def,
        (_, _, false) => return Err(usage("--beta and --d require --override")),
        (b, dd, true) => ReductionParams::custom(b.unwrap_or(def.beta), dd.unwrap_or(def.d)),
    };
    let inst = build_instance(&s, k, params)?;
    fs::create_dir_all(out)?;
    let files = [
        ("sinks", "yrsa.txt", io::write_sinks(&s, Some(k))),
        ("polygon", "polygon.txt", io::write_polygon(&inst.polygon)),
        ("t1", "t1.txt", io::write_triangulation(&inst.t1, "polygon.txt")),
        ("t2", "t2.txt", io::write_triangulation(&inst.t2, "polygon.txt")),
    ];
    let mut entries = Vec::new();
    for (role, name, text) in files {
        write(&out.join(name), &text)?;
        entries.push(ManifestFile { role: role.into(), path: name.into(), sha256: io::sha256_hex(text.as_bytes()) });
    }
    let manifest = Manifest {
        beta: inst.params.beta,
        d: inst.params.d,
        sinks: s.len(),
        grid: reduction::grid_size(&s),
        k,
        budget: inst.budget_l,
        provenance: if inst.params.is_override(&s) { Provenance::Override } else { Provenance::Default },
        files: entries,
    };
    write(&out.join("manifest.json"), &manifest.to_json())?;
    println!("vertices {}", inst.polygon.len());
    println!("budget {}", inst.budget_l);
    Ok(())
}

/// Rebuilds the instance recorded in `dir` and checks it against the files.
fn load_instance(dir: &Path) -> anyhow::Result<PolyFlipInstance> {
    let manifest = Manifest::from_json(&read(&dir.join("manifest.json"))?)?;
    let bad = manifest.mismatches(dir)?;
    if !bad.is_empty() {
        bail!("checksum mismatch: {}", bad.join(", "));
    }
    let file = |role: &str| {
        manifest.files.iter().find(|f| f.role == role).map(|f| dir.join(&f.path)).ok_or_else(|| anyhow!("manifest lists no {role} file"))
    };
    let (s, _) = io::parse_sinks(&read(&file("sinks")?)?)?;
    let params = match manifest.provenance {
        Provenance::Default => ReductionParams::defaults(&s),
        Provenance::Override => ReductionParams::custom(manifest.beta, manifest.d),
    };
    let inst = build_instance(&s, manifest.k, params)?;
    if io::write_polygon(&inst.polygon) != read(&file("polygon")?)? {
        bail!("polygon file does not match the recorded parameters");
    }
    let t1 = io::parse_triangulation(&read(&file("t1")?)?, inst.polygon.clone())?;
    let t2 = io::parse_triangulation(&read(&file("t2")?)?, inst.polygon.clone())?;
    if t1 != inst.t1 || t2 != inst.t2 {
        bail!("triangulation files do not match the recorded parameters");
    }
    if inst.budget_l != manifest.budget || !manifest.budget_matches() {
        bail!("recorded budget {} does not match the parameters", manifest.budget);
    }
    Ok(inst)
}

fn convert_rsa_to_flips(dir: &Path, input: &Path, out: &Path) -> anyhow::Result<()> {
    let inst = load_instance(dir)?;
    let a = io::parse_arborescence(&read(input)?)?;
    let seq = rsa_to_flips(&a, &inst)?;
    let end = seq.replay()?;
    write(out, &io::write_flips(&seq.flips))?;
    println!("arborescence length {}", a.length());
    println!("flips {}", seq.len());
    println!("budget {}", inst.budget_l);
    println!("ends at T2 {}", if end == inst.t2 { "yes" } else { "no" });
    Ok(())
}

fn convert_flips_to_rsa(dir: &Path, input: &Path, out: &Path, trace: Option<&Path>) -> anyhow::Result<()> {
    let inst = load_instance(dir)?;
    let flips = io::parse_flips(&read(input)?)?;
    let seq = FlipSequence { start: inst.t1.clone(), flips };
    let r = flips_to_rsa_report(&seq, &inst)?;
    write(out, &io::write_arborescence(&r.arborescence))?;
    if let Some(t) = trace {
        write(t, &io::write_trace(&trace_of(&inst.plus(), &r.decomposition.sigma1)?))?;
    }
    println!("flips {}", seq.len());
    println!("plus flips {}", r.decomposition.sigma1.len());
    println!("gadget flips {}", r.decomposition.sigma_s.iter().map(FlipSequence::len).sum::<usize>());
    println!("silent flips {}", r.decomposition.silent_flips());
    println!("trace cost {}", r.trace_cost);
    println!("boxes {}", r.boxes);
    println!("box-free cost {}", r.eliminated_cost);
    println!("scaled tree length {}", r.scaled_tree_length);
    println!("arborescence length {}", r.arborescence.length());
    println!("within k {}", if r.within_k { "yes" } else { "no" });
    Ok(())
}

fn report(violations: &[String]) -> anyhow::Result<()> {
    for v in violations {
        println!("violation: {v}");
    }
    println!("violations {}", violations.len());
    if violations.is_empty() {
        Ok(())
    } else {
        bail!("{} violation(s)", violations.len())
    }
}

fn verify(args: &VerifyArgs) -> anyhow::Result<()> {
    let path = &args.path;
    if path.is_dir() || path.file_name().is_some_and(|n| n == "manifest.json") {
        let dir = if path.is_dir() { path.clone() } else { path.parent().unwrap_or(Path::new(".")).to_path_buf() };
        let inst = load_instance(&dir)?;
        println!("vertices {}", inst.polygon.len());
        println!("budget {}", inst.budget_l);
        return report(&verify_instance(&inst).reasons);
    }
    let text = read(path)?;
    match kind_of(&text) {
        Some("polygon") => {
            let p: SimplePolygon = io::parse_polygon(&text)?;
            println!("vertices {}", p.len());
            report(&[])
        }
        Some("triangulation") => {
            let t = load_triangulation(path)?;
            println!("diagonals {}", t.diagonals().len());
            report(&t.validate().reasons)
        }
        Some("flips") => {
            let flips = io::parse_flips(&text)?;
            let (start, target) = match (&args.start, &args.instance) {
                (Some(s), None) => (load_triangulation(s)?, None),
                (None, Some(dir)) => {
                    let inst = load_instance(dir)?;
                    (inst.t1.clone(), Some(inst.t2))
                }
                _ => return Err(usage("a flips file needs exactly one of --start or --instance")),
            };
            let seq = FlipSequence { start, flips };
            println!("flips {}", seq.len());
            let mut v = Vec::new();
            match seq.replay() {
                Ok(end) if target.as_ref().is_some_and(|t| *t != end) => v.push("sequence does not end at T2".into()),
                Ok(_) => {}
                Err(e) => v.push(e.to_string()),
            }
            report(&v)
        }
        Some("yrsa") => {
            let (s, k) = io::parse_sinks(&text)?;
            println!("sinks {}", s.len());
            println!("yrsa {}", if s.is_yrsa() { "yes" } else { "no" });
            if let Some(k) = k {
                println!("k {k}");
            }
            report(&[])
        }
        Some("rsa") => {
            let a: Arborescence = io::parse_arborescence(&text)?;
            let sinks = args.sinks.as_ref().ok_or_else(|| usage("an rsa file needs --sinks"))?;
            let (s, _) = io::parse_sinks(&read(sinks)?)?;
            println!("length {}", a.length());
            report(&rsa::validate_arborescence(&a, &s).reasons)
        }
        Some("trace") => {
            let t = io::parse_trace(&text)?;
            println!("cost {}", t.cost());
            println!("boxes {}", t.boxes.len());
            report(&[])
        }
        _ => bail!("{}: unrecognised file kind", path.display()),
    }
}

fn render(input: &Path, out: &Path) -> anyhow::Result<()> {
    let text = read(input)?;
    let doc = match kind_of(&text) {
        Some("polygon") => svg::polygon_svg(&io::parse_polygon(&text)?),
        Some("triangulation") => svg::triangulation_svg(&load_triangulation(input)?),
        Some("trace") => svg::trace_svg(&io::parse_trace(&text)?),
        Some("rsa") => svg::arborescence_svg(&io::parse_arborescence(&text)?),
        _ => bail!("{}: cannot render this file kind", input.display()),
    };
    write(out, &doc)
}
