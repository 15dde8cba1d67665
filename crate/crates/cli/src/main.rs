use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ggt_core::audit::{run_audit, AuditConfig};
use ggt_core::complex::{check_link_condition, induced_link_map, vertex_link, y_relabeling, TriComplex};
use ggt_core::coset::{enumerate_with, Presentation, Strategy, DEFAULT_CAP};
use ggt_core::embed::{self, search, EmbeddingCertificate, Mode, SearchOptions};
use ggt_core::export::{self, named_graph, Format};
use ggt_core::garside::{
    conjugation_orbit, equals_in_b4, equals_mod_center, normal_form, orbit_period, verify_six_generator_presentation,
    Convention, SixGeneratorFixture,
};
use ggt_core::graph::{self, girth, girth_exhaustive, smooth, MetricGraph};
use ggt_core::reps::{self, braid_perm, pi_assignment, subgroup_closure, summarize};
use ggt_core::words::{dictionary, parse_word, Alphabet, Word};

#[derive(Parser)]
#[command(name = "ggt", version, about = "Exact checks for B4/Z, its subgroup G1 and the complex X1")]
struct Cli {
    /// Also write the machine-readable result to this file.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Coset-table size limit.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Conjugation side and permutation composition order.
    #[arg(long, global = true, default_value = "left")]
    convention: Convention,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Braid words and Garside normal forms.
    #[command(subcommand)]
    Garside(GarsideCmd),
    /// Subgroup indices and representations.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Triangle complexes and their links.
    #[command(subcommand)]
    Complex(ComplexCmd),
    /// Metric graph queries.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Search for locally isometric embeddings between metric graphs.
    Embed(EmbedArgs),
    /// Run the checks (all by default) and report.
    Audit {
        /// Comma-separated check ids.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<String>>,
        /// List the check ids and exit.
        #[arg(long)]
        list: bool,
    },
    /// Write a named fixture to a file.
    Export {
        object: String,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long, short)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum GarsideCmd {
    /// Normal form of a word over a..f, x, y.
    Nf { word: String },
    /// Compare two words in B4, or in B4/Z with --mod-center.
    Eq {
        lhs: String,
        rhs: String,
        #[arg(long)]
        mod_center: bool,
    },
    /// Conjugation orbit of SEED under G.
    Orbit {
        g: String,
        seed: String,
        #[arg(long, default_value_t = 6)]
        steps: usize,
    },
    /// Check the ten relations of the six-generator presentation.
    AuditPresentation {
        /// Use e = a^-1 b a and f = c^-1 b c instead of the printed forms.
        #[arg(long)]
        corrected: bool,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Index of a subgroup by coset enumeration.
    Index {
        /// Fixture name (g0, sl2z) or presentation file.
        #[arg(long)]
        group: String,
        /// Comma-separated subgroup generators.
        #[arg(long, value_delimiter = ',')]
        subgroup: Vec<String>,
        #[arg(long, default_value = "hlt")]
        strategy: Strategy,
        /// Write the coset table as JSON.
        #[arg(long, value_name = "PATH")]
        table: Option<PathBuf>,
    },
    /// Images of the G0 relators under x -> S, y -> -ST.
    Pi,
    /// The S4 image of G1 = <a, y>.
    Perm,
}

#[derive(Subcommand)]
enum ComplexCmd {
    /// Print a complex (fixture name or file).
    Build {
        complex: String,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Link of a vertex.
    Link {
        complex: String,
        #[arg(long)]
        vertex: Option<String>,
        #[arg(long)]
        smooth: bool,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Girth of every vertex link against 2pi.
    Cat0 { complex: String },
}

#[derive(Subcommand)]
enum GraphCmd {
    Girth { graph: String },
    Dist { graph: String, from: String, to: String },
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    /// Enumerate every embedding instead of stopping at the first.
    #[arg(long)]
    all: bool,
    /// Write the search tree as JSON.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
    /// Target automorphisms: a file with one `node=image ...` line per
    /// generator, or `y` for the y-relabeling of the X1-bar link.
    #[arg(long, value_name = "FILE")]
    mod_aut: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn write_json(cli: &Cli, value: &Value) -> Result<()> {
    if let Some(path) = &cli.json {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn braid_word(text: &str) -> Result<Word> {
    let names = Alphabet::new("abcdefxy")?;
    let w = parse_word(text, &names)?;
    Ok(w.substitute(&dictionary::braid_names())?)
}

fn load_graph(name: &str) -> Result<MetricGraph> {
    if let Some(g) = named_graph(name) {
        return Ok(g);
    }
    let text =
        std::fs::read_to_string(name).with_context(|| format!("'{name}' is neither a fixture nor a readable file"))?;
    Ok(MetricGraph::parse(&text)?)
}

fn load_complex(name: &str) -> Result<TriComplex> {
    if let Some(c) = TriComplex::fixture(name) {
        return Ok(c);
    }
    let text =
        std::fs::read_to_string(name).with_context(|| format!("'{name}' is neither a fixture nor a readable file"))?;
    Ok(TriComplex::parse(&text)?)
}

fn load_presentation(name: &str) -> Result<Presentation> {
    if let Some(p) = Presentation::fixture(name) {
        return Ok(p);
    }
    let text =
        std::fs::read_to_string(name).with_context(|| format!("'{name}' is neither a fixture nor a readable file"))?;
    Ok(Presentation::parse(&text)?)
}

fn load_automorphisms(source: &str, dst: &MetricGraph) -> Result<Vec<Vec<usize>>> {
    if source == "y" {
        let map = induced_link_map(dst, &y_relabeling()).ok_or_else(|| anyhow!("target is not a link of X1-bar"))?;
        return Ok(vec![map]);
    }
    let text = std::fs::read_to_string(source).with_context(|| format!("cannot read {source}"))?;
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let pairs: Vec<(&str, &str)> = line
            .split_whitespace()
            .map(|p| p.split_once('=').ok_or_else(|| anyhow!("expected node=image, got '{p}'")))
            .collect::<Result<_>>()?;
        out.push(graph::node_map_from_names(dst, &pairs)?);
    }
    Ok(out)
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Garside(cmd) => garside(cli, cmd),
        Command::Verify(cmd) => verify(cli, cmd),
        Command::Complex(cmd) => complex_cmd(cli, cmd),
        Command::Graph(cmd) => graph_cmd(cli, cmd),
        Command::Embed(args) => embed_cmd(cli, args),
        Command::Audit { only, list } => {
            if *list {
                for id in ggt_core::audit::check_ids() {
                    println!("{id}");
                }
                return Ok(0);
            }
            let config = AuditConfig { convention: cli.convention, cap: cli.cap };
            let report = run_audit(only.as_deref(), &config)?;
            print!("{}", report.to_text());
            write_json(cli, &serde_json::to_value(&report)?)?;
            Ok(report.exit_code() as u8)
        }
        Command::Export { object, format, out } => {
            let format: Format = format.parse()?;
            export::export(object, format, out)?;
            println!("wrote {} ({format:?}) to {}", object, out.display());
            Ok(0)
        }
    }
}

fn garside(cli: &Cli, cmd: &GarsideCmd) -> Result<u8> {
    match cmd {
        GarsideCmd::Nf { word } => {
            let nf = normal_form(&braid_word(word)?)?;
            println!("{nf}");
            write_json(
                cli,
                &json!({ "word": word, "nf": nf.to_string(), "inf": nf.inf(), "canonical_length": nf.canonical_length() }),
            )?;
            Ok(0)
        }
        GarsideCmd::Eq { lhs, rhs, mod_center } => {
            let (l, r) = (braid_word(lhs)?, braid_word(rhs)?);
            let equal = if *mod_center { equals_mod_center(&l, &r)? } else { equals_in_b4(&l, &r)? };
            println!("{}", if equal { "equal" } else { "different" });
            write_json(
                cli,
                &json!({
                    "lhs": lhs, "rhs": rhs, "mod_center": mod_center, "equal": equal,
                    "lhs_nf": normal_form(&l)?.to_string(), "rhs_nf": normal_form(&r)?.to_string(),
                }),
            )?;
            Ok(if equal { 0 } else { 1 })
        }
        GarsideCmd::Orbit { g, seed, steps } => {
            let (gw, sw) = (braid_word(g)?, braid_word(seed)?);
            let orbit = conjugation_orbit(&gw, &sw, *steps, cli.convention)?;
            let period = orbit_period(&gw, &sw, *steps, cli.convention)?;
            println!("convention: {}", cli.convention);
            for (k, nf) in orbit.iter().enumerate() {
                println!("{k}: {nf}");
            }
            match period {
                Some(p) => println!("period {p}"),
                None => println!("no return within {steps} steps"),
            }
            write_json(
                cli,
                &json!({
                    "convention": cli.convention,
                    "orbit": orbit.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
                    "period": period,
                }),
            )?;
            Ok(0)
        }
        GarsideCmd::AuditPresentation { corrected } => {
            let fixture = if *corrected {
                SixGeneratorFixture {
                    d: dictionary::artin(dictionary::D),
                    e: dictionary::artin("Aba"),
                    f: dictionary::artin("Cbc"),
                }
            } else {
                SixGeneratorFixture::printed()
            };
            let entries = verify_six_generator_presentation(&fixture);
            for e in &entries {
                println!("{:<8} {}", e.claim, if e.passed() { "pass" } else { "fail" });
            }
            write_json(cli, &json!({ "corrected": corrected, "entries": entries }))?;
            Ok(if entries.iter().all(|e| e.passed()) { 0 } else { 1 })
        }
    }
}

fn verify(cli: &Cli, cmd: &VerifyCmd) -> Result<u8> {
    match cmd {
        VerifyCmd::Index { group, subgroup, strategy, table } => {
            let p = load_presentation(group)?;
            let gens: Vec<Word> = subgroup.iter().map(|s| parse_word(s, p.alphabet())).collect::<Result<_, _>>()?;
            match enumerate_with(&p, &gens, cli.cap, *strategy) {
                Ok(t) => {
                    println!("index {}", t.count());
                    println!("cosets defined {}", t.total_defined());
                    if let Some(path) = table {
                        std::fs::write(path, serde_json::to_string_pretty(&t.to_json())? + "\n")
                            .with_context(|| format!("cannot write {}", path.display()))?;
                    }
                    write_json(
                        cli,
                        &json!({ "index": t.count(), "defined": t.total_defined(), "table": t.to_json() }),
                    )?;
                    Ok(0)
                }
                Err(e) => {
                    println!("inconclusive: {e}");
                    write_json(cli, &json!({ "index": null, "error": e.to_string() }))?;
                    Ok(2)
                }
            }
        }
        VerifyCmd::Pi => {
            let report = reps::verify_matrix_homomorphism(&Presentation::g0(), &pi_assignment());
            for r in &report {
                let image = r.image.map(|m| m.to_string()).unwrap_or_else(|| r.error.clone().unwrap_or_default());
                println!("{:<24} {image}", r.relator);
            }
            write_json(cli, &json!({ "relators": report }))?;
            let ok = report.iter().all(|r| r.status == ggt_core::garside::ClaimStatus::Pass);
            Ok(if ok { 0 } else { 1 })
        }
        VerifyCmd::Perm => {
            let perm = |s: &str| -> Result<_> {
                Ok(braid_perm(&parse_word(s, &Alphabet::new("abcdefxy")?)?, cli.convention)?)
            };
            let (a, x, y) = (perm("a")?, perm("x")?, perm("y")?);
            let summary = summarize(&subgroup_closure(&[a, y]));
            println!("convention: {}", cli.convention);
            println!("a -> {}  x -> {}  y -> {}", a.cycles_string(), x.cycles_string(), y.cycles_string());
            println!("<a, y>: order {}, fixed points {:?}", summary.order, summary.fixed_points);
            write_json(
                cli,
                &json!({
                    "convention": cli.convention,
                    "a": a.cycles_string(), "x": x.cycles_string(), "y": y.cycles_string(),
                    "summary": summary,
                }),
            )?;
            Ok(if summary.is_point_stabilizer { 0 } else { 1 })
        }
    }
}

fn render_graph(g: &MetricGraph, format: &str, title: &str) -> Result<String> {
    Ok(match format.parse::<Format>()? {
        Format::Dot => g.to_dot(title),
        Format::Json => serde_json::to_string_pretty(&g.to_json())? + "\n",
        Format::Text => g.to_text(),
    })
}

fn complex_cmd(cli: &Cli, cmd: &ComplexCmd) -> Result<u8> {
    match cmd {
        ComplexCmd::Build { complex, format } => {
            let c = load_complex(complex)?;
            match format.parse::<Format>()? {
                Format::Text => print!("{}", c.to_text()),
                Format::Json => println!("{}", serde_json::to_string_pretty(&c.to_json())?),
                Format::Dot => bail!("complexes have no dot rendering"),
            }
            write_json(cli, &c.to_json())?;
            Ok(0)
        }
        ComplexCmd::Link { complex, vertex, smooth: smoothed, format } => {
            let c = load_complex(complex)?;
            let v = match vertex {
                Some(v) => v.clone(),
                None => c.vertices().first().cloned().ok_or_else(|| anyhow!("complex has no vertices"))?,
            };
            let mut link = vertex_link(&c, &v)?;
            if *smoothed {
                link = smooth(&link);
            }
            print!("{}", render_graph(&link, format, &format!("{complex} link at {v}"))?);
            write_json(cli, &link.to_json())?;
            Ok(0)
        }
        ComplexCmd::Cat0 { complex } => {
            let c = load_complex(complex)?;
            let report = check_link_condition(&c);
            for v in &report.vertices {
                let g = v.girth.map(|g| g.to_string()).unwrap_or_else(|| "infinite".into());
                println!("vertex {}: girth {g} ({})", v.vertex, if v.pass { "pass" } else { "fail" });
            }
            println!("link condition: {}", if report.pass { "pass" } else { "fail" });
            write_json(cli, &serde_json::to_value(&report)?)?;
            Ok(if report.pass { 0 } else { 1 })
        }
    }
}

fn graph_cmd(cli: &Cli, cmd: &GraphCmd) -> Result<u8> {
    match cmd {
        GraphCmd::Girth { graph } => {
            let g = load_graph(graph)?;
            let (a, b) = (girth(&g), girth_exhaustive(&g));
            let show =
                |x: Option<ggt_core::angle::PiFraction>| x.map(|x| x.to_string()).unwrap_or_else(|| "infinite".into());
            println!("girth {}", show(a));
            if a != b {
                bail!("girth algorithms disagree: {} vs {}", show(a), show(b));
            }
            write_json(cli, &json!({ "girth": a, "girth_exhaustive": b }))?;
            Ok(0)
        }
        GraphCmd::Dist { graph, from, to } => {
            let g = load_graph(graph)?;
            let d = graph::distance(&g, from, to)?;
            println!("{}", d.map(|d| d.to_string()).unwrap_or_else(|| "infinite".into()));
            write_json(cli, &json!({ "from": from, "to": to, "distance": d }))?;
            Ok(0)
        }
    }
}

fn embed_cmd(cli: &Cli, args: &EmbedArgs) -> Result<u8> {
    let src = load_graph(&args.from)?;
    let dst = load_graph(&args.to)?;
    let automorphisms = match &args.mod_aut {
        Some(source) => load_automorphisms(source, &dst)?,
        None => Vec::new(),
    };
    let opts = SearchOptions {
        mode: if args.all { Mode::All } else { Mode::First },
        automorphisms,
        trace: args.trace.is_some(),
        ..Default::default()
    };
    let outcome = search(&src, &dst, &opts)?;
    let certs: &[EmbeddingCertificate] = &outcome.certificates;
    for c in certs {
        if !embed::verify_certificate(c, &src, &dst) {
            bail!("internal error: search produced an invalid certificate");
        }
    }
    println!(
        "{} embedding(s){}",
        certs.len(),
        if opts.automorphisms.is_empty() { "" } else { " up to the supplied automorphisms" }
    );
    if let Some(c) = certs.first() {
        println!("{}", serde_json::to_string_pretty(&c.to_json(&src, &dst))?);
    }
    if let (Some(path), Some(trace)) = (&args.trace, &outcome.trace) {
        write_file(path, &(serde_json::to_string(trace)? + "\n"))?;
    }
    write_json(
        cli,
        &json!({
            "count": certs.len(),
            "certificates": certs.iter().map(|c| c.to_json(&src, &dst)).collect::<Vec<_>>(),
        }),
    )?;
    Ok(0)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
