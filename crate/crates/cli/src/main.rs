//! `polyinv`: batch front end for image, preimage and interval analyses of
//! neural networks.
//!
//! Exit status: 0 on success, 1 when `--expect-nonempty` was given and the
//! result is empty, 2 on any input error.

mod plot;
mod sets;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use polyinv::geometry::json;
use polyinv::intervals::{preimage_overapprox_box, DEFAULT_MAX_ITER};
use polyinv::propagate::network_image_union;
use polyinv::{
    forward_backward_contract, preimage_network, preimage_underapprox, Network, PolyUnion,
    SearchOrder,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "polyinv", version, about = "Exact images and preimages of polyhedral sets under neural networks")]
struct Cli {
    /// Worker threads for branch exploration (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for sampling subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Network JSON file.
    #[arg(long)]
    network: PathBuf,

    /// Write the result here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,

    /// Exit with status 1 if the result is empty.
    #[arg(long)]
    expect_nonempty: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Dfs,
    Bfs,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the network at points.
    Eval {
        #[command(flatten)]
        common: Common,
        /// A point such as "[0.5, -1]"; repeatable.
        #[arg(long = "point")]
        points: Vec<String>,
        /// Draw this many uniform points from --box.
        #[arg(long, requires = "sample_box")]
        sample: Option<usize>,
        /// Sampling box for --sample.
        #[arg(long = "box")]
        sample_box: Option<String>,
    },
    /// Exact forward image of an input set.
    Image {
        #[command(flatten)]
        common: Common,
        /// Input set: file, JSON, box "[a,b]x[c,d]" or constraints "{x1<=x2}".
        #[arg(long)]
        set: String,
    },
    /// Exact preimage of an output set.
    Preimage {
        #[command(flatten)]
        common: Common,
        /// Output set: file, JSON, box "[a,b]x[c,d]" or constraints "{y1<=y2}".
        #[arg(long)]
        set: String,
        /// Intersect every part with this input box.
        #[arg(long)]
        clip: Option<String>,
    },
    /// One polyhedron inside the preimage.
    PreimageUnder {
        #[command(flatten)]
        common: Common,
        /// Output set: file, JSON, box "[a,b]x[c,d]" or constraints "{y1<=y2}".
        #[arg(long)]
        set: String,
        #[arg(long, value_enum, default_value = "dfs")]
        strategy: Strategy,
    },
    /// Box over-approximation of the preimage (injective activations).
    PreimageBox {
        #[command(flatten)]
        common: Common,
        /// Output set: file, JSON, box "[a,b]x[c,d]" or constraints "{y1<=y2}".
        #[arg(long)]
        set: String,
    },
    /// Forward-backward interval contraction; writes the per-iteration trace.
    Contract {
        #[command(flatten)]
        common: Common,
        /// Input box X.
        #[arg(long)]
        in_box: String,
        /// Output box Y.
        #[arg(long)]
        out_box: String,
        /// Iteration cap; stops earlier at a fixpoint.
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
    },
    /// Vertex lists of a 1-D or 2-D union, one block per part.
    PlotData {
        /// Union JSON (for example a preimage result).
        #[arg(long)]
        input: PathBuf,
        /// Intersect every part with this box first (needed for unbounded parts).
        #[arg(long)]
        clip: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// What a command produced: the text to write and whether it is empty.
struct Report {
    text: String,
    empty: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("POLYINV_LOG", "error"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("polyinv: error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(k) = cli.threads {
        if k == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let start = Instant::now();
    let (report, output, expect) = match cli.command {
        Command::PlotData { input, clip, output } => {
            let text = fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let set = json::parse_set_str(&text, None)?;
            let clip = clip.map(|c| sets::parse_box_any(&c)).transpose()?;
            let (text, empty) = plot::vertex_blocks(&set, clip.as_ref())?;
            (Report { text, empty }, output, false)
        }
        cmd => {
            let common = match &cmd {
                Command::Eval { common, .. }
                | Command::Image { common, .. }
                | Command::Preimage { common, .. }
                | Command::PreimageUnder { common, .. }
                | Command::PreimageBox { common, .. }
                | Command::Contract { common, .. } => common,
                Command::PlotData { .. } => unreachable!(),
            };
            let net = load_network(&common.network)?;
            let (output, expect) = (common.output.clone(), common.expect_nonempty);
            (analyze(&net, cmd, cli.seed)?, output, expect)
        }
    };
    info!("finished in {:.1} ms", start.elapsed().as_secs_f64() * 1e3);
    match output {
        Some(path) => fs::write(&path, &report.text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", report.text),
    }
    Ok(if expect && report.empty {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn load_network(path: &PathBuf) -> Result<Network> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Network::from_json(&text).with_context(|| format!("loading network {}", path.display()))
}

fn union_report(u: PolyUnion) -> Report {
    info!("result has {} parts", u.len());
    Report {
        empty: u.is_empty(),
        text: json::union_to_json(&u),
    }
}

fn analyze(net: &Network, cmd: Command, seed: u64) -> Result<Report> {
    let (n, m) = (net.input_dim(), net.output_dim());
    Ok(match cmd {
        Command::Eval { points, sample, sample_box, .. } => {
            let mut xs = points
                .iter()
                .map(|p| {
                    let v: serde_json::Value = serde_json::from_str(p).with_context(|| format!("point {p:?}"))?;
                    Ok(json::parse_vector(&v)?)
                })
                .collect::<Result<Vec<_>>>()?;
            if let (Some(k), Some(b)) = (sample, sample_box) {
                let b = sets::parse_box_arg(&b, n)?;
                if b.lo.iter().chain(&b.hi).any(|v| !v.is_finite()) || b.is_empty() {
                    bail!("--box for sampling must be bounded and nonempty");
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..k {
                    xs.push(
                        b.lo.iter()
                            .zip(&b.hi)
                            .map(|(l, h)| if l < h { rng.random_range(*l..*h) } else { *l })
                            .collect(),
                    );
                }
            }
            if xs.is_empty() {
                bail!("eval needs --point or --sample with --box");
            }
            let mut text = String::from("[\n");
            for (i, x) in xs.iter().enumerate() {
                let y = net.eval(x)?;
                text.push_str(&format!("  {{\"x\": {}, \"y\": {}", json::vector(x), json::vector(&y)));
                if m >= 2 {
                    // classes are numbered like the outputs y1, y2, ...
                    text.push_str(&format!(", \"class\": {}", net.classify(x)? + 1));
                }
                text.push_str(if i + 1 < xs.len() { "},\n" } else { "}\n" });
            }
            text.push_str("]\n");
            Report { text, empty: false }
        }
        Command::Image { set, .. } => {
            let x = sets::parse_set_arg(&set, n)?;
            union_report(network_image_union(net, &x)?)
        }
        Command::Preimage { set, clip, .. } => {
            let z = sets::parse_set_arg(&set, m)?;
            let mut pre = preimage_network(&z, net)?;
            if let Some(c) = clip {
                let b = sets::parse_box_arg(&c, n)?;
                pre = pre.intersect_each(&b.to_polyhedron())?;
                let parts = pre
                    .into_parts()
                    .iter()
                    .map(|p| p.remove_redundant())
                    .collect::<polyinv::Result<Vec<_>>>()?;
                pre = PolyUnion::new(n, parts)?;
            }
            union_report(pre)
        }
        Command::PreimageUnder { set, strategy, .. } => {
            let z = sets::parse_set_arg(&set, m)?;
            let order = match strategy {
                Strategy::Dfs => SearchOrder::DepthFirst,
                Strategy::Bfs => SearchOrder::BreadthFirst,
            };
            let parts = preimage_underapprox(&z, net, order)?.into_iter().collect();
            union_report(PolyUnion::new(n, parts)?)
        }
        Command::PreimageBox { set, .. } => {
            let z = sets::parse_set_arg(&set, m)?;
            union_report(preimage_overapprox_box(&z, net)?)
        }
        Command::Contract { in_box, out_box, max_iter, .. } => {
            let x = sets::parse_box_arg(&in_box, n)?;
            let y = sets::parse_box_arg(&out_box, m)?;
            let c = forward_backward_contract(net, &x, &y, max_iter)?;
            info!(
                "{} iterations, converged: {}, empty: {}",
                c.iterations,
                c.converged,
                c.is_empty()
            );
            Report {
                text: c.trace.to_json(),
                empty: c.is_empty(),
            }
        }
        Command::PlotData { .. } => unreachable!("handled without a network"),
    })
}
