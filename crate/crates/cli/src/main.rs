use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fpphe::fpp::{classify_outcome, run_fpphe, PassageTimeField, SeedField, StopRule, Trace};
use fpphe::geometry::{
    build_cylinder, build_escape_ray, delta_thin_estimate, detour_length, embed_binary_tree,
    EmbedConfig, EmbeddedTree, EscapeRay,
};
use fpphe::graph::{generate_lattice, GraphDoc};
use fpphe::mdla::{run_mdla, MdlaState, MdlaStop};
use fpphe::multiscale::{
    analyze_good_paths, check_ball_chain_events, check_good_cylinder, derive_scale_params,
    plan_ball_chain, CheckBudgets, CylinderVerdict, ScaleParams,
};
use fpphe::persist::{load, save, to_json, Persist};
use fpphe::{Graph, Real};
use fpphe_cli::figures::{growth_figures, mdla_figures, GrowthFigureConfig, MdlaFigureConfig};
use fpphe_cli::render::{render_mdla_png, render_mdla_svg, render_trace_png, render_trace_svg};
use fpphe_cli::sweep::{sweep, write_outputs, SweepSpec};
use fpphe_cli::{CliError, GraphRef, RenderStyle, Result};

#[derive(Parser)]
#[command(
    name = "fpphe",
    version,
    about = "First passage percolation in a hostile environment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it as JSON.
    Graph(GraphArgs),
    /// Geometric measurements on a saved graph.
    #[command(subcommand)]
    Geom(Geom),
    /// Derive multi-scale constants and write them as JSON.
    Params(ParamsArgs),
    /// Run FPPHE once.
    Run(RunArgs),
    /// Run multi-particle diffusion limited aggregation on a 2D box.
    Mdla(MdlaArgs),
    /// Multi-scale analysis of a sample.
    #[command(subcommand)]
    Analyze(Analyze),
    /// Survival frequencies over a (lambda, mu) grid.
    Sweep(SweepArgs),
    /// Draw a saved trace or MDLA state as SVG or PNG.
    Render(RenderArgs),
    /// Regenerate the growth pictures and MDLA snapshots.
    Figures(FiguresArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// tree, t3, lattice, free or tess
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 3)]
    p: usize,
    #[arg(long, default_value_t = 7)]
    q: usize,
    #[arg(long, default_value_t = 6)]
    layers: usize,
    #[arg(long, default_value_t = 2)]
    branching: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Depth or radius of the ball.
    #[arg(long, default_value_t = 10)]
    radius: usize,
    /// Orders of the cyclic factors, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    factors: Vec<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Geom {
    /// Thin-triangle constant from sampled geodesic triangles.
    Delta {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Size of the width-L cylinder between two vertices.
    Cylinder {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: usize,
        #[arg(long, default_value_t = 0)]
        width: usize,
    },
    /// Shortest path length avoiding a ball.
    Detour {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[arg(long)]
        center: usize,
        #[arg(long)]
        radius: usize,
    },
    /// Embed a complete binary tree.
    Embed {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 2.0)]
        alpha_target: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Escape ray away from the ball of the given radius around the origin.
    Ray {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        occupied_radius: usize,
        #[arg(long)]
        r1: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ParamsArgs {
    #[arg(long)]
    r: usize,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[arg(long)]
    c_in: f64,
    #[arg(long)]
    c_out: f64,
    #[arg(long)]
    lambda: f64,
    /// Distortion; read from --emb when given.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long)]
    emb: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    #[arg(long, default_value_t = 1)]
    pt_seed: u64,
    #[arg(long, default_value_t = 2)]
    seed_seed: u64,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    sample: SampleArgs,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value = "exhaust")]
    stop: String,
    /// Survival radius for the outcome summary.
    #[arg(long)]
    r_survive: Option<usize>,
    /// Simulate in single precision.
    #[arg(long)]
    f32: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MdlaArgs {
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    radius: usize,
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    time: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also draw the final state (.svg or .png).
    #[arg(long)]
    image: Option<PathBuf>,
}

#[derive(Args)]
struct ChainArgs {
    #[command(flatten)]
    sample: SampleArgs,
    #[arg(long)]
    emb: PathBuf,
    #[arg(long)]
    params: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pair_budget: usize,
    #[arg(long, default_value_t = 10_000)]
    path_budget: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Analyze {
    /// Good-cylinder verdicts for every tree pair at one scale.
    Cylinders {
        #[command(flatten)]
        common: ChainArgs,
        #[arg(long, default_value_t = 1)]
        scale: usize,
    },
    /// Pruned tree, good path or blocking cutset.
    Goodpath {
        #[command(flatten)]
        common: ChainArgs,
        #[arg(long)]
        max_scale: usize,
    },
    /// Ball chain along an escape ray and its events.
    Ballchain {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        ray: PathBuf,
        /// Radius of the occupied ball the ray escapes from.
        #[arg(long)]
        occupied_radius: usize,
        #[arg(long)]
        levels: usize,
        #[arg(long)]
        c_out: f64,
        #[arg(long)]
        lambda: f64,
        /// Trace whose passage times drive the events.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the base seed of the spec.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long, conflicts_with = "mdla")]
    trace: Option<PathBuf>,
    /// Graph the trace was run on.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// MDLA state; the 2D box is rebuilt from its size.
    #[arg(long)]
    mdla: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 800)]
    size: u32,
    #[arg(long, default_value_t = 10)]
    bands: usize,
}

#[derive(Args)]
struct FiguresArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 300)]
    box_radius: usize,
    #[arg(long, default_value_t = 280)]
    stop_radius: usize,
    #[arg(long, default_value_t = 80)]
    mdla_radius: usize,
    #[arg(long, default_value_t = 1500)]
    mdla_cap: usize,
}

fn load_graph(path: &Path) -> Result<Graph> {
    GraphRef::File {
        path: path.to_owned(),
    }
    .build()
}

fn emit<T: Persist>(value: &T, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => save(value, p)?,
        None => print!("{}", to_json(value)?),
    }
    Ok(())
}

fn write_image(
    path: &Path,
    svg: impl FnOnce() -> Result<String>,
    png: impl FnOnce() -> Result<image::RgbImage>,
) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("svg") => std::fs::write(path, svg()?)?,
        Some("png") => png()?.save(path)?,
        _ => {
            return Err(CliError::Usage(format!(
                "{} must end in .svg or .png",
                path.display()
            )))
        }
    }
    Ok(())
}

fn graph_cmd(a: GraphArgs) -> Result<()> {
    let r = match a.family.as_str() {
        "tree" => GraphRef::Tree {
            branching: a.branching,
            depth: a.radius,
        },
        "t3" => GraphRef::ThreeRegular { radius: a.radius },
        "lattice" => GraphRef::Lattice {
            dim: a.dim,
            radius: a.radius,
        },
        "free" => GraphRef::FreeProduct {
            factors: a.factors,
            radius: a.radius,
        },
        "tess" => GraphRef::Tessellation {
            p: a.p,
            q: a.q,
            layers: a.layers,
        },
        f => {
            return Err(CliError::Usage(format!(
                "unknown family '{f}'; expected tree, t3, lattice, free or tess"
            )))
        }
    };
    let g = r.build()?;
    save(&GraphDoc::from(&g), &a.out)?;
    eprintln!(
        "{} vertices, {} edges, {} frontier",
        g.vertex_count(),
        g.edge_count(),
        g.frontier().count()
    );
    Ok(())
}

fn geom_cmd(cmd: Geom) -> Result<()> {
    match cmd {
        Geom::Delta {
            graph,
            samples,
            seed,
        } => {
            let est = delta_thin_estimate(&load_graph(&graph)?, samples, seed)?;
            println!("{}", serde_json::to_string_pretty(&est)?);
        }
        Geom::Cylinder { graph, x, y, width } => {
            let c = build_cylinder(&load_graph(&graph)?, x, y, width)?;
            println!(
                "size={} frontier_touched={}",
                c.members.len(),
                c.frontier_touched
            );
        }
        Geom::Detour {
            graph,
            a,
            b,
            center,
            radius,
        } => {
            let g = load_graph(&graph)?;
            match detour_length(&g, a, b, &g.ball(center, radius))? {
                Some(d) => println!("{d}"),
                None => println!("inf"),
            }
        }
        Geom::Embed {
            graph,
            r,
            depth,
            alpha_target,
            out,
        } => {
            let cfg = EmbedConfig {
                alpha_target,
                ..EmbedConfig::default()
            };
            let emb = embed_binary_tree(&load_graph(&graph)?, r, depth, &cfg)?;
            eprintln!("alpha={} kappa={}", emb.alpha, emb.kappa);
            save(&emb, out)?;
        }
        Geom::Ray {
            graph,
            occupied_radius,
            r1,
            steps,
            delta,
            out,
        } => {
            let g = load_graph(&graph)?;
            let ray = build_escape_ray(&g, &g.ball(g.origin(), occupied_radius), r1, steps, delta)?;
            eprintln!("{} of {} steps", ray.steps_completed(), ray.steps_requested);
            save(&ray, out)?;
        }
    }
    Ok(())
}

fn params_cmd(a: ParamsArgs) -> Result<()> {
    let alpha = match &a.emb {
        Some(p) => load::<EmbeddedTree>(p)?.alpha,
        None => a.alpha,
    };
    let p = derive_scale_params(a.r, a.eps, a.c_in, a.c_out, a.lambda, alpha)?;
    eprintln!("beta={} eta={} flags={:?}", p.beta, p.eta, p.flags);
    save(&p, a.out)?;
    Ok(())
}

fn run_typed<T: Real>(a: &RunArgs, g: &Graph) -> Result<()>
where
    Trace<T>: Persist,
{
    let s = &a.sample;
    let stop: StopRule<T> = a.stop.parse()?;
    let trace = run_fpphe(
        g,
        T::from_f64_lossy(a.lambda),
        &PassageTimeField::new(s.pt_seed),
        &SeedField::new(s.seed_seed, s.mu),
        stop,
    )?;
    eprintln!(
        "occupied={} lambda_clusters={} stop={:?} frontier_touched={}",
        trace.occupied_count(),
        trace.clusters.len(),
        trace.stop_reason,
        trace.frontier_touched
    );
    if let Some(r) = a.r_survive {
        match classify_outcome(&trace, r, Some(g)) {
            Ok(o) => eprintln!(
                "fpp1_survives={} fppl_survives={} coexist={} extinction={}",
                o.fpp1_survives,
                o.fppl_survives,
                o.coexist(),
                o.extinction
            ),
            Err(e) => eprintln!("no outcome: {e}"),
        }
    }
    if let Some(out) = &a.out {
        save(&trace, out)?;
    }
    Ok(())
}

fn run_cmd(a: RunArgs) -> Result<()> {
    let g = load_graph(&a.sample.graph)?;
    if a.f32 {
        run_typed::<f32>(&a, &g)
    } else {
        run_typed::<f64>(&a, &g)
    }
}

fn mdla_cmd(a: MdlaArgs) -> Result<()> {
    let stop = match (a.cap, a.time) {
        (Some(c), None) => MdlaStop::AggregateCap(c),
        (None, Some(t)) => MdlaStop::Time(t),
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --cap and --time".into(),
            ))
        }
    };
    let g = generate_lattice(2, a.radius)?;
    let st = run_mdla(&g, a.rho, a.seed, stop)?;
    eprintln!(
        "aggregate={} time={} frontier_touched={}",
        st.aggregate_size(),
        st.time,
        st.frontier_touched
    );
    let style = RenderStyle::default();
    if let Some(img) = &a.image {
        write_image(
            img,
            || render_mdla_svg(&g, &st, &style),
            || render_mdla_png(&g, &st, &style),
        )?;
    }
    emit(&st, a.out.as_deref())
}

fn tree_pairs(emb: &EmbeddedTree, scale: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for x in 1..=emb.size() {
        let gen = EmbeddedTree::generation(x);
        if gen + scale > emb.depth {
            continue;
        }
        for y in EmbeddedTree::generation_range(gen + scale) {
            if EmbeddedTree::is_ancestor(x, y) {
                pairs.push((x, y));
            }
        }
    }
    pairs
}

fn analyze_cmd(cmd: Analyze) -> Result<()> {
    match cmd {
        Analyze::Cylinders { common: c, scale } => {
            let g = load_graph(&c.sample.graph)?;
            let emb: EmbeddedTree = load(&c.emb)?;
            let params: ScaleParams<f64> = load(&c.params)?;
            let budgets = CheckBudgets {
                sandwich_pairs: c.pair_budget,
                paths: c.path_budget,
                rng_seed: 0,
            };
            let pt = PassageTimeField::new(c.sample.pt_seed);
            let seeds = SeedField::new(c.sample.seed_seed, c.sample.mu);
            let verdicts = tree_pairs(&emb, scale)
                .into_iter()
                .map(|(x, y)| check_good_cylinder(&g, &emb, &seeds, &pt, x, y, &params, &budgets))
                .collect::<fpphe::Result<Vec<CylinderVerdict>>>()?;
            eprintln!(
                "{} of {} good",
                verdicts.iter().filter(|v| v.good).count(),
                verdicts.len()
            );
            emit(&verdicts, c.out.as_deref())
        }
        Analyze::Goodpath {
            common: c,
            max_scale,
        } => {
            let g = load_graph(&c.sample.graph)?;
            let emb: EmbeddedTree = load(&c.emb)?;
            let params: ScaleParams<f64> = load(&c.params)?;
            let budgets = CheckBudgets {
                sandwich_pairs: c.pair_budget,
                paths: c.path_budget,
                rng_seed: 0,
            };
            let pt = PassageTimeField::new(c.sample.pt_seed);
            let seeds = SeedField::new(c.sample.seed_seed, c.sample.mu);
            let res = analyze_good_paths(&g, &emb, &seeds, &pt, &params, &budgets, max_scale)?;
            match &res.path {
                Some(p) => eprintln!("good path of length {}", p.len()),
                None => eprintln!(
                    "blocked by a cutset of {} vertices",
                    res.cutset.as_ref().map_or(0, |c| c.len())
                ),
            }
            emit(&res, c.out.as_deref())
        }
        Analyze::Ballchain {
            sample,
            ray,
            occupied_radius,
            levels,
            c_out,
            lambda,
            trace,
            out,
        } => {
            let g = load_graph(&sample.graph)?;
            let ray: EscapeRay = load(&ray)?;
            let occupied = g.ball(g.origin(), occupied_radius);
            let plan = plan_ball_chain(&g, &ray, &occupied, ray.r1, levels, c_out)?;
            let pt = PassageTimeField::new(sample.pt_seed);
            let trace: Trace<f64> = match trace {
                Some(p) => load(&p)?,
                None => run_fpphe(
                    &g,
                    lambda,
                    &pt,
                    &SeedField::new(sample.seed_seed, sample.mu),
                    StopRule::OccupiedCap(1),
                )?,
            };
            let events = check_ball_chain_events(&g, &trace, &plan, &pt, lambda)?;
            eprintln!(
                "all_hold={} first_failure={:?}",
                events.all_hold, events.first_failure
            );
            if let Some(o) = &out {
                save(&plan, o.with_extension("plan.json"))?;
            }
            emit(&events, out.as_deref())
        }
    }
}

fn sweep_cmd(a: SweepArgs) -> Result<()> {
    let mut spec = SweepSpec::from_file(&a.spec)?;
    if let Some(s) = a.seed {
        spec.base_seed = s;
    }
    let (res, timing) = sweep(&spec)?;
    write_outputs(&res, &timing, &a.out)?;
    for c in res.cells.iter().filter(|c| !c.usable) {
        eprintln!(
            "cell lambda={} mu={} unusable: every run reached the frontier",
            c.lambda, c.mu
        );
    }
    eprintln!(
        "{} cells in {:.2}s on {} threads",
        res.cells.len(),
        timing.total_seconds,
        timing.threads
    );
    Ok(())
}

fn render_cmd(a: RenderArgs) -> Result<()> {
    let style = RenderStyle {
        size: a.size,
        bands: a.bands,
    };
    match (a.trace, a.mdla) {
        (Some(t), None) => {
            let graph = a
                .graph
                .ok_or_else(|| CliError::Usage("--trace needs --graph".into()))?;
            let g = load_graph(&graph)?;
            let trace: Trace<f64> = load(&t)?;
            write_image(
                &a.out,
                || Ok(render_trace_svg(&g, &trace, &style)?.0),
                || render_trace_png(&g, &trace, &style),
            )
        }
        (None, Some(m)) => {
            let st: MdlaState<f64> = load(&m)?;
            let side = (st.sites.len() as f64).sqrt().round() as usize;
            if side * side != st.sites.len() || side.is_multiple_of(2) {
                return Err(CliError::Render("MDLA state is not a square 2D box".into()));
            }
            let g = generate_lattice(2, side / 2)?;
            write_image(
                &a.out,
                || render_mdla_svg(&g, &st, &style),
                || render_mdla_png(&g, &st, &style),
            )
        }
        _ => Err(CliError::Usage(
            "give exactly one of --trace and --mdla".into(),
        )),
    }
}

fn figures_cmd(a: FiguresArgs) -> Result<()> {
    let growth = GrowthFigureConfig {
        box_radius: a.box_radius,
        stop_radius: a.stop_radius,
        ..Default::default()
    };
    let mdla = MdlaFigureConfig {
        box_radius: a.mdla_radius,
        aggregate_cap: a.mdla_cap,
        ..Default::default()
    };
    let mut all = growth_figures(&a.out, &growth)?;
    all.extend(mdla_figures(&a.out, &mdla)?);
    for f in &all {
        eprintln!("{} {:?}", f.svg.display(), f.summary);
    }
    std::fs::write(
        a.out.join("figures.json"),
        serde_json::to_string_pretty(&all)? + "\n",
    )?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Graph(a) => graph_cmd(a),
        Command::Geom(g) => geom_cmd(g),
        Command::Params(a) => params_cmd(a),
        Command::Run(a) => run_cmd(a),
        Command::Mdla(a) => mdla_cmd(a),
        Command::Analyze(a) => analyze_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Render(a) => render_cmd(a),
        Command::Figures(a) => figures_cmd(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
