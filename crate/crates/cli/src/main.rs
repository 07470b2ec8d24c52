use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use graphon_cli::bench::{
    emit_matrix_grid, emit_results, run_campaign, CampaignConfig, Method,
    OutputFormat, Rho,
};
use graphon_cli::edgelist::parse_edge_list;
use graphon_cli::CliError;
use graphon_core::graphon::{sample_latents, GraphonSpec, LatentSample};
use graphon_core::matrix::Matrix;
use graphon_core::metrics::compute_metrics;
use graphon_core::rank1::{estimate_p_rank1, fit_rank1, reconstruct_graphon_rank1, Rank1Fit};
use graphon_core::rankr::{
    estimate_p_rankr, reconstruct_graphon_rankr, Counting, FitKind, RankRFit,
};
use graphon_core::select::{select_rank, RankSelectionTrace};

#[derive(Parser)]
#[command(name = "graphon", about = "Low-rank graphon estimation from a single network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a network from a builtin graphon and write it as an edge list
    Simulate(SimulateArgs),
    /// Estimate the connection probability matrix (and graphon) from an edge list
    Estimate(EstimateArgs),
    /// Run eigenvalue-ratio rank selection on an edge list
    SelectRank(SelectRankArgs),
    /// Run a simulation benchmark campaign
    Bench(BenchArgs),
}

fn parse_rho(s: &str) -> Result<Rho, String> {
    match s {
        "1" => Ok(Rho::Dense),
        "auto-sparse" => Ok(Rho::AutoSparse),
        _ => Err("expected '1' or 'auto-sparse'".into()),
    }
}

fn parse_counting(s: &str) -> Result<Counting, String> {
    match s {
        "exact" => Ok(Counting::Exact),
        "fast" => Ok(Counting::Fast),
        "corrected" => Ok(Counting::Corrected),
        _ => Err("expected 'exact', 'fast' or 'corrected'".into()),
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    match s {
        "rank1" => Ok(Method::Rank1),
        "rankr" => Ok(Method::Rankr),
        "power_iteration" => Ok(Method::PowerIteration),
        _ => Err("expected 'rank1', 'rankr' or 'power_iteration'".into()),
    }
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        _ => Err("expected 'csv' or 'json'".into()),
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Builtin graphon id (1..7)
    #[arg(long)]
    graphon: u32,
    #[arg(long)]
    n: usize,
    /// Sparsity regime: '1' (dense) or 'auto-sparse' (n^-1/2)
    #[arg(long, default_value = "1", value_parser = parse_rho)]
    rho: Rho,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge-list output path
    #[arg(long)]
    output: PathBuf,
    /// Also write the latent positions, one per line
    #[arg(long)]
    latents_output: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    /// Edge-list input path
    #[arg(long)]
    input: PathBuf,
    /// Model rank (mutually exclusive with --auto-rank)
    #[arg(long, conflicts_with = "auto_rank")]
    rank: Option<usize>,
    /// Select the rank by the eigenvalue-ratio rule
    #[arg(long)]
    auto_rank: bool,
    /// Ratio threshold for --auto-rank
    #[arg(long, default_value_t = 0.2)]
    tau: f64,
    /// Rank cap for --auto-rank
    #[arg(long, default_value_t = 8)]
    max_rank: usize,
    #[arg(long, default_value = "corrected", value_parser = parse_counting)]
    counting: Counting,
    /// Resolution for the reconstructed-graphon grid file (0 = skip)
    #[arg(long, default_value_t = 200)]
    grid: usize,
    /// Output path prefix
    #[arg(long, default_value = "estimate")]
    output: PathBuf,
    /// True latent positions (labels must be integer node indices);
    /// enables metrics against --graphon
    #[arg(long)]
    oracle_latents: Option<PathBuf>,
    /// Builtin graphon id providing ground truth for --oracle-latents
    #[arg(long)]
    graphon: Option<u32>,
    #[arg(long, default_value = "1", value_parser = parse_rho)]
    rho: Rho,
}

#[derive(Args)]
struct SelectRankArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    tau: f64,
    #[arg(long, default_value_t = 8)]
    max_rank: usize,
    #[arg(long, default_value = "corrected", value_parser = parse_counting)]
    counting: Counting,
    /// Trace output path (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    graphon: u32,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value = "1", value_parser = parse_rho)]
    rho: Rho,
    #[arg(long, default_value = "rankr", value_parser = parse_method)]
    method: Method,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value = "corrected", value_parser = parse_counting)]
    counting: Counting,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: OutputFormat,
    #[arg(long)]
    output: PathBuf,
    /// Record measured wall-clock runtimes (off by default so repeated
    /// runs are byte-identical)
    #[arg(long)]
    timing: bool,
    /// Worker threads (0 = automatic)
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprintln!("{}", CliError::Usage(e.to_string()).to_json());
            std::process::exit(1);
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::SelectRank(args) => cmd_select_rank(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => {}
        Err(e) => {
            eprintln!("{}", e.to_json());
            std::process::exit(e.exit_code());
        }
    }
}

fn build_spec(id: u32, rho: Rho, n: usize) -> Result<GraphonSpec, CliError> {
    Ok(GraphonSpec::builtin(id)?.with_sparsity(rho.value(n))?)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let spec = build_spec(args.graphon, args.rho, args.n)?;
    // same seed split as the campaign driver, so `estimate` on this
    // output reproduces a campaign trial
    let latents = sample_latents(args.n, args.seed * 2)?;
    let adj = spec.sample_graph(&latents, args.seed * 2 + 1)?;
    let mut text = String::new();
    for i in 0..args.n {
        for j in (i + 1)..args.n {
            if adj.has_edge(i, j) {
                text.push_str(&format!("{i} {j}\n"));
            }
        }
    }
    std::fs::write(&args.output, text)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.output.display())))?;
    if let Some(path) = args.latents_output {
        let text: String = latents.values().iter().map(|v| format!("{v}\n")).collect();
        std::fs::write(&path, text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn trace_json(trace: &RankSelectionTrace) -> serde_json::Value {
    serde_json::json!({
        "tau": trace.tau,
        "max_rank": trace.max_rank,
        "selected_r": trace.selected_r,
        "hit_max_rank": trace.hit_max_rank,
        "steps": trace.steps.iter().map(|s| serde_json::json!({
            "k": s.k,
            "eigenvalues": s.eigenvalues,
            "ratio": s.ratio,
        })).collect::<Vec<_>>(),
    })
}

fn cmd_select_rank(args: SelectRankArgs) -> Result<(), CliError> {
    let graph = parse_edge_list(&args.input)?;
    let trace = select_rank(&graph.adjacency, args.tau, args.max_rank, args.counting)
        .map_err(|f| CliError::Solver(format!("{} (after {} steps)", f.error, f.steps.len())))?;
    let text = serde_json::to_string_pretty(&trace_json(&trace))
        .map_err(|e| CliError::Data(e.to_string()))?;
    match args.output {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?,
        None => println!("{text}"),
    }
    Ok(())
}

enum Reconstruction {
    Rank1(Rank1Fit),
    RankR(RankRFit),
}

impl Reconstruction {
    fn eval(&self, u: f64, v: f64) -> Result<f64, CliError> {
        match self {
            Reconstruction::Rank1(fit) => Ok(reconstruct_graphon_rank1(fit, u, v)?),
            Reconstruction::RankR(fit) => Ok(reconstruct_graphon_rankr(fit, u, v)?),
        }
    }
}

fn read_latents(path: &PathBuf, labels: &[String]) -> Result<LatentSample, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let all: Vec<f64> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    // align by label: each label must be an integer index into the file
    let mut values = Vec::with_capacity(labels.len());
    for label in labels {
        let idx: usize = label.parse().map_err(|_| {
            CliError::Data(format!("label '{label}' is not an integer node index"))
        })?;
        let v = all.get(idx).ok_or_else(|| {
            CliError::Data(format!("latent index {idx} out of range ({} latents)", all.len()))
        })?;
        values.push(*v);
    }
    Ok(LatentSample::from_values(values)?)
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), CliError> {
    let graph = parse_edge_list(&args.input)?;
    let adj = &graph.adjacency;
    let n = adj.n();
    let mut trace = None;
    let rank = if args.auto_rank {
        let t = select_rank(adj, args.tau, args.max_rank, args.counting)
            .map_err(|f| CliError::Solver(format!("{} (after {} steps)", f.error, f.steps.len())))?;
        let r = t.selected_r;
        trace = Some(t);
        r
    } else {
        args.rank.ok_or_else(|| CliError::Usage("either --rank or --auto-rank is required".into()))?
    };
    if rank < 1 {
        return Err(CliError::Usage("rank must be at least 1".into()));
    }
    let (p_hat, reconstruction, model_json) = if rank == 1 {
        let fit = fit_rank1(adj)?;
        let p = estimate_p_rank1(&fit);
        let j = serde_json::json!({ "method": "rank1", "c1": fit.c1 });
        (p, Reconstruction::Rank1(fit), j)
    } else {
        let res = estimate_p_rankr(adj, rank, args.counting)?;
        let FitKind::RankR(fit) = res.fit else { unreachable!() };
        let j = serde_json::json!({
            "method": "rankr",
            "eigenvalues": fit.spectral.eigenvalues,
            "integrals": fit.spectral.integrals,
            "integrals_clamped": fit.spectral.diagnostics.integrals_clamped,
        });
        (res.p_hat, Reconstruction::RankR(fit), j)
    };

    let mut summary = serde_json::json!({
        "nodes": n,
        "edges": adj.edge_count(),
        "self_loops_dropped": graph.self_loops_dropped,
        "duplicate_edges": graph.duplicate_edges,
        "rank": rank,
        "model": model_json,
        "node_order": "input label order",
        "node_labels": graph.node_labels,
    });
    if let Some(t) = &trace {
        summary["rank_selection"] = trace_json(t);
    }

    if let (Some(latents_path), Some(id)) = (&args.oracle_latents, args.graphon) {
        let latents = read_latents(latents_path, &graph.node_labels)?;
        let spec = build_spec(id, args.rho, n)?;
        let p_true = spec.probability_matrix(&latents)?;
        let m = compute_metrics(&p_hat, &p_true)?;
        summary["metrics"] = serde_json::json!({ "mse": m.mse, "max_error": m.max_error });
    }

    let phat_path = args.output.with_extension("phat.csv");
    emit_matrix_grid(&p_hat, &phat_path)?;
    if args.grid > 0 {
        let g = args.grid;
        let mut f = Matrix::zeros(g);
        for i in 0..g {
            let u = (i as f64 + 0.5) / g as f64;
            for j in 0..g {
                let v = (j as f64 + 0.5) / g as f64;
                f.set(i, j, reconstruction.eval(u, v)?);
            }
        }
        emit_matrix_grid(&f, &args.output.with_extension("graphon.csv"))?;
    }
    let json_path = args.output.with_extension("json");
    let text =
        serde_json::to_string_pretty(&summary).map_err(|e| CliError::Data(e.to_string()))?;
    std::fs::write(&json_path, text)
        .map_err(|e| CliError::Data(format!("{}: {e}", json_path.display())))?;
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let config = CampaignConfig {
        graphon_id: args.graphon,
        n: args.n,
        rho: args.rho,
        trials: args.trials,
        method: args.method,
        r: args.r,
        counting: args.counting,
        base_seed: args.seed,
        timing: args.timing,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let campaign = pool.install(|| run_campaign(&config))?;
    emit_results(&campaign, &args.output, args.format)?;
    Ok(())
}
