mod expr;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use surfmmp::dualgraph::GraphSpec;
use surfmmp::pairs::{check_mmp_redundant_factorization, lct_sigma_estimate, pklt_certificate};
use surfmmp::rational::format_rational;
use surfmmp::scene::{builtin, BUILTIN};
use surfmmp::verify::verify_example;
use surfmmp::{
    enumerate_and_verify, parse_chain, zariski_decompose, DivisorOver, DualGraph, EnumerationMode,
    Error, PairModel, PointSpec, Rational, Scene,
};

/// Exact intersection-theoretic computations on surface models.
#[derive(Parser)]
#[command(name = "surfmmp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SceneArgs {
    /// Scene file or built-in scene name.
    scene: String,
    /// Replace the scene boundary by this combination of curves, e.g. "1/2*E".
    #[arg(long, allow_hyphen_values = true)]
    boundary: Option<String>,
}

impl SceneArgs {
    fn pair(&self) -> Result<PairModel, Error> {
        let pair = load_scene(&self.scene)?.build()?;
        match &self.boundary {
            Some(b) => PairModel::new(pair.surface().clone(), expr::curve_combination(b)?),
            None => Ok(pair),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Zariski decomposition of a divisor, by default -(K + boundary).
    Zariski {
        #[command(flatten)]
        scene: SceneArgs,
        /// Linear combination of curves and K, e.g. "-K" or "1/2*C+E".
        #[arg(long, allow_hyphen_values = true)]
        divisor: Option<String>,
    },
    /// Run the anticanonical MMP and report the trace and certificates.
    Mmp {
        #[command(flatten)]
        scene: SceneArgs,
    },
    /// Test whether a point is redundant.
    Redundant {
        #[command(flatten)]
        scene: SceneArgs,
        /// Incidences such as "C5:1,C6:1".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Log discrepancy, sigma and potential log discrepancy of a divisor over the scene.
    Discrepancy {
        #[command(flatten)]
        scene: SceneArgs,
        /// Blow-up chain "p1;p2;..." where later points may name ~1, ~2, ...
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "curve",
            required_unless_present = "curve"
        )]
        chain: Option<String>,
        /// A tracked curve instead of a chain.
        #[arg(long)]
        curve: Option<String>,
    },
    /// Estimate the sigma log canonical threshold from chains up to a depth.
    Lct {
        #[command(flatten)]
        scene: SceneArgs,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Classify a weighted dual graph.
    ClassifyGraph {
        /// Weights of a chain, e.g. "-2,-4".
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "graph",
            required_unless_present = "graph"
        )]
        chain: Option<String>,
        /// JSON file with "weights" and "edges".
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Enumerate klt trees and compare the redundant-free ones with the expected families.
    #[command(name = "verify-theorem-1.4")]
    VerifyKltTrees {
        #[arg(long)]
        max_vertices: usize,
        #[arg(long, allow_hyphen_values = true)]
        min_weight: i64,
        /// Extend every klt graph instead of only redundant-free ones.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Check every stated value of a built-in example.
    VerifyExample {
        #[arg(value_parser = ["4.1", "4.2", "4.3"])]
        example: String,
    },
    /// Print a built-in scene as a scene file.
    Scene {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(BUILTIN))]
        name: String,
    },
}

enum Failure {
    Input(Error),
    Verification(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

type CmdResult = Result<Value, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(v) => {
            print_json(&v);
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(v)) => {
            print_json(&v);
            ExitCode::from(3)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn print_json(v: &Value) {
    let text = serde_json::to_string_pretty(v).expect("JSON values serialize");
    write_stdout(&format!("{text}\n"));
}

// A closed pipe (e.g. `| head`) is not an error worth a panic.
fn write_stdout(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn r(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

fn load_scene(arg: &str) -> Result<Scene, Error> {
    let path = Path::new(arg);
    if path.exists() {
        return Scene::load(path);
    }
    builtin(arg).ok_or_else(|| Error::Parse {
        position: arg.to_string(),
        message: format!(
            "no such file and no built-in scene of that name (built-ins: {})",
            BUILTIN.join(", ")
        ),
    })
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Zariski { scene, divisor } => {
            let pair = scene.pair()?;
            let model = pair.surface();
            let (d, zd) = match divisor {
                Some(expr) => {
                    let d = expr::divisor_class(model, &expr)?;
                    let zd = zariski_decompose(model, &d)?;
                    (d, zd)
                }
                None => (pair.anticanonical(), pair.decomposition().clone()),
            };
            Ok(json!({
                "scene": scene.scene,
                "basis": model.lattice().basis_names(),
                "divisor": d,
                "negative": zd.negative.iter().map(|(k, v)| (k.clone(), r(v))).collect::<serde_json::Map<_, _>>(),
                "positive": zd.positive,
                "nef_scope": zd.nef_scope,
                "support_certificate": zd.support_certificate,
            }))
        }
        Command::Mmp { scene } => {
            let pair = scene.pair()?;
            let cert = pklt_certificate(&pair)?;
            let trace = &cert.witness;
            let factorization = check_mmp_redundant_factorization(trace)?;
            let steps: Vec<Value> = trace
                .steps
                .iter()
                .map(|s| {
                    json!({
                        "contracted": s.contracted,
                        "rank_before": s.rank_before,
                        "self_intersection": r(&s.self_intersection),
                        "anticanonical_degree": r(&s.anticanonical_degree),
                        "discrepancy": r(&s.discrepancy),
                        "exceptional_coefficient": r(&s.exceptional_coefficient),
                        "blow_down": s.blow_down.as_ref().map(ToString::to_string),
                        "negative_part": s.decomposition_before.negative.iter()
                            .map(|(k, v)| (k.clone(), r(v))).collect::<serde_json::Map<_, _>>(),
                    })
                })
                .collect();
            let end = &trace.final_pair;
            Ok(json!({
                "scene": scene.scene,
                "steps": steps,
                "final": {
                    "rank": end.surface().rank(),
                    "smooth": end.surface().is_smooth(),
                    "curves": end.surface().curves().iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
                    "boundary": end.boundary().iter().map(|(k, v)| (k.clone(), r(v))).collect::<serde_json::Map<_, _>>(),
                    "klt": trace.final_klt,
                    "terminal": trace.final_terminal,
                    "model_nef": trace.final_model_nef,
                },
                "total_log_discrepancies": trace.total_log_discrepancies.iter()
                    .map(|(k, v)| (k.clone(), r(v))).collect::<serde_json::Map<_, _>>(),
                "pklt": {
                    "certified": cert.certified,
                    "max_coefficient": r(&cert.max_coefficient),
                },
                "factorization": factorization,
            }))
        }
        Command::Redundant { scene, point } => {
            let pair = scene.pair()?;
            let p: PointSpec = point.parse()?;
            let report = pair.is_redundant_point(&p)?;
            Ok(json!({
                "scene": scene.scene,
                "point": p.to_string(),
                "redundant": report.redundant,
                "mult_n": r(&report.mult_n),
                "mult_boundary": r(&report.mult_boundary),
                "mult": r(&(&report.mult_n + &report.mult_boundary)),
            }))
        }
        Command::Discrepancy {
            scene,
            chain,
            curve,
        } => {
            let pair = scene.pair()?;
            let e = match (chain, curve) {
                (Some(c), _) => DivisorOver::Chain(parse_chain(&c)?),
                (None, Some(c)) => DivisorOver::Curve(c),
                (None, None) => unreachable!("clap requires one of --chain and --curve"),
            };
            let a = pair.log_discrepancy(&e)?;
            let sigma = pair.sigma(&e)?;
            let mut out = json!({
                "scene": scene.scene,
                "boundary": pair.boundary().iter().map(|(k, v)| (k.clone(), r(v))).collect::<serde_json::Map<_, _>>(),
                "log_discrepancy": r(&a),
                "sigma": r(&sigma),
                "potential_log_discrepancy": r(&(&a - &sigma)),
            });
            match &e {
                DivisorOver::Chain(c) => {
                    let cm = pair.blow_up_chain(c)?;
                    out["chain"] = json!(surfmmp::birational::format_chain(c));
                    out["log_discrepancy_without_boundary"] =
                        r(&cm.log_discrepancy_without_boundary);
                    out["boundary_order"] = r(&cm.boundary_order());
                }
                DivisorOver::Curve(c) => out["curve"] = json!(c),
            }
            Ok(out)
        }
        Command::Lct { scene, depth } => {
            let pair = scene.pair()?;
            let est = lct_sigma_estimate(&pair, depth)?;
            Ok(json!({ "scene": scene.scene, "depth": depth, "estimate": est }))
        }
        Command::ClassifyGraph { chain, graph } => {
            let spec = match (chain, graph) {
                (Some(c), _) => {
                    let weights = c
                        .split(',')
                        .map(|w| {
                            w.trim().parse::<i64>().map_err(|_| Error::Parse {
                                position: format!("--chain `{c}`"),
                                message: format!("`{w}` is not an integer weight"),
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    let edges = (1..weights.len()).map(|i| (i - 1, i)).collect();
                    GraphSpec { weights, edges }
                }
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| Error::Parse {
                        position: path.display().to_string(),
                        message: e.to_string(),
                    })?;
                    serde_json::from_str(&text).map_err(|e| Error::Parse {
                        position: format!(
                            "{}: line {}, column {}",
                            path.display(),
                            e.line(),
                            e.column()
                        ),
                        message: e.to_string(),
                    })?
                }
                (None, None) => unreachable!("clap requires one of --chain and --graph"),
            };
            let components = spec.components()?;
            let verdicts: Vec<_> = components.iter().map(DualGraph::classify).collect();
            Ok(json!({
                "components": verdicts,
                "klt": verdicts.iter().all(|v| v.klt),
                "redundant_free": verdicts.iter().all(|v| v.redundant_free),
            }))
        }
        Command::VerifyKltTrees {
            max_vertices,
            min_weight,
            exhaustive,
        } => {
            if max_vertices == 0 || min_weight > -2 {
                return Err(Error::Parse {
                    position: "bounds".into(),
                    message: "need --max-vertices >= 1 and --min-weight <= -2".into(),
                }
                .into());
            }
            let mode = if exhaustive {
                EnumerationMode::Exhaustive
            } else {
                EnumerationMode::Pruned
            };
            let report = enumerate_and_verify(max_vertices, min_weight, mode);
            let v = serde_json::to_value(&report).expect("reports serialize");
            if report.ok {
                Ok(v)
            } else {
                Err(Failure::Verification(v))
            }
        }
        Command::VerifyExample { example } => {
            let report = verify_example(&example)?;
            let v = serde_json::to_value(&report).expect("reports serialize");
            if report.ok {
                Ok(v)
            } else {
                Err(Failure::Verification(v))
            }
        }
        Command::Scene { name } => {
            let scene = builtin(&name).expect("clap restricts names to built-ins");
            write_stdout(&scene.to_json());
            std::process::exit(0);
        }
    }
}
