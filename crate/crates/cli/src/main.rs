//! Command-line interface: census runs, wall enumeration, orbit tables,
//! relator search, 27-lines tables, appendix verification and slice export.
//!
//! Exit codes: 0 on success, 2 when a configured expectation or asserted
//! claim fails, 3 when the census closure is not reached.

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use fano_census::birgroup::{find_relations, orbit_count, OrbitKind};
use fano_census::chambers::{census, slice_export, CensusOptions, ChambersError, TieBreak};
use fano_census::cubicsurface::{intersection_table, line_classes};
use fano_census::matrix::Int;
use fano_census::scenario::{dto_to_graph, graph_to_dto, AppendixData, Scenario};
use fano_census::walls::{enumerate_walls_in_region, ConeRegion, WallKind};
use fano_census_cli::{appendix_run, cache, report};
use report::Report;
use std::path::PathBuf;

const EXIT_MISMATCH: i32 = 2;
const EXIT_INCOMPLETE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "fano-census",
    version,
    about = "Exact census of birational models of Fano varieties of lines on cubic fourfolds with cubic scrolls"
)]
struct Cli {
    /// Worker threads for the finite-field scans (output-invariant).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the chamber census and the model classification.
    Census {
        /// Scenario name (c12, syz, nonsyz) or a path to a scenario file.
        scenario: String,
        /// BFS depth guard.
        #[arg(long, default_value_t = 12)]
        depth: usize,
        /// Write the JSON report here in addition to the text output.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Populate the timing field (breaks byte-reproducibility).
        #[arg(long)]
        timings: bool,
        /// Skip the on-disk chamber-graph cache.
        #[arg(long)]
        no_cache: bool,
    },
    /// Enumerate the wall divisors meeting a cone region.
    Walls {
        scenario: String,
        /// Region rays, e.g. "4,3,3;4,3,-3;4,-3,3;4,-3,-3" (defaults to the
        /// nef chamber).
        #[arg(long)]
        region: Option<String>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Orbit tables of the involution generators.
    Orbits {
        scenario: String,
        /// flop, pex or square6.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 50)]
        bound: i64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Search for relators among the involution generators.
    Relations {
        scenario: String,
        #[arg(long, default_value_t = 14)]
        max_length: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// 27-lines combinatorics and the plane intersection table.
    SurfaceLines {
        scenario: String,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Verify the explicit finite-field examples (syz or nonsyz).
    VerifyAppendix {
        example: String,
        /// Run over a different prime; exact expectations are then reported
        /// but not asserted.
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Export a rational cross-section of the census chambers.
    Slice {
        scenario: String,
        /// Slice level: the value of q(g, x), e.g. 24 for the plane x = 4.
        #[arg(long, default_value = "24")]
        level: String,
        /// csv or json.
        #[arg(long, default_value = "csv")]
        format: String,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cap on exported chambers; 0 exports only the boundary circle.
        #[arg(long)]
        max_chambers: Option<usize>,
    },
    /// Manage the chamber-graph cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    Clear,
    Status,
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

fn load_scenario(name_or_path: &str) -> anyhow::Result<Scenario> {
    if Scenario::builtin_names().contains(&name_or_path) {
        return Ok(Scenario::builtin(name_or_path)?);
    }
    let path = PathBuf::from(name_or_path);
    if path.exists() {
        let src = std::fs::read_to_string(&path)
            .with_context(|| format!("reading scenario file {}", path.display()))?;
        return Ok(Scenario::from_json(&src)?);
    }
    Err(anyhow!(
        "unknown scenario {name_or_path:?}: not a built-in ({:?}) and not a file",
        Scenario::builtin_names()
    ))
}

fn emit(report: &Report, text: String, json: &Option<PathBuf>) -> anyhow::Result<()> {
    print!("{text}");
    if let Some(path) = json {
        std::fs::write(path, report.to_json())
            .with_context(|| format!("writing report to {}", path.display()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Census {
            scenario,
            depth,
            json,
            timings,
            no_cache,
        } => {
            let started = std::time::Instant::now();
            let sc = load_scenario(&scenario)?;
            let cache_key = cache::sha256_hex(&format!("{}|depth={depth}|v1", sc.source));
            let dir = cache::cache_dir();
            let mut from_cache = false;
            let graph = if no_cache {
                None
            } else {
                cache::load(&dir, &cache_key).and_then(|dto| dto_to_graph(&dto).ok())
            };
            let graph = match graph {
                Some(g) => {
                    from_cache = true;
                    g
                }
                None => {
                    let opts = CensusOptions {
                        max_depth: depth,
                        tie_break: TieBreak::LexAsc,
                    };
                    let g = match census(&sc, &opts) {
                        Ok(g) => g,
                        Err(ChambersError::ClosureNotReached(d)) => {
                            eprintln!("census closure not reached within depth {d}");
                            return Ok(EXIT_INCOMPLETE);
                        }
                        Err(e) => return Err(e.into()),
                    };
                    if !no_cache {
                        if let Ok(dto) = graph_to_dto(&g) {
                            let _ = cache::store(&dir, &cache_key, &dto);
                        }
                    }
                    g
                }
            };
            if from_cache {
                eprintln!("(chamber graph replayed from cache)");
            }
            let mut report = Report::new(&sc.name, "census");
            let summary = report::census_summary(&sc, &graph)?;
            report.mismatches = report::check_census_expectations(&sc, &summary);
            report.census = Some(summary);
            if timings {
                report.timing_ms = Some(started.elapsed().as_millis() as u64);
            }
            let text = report::render_census_text(&report);
            emit(&report, text, &json)?;
            Ok(if report.mismatches.is_empty() {
                0
            } else {
                EXIT_MISMATCH
            })
        }
        Command::Walls {
            scenario,
            region,
            json,
        } => {
            let sc = load_scenario(&scenario)?;
            let l = &sc.lattice;
            let rays = match region {
                Some(spec) => parse_region(&spec, l.rank)?,
                None => {
                    let ample = fano_census::matrix::ivec_to_rvec(&l.ample);
                    fano_census::chambers::carve_chamber(l, &ample)?.rays
                }
            };
            let region = ConeRegion::new(l, rays.clone())?;
            let flop = enumerate_walls_in_region(l, &region, WallKind::Flop)?;
            let pex = enumerate_walls_in_region(l, &region, WallKind::Pex)?;
            let mut report = Report::new(&sc.name, "walls");
            report.walls = Some(report::WallsSummary {
                region_rays: report::int_vecs(&rays),
                flop_walls: report::int_vecs(
                    &flop.into_iter().map(|w| w.vector).collect::<Vec<_>>(),
                ),
                pex_walls: report::int_vecs(&pex.into_iter().map(|w| w.vector).collect::<Vec<_>>()),
            });
            let text = report::render_walls_text(&report);
            emit(&report, text, &json)?;
            Ok(0)
        }
        Command::Orbits {
            scenario,
            kind,
            bound,
            json,
        } => {
            let sc = load_scenario(&scenario)?;
            let (orbit_kind, check_free) = match kind.as_str() {
                "flop" => (
                    OrbitKind::Flop,
                    sc.mov_mode == fano_census::birgroup::MovMode::PexBounded,
                ),
                "pex" => (
                    OrbitKind::Pex,
                    sc.mov_mode == fano_census::birgroup::MovMode::PexBounded,
                ),
                "square6" => (OrbitKind::Square(6), false),
                other => return Err(anyhow!("unknown orbit kind {other:?} (flop, pex, square6)")),
            };
            let result = orbit_count(
                &sc.lattice,
                &sc.bir_config(),
                &sc.involutions,
                orbit_kind,
                bound,
                check_free,
            )?;
            let mut report = Report::new(&sc.name, "orbits");
            if let Some(exp) = &sc.expected {
                let want = match orbit_kind {
                    OrbitKind::Flop => exp.flop_delta_orbits,
                    OrbitKind::Pex => exp.pex_delta_orbits,
                    OrbitKind::Square(_) => exp.square_six_orbits,
                };
                if let Some(want) = want {
                    let got = match orbit_kind {
                        OrbitKind::Square(_) => result.orbits.len(),
                        _ => result.delta_orbit_count,
                    };
                    if got != want {
                        report
                            .mismatches
                            .push(format!("orbit count: expected {want}, got {got}"));
                    }
                }
            }
            report.orbits = Some(result);
            let text = report::render_orbits_text(&report);
            emit(&report, text, &json)?;
            Ok(if report.mismatches.is_empty() {
                0
            } else {
                EXIT_MISMATCH
            })
        }
        Command::Relations {
            scenario,
            max_length,
            json,
        } => {
            let sc = load_scenario(&scenario)?;
            let relators = find_relations(&sc.involutions, max_length);
            let mut report = Report::new(&sc.name, "relations");
            if let Some(exp) = &sc.expected {
                if let Some(free_len) = exp.relator_free_length {
                    if max_length <= free_len && !relators.is_empty() {
                        report.mismatches.push(format!(
                            "expected no relators up to length {free_len}, found {}",
                            relators.len()
                        ));
                    }
                }
                if exp.relator_length_six == Some(true)
                    && max_length >= 6
                    && !relators.iter().any(|r| r.relator.len() == 6)
                {
                    report
                        .mismatches
                        .push("expected the length-6 relator family".into());
                }
            }
            let k = sc.involutions.len();
            let presentation_summary = if relators.is_empty() {
                format!(
                    "no relator of length <= {max_length} beyond the involution relations: \
                     consistent with the free product of {k} involutions"
                )
            } else {
                format!(
                    "relations shown up to length {max_length} only; the full relation set \
                     is not determined by this search"
                )
            };
            report.relations = Some(report::RelationsSummary {
                max_length,
                generator_names: sc.involutions.iter().map(|(n, _)| n.clone()).collect(),
                relators,
                presentation_summary,
                note: "relator equality is checked on the isometry matrices; the representation \
                       of the birational group is faithful for these scenarios, so these are \
                       relations of the group itself. The list is complete up to the stated \
                       length only."
                    .into(),
            });
            let text = report::render_relations_text(&report);
            emit(&report, text, &json)?;
            Ok(if report.mismatches.is_empty() {
                0
            } else {
                EXIT_MISMATCH
            })
        }
        Command::SurfaceLines { scenario, json } => {
            let sc = load_scenario(&scenario)?;
            let Some(pair) = sc.pair_scenario() else {
                return Err(anyhow!(
                    "scenario {} has no scroll pair; surface-lines needs tau = 1 or 3",
                    sc.name
                ));
            };
            let table = intersection_table(pair)?;
            let mut report = Report::new(&sc.name, "surface-lines");
            report.surface_lines = Some(report::SurfaceLinesSummary {
                tau: sc.tau.unwrap_or_default(),
                table,
                line_count: line_classes().len(),
            });
            let text = report::render_surface_lines_text(&report);
            emit(&report, text, &json)?;
            Ok(0)
        }
        Command::VerifyAppendix {
            example,
            prime,
            json,
        } => {
            let data = AppendixData::builtin(&example, prime)?;
            let shipped = AppendixData::builtin(&example, None)?.prime;
            let result = appendix_run::run(&data, shipped)?;
            let failed = result.claims.iter().any(|c| c.asserted && !c.passed);
            let mut report = Report::new(&example, "verify-appendix");
            report.appendix = Some(result);
            let text = report::render_appendix_text(&report);
            emit(&report, text, &json)?;
            Ok(if failed { EXIT_MISMATCH } else { 0 })
        }
        Command::Slice {
            scenario,
            level,
            format,
            out,
            max_chambers,
        } => {
            let sc = load_scenario(&scenario)?;
            if sc.lattice.rank != 3 {
                return Err(anyhow!(
                    "slice export needs a rank-3 scenario; {} has rank {}",
                    sc.name,
                    sc.lattice.rank
                ));
            }
            let level = fano_census::scenario::parse_rational(&level)?;
            let graph = census(&sc, &CensusOptions::default())?;
            let count = max_chambers.unwrap_or(graph.nodes.len());
            let chambers = &graph.nodes[..count.min(graph.nodes.len())];
            let data = slice_export(&sc.lattice, chambers, &level)?;
            let rendered = match format.as_str() {
                "csv" => slice_csv(&data),
                "json" => {
                    let mut s = serde_json::to_string_pretty(&data)?;
                    s.push('\n');
                    s
                }
                other => return Err(anyhow!("unknown format {other:?} (csv, json)")),
            };
            match out {
                Some(path) => std::fs::write(&path, rendered)
                    .with_context(|| format!("writing slice to {}", path.display()))?,
                None => print!("{rendered}"),
            }
            Ok(0)
        }
        Command::Cache { action } => {
            let dir = cache::cache_dir();
            match action {
                CacheAction::Clear => {
                    let removed = cache::clear(&dir)?;
                    println!(
                        "removed {removed} cache entr{} from {}",
                        if removed == 1 { "y" } else { "ies" },
                        dir.display()
                    );
                }
                CacheAction::Status => {
                    let entries = cache::status(&dir)?;
                    println!("cache directory: {}", dir.display());
                    if entries.is_empty() {
                        println!("  (empty)");
                    }
                    for (name, size) in entries {
                        println!("  {name}  {size} bytes");
                    }
                }
            }
            Ok(0)
        }
    }
}

fn parse_region(spec: &str, rank: usize) -> anyhow::Result<Vec<Vec<Int>>> {
    let mut rays = Vec::new();
    for part in spec.split(';') {
        let coords: Result<Vec<i64>, _> = part.split(',').map(|c| c.trim().parse()).collect();
        let coords = coords.with_context(|| format!("bad ray {part:?}"))?;
        if coords.len() != rank {
            return Err(anyhow!(
                "ray {part:?} has {} coordinates, expected {rank}",
                coords.len()
            ));
        }
        rays.push(coords.into_iter().map(Int::from).collect());
    }
    if rays.is_empty() {
        return Err(anyhow!("region must contain at least one ray"));
    }
    Ok(rays)
}

fn slice_csv(data: &fano_census::chambers::SliceData) -> String {
    let mut out = String::from("object_type,id,x_num,x_den,y_num,y_den\n");
    let split = |s: &str| -> (String, String) {
        match s.split_once('/') {
            Some((n, d)) => (n.to_string(), d.to_string()),
            None => (s.to_string(), "1".to_string()),
        }
    };
    for (i, seg) in data.segments.iter().enumerate() {
        for pt in [&seg.from, &seg.to] {
            let (xn, xd) = split(&pt.0);
            let (yn, yd) = split(&pt.1);
            out.push_str(&format!("wall,{i},{xn},{xd},{yn},{yd}\n"));
        }
    }
    for pt in &data.circle {
        let (xn, xd) = split(&pt.0);
        let (yn, yd) = split(&pt.1);
        out.push_str(&format!("circle,0,{xn},{xd},{yn},{yd}\n"));
    }
    out
}
