//! One function per subcommand. Each returns the rendered artifact and any
//! numerical-consistency warnings.

use std::path::Path;

use qtradeoff::broadcast::{
    broadcast_fidelity_search, conjecture_probe, nondisturbing_information, ConjectureReport,
    NondisturbingVerdict,
};
use qtradeoff::metrics::{frontier_d, Source};
use qtradeoff::states::parse_density_json;
use qtradeoff::tradeoff::{
    family_frontier, isometry_frontier, pe_grid, sweep, zero_disturbance_max_info, FamilyLattice,
    ZeroDisturbanceReport,
};
use qtradeoff::{BroadcastReport, DensityOperator, FrontierCurve, TradeoffPoint};

use crate::config::{Command, Format};
use crate::emit::{to_json, Cell, Table};
use crate::error::CliError;

#[derive(Debug, Default)]
pub struct Outcome {
    pub text: String,
    pub warnings: Vec<String>,
}

pub fn run(command: &Command, format: Option<Format>) -> Result<Outcome, CliError> {
    match command {
        Command::Curve { pair, points } => {
            curve(pair.overlap()?, *points, format.unwrap_or(Format::Csv))
        }
        Command::FamilyFrontier {
            pair,
            points,
            budget,
        } => {
            let s = pair.overlap()?;
            let budget = budget.budget()?;
            let curve = family_frontier(s, &pe_grid(s, *points), &budget)?;
            Ok(frontier(&curve, format.unwrap_or(Format::Csv)))
        }
        Command::IsometryFrontier {
            pair,
            points,
            dim_e,
            budget,
        } => {
            let s = pair.overlap()?;
            let budget = budget.budget()?;
            let curve = isometry_frontier(s, &pe_grid(s, *points), *dim_e, &budget)?;
            Ok(frontier(&curve, format.unwrap_or(Format::Csv)))
        }
        Command::Sweep { pair, grid } => {
            let s = pair.overlap()?;
            let points = sweep(s, &FamilyLattice::canonical(*grid))?;
            Ok(sweep_table(&points, format.unwrap_or(Format::Csv)))
        }
        Command::ZeroDisturbance {
            pair,
            dim_e,
            budget,
        } => {
            let report = zero_disturbance_max_info(pair.overlap()?, *dim_e, &budget.budget()?)?;
            Ok(zero_disturbance(&report, format.unwrap_or(Format::Csv)))
        }
        Command::BroadcastCheck {
            inputs,
            anc_dim,
            budget,
        } => {
            let (r0, r1) = (read_density(&inputs.input0)?, read_density(&inputs.input1)?);
            let report = broadcast_fidelity_search(&r0, &r1, *anc_dim, &budget.budget()?)?;
            Ok(broadcast(&report, format.unwrap_or(Format::Json)))
        }
        Command::Blocks { inputs, tol } => {
            if !(tol.is_finite() && *tol >= 0.0) {
                return Err(CliError::Invalid(format!(
                    "tol = {tol} must be a nonnegative number"
                )));
            }
            let (r0, r1) = (read_density(&inputs.input0)?, read_density(&inputs.input1)?);
            let verdict = nondisturbing_information(&r0, &r1, *tol)?;
            Ok(blocks(&verdict, format.unwrap_or(Format::Json)))
        }
        Command::ConjectureProbe { dim, trials, seed } => {
            let report = conjecture_probe(*dim, *trials, *seed)?;
            Ok(probe(&report, format.unwrap_or(Format::Json)))
        }
    }
}

fn read_density(path: &Path) -> Result<DensityOperator, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Input {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_density_json(&text)?)
}

fn json_only<T: serde::Serialize>(value: &T) -> Outcome {
    Outcome {
        text: to_json(value),
        warnings: Vec::new(),
    }
}

fn curve(s: f64, points: usize, format: Format) -> Result<Outcome, CliError> {
    #[derive(serde::Serialize)]
    struct Row {
        pe: f64,
        d: f64,
    }
    #[derive(serde::Serialize)]
    struct Doc {
        s_overlap: f64,
        points: Vec<Row>,
    }
    // Validates the overlap even when no points are requested.
    frontier_d(0.5, s)?;
    let rows = pe_grid(s, points)
        .into_iter()
        .map(|pe| {
            Ok(Row {
                pe,
                d: frontier_d(pe, s)?,
            })
        })
        .collect::<Result<Vec<_>, qtradeoff::Error>>()?;
    Ok(match format {
        Format::Json => json_only(&Doc {
            s_overlap: s,
            points: rows,
        }),
        Format::Csv => {
            let mut t = Table::new(&["pe", "d"]);
            for r in &rows {
                t.push(vec![r.pe.into(), r.d.into()]);
            }
            Outcome {
                text: t.to_csv(),
                warnings: Vec::new(),
            }
        }
    })
}

fn frontier_warnings(curve: &FrontierCurve) -> Vec<String> {
    let mut w = Vec::new();
    if curve.has_violation() {
        w.push(format!(
            "frontier violation: a visited point lies {:e} below the frontier ({} recorded)",
            -curve.min_visited_gap,
            curve.violations.len()
        ));
    }
    w
}

fn source_text(source: &Source<f64>) -> String {
    match source {
        Source::ClosedForm(p) => format!(
            "closed-form(lambda={};phi={};theta={})",
            crate::emit::real(p.lambda),
            crate::emit::real(p.phi),
            crate::emit::real(p.theta)
        ),
        Source::Isometry { dim_e, .. } => format!("isometry(dim_e={dim_e})"),
    }
}

fn frontier(curve: &FrontierCurve, format: Format) -> Outcome {
    let warnings = frontier_warnings(curve);
    let text = match format {
        Format::Json => to_json(curve),
        Format::Csv => {
            let mut t = Table::new(&[
                "pe_target",
                "pe",
                "d_frontier",
                "d_achieved",
                "gap",
                "feasible",
                "d_negative_half",
                "source",
            ]);
            for p in &curve.points {
                t.push(vec![
                    p.pe_target.into(),
                    p.pe.into(),
                    p.d_frontier.into(),
                    p.d_achieved.into(),
                    p.gap.into(),
                    p.feasible.into(),
                    p.d_negative_half.into(),
                    source_text(&p.source).into(),
                ]);
            }
            t.to_csv()
        }
    };
    Outcome { text, warnings }
}

fn sweep_table(points: &[TradeoffPoint], format: Format) -> Outcome {
    let clamped = points.iter().filter(|p| p.has_clamp_warning()).count();
    let warnings = if clamped > 0 {
        let worst = points.iter().fold(0.0f64, |m, p| m.max(p.g_clamp));
        vec![format!(
            "{clamped} sweep points needed a gain clamp beyond tolerance (largest {worst:e})"
        )]
    } else {
        Vec::new()
    };
    let text = match format {
        Format::Json => to_json(&points),
        Format::Csv => {
            let mut t = Table::new(&["pe", "d", "g", "source"]);
            for p in points {
                t.push(vec![
                    p.pe.into(),
                    p.d.into(),
                    p.g.into(),
                    source_text(&p.source).into(),
                ]);
            }
            t.to_csv()
        }
    };
    Outcome { text, warnings }
}

fn zero_disturbance(report: &ZeroDisturbanceReport<f64>, format: Format) -> Outcome {
    match format {
        Format::Json => json_only(report),
        Format::Csv => {
            let mut t = Table::new(&[
                "s_overlap",
                "dim_e",
                "best_pe",
                "d",
                "frontier_bound_pe",
                "seed",
            ]);
            t.push(vec![
                report.s_overlap.into(),
                report.dim_e.into(),
                report.best_pe.into(),
                report.d.into(),
                report.frontier_bound_pe.into(),
                Cell::Text(report.budget.seed.to_string()),
            ]);
            Outcome {
                text: t.to_csv(),
                warnings: Vec::new(),
            }
        }
    }
}

fn broadcast(report: &BroadcastReport, format: Format) -> Outcome {
    match format {
        Format::Json => json_only(report),
        Format::Csv => {
            let mut t = Table::new(&[
                "commuting",
                "commutator_norm",
                "best_score",
                "search_score",
                "constructive_score",
                "anc_dim",
                "broadcastable",
            ]);
            t.push(vec![
                report.commuting.into(),
                report.commutator_norm.into(),
                report.best_score.into(),
                report.search_score.into(),
                report.constructive_score.into(),
                report.anc_dim.into(),
                report.broadcastable().into(),
            ]);
            Outcome {
                text: t.to_csv(),
                warnings: Vec::new(),
            }
        }
    }
}

fn blocks(verdict: &NondisturbingVerdict<f64>, format: Format) -> Outcome {
    match format {
        Format::Json => json_only(verdict),
        Format::Csv => {
            let mut t = Table::new(&["block", "dim", "p0", "p1"]);
            let b = &verdict.blocks;
            for k in 0..b.block_dims.len() {
                t.push(vec![
                    k.into(),
                    b.block_dims[k].into(),
                    b.p0[k].into(),
                    b.p1[k].into(),
                ]);
            }
            Outcome {
                text: t.to_csv(),
                warnings: Vec::new(),
            }
        }
    }
}

fn probe(report: &ConjectureReport<f64>, format: Format) -> Outcome {
    match format {
        Format::Json => json_only(report),
        Format::Csv => {
            let mut t = Table::new(&[
                "index",
                "category",
                "predicted",
                "exists",
                "block_dims",
                "total_variation",
            ]);
            for trial in &report.trials {
                let dims: Vec<String> = trial.block_dims.iter().map(usize::to_string).collect();
                t.push(vec![
                    trial.index.into(),
                    trial.category.tag().into(),
                    trial.predicted.into(),
                    trial.exists.into(),
                    dims.join(";").into(),
                    trial.total_variation.into(),
                ]);
            }
            Outcome {
                text: t.to_csv(),
                warnings: Vec::new(),
            }
        }
    }
}
