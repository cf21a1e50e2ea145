use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::{marching_squares, Grid};
use crate::disorder::{derive_seed, DisorderKind, DisorderSpec};
use crate::ensemble::merit_ensemble;
use crate::protocols::ProtocolResult;

use super::config::{default_size_grid, SweepConfig, DEFAULT_REALIZATIONS};
use super::meta::{sha256_hex, CellSeed};
use super::timeexpr::eval_time;
use super::{plots, write_atomic, CliError, Context, Outcome};

pub const CHECKPOINT_DIR: &str = "checkpoints";
pub const CONTOUR_LEVEL: f64 = 0.90;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Cell {
    kind: DisorderKind,
    size: usize,
    strength: f64,
}

impl Cell {
    fn key(&self) -> String {
        format!("{}_s{}_e{:016x}", self.kind, self.size, self.strength.to_bits())
    }

    fn seed(&self, master: u64) -> u64 {
        let digest = sha256_hex(format!("sweep/{}", self.key()).as_bytes());
        derive_seed(master, u64::from_str_radix(&digest[..16], 16).expect("hex"))
    }
}

// Floats are stored as bit patterns so a resumed run is byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Checkpoint {
    fingerprint: String,
    key: String,
    mean_bits: u64,
    std_bits: u64,
    std_of_mean_bits: u64,
    count: usize,
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct CellResult {
    mean: f64,
    std: f64,
    std_of_mean: f64,
    count: usize,
    seed: u64,
}

fn fingerprint(ctx: &Context) -> String {
    sha256_hex(format!("{}\n{}\n{}", env!("CARGO_PKG_VERSION"), ctx.seed, ctx.config.to_toml()).as_bytes())
}

pub(super) fn sweep(ctx: &Context) -> Result<Outcome, CliError> {
    let pcfg = ctx
        .config
        .protocol
        .as_ref()
        .ok_or_else(|| CliError::Config("sweep needs a [protocol] section".into()))?;
    let scfg = ctx.config.sweep.clone().unwrap_or_default();
    let mut outcome = Outcome::default();
    let defaults = &mut outcome.meta.defaults;

    let configured_size = pcfg.build(ctx.config.network.as_ref()).is_ok();
    let sizes: Vec<Option<usize>> = match &scfg.size {
        Some(grid) => grid.values().map_err(CliError::Config)?.into_iter().map(Some).collect(),
        None if pcfg.sized_by_n() && !configured_size => {
            defaults.insert("sweep.size".into(), "4..100 step 2".into());
            default_size_grid().values().map_err(CliError::Config)?.into_iter().map(Some).collect()
        }
        None => vec![None],
    };
    if scfg.strength.is_none() {
        defaults.insert("sweep.strength".into(), "0..0.25 step 0.01".into());
    }
    if scfg.kinds.is_none() {
        defaults.insert("sweep.kinds".into(), "diagonal, off_diagonal".into());
    }
    if scfg.realizations.is_none() {
        defaults.insert("sweep.realizations".into(), DEFAULT_REALIZATIONS.to_string());
    }
    let strengths = scfg.strengths().map_err(CliError::Config)?;
    let kinds = scfg.kinds().map_err(CliError::Config)?;
    let k = scfg.realizations().map_err(CliError::Config)?;

    // one protocol per size, with the sweep's observable and readout time
    let mut protocols: BTreeMap<usize, ProtocolResult> = BTreeMap::new();
    for size in &sizes {
        let cfg = match size {
            Some(s) => pcfg.with_size(*s).map_err(CliError::Config)?,
            None => pcfg.clone(),
        };
        let mut result = cfg.build(ctx.config.network.as_ref())?;
        result.merit = scfg.merit(&result.merit);
        if let Some(expr) = &scfg.observe {
            result.observe_at = eval_time(expr, &result.network.mirror_times()).map_err(CliError::Config)?;
            if result.observe_at < result.protocol.duration() {
                return Err(CliError::Config(format!(
                    "sweep.observe `{expr}` is before the protocol's last event"
                )));
            }
        }
        protocols.insert(result.network.n_sites(), result);
    }

    let mut cells = Vec::new();
    for &kind in &kinds {
        for result in protocols.values() {
            for &strength in &strengths {
                cells.push(Cell {
                    kind,
                    size: result.network.n_sites(),
                    strength,
                });
            }
        }
    }

    let ckdir = ctx.out.join(CHECKPOINT_DIR);
    fs::create_dir_all(&ckdir)?;
    let fp = fingerprint(ctx);
    let results: Vec<(CellResult, bool)> = cells
        .par_iter()
        .map(|cell| -> Result<(CellResult, bool), CliError> {
            let path = ckdir.join(format!("{}.json", cell.key()));
            if let Some(done) = load_checkpoint(&path, &fp, cell) {
                return Ok((done, true));
            }
            let seed = cell.seed(ctx.seed);
            let disorder = cell_disorder(&scfg, cell)?;
            let stats = merit_ensemble(&protocols[&cell.size], &disorder, k, seed)?;
            if !(-1e-12..=1.0 + 1e-9).contains(&stats.mean) {
                return Err(CliError::Numerical(format!("cell {} mean {} outside [0, 1]", cell.key(), stats.mean)));
            }
            let r = CellResult {
                mean: stats.mean,
                std: stats.std,
                std_of_mean: stats.std_of_mean,
                count: stats.count,
                seed,
            };
            let ck = Checkpoint {
                fingerprint: fp.clone(),
                key: cell.key(),
                mean_bits: r.mean.to_bits(),
                std_bits: r.std.to_bits(),
                std_of_mean_bits: r.std_of_mean.to_bits(),
                count: r.count,
                seed,
            };
            write_atomic(&path, serde_json::to_string(&ck).expect("serializes").as_bytes())?;
            Ok((r, false))
        })
        .collect::<Result<_, _>>()?;

    let resumed = results.iter().filter(|(_, r)| *r).count();
    println!("{} cells: {} computed, {} resumed from checkpoints", cells.len(), cells.len() - resumed, resumed);

    let mut csv = String::from("kind,size,E,mean,std,std_of_mean,K,seed\n");
    for (cell, (r, _)) in cells.iter().zip(&results) {
        writeln!(
            csv,
            "{},{},{},{:?},{:?},{:?},{},{}",
            cell.kind, cell.size, cell.strength, r.mean, r.std, r.std_of_mean, r.count, r.seed
        )
        .unwrap();
        outcome.meta.cells.push(CellSeed {
            label: format!("{} size={} E={}", cell.kind, cell.size, cell.strength),
            seed: r.seed,
        });
    }
    write_atomic(&ctx.out.join("heatmap.csv"), csv.as_bytes())?;

    let (contour_csv, cells_csv) = contours(&cells, &results, &kinds);
    write_atomic(&ctx.out.join("contour.csv"), contour_csv.as_bytes())?;
    write_atomic(&ctx.out.join("contour_cells.csv"), cells_csv.as_bytes())?;
    write_atomic(&ctx.out.join("plot_heatmap.py"), plots::HEATMAP.as_bytes())?;
    outcome.files.extend(
        ["heatmap.csv", "contour.csv", "contour_cells.csv", "plot_heatmap.py"]
            .iter()
            .map(|s| s.to_string()),
    );
    Ok(outcome)
}

fn cell_disorder(scfg: &SweepConfig, cell: &Cell) -> Result<DisorderSpec, CliError> {
    let spec = DisorderSpec::new(cell.kind, cell.strength)?;
    Ok(match scfg.width {
        Some(w) => spec.with_width(w)?,
        None => spec,
    })
}

fn load_checkpoint(path: &std::path::Path, fp: &str, cell: &Cell) -> Option<CellResult> {
    let text = fs::read_to_string(path).ok()?;
    let ck: Checkpoint = serde_json::from_str(&text).ok()?;
    (ck.fingerprint == fp && ck.key == cell.key()).then(|| CellResult {
        mean: f64::from_bits(ck.mean_bits),
        std: f64::from_bits(ck.std_bits),
        std_of_mean: f64::from_bits(ck.std_of_mean_bits),
        count: ck.count,
        seed: ck.seed,
    })
}

fn contours(cells: &[Cell], results: &[(CellResult, bool)], kinds: &[DisorderKind]) -> (String, String) {
    let mut lines = String::from("kind,polyline,vertex,size,E\n");
    let mut crossed = String::from("kind,size_lo,size_hi,E_lo,E_hi\n");
    for &kind in kinds {
        let mut sizes: Vec<usize> = cells.iter().filter(|c| c.kind == kind).map(|c| c.size).collect();
        sizes.dedup();
        let mut strengths: Vec<f64> = Vec::new();
        for c in cells.iter().filter(|c| c.kind == kind && c.size == sizes[0]) {
            strengths.push(c.strength);
        }
        // contours need ascending axes
        let mut order: Vec<usize> = (0..strengths.len()).collect();
        order.sort_by(|&a, &b| strengths[a].total_cmp(&strengths[b]));
        let lookup: BTreeMap<(usize, u64), f64> = cells
            .iter()
            .zip(results)
            .filter(|(c, _)| c.kind == kind)
            .map(|(c, (r, _))| ((c.size, c.strength.to_bits()), r.mean))
            .collect();
        let ys: Vec<f64> = order.iter().map(|&i| strengths[i]).collect();
        let grid = Grid {
            xs: sizes.iter().map(|&s| s as f64).collect(),
            values: sizes
                .iter()
                .map(|&s| ys.iter().map(|y| lookup[&(s, y.to_bits())]).collect())
                .collect(),
            ys,
        };
        let c = marching_squares(&grid, CONTOUR_LEVEL);
        for (p, line) in c.polylines.iter().enumerate() {
            for (v, (x, y)) in line.iter().enumerate() {
                writeln!(lines, "{kind},{p},{v},{x},{y}").unwrap();
            }
        }
        for cell in c.cells {
            writeln!(
                crossed,
                "{kind},{},{},{},{}",
                sizes[cell.ix],
                sizes[cell.ix + 1],
                grid.ys[cell.iy],
                grid.ys[cell.iy + 1]
            )
            .unwrap();
        }
    }
    (lines, crossed)
}
