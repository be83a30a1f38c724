//! One runner per task. Each resolves the defaults it uses back into the config.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use qprobe_core::correlations::{lightcone_map, CorrelationKernel, CorrelationMap, MapQuantity, ProbePair};
use qprobe_core::grid::BrillouinGrid;
use qprobe_core::lindblad::{decay_rate, evolve_numeric, excited_population, extract_coupling, LindbladParams};
use qprobe_core::models::{BHModel, KitaevModel, LatticeModel, ModeData};
use qprobe_core::probe::{axis_overlap, OverlapKind, ProbeConfig};
use qprobe_core::rates::{NuGrid, TransitionCurve};
use qprobe_core::reconstruct::{
    bloch_reconstruct, collect_peaks, invert_2d, measurement_window, periodize, reconstruct_from_peaks, GeometryForm, NoiseSpec,
    ReconstructOptions, ReconstructedDispersion,
};
use qprobe_core::scenarios::{score_assignment, ChainScenario, SquareScenario};

use crate::config::{ExperimentConfig, ModelConfig, PlotKind, SeparationLayout, Task};
use crate::error::CliError;
use crate::output::{Cell, Plot, Table};
use crate::validate;

/// Largest frequency sweep written to disk.
const MAX_SWEEP_POINTS: usize = 2_000_000;
/// Reference side of the square lattice; smaller runs are noted as desk scale.
const FULL_SQUARE_SIDE: usize = 121;

#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub plot: Option<Plot>,
    /// Structured results written with `--format json`.
    pub data: Value,
    pub summary: Value,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
    pub failed: bool,
}

impl Outcome {
    fn warn(&mut self, w: impl Into<String>) {
        let w = w.into();
        if !self.warnings.contains(&w) {
            self.warnings.push(w);
        }
    }
}

pub fn run(task: Task, cfg: &mut ExperimentConfig) -> Result<Outcome, CliError> {
    check_plot(task, cfg)?;
    let mut out = match task {
        Task::Spectrum => spectrum(cfg),
        Task::Sweep => sweep(cfg),
        Task::Reconstruct => reconstruct(cfg),
        Task::Correlations => correlations(cfg),
        Task::Bloch => bloch(cfg),
        Task::Lindblad => lindblad(cfg),
        Task::Validate => Ok(validate::run()),
    }
    .map_err(|e| e.context(format!("task {task}")))?;
    if let Some(ModelConfig::BoseHubbard(b)) = &cfg.model {
        if matches!(task, Task::Spectrum | Task::Sweep | Task::Reconstruct | Task::Correlations) && b.sites < FULL_SQUARE_SIDE {
            out.notes.push(format!("desk scale: {0}×{0} lattice in place of {1}×{1}", b.sites, FULL_SQUARE_SIDE));
        }
    }
    Ok(out)
}

/// Heat maps need two-dimensional data; reject the request before computing anything.
fn check_plot(task: Task, cfg: &ExperimentConfig) -> Result<(), CliError> {
    if cfg.output.plot != PlotKind::Heat {
        return Ok(());
    }
    let two_d = match task {
        Task::Correlations => true,
        Task::Spectrum => matches!(cfg.model, Some(ModelConfig::BoseHubbard(_))),
        _ => false,
    };
    if two_d {
        Ok(())
    } else {
        Err(CliError::new("dimension_mismatch", format!("heat map requested for one-dimensional {task} data")))
    }
}

enum Model {
    Chain(KitaevModel),
    Square(BHModel),
}

impl Model {
    fn lattice(&self) -> &dyn LatticeModel {
        match self {
            Model::Chain(m) => m,
            Model::Square(m) => m,
        }
    }
}

/// Build the model and resolve its temperature. `spectroscopy` selects the hotter chain default.
fn build_model(cfg: &mut ExperimentConfig, spectroscopy: bool) -> Result<(Model, f64), CliError> {
    let model = cfg.model.as_mut().ok_or_else(|| CliError::config("this task needs a [model] block"))?;
    match model {
        ModelConfig::Kitaev(k) => {
            let beta = *k.beta.get_or_insert(if spectroscopy { 0.02 } else { 0.5 });
            Ok((Model::Chain(KitaevModel::new(k.hopping, k.pairing, k.range_exponent, k.sites)?), beta))
        }
        ModelConfig::BoseHubbard(b) => {
            let beta = *b.beta.get_or_insert(1.0);
            Ok((Model::Square(BHModel::new(b.hopping, b.interaction, b.filling, b.sites)?), beta))
        }
    }
}

fn model_warnings(model: &Model, out: &mut Outcome) {
    if let Model::Square(m) = model {
        if let Some(w) = m.regime_warning() {
            out.warn(w);
        }
    }
}

fn spectrum(cfg: &mut ExperimentConfig) -> Result<Outcome, CliError> {
    let (model, beta) = build_model(cfg, false)?;
    let mut out = Outcome::default();
    model_warnings(&model, &mut out);
    let modes = model.lattice().modes(beta)?;
    let dim = model.lattice().grid().dimension();
    let gapless = modes.iter().filter(|m| m.gapless).count();
    if gapless > 0 {
        out.warn(format!("{gapless} gapless modes; their Bogoliubov angle is fixed by convention"));
    }
    let mut table = if dim == 1 {
        Table::new("modes", &["kx", "omega", "coupling", "degeneracy", "occupation"])
    } else {
        Table::new("modes", &["kx", "ky", "omega", "coupling", "degeneracy", "occupation"])
    };
    for m in &modes {
        let mut row: Vec<Cell> = vec![m.point.k[0].into()];
        if dim == 2 {
            row.push(m.point.k[1].into());
        }
        row.extend([m.frequency.into(), m.coupling_factor.into(), m.degeneracy.into(), m.occupation.into()]);
        table.push(row);
    }
    let (lo, hi) = modes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), m| (a.min(m.frequency), b.max(m.frequency)));
    out.summary = json!({ "model": model.lattice().id(), "beta": beta, "modes": modes.len(), "omega_min": lo, "omega_max": hi });
    out.plot = Some(if dim == 2 && cfg.output.plot != PlotKind::Line {
        spectrum_heat(model.lattice().grid(), &modes)
    } else {
        Plot::Lines { table: "modes".into(), x: 0, ys: vec![dim], log_y: false, points: true }
    });
    out.data = json!({ "modes": modes });
    out.tables.push(table);
    Ok(out)
}

fn spectrum_heat(grid: &BrillouinGrid, modes: &[ModeData]) -> Plot {
    let n = grid.sites_per_axis();
    let mut values = vec![vec![0.0; n]; n];
    let to_index = |k: f64| ((k / grid.spacing()).round() as i64).rem_euclid(n as i64) as usize;
    let shift = |i: usize| (i + n / 2) % n;
    for m in modes {
        values[shift(to_index(m.point.k[1]))][shift(to_index(m.point.k[0]))] = m.frequency;
    }
    let axis: Vec<f64> = (0..n).map(|i| grid.momentum_of(i as i64 - (n / 2) as i64)).collect();
    Plot::Heat { name: "modes".into(), rows: axis.iter().map(|k| format!("{k:.6}")).collect(), columns: axis, values }
}

enum Scenario {
    Chain(ChainScenario),
    Square(SquareScenario),
}

impl Scenario {
    fn curves(&self, grid: Option<NuGrid>) -> Result<Vec<TransitionCurve>, CliError> {
        Ok(match self {
            Scenario::Chain(s) => s.curves_on(grid)?,
            Scenario::Square(s) => s.curves_on(grid)?,
        })
    }

    fn options(&self) -> ReconstructOptions {
        match self {
            Scenario::Chain(s) => s.options(),
            Scenario::Square(s) => s.options(),
        }
    }

    fn modes(&self) -> Result<Vec<ModeData>, CliError> {
        Ok(match self {
            Scenario::Chain(s) => s.modes()?,
            Scenario::Square(s) => s.modes()?,
        })
    }
}

fn build_scenario(cfg: &mut ExperimentConfig) -> Result<(Scenario, Model, f64), CliError> {
    let (model, beta) = build_model(cfg, true)?;
    let probe = &mut cfg.probe;
    let window = measurement_window(model.lattice(), probe.coupling, probe.window)?;
    let time = *probe.time.get_or_insert(probe.time_factor * window.t_min);
    let scenario = match &model {
        Model::Chain(m) => {
            let ratios = probe.ratios.get_or_insert_with(|| vec![1.0]);
            let [ratio] = ratios[..] else {
                return Err(CliError::config("the chain takes one overlap ratio"));
            };
            let threshold = *probe.detect_threshold.get_or_insert(1e-5);
            let mut s = ChainScenario::new(m.clone(), beta, probe.coupling, ratio, 1.0, threshold)?;
            s.window = window;
            s.time = time;
            Scenario::Chain(s)
        }
        Model::Square(m) => {
            let ratios = probe.ratios.get_or_insert_with(|| vec![0.6, 0.35]);
            let [r1, r2] = ratios[..] else {
                return Err(CliError::config("the square lattice takes two overlap ratios"));
            };
            let threshold = *probe.detect_threshold.get_or_insert(1e-6);
            let mut s = SquareScenario::new(m.clone(), beta, probe.coupling, [r1, r2], time, threshold)?;
            s.window = window;
            s.elastic_overlap = probe.elastic_overlap;
            Scenario::Square(s)
        }
    };
    Ok((scenario, model, time))
}

/// Explicit sweep from the config, or `None` for automatic coverage.
fn nu_grid(cfg: &ExperimentConfig) -> Result<Option<NuGrid>, CliError> {
    let p = &cfg.probe;
    match (p.nu_min, p.nu_max, p.nu_step) {
        (None, None, None) => Ok(None),
        (Some(a), Some(b), Some(s)) => Ok(Some(NuGrid::uniform(a, b, s)?)),
        _ => Err(CliError::config("give all of nu_min, nu_max, nu_step or none of them")),
    }
}

fn resolve_grid(cfg: &mut ExperimentConfig, grid: &NuGrid) {
    if let NuGrid::Uniform { start, step, len } = grid {
        cfg.probe.nu_min = Some(*start);
        cfg.probe.nu_max = Some(start + (*len as f64 - 1.0) * step);
        cfg.probe.nu_step = Some(*step);
    }
}

fn sweep(cfg: &mut ExperimentConfig) -> Result<Outcome, CliError> {
    let (scenario, model, time) = build_scenario(cfg)?;
    let mut out = Outcome::default();
    model_warnings(&model, &mut out);
    let requested = nu_grid(cfg)?;
    if let Some(g) = &requested {
        check_sweep_size(g.len())?;
    }
    let curves = scenario.curves(requested)?;
    check_sweep_size(curves[0].len())?;
    resolve_grid(cfg, &curves[0].nu_grid);
    for c in &curves {
        for w in &c.metadata.warnings {
            out.warn(w.clone());
        }
    }
    let labels: Vec<String> = curves.iter().map(|c| format!("gamma_tilde_{}", c.position.label())).collect();
    let mut columns = vec!["nu"];
    columns.extend(labels.iter().map(String::as_str));
    let mut table = Table::new("sweep", &columns);
    for i in 0..curves[0].len() {
        let mut row: Vec<Cell> = vec![curves[0].nu(i).into()];
        row.extend(curves.iter().map(|c| Cell::from(c.values[i])));
        table.push(row);
    }
    out.summary = json!({ "model": model.lattice().id(), "time": time, "points": curves[0].len(), "positions": curves.len() });
    out.plot = Some(Plot::Lines { table: "sweep".into(), x: 0, ys: (1..=curves.len()).collect(), log_y: true, points: false });
    out.tables.push(table);
    out.data = json!({ "curves": curves });
    Ok(out)
}

fn check_sweep_size(len: usize) -> Result<(), CliError> {
    if len > MAX_SWEEP_POINTS {
        return Err(CliError::new(
            "capacity",
            format!("{len} sweep points exceed {MAX_SWEEP_POINTS}; set nu_min/nu_max/nu_step or a shorter time"),
        ));
    }
    Ok(())
}

fn dispersion_table(r: &ReconstructedDispersion) -> Table {
    let positions = ["II", "III"];
    let ratio_cols: Vec<String> = positions[..r.dimension].iter().map(|p| format!("ratio_{p}")).collect();
    let mut columns: Vec<&str> = if r.dimension == 1 { vec!["k", "k_raw"] } else { vec!["kx", "ky", "kx_raw", "ky_raw"] };
    columns.extend(["omega", "assigned"]);
    columns.extend(ratio_cols.iter().map(String::as_str));
    let mut table = Table::new("dispersion", &columns);
    for p in &r.points {
        let mut row: Vec<Cell> = Vec::new();
        row.extend(p.momentum[..r.dimension].iter().map(|&k| Cell::from(k)));
        row.extend(p.raw_momentum[..r.dimension].iter().map(|&k| Cell::from(k)));
        row.extend([p.frequency.into(), true.into()]);
        row.extend(p.ratios.iter().map(|&v| Cell::from(v)));
        table.push(row);
    }
    for u in &r.unassigned {
        let mut row: Vec<Cell> = vec![f64::NAN.into(); 2 * r.dimension];
        row.extend([u.frequency.into(), false.into()]);
        row.extend(std::iter::repeat_n(Cell::from(f64::NAN), r.dimension));
        table.push(row);
    }
    table
}

fn reconstruct(cfg: &mut ExperimentConfig) -> Result<Outcome, CliError> {
    let (scenario, model, time) = build_scenario(cfg)?;
    let mut out = Outcome::default();
    model_warnings(&model, &mut out);
    let requested = nu_grid(cfg)?;
    let curves = scenario.curves(requested)?;
    resolve_grid(cfg, &curves[0].nu_grid);
    for c in &curves {
        for w in &c.metadata.warnings {
            out.warn(w.clone());
        }
    }
    let step = curves[0].nu_grid.max_step();
    let options = scenario.options();
    let (base, alts) = collect_peaks(&curves, &options)?;
    let modes = scenario.modes()?;
    let dim = options.grid.dimension();

    let eps = cfg.noise.relative_error;
    let runs = if eps > 0.0 { cfg.noise.seeds.max(1) } else { 1 };
    // consecutive runs take disjoint blocks of seeds, one seed per displaced position
    let seed_of = |i: usize| cfg.seed.wrapping_add((i * dim) as u64);
    let mut scores = Table::new("noise_scores", &["seed", "correct_fraction", "assigned", "unassigned", "status"]);
    let mut first = None;
    let mut fractions = Vec::new();
    for i in 0..runs {
        let mut o = options.clone();
        o.noise = (eps > 0.0).then(|| NoiseSpec { relative_error: eps, seed: seed_of(i) });
        match reconstruct_from_peaks(&base, &alts, &o) {
            Ok(r) => {
                let score = score_assignment(&r, &modes, step);
                fractions.push(score.fraction());
                scores.push(vec![
                    seed_of(i).into_cell(),
                    score.fraction().into(),
                    r.points.len().into(),
                    r.unassigned.len().into(),
                    "ok".into(),
                ]);
                if first.is_none() {
                    first = Some((r, score));
                }
            }
            Err(e) if runs > 1 => {
                fractions.push(0.0);
                scores.push(vec![seed_of(i).into_cell(), 0.0.into(), 0usize.into(), 0usize.into(), Cell::Text(e.kind().into())]);
            }
            Err(e) => return Err(e.into()),
        }
    }
    let (result, score) = first.ok_or_else(|| CliError::new("calibration", "every noise realisation failed"))?;
    for w in &result.warnings {
        out.warn(w.clone());
    }
    if !result.unassigned.is_empty() {
        out.warn(format!("{} peaks could not be assigned a momentum", result.unassigned.len()));
    }
    let mut summary = json!({
        "model": model.lattice().id(),
        "time": time,
        "grid_step": step,
        "peaks": result.peak_count(),
        "assigned": result.points.len(),
        "calibrations": result.calibrations,
        "score": score,
        "noise_seeds": (0..runs).map(seed_of).collect::<Vec<_>>(),
    });
    if runs > 1 {
        let mut sorted = fractions.clone();
        sorted.sort_by(f64::total_cmp);
        let median = if runs % 2 == 1 { sorted[runs / 2] } else { 0.5 * (sorted[runs / 2 - 1] + sorted[runs / 2]) };
        summary["median_correct_fraction"] = json!(median);
        summary["mean_correct_fraction"] = json!(fractions.iter().sum::<f64>() / runs as f64);
    }
    out.summary = summary;
    let table = dispersion_table(&result);
    let omega_col = 2 * dim;
    out.plot = Some(Plot::Lines { table: "dispersion".into(), x: 0, ys: vec![omega_col], log_y: false, points: true });
    out.data = json!({ "dispersion": result });
    out.tables.push(table);
    if runs > 1 {
        out.tables.push(scores);
    }
    Ok(out)
}

trait IntoCell {
    fn into_cell(self) -> Cell;
}

impl IntoCell for u64 {
    fn into_cell(self) -> Cell {
        // seeds above i64::MAX are written as text so they survive unchanged
        i64::try_from(self).map_or_else(|_| Cell::Text(self.to_string()), Cell::Int)
    }
}

fn separations(cfg: &mut ExperimentConfig, model: &Model) -> Result<Vec<[i64; 2]>, CliError> {
    let n = model.lattice().grid().sites_per_axis() as i64;
    let c = &mut cfg.correlations;
    let max = *c.max_separation.get_or_insert((n / 2 - 3).max(0));
    if max < 0 {
        return Err(CliError::config("max_separation must be non-negative"));
    }
    Ok(match (c.layout, model) {
        (SeparationLayout::Axis, _) => (1..=max).map(|r| [r, 0]).collect(),
        (SeparationLayout::Plane, Model::Square(_)) => {
            let mut out = Vec::new();
            for ry in -max..=max {
                for rx in -max..=max {
                    if (rx, ry) != (0, 0) {
                        out.push([rx, ry]);
                    }
                }
            }
            out
        }
        (SeparationLayout::Plane, Model::Chain(_)) => return Err(CliError::config("plane layout needs the square lattice")),
    })
}

fn correlations(cfg: &mut ExperimentConfig) -> Result<Outcome, CliError> {
    let (model, beta) = build_model(cfg, false)?;
    let mut out = Outcome::default();
    model_warnings(&model, &mut out);
    let kernel = match &model {
        Model::Chain(m) => CorrelationKernel::kitaev(m, beta)?,
        Model::Square(m) => CorrelationKernel::density(m, beta)?,
    };
    let seps = separations(cfg, &model)?;
    let c = &cfg.correlations;
    let times: Vec<f64> = match &c.times {
        Some(t) => t.clone(),
        None => {
            if !(c.t_step > 0.0 && c.t_max >= 0.0) {
                return Err(CliError::config("t_step must be positive and t_max non-negative"));
            }
            let n = (c.t_max / c.t_step + 1e-9).floor() as usize;
            (0..=n).map(|i| i as f64 * c.t_step).collect()
        }
    };
    let map = lightcone_map(&kernel, &seps, &times, c.quantity, c.normalize)?;
    let dim = model.lattice().grid().dimension();
    let sep_cols: &[&str] = if dim == 1 { &["r"] } else { &["rx", "ry"] };
    let value_col = match c.quantity {
        MapQuantity::GammaBar { .. } => "gamma_bar",
        MapQuantity::Correlation => "correlation",
        MapQuantity::ConnectedCorrelation => "connected_correlation",
    };
    let mut columns: Vec<&str> = sep_cols.to_vec();
    columns.extend(["t", value_col]);
    if map.normalized.is_some() {
        columns.push("normalized");
    }
    let mut table = Table::new("correlations", &columns);
    let sep_cells = |r: [i64; 2]| -> Vec<Cell> { r[..dim].iter().map(|&v| Cell::Int(v)).collect() };
    for (si, &r) in seps.iter().enumerate() {
        for (ti, &t) in times.iter().enumerate() {
            let mut row = sep_cells(r);
            row.extend([t.into(), map.values[si][ti].into()]);
            if let Some(norm) = &map.normalized {
                row.push(norm[si][ti].into());
            }
            table.push(row);
        }
    }
    let mut arrivals_cols: Vec<&str> = sep_cols.to_vec();
    arrivals_cols.push("arrival_time");
    let mut arrivals = Table::new("arrivals", &arrivals_cols);
    let fronts = map.arrival_times(c.arrival_fraction);
    for (&r, a) in seps.iter().zip(&fronts) {
        let mut row = sep_cells(r);
        row.push(a.unwrap_or(f64::NAN).into());
        arrivals.push(row);
    }
    let reached: Vec<f64> = fronts.iter().flatten().copied().collect();
    let inversions = reached.windows(2).filter(|w| w[1] < w[0]).count();
    out.summary = json!({
        "model": model.lattice().id(),
        "beta": beta,
        "separations": seps.len(),
        "times": times.len(),
        "global_max": map.global_max(),
        "arrived": reached.len(),
        "front_inversions": if dim == 1 || c.layout == SeparationLayout::Axis { json!(inversions) } else { Value::Null },
    });
    out.plot = correlation_plot(cfg.output.plot, &map, dim);
    if seps.is_empty() || times.is_empty() {
        out.warn("empty separation or time list; tables hold headers only");
    }
    out.data = json!({ "map": map });
    out.tables.push(table);
    out.tables.push(arrivals);
    Ok(out)
}

fn correlation_plot(kind: PlotKind, map: &CorrelationMap, dim: usize) -> Option<Plot> {
    let two_d = map.separations.len() > 1 && map.times.len() > 1;
    match kind {
        PlotKind::Line => Some(Plot::Lines { table: "arrivals".into(), x: 0, ys: vec![dim], log_y: false, points: true }),
        _ if two_d => Some(Plot::Heat {
            name: "correlations".into(),
            rows: map
                .separations
                .iter()
                .map(|r| if dim == 1 { r[0].to_string() } else { format!("{},{}", r[0], r[1]) })
                .collect(),
            columns: map.times.clone(),
            values: map.normalized.clone().unwrap_or_else(|| map.values.clone()),
        }),
        _ => None,
    }
}

fn bloch(cfg: &mut ExperimentConfig) -> Result<Outcome, CliError> {
    let b = &cfg.bloch;
    if b.samples < 2 {
        return Err(CliError::config("bloch.samples must be at least 2"));
    }
    let mut probe = ProbeConfig::new(1.0, cfg.probe.coupling)?;
    probe.wavefunction_widths = [b.probe_width; 2];
    probe.validate()?;
    let h = 1.0 / b.samples as f64;
    let reach = 40.0 * b.wannier_width.max(b.probe_width);
    let w = b.wannier_width;
    let samples = periodize(|d| axis_overlap(b.probe_width, w, d, OverlapKind::Linear), b.samples, h, reach);
    let result = bloch_reconstruct(&samples, &probe, h)?;
    let reference = periodize(|x| (PI * w * w).powf(-0.25) * (-x * x / (2.0 * w * w)).exp(), b.samples, h, reach);
    let mut table = Table::new("bloch", &["x", "sample", "w_k", "reference"]);
    let mut worst: f64 = 0.0;
    for i in 0..b.samples {
        worst = worst.max((result.values[i] - reference[i]).abs());
        table.push(vec![result.x[i].into(), samples[i].into(), result.values[i].into(), reference[i].into()]);
    }
    Ok(Outcome {
        summary: json!({ "samples": b.samples, "spacing": h, "max_abs_error": worst }),
        plot: Some(Plot::Lines { table: "bloch".into(), x: 0, ys: vec![1, 2, 3], log_y: false, points: false }),
        data: json!({ "bloch": result, "samples": samples }),
        tables: vec![table],
        ..Default::default()
    })
}

fn lindblad(cfg: &mut ExperimentConfig) -> Result<Outcome, CliError> {
    let l = &mut cfg.lindblad;
    if l.samples < 2 {
        return Err(CliError::config("lindblad.samples must be at least 2"));
    }
    let params = LindbladParams::new(l.weight, l.occupation, l.statistics)?;
    let gamma = decay_rate(&params);
    let t_max = *l.t_max.get_or_insert(5.0 / gamma);
    let times: Vec<f64> = (0..l.samples).map(|i| t_max * i as f64 / (l.samples - 1) as f64).collect();
    let evolved = evolve_numeric(&params, &times)?;
    let stationary = params.stationary_population();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut table = Table::new("lindblad", &["t", "rho_ee", "closed_form", "trace", "observed"]);
    let mut record = Vec::with_capacity(times.len());
    let mut worst: f64 = 0.0;
    for s in &evolved {
        let closed = excited_population(&params, s.time);
        worst = worst.max((s.excited - closed).abs());
        let observed = s.excited + l.noise * stationary * rng.random_range(-1.0..=1.0);
        record.push((s.time, observed));
        table.push(vec![s.time.into(), s.excited.into(), closed.into(), s.trace.into(), observed.into()]);
    }
    let mut out = Outcome::default();
    let fit = match extract_coupling(&record, l.occupation, l.statistics) {
        Ok(f) => {
            if let Some(reason) = &f.reason {
                out.warn(format!("coupling fit flagged: {reason}"));
            }
            json!({ "report": f, "relative_error": (f.weight - l.weight).abs() / l.weight })
        }
        Err(e) => {
            out.warn(format!("coupling fit failed: {e}"));
            Value::Null
        }
    };
    out.summary = json!({
        "decay_rate": gamma,
        "stationary_population": stationary,
        "emission_rate": params.emission_rate(),
        "absorption_rate": params.absorption_rate(),
        "max_numeric_error": worst,
        "fit": fit,
    });
    out.plot = Some(Plot::Lines { table: "lindblad".into(), x: 0, ys: vec![1, 4], log_y: false, points: false });
    out.data = json!({ "samples": evolved, "fit": out.summary["fit"].clone() });
    out.tables.push(table);
    Ok(out)
}

/// Probes used by `validate` that need a pair of distinct sites.
pub(crate) fn pair(a: i64, b: i64, nu: f64, g: f64) -> Result<ProbePair, CliError> {
    Ok(ProbePair::new([a, 0], [b, 0], nu, g)?)
}

/// Largest round-trip error of the square-lattice inversion on an `n × n` grid.
pub(crate) fn square_round_trip(n: usize) -> Result<f64, CliError> {
    let grid = BrillouinGrid::new(2, n, 1.0)?;
    let mut worst: f64 = 0.0;
    for p in grid.points() {
        let raw = invert_2d(GeometryForm::SquareBond.value(p.k), GeometryForm::SquarePlaquette.value(p.k), 1.0, 1.0)?;
        let mut truth = [p.k[0].abs(), p.k[1].abs()];
        truth.sort_by(f64::total_cmp);
        worst = worst.max((raw[0] - truth[0]).abs()).max((raw[1] - truth[1]).abs());
    }
    Ok(worst)
}
