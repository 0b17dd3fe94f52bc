use std::fmt;
use std::path::Path;

use serde_json::{json, Map, Value};
use temporal_bell::squid::{self, FluxPropagator, SpectralBasis};
use temporal_bell::{
    bistability_index, cell_from_table, default_grid, eigensolve, localized_states, overlap_curve_on,
    pseudo_joint_from_table, two_level_consistency, well_summary, BcWeighting, Dynamics, InequalityType,
    OverlapCurve64, PotentialForm, Sign, SignAssignment, SpatialGrid, SpinDynamics, SquidParams, TableGrid64,
};

use crate::config::{ConfigError, Format, RunConfig, SignsSelection, SquidConfig, SystemConfig};
use crate::output::{emit, fmt_float, json_float, json_text, Csv};

/// Failure classes, mapped onto process exit codes.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Compute(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Compute(_) => 1,
            Failure::Config(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Compute(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<temporal_bell::Error> for Failure {
    fn from(e: temporal_bell::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute(format!("writing output: {e}"))
    }
}

type Outcome<T> = Result<T, Failure>;

/// Symmetric grid spanning the default window with the configured number of points.
fn squid_grid(params: &SquidParams, n_points: usize) -> Outcome<SpatialGrid> {
    let g = default_grid(params)?;
    Ok(SpatialGrid::symmetric(g.phi_max, n_points)?)
}

fn squid_basis(cfg: &SquidConfig) -> Outcome<SpectralBasis> {
    let grid = squid_grid(&cfg.params, cfg.n_points)?;
    Ok(eigensolve(&cfg.params, &grid, cfg.modes)?)
}

fn dynamics(cfg: &RunConfig) -> Outcome<Box<dyn Dynamics<f64>>> {
    Ok(match &cfg.system {
        SystemConfig::Spin { omega } => Box::new(SpinDynamics::spin(*omega)?),
        SystemConfig::Squid(s) => Box::new(FluxPropagator::new(&squid_basis(s)?, s.modes)?),
    })
}

fn system_name(cfg: &RunConfig) -> &'static str {
    match cfg.system {
        SystemConfig::Spin { .. } => "spin",
        SystemConfig::Squid(_) => "squid",
    }
}

fn weighting_name(w: BcWeighting) -> &'static str {
    match w {
        BcWeighting::Joint => "joint",
        BcWeighting::Conditional => "conditional",
    }
}

/// A table with an optional leading `signs` column when several
/// assignments are rendered together.
struct Table {
    columns: &'static [&'static str],
    groups: Vec<(SignAssignment, Vec<Vec<f64>>)>,
    labelled: bool,
}

impl Table {
    fn csv(&self) -> String {
        let mut header: Vec<&str> = Vec::new();
        if self.labelled {
            header.push("signs");
        }
        header.extend(self.columns);
        let mut csv = Csv::new(&header);
        for (signs, rows) in &self.groups {
            for row in rows {
                let label = self.labelled.then(|| signs.to_string());
                csv.row(label.into_iter().chain(row.iter().map(|&x| fmt_float(x))));
            }
        }
        csv.into_string()
    }

    fn json(&self, meta: Map<String, Value>) -> Value {
        let groups: Vec<Value> = self
            .groups
            .iter()
            .map(|(signs, rows)| {
                let rows: Vec<Value> =
                    rows.iter().map(|r| Value::Array(r.iter().map(|&x| json_float(x)).collect())).collect();
                json!({ "signs": signs.to_string(), "rows": rows })
            })
            .collect();
        let mut out = meta;
        out.insert("columns".into(), json!(self.columns));
        out.insert("groups".into(), Value::Array(groups));
        Value::Object(out)
    }

    fn render(&self, format: Format, meta: Map<String, Value>) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => json_text(&self.json(meta)),
        }
    }
}

fn grid_meta(cfg: &RunConfig, grid: &TableGrid64) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("system".into(), json!(system_name(cfg)));
    m.insert("n_time".into(), json!(cfg.n_time));
    m.insert("window".into(), json_float(grid.window));
    m.insert("bc_weighting".into(), json!(weighting_name(cfg.bc_weighting)));
    m
}

fn bracket(b: temporal_bell::XiBracket64) -> Value {
    json!({ "lo": json_float(b.lo), "hi": json_float(b.hi) })
}

pub fn overlap_curve(cfg: &RunConfig) -> Outcome<()> {
    let dynamics = dynamics(cfg)?;
    let grid = TableGrid64::build(dynamics.as_ref(), cfg.n_time)?;
    let curves: Vec<OverlapCurve64> = cfg
        .signs
        .assignments()
        .into_iter()
        .map(|s| overlap_curve_on(&grid, s, cfg.n_xi, cfg.xi_tolerance, cfg.bc_weighting))
        .collect::<Result<_, _>>()?;
    let spread = curves.iter().flat_map(|a| curves.iter().map(move |b| a.max_deviation(b))).fold(0.0, f64::max);
    let worst = |f: fn(&OverlapCurve64) -> temporal_bell::XiBracket64| {
        curves.iter().map(f).fold(None, |m: Option<temporal_bell::XiBracket64>, b| match m {
            Some(m) if m.hi >= b.hi => Some(m),
            _ => Some(b),
        })
    };

    let mut meta = grid_meta(cfg, &grid);
    meta.insert("n_xi".into(), json!(cfg.n_xi));
    meta.insert("xi_tolerance".into(), json_float(cfg.xi_tolerance));
    meta.insert("xi_I".into(), worst(|c| c.xi_i).map_or(Value::Null, bracket));
    meta.insert("xi_II".into(), worst(|c| c.xi_ii).map_or(Value::Null, bracket));
    meta.insert("max_pairwise_deviation".into(), json_float(spread));
    let per_assignment: Vec<Value> = curves
        .iter()
        .map(|c| json!({ "signs": c.signs.to_string(), "xi_I": bracket(c.xi_i), "xi_II": bracket(c.xi_ii) }))
        .collect();
    meta.insert("assignments".into(), Value::Array(per_assignment));

    let table = Table {
        columns: &["xi_over_absX", "overlap_I", "overlap_II"],
        groups: curves.iter().map(|c| (c.signs, c.samples.iter().map(|&(x, a, b)| vec![x, a, b]).collect())).collect(),
        labelled: cfg.signs == SignsSelection::All,
    };
    emit(cfg.output.as_deref(), &table.render(cfg.format, meta.clone()))?;
    write_sidecar(cfg, &Value::Object(meta))
}

/// The sidecar goes to its own path when configured; otherwise it is
/// printed to stdout, provided stdout is not already carrying the table.
fn write_sidecar(cfg: &RunConfig, meta: &Value) -> Outcome<()> {
    let text = json_text(meta);
    match (&cfg.sidecar, &cfg.output) {
        (Some(path), _) => emit(Some(path), &text)?,
        (None, Some(_)) => emit(None, &text)?,
        (None, None) => {}
    }
    Ok(())
}

pub fn violation_map(cfg: &RunConfig) -> Outcome<()> {
    let dynamics = dynamics(cfg)?;
    let grid = TableGrid64::build(dynamics.as_ref(), cfg.n_time)?;
    let groups = cfg
        .signs
        .assignments()
        .into_iter()
        .map(|s| {
            let cells = grid.violation_map(cfg.inequality, s, cfg.bc_weighting)?;
            let rows = cells.iter().map(|c| vec![c.t_ab, c.t_bc, c.delta_p, c.dx_ab, c.dx_ac, c.dx_bc]).collect();
            Ok((s, rows))
        })
        .collect::<Result<_, temporal_bell::Error>>()?;
    let table = Table {
        columns: &["t_ab", "t_bc", "delta_p", "dx_ab", "dx_ac", "dx_bc"],
        groups,
        labelled: cfg.signs == SignsSelection::All,
    };
    let mut meta = grid_meta(cfg, &grid);
    meta.insert("inequality".into(), json!(cfg.inequality.to_string()));
    emit(cfg.output.as_deref(), &table.render(cfg.format, meta))?;
    Ok(())
}

pub fn pseudo_map(cfg: &RunConfig) -> Outcome<()> {
    let dynamics = dynamics(cfg)?;
    let grid = TableGrid64::build(dynamics.as_ref(), cfg.n_time)?;
    let groups = cfg
        .signs
        .assignments()
        .into_iter()
        .map(|s| {
            let reference = -s.b;
            let rows = grid
                .tables()
                .iter()
                .map(|t| {
                    let q = pseudo_joint_from_table(s.a, reference, t);
                    let dp = cell_from_table(InequalityType::I, s, t, cfg.bc_weighting)?.delta_p;
                    let (p, m) = (Sign::Plus, Sign::Minus);
                    Ok(vec![t.t_ab, t.t_bc, q.get(p, p), q.get(p, m), q.get(m, p), q.get(m, m), dp, q.min_entry()])
                })
                .collect::<Result<_, temporal_bell::Error>>()?;
            Ok((s, rows))
        })
        .collect::<Result<_, temporal_bell::Error>>()?;
    let table = Table {
        columns: &["t_ab", "t_bc", "q_pp", "q_pm", "q_mp", "q_mm", "delta_p_I", "min_q"],
        groups,
        labelled: cfg.signs == SignsSelection::All,
    };
    emit(cfg.output.as_deref(), &table.render(cfg.format, grid_meta(cfg, &grid)))?;
    Ok(())
}

fn form_report(cfg: &SquidConfig, form: PotentialForm) -> Outcome<Value> {
    let params = cfg.params.with_form(form);
    let grid = squid_grid(&params, cfg.n_points)?;
    let s = well_summary(&params, &grid, cfg.modes)?;
    let refined = well_summary(&params, &grid.refined(), 2)?;
    let basis = eigensolve(&params, &grid, cfg.modes)?;
    let (plus, _) = localized_states(&basis)?;
    let prop = FluxPropagator::new(&basis, cfg.modes)?;
    Ok(json!({
        "beta": json_float(s.beta),
        "phi0": json_float(s.phi0),
        "barrier_J": json_float(s.barrier),
        "omega0_rad_s": json_float(s.omega0),
        "sigma0_sq_over_phi0_sq": json_float(s.sigma0_sq_over_phi0_sq()),
        "deltaE0_J": json_float(s.splitting),
        "tunnel_freq_Hz": json_float(s.tunnel_frequency()),
        "localization_mass": json_float(plus.half_line_mass(&basis, Sign::Plus)),
        "two_level_deviation_32x32": json_float(two_level_consistency(&prop, 32)?),
        "convergence": {
            "phi_half_width": json_float(grid.phi_max),
            "n_points": grid.n_points,
            "modes": cfg.modes,
            "refined_n_points": grid.refined().n_points,
            "deltaE0_refined_J": json_float(refined.splitting),
            "deltaE0_relative_change": json_float(refined.splitting / s.splitting - 1.0),
            "orthonormality_defect": json_float(basis.orthonormality_defect()),
            "boundary_ratio": json_float(basis.boundary_ratio().1),
        },
    }))
}

pub fn squid_report(cfg: &RunConfig) -> Outcome<()> {
    let SystemConfig::Squid(s) = &cfg.system else {
        return Err(Failure::Config("squid-report requires system \"squid\"".into()));
    };
    let (beta, bistable) = bistability_index(&s.params);
    if !bistable {
        return Err(temporal_bell::Error::NotBistable { beta }.into());
    }
    let p = &s.params;
    let mut forms = Map::new();
    for form in PotentialForm::ALL {
        forms.insert(form.name().into(), form_report(s, form)?);
    }
    let report = json!({
        "params": {
            "L_H": json_float(p.inductance),
            "C_F": json_float(p.capacitance),
            "I_c_A": json_float(p.critical_current),
            "flux_bias_n": p.flux_bias,
            "flux_quantum_Wb": json_float(squid::FLUX_QUANTUM),
        },
        "beta": json_float(beta),
        "forms": forms,
    });
    emit(cfg.output.as_deref(), &json_text(&report))?;
    Ok(())
}

pub fn read_config(path: Option<&Path>) -> Outcome<Option<String>> {
    path.map(|p| std::fs::read_to_string(p).map_err(|e| Failure::Config(format!("cannot read {}: {e}", p.display()))))
        .transpose()
}
