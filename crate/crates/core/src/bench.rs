//! Case runs, profile export and parameter studies.

use crate::bspline::SpanSide;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::iga::{assemble, build_discretization, solve, DisplacementField, Variant};
use crate::laminate::PlateCase;
use crate::pagano::{build_oracle, normalize, OracleField, StressComponent};
use crate::recovery::{
    error_metric, recover_profile, stress_in_layer, NoBodyForce, RecoveredProfile, RecoveryMode, SampleGrid,
    TopTraction,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

pub const PROFILE_SCHEMA_VERSION: u32 = 1;

pub const PROFILE_COLUMNS: [&str; 15] = [
    "case_id", "n_layers", "S", "q", "p_inplane", "p_z", "n_el", "x", "y", "z", "component", "raw", "recovered",
    "oracle", "normalized",
];

/// Wall-clock seconds per phase.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub assembly: f64,
    pub solve: f64,
    pub recovery: f64,
}

impl PhaseTimings {
    pub fn assembly_and_solve(&self) -> f64 {
        self.assembly + self.solve
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Debug, Clone)]
pub struct SolvedCase {
    pub config: RunConfig,
    pub case: PlateCase,
    pub field: DisplacementField,
    pub scalar_dofs: usize,
    pub free_dofs: usize,
    pub residual: f64,
    /// Median assembly and solve times; recovery is filled in separately.
    pub timings: PhaseTimings,
}

/// Assembles and solves `repeats` times (at least once), keeping the median
/// phase times and the last solution.
pub fn solve_case(config: &RunConfig, repeats: usize) -> Result<SolvedCase> {
    let case = config.case()?;
    let disc = build_discretization(&case, &config.scheme())?;
    let mut assembly = Vec::new();
    let mut solving = Vec::new();
    let mut last = None;
    for _ in 0..repeats.max(1) {
        let t0 = Instant::now();
        let system = assemble(&disc);
        let t1 = Instant::now();
        let (x, residual) = solve(&system)?;
        solving.push(t1.elapsed().as_secs_f64());
        assembly.push((t1 - t0).as_secs_f64());
        last = Some((system, x, residual));
    }
    let (system, x, residual) = last.expect("at least one run");
    let field = disc.field_from_free(&system, &x)?;
    Ok(SolvedCase {
        config: config.clone(),
        scalar_dofs: disc.scalar_dofs(),
        free_dofs: system.size(),
        case,
        field,
        residual,
        timings: PhaseTimings { assembly: median(assembly), solve: median(solving), recovery: 0.0 },
    })
}

/// Raw, recovered and exact stresses through the thickness at one station.
#[derive(Debug, Clone)]
pub struct StationProfile {
    pub x: f64,
    pub y: f64,
    pub heights: Vec<(f64, usize)>,
    pub raw: Vec<[f64; 6]>,
    pub recovered: RecoveredProfile,
    pub oracle: Vec<[f64; 6]>,
}

fn recover_station(
    field: &DisplacementField,
    x: f64,
    y: f64,
    heights: &[(f64, usize)],
    mode: RecoveryMode,
) -> Result<RecoveredProfile> {
    let zs: Vec<f64> = heights.iter().map(|h| h.0).collect();
    let top = TopTraction::pressure(field.case().pressure(x, y));
    recover_profile(field, x, y, &zs, &NoBodyForce, mode, Some(top))
}

pub fn station_profile(
    field: &DisplacementField,
    oracle: &OracleField,
    x: f64,
    y: f64,
    heights: &[(f64, usize)],
    mode: RecoveryMode,
) -> Result<StationProfile> {
    let recovered = recover_station(field, x, y, heights, mode)?;
    let mut raw = Vec::with_capacity(heights.len());
    let mut exact = Vec::with_capacity(heights.len());
    for &(z, k) in heights {
        let p = [x, y, z];
        raw.push(stress_in_layer(field, p, k, SpanSide::Below)?.sigma);
        exact.push(oracle.stress_in_layer(p, k));
    }
    Ok(StationProfile { x, y, heights: heights.to_vec(), raw, recovered, oracle: exact })
}

/// Error metric per component over a sampling grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    /// Raw constitutive stresses, Voigt order.
    pub raw: [f64; 6],
    /// Recovered σ13, σ23, σ33.
    pub recovered: [f64; 3],
}

impl ErrorSummary {
    pub fn raw(&self, c: StressComponent) -> f64 {
        self.raw[c.voigt()]
    }

    pub fn recovered(&self, c: StressComponent) -> Option<f64> {
        StressComponent::OUT_OF_PLANE.iter().position(|&o| o == c).map(|i| self.recovered[i])
    }

    /// Largest recovered error over the three transverse components.
    pub fn recovered_max(&self) -> f64 {
        self.recovered.iter().fold(0.0, |m: f64, v| m.max(*v))
    }

    pub fn raw_out_of_plane_max(&self) -> f64 {
        StressComponent::OUT_OF_PLANE.iter().fold(0.0, |m: f64, c| m.max(self.raw(*c)))
    }
}

/// Compares raw and recovered stresses with the exact solution over `grid`.
/// Stations are processed concurrently when `parallel` is set; the result
/// does not depend on it.
pub fn grid_errors(
    field: &DisplacementField,
    oracle: &OracleField,
    grid: &SampleGrid,
    mode: RecoveryMode,
    parallel: bool,
) -> Result<ErrorSummary> {
    let run = |st: &[f64; 2]| station_profile(field, oracle, st[0], st[1], &grid.heights, mode);
    let profiles: Vec<StationProfile> = if parallel {
        grid.stations.par_iter().map(run).collect::<Result<_>>()?
    } else {
        grid.stations.iter().map(run).collect::<Result<_>>()?
    };
    let mut raw = vec![Vec::new(); 6];
    let mut rec = vec![Vec::new(); 3];
    let mut exact = vec![Vec::new(); 6];
    for p in &profiles {
        for (r, o) in p.raw.iter().zip(&p.oracle) {
            for c in 0..6 {
                raw[c].push(r[c]);
                exact[c].push(o[c]);
            }
        }
        for (i, c) in StressComponent::OUT_OF_PLANE.iter().enumerate() {
            rec[i].extend_from_slice(p.recovered.component(*c).expect("transverse component"));
        }
    }
    let mut out = ErrorSummary { raw: [0.0; 6], recovered: [0.0; 3] };
    for c in 0..6 {
        out.raw[c] = error_metric(&raw[c], &exact[c])?;
    }
    for (i, c) in StressComponent::OUT_OF_PLANE.iter().enumerate() {
        out.recovered[i] = error_metric(&rec[i], &exact[c.voigt()])?;
    }
    Ok(out)
}

/// Seconds spent recovering every station of `grid`, sequentially.
pub fn time_recovery(field: &DisplacementField, grid: &SampleGrid, mode: RecoveryMode) -> Result<f64> {
    let t0 = Instant::now();
    for st in &grid.stations {
        recover_station(field, st[0], st[1], &grid.heights, mode)?;
    }
    Ok(t0.elapsed().as_secs_f64())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseReport {
    pub case_id: String,
    pub config: RunConfig,
    pub scalar_dofs: usize,
    pub free_dofs: usize,
    pub residual: f64,
    pub timings: PhaseTimings,
    pub errors: ErrorSummary,
}

/// Solve, recover on the configured grid and compare with the exact solution.
pub fn run_case(config: &RunConfig, repeats: usize, parallel: bool) -> Result<CaseReport> {
    let mut solved = solve_case(config, repeats)?;
    let grid = config.grid(&solved.case)?;
    let mode = config.recovery.mode;
    let rec: Vec<f64> =
        (0..repeats.max(1)).map(|_| time_recovery(&solved.field, &grid, mode)).collect::<Result<_>>()?;
    solved.timings.recovery = median(rec);
    let oracle = build_oracle(&solved.case)?;
    let errors = grid_errors(&solved.field, &oracle, &grid, mode, parallel)?;
    Ok(CaseReport {
        case_id: config.case_id(),
        config: config.clone(),
        scalar_dofs: solved.scalar_dofs,
        free_dofs: solved.free_dofs,
        residual: solved.residual,
        timings: solved.timings,
        errors,
    })
}

/// One line of the profile CSV. Values are `None` where a column does not
/// apply (no recovered in-plane stresses, no discrete solution in an oracle
/// dump).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub case_id: String,
    pub n_layers: usize,
    #[serde(rename = "S")]
    pub slenderness: f64,
    pub q: usize,
    pub p_inplane: usize,
    pub p_z: usize,
    pub n_el: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub component: String,
    pub raw: Option<f64>,
    pub recovered: Option<f64>,
    pub oracle: f64,
    pub normalized: bool,
}

fn station(case: &PlateCase, x_rel: f64, y_rel: f64) -> Result<(f64, f64)> {
    for v in [x_rel, y_rel] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidSampling(format!("relative station coordinate {v} outside (0, 1)")));
        }
    }
    Ok((x_rel * case.length(), y_rel * case.length()))
}

/// Profile heights: the bottom face followed by the grid heights of every ply.
fn profile_heights(config: &RunConfig, case: &PlateCase) -> Result<Vec<(f64, usize)>> {
    let grid = SampleGrid::new(case, 1, config.recovery.samples_per_layer)?;
    let mut h = vec![(0.0, 0)];
    h.extend(grid.heights);
    Ok(h)
}

fn row_template(config: &RunConfig) -> ProfileRow {
    let d = &config.discretization;
    ProfileRow {
        case_id: config.case_id(),
        n_layers: config.plate.n_layers,
        slenderness: config.plate.slenderness,
        q: config.scheme().z_points_per_layer(),
        p_inplane: d.degree_inplane,
        p_z: d.degree_z,
        n_el: d.elements_inplane,
        x: 0.0,
        y: 0.0,
        z: 0.0,
        component: String::new(),
        raw: None,
        recovered: None,
        oracle: 0.0,
        normalized: false,
    }
}

/// Rows for every height and stress component at the station
/// `(x_rel L, y_rel L)`.
pub fn profile_rows(
    solved: &SolvedCase,
    oracle: &OracleField,
    x_rel: f64,
    y_rel: f64,
    normalized: bool,
) -> Result<Vec<ProfileRow>> {
    let config = &solved.config;
    let case = &solved.case;
    let (x, y) = station(case, x_rel, y_rel)?;
    let heights = profile_heights(config, case)?;
    let prof = station_profile(&solved.field, oracle, x, y, &heights, config.recovery.mode)?;
    let scale = |v: f64, c| if normalized { normalize(v, c, case) } else { v };
    let template = row_template(config);
    let mut rows = Vec::with_capacity(heights.len() * 6);
    for (i, &(z, _)) in heights.iter().enumerate() {
        for c in StressComponent::ALL {
            rows.push(ProfileRow {
                x,
                y,
                z,
                component: c.name().to_string(),
                raw: Some(scale(prof.raw[i][c.voigt()], c)),
                recovered: prof.recovered.component(c).map(|r| scale(r[i], c)),
                oracle: scale(prof.oracle[i][c.voigt()], c),
                normalized,
                ..template.clone()
            });
        }
    }
    Ok(rows)
}

/// Exact-solution rows only, on the same heights as [`profile_rows`].
pub fn oracle_rows(config: &RunConfig, x_rel: f64, y_rel: f64, normalized: bool) -> Result<Vec<ProfileRow>> {
    let case = config.case()?;
    let (x, y) = station(&case, x_rel, y_rel)?;
    let oracle = build_oracle(&case)?;
    let template = row_template(config);
    let mut rows = Vec::new();
    for (z, k) in profile_heights(config, &case)? {
        let s = oracle.stress_in_layer([x, y, z], k);
        for c in StressComponent::ALL {
            let v = s[c.voigt()];
            rows.push(ProfileRow {
                x,
                y,
                z,
                component: c.name().to_string(),
                oracle: if normalized { normalize(v, c, &case) } else { v },
                normalized,
                ..template.clone()
            });
        }
    }
    Ok(rows)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Writes profile rows under a `# lamina-profile v<N>` comment line.
pub fn write_profile_csv<W: Write>(mut out: W, rows: &[ProfileRow]) -> Result<()> {
    writeln!(out, "# lamina-profile v{PROFILE_SCHEMA_VERSION}")?;
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(PROFILE_COLUMNS).map_err(csv_error)?;
    }
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_profile_csv<R: std::io::Read>(input: R) -> Result<Vec<ProfileRow>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    Slenderness,
    Layers,
    Quadrature,
    Elements,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Slenderness => "S",
            SweepAxis::Layers => "n_layers",
            SweepAxis::Quadrature => "q",
            SweepAxis::Elements => "n_elements",
        }
    }

    /// Copy of `base` with this axis set to `value`.
    pub fn apply(self, base: &RunConfig, value: f64) -> Result<RunConfig> {
        let mut c = base.clone();
        let count = || {
            if value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
                Ok(value as usize)
            } else {
                Err(Error::InvalidSampling(format!("{} expects a positive integer, got {value}", self.name())))
            }
        };
        match self {
            SweepAxis::Slenderness if value > 0.0 && value.is_finite() => c.plate.slenderness = value,
            SweepAxis::Slenderness => {
                return Err(Error::InvalidSampling(format!("slenderness {value} must be positive")))
            }
            SweepAxis::Layers => {
                c.plate.n_layers = count()?;
                c.plate.angles = None;
            }
            SweepAxis::Quadrature => c.discretization.quad_per_layer = count()?,
            SweepAxis::Elements => c.discretization.elements_inplane = count()?,
        }
        Ok(c)
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        [SweepAxis::Slenderness, SweepAxis::Layers, SweepAxis::Quadrature, SweepAxis::Elements]
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown sweep axis `{s}` (expected S, n_layers, q or n_elements)"))
    }
}

/// One case of a study. Error and timing columns are empty when the case
/// failed or the study did not measure them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub case_id: String,
    pub variant: Variant,
    pub axis_value: Option<f64>,
    pub n_layers: usize,
    #[serde(rename = "S")]
    pub slenderness: f64,
    pub q: usize,
    pub p_inplane: usize,
    pub p_z: usize,
    pub n_el: usize,
    pub scalar_dofs: Option<usize>,
    pub free_dofs: Option<usize>,
    pub residual: Option<f64>,
    pub assembly_s: Option<f64>,
    pub solve_s: Option<f64>,
    pub recovery_s: Option<f64>,
    pub raw_s13: Option<f64>,
    pub raw_s23: Option<f64>,
    pub raw_s33: Option<f64>,
    pub rec_s13: Option<f64>,
    pub rec_s23: Option<f64>,
    pub rec_s33: Option<f64>,
    pub rec_max: Option<f64>,
    pub failure: Option<String>,
}

impl StudyRow {
    fn blank(config: &RunConfig) -> Self {
        let d = &config.discretization;
        Self {
            case_id: config.case_id(),
            variant: d.variant,
            axis_value: None,
            n_layers: config.plate.n_layers,
            slenderness: config.plate.slenderness,
            q: config.scheme().z_points_per_layer(),
            p_inplane: d.degree_inplane,
            p_z: d.degree_z,
            n_el: d.elements_inplane,
            scalar_dofs: None,
            free_dofs: None,
            residual: None,
            assembly_s: None,
            solve_s: None,
            recovery_s: None,
            raw_s13: None,
            raw_s23: None,
            raw_s33: None,
            rec_s13: None,
            rec_s23: None,
            rec_s33: None,
            rec_max: None,
            failure: None,
        }
    }

    fn from_report(config: &RunConfig, r: &CaseReport) -> Self {
        let e = &r.errors;
        Self {
            scalar_dofs: Some(r.scalar_dofs),
            free_dofs: Some(r.free_dofs),
            residual: Some(r.residual),
            assembly_s: Some(r.timings.assembly),
            solve_s: Some(r.timings.solve),
            recovery_s: Some(r.timings.recovery),
            raw_s13: Some(e.raw(StressComponent::S13)),
            raw_s23: Some(e.raw(StressComponent::S23)),
            raw_s33: Some(e.raw(StressComponent::S33)),
            rec_s13: Some(e.recovered[0]),
            rec_s23: Some(e.recovered[1]),
            rec_s33: Some(e.recovered[2]),
            rec_max: Some(e.recovered_max()),
            ..Self::blank(config)
        }
    }

    fn failed(config: &RunConfig, err: &Error) -> Self {
        Self { failure: Some(format!("{}: {err}", err.kind())), ..Self::blank(config) }
    }

    pub fn assembly_and_solve(&self) -> Option<f64> {
        Some(self.assembly_s? + self.solve_s?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub study: String,
    pub rows: Vec<StudyRow>,
}

impl StudyReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }

    pub fn find(&self, variant: Variant, n_layers: usize, q: usize) -> Option<&StudyRow> {
        self.rows.iter().find(|r| r.variant == variant && r.n_layers == n_layers && r.q == q)
    }

    /// Ratios of every pair of assembly+solve times, as
    /// `(numerator case, denominator case, ratio)`.
    pub fn time_ratios(&self) -> Vec<(String, String, f64)> {
        let timed: Vec<(&str, f64)> =
            self.rows.iter().filter_map(|r| Some((r.case_id.as_str(), r.assembly_and_solve()?))).collect();
        let mut out = Vec::new();
        for (i, a) in timed.iter().enumerate() {
            for b in &timed[i + 1..] {
                out.push((a.0.to_string(), b.0.to_string(), a.1 / b.1));
            }
        }
        out
    }
}

/// Runs `base` once per axis value. A failing case is recorded in its row
/// and the sweep goes on. With `parallel`, cases run concurrently; row order
/// follows `values` either way.
pub fn sweep(base: &RunConfig, axis: SweepAxis, values: &[f64], parallel: bool) -> StudyReport {
    let one = |&v: &f64| {
        let mut row = match axis.apply(base, v) {
            Ok(cfg) => match run_case(&cfg, 1, false) {
                Ok(r) => StudyRow::from_report(&cfg, &r),
                Err(e) => StudyRow::failed(&cfg, &e),
            },
            Err(e) => StudyRow::failed(base, &e),
        };
        row.axis_value = Some(v);
        row
    };
    let rows = if parallel { values.par_iter().map(one).collect() } else { values.iter().map(one).collect() };
    StudyReport { study: format!("sweep-{}", axis.name()), rows }
}

/// Assembly, solve and recovery times for the layerwise scheme and the
/// single-element scheme with 2 and 4 points per ply, for every layer count.
/// Times are medians over `repeats` runs; no accuracy is computed.
pub fn timing_study(base: &RunConfig, layer_values: &[usize], repeats: usize) -> StudyReport {
    let mut rows = Vec::new();
    for &n in layer_values {
        let mut variants = Vec::new();
        let mut lw = base.clone();
        lw.plate.n_layers = n;
        lw.discretization.variant = Variant::Layerwise;
        variants.push(lw);
        for q in [2, 4] {
            let mut se = base.clone();
            se.plate.n_layers = n;
            se.discretization.variant = Variant::SingleElement;
            se.discretization.quad_per_layer = q;
            variants.push(se);
        }
        for cfg in variants {
            let row = match timed_row(&cfg, repeats) {
                Ok(r) => r,
                Err(e) => StudyRow::failed(&cfg, &e),
            };
            rows.push(StudyRow { axis_value: Some(n as f64), ..row });
        }
    }
    StudyReport { study: "timing".into(), rows }
}

fn timed_row(cfg: &RunConfig, repeats: usize) -> Result<StudyRow> {
    let solved = solve_case(cfg, repeats)?;
    let grid = cfg.grid(&solved.case)?;
    let rec: Vec<f64> = (0..repeats.max(1))
        .map(|_| time_recovery(&solved.field, &grid, cfg.recovery.mode))
        .collect::<Result<_>>()?;
    Ok(StudyRow {
        scalar_dofs: Some(solved.scalar_dofs),
        free_dofs: Some(solved.free_dofs),
        residual: Some(solved.residual),
        assembly_s: Some(solved.timings.assembly),
        solve_s: Some(solved.timings.solve),
        recovery_s: Some(median(rec)),
        ..StudyRow::blank(cfg)
    })
}
