//! Scenario dispatch: build the requested computation from a validated
//! config, evaluate sweep points (in parallel where enabled) and assemble
//! the result table in axis order.

use rtq_core::battery::{cycle_bound, cycle_bound_from_series, BatteryCycleReport};
use rtq_core::bogoliubov::{evolve_perturbative, random_symplectic_series, PerturbativeBogoliubov};
use rtq_core::fock::{build_oracle_state, oracle_covariance, oracle_entropy};
use rtq_core::gaussian::{make_state, von_neumann_entropy, CovarianceMatrix};
use rtq_core::gw::{gw_efficiency, gw_transform, StateFamily};
use rtq_core::modes::{ModePartition, ModeSpec, SqueezeSpec, SqueezedMode, ThermalParam};
use rtq_core::sweep::{grid, map_ordered};
use rtq_core::thermo::{
    efficiency_general, efficiency_passive, efficiency_sms, efficiency_tms, ThermoReport,
};

use crate::config::{Kind, ScenarioConfig, SweepCfg};
use crate::table::{fmt_f64, ResultTable};

#[derive(Debug)]
pub enum CliError {
    Schema(String),
    Domain {
        name: &'static str,
        message: String,
    },
}

impl CliError {
    fn domain<E: std::error::Error>(name: &'static str, err: E) -> Self {
        CliError::Domain {
            name,
            message: err.to_string(),
        }
    }
}

macro_rules! impl_from_domain {
    ($ty:ty) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::domain(e.name(), e)
            }
        }
    };
}

impl_from_domain!(rtq_core::modes::ModeError);
impl_from_domain!(rtq_core::gaussian::GaussianError);
impl_from_domain!(rtq_core::bogoliubov::BogoliubovError);
impl_from_domain!(rtq_core::thermo::ThermoError);
impl_from_domain!(rtq_core::battery::BatteryError);
impl_from_domain!(rtq_core::gw::GwError);
impl_from_domain!(rtq_core::fock::FockError);

fn report_row(prefix: &[String], report: &ThermoReport) -> Vec<String> {
    let mut row = prefix.to_vec();
    row.extend([
        report.scenario_id.clone(),
        fmt_f64(report.h),
        fmt_f64(report.xi),
        fmt_f64(report.delta_e_s),
        fmt_f64(report.delta_e_e),
        fmt_f64(report.delta_e_c),
        fmt_f64(report.delta_s_s),
        fmt_f64(report.eta),
        report.method.as_str().to_string(),
    ]);
    row
}

fn report_header(prefix: &[String], compare: bool) -> Vec<String> {
    let mut header: Vec<String> = prefix.to_vec();
    header.extend(
        ThermoReport::CSV_HEADER
            .split(',')
            .map(|s| s.to_string()),
    );
    if compare {
        header.extend(
            ["eta_closed", "eta_general", "abs_diff"]
                .iter()
                .map(|s| s.to_string()),
        );
    }
    header
}

/// Sweep axis values, or a single placeholder point when no sweep is set.
fn sweep_points(sweep: Option<&SweepCfg>) -> (Option<String>, Vec<f64>) {
    match sweep {
        Some(s) => (
            Some(s.parameter.clone()),
            grid(s.min, s.max, s.steps, s.scale.into()),
        ),
        None => (None, vec![f64::NAN]),
    }
}

pub fn run(config: &ScenarioConfig, compare: bool) -> Result<ResultTable, CliError> {
    match config.kind {
        Kind::Gw => run_gw(config, compare),
        Kind::Efficiency => run_efficiency(config, compare),
        Kind::Battery => {
            if compare {
                return Err(CliError::Schema(
                    "compare: only efficiency and gw kinds have closed forms".into(),
                ));
            }
            run_battery(config)
        }
        Kind::OracleCheck => {
            if compare {
                return Err(CliError::Schema(
                    "compare: only efficiency and gw kinds have closed forms".into(),
                ));
            }
            run_oracle_check(config)
        }
    }
}

fn family_initial_state(
    spec: ModeSpec,
    part: &ModePartition,
    family: StateFamily,
    r: f64,
    theta: f64,
) -> Result<(CovarianceMatrix, Option<SqueezeSpec>), CliError> {
    let squeeze = match family {
        StateFamily::Passive => None,
        StateFamily::Sms => Some(SqueezeSpec::SingleMode(
            part.system()
                .map(|index| SqueezedMode { index, r, theta })
                .collect(),
        )),
        StateFamily::Tms => {
            let system: Vec<usize> = part.system().collect();
            if system.len() != 2 {
                return Err(CliError::Domain {
                    name: "TmsPartition",
                    message: format!(
                        "two-mode squeezed family needs a two-mode System, got {}",
                        system.len()
                    ),
                });
            }
            Some(SqueezeSpec::TwoMode {
                pair: (system[0], system[1]),
                r,
                theta,
            })
        }
    };
    let state = make_state(spec, ThermalParam::ZERO, squeeze.as_ref())?;
    Ok((state, squeeze))
}

/// Closed-form efficiency for the family, where one exists.
fn closed_form(
    series: &PerturbativeBogoliubov,
    part: &ModePartition,
    family: StateFamily,
    r: f64,
    theta: f64,
    xi: ThermalParam,
    h: f64,
) -> Result<ThermoReport, CliError> {
    match family {
        StateFamily::Passive => Ok(efficiency_passive(series, part, xi)?),
        StateFamily::Sms => {
            let squeezed: Vec<SqueezedMode> = part
                .system()
                .map(|index| SqueezedMode { index, r, theta })
                .collect();
            Ok(efficiency_sms(series, part, &squeezed, xi)?)
        }
        StateFamily::Tms => {
            let system: Vec<usize> = part.system().collect();
            if system.len() != 2 {
                return Err(CliError::Domain {
                    name: "TmsPartition",
                    message: "two-mode squeezed family needs a two-mode System".into(),
                });
            }
            Ok(efficiency_tms(
                series,
                (system[0], system[1]),
                r,
                theta,
                xi,
                h,
            )?)
        }
    }
}

fn general_pipeline(
    series: &PerturbativeBogoliubov,
    part: &ModePartition,
    family: StateFamily,
    r: f64,
    theta: f64,
    xi: ThermalParam,
) -> Result<ThermoReport, CliError> {
    let spec = ModeSpec::new(series.mode_count()).expect("nonempty series");
    let (initial, _) = family_initial_state(spec, part, family, r, theta)?;
    let perturbed = evolve_perturbative(&initial, series)?;
    let mut report = efficiency_general(&initial, &perturbed.assemble(), part, xi)?;
    report.h = series.h();
    Ok(report)
}

fn run_gw(config: &ScenarioConfig, compare: bool) -> Result<ResultTable, CliError> {
    let gw_cfg = config.gw.as_ref().expect("validated");
    let family = config.state_family.unwrap_or(StateFamily::Passive);
    let (r, theta) = config
        .squeeze
        .map(|s| (s.r, s.theta))
        .unwrap_or((0.0, 0.0));
    gw_cfg.scenario()?; // validate the base scenario before sweeping
    let (axis, points) = sweep_points(config.sweep.as_ref());
    let id = config.scenario_id();

    let eval_point = |value: f64| -> Result<Vec<String>, CliError> {
        let mut cfg = gw_cfg.clone();
        if let Some(axis) = &axis {
            match axis.as_str() {
                "tau" => cfg.tau = value,
                "epsilon" => cfg.epsilon = value,
                "temperature_nK" => cfg.temperature_nK = value,
                _ => unreachable!("validated sweep axis"),
            }
        }
        let scenario = cfg.scenario()?;
        let part = match &config.partition {
            Some(p) => ModePartition::new(
                p.system.iter().copied(),
                p.environment.iter().copied(),
                scenario.spec(),
            )
            .map_err(rtq_core::gaussian::GaussianError::from)?,
            None => scenario.partition(),
        };
        let xi = scenario.xi()?;
        let series = gw_transform(&scenario)?;
        let mut report = general_pipeline(&series, &part, family, r, theta, xi)?;
        report.scenario_id = id.clone();
        let mut prefix = Vec::new();
        if axis.is_some() {
            prefix.push(fmt_f64(value));
        }
        let mut row = report_row(&prefix, &report);
        if compare {
            // the closed form applies to the resonant pair as the System
            let pair_in_system = part.in_system(scenario.pair.0) && part.in_system(scenario.pair.1);
            if !pair_in_system {
                return Err(CliError::Domain {
                    name: "NoClosedForm",
                    message: "closed form requires the resonant pair inside the System".into(),
                });
            }
            let eta_closed = match family {
                StateFamily::Tms => closed_form(
                    &series,
                    &part,
                    family,
                    r,
                    theta,
                    xi,
                    scenario.epsilon,
                )?
                .eta,
                _ => gw_efficiency(xi, scenario.kappa, family)?,
            };
            row.push(fmt_f64(eta_closed));
            row.push(fmt_f64(report.eta));
            row.push(fmt_f64((eta_closed - report.eta).abs()));
        }
        Ok(row)
    };

    let results = map_ordered(points.len(), |i| eval_point(points[i]));
    let mut prefix_header: Vec<String> = Vec::new();
    if let Some(axis) = &axis {
        prefix_header.push(format!("sweep_{axis}"));
    }
    let mut table = ResultTable::new(report_header(&prefix_header, compare));
    for res in results {
        table.push_row(res?);
    }
    Ok(table)
}

fn build_series(config: &ScenarioConfig, modes: usize, h: f64) -> Result<PerturbativeBogoliubov, CliError> {
    if let Some(gw_cfg) = &config.gw {
        let mut cfg = gw_cfg.clone();
        cfg.epsilon = h;
        cfg.modes = Some(modes);
        return Ok(gw_transform(&cfg.scenario()?)?);
    }
    let series_cfg = config.series.as_ref().expect("validated");
    if let Some(path) = &series_cfg.file {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Schema(format!(
            "series.file: cannot read {}: {e}",
            path.display()
        )))?;
        let series = PerturbativeBogoliubov::from_json(&text)?;
        return Ok(series.with_h(h));
    }
    let seed = series_cfg.seed.ok_or_else(|| {
        CliError::Schema("series: either a seed or a file is required".into())
    })?;
    let spec = ModeSpec::new(modes)?;
    Ok(random_symplectic_series(seed, spec, h))
}

fn run_efficiency(config: &ScenarioConfig, compare: bool) -> Result<ResultTable, CliError> {
    let family = config.state_family.expect("validated");
    let part_cfg = config.partition.as_ref().expect("validated");
    let modes = config
        .modes
        .unwrap_or(part_cfg.system.len() + part_cfg.environment.len());
    let spec = ModeSpec::new(modes)?;
    let part = ModePartition::new(
        part_cfg.system.iter().copied(),
        part_cfg.environment.iter().copied(),
        spec,
    )
    .map_err(rtq_core::gaussian::GaussianError::from)?;
    let base_xi = config.thermal.map(|t| t.xi).unwrap_or(0.0);
    let base_h = config
        .series
        .as_ref()
        .and_then(|s| s.h)
        .or(config.gw.as_ref().map(|g| g.epsilon))
        .ok_or_else(|| CliError::Schema("series.h: required for kind 'efficiency'".into()))?;
    let (base_r, theta) = config
        .squeeze
        .map(|s| (s.r, s.theta))
        .unwrap_or((0.0, 0.0));
    let (axis, points) = sweep_points(config.sweep.as_ref());
    let id = config.scenario_id();

    let eval_point = |value: f64| -> Result<Vec<String>, CliError> {
        let (mut h, mut xi_val, mut r) = (base_h, base_xi, base_r);
        if let Some(axis) = &axis {
            match axis.as_str() {
                "h" => h = value,
                "xi" => xi_val = value,
                "r" => r = value,
                _ => unreachable!("validated sweep axis"),
            }
        }
        let xi = ThermalParam::new(xi_val)?;
        let series = build_series(config, modes, h)?;
        let mut report = general_pipeline(&series, &part, family, r, theta, xi)?;
        report.scenario_id = id.clone();
        let mut prefix = Vec::new();
        if axis.is_some() {
            prefix.push(fmt_f64(value));
        }
        let mut row = report_row(&prefix, &report);
        if compare {
            let closed = closed_form(&series, &part, family, r, theta, xi, h)?;
            row.push(fmt_f64(closed.eta));
            row.push(fmt_f64(report.eta));
            row.push(fmt_f64((closed.eta - report.eta).abs()));
        }
        Ok(row)
    };

    let results = map_ordered(points.len(), |i| eval_point(points[i]));
    let mut prefix_header: Vec<String> = Vec::new();
    if let Some(axis) = &axis {
        prefix_header.push(format!("sweep_{axis}"));
    }
    let mut table = ResultTable::new(report_header(&prefix_header, compare));
    for res in results {
        table.push_row(res?);
    }
    Ok(table)
}

fn battery_row(prefix: &[String], report: &BatteryCycleReport) -> Vec<String> {
    let mut row = prefix.to_vec();
    row.extend([
        report.n.to_string(),
        fmt_f64(report.xi),
        fmt_f64(report.h),
        fmt_f64(report.a_n),
        fmt_f64(report.delta_t_over_t),
        fmt_f64(report.eta_cyc),
        fmt_f64(report.w4_n),
        fmt_f64(report.w_c_bound_over_kbt),
    ]);
    row
}

fn run_battery(config: &ScenarioConfig) -> Result<ResultTable, CliError> {
    let b = config.battery.expect("validated");
    let base_xi = config.thermal.expect("validated").xi;
    let base_h = b
        .h
        .or(config.series.as_ref().and_then(|s| s.h))
        .unwrap_or(1e-3);
    let (axis, points) = sweep_points(config.sweep.as_ref());

    let eval_point = |value: f64| -> Result<Vec<String>, CliError> {
        let (mut h, mut xi_val, mut a_n) = (base_h, base_xi, b.a_n);
        if let Some(axis) = &axis {
            match axis.as_str() {
                "h" => h = value,
                "xi" => xi_val = value,
                "a_n" => a_n = Some(value),
                _ => unreachable!("validated sweep axis"),
            }
        }
        let xi = ThermalParam::new(xi_val)?;
        let report = match a_n {
            Some(a_n) => cycle_bound(a_n, b.n, xi, h)?,
            None => {
                let modes = config.modes.unwrap_or(b.n.max(2));
                let series = build_series(config, modes, h)?;
                cycle_bound_from_series(&series, xi, b.n)?
            }
        };
        let mut prefix = Vec::new();
        if axis.is_some() {
            prefix.push(fmt_f64(value));
        }
        Ok(battery_row(&prefix, &report))
    };

    let results = map_ordered(points.len(), |i| eval_point(points[i]));
    let mut header: Vec<String> = Vec::new();
    if let Some(axis) = &axis {
        header.push(format!("sweep_{axis}"));
    }
    header.extend(
        BatteryCycleReport::CSV_HEADER
            .split(',')
            .map(|s| s.to_string()),
    );
    let mut table = ResultTable::new(header);
    for res in results {
        table.push_row(res?);
    }
    Ok(table)
}

fn run_oracle_check(config: &ScenarioConfig) -> Result<ResultTable, CliError> {
    let family = config.state_family.expect("validated");
    let d = config.oracle.map(|o| o.truncation).unwrap_or(40);
    let xi = ThermalParam::new(config.thermal.map(|t| t.xi).unwrap_or(0.0))?;
    let (r, theta) = config
        .squeeze
        .map(|s| (s.r, s.theta))
        .unwrap_or((0.5, 0.0));
    let modes = config.modes.unwrap_or(2).min(3);
    let spec = ModeSpec::new(modes)?;
    let squeeze = match family {
        StateFamily::Passive => None,
        StateFamily::Sms => Some(SqueezeSpec::SingleMode(vec![SqueezedMode {
            index: 1,
            r,
            theta,
        }])),
        StateFamily::Tms => {
            if modes < 2 {
                return Err(CliError::Schema(
                    "modes: two-mode squeezing needs at least two modes".into(),
                ));
            }
            Some(SqueezeSpec::TwoMode {
                pair: (1, 2),
                r,
                theta,
            })
        }
    };
    let gaussian = make_state(spec, xi, squeeze.as_ref())?;
    let oracle = build_oracle_state(spec, xi, squeeze.as_ref(), d)?;
    let cov = oracle_covariance(&oracle)?;

    let mut table = ResultTable::new(
        ["quantity", "gaussian_value", "oracle_value", "abs_diff"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    let u_dev = (cov.u() - gaussian.u())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let v_dev = (cov.v() - gaussian.v())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    table.push_row(vec![
        "u_block_max_abs_deviation".into(),
        fmt_f64(0.0),
        fmt_f64(u_dev),
        fmt_f64(u_dev),
    ]);
    table.push_row(vec![
        "v_block_max_abs_deviation".into(),
        fmt_f64(0.0),
        fmt_f64(v_dev),
        fmt_f64(v_dev),
    ]);
    for k in 1..=modes {
        let g = gaussian.mode_number(k)?;
        let o = oracle.mean_occupation(k);
        table.push_row(vec![
            format!("occupation_mode_{k}"),
            fmt_f64(g),
            fmt_f64(o),
            fmt_f64((g - o).abs()),
        ]);
    }
    let g_full = von_neumann_entropy(&gaussian)?;
    let o_full = oracle_entropy(&oracle, &(1..=modes).collect::<Vec<_>>())?;
    table.push_row(vec![
        "entropy_full".into(),
        fmt_f64(g_full),
        fmt_f64(o_full),
        fmt_f64((g_full - o_full).abs()),
    ]);
    for k in 1..=modes {
        let g = von_neumann_entropy(&gaussian.reduce(&[k])?)?;
        let o = oracle_entropy(&oracle, &[k])?;
        table.push_row(vec![
            format!("entropy_mode_{k}"),
            fmt_f64(g),
            fmt_f64(o),
            fmt_f64((g - o).abs()),
        ]);
    }
    Ok(table)
}
