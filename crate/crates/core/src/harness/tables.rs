//! CSV tables behind each CLI subcommand.

use crate::analysis::{resource_report, squint_map, PowerConstants};
use crate::error::Result;
use crate::harness::config::{ArrayChoice, SimConfig};
use crate::harness::csv::Table;
use crate::harness::sweeps::{
    run_angle_profile, run_bounds, run_power_profile, run_snr_sweep, BoundPoint, PowerPoint, SweepPoint,
};
use crate::placement::{squint_coverage_check, ArrayGeometry};
use crate::row;
use crate::lens::CarrierGrid;

pub fn mse_table(points: &[SweepPoint]) -> Table {
    let mut t = Table::new(&["snr_db", "array", "estimator", "mse", "trials"]);
    for p in points {
        t.push(row![p.abscissa, p.array.label(), p.label.as_str(), p.mse, p.trials]);
    }
    t
}

pub fn outage_table(points: &[SweepPoint]) -> Table {
    let mut t = Table::new(&["snr_db", "array", "estimator", "p_req", "trials"]);
    for p in points {
        t.push(row![p.abscissa, p.array.label(), p.label.as_str(), p.p_req, p.trials]);
    }
    t
}

pub fn angle_table(points: &[SweepPoint]) -> Table {
    let mut t = Table::new(&["theta_c_deg", "array", "estimator", "mse", "p_req", "trials"]);
    for p in points {
        t.push(row![p.abscissa, p.array.label(), p.label.as_str(), p.mse, p.p_req, p.trials]);
    }
    t
}

pub fn power_profile_table(points: &[PowerPoint]) -> Table {
    let mut t = Table::new(&["theta_c_deg", "array", "g_mc", "g_approx", "g_mc_static"]);
    for p in points {
        t.push(row![p.theta_deg, p.array.label(), p.g_mc, p.g_approx, p.g_mc_static]);
    }
    t
}

pub fn bounds_table(points: &[BoundPoint]) -> Table {
    let mut t = Table::new(&["snr_db", "array", "mse", "mse_lb", "p_out", "mean_g", "mean_subset"]);
    for p in points {
        t.push(row![p.snr_db, p.array.label(), p.mse, p.mse_lb, p.p_out, p.mean_g, p.mean_subset]);
    }
    t
}

pub fn placement_table(geometry: &ArrayGeometry, grid: &CarrierGrid) -> Table {
    let report = squint_coverage_check(geometry, grid);
    let x = geometry.positions_m();
    let mut t = Table::new(&["n", "omega", "x_meters", "gap", "squint_lo", "squint_hi", "lemma2_ok"]);
    for (e, x) in report.elements.iter().zip(x) {
        t.push(row![e.n, e.omega, x, e.gap, e.range.low, e.range.high, e.satisfied]);
    }
    t
}

pub fn squint_table(cfg: &SimConfig, array: ArrayChoice) -> Result<Table> {
    let geometry = cfg.geometry(array)?;
    let grid = cfg.grid()?;
    let angles: Vec<f64> = cfg.sweep.theta_deg.iter().map(|d| d.to_radians()).collect();
    let params = cfg.channel_params(0.0, 0.0);
    let map = squint_map(&geometry, &grid, &angles, params.v_rx, params.v_sc)?;
    let mut t = Table::new(&["freq_hz", "theta_deg", "amplitude", "sine_offset", "doppler_offset"]);
    for p in map {
        t.push(row![p.freq_hz, p.theta.to_degrees(), p.amplitude, p.sine_offset, p.doppler_offset]);
    }
    Ok(t)
}

pub fn power_report_table(cfg: &SimConfig) -> Table {
    let mut t = Table::new(&["N", "T_MS", "T_Corr", "P_MS_mW", "P_Conv_mW"]);
    for &n in &cfg.analysis.report_elements {
        let r = resource_report(cfg.carrier.subcarriers, n, cfg.estimators.d_dic, PowerConstants::default());
        t.push(row![n, r.t_ms, r.t_corr, r.p_ms_mw, r.p_conv_mw]);
    }
    t
}

/// Table of the named subcommand. `array` selects the layout of
/// `placement` and `squint-map`.
pub fn subcommand_table(name: &str, cfg: &SimConfig, array: ArrayChoice) -> Result<Table> {
    Ok(match name {
        "simulate-mse" => mse_table(&run_snr_sweep(cfg)?),
        "simulate-outage" => outage_table(&run_snr_sweep(cfg)?),
        "angle-profile" => angle_table(&run_angle_profile(cfg)?),
        "power-profile" => power_profile_table(&run_power_profile(cfg)?),
        "placement" => placement_table(&cfg.geometry(array)?, &cfg.grid()?),
        "squint-map" => squint_table(cfg, array)?,
        "power-report" => power_report_table(cfg),
        "bounds" => bounds_table(&run_bounds(cfg)?),
        other => return Err(crate::Error::Config(format!("unknown subcommand `{other}`"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_report_rows() {
        let mut cfg = SimConfig::default();
        cfg.analysis.report_elements = vec![32];
        cfg.estimators.d_dic = 1;
        let csv = power_report_table(&cfg).render();
        assert_eq!(
            csv,
            "N,T_MS,T_Corr,P_MS_mW,P_Conv_mW\n32,199,6144,1.29000000e3,2.40000000e3\n"
        );
    }

    #[test]
    fn placement_has_one_row_per_element() {
        let cfg = SimConfig::default();
        let t = placement_table(&cfg.geometry(ArrayChoice::Raa).unwrap(), &cfg.grid().unwrap());
        assert_eq!(t.rows().len(), 21);
        assert_eq!(t.header()[6], "lemma2_ok");
    }

    #[test]
    fn unknown_subcommand_is_rejected() {
        assert!(subcommand_table("nope", &SimConfig::default(), ArrayChoice::Raa).is_err());
    }
}
