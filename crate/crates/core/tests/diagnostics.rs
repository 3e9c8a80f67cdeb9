mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::*;
use hmhd_core::checkpoint::{read_checkpoint, write_checkpoint};
use hmhd_core::diagnostics::*;
use hmhd_core::initial_data::{make_v0, AnnulusDataParams};
use hmhd_core::linear_flows::LinearFlowPair;
use hmhd_core::lp::sobolev_norm_direct;
use hmhd_core::solver::*;
use hmhd_core::spectral::l2_norm;
use hmhd_core::{Grid, HmhdError, SpectralVectorField};

fn grid(n: usize) -> Arc<Grid> {
    Grid::with_default_dealias(n, 2.0 * PI).unwrap()
}

fn random_state(g: &Arc<Grid>, seed: u64) -> SimState {
    let u = random_solenoidal(g, 4.0, seed);
    let b = random_solenoidal(g, 4.0, seed + 1);
    let (u, b) = (u.scaled(0.1 / u.coefficient_l2()), b.scaled(0.1 / b.coefficient_l2()));
    SimState::new(u, b, ExponentConfig::default(), f64::INFINITY).unwrap()
}

#[test]
fn zero_state_report() {
    let g = grid(16);
    let z = SpectralVectorField::zeros(&g);
    let st = SimState::new(z.clone(), z, ExponentConfig::default(), f64::INFINITY).unwrap();
    let r = report(&st, None, &DissipationTracker::new(&st), 0.0).unwrap();
    for v in [r.l2_u, r.l2_b, r.hs_u, r.hs_b, r.diss_u_cum, r.diss_b_cum, r.e_total, r.div_u, r.div_b, r.hall_cancel] {
        assert_eq!(v, 0.0);
    }
    assert!(r.pert_f_hs.is_nan() && r.pert_h_hs.is_nan());
}

#[test]
fn report_recomputes_from_norms() {
    let g = grid(16);
    let st = random_state(&g, 3);
    let mut tracker = DissipationTracker::new(&st);
    let next = step(&st, &StepControl::default()).unwrap();
    tracker.advance(&next, 0.01);
    let r = report(&next, None, &tracker, 0.01).unwrap();
    let hs_u = sobolev_norm_direct(&next.u_hat, 3.0, false).powi(2);
    let hs_b = sobolev_norm_direct(&next.b_hat, 3.0, false).powi(2);
    assert!((r.hs_u - hs_u).abs() <= 1e-12 * hs_u);
    assert!((r.l2_u - l2_norm(&next.u_hat).powi(2)).abs() <= 1e-12 * r.l2_u);
    let expect = 0.005 * (dissipation_norm_sq(&st.u_hat, 1.0, 3.0) + dissipation_norm_sq(&next.u_hat, 1.0, 3.0));
    assert!((r.diss_u_cum - expect).abs() <= 1e-12 * expect);
    let total = r.hs_u + r.hs_b + r.diss_u_cum + r.diss_b_cum;
    assert!((r.e_total - total).abs() <= 1e-12 * total);
    assert!(r.hall_cancel < 1e-10);
    assert!(r.div_u < 1e-12 && r.div_b < 1e-12);
}

#[test]
fn dissipation_norm_of_single_mode() {
    // Λ^α cos(2x) = 2^α cos(2x); ‖cos(2x)‖² = 4π³, so the H^s norm is
    // (1 + 2^s)·2^α·(4π³)^{1/2}.
    let g = grid(16);
    let f = cos_mode(&g, [2, 0, 0], 1, 1.0);
    let expect = ((1.0 + 8.0) * 2.0 * (4.0 * PI.powi(3)).sqrt()).powi(2);
    assert!((dissipation_norm_sq(&f, 1.0, 3.0) - expect).abs() < 1e-12 * expect);
}

#[test]
fn linear_flow_has_zero_perturbation() {
    let g = Grid::with_default_dealias(32, 16.0 * PI).unwrap();
    let v0 = make_v0(&g, &AnnulusDataParams { epsilon: 0.25, ..Default::default() }).unwrap();
    let flow = LinearFlowPair::new(v0.clone(), 1.0, 1.0, 1.0).unwrap();
    let exps = ExponentConfig { alpha: 1.0, beta: 0.5, s: 3.0 };
    let st = SimState::new(v0.clone(), v0, exps, f64::INFINITY).unwrap();
    let control = StepControl { dt: 0.05, nonlinear_enabled: false, ..Default::default() };
    let record = run(&st, &control, 0.5, 2, &RunOptions { flow: Some(flow), ..Default::default() }).unwrap();
    let scale = record.reports[0].hs_u;
    for r in &record.reports {
        assert!(r.pert_f_hs <= 1e-24 * scale && r.pert_h_hs <= 1e-24 * scale, "{r:?}");
    }
}

#[test]
fn shell_spectrum_examples() {
    let g = grid(16);
    let f = cos_mode(&g, [0, 3, 0], 2, 1.0);
    let spec = shell_spectrum(&f);
    let total: f64 = spec.iter().map(|x| x.1).sum();
    assert!((spec[3].1 - total).abs() < 1e-14 * total);
    assert!((spec[3].0 - 3.0).abs() == 0.0);

    let r = random_field(&g, 5.0, 9);
    let sum: f64 = shell_spectrum(&r).iter().map(|x| x.1).sum();
    let l2 = l2_norm(&r).powi(2);
    assert!((sum - l2).abs() < 1e-12 * l2);
}

#[test]
fn annulus_spectrum_peaks_near_unit_frequency() {
    let g = Grid::with_default_dealias(64, 32.0 * PI).unwrap();
    let v0 = make_v0(&g, &AnnulusDataParams { epsilon: 0.125, ..Default::default() }).unwrap();
    let spec = shell_spectrum(&v0);
    let total: f64 = spec.iter().map(|x| x.1).sum();
    let near: f64 = spec.iter().filter(|x| (x.0 - 16.0).abs() <= 2.0).map(|x| x.1).sum();
    assert!(near > 0.999 * total);
}

fn sample_report(i: usize) -> EnergyReport {
    let x = i as f64;
    EnergyReport::from_values([
        0.1 * x,
        1.0 / 3.0 + x,
        PI * x,
        1e-300,
        2e300,
        -0.0,
        x.sqrt(),
        (x + 0.5).ln(),
        1e-17,
        f64::MIN_POSITIVE,
        std::f64::consts::E,
        f64::NAN,
        f64::NAN,
        1.0 / 7.0,
    ])
}

#[test]
fn csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    write_csv(&[], &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().trim(), CSV_COLUMNS.join(","));
    assert!(read_csv(&path).unwrap().is_empty());

    let rows: Vec<EnergyReport> = (0..1000).map(sample_report).collect();
    write_csv(&rows, &path).unwrap();
    let back = read_csv(&path).unwrap();
    assert_eq!(back.len(), 1000);
    for (a, b) in rows.iter().zip(&back) {
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
        }
    }
    let again = dir.path().join("e.csv");
    write_csv(&back, &again).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn csv_rejects_malformed_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, format!("{}\n1,2,3\n", CSV_COLUMNS.join(","))).unwrap();
    assert!(read_csv(&path).is_err());
    std::fs::write(&path, "time,energy\n1,2\n").unwrap();
    assert!(matches!(read_csv(&path), Err(HmhdError::Format(_))));
    let mut row: Vec<String> = vec!["1".into(); 14];
    row[3] = "abc".into();
    std::fs::write(&path, format!("{}\n{}\n", CSV_COLUMNS.join(","), row.join(","))).unwrap();
    assert!(matches!(read_csv(&path), Err(HmhdError::Format(_))));
}

#[test]
fn summary_json_fields() {
    let g = grid(16);
    let st = random_state(&g, 5);
    let config = serde_json::json!({"grid": {"n": 16}});
    let record = run(&st, &StepControl::default(), 0.03, 1, &RunOptions { config: config.clone(), ..Default::default() }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    record.write_summary(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["config"], config);
    assert_eq!(v["status"], "completed");
    assert_eq!(v["rows"], 4);
}

#[test]
fn checkpoint_round_trip() {
    let g = Grid::new(16, 3.0, 0.5).unwrap();
    let mut st = random_state(&g, 7);
    st.time = 1.25;
    st.step_count = 17;
    st.galerkin_radius = 9.0;
    st.exponents = ExponentConfig { alpha: 0.25, beta: 0.75, s: 3.5 };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.chk");
    write_checkpoint(&path, &st).unwrap();
    let back = read_checkpoint(&path).unwrap();
    assert_eq!(**back.grid(), *g);
    assert_eq!(back.time, 1.25);
    assert_eq!(back.step_count, 17);
    assert_eq!(back.galerkin_radius, 9.0);
    assert_eq!(back.exponents, st.exponents);
    assert_eq!(max_diff(&back.u_hat, &st.u_hat), 0.0);
    assert_eq!(max_diff(&back.b_hat, &st.b_hat), 0.0);
}

#[test]
fn checkpoint_rejects_corruption() {
    let g = grid(8);
    let st = random_state(&g, 1);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.chk");
    write_checkpoint(&path, &st).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 8]).unwrap();
    assert!(matches!(read_checkpoint(&path), Err(HmhdError::Format(_))));
    let mut bad = bytes.clone();
    bad[0] = b'X';
    std::fs::write(&path, &bad).unwrap();
    assert!(matches!(read_checkpoint(&path), Err(HmhdError::Format(_))));
    let mut long = bytes;
    long.push(0);
    std::fs::write(&path, &long).unwrap();
    assert!(matches!(read_checkpoint(&path), Err(HmhdError::Format(_))));
    assert!(matches!(read_checkpoint(&dir.path().join("missing")), Err(HmhdError::Io(_))));
}

#[test]
fn run_writes_checkpoints() {
    let g = grid(8);
    let st = random_state(&g, 2);
    let dir = tempfile::tempdir().unwrap();
    let options = RunOptions {
        checkpoint_every: 2,
        checkpoint_dir: Some(dir.path().to_path_buf()),
        checkpoint_prefix: "t".into(),
        ..Default::default()
    };
    let record = run(&st, &StepControl::default(), 0.05, 1, &options).unwrap();
    assert_eq!(record.checkpoints.len(), 2);
    let last = read_checkpoint(&record.checkpoints[1]).unwrap();
    assert_eq!(last.step_count, 4);
}
