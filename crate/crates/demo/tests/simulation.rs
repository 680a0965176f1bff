use mhdcrit_demo::{q0_ladder, Simulation};

#[test]
fn images_have_one_pixel_per_node() {
    let sim = Simulation::new(32, 1.0, 0.05, 0.05, true).unwrap();
    assert_eq!(sim.density_rgba().len(), 4 * 32 * 32);
    assert_eq!(sim.current_rgba().len(), 4 * 32 * 32);
    // vacuum at the centre, rho_bar at the corner
    let d = sim.density_rgba();
    let centre = 4 * (16 * 32 + 16);
    assert_eq!(&d[centre..centre + 4], &[0, 0, 0, 255]);
    assert_eq!(&d[0..4], &[255, 255, 255, 255]);
}

#[test]
fn stepping_advances_and_reports() {
    let mut sim = Simulation::new(32, 0.5, 0.05, 0.05, true).unwrap();
    sim.step(5).unwrap();
    assert_eq!(sim.steps(), 5);
    assert!(sim.time() > 0.0);
    let v: serde_json::Value = serde_json::from_str(&sim.diagnostics_json()).unwrap();
    assert_eq!(v["t"].as_f64().unwrap(), sim.time());
    assert_eq!(v["rho_min"].as_f64().unwrap(), 0.0);
    assert!(v["bound_ok"].is_boolean() && v["g0"].as_f64().unwrap() > 0.0);
}

#[test]
fn invalid_input_is_an_error() {
    assert!(Simulation::new(31, 1.0, 0.05, 0.05, true).is_err());
    assert!(Simulation::new(32, 1.0, -1.0, 0.05, true).is_err());
}

#[test]
fn ladder_is_quartic() {
    let q = q0_ladder(16, vec![0.5, 1.0, 2.0], false).unwrap();
    assert!((q[0] * 16.0 - q[1]).abs() <= 1e-10 * q[1]);
    assert!((q[1] * 16.0 - q[2]).abs() <= 1e-10 * q[2]);
}
