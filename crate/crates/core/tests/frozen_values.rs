//! Reference values computed independently at 40-digit precision by direct
//! summation over the momentum grid, or by high-order ODE solutions of the
//! mode equations.

use cdising::coefficients::{f_closed, f_sum, h_closed, h_sum};
use cdising::dynamics::evolve_chain;
use cdising::spin::{dense_evolve_pgs, dispersion_ground_energy, parity_ground_energy};
use cdising::{ChainConfig, CouplingModel, Schedule, Tolerances};

fn close(got: f64, want: f64, tol: f64) {
    assert!(
        (got - want).abs() <= tol * want.abs().max(1.0),
        "{got:e} vs {want:e}"
    );
}

#[test]
fn couplings_against_reference_sums() {
    let cases = [
        (1, 0.3, 10, 0.1250074630934311795982276),
        (3, 0.7, 10, 0.07386949461160818204854013),
        (5, 0.95, 200, 0.1018156729317944539187252),
        (40, 0.95, 200, 0.01694478948155234752123801),
        (2, 1.7, 8, 0.02808633939999979148522087),
        (7, 3.2, 16, 0.00001247890669356366268662094),
        (1, 2.0, 2, 0.05),
    ];
    for (m, g, n, want) in cases {
        close(h_closed(m, g, n).unwrap(), want, 1e-13);
        close(h_sum(m as i64, g, n).unwrap(), want, 1e-12);
    }
}

#[test]
fn auxiliary_sums_against_reference() {
    let cases = [
        (0, 0.3, 10, 0.2747220302938833176483976),
        (2, 1.3, 8, 0.1241112669845658699922551),
        (4, 0.999, 16, 0.5004857213460998428241871),
        (0, 1.0, 64, 4.0),
    ];
    for (m, g, n, want) in cases {
        close(f_closed(m, g, n).unwrap(), want, 1e-12);
        close(f_sum(m as i64, g, n).unwrap(), want, 1e-12);
    }
}

#[test]
fn undriven_single_mode_probability() {
    let schedule = Schedule::new(5.0, 0.0, 1.0).unwrap();
    let config = ChainConfig::new(2, schedule, CouplingModel::Truncated { max_range: 0 }).unwrap();
    close(
        evolve_chain(&config).unwrap().p_gs,
        0.8259006778131583,
        1e-9,
    );
}

#[test]
fn partially_truncated_four_site_probability() {
    let schedule = Schedule::new(5.0, 0.0, 1.0).unwrap();
    let model = CouplingModel::Truncated { max_range: 1 };
    let config = ChainConfig::new(4, schedule, model).unwrap();
    close(
        evolve_chain(&config).unwrap().p_gs,
        0.83504363023901315866,
        1e-9,
    );
    close(
        dense_evolve_pgs(4, &schedule, model, Tolerances::default()).unwrap(),
        0.83504363023901315866,
        1e-9,
    );
}

#[test]
fn thermodynamic_four_site_probability() {
    // reference integrated separately on either side of the g = 1 kink
    let schedule = Schedule::new(5.0, 0.0, 1.0).unwrap();
    let config = ChainConfig::new(4, schedule, CouplingModel::Thermodynamic).unwrap();
    close(
        evolve_chain(&config).unwrap().p_gs,
        0.9673975552443596,
        1e-9,
    );
}

#[test]
fn ground_energies() {
    close(parity_ground_energy(2, 0.0).unwrap(), -2.0, 1e-12);
    // N = 4, g = 1: -2 (2 sin(pi/8) + 2 sin(3pi/8))
    let want =
        -4.0 * ((std::f64::consts::PI / 8.0).sin() + (3.0 * std::f64::consts::PI / 8.0).sin());
    close(parity_ground_energy(4, 1.0).unwrap(), want, 1e-12);
    close(dispersion_ground_energy(4, 1.0).unwrap(), want, 1e-14);
}
