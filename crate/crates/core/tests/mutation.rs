//! A deliberately broken dipole model must be caught by the gauge suite.

use nlrabi::hamiltonians::{dipole_photon_operator, rabi_dipole};
use nlrabi::spectra::GaugePair;
use nlrabi::validate::{gauge_checks, Fixtures};
use nlrabi::{Operator, RabiParams, Result, SpaceDescriptor};

/// `V_-` built from the photon operator shifted with the wrong sign.
fn flipped_minus_dipole(p: &RabiParams<f64>, s: &SpaceDescriptor) -> Result<Operator> {
    let b = dipole_photon_operator(-p.eta, s)?;
    let v = (&b.adjoint() - &b).powi(4).scale_real(p.resonator.j * p.resonator.omega_c / 6.0);
    Ok((rabi_dipole(p, s)? + v).hermitize())
}

#[test]
fn sign_flip_in_minus_potential_fails_gauge_suite() {
    let pair = GaugePair {
        dipole: flipped_minus_dipole,
        ..GaugePair::corrected()
    };
    let checks = gauge_checks(pair).unwrap();
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    assert!(failed.contains(&"dipole_vs_coulomb_minus"), "{failed:?}");
    // the exact identity uses its own builders and is unaffected
    assert!(!failed.contains(&"exact_conjugation_identity"), "{failed:?}");
}

#[test]
fn unmodified_fixtures_pass_gauge_suite() {
    for c in gauge_checks(Fixtures::default().gauge).unwrap() {
        assert!(c.pass, "{c:?}");
    }
}
