use kgdefect::evolution::{run_observed, GaussianPacket, InitialData, SimConfig, Sponge};
use kgdefect::{
    spectral_concentration, Complex, FieldState64, Grid64, ManifoldCatalog64, Potential64,
    SeminormSpec, Trace,
};

/// A rotating Gaussian `psi = 2 e^{-x^2}`, `pi = -0.9 i psi` settles onto a
/// nonzero solitary wave of the quartic potential.
#[test]
fn rotating_gaussian_settles_on_nonzero_wave() {
    let p = Potential64::new(vec![0.0, -0.5, 0.25]).unwrap();
    let g = Grid64::new(100.0, 10001).unwrap();
    let bump = InitialData::Gaussian(GaussianPacket {
        amplitude: Complex::new(2.0, 0.0),
        width: 1.0,
        center: 0.0,
        wavenumber: 0.0,
        travelling: false,
    });
    let psi = bump.sample(&g, 1.0).unwrap().psi;
    let pi = psi.iter().map(|z| z * Complex::new(0.0, -0.9)).collect();
    let init = InitialData::Samples(FieldState64::from_samples(psi, pi, 0.0).unwrap());
    let mut cfg = SimConfig::with_defaults(1.0, p.clone(), g.clone(), 200.0, init);
    cfg.sponge = Sponge::Layer {
        width: 20.0,
        strength: 1.0,
    };

    let catalog = ManifoldCatalog64::new(&g, &p, 1.0, &SeminormSpec::new(5.0).unwrap()).unwrap();
    let (mut early, mut late) = (Vec::new(), Vec::new());
    let out = run_observed(&cfg, &mut |s: &FieldState64| {
        if s.t <= 5.0 {
            early.push(catalog.distance(s)?.dist);
        } else if s.t >= 180.0 {
            late.push(catalog.distance(s)?);
        }
        Ok(())
    })
    .unwrap();

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let late_dist: Vec<f64> = late.iter().map(|d| d.dist).collect();
    let ratio = mean(&late_dist) / mean(&early);
    assert!(ratio < 0.05, "{ratio}");

    let last = late.last().unwrap();
    assert!(last.c_star > 0.5, "{last:?}");
    let kappa = (1.0 - last.omega_star * last.omega_star).sqrt();
    assert!((last.c_star * last.c_star - (1.0 - 2.0 * kappa)).abs() < 1e-6);

    let trace = Trace::new(&out.trace.psi0, 0.0, out.trace.sample_step().unwrap()).unwrap();
    let conc = spectral_concentration(&trace, 1.0, 150.0, 200.0).unwrap();
    assert!(conc.in_gap);
    assert!(
        (conc.dominant.abs() - last.omega_star.abs()).abs() < 0.03,
        "{conc:?} {last:?}"
    );
}
