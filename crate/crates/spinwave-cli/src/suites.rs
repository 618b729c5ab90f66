//! The verification suites behind the CLI subcommands. Each suite prints
//! a short report and returns the failure count.

use crate::config::RunConfig;
use num_complex::Complex64;
use spinwave::exact::Exact;
use spinwave::grid::GridSpec;
use spinwave::hertz::roundtrip_once;
use spinwave::jet::verify_splitting;
use spinwave::peel::{run_peel_experiment, PeelExperiment};
use spinwave::soldering::{validate_conventions, Soldering};
use spinwave::symbol::{verify_hermitian_symbol, verify_symbol_exactness};
use spinwave::verify::identity_suite;
use spinwave::wave::{quadrature_compare, quadrature_compare_doubling, SphereQuadrature};
use std::fs;
use std::path::Path;

pub struct SuiteOutcome {
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    fn new() -> Self {
        SuiteOutcome {
            checks: 0,
            failures: Vec::new(),
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn verify_identities(cfg: &RunConfig) -> SuiteOutcome {
    let mut out = SuiteOutcome::new();
    let sold: Soldering<Exact> = Soldering::shipped();
    match validate_conventions(&sold) {
        Ok(rep) => {
            out.checks += rep.checks.len();
            println!(
                "conventions: {} checks passed, measured c = {:?}",
                rep.checks.len(),
                rep.c_constant
            );
        }
        Err(e) => out.failures.push(format!("conventions: {}", e)),
    }
    let max_two_s = cfg
        .two_s_list()
        .unwrap_or_else(|_| vec![8])
        .into_iter()
        .max()
        .unwrap_or(8);
    for valence in 2..=max_two_s.max(2) {
        match identity_suite(&sold, valence, cfg.degree, cfg.trials, cfg.seed) {
            Ok(reports) => {
                for r in reports {
                    out.checks += r.trials;
                    if !r.passed() {
                        out.failures
                            .extend(r.failures.iter().map(|f| format!("{}: {}", r.name, f)));
                    } else {
                        println!("{}: {} trials, residual exactly zero", r.name, r.trials);
                    }
                }
            }
            Err(e) => out.failures.push(format!("valence {}: {}", valence, e)),
        }
    }
    out
}

pub fn verify_symbols(cfg: &RunConfig) -> SuiteOutcome {
    let mut out = SuiteOutcome::new();
    let sold: Soldering<Complex64> = Soldering::shipped();
    let list = cfg.two_s_list().unwrap_or_else(|_| vec![2]);
    let max_two_s = list.into_iter().max().unwrap_or(2).max(2);
    for two_s in 2..=max_two_s {
        match verify_symbol_exactness(&sold, two_s, cfg.trials.min(200), cfg.seed, 1e-9) {
            Ok(rep) => {
                out.checks += rep.trials;
                if rep.passed() {
                    println!(
                        "symbol exactness 2s={}: {} covector draws, ranks ({},2,{})",
                        two_s,
                        rep.trials,
                        two_s - 1,
                        two_s - 1
                    );
                } else {
                    out.failures.extend(rep.failures);
                }
            }
            Err(e) => out.failures.push(format!("2s={}: {}", two_s, e)),
        }
        match verify_hermitian_symbol(&sold, two_s, cfg.trials.min(200), cfg.seed) {
            Ok(rep) => {
                out.checks += rep.trials;
                if rep.passed() {
                    println!(
                        "curl symbol hermiticity k={}: max residual {:.3e}",
                        two_s, rep.max_residual
                    );
                } else {
                    out.failures.extend(rep.failures);
                }
            }
            Err(e) => out.failures.push(format!("hermiticity k={}: {}", two_s, e)),
        }
    }
    out
}

pub fn verify_splitting_suite(cfg: &RunConfig) -> SuiteOutcome {
    let mut out = SuiteOutcome::new();
    let sold: Soldering<Exact> = Soldering::shipped();
    let list = cfg.two_s_list().unwrap_or_else(|_| vec![1, 2, 3, 4]);
    for two_s in list {
        match verify_splitting(&sold, two_s, cfg.degree.min(4), cfg.trials.min(50), cfg.seed) {
            Ok(rep) => {
                out.checks += rep.trials;
                if rep.passed() {
                    println!("splitting 2s={}: {} trials exactly zero", two_s, rep.trials);
                } else {
                    out.failures.extend(rep.failures);
                }
            }
            Err(e) => out.failures.push(format!("splitting 2s={}: {}", two_s, e)),
        }
    }
    out
}

pub fn wave_check(cfg: &RunConfig) -> SuiteOutcome {
    let mut out = SuiteOutcome::new();
    let deltas = if cfg.weights.is_empty() {
        vec![-3.5, -2.5, -2.0, -1.5, -1.0, -0.5, 0.5, 1.5]
    } else {
        cfg.weights.clone()
    };
    println!("delta, t, r, closed, numeric, rel_err");
    for &delta in &deltas {
        for &(t, r) in &[(2.0, 1.0), (10.0, 7.0), (35.0, 20.0), (50.0, 38.0), (50.0, 0.0)] {
            let (closed, numeric, rel) = quadrature_compare(
                delta,
                t,
                r,
                SphereQuadrature::Product {
                    n_theta: cfg.quad_theta,
                    n_phi: cfg.quad_phi,
                },
            );
            out.checks += 1;
            println!(
                "{:+.2}, {:5.1}, {:5.1}, {:.9e}, {:.9e}, {:.3e}",
                delta, t, r, closed, numeric, rel
            );
            if rel > 1e-6 {
                out.failures.push(format!(
                    "quadrature mismatch {:.3e} at delta={}, t={}, r={}",
                    rel, delta, t, r
                ));
            }
            // near-cone points go through the doubling path
            let (_c2, _n2, rel2) = quadrature_compare_doubling(delta, t, t, 64, 1e-9);
            out.checks += 1;
            if rel2 > 1e-6 {
                out.failures.push(format!(
                    "doubling quadrature mismatch {:.3e} at delta={}, t=r={}",
                    rel2, delta, t
                ));
            }
        }
    }
    out
}

pub fn hertz_roundtrip(cfg: &RunConfig) -> SuiteOutcome {
    let mut out = SuiteOutcome::new();
    let sold: Soldering<Complex64> = Soldering::shipped();
    let spec = GridSpec {
        half_len: cfg.half_len,
        n: cfg.grid_n,
    };
    let list = cfg.two_s_list().unwrap_or_else(|_| vec![1, 2, 3, 4]);
    for two_s in list {
        for trial in 0..cfg.trials.min(20) {
            let seed = cfg.seed.wrapping_add(trial as u64);
            match roundtrip_once(&sold, spec, two_s, seed) {
                Ok(rep) => {
                    out.checks += 1;
                    println!(
                        "2s={} seed={}: roundtrip {:.3e}, div {:.3e}",
                        two_s, seed, rep.roundtrip_residual, rep.div_residual
                    );
                    if rep.roundtrip_residual > 1e-8 || rep.div_residual > 1e-10 {
                        out.failures.push(format!(
                            "2s={} seed={}: residuals {:?}",
                            two_s, seed, rep
                        ));
                    }
                }
                Err(e) => out.failures.push(format!("2s={} seed={}: {}", two_s, seed, e)),
            }
        }
    }
    out
}

pub fn peel(cfg: &RunConfig) -> SuiteOutcome {
    let mut out = SuiteOutcome::new();
    let sold: Soldering<Complex64> = Soldering::shipped();
    let weights = match cfg.validated_weights() {
        Ok(w) if !w.is_empty() => w,
        Ok(_) => vec![-2.5],
        Err(e) => {
            out.failures.push(e);
            return out;
        }
    };
    let spins = match cfg.two_s_list() {
        Ok(s) => s,
        Err(e) => {
            out.failures.push(e);
            return out;
        }
    };
    for &two_s in &spins {
        for &delta in &weights {
            let mut exp = PeelExperiment::standard(two_s, delta, 0.3);
            exp.tolerance = cfg.tolerance;
            match run_peel_experiment(&sold, &exp) {
                Ok(res) => {
                    if res.degenerate {
                        println!("2s={} delta={}: degenerate (zero field)", two_s, delta);
                        continue;
                    }
                    println!(
                        "2s={} delta={}: fits discard v < 50 (fixed-u) and u < 2 (fixed-v) samples",
                        two_s, delta
                    );
                    for f in &res.fits {
                        out.checks += 1;
                        println!(
                            "2s={} delta={} i={} axis={}: fitted {:+.4} predicted {:+.4} [{}]",
                            two_s,
                            delta,
                            f.i,
                            f.axis,
                            f.fitted,
                            f.predicted,
                            if f.pass { "pass" } else { "FAIL" }
                        );
                        let undershoot = res.undershoot.iter().any(|&(i, ax)| i == f.i && ax == f.axis);
                        if !f.pass && !undershoot {
                            out.failures.push(format!(
                                "2s={} delta={} i={} axis={}: fitted {:+.4} vs predicted {:+.4}",
                                two_s, delta, f.i, f.axis, f.fitted, f.predicted
                            ));
                        }
                    }
                    if !res.undershoot.is_empty() {
                        println!(
                            "2s={} delta={}: bound-respecting undershoot (sharpness not observed) at {:?}",
                            two_s, delta, res.undershoot
                        );
                    }
                    if let Some(dir) = &cfg.out_dir {
                        if let Err(e) = write_outputs(dir, two_s, delta, &res) {
                            out.failures.push(format!("output: {}", e));
                        }
                    }
                }
                Err(e) => out.failures.push(format!("2s={} delta={}: {}", two_s, delta, e)),
            }
        }
    }
    out
}

fn write_outputs(
    dir: &str,
    two_s: usize,
    delta: f64,
    res: &spinwave::peel::PeelOutcome,
) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let tag = format!("s{}_d{}", two_s, delta);
    let samples = Path::new(dir).join(format!("samples_{}.csv", tag));
    let fits = Path::new(dir).join(format!("fits_{}.csv", tag));
    res.write_samples_csv(fs::File::create(samples)?)?;
    res.write_fits_csv(fs::File::create(fits)?)?;
    Ok(())
}
