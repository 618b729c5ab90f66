//! End-to-end peeling measurements: evolve a spin-s field from potential
//! data through the Kirchhoff representation, extract null components
//! along outgoing rays, fit decay exponents, and compare with the
//! predicted exponent table.

use crate::error::{Result, SpinError};
use crate::field::Component;
use crate::frame::{dyad_at_point, null_components};
use crate::ops::{OpCtx, OpTag};
use crate::profile::Profile;
use crate::soldering::Soldering;
use crate::spinor::Spinor;
use crate::wave::{SphereQuadrature, WaveScalar};
use num_complex::Complex64;
use rayon::prelude::*;
use std::io::Write;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Exponent prediction for one component and derivative order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExteriorCase {
    /// retarded/advanced split: |phi_i| ~ <u>^e_u <v>^e_v
    Split { e_u: f64, e_v: f64 },
    /// single advanced power <v>^e_v
    AdvancedOnly { e_v: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct ExponentPrediction {
    pub interior: f64,
    pub exterior: ExteriorCase,
}

/// The exponent table for component i of a spin-s field with data weight
/// delta and derivative orders (k, l, m). The equivalent parameterization
/// through the potential weight delta + 2s must agree; both are computed
/// and cross-checked.
pub fn theorem_exponents(
    two_s: usize,
    delta: f64,
    i: usize,
    k: usize,
    l: usize,
    m: usize,
) -> Result<ExponentPrediction> {
    if delta.fract() == 0.0 {
        return Err(SpinError::ExcludedWeight(format!(
            "integer weight {} excluded",
            delta
        )));
    }
    if i > two_s {
        return Err(SpinError::Precondition(format!(
            "component {} out of range for valence {}",
            i, two_s
        )));
    }
    let n = (k + l + m) as f64;
    let s2 = two_s as f64;
    let case_value = 1.0 + s2 + delta - l as f64 - i as f64;
    if case_value == 0.0 {
        return Err(SpinError::ExcludedWeight(format!(
            "case boundary hit: 1 + 2s + delta - l - i = 0 at i = {}",
            i
        )));
    }
    let exterior = if case_value < 0.0 {
        ExteriorCase::Split {
            e_u: 1.0 + delta + s2 - l as f64 - i as f64,
            e_v: -(1.0 + s2 - i as f64 + k as f64 + m as f64),
        }
    } else {
        ExteriorCase::AdvancedOnly { e_v: delta - n }
    };
    let interior = delta - n;

    // potential-weight form: delta_pot = delta + 2s
    let dpot = delta + s2;
    let pot_case = 1.0 + dpot - l as f64 - i as f64;
    let pot_ext = if pot_case < 0.0 {
        ExteriorCase::Split {
            e_u: 1.0 + dpot - i as f64 - l as f64,
            e_v: -(1.0 + s2 - i as f64 + k as f64 + m as f64),
        }
    } else {
        ExteriorCase::AdvancedOnly {
            e_v: dpot - s2 - (l + k + m) as f64,
        }
    };
    let pot_int = dpot - s2 - n;
    debug_assert_eq!(exterior, pot_ext, "parameterizations disagree (exterior)");
    debug_assert!(
        (interior - pot_int).abs() < 1e-12,
        "parameterizations disagree (interior)"
    );
    if exterior != pot_ext || (interior - pot_int).abs() > 1e-12 {
        return Err(SpinError::Precondition(
            "exponent parameterizations disagree".into(),
        ));
    }
    Ok(ExponentPrediction { interior, exterior })
}

#[derive(Debug, Clone)]
pub struct DecayFit {
    pub slope: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Least-squares slope of log(magnitude) against log(coordinate).
pub fn fit_decay_exponent(samples: &[(f64, f64)]) -> Result<DecayFit> {
    if samples.len() < 8 {
        return Err(SpinError::FitInput(format!(
            "need at least 8 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|&(c, m)| c <= 0.0 || m <= 0.0) {
        return Err(SpinError::FitInput(
            "coordinates and magnitudes must be positive".into(),
        ));
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(SpinError::FitInput("degenerate abscissa".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let p = intercept + slope * x;
            (y - p) * (y - p)
        })
        .sum();
    let dof = (samples.len().max(3) - 2) as f64;
    let stderr = (ss_res / dof / sxx).sqrt();
    Ok(DecayFit {
        slope,
        stderr,
        samples: samples.len(),
    })
}

/// A spin-s field evolved from Hertz-potential data `(0, sqrt2 zeta)`:
/// each null component is the wave solution with Cauchy data
/// `(G zeta, sqrt2 G curl zeta)` read in the constant dyad, so every
/// spacetime derivative is a Kirchhoff evaluation of derived data.
pub struct FieldReconstructor {
    pub two_s: usize,
    comps: Vec<WaveScalar>,
    /// spatial-formula field at t = 0 (for the two-path check)
    g_zeta: Spinor<Profile>,
}

impl FieldReconstructor {
    pub fn new(sold: &Soldering<Complex64>, zeta: Spinor<Profile>) -> Result<Self> {
        let two_s = zeta.valence();
        let ctx = OpCtx::fields(sold);
        let g_zeta = ctx.apply(OpTag::G(two_s), &zeta)?;
        let g_curl_zeta = ctx.apply(OpTag::G(two_s), &ctx.apply(OpTag::Curl(two_s), &zeta)?)?;
        let comps = (0..=two_s)
            .map(|i| {
                WaveScalar::new(
                    g_zeta.comp(i).clone(),
                    g_curl_zeta.comp(i).scale(&Complex64::new(SQRT2, 0.0)),
                )
            })
            .collect();
        Ok(FieldReconstructor {
            two_s,
            comps,
            g_zeta,
        })
    }

    /// Field value (constant-dyad components) at a spacetime point.
    pub fn value(
        &self,
        t: f64,
        x: [f64; 3],
        quad: SphereQuadrature,
    ) -> Result<Spinor<Complex64>> {
        let comps = self
            .comps
            .iter()
            .map(|w| w.eval(t, x, quad))
            .collect::<Vec<_>>();
        Ok(Spinor::new(self.two_s, comps))
    }

    /// Direct spatial evaluation of the t = 0 field (independent path).
    pub fn initial_value(&self, x: [f64; 3]) -> Spinor<Complex64> {
        Spinor::new(
            self.two_s,
            self.g_zeta.comps().iter().map(|p| p.eval(x)).collect(),
        )
    }

    /// Null-derivative order (k, l) applied to the component scalars:
    /// the dyad is parallel along l and n, so D^k D'^l of the scalar
    /// components equals the contraction of the derived solutions.
    pub fn null_derivative_value(
        &self,
        k: usize,
        l: usize,
        t: f64,
        x: [f64; 3],
        quad: SphereQuadrature,
    ) -> Result<Spinor<Complex64>> {
        if k + l > 1 {
            return Err(SpinError::OrderCap {
                requested: k + l,
                cap: 1,
            });
        }
        let comps = self
            .comps
            .iter()
            .map(|w| -> Result<Complex64> {
                if k + l == 0 {
                    Ok(w.eval(t, x, quad))
                } else {
                    let (d, dp) = w.eval_null_derivatives(t, x, quad)?;
                    Ok(if k == 1 { d } else { dp })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Spinor::new(self.two_s, comps))
    }
}

/// Sample description for the experiment CSV.
#[derive(Debug, Clone)]
pub struct SampleRow {
    pub t: f64,
    pub r: f64,
    pub u: f64,
    pub v: f64,
    pub region: &'static str,
    pub i: usize,
    pub magnitude: f64,
}

#[derive(Debug, Clone)]
pub struct FitRow {
    pub spin2: usize,
    pub delta: f64,
    pub i: usize,
    pub axis: &'static str,
    pub fitted: f64,
    pub stderr: f64,
    pub predicted: f64,
    pub case: &'static str,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct PeelExperiment {
    pub two_s: usize,
    pub delta: f64,
    /// complex coefficients of the potential datum components
    pub coeffs: Vec<Complex64>,
    pub theta: f64,
    pub phi: f64,
    pub fixed_u: f64,
    pub v_range: (f64, f64),
    pub n_v: usize,
    pub fixed_v: f64,
    pub u_range: (f64, f64),
    pub n_u: usize,
    pub interior_t_range: (f64, f64),
    pub n_interior: usize,
    pub quad: SphereQuadrature,
    pub deriv: (usize, usize),
    pub tolerance: f64,
}

impl PeelExperiment {
    pub fn standard(two_s: usize, delta: f64, seed_phase: f64) -> Self {
        let coeffs = (0..=two_s)
            .map(|i| {
                Complex64::new(
                    1.0 + 0.3 * ((i as f64) + seed_phase).sin(),
                    0.4 + 0.2 * ((i as f64) - seed_phase).cos(),
                )
            })
            .collect();
        PeelExperiment {
            two_s,
            delta,
            coeffs,
            theta: 1.05,
            phi: 0.6,
            fixed_u: 5.0,
            v_range: (300.0, 6000.0),
            n_v: 14,
            fixed_v: 3000.0,
            u_range: (4.0, 150.0),
            n_u: 14,
            interior_t_range: (30.0, 400.0),
            n_interior: 10,
            quad: SphereQuadrature::default_eval(),
            deriv: (0, 0),
            tolerance: 0.2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta.fract() == 0.0 {
            return Err(SpinError::ExcludedWeight(format!(
                "peel experiments need a non-integer weight, got {}",
                self.delta
            )));
        }
        if self.two_s == 0 || self.two_s > 8 {
            return Err(SpinError::Precondition(
                "spin must lie in 1/2 ..= 4".into(),
            ));
        }
        if self.deriv.0 + self.deriv.1 > 1 {
            return Err(SpinError::Precondition(
                "derivative measurements are restricted to k + l <= 1".into(),
            ));
        }
        if self.coeffs.len() != self.two_s + 1 {
            return Err(SpinError::Precondition(
                "one coefficient per potential component".into(),
            ));
        }
        Ok(())
    }

    /// The potential datum: zeta_i = c_i <r>^(delta + 2s - 1).
    pub fn zeta(&self) -> Spinor<Profile> {
        let e = self.delta + self.two_s as f64 - 1.0;
        Spinor::new(
            self.two_s,
            self.coeffs
                .iter()
                .map(|c| Profile::bracket_power(e).scale(c))
                .collect(),
        )
    }
}

#[derive(Debug)]
pub struct PeelOutcome {
    pub samples: Vec<SampleRow>,
    pub fits: Vec<FitRow>,
    pub degenerate: bool,
    /// components whose fitted decay is faster than predicted by more than
    /// the tolerance (bound respected, sharpness not observed)
    pub undershoot: Vec<(usize, &'static str)>,
}

impl PeelOutcome {
    pub fn all_passed(&self) -> bool {
        self.fits.iter().all(|f| f.pass)
    }

    pub fn write_samples_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,r,u,v,region,i,magnitude")?;
        for s in &self.samples {
            writeln!(
                w,
                "{:.9e},{:.9e},{:.9e},{:.9e},{},{},{:.9e}",
                s.t, s.r, s.u, s.v, s.region, s.i, s.magnitude
            )?;
        }
        Ok(())
    }

    pub fn write_fits_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "spin,delta,i,axis,fitted,stderr,predicted,case,pass")?;
        for f in &self.fits {
            writeln!(
                w,
                "{},{:.6},{},{},{:.6},{:.6},{:.6},{},{}",
                format_spin(f.spin2),
                f.delta,
                f.i,
                f.axis,
                f.fitted,
                f.stderr,
                f.predicted,
                f.case,
                f.pass
            )?;
        }
        Ok(())
    }
}

pub fn format_spin(two_s: usize) -> String {
    if two_s % 2 == 0 {
        format!("{}", two_s / 2)
    } else {
        format!("{}.5", two_s / 2)
    }
}

fn log_spaced(range: (f64, f64), n: usize) -> Vec<f64> {
    let (a, b) = range;
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1).max(1) as f64;
            (a.ln() + t * (b.ln() - a.ln())).exp()
        })
        .collect()
}

fn bracket(u: f64) -> f64 {
    (1.0 + u * u).sqrt()
}

/// Run the full pipeline; sample evaluations parallelize over points.
/// Slope fits discard pre-asymptotic samples (v < 50 on fixed-u sweeps,
/// u < 2 on fixed-v sweeps); the samples CSV keeps every point, with the
/// full spinor norm recorded under the pseudo-component index 2s+1.
pub fn run_peel_experiment(
    sold: &Soldering<Complex64>,
    cfg: &PeelExperiment,
) -> Result<PeelOutcome> {
    cfg.validate()?;
    let zeta = cfg.zeta();
    let recon = FieldReconstructor::new(sold, zeta)?;
    let (kd, ld) = cfg.deriv;

    // all sample points: (t, r, region)
    let mut points: Vec<(f64, f64, &'static str)> = Vec::new();
    for v in log_spaced(cfg.v_range, cfg.n_v) {
        let t = 0.5 * (v + cfg.fixed_u);
        let r = 0.5 * (v - cfg.fixed_u);
        points.push((t, r, "exterior-u"));
    }
    for u in log_spaced(cfg.u_range, cfg.n_u) {
        let t = 0.5 * (cfg.fixed_v + u);
        let r = 0.5 * (cfg.fixed_v - u);
        points.push((t, r, "exterior-v"));
    }
    for t in log_spaced(cfg.interior_t_range, cfg.n_interior) {
        points.push((t, t / 10.0, "interior"));
    }

    let frame = dyad_at_point(sold, 0.0, 1.0, cfg.theta, cfg.phi, 1e-6)?;
    let rows: Result<Vec<Vec<SampleRow>>> = points
        .par_iter()
        .map(|&(t, r, region)| -> Result<Vec<SampleRow>> {
            let mut f = frame.clone();
            f.t = t;
            f.r = r;
            let x = f.position();
            let value = recon.null_derivative_value(kd, ld, t, x, cfg.quad)?;
            let comps = null_components(&value, &f);
            let norm = value.norm_sq().re.sqrt();
            let mut out = Vec::new();
            for (i, c) in comps.iter().enumerate() {
                out.push(SampleRow {
                    t,
                    r,
                    u: t - r,
                    v: t + r,
                    region,
                    i,
                    magnitude: c.norm(),
                });
            }
            // full norm recorded as a pseudo-component index 2s+1
            out.push(SampleRow {
                t,
                r,
                u: t - r,
                v: t + r,
                region,
                i: cfg.two_s + 1,
                magnitude: norm,
            });
            Ok(out)
        })
        .collect();
    let samples: Vec<SampleRow> = rows?.into_iter().flatten().collect();

    let degenerate = samples.iter().all(|s| s.magnitude < 1e-300);
    if degenerate {
        return Ok(PeelOutcome {
            samples,
            fits: Vec::new(),
            degenerate: true,
            undershoot: Vec::new(),
        });
    }

    let mut fits = Vec::new();
    let mut undershoot = Vec::new();
    for i in 0..=cfg.two_s {
        let pred = theorem_exponents(cfg.two_s, cfg.delta, i, kd, ld, 0)?;
        // fixed-u sweep: v-slope (discard pre-asymptotic v < 50)
        let data: Vec<(f64, f64)> = samples
            .iter()
            .filter(|s| s.region == "exterior-u" && s.i == i && s.v >= 50.0)
            .map(|s| (bracket(s.v), s.magnitude))
            .collect();
        let predicted_v = match pred.exterior {
            ExteriorCase::Split { e_v, .. } => e_v,
            ExteriorCase::AdvancedOnly { e_v } => e_v,
        };
        if let Ok(fit) = fit_decay_exponent(&data) {
            let pass = (fit.slope - predicted_v).abs() <= cfg.tolerance;
            if !pass && fit.slope < predicted_v - cfg.tolerance {
                undershoot.push((i, "v"));
            }
            fits.push(FitRow {
                spin2: cfg.two_s,
                delta: cfg.delta,
                i,
                axis: "v",
                fitted: fit.slope,
                stderr: fit.stderr,
                predicted: predicted_v,
                case: match pred.exterior {
                    ExteriorCase::Split { .. } => "split",
                    ExteriorCase::AdvancedOnly { .. } => "advanced",
                },
                pass,
            });
        }
        // fixed-v sweep: u-slope, only meaningful in the split case
        if let ExteriorCase::Split { e_u, .. } = pred.exterior {
            let data: Vec<(f64, f64)> = samples
                .iter()
                .filter(|s| s.region == "exterior-v" && s.i == i && s.u >= 2.0)
                .map(|s| (bracket(s.u), s.magnitude))
                .collect();
            if let Ok(fit) = fit_decay_exponent(&data) {
                let pass = (fit.slope - e_u).abs() <= cfg.tolerance;
                if !pass && fit.slope < e_u - cfg.tolerance {
                    undershoot.push((i, "u"));
                }
                fits.push(FitRow {
                    spin2: cfg.two_s,
                    delta: cfg.delta,
                    i,
                    axis: "u",
                    fitted: fit.slope,
                    stderr: fit.stderr,
                    predicted: e_u,
                    case: "split",
                    pass,
                });
            }
        }
    }
    // interior timeline: full-norm slope against <t>
    let data: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.region == "interior" && s.i == cfg.two_s + 1)
        .map(|s| (bracket(s.t), s.magnitude))
        .collect();
    if let Ok(fit) = fit_decay_exponent(&data) {
        let n = (kd + ld) as f64;
        let predicted = cfg.delta - n;
        let pass = (fit.slope - predicted).abs() <= cfg.tolerance;
        fits.push(FitRow {
            spin2: cfg.two_s,
            delta: cfg.delta,
            i: cfg.two_s + 1,
            axis: "t",
            fitted: fit.slope,
            stderr: fit.stderr,
            predicted,
            case: "interior",
            pass,
        });
    }

    Ok(PeelOutcome {
        samples,
        fits,
        degenerate: false,
        undershoot,
    })
}

/// Envelope-consistency: calibrate a constant on even-indexed samples and
/// verify the bound (with small headroom) on the rest.
pub fn envelope_consistency(
    samples: &[(f64, f64, f64)], // (u, v, magnitude)
    e_u: f64,
    e_v: f64,
) -> bool {
    let env = |u: f64, v: f64| bracket(u).powf(e_u) * bracket(v).powf(e_v);
    let mut c = 0.0f64;
    for (idx, &(u, v, m)) in samples.iter().enumerate() {
        if idx % 2 == 0 {
            c = c.max(m / env(u, v));
        }
    }
    samples
        .iter()
        .enumerate()
        .filter(|(idx, _)| idx % 2 == 1)
        .all(|(_, &(u, v, m))| m <= 1.05 * c * env(u, v) + f64::MIN_POSITIVE)
}
