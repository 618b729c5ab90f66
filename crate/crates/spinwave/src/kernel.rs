//! Exact polynomial kernels of Laplacian powers: the finite-dimensional
//! spaces that obstruct or gauge the potential construction, computed by
//! rational linear algebra on monomial coefficients.

use crate::error::{Result, SpinError};
use crate::exact::{Exact, Rat};
use crate::poly::{Mono, Poly};
use crate::spinor::Spinor;

#[derive(Debug)]
pub struct PolyKernelBasis {
    pub valence: usize,
    pub power: usize,
    pub degree: usize,
    pub basis: Vec<Spinor<Poly<Exact>>>,
}

/// All monomials of total degree <= d, in a fixed order.
pub fn monomials_up_to(d: usize) -> Vec<Mono> {
    let mut out = Vec::new();
    for total in 0..=d {
        for a in 0..=total {
            for b in 0..=(total - a) {
                let c = total - a - b;
                out.push((a as u8, b as u8, c as u8));
            }
        }
    }
    out
}

/// Scalar euclidean-negative Laplacian `Lap = -(dxx+dyy+dzz)` acting on a
/// monomial, expressed in the monomial basis.
fn lap_of_mono(m: Mono) -> Vec<(Mono, i128)> {
    let mut out = Vec::new();
    let e = [m.0 as i128, m.1 as i128, m.2 as i128];
    for axis in 0..3 {
        if e[axis] >= 2 {
            let mut nm = [m.0, m.1, m.2];
            nm[axis] -= 2;
            out.push(((nm[0], nm[1], nm[2]), -(e[axis] * (e[axis] - 1))));
        }
    }
    out
}

/// Exact nullspace of Lap^power on scalar polynomials of degree <= degree,
/// as polynomials with rational coefficients.
pub fn scalar_kernel(power: usize, degree: usize) -> Vec<Poly<Exact>> {
    let monos = monomials_up_to(degree);
    let index: std::collections::HashMap<Mono, usize> =
        monos.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let n = monos.len();
    // matrix rows = image coordinates, columns = source monomials
    let mut mat: Vec<Vec<Rat>> = vec![vec![Rat::ZERO; n]; n];
    for (j, &m) in monos.iter().enumerate() {
        // apply Lap^power to monomial j
        let mut cur: Vec<(Mono, i128)> = vec![(m, 1)];
        for _ in 0..power {
            let mut next: std::collections::HashMap<Mono, i128> = Default::default();
            for &(mm, c) in &cur {
                for (lm, lc) in lap_of_mono(mm) {
                    *next.entry(lm).or_insert(0) += c * lc;
                }
            }
            cur = next.into_iter().collect();
        }
        for (mm, c) in cur {
            if c != 0 {
                mat[index[&mm]][j] = Rat::from_int(c);
            }
        }
    }
    // nullspace by Gauss-Jordan
    let null = rational_nullspace(&mut mat, n);
    null.into_iter()
        .map(|v| {
            let mut p = Poly::zero();
            for (j, coef) in v.into_iter().enumerate() {
                if !coef.is_zero() {
                    p.add_term(monos[j], Exact::from_rationals(coef, Rat::ZERO));
                }
            }
            p
        })
        .collect()
}

/// Nullspace basis of an n-column rational matrix (rows may exceed n).
fn rational_nullspace(mat: &mut [Vec<Rat>], n: usize) -> Vec<Vec<Rat>> {
    let rows = mat.len();
    let mut pivot_col: Vec<Option<usize>> = vec![None; rows];
    let mut row = 0usize;
    for col in 0..n {
        // find pivot
        let mut pr = None;
        for r in row..rows {
            if !mat[r][col].is_zero() {
                pr = Some(r);
                break;
            }
        }
        let Some(pr) = pr else { continue };
        mat.swap(row, pr);
        let inv = mat[row][col].recip();
        for c in 0..n {
            mat[row][c] = mat[row][c] * inv;
        }
        for r in 0..rows {
            if r != row && !mat[r][col].is_zero() {
                let f = mat[r][col];
                for c in 0..n {
                    let sub = mat[row][c] * f;
                    mat[r][c] = mat[r][c] - sub;
                }
            }
        }
        pivot_col[row] = Some(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    let pivots: std::collections::HashSet<usize> =
        pivot_col.iter().flatten().copied().collect();
    let mut basis = Vec::new();
    for free in 0..n {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::ZERO; n];
        v[free] = Rat::ONE;
        for (r, pc) in pivot_col.iter().enumerate() {
            if let Some(pc) = pc {
                v[*pc] = -mat[r][free];
            }
        }
        basis.push(v);
    }
    basis
}

/// Kernel of Lap^power on valence-k spinor polynomials of degree <= degree.
/// The Laplacian acts componentwise, so the basis is the scalar kernel
/// tensored with the component directions.
pub fn kernel_basis(valence: usize, power: usize, degree_bound: usize) -> PolyKernelBasis {
    let scalars = scalar_kernel(power, degree_bound);
    let mut basis = Vec::new();
    for i in 0..=valence {
        for s in &scalars {
            let mut comps = vec![Poly::zero(); valence + 1];
            comps[i] = s.clone();
            basis.push(Spinor::new(valence, comps));
        }
    }
    PolyKernelBasis {
        valence,
        power,
        degree: degree_bound,
        basis,
    }
}

/// The kernel space intersected with the weighted L^2 space of weight
/// `-3-delta`: membership forces polynomial degree < -3-delta.
pub fn kernel_basis_weighted(two_s: usize, delta: f64) -> Result<PolyKernelBasis> {
    if delta.fract() == 0.0 {
        return Err(SpinError::ExcludedWeight(format!(
            "weight {} is an integer; the kernel spaces need non-integer weights",
            delta
        )));
    }
    let m = two_s / 2;
    let bound = -3.0 - delta;
    if bound <= 0.0 {
        return Ok(PolyKernelBasis {
            valence: two_s,
            power: m,
            degree: 0,
            basis: Vec::new(),
        });
    }
    let degree = bound.floor() as usize; // degree < bound, non-integer bound
    Ok(kernel_basis(two_s, m, degree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::OpCtx;
    use crate::soldering::Soldering;

    #[test]
    fn harmonic_constants_only() {
        // degree < 1: constants
        let k = kernel_basis(0, 1, 0);
        assert_eq!(k.basis.len(), 1);
    }

    #[test]
    fn harmonic_linear_space() {
        // degree <= 1: {1, x, y, z}
        let k = kernel_basis(0, 1, 1);
        assert_eq!(k.basis.len(), 4);
    }

    #[test]
    fn bilaplacian_kills_low_degree() {
        let k = kernel_basis(0, 2, 1);
        assert_eq!(k.basis.len(), 4);
        // and all cubics: 20 monomials, Lap^2 of degree-3 is zero
        let k3 = kernel_basis(0, 2, 3);
        assert_eq!(k3.basis.len(), 20);
    }

    #[test]
    fn harmonic_dimensions_match_classical_count() {
        // dim of harmonic polynomials of degree exactly l is 2l+1;
        // cumulative up to degree d: (d+1)^2
        for d in 0..=4 {
            let k = kernel_basis(0, 1, d);
            assert_eq!(k.basis.len(), (d + 1) * (d + 1), "degree {}", d);
        }
    }

    #[test]
    fn kernel_elements_are_annihilated() {
        let sold: Soldering<Exact> = Soldering::shipped();
        let ctx = OpCtx::fields(&sold);
        let k = kernel_basis(2, 2, 4);
        for b in &k.basis {
            assert!(ctx.laplacian_power(b, 2).is_zero());
        }
    }

    #[test]
    fn kernel_monotone_in_degree() {
        let mut last = 0;
        for d in 0..=5 {
            let k = kernel_basis(1, 1, d);
            assert!(k.basis.len() >= last);
            last = k.basis.len();
        }
    }

    #[test]
    fn linear_independence_via_rank() {
        // evaluate the degree <= 2 harmonic basis on sample points and check
        // full column rank numerically
        let k = kernel_basis(0, 1, 2);
        let pts: Vec<[f64; 3]> = (0..k.basis.len() + 3)
            .map(|i| {
                let t = i as f64;
                [0.3 * t + 0.1, (t * 0.7).sin() + t * 0.05, 0.2 * t * t % 3.0 - 1.0]
            })
            .collect();
        let a: Vec<Vec<num_complex::Complex64>> = pts
            .iter()
            .map(|&p| {
                k.basis
                    .iter()
                    .map(|b| {
                        b.comp(0).eval_c64([
                            num_complex::Complex64::new(p[0], 0.0),
                            num_complex::Complex64::new(p[1], 0.0),
                            num_complex::Complex64::new(p[2], 0.0),
                        ])
                    })
                    .collect()
            })
            .collect();
        let rank = crate::symbol::numeric_rank(&a, 1e-9);
        assert_eq!(rank, k.basis.len());
    }

    #[test]
    fn weighted_wrapper_enforces_noninteger() {
        assert!(kernel_basis_weighted(2, -3.0).is_err());
        let empty = kernel_basis_weighted(2, -2.5).unwrap();
        assert!(empty.basis.is_empty());
        let nonempty = kernel_basis_weighted(2, -4.5).unwrap();
        // degree < 1.5 -> degree <= 1: scalars {1,x,y,z} x 3 components
        assert_eq!(nonempty.basis.len(), 12);
    }

    #[test]
    fn basis_stable_under_monomial_reordering() {
        // dimension is invariant under permuting the monomial basis; the
        // computation is redone with a reversed ordering through a wrapper
        let k1 = kernel_basis(0, 1, 3);
        // recompute dimension by rank-nullity on the reversed basis
        let monos: Vec<Mono> = monomials_up_to(3).into_iter().rev().collect();
        let index: std::collections::HashMap<Mono, usize> =
            monos.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let n = monos.len();
        let mut mat: Vec<Vec<Rat>> = vec![vec![Rat::ZERO; n]; n];
        for (j, &m) in monos.iter().enumerate() {
            for (lm, lc) in lap_of_mono(m) {
                mat[index[&lm]][j] = Rat::from_int(lc);
            }
        }
        let null = rational_nullspace(&mut mat, n);
        assert_eq!(null.len(), k1.basis.len());
    }
}
