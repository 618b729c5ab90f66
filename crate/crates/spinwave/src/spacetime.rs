//! Exact symbolic calculus for spacetime scalars of the form
//! `c * t^p x^a y^b z^c rho^m r^n <r>^e` with integer exponents (rho, r and
//! the bracket may be negative). Closed under the Cartesian partials, so
//! the null-tetrad derivative operators and their commutators can be
//! checked exactly.
//!
//! Zero testing clears the rho/r/bracket denominators and reduces by the
//! defining relations `y^2 = rho^2 - x^2`, `z^2 = r^2 - rho^2`,
//! `<r>^2 = r^2 + 1`, which yields a canonical normal form.

use crate::exact::Exact;
use std::collections::BTreeMap;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct SpaceMono {
    pub t: u8,
    pub x: u8,
    pub y: u8,
    pub z: u8,
    pub rho: i16,
    pub r: i16,
    pub br: i16,
}

impl SpaceMono {
    pub const ONE: SpaceMono = SpaceMono {
        t: 0,
        x: 0,
        y: 0,
        z: 0,
        rho: 0,
        r: 0,
        br: 0,
    };
}

#[derive(Clone, PartialEq, Debug)]
pub struct SpaceExpr {
    terms: BTreeMap<SpaceMono, Exact>,
}

impl SpaceExpr {
    pub fn zero() -> Self {
        SpaceExpr {
            terms: BTreeMap::new(),
        }
    }

    pub fn term(m: SpaceMono, c: Exact) -> Self {
        let mut e = SpaceExpr::zero();
        e.push(m, c);
        e
    }

    fn push(&mut self, m: SpaceMono, c: Exact) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = *v + c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (&m, &c) in &o.terms {
            out.push(m, c);
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (&m, &c) in &o.terms {
            out.push(m, -c);
        }
        out
    }

    pub fn scale(&self, c: Exact) -> Self {
        let mut out = SpaceExpr::zero();
        for (&m, &v) in &self.terms {
            out.push(m, v * c);
        }
        out
    }

    /// Multiply by a single generator monomial.
    pub fn mul_mono(&self, m: SpaceMono) -> Self {
        let mut out = SpaceExpr::zero();
        for (&a, &c) in &self.terms {
            out.push(
                SpaceMono {
                    t: a.t + m.t,
                    x: a.x + m.x,
                    y: a.y + m.y,
                    z: a.z + m.z,
                    rho: a.rho + m.rho,
                    r: a.r + m.r,
                    br: a.br + m.br,
                },
                c,
            );
        }
        out
    }

    /// Partial derivative; axis 0 = t, 1 = x, 2 = y, 3 = z.
    pub fn derive(&self, axis: usize) -> Self {
        let mut out = SpaceExpr::zero();
        for (&m, &c) in &self.terms {
            match axis {
                0 => {
                    if m.t > 0 {
                        out.push(
                            SpaceMono { t: m.t - 1, ..m },
                            c.scale_ratio(m.t as i128, 1),
                        );
                    }
                }
                1 => {
                    if m.x > 0 {
                        out.push(
                            SpaceMono { x: m.x - 1, ..m },
                            c.scale_ratio(m.x as i128, 1),
                        );
                    }
                    radial_parts(&mut out, m, c, 1);
                }
                2 => {
                    if m.y > 0 {
                        out.push(
                            SpaceMono { y: m.y - 1, ..m },
                            c.scale_ratio(m.y as i128, 1),
                        );
                    }
                    radial_parts(&mut out, m, c, 2);
                }
                _ => {
                    if m.z > 0 {
                        out.push(
                            SpaceMono { z: m.z - 1, ..m },
                            c.scale_ratio(m.z as i128, 1),
                        );
                    }
                    radial_parts(&mut out, m, c, 3);
                }
            }
        }
        out
    }

    /// Canonical zero test: clear all negative rho/r/bracket exponents and
    /// reduce the squares of y, z and the bracket.
    pub fn is_zero_fn(&self) -> bool {
        if self.terms.is_empty() {
            return true;
        }
        let min_rho = self.terms.keys().map(|m| m.rho).min().unwrap().min(0);
        let min_r = self.terms.keys().map(|m| m.r).min().unwrap().min(0);
        let min_br = self.terms.keys().map(|m| m.br).min().unwrap().min(0);
        let cleared = self.mul_mono(SpaceMono {
            t: 0,
            x: 0,
            y: 0,
            z: 0,
            rho: -min_rho,
            r: -min_r,
            br: -min_br,
        });
        cleared.reduce().terms.is_empty()
    }

    /// Reduce with y^2 -> rho^2 - x^2, z^2 -> r^2 - rho^2, br^2 -> r^2 + 1
    /// (valid only for non-negative exponents of the reduced generators).
    fn reduce(&self) -> Self {
        let mut cur = self.clone();
        loop {
            let mut next = SpaceExpr::zero();
            let mut changed = false;
            for (&m, &c) in &cur.terms {
                if m.y >= 2 {
                    changed = true;
                    next.push(
                        SpaceMono {
                            y: m.y - 2,
                            rho: m.rho + 2,
                            ..m
                        },
                        c,
                    );
                    next.push(
                        SpaceMono {
                            y: m.y - 2,
                            x: m.x + 2,
                            ..m
                        },
                        -c,
                    );
                } else if m.z >= 2 {
                    changed = true;
                    next.push(
                        SpaceMono {
                            z: m.z - 2,
                            r: m.r + 2,
                            ..m
                        },
                        c,
                    );
                    next.push(
                        SpaceMono {
                            z: m.z - 2,
                            rho: m.rho + 2,
                            ..m
                        },
                        -c,
                    );
                } else if m.br >= 2 {
                    changed = true;
                    next.push(
                        SpaceMono {
                            br: m.br - 2,
                            r: m.r + 2,
                            ..m
                        },
                        c,
                    );
                    next.push(SpaceMono { br: m.br - 2, ..m }, c);
                } else {
                    next.push(m, c);
                }
            }
            cur = next;
            if !changed {
                return cur;
            }
        }
    }
}

/// chain-rule contributions of rho^m, r^n, <r>^e under a spatial partial
fn radial_parts(out: &mut SpaceExpr, m: SpaceMono, c: Exact, axis: usize) {
    let bump = |mm: SpaceMono, axis: usize| -> SpaceMono {
        let mut m2 = mm;
        match axis {
            1 => m2.x += 1,
            2 => m2.y += 1,
            _ => m2.z += 1,
        }
        m2
    };
    // d rho^m = m x_axis rho^(m-2) for axis in {x, y}
    if m.rho != 0 && axis != 3 {
        let m2 = bump(
            SpaceMono {
                rho: m.rho - 2,
                ..m
            },
            axis,
        );
        out.push(m2, c.scale_ratio(m.rho as i128, 1));
    }
    if m.r != 0 {
        let m2 = bump(SpaceMono { r: m.r - 2, ..m }, axis);
        out.push(m2, c.scale_ratio(m.r as i128, 1));
    }
    if m.br != 0 {
        let m2 = bump(SpaceMono { br: m.br - 2, ..m }, axis);
        out.push(m2, c.scale_ratio(m.br as i128, 1));
    }
}

/// First-order operators along the null tetrad, acting on space expressions.
pub struct TetradOps;

impl TetradOps {
    /// radial derivative (x dx + y dy + z dz)/r
    pub fn radial(f: &SpaceExpr) -> SpaceExpr {
        let mut acc = SpaceExpr::zero();
        for (axis, gen) in [(1usize, 1usize), (2, 2), (3, 3)] {
            let d = f.derive(axis);
            let mono = match gen {
                1 => SpaceMono {
                    x: 1,
                    r: -1,
                    ..SpaceMono::ONE
                },
                2 => SpaceMono {
                    y: 1,
                    r: -1,
                    ..SpaceMono::ONE
                },
                _ => SpaceMono {
                    z: 1,
                    r: -1,
                    ..SpaceMono::ONE
                },
            };
            acc = acc.add(&d.mul_mono(mono));
        }
        acc
    }

    /// D = (d_t + d_r)/sqrt2
    pub fn d_out(f: &SpaceExpr) -> SpaceExpr {
        f.derive(0)
            .add(&Self::radial(f))
            .scale(Exact::inv_sqrt2())
    }

    /// D' = (d_t - d_r)/sqrt2
    pub fn d_in(f: &SpaceExpr) -> SpaceExpr {
        f.derive(0)
            .sub(&Self::radial(f))
            .scale(Exact::inv_sqrt2())
    }

    /// delta = (e_theta + i e_phi) . grad / sqrt2
    pub fn delta(f: &SpaceExpr) -> SpaceExpr {
        Self::angular(f, Exact::i())
    }

    /// delta' = (e_theta - i e_phi) . grad / sqrt2
    pub fn delta_bar(f: &SpaceExpr) -> SpaceExpr {
        Self::angular(f, -Exact::i())
    }

    fn angular(f: &SpaceExpr, i_unit: Exact) -> SpaceExpr {
        let dx = f.derive(1);
        let dy = f.derive(2);
        let dz = f.derive(3);
        // e_theta = (xz/(r rho), yz/(r rho), -rho/r)
        let mut acc = dx.mul_mono(SpaceMono {
            x: 1,
            z: 1,
            rho: -1,
            r: -1,
            ..SpaceMono::ONE
        });
        acc = acc.add(&dy.mul_mono(SpaceMono {
            y: 1,
            z: 1,
            rho: -1,
            r: -1,
            ..SpaceMono::ONE
        }));
        acc = acc.sub(&dz.mul_mono(SpaceMono {
            rho: 1,
            r: -1,
            ..SpaceMono::ONE
        }));
        // i e_phi = i (-y/rho, x/rho, 0)
        let mut ip = dx
            .mul_mono(SpaceMono {
                y: 1,
                rho: -1,
                ..SpaceMono::ONE
            })
            .scale(-i_unit);
        ip = ip.add(
            &dy.mul_mono(SpaceMono {
                x: 1,
                rho: -1,
                ..SpaceMono::ONE
            })
            .scale(i_unit),
        );
        acc.add(&ip).scale(Exact::inv_sqrt2())
    }

    /// r * delta (and the conjugate), the rotation-scaled angular operator.
    pub fn r_delta(f: &SpaceExpr) -> SpaceExpr {
        Self::delta(f).mul_mono(SpaceMono {
            r: 1,
            ..SpaceMono::ONE
        })
    }

    pub fn r_delta_bar(f: &SpaceExpr) -> SpaceExpr {
        Self::delta_bar(f).mul_mono(SpaceMono {
            r: 1,
            ..SpaceMono::ONE
        })
    }
}

/// Commutator check on a family of test scalars; returns the offending
/// description on failure.
pub fn verify_tetrad_commutators() -> std::result::Result<(), String> {
    let probes: Vec<(String, SpaceExpr)> = vec![
        (
            "t^2 x <r>^-2".into(),
            SpaceExpr::term(
                SpaceMono {
                    t: 2,
                    x: 1,
                    br: -2,
                    ..SpaceMono::ONE
                },
                Exact::one(),
            ),
        ),
        (
            "x y z <r>^-3".into(),
            SpaceExpr::term(
                SpaceMono {
                    x: 1,
                    y: 1,
                    z: 1,
                    br: -3,
                    ..SpaceMono::ONE
                },
                Exact::one(),
            ),
        ),
        (
            "t z^2 <r>^2".into(),
            SpaceExpr::term(
                SpaceMono {
                    t: 1,
                    z: 2,
                    br: 2,
                    ..SpaceMono::ONE
                },
                Exact::one(),
            ),
        ),
        (
            "(3+i) t x^2 y <r>^-5".into(),
            SpaceExpr::term(
                SpaceMono {
                    t: 1,
                    x: 2,
                    y: 1,
                    br: -5,
                    ..SpaceMono::ONE
                },
                Exact::from_int(3) + Exact::i(),
            ),
        ),
    ];
    type Op = fn(&SpaceExpr) -> SpaceExpr;
    let d: Op = TetradOps::d_out;
    let dp: Op = TetradOps::d_in;
    let rd: Op = TetradOps::r_delta;
    let rdb: Op = TetradOps::r_delta_bar;
    let pairs: Vec<(&str, Op, Op)> = vec![
        ("[D, D']", d, dp),
        ("[D, r delta]", d, rd),
        ("[D', r delta]", dp, rd),
        ("[D, r delta']", d, rdb),
        ("[D', r delta']", dp, rdb),
    ];
    for (pname, a, b) in &pairs {
        for (fname, f) in &probes {
            let ab = a(&b(f));
            let ba = b(&a(f));
            if !ab.sub(&ba).is_zero_fn() {
                return Err(format!("{} fails on {}", pname, fname));
            }
        }
    }
    Ok(())
}
