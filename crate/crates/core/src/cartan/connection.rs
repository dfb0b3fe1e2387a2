use crate::exterior::{FramePair, KForm};
use crate::scalar::{Evaluator, FieldError, ScalarField};

/// `c^k_{ij} = θ_k([E_i, E_j])`, stored as `c[k][i][j]` (0-based).
#[derive(Clone, Debug)]
pub struct StructureFunctions {
    c: [[[ScalarField; 4]; 4]; 4],
}

fn zeros3() -> [[[ScalarField; 4]; 4]; 4] {
    std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| ScalarField::zero())))
}

impl StructureFunctions {
    /// Read off from `dθ_k(E_i, E_j) = −θ_k([E_i, E_j])`, valid because
    /// `θ_k(E_j)` is constant for a dual pair.
    pub fn from_frame(frame: &FramePair) -> Result<StructureFunctions, FieldError> {
        let mut c = zeros3();
        for (k, ck) in c.iter_mut().enumerate() {
            let comps = frame.frame_components(&frame.theta(k).ext_d()?);
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let v = -&comps[&((1u8 << i) | (1u8 << j))];
                    ck[j][i] = -&v;
                    ck[i][j] = v;
                }
            }
        }
        Ok(StructureFunctions { c })
    }

    /// `c^k_{ij}` (0-based indices).
    pub fn get(&self, k: usize, i: usize, j: usize) -> &ScalarField {
        &self.c[k][i][j]
    }
}

/// Levi-Civita connection of an orthonormal frame.
///
/// `∇_{E_k} E_j = Σ_i Γ^i_{kj} E_i` and `ω^i_j = Σ_k Γ^i_{kj} θ_k`, so that
/// `Γ^i_{kj} = ω^i_j(E_k)`.
#[derive(Clone, Debug)]
pub struct ConnectionForms {
    frame: FramePair,
    structure: StructureFunctions,
    gamma: [[[ScalarField; 4]; 4]; 4],
    omega: [[KForm; 4]; 4],
}

/// The unique torsion-free metric connection (Koszul formula in the frame).
pub fn solve_connection(frame: &FramePair) -> Result<ConnectionForms, FieldError> {
    let structure = StructureFunctions::from_frame(frame)?;
    let c = |k: usize, i: usize, j: usize| structure.get(k, i, j);
    let mut gamma = zeros3();
    for (i, gi) in gamma.iter_mut().enumerate() {
        for (k, gik) in gi.iter_mut().enumerate() {
            for (j, g) in gik.iter_mut().enumerate() {
                *g = 0.5 * (c(i, k, j) - c(k, j, i) + c(j, i, k));
            }
        }
    }
    let omega = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            (0..4).fold(KForm::zero(1), |acc, k| &acc + &frame.theta(k).scale(&gamma[i][k][j]))
        })
    });
    Ok(ConnectionForms {
        frame: frame.clone(),
        structure,
        gamma,
        omega,
    })
}

impl ConnectionForms {
    pub fn frame(&self) -> &FramePair {
        &self.frame
    }

    pub fn structure(&self) -> &StructureFunctions {
        &self.structure
    }

    /// `Γ^i_{kj}` (0-based indices).
    pub fn gamma(&self, i: usize, k: usize, j: usize) -> &ScalarField {
        &self.gamma[i][k][j]
    }

    /// `ω^i_j` (0-based indices).
    pub fn omega(&self, i: usize, j: usize) -> &KForm {
        &self.omega[i][j]
    }

    /// `Γ^i_{kj}` at a point, indexed `[i][k][j]`.
    pub fn gamma_at(&self, ev: &mut Evaluator) -> Result<[[[f64; 4]; 4]; 4], FieldError> {
        let mut out = [[[0.0; 4]; 4]; 4];
        for i in 0..4 {
            for k in 0..4 {
                for j in 0..4 {
                    out[i][k][j] = ev.eval(&self.gamma[i][k][j])?;
                }
            }
        }
        Ok(out)
    }

    /// `dθ_i + Σ_j ω^i_j ∧ θ_j`, which vanishes for a torsion-free connection.
    pub fn torsion(&self, i: usize) -> Result<KForm, FieldError> {
        let mut t = self.frame.theta(i).ext_d()?;
        for j in 0..4 {
            t = &t + &self.omega[i][j].wedge(self.frame.theta(j));
        }
        Ok(t)
    }

    /// `ω^i_j + ω^j_i`, which vanishes for a metric connection.
    pub fn skew_defect(&self, i: usize, j: usize) -> KForm {
        &self.omega[i][j] + &self.omega[j][i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{lie_bracket, Domain};
    use crate::scalar::ChartPoint;
    use nalgebra::{DMatrix, DVector};

    /// Coframe of the metric `e^{2x}(dx² + dy²) + (dz + y dt)² + cosh²(z) dt²`.
    fn test_frame() -> FramePair {
        let (x, y, z) = (ScalarField::x(), ScalarField::y(), ScalarField::z());
        let zero = ScalarField::zero;
        let coframe = [
            KForm::one_form([x.exp(), zero(), zero(), zero()]),
            KForm::one_form([zero(), x.exp(), zero(), zero()]),
            KForm::one_form([zero(), zero(), ScalarField::one(), y.clone()]),
            KForm::one_form([zero(), zero(), zero(), z.cosh()]),
        ];
        let domain = Domain::new((-0.5, 0.5), (-0.5, 0.5), (-0.5, 0.5), (0.0, 1.0));
        let pts = domain.sample(5, 1);
        FramePair::from_coframe(coframe, domain, &pts).unwrap()
    }

    fn flat() -> FramePair {
        FramePair::coordinate(Domain::new((0.0, 1.0), (0.0, 1.0), (0.0, 1.0), (0.0, 1.0)))
    }

    #[test]
    fn coordinate_frame_has_no_structure_or_connection() {
        let conn = solve_connection(&flat()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!(conn.omega(i, j).is_zero());
                for k in 0..4 {
                    assert!(conn.structure().get(k, i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn structure_functions_agree_with_brackets() {
        let fp = test_frame();
        let sf = StructureFunctions::from_frame(&fp).unwrap();
        let pts = fp.domain().sample(10, 4);
        for i in 0..4 {
            for j in 0..4 {
                let b = lie_bracket(fp.e(i), fp.e(j)).unwrap();
                for k in 0..4 {
                    let direct = b.pair(fp.theta(k));
                    for p in &pts {
                        let a = sf.get(k, i, j).eval(p).unwrap();
                        assert!((a - direct.eval(p).unwrap()).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn torsion_free_and_metric() {
        let fp = test_frame();
        let conn = solve_connection(&fp).unwrap();
        for p in fp.domain().sample(20, 8) {
            let mut ev = Evaluator::new(&p);
            for i in 0..4 {
                assert!(conn.torsion(i).unwrap().eval(&mut ev).unwrap().max_abs() < 1e-12);
                for j in 0..4 {
                    assert!(conn.skew_defect(i, j).eval(&mut ev).unwrap().max_abs() < 1e-12);
                }
            }
        }
    }

    /// Independent oracle: solve the 24 unknowns `Γ^i_{kj}`, `i < j` (plus
    /// skew-symmetry) from the torsion equations at one point, with the
    /// equations in a permuted order, by least squares.
    fn linear_solve(fp: &FramePair, p: &ChartPoint, perm_seed: u64) -> [[[f64; 4]; 4]; 4] {
        let mut ev = Evaluator::new(p);
        let at = fp.at(&mut ev).unwrap();
        // dθ_i in frame components
        let mut dtheta = Vec::new();
        for i in 0..4 {
            let d = fp.theta(i).ext_d().unwrap().eval(&mut ev).unwrap();
            dtheta.push(at.to_frame(&d));
        }
        let pairs: Vec<(usize, usize)> = (0..4).flat_map(|i| ((i + 1)..4).map(move |j| (i, j))).collect();
        // unknown index for ω^i_j(E_k), i < j
        let unknown = |i: usize, j: usize, k: usize| pairs.iter().position(|q| *q == (i, j)).unwrap() * 4 + k;
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
        // (dθ_i)(E_a, E_b) + Σ_j [ω^i_j(E_a) δ_jb − ω^i_j(E_b) δ_ja] = 0
        for i in 0..4 {
            for &(a, b) in &pairs {
                let mut row = vec![0.0; 24];
                let mut put = |ii: usize, jj: usize, k: usize, s: f64| {
                    if ii == jj {
                        return;
                    }
                    if ii < jj {
                        row[unknown(ii, jj, k)] += s;
                    } else {
                        row[unknown(jj, ii, k)] -= s;
                    }
                };
                put(i, b, a, 1.0);
                put(i, a, b, -1.0);
                rows.push((row, -dtheta[i].get((1 << a) | (1 << b))));
            }
        }
        let n = rows.len();
        let mut order: Vec<usize> = (0..n).collect();
        let mut s = perm_seed;
        for r in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(r, (s >> 33) as usize % (r + 1));
        }
        let m = DMatrix::from_fn(n, 24, |r, c| rows[order[r]].0[c]);
        let rhs = DVector::from_fn(n, |r, _| rows[order[r]].1);
        let sol = m.svd(true, true).solve(&rhs, 1e-14).unwrap();
        let mut g = [[[0.0; 4]; 4]; 4];
        for &(i, j) in &pairs {
            for k in 0..4 {
                let v = sol[unknown(i, j, k)];
                g[i][k][j] = v;
                g[j][k][i] = -v;
            }
        }
        g
    }

    #[test]
    fn koszul_matches_an_independent_linear_solve() {
        let fp = test_frame();
        let conn = solve_connection(&fp).unwrap();
        for (n, p) in fp.domain().sample(5, 2).iter().enumerate() {
            let koszul = conn.gamma_at(&mut Evaluator::new(p)).unwrap();
            let a = linear_solve(&fp, p, 17 + n as u64);
            let b = linear_solve(&fp, p, 99 + n as u64);
            for i in 0..4 {
                for k in 0..4 {
                    for j in 0..4 {
                        assert!((koszul[i][k][j] - a[i][k][j]).abs() < 1e-10);
                        assert!((a[i][k][j] - b[i][k][j]).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn gamma_is_omega_on_frame() {
        let fp = test_frame();
        let conn = solve_connection(&fp).unwrap();
        let p = ChartPoint::new(0.1, -0.2, 0.3, 0.5);
        let mut ev = Evaluator::new(&p);
        let g = conn.gamma_at(&mut ev).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let v = ev.eval(&fp.e(k).pair(conn.omega(i, j))).unwrap();
                    assert!((v - g[i][k][j]).abs() < 1e-12, "{i}{k}{j}: {v} vs {}", g[i][k][j]);
                }
            }
        }
    }
}
