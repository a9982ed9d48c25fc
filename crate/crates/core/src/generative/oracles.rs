use super::{mean_pool, EmbeddingMatrix, GenerationError};
use crate::geometry::{dihedral, wrap_angle, RigidTransform, Rotation, Vec3};
use crate::polymer::{KeyRole, PolymerGraph, UnitConformation, UnitTopology};
use std::f64::consts::PI;
use nalgebra::{DMatrix, DVector, Matrix3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Embedding width of [`ToyEncoder`].
pub const TOY_EMBEDDING_DIM: usize = 32;

/// Per-unit encoder plus the MAR context model.
pub trait EncoderOracle: Send + Sync {
    /// Per-unit embedding `X^u`. `None` marks a unit whose conformation is
    /// not known yet; its row must not depend on any coordinates.
    fn embed(
        &self,
        graph: &PolymerGraph,
        units: &[Option<&UnitConformation>],
    ) -> Result<EmbeddingMatrix, GenerationError>;

    /// Context rows (`Z^u`, or `E^u` when nothing is masked) from a masked
    /// embedding.
    fn contextualize(&self, masked: &EmbeddingMatrix) -> Result<EmbeddingMatrix, GenerationError>;

    fn id(&self) -> String;
}

/// Inputs of one torsion denoising call.
#[derive(Debug, Clone, Copy)]
pub struct TorsionQuery<'a> {
    pub unit: usize,
    pub torsions: &'a [f64],
    pub t: usize,
    pub sigma: f64,
    pub condition: &'a [f64],
}

/// Predicts the noise `ε̂` on each torsion of one unit.
pub trait TorsionDenoiser: Send + Sync {
    fn predict_noise(&self, query: &TorsionQuery) -> Result<Vec<f64>, GenerationError>;
}

/// Inputs of one rotation denoising call.
#[derive(Debug, Clone, Copy)]
pub struct RotationQuery<'a> {
    pub t: usize,
    pub sigma: f64,
    pub frames: &'a [RigidTransform],
    pub condition: &'a EmbeddingMatrix,
    /// Standard-pose units being oriented.
    pub units: &'a [UnitConformation],
    pub graph: &'a PolymerGraph,
}

/// Predicts clean rotations from noisy orientations. Outputs need not be
/// exactly orthogonal; the sampler projects them.
pub trait RotationDenoiser: Send + Sync {
    fn predict_rotations(&self, query: &RotationQuery) -> Result<Vec<Matrix3<f64>>, GenerationError>;
}

/// Seeded random projection of simple per-unit features:
/// atom count, bond count, known flag, relative position and a bias.
#[derive(Debug, Clone)]
pub struct ToyEncoder {
    seed: u64,
    projection: DMatrix<f64>,
}

const TOY_FEATURES: usize = 5;
const TOY_ROTATION_SCALE: f64 = 0.2;

impl ToyEncoder {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = 1.0 / (TOY_FEATURES as f64).sqrt();
        let projection = DMatrix::from_fn(TOY_EMBEDDING_DIM, TOY_FEATURES, |_, _| {
            let v: f64 = StandardNormal.sample(&mut rng);
            v * scale
        });
        ToyEncoder { seed, projection }
    }
}

impl Default for ToyEncoder {
    fn default() -> Self {
        ToyEncoder::new(0)
    }
}

impl EncoderOracle for ToyEncoder {
    fn embed(
        &self,
        graph: &PolymerGraph,
        units: &[Option<&UnitConformation>],
    ) -> Result<EmbeddingMatrix, GenerationError> {
        let n = graph.n_units();
        if units.len() != n {
            return Err(GenerationError::DimensionMismatch {
                expected: n,
                found: units.len(),
            });
        }
        let denom = (n - 1).max(1) as f64;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let topo = graph.unit(i);
                let f = DVector::from_vec(vec![
                    topo.n_atoms() as f64 / 10.0,
                    topo.bonds().len() as f64 / 10.0,
                    if units[i].is_some() { 1.0 } else { 0.0 },
                    i as f64 / denom,
                    1.0,
                ]);
                (&self.projection * f).iter().map(|v| v.tanh()).collect()
            })
            .collect();
        EmbeddingMatrix::from_rows(&rows)
    }

    fn contextualize(&self, masked: &EmbeddingMatrix) -> Result<EmbeddingMatrix, GenerationError> {
        let mean = mean_pool(masked)?.row(0);
        let rows: Vec<Vec<f64>> = masked
            .to_rows()
            .into_iter()
            .map(|r| r.iter().zip(&mean).map(|(a, m)| 0.5 * a + 0.5 * m).collect())
            .collect();
        EmbeddingMatrix::from_rows(&rows)
    }

    fn id(&self) -> String {
        format!("toy-encoder(seed={})", self.seed)
    }
}

/// Pulls each torsion towards `π + 0.5·tanh(2·c_k)`, near anti, where `c_k`
/// cycles through the condition row.
#[derive(Debug, Clone, Copy, Default)]
pub struct ToyTorsionDenoiser;

impl TorsionDenoiser for ToyTorsionDenoiser {
    fn predict_noise(&self, q: &TorsionQuery) -> Result<Vec<f64>, GenerationError> {
        Ok(q.torsions
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let c = if q.condition.is_empty() { 0.0 } else { q.condition[k % q.condition.len()] };
                let target = PI + 0.5 * (2.0 * c).tanh();
                wrap_angle(x - target) / q.sigma
            })
            .collect())
    }
}

/// Chain-following toy. The first unit turns by `exp(0.2 · c_{0,0..3})`.
/// Every later unit is turned so that its atom-1 → atom-2 bond lies along the
/// placed atom-3 → atom-4 bond of its predecessor, then twisted about that
/// bond until the junction dihedral equals `π + 0.5·tanh(c_{i,0})`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ToyRotationDenoiser;

/// Smallest rotation taking unit vector `u` onto unit vector `v`.
fn align(u: &Vec3, v: &Vec3) -> Rotation {
    let axis = u.cross(v);
    let s = axis.norm();
    let c = u.dot(v);
    if s < 1e-12 {
        if c > 0.0 {
            return Rotation::identity();
        }
        let helper = if u.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let perp = u.cross(&helper).normalize();
        return Rotation::exp(&(perp * PI));
    }
    Rotation::exp(&(axis / s * s.atan2(c)))
}

/// Key atom `primary` unless it sits on `origin`, then `fallback`.
fn away_from(u: &UnitConformation, topo: &UnitTopology, origin: KeyRole, primary: KeyRole, fallback: KeyRole) -> Vec3 {
    let o = u.key(topo, origin);
    let d = u.key(topo, primary) - o;
    if d.norm() > 1e-9 {
        d
    } else {
        u.key(topo, fallback) - o
    }
}

impl RotationDenoiser for ToyRotationDenoiser {
    fn predict_rotations(&self, q: &RotationQuery) -> Result<Vec<Matrix3<f64>>, GenerationError> {
        let n = q.units.len();
        if n != q.graph.n_units() {
            return Err(GenerationError::DimensionMismatch {
                expected: q.graph.n_units(),
                found: n,
            });
        }
        let cond = |i: usize, j: usize| {
            if i < q.condition.rows() && j < q.condition.dim() {
                q.condition.matrix()[(i, j)]
            } else {
                0.0
            }
        };
        let mut out: Vec<Rotation> = Vec::with_capacity(n);
        for i in 0..n {
            if i == 0 {
                out.push(Rotation::exp(
                    &(Vec3::new(cond(0, 0), cond(0, 1), cond(0, 2)) * TOY_ROTATION_SCALE),
                ));
                continue;
            }
            let (pt, t) = (q.graph.unit(i - 1), q.graph.unit(i));
            let (pu, u) = (&q.units[i - 1], &q.units[i]);
            let bond = out[i - 1].apply(&(pu.key(pt, KeyRole::Atom4) - pu.key(pt, KeyRole::Atom3)));
            let back = out[i - 1].apply(&away_from(pu, pt, KeyRole::Atom3, KeyRole::Atom2, KeyRole::Atom1));
            let local = u.key(t, KeyRole::Atom2) - u.key(t, KeyRole::Atom1);
            let ahead = away_from(u, t, KeyRole::Atom2, KeyRole::Atom3, KeyRole::Atom4);
            let (bn, ln) = (bond.norm(), local.norm());
            if bn < 1e-12 || ln < 1e-12 {
                return Err(GenerationError::Oracle(format!("unit {i} has a zero-length junction bond")));
            }
            let axis = bond / bn;
            let base = align(&(local / ln), &axis);
            let current = dihedral(&back, &Vec3::zeros(), &bond, &(bond + base.apply(&ahead)));
            let goal = PI + 0.5 * cond(i, 0).tanh();
            out.push(Rotation::exp(&(axis * wrap_angle(goal - current))) * base);
        }
        Ok(out.iter().map(|r| *r.matrix()).collect())
    }
}

/// Denoiser that knows the clean torsions of every unit and returns the
/// exact noise that separates them from the query.
#[derive(Debug, Clone)]
pub struct OracleTorsionDenoiser {
    targets: Vec<Vec<f64>>,
}

impl OracleTorsionDenoiser {
    pub fn new(targets: Vec<Vec<f64>>) -> Self {
        OracleTorsionDenoiser { targets }
    }
}

impl TorsionDenoiser for OracleTorsionDenoiser {
    fn predict_noise(&self, q: &TorsionQuery) -> Result<Vec<f64>, GenerationError> {
        let target = self
            .targets
            .get(q.unit)
            .ok_or_else(|| GenerationError::Oracle(format!("no ground truth for unit {}", q.unit)))?;
        if target.len() != q.torsions.len() {
            return Err(GenerationError::DimensionMismatch {
                expected: q.torsions.len(),
                found: target.len(),
            });
        }
        Ok(q.torsions
            .iter()
            .zip(target)
            .map(|(x, g)| wrap_angle(x - g) / q.sigma)
            .collect())
    }
}

/// Denoiser that always predicts the stored rotations.
#[derive(Debug, Clone)]
pub struct OracleRotationDenoiser {
    rotations: Vec<Rotation>,
}

impl OracleRotationDenoiser {
    pub fn new(rotations: Vec<Rotation>) -> Self {
        OracleRotationDenoiser { rotations }
    }
}

impl RotationDenoiser for OracleRotationDenoiser {
    fn predict_rotations(&self, q: &RotationQuery) -> Result<Vec<Matrix3<f64>>, GenerationError> {
        if self.rotations.len() != q.frames.len() {
            return Err(GenerationError::DimensionMismatch {
                expected: q.frames.len(),
                found: self.rotations.len(),
            });
        }
        Ok(self.rotations.iter().map(|r| *r.matrix()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing;

    #[test]
    fn toy_encoder_ignores_masked_coordinates() {
        let graph = PolymerGraph::homopolymer(testing::ethylene_unit(), 3).unwrap();
        let enc = ToyEncoder::new(4);
        let u = UnitConformation::new(1, vec![Vec3::zeros(); 8]);
        let mut v = u.clone();
        v.coords[0].x = 7.0;
        let a = enc.embed(&graph, &[None, Some(&u), None]).unwrap();
        let b = enc.embed(&graph, &[None, Some(&v), None]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dim(), TOY_EMBEDDING_DIM);
        let c = enc.embed(&graph, &[None, None, None]).unwrap();
        assert_ne!(a.row(1), c.row(1));
        assert_eq!(a.row(0), c.row(0));
        assert_eq!(enc.embed(&graph, &[None, Some(&u), None]).unwrap(), a);
    }

    #[test]
    fn toy_rotations_chain_and_set_junction_dihedral() {
        use crate::assembly::{assemble, AssemblyInput};
        use crate::polymer::idealized_template;
        let topo = testing::butane_unit();
        let tpl = idealized_template(&topo).unwrap();
        let graph = PolymerGraph::homopolymer(topo, 4).unwrap();
        let units: Vec<_> = (0..4).map(|i| UnitConformation::new(i, tpl.coords.clone())).collect();
        let cond = EmbeddingMatrix::from_rows(&[vec![0.3], vec![-0.7], vec![0.0], vec![2.0]]).unwrap();
        let raw = ToyRotationDenoiser
            .predict_rotations(&RotationQuery {
                t: 1,
                sigma: 0.1,
                frames: &[],
                condition: &cond,
                units: &units,
                graph: &graph,
            })
            .unwrap();
        let rotations: Vec<Rotation> = raw.iter().map(|m| Rotation::from_matrix(*m).unwrap()).collect();
        let rotated: Vec<Vec<Vec3>> = units
            .iter()
            .zip(&rotations)
            .map(|(u, r)| u.coords.iter().map(|p| r.apply(p)).collect())
            .collect();
        let t = graph.unit(0);
        for i in 1..4 {
            let (p, c) = (&rotated[i - 1], &rotated[i]);
            let k = |v: &Vec<Vec3>, role| v[t.key(role)];
            let bond_prev = k(p, KeyRole::Atom4) - k(p, KeyRole::Atom3);
            let bond_next = k(c, KeyRole::Atom2) - k(c, KeyRole::Atom1);
            assert!((bond_prev.normalize() - bond_next.normalize()).norm() < 1e-12);
            let d = dihedral(
                &k(p, KeyRole::Atom2),
                &k(p, KeyRole::Atom3),
                &(k(p, KeyRole::Atom3) + bond_next),
                &(k(p, KeyRole::Atom3) + k(c, KeyRole::Atom3) - k(c, KeyRole::Atom1)),
            );
            let goal = PI + 0.5 * cond.matrix()[(i, 0)].tanh();
            assert!(wrap_angle(d - goal).abs() < 1e-9, "unit {i}: {d} vs {goal}");
        }
        let input = AssemblyInput {
            std_units: units,
            rotations,
            graph: &graph,
        };
        assert_eq!(assemble(&input).unwrap().coords.len(), graph.total_atoms());
    }

    #[test]
    fn oracle_torsion_noise() {
        let d = OracleTorsionDenoiser::new(vec![vec![0.5, -3.0]]);
        let q = TorsionQuery {
            unit: 0,
            torsions: &[1.0, 3.0],
            t: 1,
            sigma: 0.5,
            condition: &[],
        };
        let eps = d.predict_noise(&q).unwrap();
        assert!((eps[0] - 1.0).abs() < 1e-15);
        assert!((eps[1] - wrap_angle(6.0) / 0.5).abs() < 1e-15);
    }
}
