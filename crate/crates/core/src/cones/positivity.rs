use num::{BigInt, Integer, Signed, Zero};

use super::numspace::NumSpace;
use crate::error::{Error, Result};
use crate::exactla::lp::{solve_general, LpOutcome, Sense};
use crate::exactla::rat::int;
use crate::exactla::{PolyCone, Polyhedron, QVec, Rat};
use crate::toric::divisor::{cartier_data, section_polyhedron, volume, TDivisor};

impl NumSpace {
    fn check_q_cartier(&self, d: &TDivisor) -> Result<()> {
        cartier_data(d, &self.pair.fan).map(|_| ())
    }

    pub fn is_nef(&self, d: &TDivisor) -> Result<bool> {
        self.check_q_cartier(d)?;
        Ok(self.curves.iter().all(|c| !c.degree(d).is_negative()))
    }

    /// Kleiman: strictly positive on every nonzero generator of the Mori cone.
    pub fn is_ample(&self, d: &TDivisor) -> Result<bool> {
        self.check_q_cartier(d)?;
        let x = self.divisor_class(d)?;
        Ok(self.class_is_ample(&x))
    }

    pub fn class_is_ample(&self, x: &QVec) -> bool {
        self.mori.is_pointed() && self.mori.rays.iter().all(|g| x.dot(g).is_positive())
    }

    pub fn class_is_nef(&self, x: &QVec) -> bool {
        self.mori.generators().iter().all(|g| !x.dot(g).is_negative())
    }

    /// Ampleness as membership in the interior of the nef cone.
    pub fn is_ample_by_interior(&self, d: &TDivisor) -> Result<bool> {
        let x = self.divisor_class(d)?;
        Ok(self.nef_cone().contains_interior(&x))
    }

    /// Ampleness as strict convexity of the support function across every contracted wall.
    pub fn is_ample_by_convexity(&self, d: &TDivisor) -> Result<bool> {
        let cd = cartier_data(d, &self.pair.fan)?;
        let f = &self.pair.fan;
        Ok(self.curves.iter().all(|c| {
            let b = f.off_wall(c.wall.right, &c.wall)[0];
            (&cd.m[c.wall.left] - &cd.m[c.wall.right]).dot(&f.u(b)).is_positive()
        }))
    }

    /// `D` is big over the base iff its restriction to the generic fibre has a full-dimensional
    /// section polytope.
    pub fn is_big(&self, d: &TDivisor) -> Result<bool> {
        Ok(fibre_polytope(&self.pair, d).is_full_dimensional())
    }

    /// Volume-based bigness, only meaningful over a point.
    pub fn is_big_by_volume(&self, d: &TDivisor) -> Result<bool> {
        if self.pair.base.is_some() {
            return Err(Error::Unsupported("volume bigness test over a positive-dimensional base".into()));
        }
        Ok(volume(d, &self.pair.fan)?.is_positive())
    }

    /// `D = A + E` with `A` ample and `E` effective, found by maximizing the ampleness margin
    /// of `D - E` over effective torus-invariant `E`.
    pub fn kodaira_decompose(&self, d: &TDivisor) -> Result<Option<(TDivisor, TDivisor)>> {
        self.check_q_cartier(d)?;
        let nr = self.pair.n_rays();
        // variables: e_0..e_{nr-1}, t
        let nv = nr + 1;
        let mut ineqs: Vec<(QVec, Rat)> = Vec::new();
        for c in &self.curves {
            // D.C - Σ e_ρ (D_ρ.C) - t >= 0
            let mut a = QVec::zeros(nv);
            for j in 0..nr {
                a[j] = -c.degrees[j].clone();
            }
            a[nr] = int(-1);
            ineqs.push((a, -c.degree(d)));
        }
        for j in 0..nr {
            ineqs.push((QVec::unit(nv, j), Rat::zero()));
        }
        ineqs.push((-&QVec::unit(nv, nr), int(-1)));
        match solve_general(&QVec::unit(nv, nr), &ineqs, &[], nv, Sense::Max) {
            LpOutcome::Optimal { value, witness } if value.is_positive() => {
                let e = TDivisor::new(witness[..nr].to_vec());
                let a = d.sub(&e);
                if !self.is_ample(&a)? {
                    return Err(Error::Invariant("Kodaira decomposition produced a non-ample part".into()));
                }
                Ok(Some((a, e)))
            }
            _ => Ok(None),
        }
    }

    /// Pseudoeffective iff the class lies in the cone spanned by prime divisor classes.
    pub fn is_pseudoeffective(&self, d: &TDivisor) -> Result<bool> {
        let x = self.divisor_class(d)?;
        Ok(self.effective_cone().contains(&x))
    }

    pub fn effective_cone(&self) -> PolyCone {
        let gens: Vec<QVec> = (0..self.pair.n_rays()).map(|i| self.prime_class(i)).collect();
        PolyCone::from_generators(self.rank, &gens).expect("classes have rank entries")
    }

    /// Supporting hyperplane of a nef, non-ample `D` and the extremal face it cuts out.
    pub fn supporting_data(&self, d: &TDivisor) -> Result<SupportingData> {
        if !self.is_nef(d)? {
            return Err(Error::Precondition("supporting data needs a nef divisor".into()));
        }
        if self.is_ample(d)? {
            return Err(Error::Precondition("an ample class has no supporting hyperplane".into()));
        }
        let hyperplane = self.divisor_class(d)?;
        Ok(self.face_of(&hyperplane))
    }

    /// `{γ ∈ NE : x · γ = 0}` for a nef class `x`.
    pub fn face_of(&self, x: &QVec) -> SupportingData {
        let gens: Vec<QVec> = self.mori.rays.iter().filter(|g| x.dot(g).is_zero()).cloned().collect();
        let face = PolyCone::from_generators(self.rank, &gens).expect("rank entries");
        let is_ray = face.cone_dim() == 1;
        SupportingData { hyperplane: x.clone(), face, is_ray }
    }

    /// Cone theorem decomposition, with the denominator check for an optional Cartier ample `A`.
    pub fn cone_theorem(&self, ample: Option<&TDivisor>) -> Result<ConeTheorem> {
        let kd = self.pair.k_plus_delta();
        let cd = self.pair.log_canonical_data()?;
        let a = cd.index();
        let b = self.pair.fiber_dimension()?;
        let kx = self.divisor_class(&kd)?;
        let half = PolyCone::from_inequalities(self.rank, std::slice::from_ref(&kx))?;
        let k_nonnegative = self.mori.intersect(&half);
        let mut negative_rays = Vec::new();
        for r in &self.mori.rays {
            if !kx.dot(r).is_negative() {
                continue;
            }
            let curve = *self
                .curves_on_ray(r)
                .iter()
                .min_by(|&&i, &&j| self.curves[i].wall.rays.cmp(&self.curves[j].wall.rays))
                .ok_or_else(|| Error::Invariant("extremal ray without a wall curve".into()))?;
            let denominator = match ample {
                None => None,
                Some(h) => {
                    let c = &self.curves[curve];
                    let q = c.degree(h) / (Rat::from_integer(a.clone()) * c.degree(&kd));
                    let v = q.denom().clone();
                    let bound = &a * BigInt::from(b as u64 + 1);
                    Some(DenominatorCheck { value: q, v: v.clone(), bound: bound.clone(), holds: v <= bound })
                }
            };
            negative_rays.push(NegativeRay { ray: r.clone(), curve, denominator });
        }
        Ok(ConeTheorem { k_nonnegative, negative_rays, cartier_index: a, fiber_dimension: b })
    }
}

#[derive(Clone, Debug)]
pub struct SupportingData {
    pub hyperplane: QVec,
    pub face: PolyCone,
    pub is_ray: bool,
}

#[derive(Clone, Debug)]
pub struct DenominatorCheck {
    /// `(A·C) / (a (K+Δ)·C)`, a negative rational `-u/v`.
    pub value: Rat,
    pub v: BigInt,
    pub bound: BigInt,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct NegativeRay {
    pub ray: QVec,
    pub curve: usize,
    pub denominator: Option<DenominatorCheck>,
}

#[derive(Clone, Debug)]
pub struct ConeTheorem {
    pub k_nonnegative: PolyCone,
    pub negative_rays: Vec<NegativeRay>,
    pub cartier_index: BigInt,
    pub fiber_dimension: usize,
}

impl ConeTheorem {
    /// Whether `NE = NE_{K+Δ≥0} + Σ R_j`.
    pub fn reconstructs(&self, mori: &PolyCone) -> bool {
        let mut gens = self.k_nonnegative.generators();
        gens.extend(self.negative_rays.iter().map(|r| r.ray.clone()));
        PolyCone::from_generators(mori.dim, &gens).map(|c| c.set_eq(mori)).unwrap_or(false)
    }
}

/// Sections of `D` on the generic fibre: only rays in the kernel of the structure map constrain.
pub fn fibre_polytope(p: &crate::toric::Pair, d: &TDivisor) -> Polyhedron {
    let full = section_polyhedron(d, &p.fan);
    match &p.base {
        None => full,
        Some(b) => {
            let ineqs = full
                .ineqs
                .into_iter()
                .enumerate()
                .filter(|(i, _)| b.map.apply(&p.fan.rays[*i]).iter().all(|x| *x == 0))
                .map(|(_, c)| c)
                .collect();
            Polyhedron::new(p.fan.rank, ineqs, vec![])
        }
    }
}

/// Least common multiple of denominators of a divisor's coefficients.
pub fn denominator(d: &TDivisor) -> BigInt {
    d.coeffs.iter().fold(BigInt::from(1), |acc, c| acc.lcm(c.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::fan::Fan;
    use crate::toric::Pair;

    fn f1() -> Pair {
        let f = Fan::new(
            2,
            vec![vec![1, 0], vec![1, 1], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        )
        .unwrap();
        Pair::new(f, TDivisor::zero(4)).unwrap()
    }

    #[test]
    fn f1_positivity() {
        let p = f1();
        let ns = NumSpace::build(&p).unwrap();
        let mk = p.k().neg();
        assert!(ns.is_ample(&mk).unwrap());
        assert!(ns.is_ample_by_interior(&mk).unwrap());
        assert!(ns.is_ample_by_convexity(&mk).unwrap());
        let e = TDivisor::prime(4, 1);
        assert!(!ns.is_nef(&e).unwrap());
        assert!(!ns.is_big(&e).unwrap());
        assert!(ns.is_pseudoeffective(&e).unwrap());
        let z = TDivisor::zero(4);
        assert!(ns.is_nef(&z).unwrap() && !ns.is_ample(&z).unwrap());
        let (a, ee) = ns.kodaira_decompose(&mk).unwrap().unwrap();
        assert_eq!(a.add(&ee), mk);
        assert!(ns.kodaira_decompose(&e).unwrap().is_none());
    }

    #[test]
    fn f1_supporting_face() {
        let p = f1();
        let ns = NumSpace::build(&p).unwrap();
        // K + A with A = D_{r3} + 3 D_{r4}
        let d = p.k().add(&TDivisor::from_ints(&[0, 0, 1, 3]));
        let s = ns.supporting_data(&d).unwrap();
        assert!(s.is_ray);
        let e_curve = ns.curves.iter().position(|c| c.wall.rays == vec![1]).unwrap();
        assert!(s.face.contains(&ns.curves[e_curve].class));
        let fib = TDivisor::from_ints(&[0, 0, 1, 0]);
        let s = ns.supporting_data(&fib).unwrap();
        let f_curve = ns.curves.iter().position(|c| c.wall.rays == vec![0]).unwrap();
        assert!(s.is_ray && s.face.contains(&ns.curves[f_curve].class));
    }

    #[test]
    fn f1_cone_theorem() {
        let p = f1();
        let ns = NumSpace::build(&p).unwrap();
        let ct = ns.cone_theorem(Some(&p.k().neg())).unwrap();
        assert_eq!(ct.negative_rays.len(), 2);
        assert!(ct.reconstructs(&ns.mori));
        assert!(ct.negative_rays.iter().all(|r| r.denominator.as_ref().unwrap().holds));
    }
}
