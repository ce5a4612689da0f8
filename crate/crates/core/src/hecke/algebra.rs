//! The Hecke algebra 𝕋 acting on the cuspidal lattice S.
//!
//! 𝕋 is stored through the orbit lattice `L = v·𝕋 ⊂ S` of a fixed vector
//! `v`. When `rank L = rank 𝕋` the map `t ↦ v·t` is an isomorphism of
//! 𝕋-modules `𝕋 → L`, so the matrices of the generators on `L` form the
//! regular representation and `L` serves as the ℤ-basis of 𝕋.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fp_algebra::{FpAlgebra, ModuleAction};
use super::regular::RegularRep;
use crate::arith::{factor_u64, primes_up_to};
use crate::error::{Error, Result};
use crate::linalg::{snf, IntLattice, IntMatrix, ModMatrix};
use crate::modsym::{hecke, sturm_bound, ModSymSpace, OperatorMatrix};

/// Largest rank at which the regular representation is kept in memory.
pub const REGULAR_CACHE_RANK: usize = 160;

const SEED_ATTEMPTS: u64 = 4;
const CLOSURE_ROUNDS: usize = 12;

#[derive(Clone, Debug)]
pub struct HeckeAlgebra {
    level: u64,
    bound: u64,
    generators: Vec<OperatorMatrix>,
    lattice: IntLattice,
    seed: Vec<BigInt>,
    unit: Vec<BigInt>,
    regular: Option<Vec<IntMatrix>>,
}

/// `T_ℓ`/`U_ℓ` for all primes `ℓ ≤ sturm_bound(n)`, closed into a ring.
pub fn build_hecke_algebra(space: &ModSymSpace) -> Result<HeckeAlgebra> {
    HeckeAlgebra::build(space)
}

fn seed_vector(n: u64, attempt: u64, r: usize) -> Vec<BigInt> {
    let mut rng = ChaCha8Rng::seed_from_u64(n.wrapping_mul(0x9e37_79b9).wrapping_add(attempt));
    (0..r).map(|_| BigInt::from(rng.gen_range(-3i64..=3))).collect()
}

/// `v·T_m` for `1 ≤ m ≤ bound`, via `T_m = T_{m/p}·T_p − p·T_{m/p²}` with
/// `p` the least prime factor of `m` (the correction only when `p ∤ n`).
fn orbit_vectors(n: u64, bound: u64, v: &[BigInt], gen_of: impl Fn(u64) -> usize, gens: &[OperatorMatrix]) -> Vec<Vec<BigInt>> {
    let mut out: Vec<Vec<BigInt>> = vec![Vec::new(), v.to_vec()];
    for m in 2..=bound {
        let p = factor_u64(m)[0].0;
        let mut w = gens[gen_of(p)].matrix.vec_mul(&out[(m / p) as usize]);
        if (m / p) % p == 0 && n % p != 0 {
            let z = &out[(m / p / p) as usize];
            let pb = BigInt::from(p);
            for (a, c) in w.iter_mut().zip(z) {
                if !c.is_zero() {
                    *a -= c * &pb;
                }
            }
        }
        out.push(w);
    }
    out.remove(0);
    out
}

impl HeckeAlgebra {
    pub fn build(space: &ModSymSpace) -> Result<Self> {
        let n = space.level();
        let bound = sturm_bound(n);
        let r = space.cuspidal_rank();
        let primes = primes_up_to(bound);
        let generators: Vec<OperatorMatrix> = primes.iter().map(|&p| hecke(space, p)).collect::<Result<_>>()?;
        let gen_of = |p: u64| primes.binary_search(&p).expect("prime below the bound");
        if r == 0 {
            return Ok(HeckeAlgebra {
                level: n,
                bound,
                generators,
                lattice: IntLattice::zero(0),
                seed: Vec::new(),
                unit: Vec::new(),
                regular: Some(Vec::new()),
            });
        }
        // 𝕋_ℚ is dual to S₂(Γ₀(n), ℚ), so its rank is the genus r/2
        let target = r / 2;
        let mut last_rank = 0;
        for attempt in 0..SEED_ATTEMPTS {
            let v = seed_vector(n, attempt, r);
            let vecs = orbit_vectors(n, bound, &v, gen_of, &generators);
            let mut lattice = IntLattice::from_rows(r, vecs);
            last_rank = lattice.rank();
            if lattice.rank() != target {
                continue;
            }
            let regular = close_lattice(&mut lattice, &generators)?;
            let unit = lattice
                .coordinates(&v)
                .ok_or_else(|| Error::Internal("seed vector left its own orbit".into()))?;
            let regular = (target <= REGULAR_CACHE_RANK).then_some(regular);
            return Ok(HeckeAlgebra {
                level: n,
                bound,
                generators,
                lattice,
                seed: v,
                unit,
                regular,
            });
        }
        Err(Error::ClosureFailure(format!(
            "orbit rank {last_rank} never reached the genus {target}"
        )))
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn sturm_bound(&self) -> u64 {
        self.bound
    }

    pub fn generators(&self) -> &[OperatorMatrix] {
        &self.generators
    }

    /// Index of the generator `T_ℓ`/`U_ℓ`.
    pub fn generator_index(&self, l: u64) -> Option<usize> {
        self.generators.iter().position(|g| match g.name {
            crate::modsym::OperatorName::T(x) | crate::modsym::OperatorName::U(x) => x == l,
            _ => false,
        })
    }

    /// Rank of 𝕋 over ℤ.
    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn cuspidal_rank(&self) -> usize {
        self.lattice.ambient_dim()
    }

    /// The orbit lattice `L = v·𝕋` in S-coordinates.
    pub fn lattice(&self) -> &IntLattice {
        &self.lattice
    }

    pub fn seed(&self) -> &[BigInt] {
        &self.seed
    }

    /// Coordinates of `v` (the identity of 𝕋) in the basis of `L`.
    pub fn unit(&self) -> &[BigInt] {
        &self.unit
    }

    /// Matrix of an S-endomorphism commuting with 𝕋, restricted to `L`.
    pub fn on_lattice(&self, x: &IntMatrix) -> Result<IntMatrix> {
        self.lattice.restrict_operator(x)
    }

    /// Generator matrices on `L`, in the order of [`Self::generators`].
    pub fn regular_generators(&self) -> Result<Vec<IntMatrix>> {
        if let Some(reg) = &self.regular {
            return Ok(reg.clone());
        }
        self.generators.iter().map(|g| self.on_lattice(&g.matrix)).collect()
    }

    pub fn regular_rep(&self) -> Result<RegularRep> {
        Ok(RegularRep {
            gens: self.regular_generators()?,
            unit: self.unit.clone(),
        })
    }

    /// 𝕋/p𝕋 as a finite algebra.
    pub fn mod_p(&self, p: u64) -> Result<FpAlgebra> {
        self.regular_rep()?.mod_p(p)
    }

    /// The action of 𝕋/p𝕋 on S/pS.
    pub fn s_action_mod_p(&self, alg: &FpAlgebra) -> ModuleAction {
        let gens: Vec<ModMatrix> = self.generators.iter().map(|g| ModMatrix::from_int(&g.matrix, alg.p())).collect();
        alg.module_action(&gens)
    }

    /// S-matrices of the ℤ-basis of 𝕋 (the basis of `L` read through `v`).
    pub fn endomorphism_basis(&self) -> Result<Vec<IntMatrix>> {
        let gens: Vec<IntMatrix> = self.generators.iter().map(|g| g.matrix.clone()).collect();
        self.regular_rep()?.basis_action(&gens)
    }

    /// Whether an S-endomorphism lies in 𝕋.
    pub fn contains(&self, x: &IntMatrix) -> Result<bool> {
        let r = self.cuspidal_rank();
        if x.rows() != r || x.cols() != r {
            return Ok(false);
        }
        let Some(c) = self.lattice.coordinates(&x.vec_mul(&self.seed)) else {
            return Ok(false);
        };
        let basis = self.endomorphism_basis()?;
        let mut acc = IntMatrix::zeros(r, r);
        for (cj, bj) in c.iter().zip(&basis) {
            if !cj.is_zero() {
                acc = acc.add(&bj.scale(cj));
            }
        }
        Ok(acc == *x)
    }

    /// Index of 𝕋 in its saturation `𝕋_ℚ ∩ End(S)`.
    pub fn saturation_index(&self) -> Result<BigInt> {
        let basis = self.endomorphism_basis()?;
        if basis.is_empty() {
            return Ok(BigInt::from(1));
        }
        let rows: Vec<Vec<BigInt>> = basis.iter().map(|m| m.entries().to_vec()).collect();
        let cols = rows[0].len();
        let factors = snf(&IntMatrix::from_rows(rows, cols));
        Ok(factors.iter().fold(BigInt::from(1), |a, f| a * f))
    }
}

/// Enlarge `lattice` until every generator preserves it; returns the
/// generator matrices on the final lattice.
fn close_lattice(lattice: &mut IntLattice, gens: &[OperatorMatrix]) -> Result<Vec<IntMatrix>> {
    for _ in 0..CLOSURE_ROUNDS {
        let mut grown = false;
        let mut mats = Vec::with_capacity(gens.len());
        for g in gens {
            match lattice.restrict_operator(&g.matrix) {
                Ok(m) => mats.push(m),
                Err(_) => {
                    let img = lattice.basis().mul(&g.matrix);
                    *lattice = IntLattice::from_generators(&lattice.basis().vstack(&img));
                    grown = true;
                    break;
                }
            }
        }
        if !grown {
            return Ok(mats);
        }
    }
    Err(Error::ClosureFailure(format!(
        "lattice still growing after {CLOSURE_ROUNDS} rounds"
    )))
}
