//! Finite abelian `p`-groups `⊕ Z/p^{a_i}` and their subgroups.
//!
//! A subgroup is given by a matrix whose columns generate it. All tests
//! (membership, order, equality, intersection) go through a Smith normal form
//! of the generators together with the relations `p^{a_i} e_i`, so the
//! generating sets never need to be canonical.

use rand::Rng;

use crate::matrix::Mat;
use crate::padic::PadicContext;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    ctx: PadicContext,
    exps: Vec<u32>,
}

/// Coordinates on `G/H`: `x ↦ u·x`, row `i` read modulo `p^{vals[i]}`.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub u: Mat,
    pub vals: Vec<u32>,
}

impl AbelianGroup {
    pub fn new(ctx: PadicContext, exps: Vec<u32>) -> Self {
        assert!(exps.iter().all(|&a| a >= 1 && a <= ctx.precision_exp()));
        AbelianGroup { ctx, exps }
    }

    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn rank(&self) -> usize {
        self.exps.len()
    }

    /// `log_p |G|`.
    pub fn size_exp(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn zero(&self) -> Vec<u128> {
        vec![0; self.rank()]
    }

    fn modulus_of(&self, i: usize) -> u128 {
        self.ctx.p_pow(self.exps[i])
    }

    pub fn normalize(&self, x: &[u128]) -> Vec<u128> {
        x.iter()
            .enumerate()
            .map(|(i, &v)| v % self.modulus_of(i))
            .collect()
    }

    pub fn is_zero(&self, x: &[u128]) -> bool {
        x.iter()
            .enumerate()
            .all(|(i, &v)| v % self.modulus_of(i) == 0)
    }

    pub fn add(&self, x: &[u128], y: &[u128]) -> Vec<u128> {
        let s: Vec<u128> = x.iter().zip(y).map(|(&a, &b)| self.ctx.add(a, b)).collect();
        self.normalize(&s)
    }

    pub fn scale(&self, x: &[u128], c: u128) -> Vec<u128> {
        let s: Vec<u128> = x.iter().map(|&a| self.ctx.mul(a, c)).collect();
        self.normalize(&s)
    }

    /// `log_p` of the order of `x`.
    pub fn order_exp(&self, x: &[u128]) -> u32 {
        x.iter()
            .enumerate()
            .map(|(i, &v)| {
                let v = v % self.modulus_of(i);
                if v == 0 {
                    0
                } else {
                    self.exps[i] - self.ctx.valuation(v)
                }
            })
            .max()
            .unwrap_or(0)
    }

    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Vec<u128> {
        (0..self.rank())
            .map(|i| rng.gen_range(0..self.modulus_of(i)))
            .collect()
    }

    /// Every element, in lexicographic order. Only sensible for tiny groups.
    pub fn elements(&self) -> Vec<Vec<u128>> {
        let mut out = vec![Vec::new()];
        for i in 0..self.rank() {
            let m = self.modulus_of(i);
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..m).map(move |v| {
                        let mut e = prefix.clone();
                        e.push(v);
                        e
                    })
                })
                .collect();
        }
        out
    }

    /// Generators of the whole group.
    pub fn full(&self) -> Mat {
        Mat::identity(self.rank())
    }

    pub fn trivial(&self) -> Mat {
        Mat::zeros(self.rank(), 0)
    }

    fn relations(&self) -> Mat {
        let n = self.ctx.precision_exp();
        Mat::from_fn(self.rank(), self.rank(), |i, j| {
            if i == j && self.exps[i] < n {
                self.ctx.p_pow(self.exps[i])
            } else {
                0
            }
        })
    }

    pub fn quotient(&self, gens: &Mat) -> Quotient {
        assert_eq!(gens.rows(), self.rank());
        let snf = gens.hcat(&self.relations()).snf(&self.ctx);
        Quotient {
            u: snf.u,
            vals: snf.vals,
        }
    }

    pub fn contains(&self, gens: &Mat, x: &[u128]) -> bool {
        self.quotient(gens).contains(&self.ctx, x)
    }

    /// `log_p |H|` for the subgroup generated by the columns of `gens`.
    pub fn subgroup_size_exp(&self, gens: &Mat) -> u32 {
        let q = self.quotient(gens);
        self.size_exp() - q.vals.iter().sum::<u32>()
    }

    /// Invariant factor exponents of the subgroup, descending.
    pub fn subgroup_invariants(&self, gens: &Mat) -> Vec<u32> {
        // H is the cokernel of the relations of G restricted to H; compute it
        // as the kernel of the generator map Z^g -> G.
        let ker = self.kernel_of(gens, self);
        let g = gens.cols();
        let snf = ker.snf(&self.ctx);
        let n = self.ctx.precision_exp();
        let mut inv: Vec<u32> = (0..g)
            .map(|i| snf.vals.get(i).copied().unwrap_or(n))
            .filter(|&v| v > 0)
            .collect();
        inv.sort_unstable_by(|a, b| b.cmp(a));
        inv
    }

    /// First generator of `a` that is not in `b`.
    pub fn witness_not_contained(&self, a: &Mat, b: &Mat) -> Option<Vec<u128>> {
        let q = self.quotient(b);
        a.columns()
            .into_iter()
            .find(|x| !q.contains(&self.ctx, x))
            .map(|x| self.normalize(&x))
    }

    pub fn is_subgroup_of(&self, a: &Mat, b: &Mat) -> bool {
        self.witness_not_contained(a, b).is_none()
    }

    pub fn same_subgroup(&self, a: &Mat, b: &Mat) -> bool {
        self.is_subgroup_of(a, b) && self.is_subgroup_of(b, a)
    }

    pub fn is_trivial(&self, gens: &Mat) -> bool {
        gens.columns().iter().all(|x| self.is_zero(x))
    }

    /// `f` maps this group into `target`; is it the zero homomorphism?
    pub fn hom_is_zero(&self, f: &Mat, target: &AbelianGroup) -> bool {
        (0..f.rows()).all(|i| f.row(i).iter().all(|&x| x % target.modulus_of(i) == 0))
    }

    pub fn homs_equal(&self, f: &Mat, g: &Mat, target: &AbelianGroup) -> bool {
        self.hom_is_zero(&f.sub(g, &self.ctx), target)
    }

    /// Generators of `ker(f : self -> target)`.
    pub fn kernel_of(&self, f: &Mat, target: &AbelianGroup) -> Mat {
        assert_eq!(f.rows(), target.rank());
        let n = self.ctx.precision_exp();
        let scaled = Mat::from_fn(f.rows(), f.cols(), |i, j| {
            self.ctx
                .mul(f[(i, j)], self.ctx.p_pow_res(n - target.exps[i]))
        });
        scaled.kernel(&self.ctx)
    }

    /// Generators of `f^{-1}(H)` where `H ⊂ target` is generated by `h`.
    pub fn preimage(&self, f: &Mat, target: &AbelianGroup, h: &Mat) -> Mat {
        let q = target.quotient(h);
        let composed = q.u.mul(f, &self.ctx);
        let n = self.ctx.precision_exp();
        let scaled = Mat::from_fn(composed.rows(), composed.cols(), |i, j| {
            self.ctx
                .mul(composed[(i, j)], self.ctx.p_pow_res(n - q.vals[i]))
        });
        scaled.kernel(&self.ctx)
    }

    pub fn intersect(&self, a: &Mat, b: &Mat) -> Mat {
        let coeffs = {
            let q = self.quotient(b);
            let composed = q.u.mul(a, &self.ctx);
            let n = self.ctx.precision_exp();
            Mat::from_fn(composed.rows(), composed.cols(), |i, j| {
                self.ctx
                    .mul(composed[(i, j)], self.ctx.p_pow_res(n - q.vals[i]))
            })
            .kernel(&self.ctx)
        };
        a.mul(&coeffs, &self.ctx)
    }

    pub fn sum(&self, a: &Mat, b: &Mat) -> Mat {
        a.hcat(b)
    }

    /// Subgroup generated by `c·x` for `x` in the subgroup `a`.
    pub fn scale_subgroup(&self, a: &Mat, c: u128) -> Mat {
        a.scale(c, &self.ctx)
    }

    /// `G[p^c] = {x : p^c x = 0}`.
    pub fn p_torsion(&self, c: u32) -> Mat {
        let pc = self.ctx.p_pow_res(c);
        self.kernel_of(&Mat::scalar(self.rank(), pc), self)
    }
}

impl Quotient {
    pub fn contains(&self, ctx: &PadicContext, x: &[u128]) -> bool {
        let y = self.u.mul_vec(x, ctx);
        y.iter()
            .zip(&self.vals)
            .all(|(&c, &v)| ctx.valuation(c) >= v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g93() -> AbelianGroup {
        AbelianGroup::new(PadicContext::new(3, 4).unwrap(), vec![2, 1])
    }

    /// Subgroup spanned by the columns, by closure over all combinations.
    fn brute_span(g: &AbelianGroup, gens: &Mat) -> Vec<Vec<u128>> {
        let mut set = vec![g.zero()];
        loop {
            let mut grew = false;
            for x in set.clone() {
                for c in gens.columns() {
                    let y = g.add(&x, &c);
                    if !set.contains(&y) {
                        set.push(y);
                        grew = true;
                    }
                }
            }
            if !grew {
                set.sort();
                return set;
            }
        }
    }

    #[test]
    fn membership_matches_brute_force() {
        let g = g93();
        let gens = Mat::from_columns(2, &[vec![3, 1]]);
        let span = brute_span(&g, &gens);
        assert_eq!(span.len(), 3);
        for x in g.elements() {
            assert_eq!(g.contains(&gens, &x), span.contains(&x), "{x:?}");
        }
        assert_eq!(g.subgroup_size_exp(&gens), 1);
    }

    #[test]
    fn orders_and_sizes() {
        let g = g93();
        assert_eq!(g.size_exp(), 3);
        assert_eq!(g.order_exp(&[1, 0]), 2);
        assert_eq!(g.order_exp(&[3, 1]), 1);
        assert_eq!(g.order_exp(&[0, 0]), 0);
        assert_eq!(g.elements().len(), 27);
        assert_eq!(g.subgroup_invariants(&g.full()), vec![2, 1]);
        assert_eq!(
            g.subgroup_invariants(&Mat::from_columns(2, &[vec![1, 1]])),
            vec![2]
        );
    }

    #[test]
    fn kernel_intersection_preimage() {
        let g = g93();
        // multiplication by 3
        let f = Mat::scalar(2, 3);
        let ker = g.kernel_of(&f, &g);
        let brute: Vec<_> = g
            .elements()
            .into_iter()
            .filter(|x| g.is_zero(&g.scale(x, 3)))
            .collect();
        assert_eq!(brute_span(&g, &ker), brute);
        let a = Mat::from_columns(2, &[vec![1, 0]]);
        let b = Mat::from_columns(2, &[vec![1, 1]]);
        let inter = g.intersect(&a, &b);
        assert_eq!(
            brute_span(&g, &inter),
            vec![vec![0, 0], vec![3, 0], vec![6, 0]]
        );
        // preimage of <(3,0)> under multiplication by 3 is everything
        let pre = g.preimage(&f, &g, &Mat::from_columns(2, &[vec![3, 0]]));
        assert!(g.same_subgroup(&pre, &g.full()));
        assert!(g.witness_not_contained(&g.full(), &a).is_some());
    }
}
