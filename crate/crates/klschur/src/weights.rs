//! Negative-level affine weight combinatorics: the dot action of the
//! affine symmetric group on rho-shifted N-tuples, antidominant orbit
//! representatives, stabilizer parabolics, and the weight-to-coset-
//! representative correspondence.
//!
//! All weights here are already rho-shifted; the action is realized as
//! `S_N` semidirect the sum-zero translations, a translation by `beta`
//! acting as `a -> a - e*beta`.  Concretely `s_i` (1 <= i <= N-1)
//! transposes adjacent entries and `s_0` maps `(a_1,...,a_N)` to
//! `(a_N - e, a_2, ..., a_{N-1}, a_1 + e)`.
//!
//! The antidominant region is `a_1 <= a_2 <= ... <= a_N` with
//! `a_N <= a_1 + e`; it meets every orbit exactly once.  Nu-dominance is
//! tested in the shifted-strict form `a_i > a_{i+1}` (the unshifted
//! condition `lambda(alpha^vee) >= 0` translates to strict inequality on
//! the shifted tuple).

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;

use crate::coxeter::{AffinePermutation, Extremum, ParabolicSubset, Side};
use crate::error::Error;
use crate::Result;

/// Block-level parameters: the rank `N`, the level parameter `e`, and the
/// finite-type parabolic `nu` cutting out the parabolic category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkageContext {
    rank: usize,
    e: i64,
    nu: ParabolicSubset,
}

impl LinkageContext {
    pub fn new(rank: usize, e: i64, nu: ParabolicSubset) -> Result<Self> {
        if e < 1 {
            return Err(Error::Config(format!("level parameter e = {} < 1", e)));
        }
        if nu.rank() != rank {
            return Err(Error::RankMismatch(nu.rank(), rank));
        }
        if nu.contains(0) {
            return Err(Error::Config(
                "nu must omit the affine generator 0".to_string(),
            ));
        }
        Ok(LinkageContext { rank, e, nu })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn e(&self) -> i64 {
        self.e
    }

    pub fn nu(&self) -> &ParabolicSubset {
        &self.nu
    }
}

/// A rho-shifted integral weight: the finite N-tuple together with the
/// inert delta-coefficient (carried through the action unchanged).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftedWeight {
    entries: Vec<i64>,
    delta_coeff: Ratio<i64>,
}

impl ShiftedWeight {
    pub fn new(entries: Vec<i64>) -> Self {
        ShiftedWeight {
            entries,
            delta_coeff: Ratio::from_integer(0),
        }
    }

    pub fn with_delta(entries: Vec<i64>, delta_coeff: Ratio<i64>) -> Self {
        ShiftedWeight {
            entries,
            delta_coeff,
        }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn delta_coeff(&self) -> Ratio<i64> {
        self.delta_coeff
    }

    /// The multiset of residues mod `e` together with the entry sum;
    /// a complete orbit invariant of the dot action.
    pub fn orbit_key(&self, e: i64) -> (BTreeMap<i64, usize>, i64) {
        let mut residues: BTreeMap<i64, usize> = BTreeMap::new();
        for &a in &self.entries {
            *residues.entry(a.rem_euclid(e)).or_insert(0) += 1;
        }
        (residues, self.entries.iter().sum())
    }
}

impl fmt::Display for ShiftedWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v)?;
        }
        write!(f, "]")
    }
}

/// The dot action of the simple reflection `s_i`.
pub fn act_simple(ctx: &LinkageContext, i: usize, a: &ShiftedWeight) -> Result<ShiftedWeight> {
    let n = ctx.rank();
    if a.rank() != n {
        return Err(Error::RankMismatch(a.rank(), n));
    }
    if n < 2 || i >= n {
        return Err(Error::GeneratorOutOfRange { index: i, rank: n });
    }
    let mut entries = a.entries.clone();
    if i == 0 {
        let first = entries[0];
        let last = entries[n - 1];
        entries[0] = last - ctx.e;
        entries[n - 1] = first + ctx.e;
    } else {
        entries.swap(i - 1, i);
    }
    Ok(ShiftedWeight::with_delta(entries, a.delta_coeff))
}

/// The dot action of a general element, through a reduced word.
pub fn act(
    ctx: &LinkageContext,
    w: &AffinePermutation,
    a: &ShiftedWeight,
) -> Result<ShiftedWeight> {
    if w.rank() != ctx.rank() {
        return Err(Error::RankMismatch(w.rank(), ctx.rank()));
    }
    let mut out = a.clone();
    for &i in w.reduced_word().iter().rev() {
        out = act_simple(ctx, i, &out)?;
    }
    Ok(out)
}

/// True iff the shifted tuple is antidominant: weakly ascending with the
/// affine wrap `a_N <= a_1 + e`.
pub fn is_antidominant(ctx: &LinkageContext, a: &ShiftedWeight) -> bool {
    let v = &a.entries;
    let n = v.len();
    v.windows(2).all(|w| w[0] <= w[1]) && (n < 2 || v[n - 1] <= v[0] + ctx.e)
}

/// The antidominant representative of the orbit of `a`, together with the
/// minimal-length `g` such that `g . o = a`.
pub fn antidominant_rep(
    ctx: &LinkageContext,
    a: &ShiftedWeight,
) -> Result<(ShiftedWeight, AffinePermutation)> {
    let n = ctx.rank();
    if a.rank() != n {
        return Err(Error::RankMismatch(a.rank(), n));
    }
    let mut cur = a.clone();
    let mut path: Vec<usize> = Vec::new();
    loop {
        // smallest index whose pairing is strictly positive
        let violation = (0..n).find(|&i| {
            if n < 2 {
                false
            } else if i == 0 {
                cur.entries[n - 1] > cur.entries[0] + ctx.e
            } else {
                cur.entries[i - 1] > cur.entries[i]
            }
        });
        match violation {
            Some(i) => {
                cur = act_simple(ctx, i, &cur)?;
                path.push(i);
            }
            None => break,
        }
    }
    // a = s_{r_1} s_{r_2} ... s_{r_k} . o  for the applied indices r_1..r_k
    let mut g = AffinePermutation::identity(n);
    for &i in path.iter().rev() {
        g = g.mul_simple_left(i)?;
    }
    let mu = stabilizer(ctx, &cur)?;
    let g = mu.coset_rep(&g, Side::Right, Extremum::Min)?;
    Ok((cur, g))
}

/// The stabilizer parabolic of an antidominant weight under the dot
/// action: index `i >= 1` iff `o_i = o_{i+1}`, index 0 iff
/// `o_N = o_1 + e`.
pub fn stabilizer(ctx: &LinkageContext, o: &ShiftedWeight) -> Result<ParabolicSubset> {
    if !is_antidominant(ctx, o) {
        return Err(Error::NotAntidominant(o.to_string()));
    }
    let n = ctx.rank();
    let mut gens = Vec::new();
    if n >= 2 {
        if o.entries[n - 1] == o.entries[0] + ctx.e {
            gens.push(0);
        }
        for i in 1..n {
            if o.entries[i - 1] == o.entries[i] {
                gens.push(i);
            }
        }
    }
    ParabolicSubset::new(n, gens)
}

/// Shifted-strict nu-dominance: `a_i > a_{i+1}` for every `i` in `nu`.
pub fn is_nu_dominant(ctx: &LinkageContext, a: &ShiftedWeight) -> bool {
    ctx.nu
        .generators()
        .all(|i| i >= 1 && a.entries[i - 1] > a.entries[i])
}

/// Checks that `target` lies in the dot orbit of `anchor`, by comparing
/// the residue multisets mod `e` and the entry sums.
pub fn check_same_orbit(
    ctx: &LinkageContext,
    target: &ShiftedWeight,
    anchor: &ShiftedWeight,
) -> Result<()> {
    if target.rank() != anchor.rank() {
        return Err(Error::RankMismatch(target.rank(), anchor.rank()));
    }
    let (rt, st) = target.orbit_key(ctx.e);
    let (ra, sa) = anchor.orbit_key(ctx.e);
    if rt != ra {
        return Err(Error::OrbitMismatch {
            target: target.to_string(),
            anchor: anchor.to_string(),
            reason: "residue multisets differ".into(),
        });
    }
    if st != sa {
        return Err(Error::OrbitMismatch {
            target: target.to_string(),
            anchor: anchor.to_string(),
            reason: format!("entry sums differ ({} vs {})", st, sa),
        });
    }
    Ok(())
}

/// The unique minimal coset representative `w` (for `W/W_mu`) with
/// `w . o = target`, where `o` is the antidominant anchor with stabilizer
/// `mu`.
pub fn to_min_rep(
    ctx: &LinkageContext,
    target: &ShiftedWeight,
    o: &ShiftedWeight,
    mu: &ParabolicSubset,
) -> Result<AffinePermutation> {
    check_same_orbit(ctx, target, o)?;
    let (o2, g) = antidominant_rep(ctx, target)?;
    if o2.entries != o.entries {
        return Err(Error::OrbitMismatch {
            target: target.to_string(),
            anchor: o.to_string(),
            reason: format!("antidominant representatives differ ({} vs {})", o2, o),
        });
    }
    mu.coset_rep(&g, Side::Right, Extremum::Min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: usize, e: i64) -> LinkageContext {
        LinkageContext::new(n, e, ParabolicSubset::empty(n)).unwrap()
    }

    fn ctx_nu(n: usize, e: i64, nu: &[usize]) -> LinkageContext {
        LinkageContext::new(n, e, ParabolicSubset::new(n, nu.iter().copied()).unwrap()).unwrap()
    }

    fn wt(v: &[i64]) -> ShiftedWeight {
        ShiftedWeight::new(v.to_vec())
    }

    #[test]
    fn act_simple_examples() {
        let c = ctx(2, 2);
        assert_eq!(act_simple(&c, 1, &wt(&[0, 2])).unwrap(), wt(&[2, 0]));
        // pairing zero: fixed point of s_0
        assert_eq!(act_simple(&c, 0, &wt(&[0, 2])).unwrap(), wt(&[0, 2]));
        assert_eq!(act_simple(&c, 0, &wt(&[1, 2])).unwrap(), wt(&[0, 3]));
    }

    #[test]
    fn act_is_group_action() {
        let c = ctx(3, 2);
        let a = wt(&[1, 4, 0]);
        let x = AffinePermutation::from_word(3, &[0, 2]).unwrap();
        let y = AffinePermutation::from_word(3, &[1, 0, 1]).unwrap();
        let xy = x.compose(&y).unwrap();
        assert_eq!(
            act(&c, &xy, &a).unwrap(),
            act(&c, &x, &act(&c, &y, &a).unwrap()).unwrap()
        );
        // residue multiset invariant
        let b = act(&c, &y, &a).unwrap();
        assert_eq!(a.orbit_key(2), b.orbit_key(2));
    }

    #[test]
    fn antidominant_rep_examples() {
        let c = ctx(2, 2);
        let (o, g) = antidominant_rep(&c, &wt(&[0, 2])).unwrap();
        assert_eq!(o, wt(&[0, 2]));
        assert!(g.is_identity());

        let (o, g) = antidominant_rep(&c, &wt(&[3, 2])).unwrap();
        assert_eq!(o, wt(&[2, 3]));
        assert_eq!(g, AffinePermutation::simple(2, 1).unwrap());

        let (o, g) = antidominant_rep(&c, &wt(&[4, 1])).unwrap();
        assert_eq!(o, wt(&[2, 3]));
        assert_eq!(g.length(), 2);
        assert_eq!(act(&c, &g, &o).unwrap(), wt(&[4, 1]));
    }

    #[test]
    fn antidominant_rep_is_orbit_canonical() {
        // exhaustive enumeration at N in {2,3}, e in {2,3}, entries
        // bounded by 2e
        for n in [2usize, 3] {
            for e in [2i64, 3] {
                let c = ctx(n, e);
                let bound = 2 * e;
                let mut tuples: Vec<Vec<i64>> = vec![vec![]];
                for _ in 0..n {
                    let mut next = Vec::new();
                    for t in &tuples {
                        for v in -bound..=bound {
                            let mut t2 = t.clone();
                            t2.push(v);
                            next.push(t2);
                        }
                    }
                    tuples = next;
                }
                for t in tuples {
                    let a = wt(&t);
                    let (o, g) = antidominant_rep(&c, &a).unwrap();
                    assert!(is_antidominant(&c, &o));
                    assert_eq!(act(&c, &g, &o).unwrap(), a, "g.o != a at {:?}", t);
                    // canonical: every generator-neighbor has the same o
                    for i in 0..n {
                        if n < 2 {
                            continue;
                        }
                        let b = act_simple(&c, i, &a).unwrap();
                        let (o2, _) = antidominant_rep(&c, &b).unwrap();
                        assert_eq!(o, o2, "orbit anchor differs at {:?} s_{}", t, i);
                    }
                }
            }
        }
    }

    #[test]
    fn stabilizer_examples() {
        let c = ctx(2, 2);
        let mu = stabilizer(&c, &wt(&[0, 2])).unwrap();
        assert_eq!(mu, ParabolicSubset::new(2, [0]).unwrap());
        let mu = stabilizer(&c, &wt(&[2, 3])).unwrap();
        assert!(mu.is_empty());
        let mu = stabilizer(&c, &wt(&[1, 1])).unwrap();
        assert_eq!(mu, ParabolicSubset::new(2, [1]).unwrap());
        // non-antidominant input is rejected
        assert!(matches!(
            stabilizer(&c, &wt(&[3, 2])),
            Err(Error::NotAntidominant(_))
        ));
        // stabilizer elements fix o, and it is always finite
        let c3 = ctx(3, 2);
        let o = wt(&[1, 1, 3]);
        let mu = stabilizer(&c3, &o).unwrap();
        assert!(mu.is_finite());
        for w in mu.elements().unwrap() {
            assert_eq!(act(&c3, &w, &o).unwrap(), o);
        }
    }

    #[test]
    fn nu_dominance_examples() {
        let c = ctx_nu(2, 2, &[1]);
        assert!(is_nu_dominant(&c, &wt(&[3, 2])));
        assert!(!is_nu_dominant(&c, &wt(&[2, 3])));
        // ties fail the shifted-strict convention
        assert!(!is_nu_dominant(&c, &wt(&[2, 2])));
        let c0 = ctx(2, 2);
        assert!(is_nu_dominant(&c0, &wt(&[2, 3])));
    }

    #[test]
    fn to_min_rep_examples() {
        let c = ctx(2, 2);
        let o = wt(&[2, 3]);
        let mu = ParabolicSubset::empty(2);
        assert!(to_min_rep(&c, &o, &o, &mu).unwrap().is_identity());
        let w = to_min_rep(&c, &wt(&[3, 2]), &o, &mu).unwrap();
        assert_eq!(w, AffinePermutation::simple(2, 1).unwrap());
        // wrong residue content
        assert!(matches!(
            to_min_rep(&c, &wt(&[3, 3]), &o, &mu),
            Err(Error::OrbitMismatch { .. })
        ));
    }

    #[test]
    fn min_rep_round_trip() {
        // w of length <= 5: to_min_rep(act(w, o)) recovers the minimal
        // representative of w W_mu
        let c = ctx(3, 2);
        let o = wt(&[0, 1, 1]);
        let mu = stabilizer(&c, &o).unwrap();
        let mut seen = std::collections::HashSet::new();
        let e = AffinePermutation::identity(3);
        seen.insert(e.clone());
        let mut level = vec![e];
        for _ in 1..=5u64 {
            let mut next = Vec::new();
            for u in &level {
                for i in 0..3 {
                    let v = u.mul_simple_right(i).unwrap();
                    if seen.insert(v.clone()) {
                        next.push(v.clone());
                        let a = act(&c, &v, &o).unwrap();
                        let w = to_min_rep(&c, &a, &o, &mu).unwrap();
                        let vmin = mu.coset_rep(&v, Side::Right, Extremum::Min).unwrap();
                        assert_eq!(w, vmin, "round trip fails at {}", v);
                    }
                }
            }
            level = next;
        }
    }

    #[test]
    fn delta_coeff_is_inert() {
        let c = ctx(2, 2);
        let a = ShiftedWeight::with_delta(vec![4, 1], Ratio::new(3, 2));
        let w = AffinePermutation::from_word(2, &[1, 0]).unwrap();
        let b = act(&c, &w, &a).unwrap();
        assert_eq!(b.delta_coeff(), Ratio::new(3, 2));
    }
}
