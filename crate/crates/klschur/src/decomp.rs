//! Graded decomposition and Cartan matrices for blocks.
//!
//! The pipeline: block labels are starred, padded and shifted into
//! weights, reduced to minimal coset representatives `w` below a common
//! antidominant anchor, and the matrix entry at `(lambda, xi)` is the
//! graded multiplicity of the simple at `w_xi` in the parabolic Verma at
//! `w_lambda`, i.e. the alternating sum
//! `sum_{z in W_nu} (-q)^{l(z)} h^{z x, y}(q)`.
//!
//! Two routes compute that sum.  The literal route evaluates it term by
//! term through inverse Kazhdan-Lusztig polynomials; it needs full lower
//! intervals, so it only scales to short elements.  The production route
//! rewrites the sum at `nu`-maximal arguments (which all block labels
//! are) as an entry of the inverse of the spherical parabolic family:
//! expanding the standard basis element at the stripped representative in
//! the spherical canonical basis of the `W_nu`-quotient module.  The
//! tests pin the two routes against each other.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::coxeter::{AffinePermutation, Extremum, ParabolicSubset, Side};
use crate::error::Error;
use crate::hecke;
use crate::laurent::LaurentPoly;
use crate::multipartitions::{self, Block, Charge, Multipartition, WeylLabel};
use crate::weights::{self, LinkageContext, ShiftedWeight};
use crate::Result;

/// Largest parabolic group enumerated by the literal alternating-sum
/// route before giving up.
const LITERAL_GROUP_CAP: usize = 40_320;

/// Verma-into-simple multiplicity at the empty parabolic: `h^{x,y}(q)`.
pub fn verma_decomp(x: &AffinePermutation, y: &AffinePermutation) -> Result<LaurentPoly> {
    hecke::h_inverse(x, y)
}

fn is_left_maximal(x: &AffinePermutation, nu: &ParabolicSubset) -> bool {
    nu.generators().all(|k| x.is_left_descent(k))
}

fn strip_left(x: &AffinePermutation, nu: &ParabolicSubset) -> Result<AffinePermutation> {
    nu.coset_rep(x, Side::Left, Extremum::Min)
}

/// Parabolic-Verma-into-simple multiplicity
/// `sum_{z in W_nu} (-q)^{l(z)} h^{zx,y}(q)`.
///
/// When both arguments are `nu`-maximal in their left cosets (every
/// generator of `nu` is a left descent) the sum collapses to an entry of
/// the inverse spherical family on the stripped representatives: the
/// signed coefficient at `y~` of the expansion of the standard basis
/// element at `x~` in the spherical canonical basis of the
/// `W_nu`-quotient.  Otherwise the sum is evaluated literally.
pub fn parabolic_verma_decomp(
    x: &AffinePermutation,
    y: &AffinePermutation,
    nu: &ParabolicSubset,
) -> Result<LaurentPoly> {
    if !nu.is_finite() {
        return Err(Error::InfiniteParabolic(nu.to_string()));
    }
    if is_left_maximal(x, nu) && is_left_maximal(y, nu) {
        let xt = strip_left(x, nu)?;
        let yt = strip_left(y, nu)?;
        let beta = hecke::m_inverse_column(nu, &xt)?;
        let val = beta.get(&yt).cloned().unwrap_or_default();
        if (xt.length() + yt.length()) % 2 == 0 {
            Ok(val)
        } else {
            Ok(-&val)
        }
    } else {
        parabolic_verma_decomp_by_sum(x, y, nu)
    }
}

/// The defining alternating sum, evaluated term by term.  Only usable
/// when `W_nu` is small and the summands stay short.
pub fn parabolic_verma_decomp_by_sum(
    x: &AffinePermutation,
    y: &AffinePermutation,
    nu: &ParabolicSubset,
) -> Result<LaurentPoly> {
    let elements = nu.elements()?;
    if elements.len() > LITERAL_GROUP_CAP {
        return Err(Error::TooLarge(format!(
            "literal parabolic sum over {} elements",
            elements.len()
        )));
    }
    let mut out = LaurentPoly::zero();
    for z in elements {
        let zx = z.compose(x)?;
        let hv = hecke::h_inverse(&zx, y)?;
        if hv.is_zero() {
            continue;
        }
        let lz = z.length();
        let sign: BigInt = if lz % 2 == 0 { 1.into() } else { (-1).into() };
        out += &hv.scale_shift(&sign, lz as i64);
    }
    Ok(out)
}

/// Expansion of a simple class in parabolic Verma classes at the empty
/// parabolic anchor: coefficient of the Verma at `y` is
/// `(-1)^{l(x)+l(y)} h_{y^-1, x^-1}(q)`, over the given interval.
pub fn simple_into_vermas(
    x: &AffinePermutation,
    interval: &[AffinePermutation],
    nu: &ParabolicSubset,
) -> Result<BTreeMap<AffinePermutation, LaurentPoly>> {
    let row = hecke::kl_basis(&x.inverse());
    let mut out = BTreeMap::new();
    for y in interval {
        let hv = row.get(&y.inverse()).cloned().unwrap_or_default();
        if hv.is_zero() {
            continue;
        }
        let signed = if (x.length() + y.length()) % 2 == 0 {
            hv
        } else {
            -&hv
        };
        out.insert(y.clone(), signed);
    }
    // interval must contain every valid label carrying a nonzero coefficient
    for (t, c) in row.iter() {
        if c.is_zero() {
            continue;
        }
        let y = t.inverse();
        if is_left_maximal(&y, nu) && !interval.contains(&y) {
            return Err(Error::BlockInvariant(format!(
                "interval not downward-closed: missing {}",
                y
            )));
        }
    }
    Ok(out)
}

/// Positive-level truncated Verma multiplicity: `h_{x,y}(q)`.
pub fn truncated_verma_decomp(x: &AffinePermutation, y: &AffinePermutation) -> LaurentPoly {
    hecke::h(x, y)
}

/// Positive-level truncated parabolic Verma multiplicity:
/// `n^mu_{x,y}(q)` on minimal representatives.
pub fn truncated_parabolic_decomp(
    x: &AffinePermutation,
    y: &AffinePermutation,
    mu: &ParabolicSubset,
) -> Result<LaurentPoly> {
    hecke::n(x, y, mu)
}

/// The parabolic-`mu` coefficient `n^mu_{t^-1, x^-1}(q)` of the Step-5
/// simple-into-Verma expansion, through the coset-graded spherical form:
/// `n_{a,b} = sum_{z in W_mu} (-q)^{l(z)} h_{za,b}` with every
/// `h_{., x^-1}` read off the spherical canonical basis at the stripped
/// representative of `x`.
fn step5_n_coefficient(
    t: &AffinePermutation,
    x: &AffinePermutation,
    mu: &ParabolicSubset,
    nu: &ParabolicSubset,
) -> Result<LaurentPoly> {
    let xt = strip_left(x, nu)?;
    let tinv = t.inverse();
    let mut out = LaurentPoly::zero();
    for z in mu.elements()? {
        let c = z.compose(&tinv)?;
        // h_{c, x^-1} = h_{c^-1, x} with x nu-maximal on the left
        let hv = hecke::h_into_left_maximal(&c.inverse(), &xt, nu)?;
        if hv.is_zero() {
            continue;
        }
        let lz = z.length();
        let sign: BigInt = if lz % 2 == 0 { 1.into() } else { (-1).into() };
        out += &hv.scale_shift(&sign, lz as i64);
    }
    Ok(out)
}

/// Expansion of a simple class in parabolic Verma classes over a block
/// with stabilizer `mu`: coefficient of the Verma at `t` is
/// `(-1)^{l(x)+l(t)} n^mu_{t^-1, x^-1}(q)`.
pub fn simple_into_parabolic_vermas(
    x: &AffinePermutation,
    mu: &ParabolicSubset,
    nu: &ParabolicSubset,
    interval: &[AffinePermutation],
) -> Result<BTreeMap<AffinePermutation, LaurentPoly>> {
    if !is_left_maximal(x, nu) {
        return Err(Error::NotMinimalRep(x.to_string(), nu.to_string()));
    }
    if !mu.is_min_rep(x, Side::Right) {
        return Err(Error::NotMinimalRep(x.to_string(), mu.to_string()));
    }
    let mut out = BTreeMap::new();
    for t in interval {
        if !mu.is_min_rep(t, Side::Right) {
            return Err(Error::NotMinimalRep(t.to_string(), mu.to_string()));
        }
        let nv = step5_n_coefficient(t, x, mu, nu)?;
        if nv.is_zero() {
            continue;
        }
        let signed = if (x.length() + t.length()) % 2 == 0 {
            nv
        } else {
            -&nv
        };
        out.insert(t.clone(), signed);
    }
    Ok(out)
}

/// Reference route for the Step-5 coefficients through the antispherical
/// canonical basis of the `mu`-quotient at `x^-1` (small inputs only).
pub fn simple_into_parabolic_vermas_reference(
    x: &AffinePermutation,
    mu: &ParabolicSubset,
    interval: &[AffinePermutation],
) -> Result<BTreeMap<AffinePermutation, LaurentPoly>> {
    let row =
        hecke::quotient_canonical_basis(mu, &x.inverse(), hecke::ParabolicKind::Antispherical)?;
    let mut out = BTreeMap::new();
    for t in interval {
        let nv = row.get(&t.inverse()).cloned().unwrap_or_default();
        if nv.is_zero() {
            continue;
        }
        let signed = if (x.length() + t.length()) % 2 == 0 {
            nv
        } else {
            -&nv
        };
        out.insert(t.clone(), signed);
    }
    Ok(out)
}

/// Reindex every key by inversion and apply the Koszul sign twist
/// `q -> -q^-1` to every coefficient; an involution.
pub fn koszul_coefficient_transform(
    coeffs: &BTreeMap<AffinePermutation, LaurentPoly>,
) -> BTreeMap<AffinePermutation, LaurentPoly> {
    coeffs
        .iter()
        .map(|(w, c)| (w.inverse(), c.koszul_twist()))
        .collect()
}

fn isqrt(v: i64) -> i64 {
    if v <= 0 {
        return 0;
    }
    let mut r = (v as f64).sqrt() as i64;
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    while r * r > v {
        r -= 1;
    }
    r
}

/// All candidates for the index set of the Step-5 pairing at top element
/// `x`: minimal coset representatives `t` for `mu` whose weight is
/// `nu`-dominant and lies below the weight of `x` in the affine root
/// order.  This is a finite superset of the Bruhat interval below `x`,
/// downward closed for the pairing.
///
/// The affine root order tracks the delta coordinate: along this orbit it
/// equals `(sum of squares - sum of squares of the anchor) / 2e`, so a
/// weight `T` lies below `A` iff `c_0 = (Q(A) - Q(T)) / 2e >= 0` and
/// `prefix_k(T) <= prefix_k(A) + c_0` for every proper prefix (the
/// affine simple root projects to minus the highest root, loosening the
/// finite prefix bounds by `c_0`).  The sum-of-squares ball makes the
/// enumeration finite.
pub fn label_interval(
    ctx: &LinkageContext,
    o: &ShiftedWeight,
    mu: &ParabolicSubset,
    x: &AffinePermutation,
) -> Result<Vec<AffinePermutation>> {
    let n = ctx.rank();
    let e = ctx.e();
    let top = weights::act(ctx, x, o)?;
    let cap = x.length();
    let total: i64 = o.entries().iter().sum();
    let q_top: i64 = top.entries().iter().map(|&v| v * v).sum();
    let q_anchor: i64 = o.entries().iter().map(|&v| v * v).sum();
    debug_assert_eq!((q_top - q_anchor).rem_euclid(2 * e), 0);
    let c0_max = (q_top - q_anchor) / (2 * e);
    let prefix_top: Vec<i64> = {
        let mut acc = 0i64;
        top.entries()
            .iter()
            .map(|&a| {
                acc += a;
                acc
            })
            .collect()
    };
    let mut class_counts: BTreeMap<i64, i64> = BTreeMap::new();
    for &v in o.entries() {
        *class_counts.entry(v.rem_euclid(e)).or_insert(0) += 1;
    }

    struct Ctx<'a> {
        n: usize,
        e: i64,
        total: i64,
        q_top: i64,
        c0_max: i64,
        prefix_top: &'a [i64],
        nu: &'a ParabolicSubset,
    }

    fn dfs(
        c: &Ctx<'_>,
        pos: usize,
        prefix: i64,
        qpart: i64,
        counts: &mut BTreeMap<i64, i64>,
        cur: &mut Vec<i64>,
        found: &mut Vec<Vec<i64>>,
    ) {
        if pos == c.n {
            if prefix == c.total {
                found.push(cur.clone());
            }
            return;
        }
        let budget = c.q_top - qpart;
        if budget < 0 {
            return;
        }
        let ball = isqrt(budget);
        let mut vmax = (c.prefix_top[pos] - prefix + c.c0_max).min(ball);
        if pos >= 1 && c.nu.contains(pos) {
            vmax = vmax.min(cur[pos - 1] - 1);
        }
        let vmin = -ball;
        let remaining = (c.n - 1 - pos) as i64;
        for v in vmin..=vmax {
            let r = v.rem_euclid(c.e);
            let avail = counts.get(&r).copied().unwrap_or(0);
            if avail == 0 {
                continue;
            }
            let q2 = qpart + v * v;
            let rest_budget = c.q_top - q2;
            if rest_budget < 0 {
                continue;
            }
            // Cauchy-Schwarz: the remaining entries cannot move the sum
            // farther than sqrt(remaining * rest_budget)
            let need = c.total - prefix - v;
            if need * need > remaining * rest_budget {
                continue;
            }
            counts.insert(r, avail - 1);
            cur.push(v);
            dfs(c, pos + 1, prefix + v, q2, counts, cur, found);
            cur.pop();
            counts.insert(r, avail);
        }
    }

    let cctx = Ctx {
        n,
        e,
        total,
        q_top,
        c0_max,
        prefix_top: &prefix_top,
        nu: ctx.nu(),
    };
    let mut found: Vec<Vec<i64>> = Vec::new();
    let mut cur: Vec<i64> = Vec::with_capacity(n);
    dfs(
        &cctx,
        0,
        0,
        0,
        &mut class_counts,
        &mut cur,
        &mut found,
    );

    let mut out = Vec::new();
    for entries in found {
        let q_t: i64 = entries.iter().map(|&v| v * v).sum();
        debug_assert_eq!((q_top - q_t).rem_euclid(2 * e), 0);
        let c0 = (q_top - q_t) / (2 * e);
        if c0 < 0 {
            continue;
        }
        // exact affine-order test with the true delta drop
        let mut acc = 0i64;
        let mut below = true;
        for (k, &v) in entries.iter().enumerate() {
            acc += v;
            if k + 1 < n && acc > prefix_top[k] + c0 {
                below = false;
                break;
            }
        }
        if !below {
            continue;
        }
        let wgt = ShiftedWeight::new(entries);
        if !weights::is_nu_dominant(ctx, &wgt) {
            continue;
        }
        let t = weights::to_min_rep(ctx, &wgt, o, mu)?;
        if t.length() <= cap {
            out.push(t);
        }
    }
    out.sort_by_key(|w| (w.length(), w.window().to_vec()));
    out.dedup();
    Ok(out)
}

/// Union of `label_interval` over several top elements, deduplicated and
/// sorted.  Distinct maximal labels of a block can be incomparable, so
/// the pairing index set must cover every label's own lower set.
pub fn labels_interval(
    ctx: &LinkageContext,
    o: &ShiftedWeight,
    mu: &ParabolicSubset,
    tops: &[AffinePermutation],
) -> Result<Vec<AffinePermutation>> {
    let mut all: Vec<AffinePermutation> = Vec::new();
    for x in tops {
        all.extend(label_interval(ctx, o, mu, x)?);
    }
    all.sort_by_key(|w| (w.length(), w.window().to_vec()));
    all.dedup();
    Ok(all)
}

/// The assembled matrices of one block.
#[derive(Clone, Debug)]
pub struct BlockMatrices {
    pub e: i64,
    pub s: Vec<i64>,
    pub block: Block,
    pub m: Vec<u64>,
    pub labels: Vec<Multipartition>,
    /// Graded decomposition matrix `d(q)`: rows index Vermas, columns
    /// simples; lower-unitriangular in display order.
    pub d: Vec<Vec<LaurentPoly>>,
    /// Graded Cartan matrix `c(q) = d(q)^t d(q)`.
    pub c: Vec<Vec<LaurentPoly>>,
}

/// Everything the pipeline attaches to a block before matrix assembly.
pub struct BlockGeometry {
    pub ctx: LinkageContext,
    pub m: Vec<u64>,
    pub labels: Vec<WeylLabel>,
    pub o: ShiftedWeight,
    pub mu: ParabolicSubset,
}

/// Runs the label-to-Weyl correspondence for the whole block and checks
/// that all labels share one antidominant anchor and stabilizer.
pub fn block_geometry(chg: &Charge, d: &Block, m: Option<Vec<u64>>) -> Result<BlockGeometry> {
    let m = match m {
        Some(m) => {
            multipartitions::validate_m(chg, d.size(), &m)?;
            m
        }
        None => multipartitions::choose_m(chg, d.size()),
    };
    let ctx = multipartitions::context_for_m(&m, chg.e())?;
    let weyl = multipartitions::weyl_labels_sorted(chg, d, &m)?;
    if weyl.is_empty() {
        return Err(Error::BlockInvariant(format!("block {} has no labels", d)));
    }
    let o = weyl[0].o.clone();
    let mu = weyl[0].mu.clone();
    for wl in &weyl[1..] {
        if wl.o.entries() != o.entries() || wl.mu != mu {
            return Err(Error::BlockInvariant(format!(
                "labels {} and {} disagree on the orbit anchor",
                weyl[0].lam, wl.lam
            )));
        }
    }
    for wl in &weyl {
        if !weights::is_nu_dominant(&ctx, &wl.target) {
            return Err(Error::BlockInvariant(format!(
                "label {} is not nu-dominant",
                wl.lam
            )));
        }
    }
    Ok(BlockGeometry {
        ctx,
        m,
        labels: weyl,
        o,
        mu,
    })
}

/// Computes the decomposition matrix `d(q)` and Cartan matrix
/// `c(q) = d(q)^t d(q)` of a block.
pub fn block_matrices(chg: &Charge, d: &Block, m: Option<Vec<u64>>) -> Result<BlockMatrices> {
    let geo = block_geometry(chg, d, m)?;
    let nu = geo.ctx.nu().clone();
    let k = geo.labels.len();

    // strip all labels once; rows fan out in parallel, gathered in order
    let stripped: Vec<AffinePermutation> = geo
        .labels
        .iter()
        .map(|wl| {
            debug_assert!(is_left_maximal(&wl.w, &nu));
            strip_left(&wl.w, &nu)
        })
        .collect::<Result<_>>()?;

    let rows: Vec<Result<Vec<LaurentPoly>>> = stripped
        .par_iter()
        .map(|xt| {
            let entries = hecke::m_inverse_entries(&nu, xt, &stripped)?;
            let row = stripped
                .iter()
                .zip(entries)
                .map(|(yt, val)| {
                    if (xt.length() + yt.length()) % 2 == 0 {
                        val
                    } else {
                        -&val
                    }
                })
                .collect();
            Ok(row)
        })
        .collect();
    let mut dmat = Vec::with_capacity(k);
    for row in rows {
        dmat.push(row?);
    }

    // structural invariants of d(q)
    for i in 0..k {
        if !dmat[i][i].is_one() {
            return Err(Error::BlockInvariant(format!(
                "diagonal entry at {} is {}",
                geo.labels[i].lam, dmat[i][i]
            )));
        }
        for j in (i + 1)..k {
            if !dmat[i][j].is_zero() {
                return Err(Error::BlockInvariant(format!(
                    "entry above the diagonal at ({}, {}) is {}",
                    geo.labels[i].lam, geo.labels[j].lam, dmat[i][j]
                )));
            }
        }
    }

    // c = d^t d: c_{lambda xi} = sum_mu d_{mu lambda} d_{mu xi}
    let mut cmat = vec![vec![LaurentPoly::zero(); k]; k];
    for lam in 0..k {
        for xi in 0..k {
            let mut acc = LaurentPoly::zero();
            for mid in 0..k {
                if dmat[mid][lam].is_zero() || dmat[mid][xi].is_zero() {
                    continue;
                }
                acc += &(&dmat[mid][lam] * &dmat[mid][xi]);
            }
            cmat[lam][xi] = acc;
        }
    }

    Ok(BlockMatrices {
        e: chg.e(),
        s: chg.residues().to_vec(),
        block: d.clone(),
        m: geo.m,
        labels: geo.labels.iter().map(|wl| wl.lam.clone()).collect(),
        d: dmat,
        c: cmat,
    })
}
