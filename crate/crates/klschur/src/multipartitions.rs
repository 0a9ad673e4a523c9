//! Multipartition combinatorics: residues and blocks, the star involution,
//! the choice of the composition `m`, and the composite map from a
//! multipartition label to its minimal coset representative.
//!
//! A label is an l-tuple of partitions.  The box in row `i`, column `j`
//! of component `p` has residue `s_p + j - i (mod e)`; a block collects
//! all labels with a fixed residue content.  Labels are turned into
//! rho-shifted weights by padding each component to `m_p` rows and adding
//! `rho_m = (m_1, m_1-1, ..., 1, m_2, ..., 1, ...)`.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::coxeter::{AffinePermutation, ParabolicSubset};
use crate::error::Error;
use crate::weights::{self, LinkageContext, ShiftedWeight};
use crate::Result;

/// A partition: weakly decreasing positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition(Vec<u64>);

impl Partition {
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.iter().any(|&p| p == 0) {
            return Err(Error::Parse {
                what: format!("partition {:?}", parts),
                detail: "parts must be positive and weakly decreasing".into(),
            });
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u64] {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.len()
    }

    pub fn size(&self) -> u64 {
        self.0.iter().sum()
    }

    /// The conjugate (transposed) partition.
    pub fn conjugate(&self) -> Partition {
        if self.0.is_empty() {
            return Partition::empty();
        }
        let cols = self.0[0] as usize;
        let parts = (1..=cols)
            .map(|j| self.0.iter().filter(|&&r| r >= j as u64).count() as u64)
            .collect();
        Partition(parts)
    }
}

/// An l-tuple of partitions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multipartition {
    components: Vec<Partition>,
}

impl Multipartition {
    pub fn new(components: Vec<Partition>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Parse {
                what: "multipartition".into(),
                detail: "needs at least one component".into(),
            });
        }
        Ok(Multipartition { components })
    }

    pub fn empty(levels: usize) -> Self {
        Multipartition {
            components: vec![Partition::empty(); levels],
        }
    }

    pub fn components(&self) -> &[Partition] {
        &self.components
    }

    pub fn levels(&self) -> usize {
        self.components.len()
    }

    pub fn size(&self) -> u64 {
        self.components.iter().map(|c| c.size()).sum()
    }

    /// The star involution: reverse the component order and transpose
    /// each Young diagram.
    pub fn star(&self) -> Multipartition {
        Multipartition {
            components: self.components.iter().rev().map(|c| c.conjugate()).collect(),
        }
    }

    /// Nested-list form, e.g. `[[2],[1]]`.
    pub fn to_nested(&self) -> Vec<Vec<u64>> {
        self.components.iter().map(|c| c.0.clone()).collect()
    }
}

impl fmt::Display for Multipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (p, c) in self.components.iter().enumerate() {
            if p > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (i, r) in c.0.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", r)?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl FromStr for Multipartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |d: &str| Error::Parse {
            what: format!("multipartition '{}'", s),
            detail: d.to_string(),
        };
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| err("expected [[..],[..]]"))?;
        let mut components = Vec::new();
        let mut rest = inner.trim();
        while !rest.is_empty() {
            let open = rest.find('[').ok_or_else(|| err("expected ["))?;
            let close = rest[open..].find(']').ok_or_else(|| err("missing ]"))? + open;
            let body = &rest[open + 1..close];
            let parts: Vec<u64> = if body.trim().is_empty() {
                Vec::new()
            } else {
                body.split(',')
                    .map(|x| x.trim().parse::<u64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| err(&e.to_string()))?
            };
            components.push(Partition::new(parts)?);
            rest = rest[close + 1..].trim_start_matches(',').trim();
        }
        Multipartition::new(components)
    }
}

/// The charge: a modulus `e > 1` and a tuple of residues, reduced mod `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Charge {
    e: i64,
    s: Vec<i64>,
}

impl Charge {
    pub fn new(e: i64, s: Vec<i64>) -> Result<Self> {
        if e <= 1 {
            return Err(Error::Config(format!("e = {} must be > 1", e)));
        }
        if s.is_empty() {
            return Err(Error::Config("charge must be nonempty".into()));
        }
        let s = s.into_iter().map(|x| x.rem_euclid(e)).collect();
        Ok(Charge { e, s })
    }

    pub fn e(&self) -> i64 {
        self.e
    }

    pub fn residues(&self) -> &[i64] {
        &self.s
    }

    pub fn levels(&self) -> usize {
        self.s.len()
    }
}

/// A residue-content vector: multiplicity per residue class mod `e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    e: i64,
    counts: Vec<u64>,
}

impl Block {
    pub fn new(e: i64, counts: Vec<u64>) -> Result<Self> {
        if e <= 1 || counts.len() != e as usize {
            return Err(Error::Config(format!(
                "block needs exactly e = {} residue classes",
                e
            )));
        }
        Ok(Block { e, counts })
    }

    pub fn zero(e: i64) -> Result<Self> {
        Block::new(e, vec![0; e as usize])
    }

    pub fn e(&self) -> i64 {
        self.e
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total box count `|d|`.
    pub fn size(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Parses `"0:1,1:2"`; the empty string is the empty content.
    pub fn parse(s: &str, e: i64) -> Result<Self> {
        let mut block = Block::zero(e)?;
        let t = s.trim();
        if t.is_empty() {
            return Ok(block);
        }
        for pair in t.split(',') {
            let (r, c) = pair.split_once(':').ok_or_else(|| Error::Parse {
                what: format!("block '{}'", s),
                detail: "expected residue:multiplicity pairs".into(),
            })?;
            let r: i64 = r.trim().parse().map_err(|_| Error::Parse {
                what: format!("block '{}'", s),
                detail: "bad residue".into(),
            })?;
            let c: u64 = c.trim().parse().map_err(|_| Error::Parse {
                what: format!("block '{}'", s),
                detail: "bad multiplicity".into(),
            })?;
            block.counts[r.rem_euclid(e) as usize] += c;
        }
        Ok(block)
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (r, &c) in self.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{}:{}", r, c)?;
            first = false;
        }
        Ok(())
    }
}

/// The residue content of a multipartition under the given charge.
pub fn residue_content(lam: &Multipartition, chg: &Charge) -> Result<Block> {
    if lam.levels() != chg.levels() {
        return Err(Error::RankMismatch(lam.levels(), chg.levels()));
    }
    let mut block = Block::zero(chg.e)?;
    for (p, comp) in lam.components.iter().enumerate() {
        for (i, &row) in comp.0.iter().enumerate() {
            for j in 1..=row as i64 {
                let r = (chg.s[p] + j - (i as i64 + 1)).rem_euclid(chg.e);
                block.counts[r as usize] += 1;
            }
        }
    }
    Ok(block)
}

fn partitions_of(n: u64) -> Vec<Partition> {
    fn rec(n: u64, max: u64, prefix: &mut Vec<u64>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(Partition(prefix.clone()));
            return;
        }
        let top = n.min(max);
        for first in (1..=top).rev() {
            prefix.push(first);
            rec(n - first, first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n.max(1), &mut Vec::new(), &mut out);
    out
}

/// All l-partitions of `n` for `l` components.
pub fn all_multipartitions(levels: usize, n: u64) -> Vec<Multipartition> {
    fn rec(levels: usize, n: u64, acc: &mut Vec<Partition>, out: &mut Vec<Multipartition>) {
        if levels == 1 {
            for p in partitions_of(n) {
                acc.push(p);
                out.push(Multipartition {
                    components: acc.clone(),
                });
                acc.pop();
            }
            return;
        }
        for k in 0..=n {
            for p in partitions_of(k) {
                acc.push(p);
                rec(levels - 1, n - k, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(levels, n, &mut Vec::new(), &mut out);
    out
}

/// The unsorted labels of the block `d`.
fn raw_block_labels(chg: &Charge, d: &Block) -> Result<Vec<Multipartition>> {
    if d.e != chg.e {
        return Err(Error::Config("block modulus differs from charge".into()));
    }
    Ok(all_multipartitions(chg.levels(), d.size())
        .into_iter()
        .filter(|lam| residue_content(lam, chg).map(|b| b == *d).unwrap_or(false))
        .collect())
}

/// The labels of the block with their weight data, in display order:
/// ascending length of the coset representative, ties broken by the
/// shifted tuple.  Length order refines the Bruhat order, so the
/// decomposition matrix is lower-unitriangular in this order.  (Plain
/// lexicographic order on the tuples does not refine the affine linkage
/// order; the direction of the affine simple root can reverse pairs.)
pub fn weyl_labels_sorted(chg: &Charge, d: &Block, m: &[u64]) -> Result<Vec<WeylLabel>> {
    let ctx = context_for_m(m, chg.e())?;
    let mut out: Vec<WeylLabel> = Vec::new();
    for lam in raw_block_labels(chg, d)? {
        out.push(to_weyl(&lam, &ctx, m)?);
    }
    out.sort_by_key(|wl| (wl.w.length(), wl.target.entries().to_vec()));
    Ok(out)
}

/// All labels of the block `d`, in display order (computed with the
/// componentwise-minimal `m`).
pub fn enumerate_block(chg: &Charge, d: &Block) -> Result<Vec<Multipartition>> {
    let labels = raw_block_labels(chg, d)?;
    if labels.is_empty() {
        return Ok(labels);
    }
    let m = choose_m(chg, d.size());
    Ok(weyl_labels_sorted(chg, d, &m)?
        .into_iter()
        .map(|wl| wl.lam)
        .collect())
}

/// Groups all l-partitions of `n` into blocks, in ascending order of the
/// content vector.
pub fn blocks_for_size(chg: &Charge, n: u64) -> Result<Vec<(Block, Vec<Multipartition>)>> {
    let mut grouped: std::collections::BTreeMap<Block, Vec<Multipartition>> = Default::default();
    for lam in all_multipartitions(chg.levels(), n) {
        let d = residue_content(&lam, chg)?;
        grouped.entry(d).or_default().push(lam);
    }
    let mut out = Vec::new();
    for (d, _) in grouped {
        let labels = enumerate_block(chg, &d)?;
        out.push((d, labels));
    }
    Ok(out)
}

/// The componentwise-minimal `m` with `m_p = -s_{l+1-p} (mod e)` and
/// `m_p >= n` (positive when `n = 0`).
pub fn choose_m(chg: &Charge, n: u64) -> Vec<u64> {
    let e = chg.e as u64;
    let l = chg.levels();
    (0..l)
        .map(|p| {
            let want = (-chg.s[l - 1 - p]).rem_euclid(chg.e) as u64;
            let base = if want == 0 { e } else { want };
            let mut m = base;
            while m < n {
                m += e;
            }
            m
        })
        .collect()
}

/// Checks an explicit `m` override against the congruence and size bound.
pub fn validate_m(chg: &Charge, n: u64, m: &[u64]) -> Result<()> {
    let l = chg.levels();
    if m.len() != l {
        return Err(Error::Config(format!(
            "m has {} components, charge has {}",
            m.len(),
            l
        )));
    }
    for (p, &mp) in m.iter().enumerate() {
        if mp == 0 {
            return Err(Error::Config("m components must be positive".into()));
        }
        let want = (-chg.s[l - 1 - p]).rem_euclid(chg.e);
        if (mp as i64).rem_euclid(chg.e) != want {
            return Err(Error::Config(format!(
                "m_{} = {} fails the congruence -s_{} = {} (mod {})",
                p + 1,
                mp,
                l - p,
                want,
                chg.e
            )));
        }
        if mp < n {
            return Err(Error::Config(format!(
                "m_{} = {} is smaller than the box count {}",
                p + 1,
                mp,
                n
            )));
        }
    }
    Ok(())
}

/// `rho_m = (m_1, m_1-1, ..., 1, m_2, m_2-1, ..., 1, ...)`.
pub fn rho_m(m: &[u64]) -> Vec<i64> {
    let mut v = Vec::new();
    for &mp in m {
        for k in (1..=mp as i64).rev() {
            v.push(k);
        }
    }
    v
}

/// The parabolic `nu` of the composition `m`: all indices `1..N-1` except
/// the partial sums of `m` (and never 0).
pub fn nu_from_m(m: &[u64]) -> Result<ParabolicSubset> {
    let n: u64 = m.iter().sum();
    let mut cuts = std::collections::BTreeSet::new();
    let mut acc = 0u64;
    for &mp in m {
        acc += mp;
        cuts.insert(acc);
    }
    let gens: Vec<usize> = (1..n as usize)
        .filter(|&i| !cuts.contains(&(i as u64)))
        .collect();
    ParabolicSubset::new(n as usize, gens)
}

/// The rho-shifted weight of a label: pad `lam` to an N-tuple (rows then
/// zeros, component by component) and add `rho_m`; the delta coefficient
/// carries `(omega, 2 rho + omega) / 2e` for the unshifted
/// `omega = lam - rho + rho_m`.
pub fn omega_weight(lam: &Multipartition, m: &[u64], e: i64) -> Result<ShiftedWeight> {
    if lam.levels() != m.len() {
        return Err(Error::RankMismatch(lam.levels(), m.len()));
    }
    let mut padded: Vec<i64> = Vec::new();
    for (p, comp) in lam.components.iter().enumerate() {
        if comp.rows() as u64 > m[p] {
            return Err(Error::RowOverflow {
                label: lam.to_string(),
                component: p + 1,
                rows: comp.rows(),
                bound: m[p] as usize,
            });
        }
        for &r in comp.parts() {
            padded.push(r as i64);
        }
        for _ in comp.rows() as u64..m[p] {
            padded.push(0);
        }
    }
    let rm = rho_m(m);
    let shifted: Vec<i64> = padded.iter().zip(rm.iter()).map(|(a, b)| a + b).collect();
    // z = (omega, 2 rho + omega) / 2e with omega = shifted - rho,
    // rho = (0, -1, ..., -(N-1))
    let mut num: i64 = 0;
    for (i, &sh) in shifted.iter().enumerate() {
        let rho_i = -(i as i64);
        let omega_i = sh - rho_i;
        num += omega_i * (2 * rho_i + omega_i);
    }
    let z = Ratio::new(num, 2 * e);
    Ok(ShiftedWeight::with_delta(shifted, z))
}

/// The data attached to one block label by the weight correspondence.
#[derive(Clone, Debug)]
pub struct WeylLabel {
    pub lam: Multipartition,
    /// rho-shifted target weight of the starred label.
    pub target: ShiftedWeight,
    /// minimal coset representative with `w . o = target`.
    pub w: AffinePermutation,
    /// antidominant anchor of the orbit.
    pub o: ShiftedWeight,
    /// stabilizer parabolic of `o`.
    pub mu: ParabolicSubset,
}

/// The composite label-to-Weyl-element map: star, pad-and-shift, then
/// antidominant reduction.
pub fn to_weyl(lam: &Multipartition, ctx: &LinkageContext, m: &[u64]) -> Result<WeylLabel> {
    let starred = lam.star();
    let target = omega_weight(&starred, m, ctx.e())?;
    let (o, g) = weights::antidominant_rep(ctx, &target)?;
    let mu = weights::stabilizer(ctx, &o)?;
    let w = weights::to_min_rep(ctx, &target, &o, &mu)?;
    debug_assert_eq!(w, g);
    Ok(WeylLabel {
        lam: lam.clone(),
        target,
        w,
        o,
        mu,
    })
}

/// Builds the linkage context for a composition `m` at modulus `e`.
pub fn context_for_m(m: &[u64], e: i64) -> Result<LinkageContext> {
    let n: u64 = m.iter().sum();
    LinkageContext::new(n as usize, e, nu_from_m(m)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(s: &str) -> Multipartition {
        s.parse().unwrap()
    }

    #[test]
    fn residue_content_examples() {
        let chg = Charge::new(2, vec![0, 1]).unwrap();
        let b = residue_content(&mp("[[2],[1]]"), &chg).unwrap();
        assert_eq!(b.counts(), &[1, 2]);
        let empty = residue_content(&Multipartition::empty(2), &chg).unwrap();
        assert_eq!(empty.size(), 0);
        let chg3 = Charge::new(3, vec![0]).unwrap();
        let b3 = residue_content(&mp("[[1,1]]"), &chg3).unwrap();
        assert_eq!(b3.counts(), &[1, 0, 1]);
    }

    #[test]
    fn enumerate_block_examples() {
        let chg = Charge::new(2, vec![0]).unwrap();
        let d = Block::parse("0:1,1:1", 2).unwrap();
        let labels = enumerate_block(&chg, &d).unwrap();
        assert_eq!(labels, vec![mp("[[2]]"), mp("[[1,1]]")]);

        let d0 = Block::zero(2).unwrap();
        let labels0 = enumerate_block(&chg, &d0).unwrap();
        assert_eq!(labels0, vec![Multipartition::empty(1)]);

        let chg2 = Charge::new(2, vec![0, 1]).unwrap();
        let d1 = Block::parse("1:1", 2).unwrap();
        let labels1 = enumerate_block(&chg2, &d1).unwrap();
        assert_eq!(labels1, vec![mp("[[],[1]]")]);
    }

    #[test]
    fn star_examples() {
        assert_eq!(mp("[[2],[1]]").star(), mp("[[1],[1,1]]"));
        assert_eq!(Multipartition::empty(2).star(), Multipartition::empty(2));
        assert_eq!(mp("[[2,1]]").star(), mp("[[2,1]]"));
        // involution and size preservation on a sweep
        for lam in all_multipartitions(2, 4) {
            assert_eq!(lam.star().star(), lam);
            assert_eq!(lam.star().size(), lam.size());
        }
    }

    #[test]
    fn choose_m_examples() {
        let chg = Charge::new(2, vec![0, 0]).unwrap();
        assert_eq!(choose_m(&chg, 2), vec![2, 2]);
        let chg3 = Charge::new(3, vec![1]).unwrap();
        assert_eq!(choose_m(&chg3, 2), vec![2]);
        // n = 0: smallest positive representative
        let chg0 = Charge::new(3, vec![0]).unwrap();
        assert_eq!(choose_m(&chg0, 0), vec![3]);
        // all results satisfy the validation
        for (e, s, n) in [(2i64, vec![0i64, 1], 3u64), (3, vec![2, 2], 4)] {
            let chg = Charge::new(e, s).unwrap();
            let m = choose_m(&chg, n);
            validate_m(&chg, n, &m).unwrap();
        }
        // a bad override fails
        let chg = Charge::new(2, vec![0]).unwrap();
        assert!(validate_m(&chg, 2, &[3]).is_err());
    }

    #[test]
    fn omega_weight_examples() {
        // lam = ((1), {}), m = (2,2): shifted = (3,1,2,1)
        let w = omega_weight(&mp("[[1],[]]"), &[2, 2], 2).unwrap();
        assert_eq!(w.entries(), &[3, 1, 2, 1]);
        // empty label: shifted = rho_m
        let w0 = omega_weight(&Multipartition::empty(2), &[2, 2], 2).unwrap();
        assert_eq!(w0.entries(), &[2, 1, 2, 1]);
        // lam = ((2)), m = (2): shifted = (4,1)
        let w1 = omega_weight(&mp("[[2]]"), &[2], 2).unwrap();
        assert_eq!(w1.entries(), &[4, 1]);
        // row overflow
        assert!(matches!(
            omega_weight(&mp("[[1,1,1]]"), &[2], 2),
            Err(Error::RowOverflow { .. })
        ));
    }

    #[test]
    fn to_weyl_examples() {
        // e = 2, l = 1, s = (0): the block of the partitions of 2
        let chg = Charge::new(2, vec![0]).unwrap();
        let m = choose_m(&chg, 2);
        assert_eq!(m, vec![2]);
        let ctx = context_for_m(&m, 2).unwrap();
        assert_eq!(ctx.nu(), &ParabolicSubset::new(2, [1]).unwrap());

        let l2 = to_weyl(&mp("[[2]]"), &ctx, &m).unwrap();
        assert_eq!(l2.target.entries(), &[3, 2]);
        assert_eq!(l2.o.entries(), &[2, 3]);
        assert_eq!(l2.w, AffinePermutation::simple(2, 1).unwrap());
        assert!(l2.mu.is_empty());

        let l11 = to_weyl(&mp("[[1,1]]"), &ctx, &m).unwrap();
        assert_eq!(l11.target.entries(), &[4, 1]);
        assert_eq!(l11.o.entries(), &[2, 3]);
        assert_eq!(l11.w.length(), 2);
    }

    #[test]
    fn block_labels_share_anchor_and_are_nu_dominant() {
        for (e, s) in [(2i64, vec![0i64, 0]), (2, vec![0, 1]), (3, vec![1, 2])] {
            let chg = Charge::new(e, s).unwrap();
            for n in 0..=3u64 {
                let m = choose_m(&chg, n);
                let ctx = context_for_m(&m, e).unwrap();
                for (_, labels) in blocks_for_size(&chg, n).unwrap() {
                    let mut anchor: Option<(Vec<i64>, ParabolicSubset)> = None;
                    for lam in &labels {
                        let wl = to_weyl(lam, &ctx, &m).unwrap();
                        assert!(
                            weights::is_nu_dominant(&ctx, &wl.target),
                            "target of {} not nu-dominant",
                            lam
                        );
                        match &anchor {
                            None => anchor = Some((wl.o.entries().to_vec(), wl.mu.clone())),
                            Some((oe, mu)) => {
                                assert_eq!(oe, &wl.o.entries().to_vec(), "anchor differs in block");
                                assert_eq!(mu, &wl.mu, "stabilizer differs in block");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn block_partition_counts() {
        // blocks partition the label set
        let chg = Charge::new(2, vec![0, 1]).unwrap();
        for n in 0..=4u64 {
            let total = all_multipartitions(2, n).len();
            let sum: usize = blocks_for_size(&chg, n)
                .unwrap()
                .iter()
                .map(|(_, ls)| ls.len())
                .sum();
            assert_eq!(total, sum);
        }
    }

    #[test]
    fn parse_display_round_trip() {
        for s in ["[[2],[1]]", "[[],[]]", "[[3,1,1]]", "[[],[2,2]]"] {
            let lam = mp(s);
            assert_eq!(lam.to_string(), s);
        }
        let b = Block::parse("0:1,1:2", 2).unwrap();
        assert_eq!(b.to_string(), "0:1,1:2");
        assert_eq!(Block::zero(3).unwrap().to_string(), "");
    }
}
