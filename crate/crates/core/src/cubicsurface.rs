//! Combinatorics of the 27 lines on a smooth cubic surface in the rank-7
//! Picard lattice E0, ..., E6 (E0^2 = 1, Ei^2 = -1, mixed products 0),
//! reproducing the Lagrangian-plane intersection tables.
//!
//! Everything lives in plain i64 coordinates; the numbers involved are tiny.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CubicSurfaceError {
    #[error("class {0:?} does not partition the 27 lines into bisecants, secants and residuals")]
    PartitionFailure([i64; 7]),
    #[error("scenario must be one of syz, nonsyz")]
    UnknownScenario,
}

/// Class in Pic of the cubic surface, coordinates (a0, ..., a6) in the basis
/// E0, ..., E6.
pub type PicardClass = [i64; 7];

/// K = -3E0 + E1 + ... + E6.
pub const CANONICAL: PicardClass = [-3, 1, 1, 1, 1, 1, 1];

pub fn dot(a: &PicardClass, b: &PicardClass) -> i64 {
    let mut acc = a[0] * b[0];
    for i in 1..7 {
        acc -= a[i] * b[i];
    }
    acc
}

/// The 27 line classes: exceptional E_i first, then E0 - Ei - Ej in
/// lexicographic order, then the six sextic classes 2E0 - sum_{j != i} Ej.
pub fn line_classes() -> Vec<PicardClass> {
    let mut lines = Vec::with_capacity(27);
    for i in 1..=6 {
        let mut c = [0i64; 7];
        c[i] = 1;
        lines.push(c);
    }
    for i in 1..=6 {
        for j in (i + 1)..=6 {
            let mut c = [0i64; 7];
            c[0] = 1;
            c[i] = -1;
            c[j] = -1;
            lines.push(c);
        }
    }
    for i in 1..=6 {
        let mut c = [2i64, -1, -1, -1, -1, -1, -1];
        c[i] = 0;
        lines.push(c);
    }
    lines
}

/// Scenario selector matching the two lattice cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairScenario {
    Syzygetic,
    NonSyzygetic,
}

/// The twisted-cubic classes (gamma_1, gamma_1v, gamma_2, gamma_2v) cut on
/// the surface by the two cones of scroll lines; gamma_v is always the
/// residual class -2K - gamma.
pub fn twisted_cubic_pair(
    scenario: PairScenario,
) -> (PicardClass, PicardClass, PicardClass, PicardClass) {
    let residual = |g: &PicardClass| {
        let mut r = [0i64; 7];
        for (i, out) in r.iter_mut().enumerate() {
            *out = -2 * CANONICAL[i] - g[i];
        }
        r
    };
    let gamma1: PicardClass = [1, 0, 0, 0, 0, 0, 0];
    let gamma2: PicardClass = match scenario {
        PairScenario::Syzygetic => [3, -2, -1, -1, -1, -1, 0],
        // in the same blow-down frame the second twisted cubic is again a
        // conic-free E0 when the scrolls meet once
        PairScenario::NonSyzygetic => [1, 0, 0, 0, 0, 0, 0],
    };
    (gamma1, residual(&gamma1), gamma2, residual(&gamma2))
}

/// Partition of the 27 lines by a twisted-cubic pair: P = bisecants of
/// gamma, P_v = bisecants of gamma_v, S = lines secant to both.
pub fn component_classes(
    gamma: &PicardClass,
    gamma_v: &PicardClass,
) -> Result<(Vec<PicardClass>, Vec<PicardClass>, Vec<PicardClass>), CubicSurfaceError> {
    let mut p = Vec::new();
    let mut pv = Vec::new();
    let mut s = Vec::new();
    for line in line_classes() {
        let dg = dot(&line, gamma);
        let dgv = dot(&line, gamma_v);
        if !(0..=2).contains(&dg) || !(0..=2).contains(&dgv) {
            return Err(CubicSurfaceError::PartitionFailure(*gamma));
        }
        if dg == 2 {
            p.push(line);
        } else if dgv == 2 {
            pv.push(line);
        } else {
            s.push(line);
        }
    }
    Ok((p, pv, s))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct IntersectionTable {
    /// Rows (P1, S1, P1v) x columns (P2, S2, P2v).
    pub table: [[usize; 3]; 3],
    pub component_sizes: [usize; 3],
}

/// Pairwise intersection counts between the components of the two
/// Lagrangian-surface triples.
pub fn intersection_table(scenario: PairScenario) -> Result<IntersectionTable, CubicSurfaceError> {
    let (g1, g1v, g2, g2v) = twisted_cubic_pair(scenario);
    let (p1, p1v, s1) = component_classes(&g1, &g1v)?;
    let (p2, p2v, s2) = component_classes(&g2, &g2v)?;
    let count = |a: &[PicardClass], b: &[PicardClass]| a.iter().filter(|x| b.contains(x)).count();
    let rows = [&p1, &s1, &p1v];
    let cols = [&p2, &s2, &p2v];
    let mut table = [[0usize; 3]; 3];
    for (i, r) in rows.iter().enumerate() {
        for (j, c) in cols.iter().enumerate() {
            table[i][j] = count(r, c);
        }
    }
    Ok(IntersectionTable {
        table,
        component_sizes: [p1.len(), s1.len(), p1v.len()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_seven_lines() {
        let lines = line_classes();
        assert_eq!(lines.len(), 27);
        let k = CANONICAL;
        for l in &lines {
            assert_eq!(dot(l, l), -1);
            assert_eq!(dot(l, &k), -1);
        }
        for (i, a) in lines.iter().enumerate() {
            for b in &lines[i + 1..] {
                let d = dot(a, b);
                assert!(d == 0 || d == 1, "incidence {d} out of range");
            }
        }
    }

    #[test]
    fn bisecant_partition_sizes() {
        // classical structure: 6 bisecants of gamma, 6 of gamma_v, 15 secants
        for scenario in [PairScenario::Syzygetic, PairScenario::NonSyzygetic] {
            let (g1, g1v, g2, g2v) = twisted_cubic_pair(scenario);
            for (g, gv) in [(g1, g1v), (g2, g2v)] {
                let (p, pv, s) = component_classes(&g, &gv).unwrap();
                assert_eq!(p.len(), 6);
                assert_eq!(pv.len(), 6);
                assert_eq!(s.len(), 15);
                let twos = line_classes().iter().filter(|l| dot(l, &g) == 2).count();
                let ones = line_classes().iter().filter(|l| dot(l, &g) == 1).count();
                let zeros = line_classes().iter().filter(|l| dot(l, &g) == 0).count();
                assert_eq!((twos, ones, zeros), (6, 15, 6));
            }
        }
    }

    #[test]
    fn residual_pairs_sum_to_minus_2k() {
        for scenario in [PairScenario::Syzygetic, PairScenario::NonSyzygetic] {
            let (g1, g1v, g2, g2v) = twisted_cubic_pair(scenario);
            for (g, gv) in [(g1, g1v), (g2, g2v)] {
                for i in 0..7 {
                    assert_eq!(g[i] + gv[i], -2 * CANONICAL[i]);
                }
                // twisted cubic numerics: square 1, degree 3
                assert_eq!(dot(&g, &g), 1);
                assert_eq!(-dot(&g, &CANONICAL), 3);
            }
        }
    }

    #[test]
    fn syzygetic_pair_numerics() {
        let (g1, g1v, g2, _) = twisted_cubic_pair(PairScenario::Syzygetic);
        assert_eq!(dot(&g1, &g2), 3);
        assert_eq!(dot(&g1v, &g2), 3);
        let (n1, _, n2, _) = twisted_cubic_pair(PairScenario::NonSyzygetic);
        assert_eq!(dot(&n1, &n2), 1);
    }

    #[test]
    fn intersection_tables() {
        let syz = intersection_table(PairScenario::Syzygetic).unwrap();
        assert_eq!(syz.table, [[1, 4, 1], [4, 7, 4], [1, 4, 1]]);
        let nonsyz = intersection_table(PairScenario::NonSyzygetic).unwrap();
        assert_eq!(nonsyz.table, [[6, 0, 0], [0, 15, 0], [0, 0, 6]]);
        // row and column sums match the component sizes
        for t in [&syz, &nonsyz] {
            for i in 0..3 {
                let row: usize = t.table[i].iter().sum();
                assert_eq!(row, t.component_sizes[i]);
            }
        }
    }

    #[test]
    fn swap_symmetry_and_partition_failure() {
        let (g, gv, _, _) = twisted_cubic_pair(PairScenario::Syzygetic);
        let (p, pv, s) = component_classes(&g, &gv).unwrap();
        let (p2, pv2, s2) = component_classes(&gv, &g).unwrap();
        assert_eq!(p, pv2);
        assert_eq!(pv, p2);
        assert_eq!(s, s2);
        // a non-twisted-cubic class fails the partition
        let bad: PicardClass = [2, 0, 0, 0, 0, 0, 0];
        assert!(component_classes(&bad, &bad).is_err());
    }
}
