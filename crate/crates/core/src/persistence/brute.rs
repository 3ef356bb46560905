use alloc::vec::Vec;

use super::{DistanceMatrix, PersistenceDiagram, PersistencePair};
use crate::error::{Error, Result};

/// Largest point count accepted by [`brute_force_diagram`].
pub const BRUTE_FORCE_MAX_POINTS: usize = 12;

struct Simplex {
    vertices: Vec<usize>,
    value: f64,
    colex: usize,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Persistence diagram from the standard algorithm on the full boundary
/// matrix of the Vietoris–Rips complex up to dimension `dim + 1`.
///
/// Simplices are ordered by `(value, dimension, colex index)`.
pub fn brute_force_diagram(d: &DistanceMatrix, dim: usize) -> Result<PersistenceDiagram> {
    let m = d.size();
    if dim > 1 {
        return Err(Error::domain("brute-force oracle supports degrees 0 and 1"));
    }
    if m > BRUTE_FORCE_MAX_POINTS {
        return Err(Error::domain("brute-force oracle is limited to 12 points"));
    }
    let mut simplices: Vec<Simplex> = Vec::new();
    for size in 1..=dim + 3 {
        if size > m {
            break;
        }
        for subset in 0u32..(1u32 << m) {
            if subset.count_ones() as usize != size {
                continue;
            }
            let vertices: Vec<usize> = (0..m).filter(|v| subset & (1 << v) != 0).collect();
            let mut value = 0.0f64;
            for (a, &u) in vertices.iter().enumerate() {
                for &w in &vertices[a + 1..] {
                    value = value.max(d.get(u, w));
                }
            }
            let colex = vertices.iter().enumerate().map(|(i, &v)| binomial(v, i + 1)).sum();
            simplices.push(Simplex { vertices, value, colex });
        }
    }
    simplices.sort_by(|a, b| {
        a.value.total_cmp(&b.value).then(a.vertices.len().cmp(&b.vertices.len())).then(a.colex.cmp(&b.colex))
    });

    let position = |vertices: &[usize]| -> usize {
        simplices.iter().position(|s| s.vertices == vertices).expect("every face is in the complex")
    };
    // Boundary columns as sorted lists of filtration positions.
    let mut columns: Vec<Vec<usize>> = simplices
        .iter()
        .map(|s| {
            if s.vertices.len() == 1 {
                return Vec::new();
            }
            let mut col: Vec<usize> = (0..s.vertices.len())
                .map(|skip| {
                    let face: Vec<usize> =
                        s.vertices.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| *v).collect();
                    position(&face)
                })
                .collect();
            col.sort_unstable();
            col
        })
        .collect();

    // Standard left-to-right reduction over GF(2).
    let mut low_owner: Vec<Option<usize>> = alloc::vec![None; simplices.len()];
    let mut pairs = Vec::new();
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].last() {
            match low_owner[low] {
                Some(k) => {
                    let other = columns[k].clone();
                    columns[j] = symmetric_difference(&columns[j], &other);
                }
                None => {
                    low_owner[low] = Some(j);
                    break;
                }
            }
        }
        if let Some(&low) = columns[j].last() {
            if simplices[low].vertices.len() == dim + 1 {
                pairs.push(PersistencePair { birth: simplices[low].value, death: simplices[j].value });
            }
        }
    }
    Ok(PersistenceDiagram::new(dim, pairs))
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
