use crate::gadget::{adjacency_matrix, check_graph, AdjacencyOracle};
use crate::linalg::{DenseHermitian, SparseSymmetricMatrix};
use crate::{Error, Result};

/// `L = d·I − Ã` as a dense matrix. A self-loop contributes 1 to `Ã_vv`, so
/// rows still sum to zero.
pub fn laplacian_of(g: &dyn AdjacencyOracle) -> Result<DenseHermitian> {
    check_graph(g)?;
    Ok(adjacency_matrix(g)?.shifted_negation(g.degree() as f64))
}

/// `L` as a row oracle, for graphs above the dense cap. Not validated.
pub fn laplacian_oracle<G: AdjacencyOracle + Clone + 'static>(g: G) -> SparseSymmetricMatrix {
    let n = g.vertex_count();
    let d = g.degree();
    SparseSymmetricMatrix::from_oracle(n, d + 1, 2.0 * d as f64, move |v| {
        let mut diagonal = d as f64;
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(d + 1);
        for u in g.neighbors(v) {
            if u == v {
                diagonal -= 1.0;
            } else {
                row.push((u, -1.0));
            }
        }
        if diagonal != 0.0 {
            row.push((v, diagonal));
        }
        row.sort_by_key(|&(u, _)| u);
        row
    })
}

/// `Â = Ã/4` for a 4-regular graph: a symmetric doubly stochastic matrix
/// whose powers give `m`-step transition probabilities.
pub fn discrete_walk_matrix(g: &dyn AdjacencyOracle) -> Result<DenseHermitian> {
    check_graph(g)?;
    if g.degree() != 4 {
        return Err(Error::NotRegular {
            vertex: 0,
            expected: 4,
            found: g.degree(),
        });
    }
    Ok(adjacency_matrix(g)?.scaled(0.25))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::Graph;
    use crate::linalg::matrix_power;

    #[test]
    fn small_laplacians() {
        let k2 = laplacian_of(&Graph::complete(2).unwrap()).unwrap();
        assert_eq!(k2.re(0, 0), 1.0);
        assert_eq!(k2.re(0, 1), -1.0);
        let k5 = laplacian_of(&Graph::complete(5).unwrap()).unwrap();
        assert_eq!(k5.re(3, 3), 4.0);
        assert_eq!(k5.re(3, 1), -1.0);
        assert!(k5.row_sums().iter().all(|s| s.abs() < 1e-15));
    }

    #[test]
    fn self_loops_keep_rows_balanced() {
        let g = Graph::new(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let l = laplacian_of(&g).unwrap();
        assert_eq!(l.re(0, 0), 1.0);
        assert!(l.row_sums().iter().all(|s| s.abs() < 1e-15));
        let sparse = laplacian_oracle(g).materialize().unwrap();
        assert_eq!(sparse.max_abs_diff(&l), 0.0);
    }

    #[test]
    fn k5_walk_is_doubly_stochastic() {
        let a = discrete_walk_matrix(&Graph::complete(5).unwrap()).unwrap();
        for s in a.row_sums().iter().chain(a.column_sums().iter()) {
            assert!((s - 1.0).abs() < 1e-12);
        }
        // Connected and non-bipartite: differences vanish.
        let p = matrix_power(&a, 60).unwrap();
        assert!((p.re(0, 0) - p.re(0, 1)).abs() < 1e-12);
        assert!(discrete_walk_matrix(&Graph::cycle(6).unwrap()).is_err());
    }
}
