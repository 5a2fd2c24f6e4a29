//! Brute-force reference implementations, independent of the library's BFS
//! and adjacency-list code paths.

#![allow(dead_code)]

use museum_swn::Graph;

pub fn adjacency_matrix(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut m = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        m[u][v] = true;
        m[v][u] = true;
    }
    m
}

/// Mean local clustering by enumerating every node triple.
pub fn clustering_by_triangles(g: &Graph) -> f64 {
    let a = adjacency_matrix(g);
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    for u in 0..n {
        let deg = (0..n).filter(|&v| a[u][v]).count();
        if deg < 2 {
            continue;
        }
        let mut triangles = 0;
        for v in 0..n {
            for w in v + 1..n {
                if a[u][v] && a[u][w] && a[v][w] {
                    triangles += 1;
                }
            }
        }
        total += triangles as f64 / (deg * (deg - 1) / 2) as f64;
    }
    total / n as f64
}

/// All-pairs hop distances by Floyd–Warshall; `None` when unreachable.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<Option<u64>>> {
    let a = adjacency_matrix(g);
    let n = a.len();
    let mut d: Vec<Vec<Option<u64>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Some(0) } else if a[i][j] { Some(1) } else { None })
                .collect()
        })
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| x + y < c) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

/// Mean distance over unordered pairs, `None` if any pair is unreachable.
pub fn path_length_by_floyd_warshall(g: &Graph) -> Option<f64> {
    let d = floyd_warshall(g);
    let n = d.len();
    let mut sum = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            sum += d[i][j]?;
        }
    }
    Some(sum as f64 / (n * (n - 1) / 2) as f64)
}

/// Deterministic pseudo-random small graph without the library's generators:
/// each pair is included when a 64-bit LCG draw falls below `density`.
pub fn lcg_graph(n: usize, density: f64, seed: u64) -> Graph {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            if ((state >> 11) as f64 / (1u64 << 53) as f64) < density {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Compares `actual` with a committed golden file under `tests/golden/`.
/// Setting `UPDATE_GOLDEN=1` rewrites the file instead.
pub fn check_golden(name: &str, actual: &str) {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing golden file {} ({e}); run with UPDATE_GOLDEN=1", path.display()));
    assert!(expected == actual, "output differs from golden file {}", path.display());
}
