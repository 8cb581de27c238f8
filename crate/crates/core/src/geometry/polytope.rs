use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::GeometryError;
use crate::linalg::Matrix;

const TIGHT: f64 = 1e-9;

/// `⟨normal, μ⟩ + offset >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: f64,
}

impl Facet {
    pub fn new(normal: Vec<i64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    pub fn eval(&self, mu: &[f64]) -> f64 {
        self.normal.iter().zip(mu).map(|(a, m)| *a as f64 * m).sum::<f64>() + self.offset
    }

    fn normal_f64(&self) -> Vec<f64> {
        self.normal.iter().map(|&a| a as f64).collect()
    }
}

/// A Delzant polytope, validated at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    n: usize,
    facets: Vec<Facet>,
    vertices: Vec<Vec<f64>>,
    /// Facets tight at each vertex.
    vertex_facets: Vec<Vec<usize>>,
    simplices: Vec<Vec<usize>>,
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if m < k {
        return Vec::new();
    }
    let mut out = subsets(m - 1, k);
    for mut s in subsets(m - 1, k - 1) {
        s.push(m - 1);
        out.push(s);
    }
    out
}

fn int_det(rows: &[&[i64]]) -> i64 {
    let n = rows.len();
    if n == 1 {
        return rows[0][0];
    }
    (0..n)
        .map(|c| {
            let minor: Vec<Vec<i64>> = rows[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, v)| *v).collect())
                .collect();
            let refs: Vec<&[i64]> = minor.iter().map(|r| r.as_slice()).collect();
            let s = if c % 2 == 0 { 1 } else { -1 };
            s * rows[0][c] * int_det(&refs)
        })
        .sum()
}

/// Affine rank of a point set.
fn affine_rank(points: &[&Vec<f64>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let n = points[0].len();
    let mut rows: Vec<Vec<f64>> =
        points[1..].iter().map(|p| p.iter().zip(points[0]).map(|(a, b)| a - b).collect()).collect();
    let mut rank = 0;
    for c in 0..n {
        let Some(p) = (rank..rows.len()).max_by(|&a, &b| rows[a][c].abs().total_cmp(&rows[b][c].abs())) else {
            break;
        };
        if rows[p][c].abs() < 1e-9 {
            continue;
        }
        rows.swap(rank, p);
        for r in rank + 1..rows.len() {
            let f = rows[r][c] / rows[rank][c];
            for j in c..n {
                let v = rows[rank][j];
                rows[r][j] -= f * v;
            }
        }
        rank += 1;
    }
    rank
}

impl Polytope {
    pub fn new(facets: Vec<Facet>) -> Result<Self, GeometryError> {
        let invalid = |msg: &str| Err(GeometryError::InvalidPolytope(msg.into()));
        let Some(first) = facets.first() else { return invalid("no facets") };
        let n = first.normal.len();
        if n == 0 || facets.iter().any(|f| f.normal.len() != n) {
            return invalid("facet normals must share a positive dimension");
        }
        if facets.iter().any(|f| !f.offset.is_finite() || f.normal.iter().all(|&a| a == 0)) {
            return invalid("facet with zero normal or non-finite offset");
        }
        let m = facets.len();

        // Boundedness: the recession cone {d : ⟨a_i, d⟩ >= 0} must be {0}.
        let normals: Vec<Vec<f64>> = facets.iter().map(Facet::normal_f64).collect();
        let all: Vec<&Vec<f64>> = normals.iter().collect();
        let mut with_origin = all.clone();
        let zero = vec![0.0; n];
        with_origin.push(&zero);
        if affine_rank(&with_origin) < n {
            return invalid("unbounded: facet normals do not span");
        }
        for subset in subsets(m, n - 1) {
            if let Some(d) = null_direction(&subset.iter().map(|&i| normals[i].as_slice()).collect::<Vec<_>>(), n) {
                for sign in [1.0, -1.0] {
                    if normals.iter().all(|a| sign * dot(a, &d) >= -1e-12) {
                        return invalid("unbounded: nonzero recession direction");
                    }
                }
            }
        }

        // Vertices: feasible intersections of n facet hyperplanes.
        let mut vertices: Vec<Vec<f64>> = Vec::new();
        for subset in subsets(m, n) {
            let a = Matrix::from_fn(n, |i, j| normals[subset[i]][j]);
            let b: Vec<f64> = subset.iter().map(|&i| -facets[i].offset).collect();
            let Some(v) = a.solve(&b) else { continue };
            if a.det().abs() < 1e-12 || facets.iter().any(|f| f.eval(&v) < -TIGHT) {
                continue;
            }
            if !vertices.iter().any(|w| w.iter().zip(&v).all(|(x, y)| (x - y).abs() < 1e-9)) {
                vertices.push(v);
            }
        }
        if vertices.len() < n + 1 || affine_rank(&vertices.iter().collect::<Vec<_>>()) < n {
            return invalid("empty interior");
        }
        let vertex_facets: Vec<Vec<usize>> = vertices
            .iter()
            .map(|v| (0..m).filter(|&i| facets[i].eval(v).abs() < TIGHT).collect())
            .collect();
        for (i, f) in facets.iter().enumerate() {
            let on: Vec<&Vec<f64>> = vertices.iter().zip(&vertex_facets).filter(|(_, t)| t.contains(&i)).map(|(v, _)| v).collect();
            if on.len() < n || affine_rank(&on) < n - 1 {
                let _ = f;
                return invalid("redundant facet inequality");
            }
        }
        for (v, tight) in vertices.iter().zip(&vertex_facets) {
            if tight.len() != n {
                return Err(GeometryError::NotDelzant { vertex: v.clone(), reason: "vertex is not simple" });
            }
            let rows: Vec<&[i64]> = tight.iter().map(|&i| facets[i].normal.as_slice()).collect();
            if int_det(&rows).abs() != 1 {
                return Err(GeometryError::NotDelzant { vertex: v.clone(), reason: "normals are not a lattice basis" });
            }
        }

        let mut p = Self { n, facets, vertices, vertex_facets, simplices: Vec::new() };
        let all_vertices: Vec<usize> = (0..p.vertices.len()).collect();
        p.simplices = p.triangulate(&BTreeSet::new(), &all_vertices, n);
        Ok(p)
    }

    /// `{μ_i >= 0, (n+1) - Σ μ_i >= 0}`, the moment polytope of ℂPⁿ in
    /// the class 2πc₁.
    pub fn projective_space(n: usize) -> Self {
        let mut facets: Vec<Facet> = (0..n)
            .map(|i| {
                let mut a = vec![0; n];
                a[i] = 1;
                Facet::new(a, 0.0)
            })
            .collect();
        facets.push(Facet::new(vec![-1; n], (n + 1) as f64));
        Self::new(facets).expect("simplex is Delzant")
    }

    /// The anticanonical polytope of the blow-up of ℂP² at one point.
    pub fn blowup_p2() -> Self {
        Self::new(alloc::vec![
            Facet::new(vec![1, 0], 1.0),
            Facet::new(vec![0, 1], 1.0),
            Facet::new(vec![-1, -1], 1.0),
            Facet::new(vec![1, 1], 1.0),
        ])
        .expect("blow-up polytope is Delzant")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Simplices (as vertex index lists) of a triangulation of the polytope.
    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn contains_interior(&self, mu: &[f64]) -> bool {
        self.facets.iter().all(|f| f.eval(mu) > 0.0)
    }

    /// Euclidean volume.
    pub fn volume(&self) -> f64 {
        self.simplices.iter().map(|s| self.simplex_volume(s)).sum()
    }

    pub fn barycenter(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.n];
        let mut vol = 0.0;
        for s in &self.simplices {
            let v = self.simplex_volume(s);
            vol += v;
            for i in 0..self.n {
                let c: f64 = s.iter().map(|&k| self.vertices[k][i]).sum::<f64>() / (self.n + 1) as f64;
                b[i] += v * c;
            }
        }
        b.iter().map(|x| x / vol).collect()
    }

    /// The point `c` with `⟨a_i, c⟩ = 1 - b_i` for every facet, so that the
    /// polytope is a translate of a reflexive one. `None` if no such point
    /// exists, meaning the polytope does not describe the class 2πc₁.
    pub fn anticanonical_center(&self) -> Option<Vec<f64>> {
        let n = self.n;
        let rows: Vec<usize> = self.vertex_facets[0].clone();
        let a = Matrix::from_fn(n, |i, j| self.facets[rows[i]].normal[j] as f64);
        let b: Vec<f64> = rows.iter().map(|&i| 1.0 - self.facets[i].offset).collect();
        let c = a.solve(&b)?;
        self.facets
            .iter()
            .all(|f| (f.normal.iter().zip(&c).map(|(x, y)| *x as f64 * y).sum::<f64>() - (1.0 - f.offset)).abs() < 1e-9)
            .then_some(c)
    }

    fn simplex_volume(&self, s: &[usize]) -> f64 {
        let n = self.n;
        let v0 = &self.vertices[s[0]];
        let m = Matrix::from_fn(n, |i, j| self.vertices[s[j + 1]][i] - v0[i]);
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        m.det().abs() / fact
    }

    /// Fan triangulation of the face cut out by `tight` (vertex set `verts`,
    /// dimension `dim`), coning from its first vertex.
    fn triangulate(&self, tight: &BTreeSet<usize>, verts: &[usize], dim: usize) -> Vec<Vec<usize>> {
        if dim == 0 {
            return vec![vec![verts[0]]];
        }
        let apex = verts[0];
        let mut seen: Vec<Vec<usize>> = Vec::new();
        let mut out = Vec::new();
        for f in 0..self.facets.len() {
            if tight.contains(&f) {
                continue;
            }
            let sub: Vec<usize> = verts.iter().copied().filter(|&v| self.vertex_facets[v].contains(&f)).collect();
            if sub.contains(&apex) || sub.is_empty() || seen.contains(&sub) {
                continue;
            }
            let pts: Vec<&Vec<f64>> = sub.iter().map(|&v| &self.vertices[v]).collect();
            if affine_rank(&pts) != dim - 1 {
                continue;
            }
            seen.push(sub.clone());
            let mut t = tight.clone();
            t.insert(f);
            for mut s in self.triangulate(&t, &sub, dim - 1) {
                s.insert(0, apex);
                out.push(s);
            }
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A unit direction orthogonal to `rows` when they have rank `n - 1`.
fn null_direction(rows: &[&[f64]], n: usize) -> Option<Vec<f64>> {
    if rows.is_empty() {
        return (n == 1).then(|| vec![1.0]);
    }
    // Generalized cross product: cofactors of the matrix with a free last row.
    let d: Vec<f64> = (0..n)
        .map(|j| {
            let m = Matrix::from_fn(n - 1, |r, c| rows[r][if c < j { c } else { c + 1 }]);
            let s = if (n - 1 + j) % 2 == 0 { 1.0 } else { -1.0 };
            s * m.det()
        })
        .collect();
    let norm = libm::sqrt(dot(&d, &d));
    (norm > 1e-12).then(|| d.iter().map(|x| x / norm).collect())
}
