use std::collections::{HashMap, HashSet};

use super::{edge_key, Mesh};
use crate::{Error, Point, Result};

struct Builder {
    vertices: Vec<Point>,
    midpoints: HashMap<(usize, usize), usize>,
    triangles: Vec<[usize; 3]>,
    refinement_edge: Vec<u8>,
}

impl Builder {
    fn midpoint(&mut self, a: usize, b: usize) -> usize {
        let key = edge_key(a, b);
        if let Some(&m) = self.midpoints.get(&key) {
            return m;
        }
        let (p, q) = (self.vertices[key.0], self.vertices[key.1]);
        self.vertices.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
        let m = self.vertices.len() - 1;
        self.midpoints.insert(key, m);
        m
    }

    /// Bisects `tri` across its refinement edge while that edge is marked.
    /// The children's refinement edges are opposite the new vertex.
    fn bisect(&mut self, tri: [usize; 3], e: u8, marked: &HashSet<(usize, usize)>) {
        let e = e as usize;
        let (a, b, c) = (tri[e], tri[(e + 1) % 3], tri[(e + 2) % 3]);
        if !marked.contains(&edge_key(a, b)) {
            self.triangles.push(tri);
            self.refinement_edge.push(e as u8);
            return;
        }
        let m = self.midpoint(a, b);
        self.bisect([a, m, c], 2, marked);
        self.bisect([m, b, c], 1, marked);
    }
}

/// Newest vertex bisection of the `marked` elements, with conforming closure.
///
/// Every marked element is bisected at least once; neighbours are bisected
/// as needed to remove hanging nodes. The result carries the refinement edges
/// of the children, so repeated calls continue the bisection sequence.
pub fn refine_nvb(mesh: &Mesh, marked: &[usize]) -> Result<Mesh> {
    if let Some(&t) = marked.iter().find(|&&t| t >= mesh.n_elems()) {
        return Err(Error::param("marked", format!("element {t} does not exist")));
    }
    let ref_key = |t: usize| {
        let tri = mesh.triangles[t];
        let e = mesh.refinement_edge[t] as usize;
        edge_key(tri[e], tri[(e + 1) % 3])
    };
    let mut edges: HashSet<(usize, usize)> = marked.iter().map(|&t| ref_key(t)).collect();
    // Closure: an element with any marked edge must have its refinement edge marked.
    loop {
        let mut changed = false;
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let any = (0..3).any(|e| edges.contains(&edge_key(tri[e], tri[(e + 1) % 3])));
            if any && edges.insert(ref_key(t)) {
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut b = Builder {
        vertices: mesh.vertices.clone(),
        midpoints: HashMap::new(),
        triangles: Vec::with_capacity(mesh.n_elems() + 2 * edges.len()),
        refinement_edge: Vec::new(),
    };
    for (t, &tri) in mesh.triangles.iter().enumerate() {
        b.bisect(tri, mesh.refinement_edge[t], &edges);
    }
    Mesh::new(b.vertices, b.triangles, Some(b.refinement_edge))
}

/// Red refinement: every triangle is split into four similar children through
/// its edge midpoints. Element diameters halve and grading ratios are kept.
pub fn refine_red(mesh: &Mesh) -> Result<Mesh> {
    let mut b = Builder {
        vertices: mesh.vertices.clone(),
        midpoints: HashMap::new(),
        triangles: Vec::with_capacity(4 * mesh.n_elems()),
        refinement_edge: Vec::new(),
    };
    for &[p, q, r] in &mesh.triangles {
        let (pq, qr, rp) = (b.midpoint(p, q), b.midpoint(q, r), b.midpoint(r, p));
        b.triangles.extend([[p, pq, rp], [pq, q, qr], [rp, qr, r], [pq, qr, rp]]);
    }
    Mesh::new(b.vertices, b.triangles, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{gen_geometric, gen_uniform, grading_report};

    fn origin_elements(m: &Mesh) -> Vec<usize> {
        (0..m.n_elems())
            .filter(|&t| m.corners(t).iter().any(|p| p[0] == 0.0 && p[1] == 0.0))
            .collect()
    }

    #[test]
    fn empty_marking_is_identity() {
        let m = gen_uniform(3).unwrap();
        assert_eq!(refine_nvb(&m, &[]).unwrap(), m);
    }

    #[test]
    fn marked_elements_are_bisected() {
        let m = gen_uniform(2).unwrap();
        let r = refine_nvb(&m, &[0]).unwrap();
        assert!(r.n_elems() > m.n_elems());
        // Element 0's area is split: no child of the output has the old area.
        let c = m.centroid(0);
        let t = r.locate(c).unwrap();
        assert!(r.area(t) <= 0.5 * m.area(0) + 1e-15);
    }

    #[test]
    fn corner_refinement_stays_conforming() {
        let mut m = gen_uniform(2).unwrap();
        for _ in 0..5 {
            let marked = origin_elements(&m);
            m = refine_nvb(&m, &marked).unwrap();
        }
        // Mesh::new re-validated conformity; check the grading diagnostic.
        let r = grading_report(&m);
        assert!(r.alpha < 1.0, "alpha = {}", r.alpha);
        assert!((m.total_area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn global_bisection_keeps_shape_regularity() {
        let mut m = gen_uniform(2).unwrap();
        let mu0 = grading_report(&m).mu;
        let mut hmax = m.max_h();
        for generation in 0..6 {
            let all: Vec<usize> = (0..m.n_elems()).collect();
            let next = refine_nvb(&m, &all).unwrap();
            assert_eq!(next.n_elems(), 2 * m.n_elems());
            m = next;
            let mu = grading_report(&m).mu;
            assert!(mu >= 0.9 * mu0, "generation {generation}: mu {mu} vs {mu0}");
            if generation % 2 == 1 {
                assert!((m.max_h() - 0.5 * hmax).abs() < 1e-14);
                hmax = m.max_h();
            }
        }
    }

    #[test]
    fn red_refinement_preserves_grading() {
        let m = gen_geometric(0.8, 4).unwrap();
        let r = refine_red(&m).unwrap();
        assert_eq!(r.n_elems(), 4 * m.n_elems());
        assert!((r.max_h() - 0.5 * m.max_h()).abs() < 1e-15);
        let (a, b) = (grading_report(&m).alpha, grading_report(&r).alpha);
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}
