//! Parametric benchmark meshes.
//!
//! Every fixture carries the standard regions `load` (facets), `pin`
//! (nodes), `frozen` (nodes) and `design` (boundary nodes not frozen).
//!
//! | name               | parameters (defaults)                                        |
//! |--------------------|--------------------------------------------------------------|
//! | `bar3d`            | `L`=1, `a`=0.1, `n`=4, `nx`=round(n·L/a)                     |
//! | `cantilever2d`     | `L`=1, `h`=0.05, `t`=0.01, `n`=8, `ny`=max(2, n/4), `nx`=ny·L/h |
//! | `plate_with_hole2d`| `L`=0.1, `W`=0.05, `r`=0.01, `t`=0.005, `n`=8                |
//! | `ring2d`           | `r_in`=0.02, `r_out`=0.04, `t`=0.005, `n`=16, `m`=auto       |
//! | `lug3d`            | `L`=0.12, `W`=0.08, `T`=0.02, `r`=0.012, `n`=6, `nz`=3        |
//!
//! `bar3d` is the box [0,L]×[0,a]×[0,a], pinned at x = 0 and loaded at x = L;
//! the single-node regions `anchor` (origin) and `anchor_y` (0,a,0) allow a
//! support that does not restrain lateral contraction.
//! `cantilever2d` is [0,L]×[−h/2,h/2] meshed with `ny` layers of near-square
//! cells, clamped at x = 0 and loaded on the tip edge. `plate_with_hole2d` is
//! [0,L]×[0,W] with a central hole, pinned on the left edge, loaded on the
//! right edge. `lug3d` is a block [0,L]×[0,W]×[0,T] pierced by a transverse
//! hole centered at (L − W/2, W/2): pinned at x = 0, loaded on the half of
//! the bore facing +x, with the whole bore frozen.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use super::boundary::{boundary_nodes, extract_boundary};
use super::{FacetRef, Mesh, MeshError, RegionTag};
use crate::geometry::{self, Point};

pub type FixtureParams = BTreeMap<String, f64>;

pub const FIXTURE_NAMES: [&str; 5] = ["bar3d", "cantilever2d", "plate_with_hole2d", "ring2d", "lug3d"];

pub fn make_fixture(name: &str, params: &FixtureParams) -> Result<Mesh, MeshError> {
    match name {
        "bar3d" => {
            let p = Params::new(params, &["L", "a", "n", "nx"])?;
            let (l, a) = (p.positive("L", 1.0)?, p.positive("a", 0.1)?);
            let n = p.count("n", 4)?;
            let nx = p.count("nx", ((n as f64) * l / a).round().max(1.0) as usize)?;
            bar3d(l, a, n, nx)
        }
        "cantilever2d" => {
            let p = Params::new(params, &["L", "h", "t", "n", "ny", "nx"])?;
            let (l, h, t) = (p.positive("L", 1.0)?, p.positive("h", 0.05)?, p.positive("t", 0.01)?);
            let n = p.count("n", 8)?;
            let ny = p.count("ny", (n / 4).max(2))?;
            let nx = p.count("nx", ((ny as f64) * l / h).round().max(1.0) as usize)?;
            cantilever2d(l, h, t, nx, ny)
        }
        "plate_with_hole2d" => {
            let p = Params::new(params, &["L", "W", "r", "t", "n"])?;
            let (l, w, t) = (p.positive("L", 0.1)?, p.positive("W", 0.05)?, p.positive("t", 0.005)?);
            let r = p.get("r", 0.01);
            let n = p.count("n", 8)?;
            if !(r > 0.0 && r < 0.5 * w) {
                return Err(MeshError::FixtureParams(format!(
                    "hole radius r = {r} must satisfy 0 < r < W/2 = {}",
                    0.5 * w
                )));
            }
            if l < w {
                return Err(MeshError::FixtureParams(format!("plate length L = {l} must be at least W = {w}")));
            }
            plate_with_hole2d(l, w, r, t, n)
        }
        "ring2d" => {
            let p = Params::new(params, &["r_in", "r_out", "t", "n", "m"])?;
            let (r_in, r_out, t) = (p.positive("r_in", 0.02)?, p.positive("r_out", 0.04)?, p.positive("t", 0.005)?);
            if r_out <= r_in {
                return Err(MeshError::FixtureParams(format!("r_out = {r_out} must exceed r_in = {r_in}")));
            }
            let n = p.count("n", 16)?;
            if n < 3 {
                return Err(MeshError::FixtureParams("ring needs n >= 3 segments".into()));
            }
            let auto_m = ((n as f64) * (r_out - r_in) / (PI * (r_out + r_in))).round().max(1.0) as usize;
            let m = p.count("m", auto_m)?;
            ring2d(r_in, r_out, t, n, m)
        }
        "lug3d" => {
            let p = Params::new(params, &["L", "W", "T", "r", "n", "nz"])?;
            let (l, w, th) = (p.positive("L", 0.12)?, p.positive("W", 0.08)?, p.positive("T", 0.02)?);
            let r = p.get("r", 0.012);
            let n = p.count("n", 6)?;
            let nz = p.count("nz", 3)?;
            if !(r > 0.0 && r < 0.5 * w) {
                return Err(MeshError::FixtureParams(format!(
                    "hole radius r = {r} must satisfy 0 < r < W/2 = {}",
                    0.5 * w
                )));
            }
            if l < w {
                return Err(MeshError::FixtureParams(format!("lug length L = {l} must be at least W = {w}")));
            }
            lug3d(l, w, th, r, n, nz)
        }
        other => Err(MeshError::UnknownFixture(other.to_string())),
    }
}

/// Unit cube split into six Kuhn tetrahedra, with no regions.
pub fn unit_cube() -> Mesh {
    let (nodes, conn) = kuhn_box([1, 1, 1], [1.0, 1.0, 1.0]);
    Mesh::new(3, 1.0, nodes, conn, vec![]).expect("unit cube is valid")
}

struct Params<'a> {
    map: &'a FixtureParams,
}

impl<'a> Params<'a> {
    fn new(map: &'a FixtureParams, allowed: &[&str]) -> Result<Self, MeshError> {
        if let Some(bad) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(MeshError::FixtureParams(format!(
                "unknown parameter `{bad}` (allowed: {})",
                allowed.join(", ")
            )));
        }
        Ok(Params { map })
    }

    fn get(&self, key: &str, default: f64) -> f64 {
        self.map.get(key).copied().unwrap_or(default)
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64, MeshError> {
        let v = self.get(key, default);
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(MeshError::FixtureParams(format!("`{key}` must be positive, got {v}")))
        }
    }

    fn count(&self, key: &str, default: usize) -> Result<usize, MeshError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(&v) if v >= 1.0 && v.fract() == 0.0 && v <= 1e6 => Ok(v as usize),
            Some(&v) => Err(MeshError::FixtureParams(format!("`{key}` must be a positive integer, got {v}"))),
        }
    }
}

fn bar3d(l: f64, a: f64, n: usize, nx: usize) -> Result<Mesh, MeshError> {
    let (nodes, conn) = kuhn_box([nx, n, n], [l, a, a]);
    let tol = 1e-9 * l;
    let mesh = finish_3d(
        nodes,
        conn,
        |p| p[0].abs() <= tol,
        |_, c| (c[0] - l).abs() <= tol,
        |p| (p[0] - l).abs() <= tol,
    )?;
    // Single-node supports for a statically determinate mount of the x = 0 face.
    let find = |target: Point| {
        let i = mesh
            .nodes()
            .iter()
            .position(|p| (0..3).all(|c| (p[c] - target[c]).abs() <= tol))
            .expect("box corners are grid nodes");
        vec![i]
    };
    let mut regions: Vec<RegionTag> = mesh.regions().cloned().collect();
    regions.push(RegionTag::nodes("anchor", find([0.0, 0.0, 0.0])));
    regions.push(RegionTag::nodes("anchor_y", find([0.0, a, 0.0])));
    Mesh::new(3, 1.0, mesh.nodes().to_vec(), mesh.connectivity().to_vec(), regions)
}

fn cantilever2d(l: f64, h: f64, t: f64, nx: usize, ny: usize) -> Result<Mesh, MeshError> {
    let mut b = Builder2d::default();
    b.grid(nx, ny, |i, j| [l * i as f64 / nx as f64, -0.5 * h + h * j as f64 / ny as f64]);
    let tol = 1e-9 * l;
    b.finish(
        t,
        |p| p[0].abs() <= tol,
        |_, c| (c[0] - l).abs() <= tol,
        |p| (p[0] - l).abs() <= tol,
    )
}

fn plate_with_hole2d(l: f64, w: f64, r: f64, t: f64, n: usize) -> Result<Mesh, MeshError> {
    let mut b = Builder2d::default();
    holed_rectangle(&mut b, l, w, [0.5 * l, 0.5 * w], r, n);
    let tol = 1e-9 * l;
    b.finish(
        t,
        |p| p[0].abs() <= tol,
        |_, c| (c[0] - l).abs() <= tol,
        |p| (p[0] - l).abs() <= tol,
    )
}

fn ring2d(r_in: f64, r_out: f64, t: f64, n: usize, m: usize) -> Result<Mesh, MeshError> {
    let mut b = Builder2d::default();
    b.grid_periodic(n, m, |i, j| {
        let theta = 2.0 * PI * i as f64 / n as f64;
        let rad = r_in + (r_out - r_in) * j as f64 / m as f64;
        [rad * theta.cos(), rad * theta.sin()]
    });
    let tol = 1e-9 * r_out;
    let on_inner = move |p: &Point| (p[0].hypot(p[1]) - r_in).abs() <= tol.max(1e-9 * r_in);
    let on_outer = move |p: &Point| (p[0].hypot(p[1]) - r_out).abs() <= 1e-9 * r_out;
    b.finish(
        t,
        on_inner,
        move |nodes: &[Point], c: [f64; 3]| c[1] > 0.0 && nodes.iter().all(on_outer),
        |_| false,
    )
}

fn lug3d(l: f64, w: f64, th: f64, r: f64, n: usize, nz: usize) -> Result<Mesh, MeshError> {
    let mut b = Builder2d::default();
    let center = [l - 0.5 * w, 0.5 * w];
    holed_rectangle(&mut b, l, w, center, r, n);
    b.weld(1e-9 * l);
    b.orient();
    let (nodes, conn) = extrude(&b.points, &b.tris, th, nz);
    let tol = 1e-6 * r;
    let on_bore = move |p: &Point| ((p[0] - center[0]).hypot(p[1] - center[1]) - r).abs() <= tol;
    finish_3d(
        nodes,
        conn,
        |p| p[0].abs() <= 1e-9 * l,
        move |facet_nodes: &[Point], c: [f64; 3]| c[0] > center[0] && facet_nodes.iter().all(on_bore),
        on_bore,
    )
}

/// Structured 2D triangles with welding and orientation repair.
#[derive(Default)]
struct Builder2d {
    points: Vec<[f64; 2]>,
    tris: Vec<[usize; 3]>,
}

impl Builder2d {
    /// (nx+1)×(ny+1) point grid, each cell split into two triangles with
    /// alternating diagonals.
    fn grid(&mut self, nx: usize, ny: usize, point: impl Fn(usize, usize) -> [f64; 2]) {
        let base = self.points.len();
        for j in 0..=ny {
            for i in 0..=nx {
                self.points.push(point(i, j));
            }
        }
        let id = |i: usize, j: usize| base + j * (nx + 1) + i;
        for j in 0..ny {
            for i in 0..nx {
                self.quad(id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1), (i + j) % 2 == 1);
            }
        }
    }

    /// Grid periodic in `i` (n points around), m cells in `j`.
    fn grid_periodic(&mut self, n: usize, m: usize, point: impl Fn(usize, usize) -> [f64; 2]) {
        let base = self.points.len();
        for j in 0..=m {
            for i in 0..n {
                self.points.push(point(i, j));
            }
        }
        let id = |i: usize, j: usize| base + j * n + (i % n);
        for j in 0..m {
            for i in 0..n {
                self.quad(id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1), (i + j) % 2 == 1);
            }
        }
    }

    fn quad(&mut self, a: usize, b: usize, c: usize, d: usize, flip: bool) {
        if flip {
            self.tris.push([a, b, d]);
            self.tris.push([b, c, d]);
        } else {
            self.tris.push([a, b, c]);
            self.tris.push([a, c, d]);
        }
    }

    /// Merges points closer than `tol`, keeping first-seen order.
    fn weld(&mut self, tol: f64) {
        let cell = |p: &[f64; 2]| ((p[0] / tol).floor() as i64, (p[1] / tol).floor() as i64);
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        let mut kept: Vec<[f64; 2]> = Vec::new();
        let mut remap = vec![0; self.points.len()];
        for (i, p) in self.points.iter().enumerate() {
            let (cx, cy) = cell(p);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = buckets.get(&(cx + dx, cy + dy)) {
                        for &k in list {
                            let q = kept[k];
                            if (q[0] - p[0]).hypot(q[1] - p[1]) <= tol {
                                found = Some(k);
                                break 'search;
                            }
                        }
                    }
                }
            }
            remap[i] = match found {
                Some(k) => k,
                None => {
                    kept.push(*p);
                    buckets.entry((cx, cy)).or_default().push(kept.len() - 1);
                    kept.len() - 1
                }
            };
        }
        self.points = kept;
        for t in &mut self.tris {
            for v in t.iter_mut() {
                *v = remap[*v];
            }
        }
    }

    fn orient(&mut self) {
        for t in &mut self.tris {
            let [a, b, c] = t.map(|i| self.points[i]);
            let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
            if det < 0.0 {
                t.swap(1, 2);
            }
        }
    }

    fn finish(
        mut self,
        thickness: f64,
        pin: impl Fn(&Point) -> bool,
        load: impl Fn(&[Point], [f64; 3]) -> bool,
        frozen_extra: impl Fn(&Point) -> bool,
    ) -> Result<Mesh, MeshError> {
        let scale = self
            .points
            .iter()
            .fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
        self.weld(1e-9 * scale.max(f64::MIN_POSITIVE));
        self.orient();
        let nodes: Vec<Point> = self.points.iter().map(|p| [p[0], p[1], 0.0]).collect();
        let conn: Vec<usize> = self.tris.iter().flatten().copied().collect();
        attach_regions(2, thickness, nodes, conn, pin, load, frozen_extra)
    }
}

/// Rectangle [0,l]×[0,w] with a circular hole: a w×w square block around the
/// hole (four graded sectors) plus structured side blocks.
fn holed_rectangle(b: &mut Builder2d, l: f64, w: f64, center: [f64; 2], r: f64, n: usize) {
    let h = 0.5 * w;
    let m = (n / 2).max(2);
    let side = |k: usize, s: f64| -> [f64; 2] {
        match k {
            0 => [center[0] + h, center[1] - h + 2.0 * h * s],
            1 => [center[0] + h - 2.0 * h * s, center[1] + h],
            2 => [center[0] - h, center[1] + h - 2.0 * h * s],
            _ => [center[0] - h + 2.0 * h * s, center[1] - h],
        }
    };
    for k in 0..4 {
        b.grid(n, m, |i, j| {
            let s = i as f64 / n as f64;
            let theta = (-0.25 + 0.5 * k as f64 + 0.5 * s) * PI;
            let c = [center[0] + r * theta.cos(), center[1] + r * theta.sin()];
            let q = side(k, s);
            let rho = (j as f64 / m as f64).powf(1.5);
            [c[0] + rho * (q[0] - c[0]), c[1] + rho * (q[1] - c[1])]
        });
    }
    let dx = w / n as f64;
    let left = center[0] - h;
    if left > 1e-9 * l {
        let nx = (left / dx).round().max(1.0) as usize;
        b.grid(nx, n, |i, j| [left * i as f64 / nx as f64, w * j as f64 / n as f64]);
    }
    let right = l - (center[0] + h);
    if right > 1e-9 * l {
        let nx = (right / dx).round().max(1.0) as usize;
        let x0 = center[0] + h;
        b.grid(nx, n, |i, j| [x0 + right * i as f64 / nx as f64, w * j as f64 / n as f64]);
    }
}

/// Structured box split into Kuhn tetrahedra (conforming across cells).
fn kuhn_box(cells: [usize; 3], size: [f64; 3]) -> (Vec<Point>, Vec<usize>) {
    let [nx, ny, nz] = cells;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push([
                    size[0] * i as f64 / nx as f64,
                    size[1] * j as f64 / ny as f64,
                    size[2] * k as f64 / nz as f64,
                ]);
            }
        }
    }
    let id = |i: usize, j: usize, k: usize| (k * (ny + 1) + j) * (nx + 1) + i;
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut conn = Vec::with_capacity(nx * ny * nz * 24);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                for perm in PERMS {
                    let mut c = [i, j, k];
                    let mut tet = [id(c[0], c[1], c[2]); 4];
                    for (step, &axis) in perm.iter().enumerate() {
                        c[axis] += 1;
                        tet[step + 1] = id(c[0], c[1], c[2]);
                    }
                    conn.extend_from_slice(&tet);
                }
            }
        }
    }
    orient_tets(&nodes, &mut conn);
    (nodes, conn)
}

/// Extrudes a triangle mesh through `layers` prism layers, each prism split
/// into three tetrahedra by global vertex order so shared quads agree.
fn extrude(points: &[[f64; 2]], tris: &[[usize; 3]], depth: f64, layers: usize) -> (Vec<Point>, Vec<usize>) {
    let np = points.len();
    let mut nodes = Vec::with_capacity(np * (layers + 1));
    for k in 0..=layers {
        let z = depth * k as f64 / layers as f64;
        nodes.extend(points.iter().map(|p| [p[0], p[1], z]));
    }
    let mut conn = Vec::with_capacity(tris.len() * layers * 12);
    for k in 0..layers {
        for t in tris {
            let mut v = *t;
            v.sort_unstable();
            let lo = |i: usize| k * np + v[i];
            let hi = |i: usize| (k + 1) * np + v[i];
            conn.extend_from_slice(&[lo(0), lo(1), lo(2), hi(2)]);
            conn.extend_from_slice(&[lo(0), lo(1), hi(1), hi(2)]);
            conn.extend_from_slice(&[lo(0), hi(0), hi(1), hi(2)]);
        }
    }
    orient_tets(&nodes, &mut conn);
    (nodes, conn)
}

fn orient_tets(nodes: &[Point], conn: &mut [usize]) {
    for tet in conn.chunks_exact_mut(4) {
        let c = [nodes[tet[0]], nodes[tet[1]], nodes[tet[2]], nodes[tet[3]]];
        if geometry::signed_measure(&c, 3, 1.0) < 0.0 {
            tet.swap(2, 3);
        }
    }
}

fn finish_3d(
    nodes: Vec<Point>,
    conn: Vec<usize>,
    pin: impl Fn(&Point) -> bool,
    load: impl Fn(&[Point], [f64; 3]) -> bool,
    frozen_extra: impl Fn(&Point) -> bool,
) -> Result<Mesh, MeshError> {
    attach_regions(3, 1.0, nodes, conn, pin, load, frozen_extra)
}

/// Classifies boundary entities into the standard regions.
///
/// `frozen` = pin nodes ∪ load-facet nodes ∪ boundary nodes matching
/// `frozen_extra`; `design` = remaining boundary nodes.
fn attach_regions(
    dim: usize,
    thickness: f64,
    nodes: Vec<Point>,
    conn: Vec<usize>,
    pin: impl Fn(&Point) -> bool,
    load: impl Fn(&[Point], [f64; 3]) -> bool,
    frozen_extra: impl Fn(&Point) -> bool,
) -> Result<Mesh, MeshError> {
    let bare = Mesh::new(dim, thickness, nodes, conn, vec![])?;
    let boundary = extract_boundary(&bare)?;
    let bnodes = boundary_nodes(&boundary);
    let pts = bare.nodes();

    let pin_nodes: Vec<usize> = bnodes.iter().copied().filter(|&i| pin(&pts[i])).collect();
    let mut load_facets: Vec<FacetRef> = Vec::new();
    for f in &boundary {
        let fp: Vec<Point> = f.nodes.iter().map(|&i| pts[i]).collect();
        let mut c = [0.0; 3];
        for p in &fp {
            for d in 0..3 {
                c[d] += p[d] / fp.len() as f64;
            }
        }
        if load(&fp, c) {
            load_facets.push(f.facet);
        }
    }
    let mut frozen: Vec<usize> = pin_nodes.clone();
    for f in &boundary {
        if load_facets.binary_search(&f.facet).is_ok() {
            frozen.extend_from_slice(&f.nodes);
        }
    }
    frozen.extend(bnodes.iter().copied().filter(|&i| frozen_extra(&pts[i])));
    frozen.sort_unstable();
    frozen.dedup();
    let design: Vec<usize> = bnodes.iter().copied().filter(|i| frozen.binary_search(i).is_err()).collect();

    let regions = vec![
        RegionTag::facets("load", load_facets),
        RegionTag::nodes("pin", pin_nodes),
        RegionTag::nodes("frozen", frozen),
        RegionTag::nodes("design", design),
    ];
    Mesh::new(dim, thickness, bare.nodes().to_vec(), bare.connectivity().to_vec(), regions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::measure;

    fn params(pairs: &[(&str, f64)]) -> FixtureParams {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn bar3d_volume_and_end_regions() {
        let mesh = make_fixture("bar3d", &params(&[("L", 1.0), ("a", 0.1), ("n", 4.0)])).unwrap();
        let r = measure(&mesh).unwrap();
        assert!((r.volume - 0.01).abs() < 1e-10);
        for &i in &mesh.region_nodes("pin").unwrap() {
            assert_eq!(mesh.nodes()[i][0], 0.0);
        }
        for i in mesh.region_nodes("load").unwrap() {
            assert!((mesh.nodes()[i][0] - 1.0).abs() < 1e-12);
        }
        assert_eq!(mesh.region_facets("load").unwrap().len(), 2 * 4 * 4);
    }

    #[test]
    fn degenerate_hole_is_rejected() {
        let err = make_fixture("plate_with_hole2d", &params(&[("r", 0.0)])).unwrap_err();
        assert!(matches!(err, MeshError::FixtureParams(_)));
        let err = make_fixture("plate_with_hole2d", &params(&[("r", 0.025)])).unwrap_err();
        assert!(matches!(err, MeshError::FixtureParams(_)));
    }

    #[test]
    fn unknown_names_and_params_are_rejected() {
        assert!(matches!(make_fixture("bracket", &FixtureParams::new()), Err(MeshError::UnknownFixture(_))));
        assert!(matches!(
            make_fixture("bar3d", &params(&[("length", 1.0)])),
            Err(MeshError::FixtureParams(_))
        ));
        assert!(matches!(make_fixture("bar3d", &params(&[("n", 2.5)])), Err(MeshError::FixtureParams(_))));
    }

    #[test]
    fn ring_area_is_polygonal_underestimate() {
        let mesh = make_fixture("ring2d", &params(&[("r_in", 0.02), ("r_out", 0.04), ("n", 16.0)])).unwrap();
        let t = mesh.thickness();
        let area = measure(&mesh).unwrap().volume / t;
        let exact = PI * (0.04f64.powi(2) - 0.02f64.powi(2));
        // Independent oracle: polygon-area formula of the inscribed 16-gons.
        let polygon = |r: f64| 0.5 * 16.0 * r * r * (2.0 * PI / 16.0).sin();
        let oracle = polygon(0.04) - polygon(0.02);
        assert!((area - oracle).abs() < 1e-12 * oracle);
        assert!(area < exact && (exact - area) / exact < 0.03);
    }

    #[test]
    fn fixtures_are_deterministic_and_valid() {
        for name in FIXTURE_NAMES {
            let a = make_fixture(name, &FixtureParams::new()).unwrap();
            let b = make_fixture(name, &FixtureParams::new()).unwrap();
            assert_eq!(a, b, "{name}");
            let r = measure(&a).unwrap();
            assert!(r.min_quality > 0.05, "{name}: quality {}", r.min_quality);
            let frozen = a.region_nodes("frozen").unwrap();
            let design = a.region_nodes("design").unwrap();
            assert!(design.iter().all(|d| frozen.binary_search(d).is_err()));
            assert!(!a.region_facets("load").unwrap().is_empty(), "{name}");
            assert!(!a.region_nodes("pin").unwrap().is_empty(), "{name}");
        }
    }

    #[test]
    fn lug_bore_is_frozen_and_load_faces_plus_x() {
        let mesh = make_fixture("lug3d", &FixtureParams::new()).unwrap();
        let center = [0.12 - 0.04, 0.04];
        let frozen = mesh.region_nodes("frozen").unwrap();
        for i in mesh.region_nodes("load").unwrap() {
            let p = mesh.nodes()[i];
            assert!(((p[0] - center[0]).hypot(p[1] - center[1]) - 0.012).abs() < 1e-9);
            assert!(p[0] >= center[0] - 1e-12);
            assert!(frozen.binary_search(&i).is_ok());
        }
    }
}
