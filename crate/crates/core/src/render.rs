//! SVG cross-sections of the ball.
//!
//! Cones and hyperballs are convex in the ball, so each section is found by
//! casting rays from an interior point and bisecting for the boundary. All
//! numbers are printed with fixed precision, which makes the output a pure
//! function of the scene and the plane.

use std::fmt::Write as _;

use nalgebra::Vector3;

use crate::ball_model::{ball_distance, project_to_ball, BallPoint};
use crate::scene::Scene;
use crate::{Error, Result};

const SIZE: f64 = 400.0;
const SCALE: f64 = 190.0;
const GRID: usize = 160;
const RAYS: usize = 256;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// The plane `normal·x = offset` with an orthonormal frame `(e1, e2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionPlane {
    pub normal: Vector3<f64>,
    pub offset: f64,
    e1: Vector3<f64>,
    e2: Vector3<f64>,
    label: [char; 2],
}

impl SectionPlane {
    /// Accepts `x=c`, `y=c`, `z=c` or `a,b,c,d` for `ax + by + cz = d`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("bad plane spec {spec:?}: use x=0, y=0.3 or a,b,c,d"));
        let spec = spec.trim();
        if let Some((axis, value)) = spec.split_once('=') {
            let c: f64 = value.trim().parse().map_err(|_| bad())?;
            let (n, e1, e2, label) = match axis.trim() {
                "x" => (Vector3::x(), Vector3::y(), Vector3::z(), ['y', 'z']),
                "y" => (Vector3::y(), Vector3::x(), Vector3::z(), ['x', 'z']),
                "z" => (Vector3::z(), Vector3::x(), Vector3::y(), ['x', 'y']),
                _ => return Err(bad()),
            };
            return Self::checked(n, c, e1, e2, label);
        }
        let v: Vec<f64> = spec
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        if v.len() != 4 {
            return Err(bad());
        }
        let n = Vector3::new(v[0], v[1], v[2]);
        let len = n.norm();
        if !(len > 0.0 && len.is_finite()) {
            return Err(bad());
        }
        let n = n / len;
        let helper = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let e1 = (helper - n * n.dot(&helper)).normalize();
        let e2 = n.cross(&e1);
        Self::checked(n, v[3] / len, e1, e2, ['u', 'v'])
    }

    fn checked(n: Vector3<f64>, c: f64, e1: Vector3<f64>, e2: Vector3<f64>, label: [char; 2]) -> Result<Self> {
        if !(c.abs() < 1.0) {
            return Err(Error::InvalidInput(format!("plane at offset {c} misses the open ball")));
        }
        Ok(Self {
            normal: n,
            offset: c,
            e1,
            e2,
            label,
        })
    }

    fn point(&self, s: f64, t: f64) -> Vector3<f64> {
        self.normal * self.offset + self.e1 * s + self.e2 * t
    }

    /// Radius of the section of the unit sphere.
    pub fn disc_radius(&self) -> f64 {
        (1.0 - self.offset * self.offset).sqrt()
    }
}

/// Boundary polygon, in plane coordinates, of the convex set `inside`
/// intersected with the section disc. `None` if the grid finds no point.
pub fn convex_section(plane: &SectionPlane, inside: impl Fn(&Vector3<f64>) -> bool) -> Option<Vec<(f64, f64)>> {
    let r = plane.disc_radius();
    let (mut cs, mut ct, mut count) = (0.0, 0.0, 0usize);
    for i in 0..GRID {
        for j in 0..GRID {
            let s = r * (2.0 * (i as f64 + 0.5) / GRID as f64 - 1.0);
            let t = r * (2.0 * (j as f64 + 0.5) / GRID as f64 - 1.0);
            if s * s + t * t < r * r && inside(&plane.point(s, t)) {
                cs += s;
                ct += t;
                count += 1;
            }
        }
    }
    if count == 0 {
        return None;
    }
    let (cs, ct) = (cs / count as f64, ct / count as f64);
    let poly = (0..RAYS)
        .map(|k| {
            let th = std::f64::consts::TAU * k as f64 / RAYS as f64;
            let (ds, dt) = (th.cos(), th.sin());
            // distance from the centroid to the disc boundary along the ray
            let b = cs * ds + ct * dt;
            let reach = -b + (b * b - (cs * cs + ct * ct - r * r)).max(0.0).sqrt();
            let (mut lo, mut hi) = (0.0, reach);
            if inside(&plane.point(cs + ds * hi * (1.0 - 1e-12), ct + dt * hi * (1.0 - 1e-12))) {
                lo = hi;
            } else {
                for _ in 0..50 {
                    let mid = 0.5 * (lo + hi);
                    if inside(&plane.point(cs + ds * mid, ct + dt * mid)) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
            }
            (cs + ds * lo, ct + dt * lo)
        })
        .collect();
    Some(poly)
}

fn to_svg(s: f64, t: f64) -> (f64, f64) {
    (SIZE / 2.0 + SCALE * s, SIZE / 2.0 - SCALE * t)
}

fn fmt(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn escape(name: &str) -> String {
    name.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn polygon(out: &mut String, poly: &[(f64, f64)], colour: &str, opacity: &str, name: &str) {
    let pts: Vec<String> = poly
        .iter()
        .map(|(s, t)| {
            let (x, y) = to_svg(*s, *t);
            format!("{},{}", fmt(x), fmt(y))
        })
        .collect();
    let _ = writeln!(
        out,
        "  <polygon points=\"{}\" fill=\"{colour}\" fill-opacity=\"{opacity}\" stroke=\"{colour}\" stroke-width=\"1\"><title>{}</title></polygon>",
        pts.join(" "),
        escape(name)
    );
    let n = poly.len() as f64;
    let (cs, ct) = poly.iter().fold((0.0, 0.0), |(a, b), (s, t)| (a + s / n, b + t / n));
    let (x, y) = to_svg(cs, ct);
    let _ = writeln!(
        out,
        "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
        fmt(x),
        fmt(y),
        escape(name)
    );
}

/// Renders the section of every cone and hyperball of `scene` by `plane`,
/// plus the events whose ball image lies within 0.01 of the plane.
pub fn render_svg(scene: &Scene, plane: &SectionPlane) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let n = plane.normal;
    let _ = writeln!(
        out,
        "  <title>section {},{},{} = {} (axes {}, {})</title>",
        fmt(n.x),
        fmt(n.y),
        fmt(n.z),
        fmt(plane.offset),
        plane.label[0],
        plane.label[1]
    );
    let _ = writeln!(out, "  <rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"#ffffff\"/>");
    let _ = writeln!(
        out,
        "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\"/>",
        fmt(SIZE / 2.0),
        fmt(SIZE / 2.0),
        fmt(SCALE * plane.disc_radius())
    );
    let mut colour = 0;
    for (name, k) in &scene.cones {
        if let Some(poly) = convex_section(plane, |x| k.contains(x)) {
            polygon(&mut out, &poly, PALETTE[colour % PALETTE.len()], "0.35", name);
        }
        colour += 1;
    }
    for (name, o) in &scene.hyperballs {
        let inside = |x: &Vector3<f64>| {
            BallPoint::new(*x).is_ok_and(|p| ball_distance(&p, &o.center, &o.shell) < o.radius)
        };
        if let Some(poly) = convex_section(plane, inside) {
            polygon(&mut out, &poly, PALETTE[colour % PALETTE.len()], "0.15", name);
        }
        colour += 1;
    }
    for (name, e) in &scene.events {
        let Ok(u) = project_to_ball(e, &scene.shell) else {
            continue;
        };
        let u = u.coords();
        if (n.dot(u) - plane.offset).abs() > 0.01 {
            continue;
        }
        let (x, y) = to_svg(plane.e1.dot(u), plane.e2.dot(u));
        let _ = writeln!(
            out,
            "  <circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"#000000\"><title>{}</title></circle>",
            fmt(x),
            fmt(y),
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}
