//! Convex polygons in the plane as hulls and halfplane lists.

/// `a·x ≤ b` with `|a| = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Halfplane {
    pub a: [f64; 2],
    pub b: f64,
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise hull vertices (Andrew's monotone chain), collinear
/// points dropped.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));
    pts.dedup_by(|p, q| (p[0] - q[0]).abs() <= 1e-15 && (p[1] - q[1]).abs() <= 1e-15);
    if pts.len() <= 2 {
        return pts;
    }
    let eps = 1e-14;
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub fn polygon_area(hull: &[[f64; 2]]) -> f64 {
    let n = hull.len();
    if n < 3 {
        return 0.0;
    }
    (0..n)
        .map(|i| {
            let (p, q) = (hull[i], hull[(i + 1) % n]);
            p[0] * q[1] - p[1] * q[0]
        })
        .sum::<f64>()
        * 0.5
}

/// Halfplanes whose intersection is `conv(points)`.
///
/// A segment gives its two normal halfplanes (an equality) plus end caps;
/// a single point gives four axis halfplanes.
pub fn halfplanes(points: &[[f64; 2]]) -> Vec<Halfplane> {
    let hull = convex_hull(points);
    let hp = |a: [f64; 2], p: [f64; 2]| Halfplane {
        a,
        b: a[0] * p[0] + a[1] * p[1],
    };
    match hull.len() {
        0 => vec![],
        1 => {
            let p = hull[0];
            vec![
                hp([1.0, 0.0], p),
                hp([-1.0, 0.0], p),
                hp([0.0, 1.0], p),
                hp([0.0, -1.0], p),
            ]
        }
        2 => {
            let (p, q) = (hull[0], hull[1]);
            let len = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
            let d = [(q[0] - p[0]) / len, (q[1] - p[1]) / len];
            let n = [-d[1], d[0]];
            vec![
                hp(n, p),
                hp([-n[0], -n[1]], p),
                hp(d, q),
                hp([-d[0], -d[1]], p),
            ]
        }
        k => (0..k)
            .map(|i| {
                let (p, q) = (hull[i], hull[(i + 1) % k]);
                let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
                let len = (dx * dx + dy * dy).sqrt();
                hp([dy / len, -dx / len], p)
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_hull_and_facets() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5], [0.5, 0.0]];
        let hull = convex_hull(&pts);
        assert_eq!(hull.len(), 4);
        assert!((polygon_area(&hull) - 1.0).abs() < 1e-15);
        let hs = halfplanes(&pts);
        assert_eq!(hs.len(), 4);
        for h in &hs {
            // the center is inside with slack 1/2
            assert!((h.b - (h.a[0] * 0.5 + h.a[1] * 0.5) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_hulls() {
        let seg = halfplanes(&[[0.0, 0.0], [1.0, 1.0], [0.5, 0.5]]);
        assert_eq!(seg.len(), 4);
        let inside = |h: &Halfplane, p: [f64; 2]| h.a[0] * p[0] + h.a[1] * p[1] <= h.b + 1e-12;
        assert!(seg.iter().all(|h| inside(h, [0.25, 0.25])));
        assert!(!seg.iter().all(|h| inside(h, [0.25, 0.3])));
        assert!(!seg.iter().all(|h| inside(h, [1.1, 1.1])));
        let pt = halfplanes(&[[0.5, 0.5], [0.5, 0.5]]);
        assert_eq!(pt.len(), 4);
    }
}
