//! Minimum enclosing balls of small point sets in `R^d`, `d <= 3`.

/// Relative slack when testing membership of a point in a computed ball.
const CONTAINS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: [f64; 3],
    pub radius: f64,
}

impl Ball {
    fn empty() -> Self {
        Ball {
            center: [0.0; 3],
            radius: -1.0,
        }
    }

    pub fn contains(&self, p: &[f64; 3]) -> bool {
        self.radius >= 0.0 && dist(&self.center, p) <= self.radius * (1.0 + CONTAINS_SLACK) + CONTAINS_SLACK
    }
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Smallest closed ball containing `points` (Welzl's move-to-front recursion).
///
/// Lower-dimensional inputs are embedded in `R^3` by zero padding, which does
/// not change the enclosing ball.
pub fn min_enclosing_ball(points: &[[f64; 3]]) -> Ball {
    let mut pts = points.to_vec();
    let mut support = Vec::with_capacity(4);
    welzl(&mut pts, points.len(), &mut support)
}

fn welzl(pts: &mut [[f64; 3]], n: usize, support: &mut Vec<[f64; 3]>) -> Ball {
    let mut ball = ball_on_boundary(support);
    if support.len() == 4 {
        return ball;
    }
    for i in 0..n {
        let p = pts[i];
        if !ball.contains(&p) {
            support.push(p);
            ball = welzl(pts, i, support);
            support.pop();
            // move-to-front keeps points that forced a recomputation early
            pts[..=i].rotate_right(1);
        }
    }
    ball
}

/// Smallest ball with every point of `support` on its boundary, falling
/// back to the best ball through a subset when the set is affinely dependent.
fn ball_on_boundary(support: &[[f64; 3]]) -> Ball {
    match support.len() {
        0 => Ball::empty(),
        1 => Ball {
            center: support[0],
            radius: 0.0,
        },
        2 => {
            let c = [
                (support[0][0] + support[1][0]) / 2.0,
                (support[0][1] + support[1][1]) / 2.0,
                (support[0][2] + support[1][2]) / 2.0,
            ];
            Ball {
                center: c,
                radius: dist(&c, &support[0]),
            }
        }
        _ => circumball(support).unwrap_or_else(|| {
            (0..support.len())
                .map(|skip| {
                    let rest: Vec<[f64; 3]> = support
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != skip)
                        .map(|(_, p)| *p)
                        .collect();
                    ball_on_boundary(&rest)
                })
                .filter(|b| support.iter().all(|p| b.contains(p)))
                .min_by(|a, b| a.radius.total_cmp(&b.radius))
                .unwrap_or_else(Ball::empty)
        }),
    }
}

/// Circumscribed ball of affinely independent points within their affine hull.
fn circumball(support: &[[f64; 3]]) -> Option<Ball> {
    let p0 = support[0];
    let a: Vec<[f64; 3]> = support[1..].iter().map(|p| sub(p, &p0)).collect();
    let m = a.len();
    // Gram system  2 G lambda = |a_j|^2,  centre = p0 + sum lambda_j a_j
    let mut g = [[0.0f64; 4]; 3];
    let scale = a.iter().map(|v| dot(v, v)).fold(0.0, f64::max);
    for j in 0..m {
        for l in 0..m {
            g[j][l] = 2.0 * dot(&a[j], &a[l]);
        }
        g[j][m] = dot(&a[j], &a[j]);
    }
    let lambda = solve(&mut g, m, scale)?;
    let mut center = p0;
    for j in 0..m {
        for c in 0..3 {
            center[c] += lambda[j] * a[j][c];
        }
    }
    let radius = support.iter().map(|p| dist(&center, p)).fold(0.0, f64::max);
    Some(Ball { center, radius })
}

/// Gaussian elimination with partial pivoting on an `m x (m+1)` augmented system.
#[allow(clippy::needless_range_loop)]
fn solve(g: &mut [[f64; 4]; 3], m: usize, scale: f64) -> Option<[f64; 3]> {
    let eps = 1e-12 * scale.max(f64::MIN_POSITIVE);
    for col in 0..m {
        let piv = (col..m).max_by(|&x, &y| g[x][col].abs().total_cmp(&g[y][col].abs()))?;
        if g[piv][col].abs() <= eps {
            return None;
        }
        g.swap(col, piv);
        for row in 0..m {
            if row != col {
                let f = g[row][col] / g[col][col];
                for c in col..=m {
                    g[row][c] -= f * g[col][c];
                }
            }
        }
    }
    let mut x = [0.0; 3];
    for i in 0..m {
        x[i] = g[i][m] / g[i][i];
    }
    Some(x)
}
