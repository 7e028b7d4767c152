use hotspots_lab::assembly::DirichletSides;
use hotspots_lab::eigensolve::solve_modes;
use hotspots_lab::geometry::{Point, Triangle};

fn main() {
    let t0 = [
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(0.0, 3.0f64.sqrt()),
    ];
    let t1 = [
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(0.35, 0.85),
    ];
    let mut prev: Option<Vec<f64>> = None;
    for k in 0..=32 {
        let t = k as f64 / 32.0;
        let v: Vec<Point> = (0..3)
            .map(|i| Point::new(
                (1.0 - t) * t0[i].x + t * t1[i].x,
                (1.0 - t) * t0[i].y + t * t1[i].y,
            ))
            .collect();
        let tri = Triangle::new(v[0], v[1], v[2]).unwrap();
        let (mesh, modes) =
            solve_modes(&tri, 5, 2, DirichletSides::NEUMANN, 2, 0x5EED).unwrap();
        let mut vals = modes[0].values.clone();
        let flip = match &prev {
            Some(p) => {
                let dot: f64 = vals.iter().zip(p.iter()).map(|(a, b)| a * b).sum();
                dot < 0.0
            }
            None => {
                // Orient the seed so the apex value is positive.
                let apex = mesh
                    .nodes
                    .iter()
                    .position(|q| q.dist(v[2]) < 1e-12)
                    .unwrap();
                vals[apex] < 0.0
            }
        };
        if flip {
            for x in vals.iter_mut() {
                *x = -*x;
            }
        }
        let at = |p: Point| -> f64 {
            let i = mesh
                .nodes
                .iter()
                .position(|q| q.dist(p) < 1e-10)
                .unwrap();
            vals[i]
        };
        let sup = vals.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let d31 = v[2].dist(v[0]);
        println!(
            "t={:7.5}  u(z1)={:+.6e}  u(z2)={:+.6e}  u(z3)={:+.6e}  sup={:.4}  gap={:.5}  |z3z1|={:.5}",
            t,
            at(v[0]),
            at(v[1]),
            at(v[2]),
            sup,
            modes[1].eigenvalue - modes[0].eigenvalue,
            d31,
        );
        prev = Some(vals);
    }
}
