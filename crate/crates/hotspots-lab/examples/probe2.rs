//! Scratch probe: sampled directional-derivative minima for acute triangles.

use hotspots_lab::assembly::DirichletSides;
use hotspots_lab::eigensolve::{solve_modes, DEFAULT_SEED};
use hotspots_lab::geometry::{canonicalize, Point, Side, Triangle};
use hotspots_lab::spectral::{directional_monotonicity, Field};

fn main() {
    let cases = [
        (0.45, 1.1),
        (0.3, 0.9),
        (0.25, 1.05),
        (0.5, 0.95),
        (0.35, 1.3),
    ];
    for &(x, y) in &cases {
        let raw =
            Triangle::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(x, y)).unwrap();
        let (t, _) = canonicalize(&raw).unwrap();
        for level in [5u32, 6, 7] {
            let (mesh, modes) =
                solve_modes(&t, level, 2, DirichletSides::NEUMANN, 1, DEFAULT_SEED).unwrap();
            let (field, _) = Field::oriented(&mesh, modes[0].values.clone(), 1e-4);
            let (a, b) = t.side_endpoints(Side::Short);
            let opp = t.z3;
            let mut dir = (b - a).unit().rot90();
            if dir.dot(opp - a) < 0.0 {
                dir = dir * -1.0;
            }
            let rep = directional_monotonicity(&field, dir, 0.0);
            let gs = field.gradient_sup();
            println!(
                "apex=({x},{y}) level={level}: min={:+.3e} min/sup_grad={:+.3e} at ({:.3},{:.3}) sup_grad={:.3}",
                rep.min,
                rep.min / gs,
                rep.min_location.x,
                rep.min_location.y,
                gs
            );
        }
    }
}
