//! Scratch probe: census + qualitative checks on solved modes.

use hotspots_lab::assembly::DirichletSides;
use hotspots_lab::eigensolve::solve_modes;
use hotspots_lab::geometry::{canonicalize, classify, Point, Triangle};
use hotspots_lab::spectral::{
    critical_point_census, fold_asymmetry, nodal_chains, vertex_report, CensusParams, Field,
};

fn main() {
    let cases = [
        ("acute scalene", Triangle::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.42, 1.05)).unwrap()),
        ("near equilateral", Triangle::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.47, 0.89)).unwrap()),
        ("right isosceles", Triangle::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)).unwrap()),
        ("obtuse scalene", Triangle::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.15, 0.35)).unwrap()),
        ("sub-equilateral tall", Triangle::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, 1.2)).unwrap()),
        ("super-equilateral flat", Triangle::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, 0.6)).unwrap()),
    ];
    for (name, t) in cases {
        let (tri, _sim) = canonicalize(&t).unwrap();
        
        let class = classify(&tri);
        for level in [4u32, 5, 6] {
            let (mesh, modes) =
                solve_modes(&tri, level, 2, DirichletSides::NEUMANN, 2, 0x5EED).unwrap();
            let (field, _) = Field::oriented(&mesh, modes[0].values.clone(), 1e-4);
            let census = critical_point_census(&field, &CensusParams::default());
            let nodal = nodal_chains(&field);
            let vr = vertex_report(&field, 1e-4);
            let fold = fold_asymmetry(&field, 0, 16);
            println!(
                "{name} L{level} {:?}/{:?}: mu2={:.6} census S{} M{} m{} D{} vex{} | pts {:?} | nodal chains {} connects {:?} | verts {:?} signs {:?} ord {} | fold rel {:.3e}",
                class.angle_class, class.symmetry_class,
                modes[0].eigenvalue,
                census.saddle_count, census.max_count, census.min_count, census.degenerate_count,
                census.vertex_excluded,
                census.points.iter().map(|p| (format!("{:.4},{:.4}", p.location.x, p.location.y), p.kind, p.on_side)).collect::<Vec<_>>(),
                nodal.chains.len(), nodal.connects,
                vr.values, vr.signs, vr.ordering_holds,
                fold.sup_antisym_rel,
            );
        }
    }
}
