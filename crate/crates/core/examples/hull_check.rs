//! Barycentric coordinates and the open-hull test the estimators rely on.

use molloc::geometry::{barycentric_coordinates, in_open_convex_hull, AnchorSet, Point};

fn main() -> molloc::Result<()> {
    let anchors = AnchorSet::new(vec![Point::xy(0.0, 10e-6), Point::xy(-8.66e-6, -5e-6), Point::xy(8.66e-6, -5e-6)])?;
    let probes = [Point::xy(1e-6, 2e-6), Point::xy(0.0, 0.0), Point::xy(0.0, -5e-6), Point::xy(20e-6, 0.0)];
    for y in &probes {
        let inside = in_open_convex_hull(y, &anchors)?;
        let beta = barycentric_coordinates(y, &anchors)
            .map(|b| format!("{:.4?}", b.beta))
            .unwrap_or_else(|e| format!("({e})"));
        println!("{:?}  inside: {inside:<5}  β = {beta}", y.coords());
    }

    let tet = AnchorSet::new(vec![
        Point::xyz(0.0, 0.0, 0.0),
        Point::xyz(1e-5, 0.0, 0.0),
        Point::xyz(0.0, 1e-5, 0.0),
        Point::xyz(0.0, 0.0, 1e-5),
    ])?;
    println!("3-D centroid inside: {}", in_open_convex_hull(&tet.centroid(), &tet)?);
    Ok(())
}
