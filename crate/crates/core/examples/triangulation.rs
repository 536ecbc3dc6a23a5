//! Closed-form triangulation from one noisy draw, and from exact counts.

use molloc::channel::{noise_free_measurements, simulate, ChannelParams};
use molloc::estimators::triangulate;
use molloc::geometry::{distance, AnchorSet, Point};
use molloc::seed::stream;

fn main() -> molloc::Result<()> {
    let anchors = AnchorSet::new(vec![
        Point::xy(0.0, 10e-6),
        Point::xy(-8.660254037844386e-6, -5e-6),
        Point::xy(8.660254037844386e-6, -5e-6),
        Point::xy(0.0, -10e-6),
    ])?;
    let source = Point::xy(1e-6, 2e-6);
    let p = ChannelParams::default();

    let exact = noise_free_measurements(&anchors, &source, &p)?;
    let est = triangulate(&anchors, &exact, &p)?;
    println!("noise-free: {:?}  error {:.2e} m", est.coords(), distance(&est, &source)?);

    let mut rng = stream(7);
    for q in [5e5, 5e6, 5e7] {
        let p = p.with_molecules(q);
        let m = simulate(&anchors, &source, &p, &mut rng)?;
        let est = triangulate(&anchors, &m, &p)?;
        println!("Q = {q:.0e}: counts {:?}  error {:.3e} m", m.counts(), distance(&est, &source)?);
    }
    Ok(())
}
