//! Fisher information and the Cramér-Rao bound as the source moves.

use molloc::channel::ChannelParams;
use molloc::crb::crb;
use molloc::geometry::{AnchorSet, Point};

fn main() -> molloc::Result<()> {
    let anchors = AnchorSet::new(vec![
        Point::xy(0.0, 10e-6),
        Point::xy(-8.660254037844386e-6, -5e-6),
        Point::xy(8.660254037844386e-6, -5e-6),
    ])?;
    let p = ChannelParams::default();

    let r = crb(&Point::xy(1e-6, 2e-6), &anchors, &p)?;
    println!("FIM (m⁻²):\n{:.4e}", r.fim.matrix);
    println!("CRB = {:.4e} m²  (rms {:.3e} m)", r.crb, r.crb.sqrt());

    println!("bound along the x axis:");
    for x in [-6e-6, -3e-6, 0.0, 3e-6, 6e-6] {
        let b = crb(&Point::xy(x, 0.0), &anchors, &p)?.crb;
        println!("  x = {x:+.1e} m  CRB = {b:.4e} m²");
    }
    Ok(())
}
