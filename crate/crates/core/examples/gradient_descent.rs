//! Least-squares gradient descent on one draw; prints the error per iteration.

use molloc::channel::{simulate, ChannelParams};
use molloc::estimators::{gradient_descent, GdOptions, StepRule};
use molloc::geometry::{distance, AnchorSet, Point};
use molloc::seed::stream;

fn main() -> molloc::Result<()> {
    let anchors = AnchorSet::new(vec![
        Point::xy(0.0, 10e-6),
        Point::xy(-8.660254037844386e-6, -5e-6),
        Point::xy(8.660254037844386e-6, -5e-6),
    ])?;
    let source = Point::xy(1e-6, 2e-6);
    let p = ChannelParams::default().with_molecules(5e6);
    let m = simulate(&anchors, &source, &p, &mut stream(3))?;

    for rule in [StepRule::BarzilaiBorwein, StepRule::Fixed] {
        let t = gradient_descent(&anchors, &m, &p, &GdOptions { step_rule: rule, ..GdOptions::default() })?;
        println!("{rule:?}: {:?} after {} iterations", t.stop, t.iterations_used);
        for (k, (y, j)) in t.iterates.iter().zip(&t.costs).enumerate().step_by(4).take(6) {
            println!("  {k:>3}  J = {j:.6e}  |y - y*|² = {:.4e} m²", distance(y, &source)?.powi(2));
        }
        let j = t.costs.last().unwrap();
        println!("  end  J = {j:.6e}  |y - y*|² = {:.4e} m²", distance(t.last(), &source)?.powi(2));
    }
    Ok(())
}
