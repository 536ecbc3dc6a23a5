//! Concentration pulse at one receiver and the sampled peak count.

use molloc::channel::{alpha, cir, expected_peak_count, peak_pick, peak_time, sample_time_series, ChannelParams};
use molloc::seed::stream;

fn main() -> molloc::Result<()> {
    let p = ChannelParams::default();
    let d = 4e-6;
    let ts = peak_time(d, &p)?;
    println!("d = {d:.1e} m, t* = {ts:.4e} s, peak count λ = {:.2}", expected_peak_count(d, &p)?);
    println!("α = {:.4e} (counts·m³)", alpha(&p).linear().unwrap_or(0.0));

    for f in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let t = f * ts;
        println!("  t = {t:.3e} s  c = {:.4e} m⁻³", cir(d, t, &p)?);
    }

    // sample at T_s = t*/20 and pick the largest count
    let fine = ChannelParams { sampling_period: ts / 20.0, ..p.clone() };
    let series = sample_time_series(d, 100, &fine, &mut stream(1))?;
    let peak = peak_pick(&series)?;
    println!("sampled peak: k = {}, t = {:.3e} s, z = {}, mean = {:.2}", peak.k, peak.t, peak.z, peak.mean);

    for d in [1e-6, 2e-6, 5e-6, 10e-6, 20e-6] {
        println!("  λ({d:.0e} m) = {:.3}", expected_peak_count(d, &p)?);
    }
    Ok(())
}
