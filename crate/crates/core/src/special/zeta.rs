/// Riemann zeta function for real `s != 1` via Euler–Maclaurin summation.
///
/// Used for the near-neighbour weight of the singular trapezoid sums: the
/// lattice sum `h * sum_{k>=1} (kh)^(-s)` overshoots the integral by
/// `zeta(s) h^(1-s)`.
pub fn riemann_zeta(s: f64) -> f64 {
    assert!(s != 1.0, "zeta has a pole at s = 1");
    const N: usize = 16;
    // B_2k / (2k)!
    const B_OVER_FACT: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
        -691.0 / 1_307_674_368_000.0,
        1.0 / 74_724_249_600.0,
    ];
    let n = N as f64;
    let mut sum: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // Rising factorial s (s+1) ... (s + 2k - 2) times N^(-s-2k+1).
    let mut rising = s;
    let mut power = n.powf(-s - 1.0);
    for (k, coeff) in B_OVER_FACT.iter().enumerate() {
        sum += coeff * rising * power;
        let j = 2.0 * k as f64;
        rising *= (s + j + 1.0) * (s + j + 2.0);
        power /= n * n;
    }
    sum
}
