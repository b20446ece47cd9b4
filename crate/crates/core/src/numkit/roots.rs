use std::f64::consts::PI;

use num_complex::Complex64;

/// `e^{j2πk/n}` with `k` reduced modulo `n` before the angle is formed.
///
/// Quarter turns are returned exactly, so codes such as `[1, j, -1, -j]`
/// carry no rounding residue.
pub fn unit_root(k: i64, n: u64) -> Complex64 {
    assert!(n > 0, "unit_root with zero period");
    let r = k.rem_euclid(n as i64) as u64;
    if (4 * r).is_multiple_of(n) {
        return match 4 * r / n {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_quarters_and_wrapping() {
        assert_eq!(unit_root(1, 4), Complex64::new(0.0, 1.0));
        assert_eq!(unit_root(-1, 4), Complex64::new(0.0, -1.0));
        assert_eq!(unit_root(512, 1024), Complex64::new(-1.0, 0.0));
        assert_eq!(unit_root(1024 * 7 + 3, 1024), unit_root(3, 1024));
        let z = unit_root(3, 16);
        assert!((z - Complex64::from_polar(1.0, 2.0 * PI * 3.0 / 16.0)).norm() < 1e-15);
    }
}
