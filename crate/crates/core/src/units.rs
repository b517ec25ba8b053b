//! Conversions between display units (nm, ps, GPa) and SI.

pub const NM: f64 = 1e-9;
pub const PS: f64 = 1e-12;
pub const GPA: f64 = 1e9;
/// 1 nm/ps in m/s.
pub const NM_PER_PS: f64 = 1000.0;

pub fn nm_to_m(x: f64) -> f64 {
    x * NM
}

pub fn m_to_nm(x: f64) -> f64 {
    x / NM
}

pub fn ps_to_s(t: f64) -> f64 {
    t * PS
}

pub fn s_to_ps(t: f64) -> f64 {
    t / PS
}

pub fn gpa_to_pa(p: f64) -> f64 {
    p * GPA
}

pub fn pa_to_gpa(p: f64) -> f64 {
    p / GPA
}

pub fn nm_per_ps_to_m_per_s(v: f64) -> f64 {
    v * NM_PER_PS
}

pub fn m_per_s_to_nm_per_ps(v: f64) -> f64 {
    v / NM_PER_PS
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn velocity_conversion() {
        assert_eq!(NM_PER_PS, 1000.0);
        assert_eq!(nm_per_ps_to_m_per_s(1.8), 1800.0);
        assert_eq!(m_per_s_to_nm_per_ps(720.0), 0.72);
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 4.0 * f64::EPSILON * b.abs()
    }

    #[test]
    fn display_units() {
        assert!(close(nm_to_m(50.0), 5e-8));
        assert!(close(s_to_ps(2.5e-12), 2.5));
        assert!(close(pa_to_gpa(5.314e9), 5.314));
        assert!(close(m_to_nm(1.1719e-9), 1.1719));
        assert!(close(NM / PS, NM_PER_PS));
    }

    proptest! {
        #[test]
        fn round_trips(x in -1e6f64..1e6) {
            prop_assert!((m_to_nm(nm_to_m(x)) - x).abs() <= 1e-12 * x.abs().max(1.0));
            prop_assert!((s_to_ps(ps_to_s(x)) - x).abs() <= 1e-12 * x.abs().max(1.0));
            prop_assert!((pa_to_gpa(gpa_to_pa(x)) - x).abs() <= 1e-12 * x.abs().max(1.0));
            prop_assert!((m_per_s_to_nm_per_ps(nm_per_ps_to_m_per_s(x)) - x).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }
}
