//! dB / linear conversions.

#[inline]
pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn lin_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// dBm to watts.
#[inline]
pub fn dbm_to_w(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Watts to dBm.
#[inline]
pub fn w_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        assert!((dbm_to_w(30.0) - 1.0).abs() < 1e-15);
        assert!((w_to_dbm(0.2) - 23.0103).abs() < 1e-4);
        assert!((lin_to_db(db_to_lin(-128.1)) + 128.1).abs() < 1e-12);
    }
}
