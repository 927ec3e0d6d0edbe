//! Result rows and deterministic CSV/JSON serialization.

use serde::Serialize;

use polarfade::metrics::ErrorStats;

pub const CSV_HEADER: &str = "N,B,S,snr_db,epsilon,method,seed,trials,rate,capacity,gap,fer,fer_ci95,ber,ber_ci95,frame_errors,bit_errors,info_bits,seconds";

/// One aggregate per sweep point. Field order is the CSV column order.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "B")]
    pub b: usize,
    #[serde(rename = "S")]
    pub s: usize,
    pub snr_db: f64,
    pub epsilon: f64,
    pub method: String,
    pub seed: u64,
    pub trials: u64,
    pub rate: f64,
    pub capacity: f64,
    pub gap: f64,
    pub fer: f64,
    pub fer_ci95: f64,
    pub ber: f64,
    pub ber_ci95: f64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub info_bits: u64,
    pub seconds: f64,
}

impl ResultRow {
    /// Plan-construction failure: echo the point, zero everything else,
    /// so a sweep keeps its full row count.
    pub fn error_row(
        n: usize,
        b: usize,
        s: usize,
        snr_db: f64,
        epsilon: f64,
        method: &str,
        seed: u64,
        trials: u64,
    ) -> Self {
        ResultRow {
            n,
            b,
            s,
            snr_db,
            epsilon,
            method: method.to_string(),
            seed,
            trials,
            rate: 0.0,
            capacity: 0.0,
            gap: 0.0,
            fer: 0.0,
            fer_ci95: 0.0,
            ber: 0.0,
            ber_ci95: 0.0,
            frame_errors: 0,
            bit_errors: 0,
            info_bits: 0,
            seconds: 0.0,
        }
    }

    pub fn fill_stats(&mut self, stats: &ErrorStats) {
        self.fer = stats.fer();
        self.fer_ci95 = stats.fer_ci95();
        self.ber = stats.ber();
        self.ber_ci95 = stats.ber_ci95();
        self.frame_errors = stats.frame_errors;
        self.bit_errors = stats.bit_errors;
        self.info_bits = stats.info_bits;
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.b,
            self.s,
            fmt(self.snr_db),
            fmt(self.epsilon),
            self.method,
            self.seed,
            self.trials,
            fmt(self.rate),
            fmt(self.capacity),
            fmt(self.gap),
            fmt(self.fer),
            fmt(self.fer_ci95),
            fmt(self.ber),
            fmt(self.ber_ci95),
            self.frame_errors,
            self.bit_errors,
            self.info_bits,
            fmt(self.seconds)
        )
    }
}

// Shortest round-trip decimal, '.' separator, no negative zero. Stable
// across runs, which is what makes CSV output byte-comparable.
fn fmt(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x}")
}

pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}

pub fn to_json(rows: &[ResultRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultRow {
        let mut row = ResultRow::error_row(64, 16, 2, 0.5, 0.1, "bound", 3, 10);
        row.rate = 0.5;
        row.capacity = 0.75;
        row.gap = 0.25;
        row.fill_stats(&ErrorStats {
            frames: 10,
            frame_errors: 1,
            info_bits: 500,
            bit_errors: 2,
        });
        row
    }

    #[test]
    fn csv_layout_is_stable() {
        let text = to_csv(&[sample()]);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
        assert!(row.starts_with("64,16,2,0.5,0.1,bound,3,10,0.5,0.75,0.25,0.1,"));
        assert!(text.ends_with('\n'));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn negative_zero_never_printed() {
        assert_eq!(fmt(-0.0), "0");
        assert_eq!(fmt(0.0), "0");
        assert_eq!(fmt(-1.5), "-1.5");
    }

    #[test]
    fn json_matches_field_names() {
        let text = to_json(&[sample()]);
        assert!(text.contains("\"N\": 64"));
        assert!(text.contains("\"fer\": 0.1"));
        assert!(text.ends_with('\n'));
    }
}
