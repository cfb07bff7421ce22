//! Summary statistics for experiment tables.

use serde::Serialize;

/// Mean, sample standard deviation, min, median and max of one column.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl Summary {
    /// `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        Some(Summary {
            count: n,
            mean,
            std,
            min: sorted[0],
            median,
            max: sorted[n - 1],
        })
    }
}

/// Minutes used for the travel-time gap counts.
pub const GAP_MINUTES: [u32; 5] = [10, 15, 30, 45, 60];

/// Distribution of archive sizes with a `5+` bucket.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SizeHistogram {
    #[serde(rename = "1")]
    pub one: usize,
    #[serde(rename = "2")]
    pub two: usize,
    #[serde(rename = "3")]
    pub three: usize,
    #[serde(rename = "4")]
    pub four: usize,
    #[serde(rename = "5+")]
    pub five_plus: usize,
}

impl SizeHistogram {
    pub fn add(&mut self, size: usize) {
        match size {
            0 | 1 => self.one += 1,
            2 => self.two += 1,
            3 => self.three += 1,
            4 => self.four += 1,
            _ => self.five_plus += 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_known_sample() {
        let s = Summary::of(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert_eq!(s.mean, 5.0);
        assert!((s.std - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert_eq!((s.min, s.median, s.max), (2.0, 4.5, 9.0));
        assert!(Summary::of(&[]).is_none());
    }

    #[test]
    fn histogram_buckets() {
        let mut h = SizeHistogram::default();
        for s in [1, 2, 2, 3, 4, 5, 9] {
            h.add(s);
        }
        assert_eq!((h.one, h.two, h.three, h.four, h.five_plus), (1, 2, 1, 1, 2));
        let json = serde_json::to_string(&h).unwrap();
        assert_eq!(json, r#"{"1":1,"2":2,"3":1,"4":1,"5+":2}"#);
    }
}
