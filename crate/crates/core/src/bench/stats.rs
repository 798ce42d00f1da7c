use serde::{Deserialize, Serialize};

/// Statistics over successful samples. All fields are `None` for no input.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    /// Sample standard deviation; zero for a single value.
    pub stddev: Option<f64>,
    pub median: Option<f64>,
}

pub fn summarize(values: &[f64]) -> Summary {
    if values.is_empty() {
        return Summary::default();
    }
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let stddev = if n > 1 {
        (sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let mean = mean.clamp(sorted[0], sorted[n - 1]);
    Summary {
        count: n,
        mean: Some(mean),
        min: Some(sorted[0]),
        max: Some(sorted[n - 1]),
        stddev: Some(stddev),
        median: Some(median),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_two_three() {
        let s = summarize(&[3.0, 1.0, 2.0]);
        assert_eq!(s.mean, Some(2.0));
        assert_eq!(s.min, Some(1.0));
        assert_eq!(s.max, Some(3.0));
        assert_eq!(s.median, Some(2.0));
        assert_eq!(s.stddev, Some(1.0));
    }

    #[test]
    fn single_sample() {
        let s = summarize(&[7.5]);
        assert_eq!((s.mean, s.min, s.max), (Some(7.5), Some(7.5), Some(7.5)));
    }

    #[test]
    fn empty_is_not_an_error() {
        assert_eq!(summarize(&[]), Summary::default());
    }
}
