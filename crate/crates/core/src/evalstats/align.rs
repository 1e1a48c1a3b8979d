use serde::{Deserialize, Serialize};

/// Per-sentence alignment counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ErrorCounts {
    pub correct: u64,
    pub substitutions: u64,
    pub insertions: u64,
    pub deletions: u64,
}

impl ErrorCounts {
    pub fn new(correct: u64, substitutions: u64, insertions: u64, deletions: u64) -> Self {
        Self {
            correct,
            substitutions,
            insertions,
            deletions,
        }
    }

    pub fn errors(&self) -> u64 {
        self.substitutions + self.insertions + self.deletions
    }

    pub fn ref_len(&self) -> u64 {
        self.correct + self.substitutions + self.deletions
    }

    pub fn hyp_len(&self) -> u64 {
        self.correct + self.substitutions + self.insertions
    }
}

impl std::ops::Add for ErrorCounts {
    type Output = ErrorCounts;

    fn add(self, o: ErrorCounts) -> ErrorCounts {
        ErrorCounts::new(
            self.correct + o.correct,
            self.substitutions + o.substitutions,
            self.insertions + o.insertions,
            self.deletions + o.deletions,
        )
    }
}

impl std::iter::Sum for ErrorCounts {
    fn sum<I: Iterator<Item = ErrorCounts>>(iter: I) -> Self {
        iter.fold(ErrorCounts::default(), |a, b| a + b)
    }
}

/// Unit-cost Levenshtein alignment of `hyp` against `reference`.
///
/// The backtrace prefers, on ties, the diagonal (match or substitution), then
/// deletion, then insertion, so the decomposition is deterministic.
pub fn align_wer<T: PartialEq>(reference: &[T], hyp: &[T]) -> ErrorCounts {
    let (n, m) = (reference.len(), hyp.len());
    let width = m + 1;
    let mut cost = vec![0u32; (n + 1) * width];
    for (j, c) in cost.iter_mut().take(width).enumerate() {
        *c = j as u32;
    }
    for i in 1..=n {
        cost[i * width] = i as u32;
        for j in 1..=m {
            let sub = cost[(i - 1) * width + j - 1] + u32::from(reference[i - 1] != hyp[j - 1]);
            let del = cost[(i - 1) * width + j] + 1;
            let ins = cost[i * width + j - 1] + 1;
            cost[i * width + j] = sub.min(del).min(ins);
        }
    }

    let mut counts = ErrorCounts::default();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = cost[i * width + j];
        if i > 0 && j > 0 {
            let same = reference[i - 1] == hyp[j - 1];
            if cost[(i - 1) * width + j - 1] + u32::from(!same) == here {
                if same {
                    counts.correct += 1;
                } else {
                    counts.substitutions += 1;
                }
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && cost[(i - 1) * width + j] + 1 == here {
            counts.deletions += 1;
            i -= 1;
        } else {
            counts.insertions += 1;
            j -= 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn identical() {
        let r = words("the cat sat");
        assert_eq!(align_wer(&r, &r), ErrorCounts::new(3, 0, 0, 0));
    }

    #[test]
    fn empty_sides() {
        assert_eq!(align_wer(&words("a b c"), &[]), ErrorCounts::new(0, 0, 0, 3));
        assert_eq!(align_wer(&[], &words("a b")), ErrorCounts::new(0, 0, 2, 0));
        assert_eq!(align_wer::<&str>(&[], &[]), ErrorCounts::default());
    }

    #[test]
    fn mixed_errors() {
        let c = align_wer(&words("a b c"), &words("a x c d"));
        assert_eq!(c, ErrorCounts::new(2, 1, 1, 0));
        assert_eq!(c.errors() as f64 / c.ref_len() as f64, 2.0 / 3.0);
    }

    #[test]
    fn ties_prefer_substitution() {
        assert_eq!(align_wer(&words("a b"), &words("b c")), ErrorCounts::new(0, 2, 0, 0));
    }
}
