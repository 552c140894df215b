use std::collections::HashMap;

/// Sentence BLEU-4 in [0, 100] with smoothing method 2: orders 2 to 4 use
/// (matches + 1) / (total + 1), unigrams are unsmoothed.
pub fn bleu4_tokens(reference: &[&str], candidate: &[&str]) -> f64 {
    if reference.is_empty() || candidate.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 1..=4 {
        let (matches, total) = clipped_matches(reference, candidate, n);
        let p = if n == 1 {
            if matches == 0 {
                return 0.0;
            }
            matches as f64 / total as f64
        } else {
            (matches + 1) as f64 / (total + 1) as f64
        };
        log_sum += p.ln();
    }
    let (c, r) = (candidate.len() as f64, reference.len() as f64);
    let bp = if c >= r { 1.0 } else { (1.0 - r / c).exp() };
    100.0 * bp * (log_sum / 4.0).exp()
}

fn clipped_matches(reference: &[&str], candidate: &[&str], n: usize) -> (usize, usize) {
    if candidate.len() < n {
        return (0, 0);
    }
    let mut ref_counts: HashMap<&[&str], usize> = HashMap::new();
    for g in reference.windows(n) {
        *ref_counts.entry(g).or_default() += 1;
    }
    let mut matches = 0;
    for g in candidate.windows(n) {
        if let Some(k) = ref_counts.get_mut(g) {
            if *k > 0 {
                *k -= 1;
                matches += 1;
            }
        }
    }
    (matches, candidate.len() + 1 - n)
}

/// Length of the longest common subsequence of two token sequences.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// ROUGE-L F-measure in [0, 100]: P = L/|cand|, R = L/|ref|,
/// F = (1 + beta^2) P R / (R + beta^2 P).
pub fn rouge_l_tokens(reference: &[&str], candidate: &[&str], beta: f64) -> f64 {
    if reference.is_empty() || candidate.is_empty() {
        return 0.0;
    }
    let l = lcs_len(reference, candidate);
    if l == 0 {
        return 0.0;
    }
    let p = l as f64 / candidate.len() as f64;
    let r = l as f64 / reference.len() as f64;
    let b2 = beta * beta;
    100.0 * (1.0 + b2) * p * r / (r + b2 * p)
}
