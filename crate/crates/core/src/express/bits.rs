//! Small helpers for Boolean tuples.

pub fn hamming(x: &[usize], y: &[usize]) -> usize {
    x.iter().zip(y).filter(|(a, b)| a != b).count()
}

pub fn ones(x: &[usize]) -> usize {
    x.iter().filter(|&&a| a == 1).count()
}

pub fn xor(x: &[usize], y: &[usize]) -> Vec<usize> {
    x.iter().zip(y).map(|(a, b)| a ^ b).collect()
}

pub fn complement(x: &[usize]) -> Vec<usize> {
    x.iter().map(|a| 1 - a).collect()
}

/// Coordinates where `x` and `y` differ.
pub fn diff_coords(x: &[usize], y: &[usize]) -> Vec<usize> {
    (0..x.len()).filter(|&i| x[i] != y[i]).collect()
}

pub fn meet(x: &[usize], y: &[usize]) -> Vec<usize> {
    x.iter().zip(y).map(|(a, b)| *a.min(b)).collect()
}

pub fn join(x: &[usize], y: &[usize]) -> Vec<usize> {
    x.iter().zip(y).map(|(a, b)| *a.max(b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        let x = [0, 1, 1, 0];
        let y = [1, 1, 0, 0];
        assert_eq!(hamming(&x, &y), 2);
        assert_eq!(ones(&x), 2);
        assert_eq!(xor(&x, &y), vec![1, 0, 1, 0]);
        assert_eq!(complement(&x), vec![1, 0, 0, 1]);
        assert_eq!(diff_coords(&x, &y), vec![0, 2]);
        assert_eq!(meet(&x, &y), vec![0, 1, 0, 0]);
        assert_eq!(join(&x, &y), vec![1, 1, 1, 0]);
    }
}
