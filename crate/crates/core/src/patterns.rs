//! Ten reference digit patterns `'0'` to `'9'`, drawn from a bold sans-serif
//! glyph set and stored as `.pattern` text.

use crate::mnist::{load_pattern, BinaryMask};

const SOURCES: [&str; 10] = [
    include_str!("../patterns/0.pattern"),
    include_str!("../patterns/1.pattern"),
    include_str!("../patterns/2.pattern"),
    include_str!("../patterns/3.pattern"),
    include_str!("../patterns/4.pattern"),
    include_str!("../patterns/5.pattern"),
    include_str!("../patterns/6.pattern"),
    include_str!("../patterns/7.pattern"),
    include_str!("../patterns/8.pattern"),
    include_str!("../patterns/9.pattern"),
];

/// Text of the built-in pattern for `digit`.
pub fn builtin_source(digit: usize) -> &'static str {
    SOURCES[digit]
}

/// Mask of the built-in pattern for `digit`. Panics if `digit > 9`.
pub fn builtin(digit: usize) -> BinaryMask {
    load_pattern(SOURCES[digit]).expect("built-in patterns are well formed")
}

pub fn builtin_all() -> Vec<BinaryMask> {
    (0..10).map(builtin).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::border::outer_borderline;

    #[test]
    fn all_patterns_trace() {
        for (d, mask) in builtin_all().iter().enumerate() {
            let curve = outer_borderline(mask).unwrap_or_else(|e| panic!("pattern {d}: {e}"));
            assert!(curve.len() > 30, "pattern {d} has a short borderline");
        }
    }
}
