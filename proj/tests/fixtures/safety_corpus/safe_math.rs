// Small helpers, entirely safe.

pub fn add(a: i32, b: i32) -> i32 {
    a + b
}

pub fn scaled_sum(values: &[i32], factor: i32) -> i32 {
    let mut total = 0;
    for v in values {
        total += v * factor;
    }
    total
}
