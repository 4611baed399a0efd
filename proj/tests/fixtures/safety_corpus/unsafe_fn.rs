/// Reads one byte. The caller guarantees `p` is valid.
pub unsafe fn read_byte(p: *const u8) -> u8 {
    let value = *p;
    value
}

pub fn describe() -> &'static str {
    "unsafe { not real } and *const decoys stay inert"
}
