pub fn wrap(i: usize, n: usize) -> usize {
    i % n
}

pub unsafe fn bump(p: *mut i32) {
    *p += 1;
    *p *= 2;
}
