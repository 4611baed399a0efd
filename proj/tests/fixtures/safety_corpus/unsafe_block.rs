pub fn copy_three(src: *const i32, dst: *mut i32) {
    unsafe {
        *dst = *src;
        *dst.add(1) = *src.add(1);
        *dst.add(2) = *src.add(2);
    }
}
