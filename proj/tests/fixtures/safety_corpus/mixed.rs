pub struct Raw {
    pub data: *mut *mut u8,
}

pub fn clear(raw: &mut Raw) {
    let limit = 2 * 3;
    unsafe {
        // the region opener above counts, this comment line does not

        let head = *raw.data;
        *head = limit as u8; }
}
