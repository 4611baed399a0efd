pub fn bitset_test(bits: &[u64], idx: usize) -> bool {
    bits[idx / 64] & (1 << (idx % 64)) != 0
}

pub fn bitset_get_fast(bits: &[u64], idx: usize) -> bool {
    bitset_test(bits, idx)
}
