// unsafe { *p = 0; } stays a comment
/* nested /* block */ with unsafe fn inside */
pub fn quoted() -> String {
    let a = "unsafe { *q }";
    let b = 'u';
    format!("{}{}", a, b)
}
// *mut T in prose, notes about fixups live elsewhere
