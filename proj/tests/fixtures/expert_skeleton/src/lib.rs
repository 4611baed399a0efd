pub mod bits;
pub mod nfa;
