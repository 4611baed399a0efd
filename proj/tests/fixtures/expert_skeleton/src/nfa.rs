pub struct Nfa {
    states: usize,
}

impl Nfa {
    pub fn new(states: usize) -> Nfa {
        Nfa { states }
    }

    pub fn len(&self) -> usize {
        self.states
    }
}
