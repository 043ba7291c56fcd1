use crate::symbolic::word::Digit;

/// A replayable infinite (or long) digit sequence. Each call to `digits` starts
/// again from the first digit and yields the same sequence.
pub trait DigitSource {
    fn digits(&self) -> Box<dyn Iterator<Item = Digit> + '_>;

    /// The first `n` digits, or fewer if the source is finite.
    fn prefix(&self, n: usize) -> Vec<Digit> {
        self.digits().take(n).collect()
    }
}

/// The periodic point w^∞.
#[derive(Clone, Debug)]
pub struct Periodic(pub Vec<Digit>);

impl DigitSource for Periodic {
    fn digits(&self) -> Box<dyn Iterator<Item = Digit> + '_> {
        Box::new(self.0.iter().copied().cycle())
    }
}

/// A finite digit sequence.
#[derive(Clone, Debug)]
pub struct Finite(pub Vec<Digit>);

impl DigitSource for Finite {
    fn digits(&self) -> Box<dyn Iterator<Item = Digit> + '_> {
        Box::new(self.0.iter().copied())
    }
}
