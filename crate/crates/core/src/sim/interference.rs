use rand::Rng;

/// Shape of the interference sequence added at the receiver and known in
/// advance to its transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterferenceKind {
    Zero,
    /// Every entry equals the amplitude.
    Constant,
    /// I.i.d. uniform on `[−a, a]`.
    Uniform,
    /// `±a`, with the sign flipping with the transmitted message, the
    /// entry index and the channel use.
    SignFlip,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interference {
    pub kind: InterferenceKind,
    pub amplitude: f64,
}

impl Interference {
    pub const ZERO: Self = Self {
        kind: InterferenceKind::Zero,
        amplitude: 0.0,
    };

    pub fn new(kind: InterferenceKind, amplitude: f64) -> Self {
        Self { kind, amplitude }
    }

    /// Fills `out` with one channel use of interference. `message` is the
    /// transmitter's own message index on each subchannel.
    pub(crate) fn fill<R: Rng>(&self, rng: &mut R, trial: u64, message: &[u32], out: &mut [f64]) {
        let a = self.amplitude;
        for (l, s) in out.iter_mut().enumerate() {
            *s = match self.kind {
                InterferenceKind::Zero => 0.0,
                InterferenceKind::Constant => a,
                InterferenceKind::Uniform => a * (2.0 * rng.random::<f64>() - 1.0),
                InterferenceKind::SignFlip => {
                    let m = message.get(l).copied().unwrap_or(0) as u64;
                    if (m + l as u64 + trial).is_multiple_of(2) {
                        a
                    } else {
                        -a
                    }
                }
            };
        }
    }
}
