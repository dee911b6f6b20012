//! Counter-based deterministic random numbers.
//!
//! Scans and perturbation trials must be exactly reproducible across platforms
//! and trivially parallel, so instead of a stateful generator each draw is a
//! pure function of (seed, counter): the splitmix64 finalizer applied to the
//! counter stream. Statistical quality is far beyond what the sampling here
//! needs.

/// Stateless generator keyed by a seed; draw `i` is independent of all others.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { seed }
    }

    /// Raw 64-bit draw for the given counter.
    pub fn bits(&self, counter: u64) -> u64 {
        let mut z = self
            .seed
            .wrapping_add(counter.wrapping_mul(0x9E37_79B9_7F4A_7C15))
            .wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in [0, 1) with 53 random bits.
    pub fn unit_f64(&self, counter: u64) -> f64 {
        (self.bits(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in [lo, hi).
    pub fn range_f64(&self, counter: u64, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit_f64(counter)
    }

    /// Stream view: fixed stride per logical item (trial, sample) so items can
    /// be generated independently. `slot` indexes draws within the item.
    pub fn item(&self, item: u64) -> ItemRng {
        ItemRng { rng: *self, base: item.wrapping_mul(Self::STRIDE) }
    }

    const STRIDE: u64 = 1 << 20;
}

/// Per-item draw stream derived from a [`CounterRng`].
#[derive(Debug, Clone, Copy)]
pub struct ItemRng {
    rng: CounterRng,
    base: u64,
}

impl ItemRng {
    pub fn unit_f64(&self, slot: u64) -> f64 {
        self.rng.unit_f64(self.base.wrapping_add(slot))
    }

    pub fn range_f64(&self, slot: u64, lo: f64, hi: f64) -> f64 {
        self.rng.range_f64(self.base.wrapping_add(slot), lo, hi)
    }
}
