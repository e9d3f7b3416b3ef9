//! Counter-based random streams.
//!
//! Every `(seed, M, trial)` triple owns a Philox4x32-10 stream: the seed
//! is the key and `(block, trial, M)` is the counter, so a trial's draws
//! never depend on which worker ran it or what ran before.

use rand::RngCore;

const MUL0: u32 = 0xD251_1F53;
const MUL1: u32 = 0xCD9E_8D57;
const WEYL0: u32 = 0x9E37_79B9;
const WEYL1: u32 = 0xBB67_AE85;

#[inline(always)]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = u64::from(a) * u64::from(b);
    ((p >> 32) as u32, p as u32)
}

/// The Philox4x32 bijection with 10 rounds.
#[inline]
pub fn philox4x32_10(mut ctr: [u32; 4], mut key: [u32; 2]) -> [u32; 4] {
    for round in 0..10 {
        if round > 0 {
            key[0] = key[0].wrapping_add(WEYL0);
            key[1] = key[1].wrapping_add(WEYL1);
        }
        let (hi0, lo0) = mulhilo(MUL0, ctr[0]);
        let (hi1, lo1) = mulhilo(MUL1, ctr[2]);
        ctr = [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0];
    }
    ctr
}

/// Random stream for one trial.
#[derive(Debug, Clone)]
pub struct TrialStream {
    key: [u32; 2],
    counter: [u32; 4],
    buffer: [u32; 4],
    used: usize,
}

impl TrialStream {
    fn refill(&mut self) {
        self.buffer = philox4x32_10(self.counter, self.key);
        self.counter[0] = self.counter[0].wrapping_add(1);
        self.used = 0;
    }
}

impl RngCore for TrialStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        if self.used == 4 {
            self.refill();
        }
        let v = self.buffer[self.used];
        self.used += 1;
        v
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        let lo = u64::from(self.next_u32());
        let hi = u64::from(self.next_u32());
        (hi << 32) | lo
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(4) {
            let bytes = self.next_u32().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}

/// Independent, reproducible stream for trial `trial` at particle count `m`.
pub fn rng_stream_for(seed: u64, m: usize, trial: u64) -> TrialStream {
    TrialStream {
        key: [seed as u32, (seed >> 32) as u32],
        counter: [0, trial as u32, (trial >> 32) as u32, m as u32],
        buffer: [0; 4],
        used: 4,
    }
}
