//! Throughput tracking for the word normalization core: random 10⁴-letter
//! words over a few diagram shapes. Run with `cargo bench -p rab-core`.

use std::time::Instant;

use rab_core::diagram::{Diagram, TypeIndex};
use rab_core::words::{self, Letter, Parameters, Word};

fn xorshift(state: &mut u64) -> u64 {
    *state ^= *state << 13;
    *state ^= *state >> 7;
    *state ^= *state << 17;
    *state
}

fn random_letters(d: &Diagram, p: &Parameters, len: usize, seed: u64) -> Vec<Letter> {
    let mut s = seed;
    (0..len)
        .map(|_| {
            let ty = TypeIndex((xorshift(&mut s) % d.rank() as u64) as u8);
            let color = (xorshift(&mut s) % (p.q(ty) as u64 - 1) + 1) as u16;
            Letter::new(ty, color)
        })
        .collect()
}

fn bench_shape(name: &str, d: &Diagram, p: &Parameters) {
    const LEN: usize = 10_000;
    const ROUNDS: usize = 5;
    let mut total = 0.0;
    let mut out_len = 0;
    for round in 0..ROUNDS {
        let letters = random_letters(d, p, LEN, 0x9e3779b9 + round as u64);
        let start = Instant::now();
        let w = Word::from_letters(d, p, &letters).unwrap();
        total += start.elapsed().as_secs_f64();
        out_len = w.len();
        let inv = words::invert(&w, d, p);
        assert!(words::multiply(&w, &inv, d, p).is_empty());
    }
    let per_round = total / ROUNDS as f64;
    println!(
        "{name}: {LEN} letters normalized in {:.1} ms ({:.2} Mletters/s), normal form length {out_len}",
        per_round * 1e3,
        LEN as f64 / per_round / 1e6
    );
}

fn main() {
    let tree = Diagram::numbered(2, &[(1, 2)]).unwrap();
    bench_shape("tree", &tree, &Parameters::uniform(2, 3).unwrap());

    let ladder = Diagram::numbered(3, &[(2, 3)]).unwrap();
    bench_shape("ladder", &ladder, &Parameters::uniform(3, 3).unwrap());

    let pentagon = Diagram::numbered(5, &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)]).unwrap();
    bench_shape("pentagon", &pentagon, &Parameters::uniform(5, 3).unwrap());
}
