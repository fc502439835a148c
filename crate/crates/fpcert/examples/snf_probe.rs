// probe: run SNF on pseudorandom matrices, print progress
use fpcert::intlin::{smith_normal_form, IntMatrix};

fn main() {
    let mut state: u64 = 0x9E3779B97F4A7C15;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for case in 0..2000 {
        let r = (next() % 8 + 1) as usize;
        let c = (next() % 8 + 1) as usize;
        let rows: Vec<Vec<i64>> = (0..r)
            .map(|_| (0..c).map(|_| (next() % 21) as i64 - 10).collect())
            .collect();
        let a = IntMatrix::from_rows(&rows);
        eprint!("case {case} ({r}x{c}) ... ");
        let snf = smith_normal_form(&a);
        assert!(snf.verify(&a));
        eprintln!("ok rank {}", snf.rank);
    }
    println!("all ok");
}
