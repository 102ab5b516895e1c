//! Runs the eight acceptance criteria, one line each. Pass criterion numbers
//! as arguments to run a subset.

use std::process::ExitCode;

use ffcircle::acceptance;

fn main() -> ExitCode {
    let picked: Vec<u8> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let which: Vec<u8> = if picked.is_empty() {
        (1..=8).collect()
    } else {
        picked
    };
    let mut failed = 0;
    for n in which {
        let rep = acceptance::run(n);
        println!("{rep}");
        failed += usize::from(!rep.passed);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
