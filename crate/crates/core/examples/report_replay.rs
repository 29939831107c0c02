//! Writes a report through the CLI entry point, then replays it from its
//! embedded config and compares bytes.
//!
//!     cargo run --release --example report_replay

use chaoscope::cli::{replay_report, run};
use chaoscope::Report;

fn main() -> chaoscope::Result<()> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("linear.json");
    let argv = ["chaoscope", "classify", "linear_ax", "--range", "-10:10", "--out", path.to_str().unwrap()];
    let code = run(argv, &mut std::io::stdout(), &mut std::io::stderr());
    println!("exit code {code}");

    let report = Report::from_bytes(&std::fs::read(&path)?)?;
    println!("label {} recorded with args {:?}", report.result["label"], report.command.args);

    let replay = replay_report(&path)?;
    println!("replayed: exit {} identical {}", replay.exit_code, replay.identical);
    Ok(())
}
