//! Run a command under a wall-clock limit. The whole process group is
//! terminated when the limit passes.
//!
//! ```text
//! cargo run --example run_timeout
//! ```

use std::time::Duration;

use regbench::adapters::{execute_with_timeout, ExecOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ws = tempfile::tempdir()?;
    let opts = ExecOptions {
        grace: Duration::from_millis(500),
        ..Default::default()
    };
    let sh = |s: &str| vec!["sh".to_string(), "-c".into(), s.into()];

    for (script, limit) in [("echo done", 5.0), ("exit 3", 5.0), ("sleep 30 & sleep 30", 1.0)] {
        let out = execute_with_timeout(&sh(script), Duration::from_secs_f64(limit), ws.path(), &opts)?;
        println!(
            "{script:<22} -> {:<9} exit {:?} after {:.2} s",
            out.status.to_string(),
            out.exit_code,
            out.wall_time_s
        );
    }
    Ok(())
}
