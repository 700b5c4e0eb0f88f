//! CSV and JSON emission.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// 17 significant digits: round-trip exact for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes one line to stdout, exiting quietly when the consumer closed the
/// pipe (e.g. `recur ... | head`).
pub fn out(line: &str) {
    let stdout = io::stdout();
    let mut w = stdout.lock();
    if let Err(e) = w.write_all(line.as_bytes()).and_then(|_| w.write_all(b"\n")) {
        handle_stdout_error(e);
    }
}

fn handle_stdout_error(e: io::Error) -> ! {
    if e.kind() == io::ErrorKind::BrokenPipe {
        std::process::exit(0);
    }
    eprintln!("recur: stdout error: {e}");
    std::process::exit(1);
}

pub fn write_csv(
    out: Option<&Path>,
    header: &[&str],
    rows: &[Vec<String>],
) -> io::Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            emit_csv(&mut w, header, rows)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            if let Err(e) = emit_csv(&mut w, header, rows) {
                handle_stdout_error(e);
            }
            Ok(())
        }
    }
}

fn emit_csv<W: Write>(w: &mut W, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_json(dest: Option<&Path>, value: &serde_json::Value) -> io::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable value");
    match dest {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            writeln!(w, "{text}")?;
            w.flush()
        }
        None => {
            out(&text);
            Ok(())
        }
    }
}
