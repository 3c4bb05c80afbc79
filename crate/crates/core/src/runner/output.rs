use std::io::{self, BufRead, Write};

use crate::diagnostics::DiagRecord;
use crate::error::{Error, Result};
use crate::grid::{DistFn, PhaseGrid};

use super::{SweepResult, VerifyReport};

/// Size of the text header that precedes the values in a snapshot file.
pub const SNAPSHOT_HEADER_LEN: usize = 64;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_run_csv<W: Write>(records: &[DiagRecord], mut w: W) -> io::Result<()> {
    writeln!(w, "t,H,T,U,mass,L1,L2,fmin,fmax")?;
    for r in records {
        let cols = [
            r.t, r.energy, r.kinetic, r.potential, r.mass, r.l1, r.l2, r.f_min, r.f_max,
        ];
        let line: Vec<String> = cols.iter().map(|&x| num(x)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()
}

pub fn write_sweep_csv<W: Write>(sweep: &SweepResult, mut w: W) -> io::Result<()> {
    writeln!(w, "tau,sigma_over_tau,err_H,err_L2")?;
    for r in &sweep.rows {
        writeln!(
            w,
            "{},{},{},{}",
            num(r.tau),
            num(r.sigma_over_tau),
            num(r.err_h),
            num(r.err_l2)
        )?;
    }
    writeln!(w, "# slope={}", num(sweep.slope))?;
    w.flush()
}

pub fn write_verify_report<W: Write>(report: &VerifyReport, mut w: W) -> io::Result<()> {
    for e in &report.entries {
        let status = if e.passed { "PASS" } else { "FAIL" };
        write!(
            w,
            "{status} {:<9} symmetric={} consistency=({:.2e}, {:.2e})",
            e.name, e.symmetric, e.consistency.0, e.consistency.1
        )?;
        match (&e.order6, e.order6_gated) {
            (Some(r), gated) => {
                let vals: Vec<String> = r.iter().map(|v| format!("{v:.2e}")).collect();
                let tag = if gated { "" } else { " (not gated)" };
                writeln!(w, " order6=[{}]{tag}", vals.join(", "))?;
            }
            (None, _) => writeln!(w, " order6=n/a")?,
        }
    }
    writeln!(
        w,
        "{}",
        if report.passed() {
            "all gates passed"
        } else {
            "verification FAILED"
        }
    )?;
    w.flush()
}

/// Writes `f` as a 64-byte header `vpsnap <dim> <nx> <nv> <k> <vmax>`
/// (space padded, newline terminated) followed by the values as
/// little-endian `f64` in storage order.
pub fn write_snapshot<W: Write>(f: &DistFn, mut w: W) -> Result<()> {
    let g = f.grid();
    let text = format!(
        "vpsnap {} {} {} {:?} {:?}",
        g.dim(),
        g.nx(),
        g.nv(),
        g.k(),
        g.v_max()
    );
    if text.len() >= SNAPSHOT_HEADER_LEN {
        return Err(Error::Config(format!(
            "snapshot header `{text}` exceeds {} bytes",
            SNAPSHOT_HEADER_LEN - 1
        )));
    }
    let mut header = format!("{text:<width$}", width = SNAPSHOT_HEADER_LEN - 1);
    header.push('\n');
    w.write_all(header.as_bytes())?;
    let mut buf = Vec::with_capacity(8 * 4096);
    for chunk in f.values().chunks(4096) {
        buf.clear();
        for v in chunk {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_snapshot`].
pub fn read_snapshot<R: BufRead>(mut r: R) -> Result<DistFn> {
    let mut header = [0u8; SNAPSHOT_HEADER_LEN];
    r.read_exact(&mut header)?;
    let bad = |why: &str| Error::Config(format!("malformed snapshot header: {why}"));
    let text = std::str::from_utf8(&header).map_err(|_| bad("not utf-8"))?;
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != 6 || fields[0] != "vpsnap" {
        return Err(bad(text.trim_end()));
    }
    let int = |s: &str| s.parse::<usize>().map_err(|_| bad(s));
    let real = |s: &str| s.parse::<f64>().map_err(|_| bad(s));
    let grid = PhaseGrid::new(
        int(fields[1])?,
        int(fields[2])?,
        int(fields[3])?,
        real(fields[4])?,
        real(fields[5])?,
    )?;
    let mut bytes = Vec::with_capacity(8 * grid.len());
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * grid.len() {
        return Err(bad("payload length does not match the grid"));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")))
        .collect();
    DistFn::from_values(grid, values)
}
