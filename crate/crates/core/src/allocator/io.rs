//! CSV formats for standalone solver use.
//!
//! Instance file:
//!
//! ```text
//! # P=10 B=1
//! index,S_bits,n_m
//! 0,100,2
//! 1,200,4
//! ```
//!
//! Solution file columns: `index,tau_or_B,P_i,time_i`. For TD the second
//! column is `tau_i` and `P_i` is the full power while the transmission is on
//! air; for FD they are the bandwidth and power shares.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::{AllocError, Allocation, OptInstance};

#[derive(Debug, Serialize, Deserialize)]
struct InstanceRow {
    index: usize,
    #[serde(rename = "S_bits")]
    size: f64,
    n_m: f64,
}

fn header_value(header: &str, key: &str) -> Result<f64, AllocError> {
    header
        .split_whitespace()
        .find_map(|tok| tok.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
        .ok_or_else(|| AllocError::Format(format!("header lacks `{key}=`")))?
        .parse()
        .map_err(|e| AllocError::Format(format!("bad `{key}` value: {e}")))
}

pub fn read_instance<R: Read>(input: R) -> Result<OptInstance, AllocError> {
    let mut reader = BufReader::new(input);
    let mut header = String::new();
    reader.read_line(&mut header)?;
    let header = header
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| AllocError::Format("first line must be `# P=<watts> B=<hz>`".into()))?;
    let power = header_value(header, "P")?;
    let bandwidth = header_value(header, "B")?;

    let mut rows: Vec<InstanceRow> = csv::Reader::from_reader(reader)
        .deserialize()
        .collect::<Result<_, _>>()?;
    rows.sort_by_key(|r| r.index);
    if let Some((pos, row)) = rows.iter().enumerate().find(|(i, r)| r.index != *i) {
        return Err(AllocError::Format(format!(
            "indices must be 0..L without gaps; found {} at position {pos}",
            row.index
        )));
    }
    OptInstance::new(
        rows.iter().map(|r| r.size).collect(),
        rows.iter().map(|r| r.n_m).collect(),
        power,
        bandwidth,
    )
}

pub fn write_instance<W: Write>(inst: &OptInstance, mut out: W) -> Result<(), AllocError> {
    writeln!(out, "# P={} B={}", inst.power, inst.bandwidth)?;
    let mut w = csv::Writer::from_writer(out);
    for (index, (&size, &n_m)) in inst.sizes.iter().zip(&inst.worst_noise).enumerate() {
        w.serialize(InstanceRow { index, size, n_m })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_solution<W: Write>(inst: &OptInstance, alloc: &Allocation, out: W) -> Result<(), AllocError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "tau_or_B", "P_i", "time_i"])?;
    for i in 0..inst.len() {
        let (share, power) = match alloc {
            Allocation::Td(a) => (
                a.fractions[i],
                if a.fractions[i] > 0.0 { inst.power } else { 0.0 },
            ),
            Allocation::Fd(a) => (a.bandwidths[i], a.powers[i]),
        };
        w.write_record([
            i.to_string(),
            share.to_string(),
            power.to_string(),
            alloc.times()[i].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
