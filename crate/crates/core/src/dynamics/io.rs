//! `CTOM1` record files (little-endian):
//!
//! ```text
//! "CTOM1"  u32 num_records
//! per record:
//!   u32 n_steps  f64 dt  f64 tau  u8 num_qubits
//!   f64 × 7  control: θ₁ φ₁ Ω₁ θ₂ φ₂ Ω₂ g
//!   u64 seed
//!   f64 × n_steps readouts
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::control::{ControlSetting, MeasurementConfig, RabiDrive};
use super::record::MeasurementRecord;
use crate::{Error, Result};

pub const MAGIC: &[u8; 5] = b"CTOM1";

pub fn write_records_to<W: Write>(mut w: W, records: &[MeasurementRecord]) -> Result<()> {
    w.write_all(MAGIC)?;
    let count = u32::try_from(records.len()).map_err(|_| Error::InvalidArgument("too many records".into()))?;
    w.write_all(&count.to_le_bytes())?;
    for rec in records {
        let n = u32::try_from(rec.readouts.len()).map_err(|_| Error::InvalidArgument("record too long".into()))?;
        w.write_all(&n.to_le_bytes())?;
        w.write_all(&rec.config.dt.to_le_bytes())?;
        w.write_all(&rec.config.tau.to_le_bytes())?;
        w.write_all(&[rec.control.num_qubits() as u8])?;
        let second = rec.control.second.unwrap_or_else(RabiDrive::off);
        let fields = [
            rec.control.first.theta,
            rec.control.first.phi,
            rec.control.first.rate,
            second.theta,
            second.phi,
            second.rate,
            rec.control.coupling,
        ];
        for f in fields {
            w.write_all(&f.to_le_bytes())?;
        }
        w.write_all(&rec.seed.to_le_bytes())?;
        for r in &rec.readouts {
            w.write_all(&r.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_records(path: impl AsRef<Path>, records: &[MeasurementRecord]) -> Result<()> {
    write_records_to(BufWriter::new(File::create(path)?), records)
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format("truncated file".into()),
        _ => Error::Io(e),
    })?;
    Ok(buf)
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_le_bytes(read_array(r)?))
}

pub fn read_records_from<R: Read>(mut r: R) -> Result<Vec<MeasurementRecord>> {
    let magic: [u8; 5] = read_array(&mut r)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let count = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let mut records = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let n_steps = u32::from_le_bytes(read_array(&mut r)?) as usize;
        let dt = read_f64(&mut r)?;
        let tau = read_f64(&mut r)?;
        let [num_qubits] = read_array::<1, _>(&mut r)?;
        let mut f = [0.0; 7];
        for x in f.iter_mut() {
            *x = read_f64(&mut r)?;
        }
        let seed = u64::from_le_bytes(read_array(&mut r)?);
        let first = RabiDrive::new(f[0], f[1], f[2]);
        let control = match num_qubits {
            1 => ControlSetting::single(first),
            2 => ControlSetting::two_qubit(first, RabiDrive::new(f[3], f[4], f[5]), f[6]),
            q => return Err(Error::Format(format!("unsupported qubit count {q}"))),
        };
        control.validate().map_err(|e| Error::Format(e.to_string()))?;
        let config = MeasurementConfig { dt, n_steps, tau };
        config.validate().map_err(|e| Error::Format(e.to_string()))?;
        let mut readouts = Vec::with_capacity(n_steps);
        for _ in 0..n_steps {
            readouts.push(read_f64(&mut r)?);
        }
        records.push(MeasurementRecord::new(readouts, config, control, seed).map_err(|e| Error::Format(e.to_string()))?);
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::Format("trailing bytes".into()));
    }
    Ok(records)
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<MeasurementRecord>> {
    read_records_from(BufReader::new(File::open(path)?))
}

/// One record per row: `seed,n_steps,dt,tau,num_qubits,setting,r_1,…,r_n`.
pub fn write_records_csv<W: Write>(w: W, records: &[MeasurementRecord]) -> Result<()> {
    let mut out = csv::WriterBuilder::new().flexible(true).from_writer(w);
    let max_len = records.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut header: Vec<String> = ["seed", "n_steps", "dt", "tau", "num_qubits", "setting"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=max_len).map(|k| format!("r{k}")));
    out.write_record(&header)?;
    for rec in records {
        let mut row = vec![
            rec.seed.to_string(),
            rec.config.n_steps.to_string(),
            rec.config.dt.to_string(),
            rec.config.tau.to_string(),
            rec.control.num_qubits().to_string(),
            rec.control.label(),
        ];
        row.extend(rec.readouts.iter().map(|r| r.to_string()));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<MeasurementRecord> {
        let cfg = MeasurementConfig::new(0.01, 3, 0.4).unwrap();
        let ctrl = ControlSetting::two_qubit(RabiDrive::off(), RabiDrive::new(std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4, 4.7), 4.7);
        vec![
            MeasurementRecord::new(vec![0.1, -2.5, 7.0], cfg, ctrl, 42).unwrap(),
            MeasurementRecord::new(vec![1.0, 2.0, 3.0], cfg, ctrl, 43).unwrap(),
        ]
    }

    #[test]
    fn header_layout() {
        let mut buf = Vec::new();
        write_records_to(&mut buf, &sample()).unwrap();
        assert_eq!(&buf[..5], b"CTOM1");
        assert_eq!(u32::from_le_bytes(buf[5..9].try_into().unwrap()), 2);
        let per_record = 4 + 8 + 8 + 1 + 7 * 8 + 8 + 3 * 8;
        assert_eq!(buf.len(), 9 + 2 * per_record);
    }

    #[test]
    fn rejects_corruption() {
        let mut buf = Vec::new();
        write_records_to(&mut buf, &sample()).unwrap();
        assert!(matches!(read_records_from(&buf[..buf.len() - 1]), Err(Error::Format(_))));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_records_from(&bad[..]), Err(Error::Format(_))));
        let mut extra = buf.clone();
        extra.push(0);
        assert!(matches!(read_records_from(&extra[..]), Err(Error::Format(_))));
    }

    #[test]
    fn csv_rows() {
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &sample()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("seed,n_steps,dt,tau,num_qubits,setting,r1"));
        assert!(lines[1].contains("0+XYZ"));
    }
}
