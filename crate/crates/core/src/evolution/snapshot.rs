//! Binary snapshot format, little-endian:
//!
//! ```text
//! magic "KGD1" | version u32 | m f64 | L f64 | num_points u64 | t f64
//! num_points x (Re psi, Im psi) f64
//! num_points x (Re pi,  Im pi)  f64
//! ```

use std::io::{Read, Write};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{FieldState, Grid};
use crate::scalar::Real;

pub const MAGIC: &[u8; 4] = b"KGD1";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotHeader {
    pub version: u32,
    pub m: f64,
    pub half_length: f64,
    pub num_points: u64,
    pub t: f64,
}

impl SnapshotHeader {
    pub fn grid<T: Real>(&self) -> Result<Grid<T>> {
        let n = usize::try_from(self.num_points)
            .map_err(|_| Error::Snapshot("num_points overflows usize".into()))?;
        Grid::new(T::lit(self.half_length), n)
    }
}

pub fn write_snapshot<T: Real, W: Write>(
    mut w: W,
    state: &FieldState<T>,
    m: T,
    grid: &Grid<T>,
) -> Result<()> {
    state.check_grid(grid)?;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&m.as_f64().to_le_bytes())?;
    w.write_all(&grid.half_length().as_f64().to_le_bytes())?;
    w.write_all(&(grid.len() as u64).to_le_bytes())?;
    w.write_all(&state.t.as_f64().to_le_bytes())?;
    let mut buf = Vec::with_capacity(32 * grid.len());
    for z in state.psi.iter().chain(&state.pi) {
        buf.extend_from_slice(&z.re.as_f64().to_le_bytes());
        buf.extend_from_slice(&z.im.as_f64().to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)
        .map_err(|e| Error::Snapshot(format!("truncated: {e}")))?;
    Ok(b)
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_le_bytes(read_array(r)?))
}

pub fn read_snapshot<T: Real, R: Read>(mut r: R) -> Result<(SnapshotHeader, FieldState<T>)> {
    let magic: [u8; 4] = read_array(&mut r)?;
    if &magic != MAGIC {
        return Err(Error::Snapshot(format!("bad magic {magic:?}")));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let m = read_f64(&mut r)?;
    let half_length = read_f64(&mut r)?;
    let num_points = u64::from_le_bytes(read_array(&mut r)?);
    let t = read_f64(&mut r)?;
    let header = SnapshotHeader {
        version,
        m,
        half_length,
        num_points,
        t,
    };
    let n = header.grid::<T>()?.len();

    let mut body = vec![0u8; 32 * n];
    r.read_exact(&mut body)
        .map_err(|e| Error::Snapshot(format!("truncated body: {e}")))?;
    let mut values = body
        .chunks_exact(8)
        .map(|c| T::lit(f64::from_le_bytes(c.try_into().expect("8 bytes"))));
    let mut next = || {
        let re = values.next().expect("sized body");
        let im = values.next().expect("sized body");
        Complex::new(re, im)
    };
    let psi = (0..n).map(|_| next()).collect();
    let pi = (0..n).map(|_| next()).collect();
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::Snapshot("trailing bytes after body".into()));
    }
    Ok((
        header,
        FieldState {
            psi,
            pi,
            t: T::lit(t),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let g = Grid::new(2.0, 5).unwrap();
        let mut s = FieldState::zeros(&g);
        s.psi[2] = Complex::new(1.5, -0.5);
        s.t = 3.25;
        let mut bytes = Vec::new();
        write_snapshot(&mut bytes, &s, 1.0, &g).unwrap();
        assert_eq!(bytes.len(), 4 + 4 + 8 * 4 + 32 * 5);
        assert_eq!(&bytes[..4], b"KGD1");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(f64::from_le_bytes(bytes[16..24].try_into().unwrap()), 2.0);
        assert_eq!(u64::from_le_bytes(bytes[24..32].try_into().unwrap()), 5);
        assert_eq!(f64::from_le_bytes(bytes[32..40].try_into().unwrap()), 3.25);
        // psi[2].re is the fifth f64 of the body
        assert_eq!(
            f64::from_le_bytes(bytes[40 + 32..40 + 40].try_into().unwrap()),
            1.5
        );
    }

    #[test]
    fn rejects_corrupt_input() {
        assert!(read_snapshot::<f64, _>(&b"KGD2\x01\0\0\0"[..]).is_err());
        let g = Grid::new(2.0, 5).unwrap();
        let mut bytes = Vec::new();
        write_snapshot(&mut bytes, &FieldState::zeros(&g), 1.0, &g).unwrap();
        assert!(read_snapshot::<f64, _>(&bytes[..bytes.len() - 1]).is_err());
        bytes.push(0);
        assert!(read_snapshot::<f64, _>(&bytes[..]).is_err());
    }

    proptest! {
        #[test]
        fn write_read_write_is_byte_identical(
            vals in proptest::collection::vec(-1e3f64..1e3, 4 * 7),
            t in 0.0f64..1e4,
        ) {
            let g = Grid::new(3.0, 7).unwrap();
            let z = |k: usize| Complex::new(vals[2 * k], vals[2 * k + 1]);
            let s = FieldState { psi: (0..7).map(z).collect(), pi: (7..14).map(z).collect(), t };
            let mut first = Vec::new();
            write_snapshot(&mut first, &s, 1.25, &g).unwrap();
            let (header, back) = read_snapshot::<f64, _>(&first[..]).unwrap();
            prop_assert_eq!(&back, &s);
            let mut second = Vec::new();
            write_snapshot(&mut second, &back, header.m, &header.grid().unwrap()).unwrap();
            prop_assert_eq!(first, second);
        }
    }
}
