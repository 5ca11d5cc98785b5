//! Plain-text sparse dump of a [`ConeProgram`] for cross-checking with
//! external solvers.
//!
//! ```text
//! cone-program 1
//! dims <n> <m> <p>
//! cone nonneg <d> | cone soc <d> | cone psd <order>
//! c <j> <value>
//! G <i> <j> <value>
//! h <i> <value>
//! A <i> <j> <value>
//! b <i> <value>
//! ```
//!
//! Indices are zero based and only nonzeros are written. PSD blocks are
//! stored as full column-major matrices.

use std::io::{self, BufRead, Write};

use nalgebra::{DMatrix, DVector};

use super::cone::Cone;
use super::ipm::ConeProgram;

pub fn write_program(p: &ConeProgram, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "cone-program 1")?;
    writeln!(out, "dims {} {} {}", p.n_vars(), p.cone_dim(), p.b.len())?;
    for cone in &p.cones {
        match cone {
            Cone::NonNeg(d) => writeln!(out, "cone nonneg {d}")?,
            Cone::Soc(d) => writeln!(out, "cone soc {d}")?,
            Cone::Psd(d) => writeln!(out, "cone psd {d}")?,
        }
    }
    let vec = |out: &mut dyn Write, tag: &str, v: &DVector<f64>| -> io::Result<()> {
        for (i, x) in v.iter().enumerate() {
            if *x != 0.0 {
                writeln!(out, "{tag} {i} {x:e}")?;
            }
        }
        Ok(())
    };
    let mat = |out: &mut dyn Write, tag: &str, m: &DMatrix<f64>| -> io::Result<()> {
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let x = m[(i, j)];
                if x != 0.0 {
                    writeln!(out, "{tag} {i} {j} {x:e}")?;
                }
            }
        }
        Ok(())
    };
    vec(out, "c", &p.c)?;
    mat(out, "G", &p.g)?;
    vec(out, "h", &p.h)?;
    mat(out, "A", &p.a)?;
    vec(out, "b", &p.b)?;
    Ok(())
}

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

pub fn read_program(input: impl BufRead) -> io::Result<ConeProgram> {
    let mut lines = input.lines();
    match lines.next() {
        Some(Ok(l)) if l.trim() == "cone-program 1" => {}
        _ => return Err(invalid("missing cone-program header")),
    }
    let mut prog: Option<ConeProgram> = None;
    let mut cones = Vec::new();
    for line in lines {
        let line = line?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.is_empty() {
            continue;
        }
        let num = |k: usize| -> io::Result<usize> {
            f.get(k).and_then(|s| s.parse().ok()).ok_or_else(|| invalid(format!("bad line: {line}")))
        };
        let val = |k: usize| -> io::Result<f64> {
            f.get(k).and_then(|s| s.parse().ok()).ok_or_else(|| invalid(format!("bad line: {line}")))
        };
        if f[0] == "dims" {
            let (n, m, p) = (num(1)?, num(2)?, num(3)?);
            prog = Some(
                ConeProgram::new(DVector::zeros(n), DMatrix::zeros(m, n), DVector::zeros(m), Vec::new())
                    .with_equalities(DMatrix::zeros(p, n), DVector::zeros(p)),
            );
            continue;
        }
        let pr = prog.as_mut().ok_or_else(|| invalid("data before dims line"))?;
        let check = |ok: bool| if ok { Ok(()) } else { Err(invalid(format!("index out of range: {line}"))) };
        match f[0] {
            "cone" => {
                let d = num(2)?;
                cones.push(match f.get(1).copied() {
                    Some("nonneg") => Cone::NonNeg(d),
                    Some("soc") => Cone::Soc(d),
                    Some("psd") => Cone::Psd(d),
                    _ => return Err(invalid(format!("unknown cone: {line}"))),
                });
            }
            "c" | "h" | "b" => {
                let (i, x) = (num(1)?, val(2)?);
                let v = match f[0] {
                    "c" => &mut pr.c,
                    "h" => &mut pr.h,
                    _ => &mut pr.b,
                };
                check(i < v.len())?;
                v[i] = x;
            }
            "G" | "A" => {
                let (i, j, x) = (num(1)?, num(2)?, val(3)?);
                let m = if f[0] == "G" { &mut pr.g } else { &mut pr.a };
                check(i < m.nrows() && j < m.ncols())?;
                m[(i, j)] = x;
            }
            other => return Err(invalid(format!("unknown record {other:?}"))),
        }
    }
    let mut prog = prog.ok_or_else(|| invalid("missing dims line"))?;
    prog.cones = cones;
    if prog.cone_dim() != prog.h.len() {
        return Err(invalid("cone dimensions do not add up to the row count"));
    }
    Ok(prog)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = DMatrix::from_row_slice(3, 2, &[-1.0, 0.0, 0.0, -1.0, 0.5, 1.25e-7]);
        let p = ConeProgram::new(
            DVector::from_vec(vec![1.0, -2.0]),
            g,
            DVector::from_vec(vec![0.0, 1.0, 3.0]),
            vec![Cone::NonNeg(1), Cone::Soc(2)],
        );
        let mut buf = Vec::new();
        write_program(&p, &mut buf).unwrap();
        let q = read_program(buf.as_slice()).unwrap();
        assert_eq!(p.c, q.c);
        assert_eq!(p.g, q.g);
        assert_eq!(p.h, q.h);
        assert_eq!(p.cones, q.cones);
    }
}
