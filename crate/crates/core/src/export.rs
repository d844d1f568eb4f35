//! CSV and Wavefront OBJ writers.

use std::io::{self, Write};

use crate::surface::{Grid, ParametricSurface, SurfaceError};
use crate::Vec3;

/// Formats like C's `%.17g`.
pub fn fmt_g17(x: f64) -> String {
    const P: i32 = 17;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..P).contains(&exp) {
        let mant = trim_fraction(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (P - 1 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes a header line followed by `%.17g` rows.
pub fn write_csv<W: Write>(mut out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_g17).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Surface positions on the inclusive `ns x nt` lattice, row-major in `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub grid: Grid,
    pub params: Vec<(f64, f64)>,
    pub vertices: Vec<Vec3>,
}

pub fn sample_mesh(surface: &ParametricSurface<f64>, grid: Grid) -> Result<Mesh, SurfaceError> {
    let grid = grid.validate()?;
    let params = surface.domain.node_grid(grid);
    let vertices = params
        .iter()
        .map(|&(s, t)| surface.point(s, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Mesh { grid, params, vertices })
}

impl Mesh {
    /// CSV with columns `s,t,x,y,z`.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        write_csv(
            out,
            &["s", "t", "x", "y", "z"],
            self.params
                .iter()
                .zip(&self.vertices)
                .map(|(&(s, t), p)| vec![s, t, p.x, p.y, p.z]),
        )
    }

    /// `v x y z` records, then one `f` quad per grid cell (1-based indices).
    pub fn write_obj<W: Write>(&self, mut out: W) -> io::Result<()> {
        for p in &self.vertices {
            writeln!(out, "v {} {} {}", fmt_g17(p.x), fmt_g17(p.y), fmt_g17(p.z))?;
        }
        let nt = self.grid.nt;
        for i in 0..self.grid.ns - 1 {
            for j in 0..nt - 1 {
                let a = i * nt + j + 1;
                writeln!(out, "f {} {} {} {}", a, a + nt, a + nt + 1, a + 1)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::Domain;
    use crate::Series;

    #[test]
    fn g17_matches_printf() {
        let cases = [
            (1.0, "1"),
            (0.1, "0.10000000000000001"),
            (-2.5, "-2.5"),
            (1e-5, "1.0000000000000001e-05"),
            (123456.0, "123456"),
            (1e17, "1e+17"),
            (1e16, "10000000000000000"),
            (0.6156264703860141, "0.61562647038601415"),
            (std::f64::consts::PI, "3.1415926535897931"),
            (0.0001, "0.0001"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g17(x), want, "{x}");
        }
    }

    #[test]
    fn g17_round_trips() {
        for x in [1.0 / 3.0, -7.25e-12, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn obj_layout() {
        let surf = ParametricSurface::from_series_fn(Domain::new((0.0, 1.0), (0.0, 1.0)), |s, t| {
            Ok([s.clone(), t.clone(), Series::constant(0.0, s.order())])
        });
        let mesh = sample_mesh(&surf, Grid::new(3, 2)).unwrap();
        let mut buf = Vec::new();
        mesh.write_obj(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6 + 2);
        assert_eq!(lines[0], "v 0 0 0");
        assert_eq!(lines[1], "v 0 1 0");
        assert_eq!(lines[6], "f 1 3 4 2");
        assert_eq!(lines[7], "f 3 5 6 4");
        let mut csv = Vec::new();
        mesh.write_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert_eq!(csv.lines().next(), Some("s,t,x,y,z"));
        assert_eq!(csv.lines().count(), 7);
    }
}
