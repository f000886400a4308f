//! Dense matrices over [`Scalar`].

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ScalarMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl ScalarMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ScalarMatrix {
            rows,
            cols,
            entries: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ScalarMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn diagonal(diag: &[Scalar]) -> Self {
        let mut m = ScalarMatrix::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    /// Builds a matrix from rows, rejecting ragged input.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(ScalarMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Integer-entry convenience constructor. Panics on ragged input.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        ScalarMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Scalar::from_int(v)).collect())
                .collect(),
        )
        .expect("rectangular integer matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = ScalarMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Matrix product. Zero entries are skipped, which keeps products of the
    /// signed-permutation matrices used throughout close to O(n²).
    pub fn mul(&self, other: &ScalarMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let sparse_rows: Vec<Vec<(usize, &Scalar)>> = (0..other.rows)
            .map(|k| {
                other
                    .row(k)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        let mut out = ScalarMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for (k, a) in self.row(i).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for &(j, b) in &sparse_rows[k] {
                    out.entries[i * other.cols + j] += &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect())
    }

    fn zip_with(
        &self,
        other: &ScalarMatrix,
        f: impl Fn(&Scalar, &Scalar) -> Scalar,
    ) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(ScalarMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &ScalarMatrix) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarMatrix) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        ScalarMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn trace(&self) -> Scalar {
        let mut t = Scalar::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `MᵀM = 1` exactly.
    pub fn is_orthogonal(&self) -> bool {
        self.is_square()
            && self
                .transpose()
                .mul(self)
                .map(|p| p.is_identity())
                .unwrap_or(false)
    }

    /// Copy of the block with rows `r0..r0+h` and columns `c0..c0+w`.
    pub fn block(&self, r0: usize, c0: usize, h: usize, w: usize) -> Self {
        let mut b = ScalarMatrix::zeros(h, w);
        for i in 0..h {
            for j in 0..w {
                b.set(i, j, self.get(r0 + i, c0 + j).clone());
            }
        }
        b
    }

    /// Writes `b` with its top-left corner at `(r0, c0)`.
    pub fn put_block(&mut self, r0: usize, c0: usize, b: &ScalarMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }

    /// `[[tl, tr], [bl, br]]`.
    pub fn from_blocks(tl: &Self, tr: &Self, bl: &Self, br: &Self) -> Result<Self> {
        if tl.rows != tr.rows || bl.rows != br.rows || tl.cols != bl.cols || tr.cols != br.cols {
            return Err(Error::DimensionMismatch("incompatible blocks".into()));
        }
        let mut m = ScalarMatrix::zeros(tl.rows + bl.rows, tl.cols + tr.cols);
        m.put_block(0, 0, tl);
        m.put_block(0, tl.cols, tr);
        m.put_block(tl.rows, 0, bl);
        m.put_block(tl.rows, tl.cols, br);
        Ok(m)
    }

    pub fn direct_sum(&self, other: &ScalarMatrix) -> Self {
        let mut m = ScalarMatrix::zeros(self.rows + other.rows, self.cols + other.cols);
        m.put_block(0, 0, self);
        m.put_block(self.rows, self.cols, other);
        m
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &ScalarMatrix) -> Self {
        let mut m = ScalarMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                m.put_block(i * other.rows, j * other.cols, &other.scale(a));
            }
        }
        m
    }

    pub fn to_f64(&self) -> Result<nalgebra::DMatrix<f64>> {
        let vals = self
            .entries
            .iter()
            .map(Scalar::to_f64)
            .collect::<Result<Vec<_>>>()?;
        Ok(nalgebra::DMatrix::from_row_slice(
            self.rows, self.cols, &vals,
        ))
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }
}

impl fmt::Display for ScalarMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(ToString::to_string).collect();
        let width = cells.iter().map(|c| c.chars().count()).max().unwrap_or(1);
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>width$}", cells[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ScalarMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarMatrix {}x{}\n{}", self.rows, self.cols, self)
    }
}

impl Serialize for ScalarMatrix {
    /// Row-major grid of scalars.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ScalarMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Scalar>>::deserialize(d)?;
        ScalarMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let a = ScalarMatrix::from_ints(&[&[1, 2], &[0, -1]]);
        let b = ScalarMatrix::from_ints(&[&[0, 1], &[1, 0]]);
        assert_eq!(
            a.mul(&b).unwrap(),
            ScalarMatrix::from_ints(&[&[2, 1], &[-1, 0]])
        );
        assert_eq!(a.transpose(), ScalarMatrix::from_ints(&[&[1, 0], &[2, -1]]));
        assert!(a.mul(&ScalarMatrix::identity(3)).is_err());
    }

    #[test]
    fn structure_predicates() {
        let rot = ScalarMatrix::from_ints(&[&[0, -1], &[1, 0]]);
        assert!(rot.is_orthogonal());
        assert!(!rot.is_symmetric());
        assert!(!ScalarMatrix::from_ints(&[&[1, 1], &[0, 1]]).is_orthogonal());
        assert_eq!(
            ScalarMatrix::from_ints(&[&[1, 0], &[0, -1]]).trace(),
            Scalar::zero()
        );
    }

    #[test]
    fn blocks_and_kron() {
        let i1 = ScalarMatrix::identity(1);
        let z = ScalarMatrix::zeros(1, 1);
        let anti = ScalarMatrix::from_blocks(&z, &i1, &i1, &z).unwrap();
        assert_eq!(anti, ScalarMatrix::from_ints(&[&[0, 1], &[1, 0]]));
        let k = anti.kron(&ScalarMatrix::identity(2));
        assert_eq!(k.rows(), 4);
        assert!(k.get(0, 2).is_one() && k.get(1, 3).is_one() && k.get(0, 0).is_zero());
        assert_eq!(k.block(0, 2, 2, 2), ScalarMatrix::identity(2));
    }

    #[test]
    fn json_rows() {
        let m = ScalarMatrix::from_ints(&[&[1, 0]]);
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, "[[[1,1,0,1,0,1,0,1],[0,1,0,1,0,1,0,1]]]");
        assert_eq!(serde_json::from_str::<ScalarMatrix>(&text).unwrap(), m);
        assert!(serde_json::from_str::<ScalarMatrix>("[[[1,1,0,1,0,1,0,1]],[]]").is_err());
    }
}
