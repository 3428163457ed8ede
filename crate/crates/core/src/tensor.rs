//! Sparse order-3 tensors with exact coefficients.
//!
//! Indices are 1-based, so a tensor of dims `(m1, m2, m3)` has entries at
//! `[i, j, k]` with `1 ≤ i ≤ m1` and so on. Whenever two indices are merged
//! into one (flattenings, Kronecker products, matrix multiplication builders)
//! the pairing is row-major: `(a, b) ↦ (a − 1)·n_b + b`, with the smaller
//! axis first.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::linalg::Matrix;

/// A 1-based index triple.
pub type Index = [usize; 3];

fn check_dims(dims: [usize; 3]) -> Result<()> {
    if dims.contains(&0) {
        return Err(Error::InvalidDims(dims));
    }
    Ok(())
}

fn check_index(idx: Index, dims: [usize; 3]) -> Result<()> {
    if (0..3).any(|a| idx[a] == 0 || idx[a] > dims[a]) {
        return Err(Error::IndexOutOfRange { idx, dims });
    }
    Ok(())
}

fn pair(a: usize, b: usize, nb: usize) -> usize {
    (a - 1) * nb + b
}

/// The set of index triples carrying a nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Support {
    dims: [usize; 3],
    triples: Vec<Index>,
}

impl Support {
    /// Deduplicates and sorts `triples`; every triple must lie within `dims`.
    pub fn new(dims: [usize; 3], triples: impl IntoIterator<Item = Index>) -> Result<Support> {
        check_dims(dims)?;
        let mut set = BTreeSet::new();
        for t in triples {
            check_index(t, dims)?;
            set.insert(t);
        }
        Ok(Support { dims, triples: set.into_iter().collect() })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    /// Triples in lexicographic order.
    pub fn triples(&self) -> &[Index] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, t: &Index) -> bool {
        self.triples.binary_search(t).is_ok()
    }

    /// Support of the Kronecker product.
    pub fn kron(&self, other: &Support) -> Support {
        let dims = [0, 1, 2].map(|a| self.dims[a] * other.dims[a]);
        let mut triples = Vec::with_capacity(self.len() * other.len());
        for s in &self.triples {
            for t in &other.triples {
                triples.push([0, 1, 2].map(|a| pair(s[a], t[a], other.dims[a])));
            }
        }
        triples.sort();
        Support { dims, triples }
    }

    /// Support of the direct sum: `other` is shifted past `self` on every axis.
    pub fn direct_sum(&self, other: &Support) -> Support {
        let dims = [0, 1, 2].map(|a| self.dims[a] + other.dims[a]);
        let mut triples = self.triples.clone();
        triples.extend(other.triples.iter().map(|t| [0, 1, 2].map(|a| t[a] + self.dims[a])));
        triples.sort();
        Support { dims, triples }
    }

    /// Image of the support under a cyclic rotation of the axes `(1,2,3) → (2,3,1)`.
    pub fn rotate(&self) -> Support {
        let dims = [self.dims[2], self.dims[0], self.dims[1]];
        let mut triples: Vec<Index> = self.triples.iter().map(|t| [t[2], t[0], t[1]]).collect();
        triples.sort();
        Support { dims, triples }
    }
}

/// An order-3 tensor stored as a map from 1-based index triples to nonzero
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseTensor {
    dims: [usize; 3],
    field: Field,
    entries: BTreeMap<Index, FieldElement>,
}

impl SparseTensor {
    pub fn zero(dims: [usize; 3], field: Field) -> Result<SparseTensor> {
        check_dims(dims)?;
        Ok(SparseTensor { dims, field, entries: BTreeMap::new() })
    }

    /// Builds a tensor from explicit entries. Zero values are dropped and a
    /// repeated index is an error.
    pub fn from_entries(
        dims: [usize; 3],
        field: Field,
        entries: impl IntoIterator<Item = (Index, FieldElement)>,
    ) -> Result<SparseTensor> {
        let mut t = SparseTensor::zero(dims, field)?;
        for (idx, v) in entries {
            check_index(idx, dims)?;
            if v.field() != field {
                return Err(Error::FieldMismatch(field, v.field()));
            }
            if t.entries.contains_key(&idx) {
                return Err(Error::DuplicateEntry(idx));
            }
            if !v.is_zero() {
                t.entries.insert(idx, v);
            }
        }
        Ok(t)
    }

    /// Tensor with coefficient one on each listed triple.
    pub fn from_support(support: &Support, field: Field) -> SparseTensor {
        let one = field.one();
        SparseTensor {
            dims: support.dims,
            field,
            entries: support.triples.iter().map(|&t| (t, one.clone())).collect(),
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Index, &FieldElement)> {
        self.entries.iter()
    }

    pub fn get(&self, idx: &Index) -> Option<&FieldElement> {
        self.entries.get(idx)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn support(&self) -> Support {
        Support { dims: self.dims, triples: self.entries.keys().cloned().collect() }
    }

    /// Matrix of shape `(m_axis, product of the other two dims)`; the column
    /// of `(j, k)` (remaining axes in increasing order) is `(j − 1)·n_k + k`.
    pub fn flatten(&self, axis: usize) -> Result<Matrix> {
        if !(1..=3).contains(&axis) {
            return Err(Error::InvalidAxis(axis));
        }
        let a = axis - 1;
        let (b, c) = match a {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let mut m = Matrix::zeros(self.dims[a], self.dims[b] * self.dims[c], self.field);
        for (idx, v) in &self.entries {
            m.set(idx[a], pair(idx[b], idx[c], self.dims[c]), v.clone())?;
        }
        Ok(m)
    }

    /// Exact rank of the flattening along `axis`.
    pub fn flattening_rank(&self, axis: usize) -> Result<usize> {
        Ok(self.flatten(axis)?.rank())
    }

    /// Kronecker product; index pairs are combined row-major per axis.
    pub fn kronecker(&self, other: &SparseTensor) -> Result<SparseTensor> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field, other.field));
        }
        let dims = [0, 1, 2].map(|a| self.dims[a] * other.dims[a]);
        let mut entries = BTreeMap::new();
        for (s, x) in &self.entries {
            for (t, y) in &other.entries {
                let v = x.mul(y)?;
                if !v.is_zero() {
                    entries.insert([0, 1, 2].map(|a| pair(s[a], t[a], other.dims[a])), v);
                }
            }
        }
        Ok(SparseTensor { dims, field: self.field, entries })
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, other: &SparseTensor) -> Result<SparseTensor> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field, other.field));
        }
        let dims = [0, 1, 2].map(|a| self.dims[a] + other.dims[a]);
        let mut entries = self.entries.clone();
        for (t, v) in &other.entries {
            entries.insert([0, 1, 2].map(|a| t[a] + self.dims[a]), v.clone());
        }
        Ok(SparseTensor { dims, field: self.field, entries })
    }

    /// Serializes to the JSON tensor file format.
    pub fn to_json(&self) -> String {
        let entries = self
            .entries
            .iter()
            .map(|(idx, v)| {
                let (num, den) = v.to_fraction();
                EntryFile {
                    idx: *idx,
                    num: IntValue::from_big(&num),
                    den: match self.field {
                        Field::Rational => Some(IntValue::from_big(&den)),
                        Field::Gf(_) => None,
                    },
                }
            })
            .collect();
        let file = TensorFile {
            dims: self.dims,
            field: match self.field {
                Field::Rational => "rational".into(),
                Field::Gf(_) => "gf".into(),
            },
            p: self.field.order(),
            entries,
        };
        serde_json::to_string_pretty(&file).expect("tensor file serializes")
    }

    /// Parses the JSON tensor file format.
    pub fn from_json(text: &str) -> Result<SparseTensor> {
        let file: TensorFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let field = match (file.field.as_str(), file.p) {
            ("rational", None) => Field::Rational,
            ("rational", Some(_)) => return Err(Error::Format("\"p\" given for a rational tensor".into())),
            ("gf", Some(p)) => Field::gf(p)?,
            ("gf", None) => return Err(Error::Format("gf tensor without \"p\"".into())),
            (other, _) => return Err(Error::Format(format!("unknown field {other:?}"))),
        };
        let mut parsed = Vec::with_capacity(file.entries.len());
        for e in file.entries {
            let num = e.num.to_big()?;
            let den = match (&field, e.den) {
                (_, None) => BigInt::from(1),
                (Field::Rational, Some(d)) => d.to_big()?,
                (Field::Gf(_), Some(_)) => return Err(Error::Format("\"den\" given for a gf entry".into())),
            };
            if den <= BigInt::zero() {
                return Err(Error::Format(format!("non-positive denominator at {:?}", e.idx)));
            }
            parsed.push((e.idx, field.from_fraction(num, den)?));
        }
        SparseTensor::from_entries(file.dims, field, parsed)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SparseTensor> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Format(format!("{}: {e}", path.as_ref().display())))?;
        SparseTensor::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path.as_ref(), self.to_json())
            .map_err(|e| Error::Format(format!("{}: {e}", path.as_ref().display())))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorFile {
    dims: [usize; 3],
    field: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    p: Option<u64>,
    entries: Vec<EntryFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryFile {
    idx: [usize; 3],
    num: IntValue,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    den: Option<IntValue>,
}

/// JSON integer; values outside `i64` are written as decimal strings.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntValue {
    Small(i64),
    Big(String),
}

impl IntValue {
    fn from_big(v: &BigInt) -> IntValue {
        match v.to_i64() {
            Some(x) => IntValue::Small(x),
            None => IntValue::Big(v.to_string()),
        }
    }

    fn to_big(&self) -> Result<BigInt> {
        match self {
            IntValue::Small(x) => Ok(BigInt::from(*x)),
            IntValue::Big(s) => s.parse().map_err(|_| Error::Format(format!("not an integer: {s:?}"))),
        }
    }
}

/// The unit tensor `I_n = Σ e_i ⊗ e_i ⊗ e_i`.
pub fn build_diagonal(n: usize, field: Field) -> Result<SparseTensor> {
    check_dims([n, n, n])?;
    let one = field.one();
    SparseTensor::from_entries([n, n, n], field, (1..=n).map(|i| ([i, i, i], one.clone())))
}

/// The matrix multiplication tensor `⟨n1,n2,n3⟩ = Σ e_{ab} ⊗ e_{bc} ⊗ e_{ca}`
/// of dims `(n1·n2, n2·n3, n3·n1)`.
pub fn build_matmul(n1: usize, n2: usize, n3: usize, field: Field) -> Result<SparseTensor> {
    check_dims([n1, n2, n3])?;
    let dims = [n1 * n2, n2 * n3, n3 * n1];
    let one = field.one();
    let mut entries = Vec::with_capacity(n1 * n2 * n3);
    for a in 1..=n1 {
        for b in 1..=n2 {
            for c in 1..=n3 {
                entries.push(([pair(a, b, n2), pair(b, c, n3), pair(c, a, n1)], one.clone()));
            }
        }
    }
    SparseTensor::from_entries(dims, field, entries)
}

/// The W tensor, support `{(1,1,2), (1,2,1), (2,1,1)}`.
pub fn build_w_tensor(field: Field) -> SparseTensor {
    let one = field.one();
    SparseTensor::from_entries([2, 2, 2], field, [[1, 1, 2], [1, 2, 1], [2, 1, 1]].map(|i| (i, one.clone())))
        .expect("W tensor is well formed")
}
