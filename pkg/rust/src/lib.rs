//! Native BLS12-381 kernels for `abesd.pairing`.
//!
//! Mirrors the API of `abesd/pairing/_pure.py` exactly: same classes, same
//! byte encodings, same pairing normalisation. Group arithmetic is backed
//! by arkworks.

use ark_bls12_381::{Bls12_381, Fq, Fq12, Fr, G1Affine, G1Projective, G2Affine, G2Projective};
use ark_ec::pairing::Pairing;
use ark_ec::{AdditiveGroup, AffineRepr, CurveGroup, PrimeGroup};
use ark_ff::fields::CyclotomicMultSubgroup;
use ark_ff::{BigInteger, Field, One, PrimeField, Zero};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use num_bigint::{BigInt, Sign};
use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyTuple};
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

fn scalar_from(k: &BigInt) -> Fr {
    let (sign, mag) = k.to_bytes_le();
    let s = Fr::from_le_bytes_mod_order(&mag);
    if sign == Sign::Minus {
        -s
    } else {
        s
    }
}

fn limbs_from(k: &BigInt) -> PyResult<Vec<u64>> {
    if k.sign() == Sign::Minus {
        return Err(PyValueError::new_err("scalar must be non-negative"));
    }
    Ok(k.to_u64_digits().1)
}

fn bytes_hash(b: &[u8]) -> isize {
    let mut h = DefaultHasher::new();
    b.hash(&mut h);
    h.finish() as isize
}

fn fq_to_be(x: &Fq, out: &mut Vec<u8>) {
    out.extend_from_slice(&x.into_bigint().to_bytes_be());
}

fn fq_from_be(b: &[u8]) -> PyResult<Fq> {
    let x = Fq::from_be_bytes_mod_order(b);
    if x.into_bigint().to_bytes_be() != b {
        return Err(PyValueError::new_err("coordinate not reduced"));
    }
    Ok(x)
}

macro_rules! point_class {
    ($name:ident, $proj:ty, $aff:ty, $size:expr, $pyname:literal) => {
        #[pyclass(frozen, module = "abesd._native", name = $pyname)]
        pub struct $name {
            inner: $proj,
        }

        impl $name {
            fn decode(data: &[u8], checked: bool) -> PyResult<$proj> {
                if data.len() != $size {
                    return Err(PyValueError::new_err(format!(
                        "expected {} bytes, got {}",
                        $size,
                        data.len()
                    )));
                }
                let res = if checked {
                    <$aff>::deserialize_compressed(data)
                } else {
                    <$aff>::deserialize_compressed_unchecked(data)
                };
                let aff = res.map_err(|e| PyValueError::new_err(format!("invalid point: {e}")))?;
                Ok(aff.into_group())
            }

            fn encode(&self) -> Vec<u8> {
                let mut buf = Vec::with_capacity($size);
                self.inner
                    .into_affine()
                    .serialize_compressed(&mut buf)
                    .expect("serialization into a Vec cannot fail");
                buf
            }
        }

        #[pymethods]
        impl $name {
            #[staticmethod]
            fn generator() -> Self {
                Self { inner: <$proj>::generator() }
            }

            #[staticmethod]
            fn identity() -> Self {
                Self { inner: <$proj>::zero() }
            }

            #[staticmethod]
            fn from_bytes(data: &[u8]) -> PyResult<Self> {
                Ok(Self { inner: Self::decode(data, true)? })
            }

            #[staticmethod]
            fn _from_bytes_unchecked(data: &[u8]) -> PyResult<Self> {
                Ok(Self { inner: Self::decode(data, false)? })
            }

            fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
                PyBytes::new(py, &self.encode())
            }

            fn is_identity(&self) -> bool {
                self.inner.is_zero()
            }

            fn _unchecked_mul(&self, k: BigInt) -> PyResult<Self> {
                // plain double-and-add: mul_bigint reduces mod r and uses the
                // GLV endomorphism, both wrong outside the prime-order subgroup
                let limbs = limbs_from(&k)?;
                let mut acc = <$proj>::zero();
                for limb in limbs.iter().rev() {
                    for bit in (0..64).rev() {
                        acc.double_in_place();
                        if (limb >> bit) & 1 == 1 {
                            acc += self.inner;
                        }
                    }
                }
                Ok(Self { inner: acc })
            }

            fn __add__(&self, other: PyRef<'_, Self>) -> Self {
                Self { inner: self.inner + other.inner }
            }

            fn __sub__(&self, other: PyRef<'_, Self>) -> Self {
                Self { inner: self.inner - other.inner }
            }

            fn __neg__(&self) -> Self {
                Self { inner: -self.inner }
            }

            fn __mul__(&self, k: BigInt) -> Self {
                Self { inner: self.inner * scalar_from(&k) }
            }

            fn __rmul__(&self, k: BigInt) -> Self {
                Self { inner: self.inner * scalar_from(&k) }
            }

            fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
                match other.cast::<Self>() {
                    Ok(o) => self.inner == o.get().inner,
                    Err(_) => false,
                }
            }

            fn __hash__(&self) -> isize {
                bytes_hash(&self.encode())
            }

            fn __repr__(&self) -> String {
                let hex: String = self.encode().iter().map(|b| format!("{b:02x}")).collect();
                format!("{}({})", $pyname, hex)
            }
        }
    };
}

point_class!(PyG1, G1Projective, G1Affine, 48, "G1");
point_class!(PyG2, G2Projective, G2Affine, 96, "G2");

#[pyclass(frozen, module = "abesd._native", name = "GT")]
pub struct PyGT {
    inner: Fq12,
}

impl PyGT {
    fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(576);
        for c6 in [&self.inner.c0, &self.inner.c1] {
            for c2 in [&c6.c0, &c6.c1, &c6.c2] {
                fq_to_be(&c2.c0, &mut out);
                fq_to_be(&c2.c1, &mut out);
            }
        }
        out
    }
}

#[pymethods]
impl PyGT {
    #[staticmethod]
    fn identity() -> Self {
        Self { inner: Fq12::one() }
    }

    fn is_identity(&self) -> bool {
        self.inner.is_one()
    }

    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        if data.len() != 576 {
            return Err(PyValueError::new_err(format!(
                "expected 576 bytes, got {}",
                data.len()
            )));
        }
        let mut xs = Vec::with_capacity(12);
        for chunk in data.chunks(48) {
            xs.push(fq_from_be(chunk)?);
        }
        let mut v = Fq12::zero();
        v.c0.c0.c0 = xs[0];
        v.c0.c0.c1 = xs[1];
        v.c0.c1.c0 = xs[2];
        v.c0.c1.c1 = xs[3];
        v.c0.c2.c0 = xs[4];
        v.c0.c2.c1 = xs[5];
        v.c1.c0.c0 = xs[6];
        v.c1.c0.c1 = xs[7];
        v.c1.c1.c0 = xs[8];
        v.c1.c1.c1 = xs[9];
        v.c1.c2.c0 = xs[10];
        v.c1.c2.c1 = xs[11];
        if v.is_zero() || !v.pow(Fr::MODULUS).is_one() {
            return Err(PyValueError::new_err("element is not in the target group"));
        }
        Ok(Self { inner: v })
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.encode())
    }

    fn __mul__(&self, other: PyRef<'_, Self>) -> Self {
        Self { inner: self.inner * other.inner }
    }

    fn __truediv__(&self, other: PyRef<'_, Self>) -> Self {
        Self { inner: self.inner * other.inner.cyclotomic_inverse().unwrap() }
    }

    fn inverse(&self) -> Self {
        Self { inner: self.inner.cyclotomic_inverse().unwrap() }
    }

    fn __pow__(&self, k: BigInt, modulo: Option<Py<PyAny>>) -> PyResult<Self> {
        if modulo.is_some() {
            return Err(PyTypeError::new_err("three-argument pow is not supported"));
        }
        let e = scalar_from(&k).into_bigint();
        Ok(Self { inner: self.inner.cyclotomic_exp(e) })
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        match other.cast::<Self>() {
            Ok(o) => self.inner == o.get().inner,
            Err(_) => false,
        }
    }

    fn __hash__(&self) -> isize {
        bytes_hash(&self.encode())
    }

    fn __repr__(&self) -> String {
        let hex: String = self.encode()[..16].iter().map(|b| format!("{b:02x}")).collect();
        format!("GT({hex}...)")
    }
}

#[pyfunction]
fn pairing(p: PyRef<'_, PyG1>, q: PyRef<'_, PyG2>) -> PyGT {
    let out = Bls12_381::pairing(p.inner.into_affine(), q.inner.into_affine());
    PyGT { inner: out.0 }
}

#[pyfunction]
fn multi_pairing(pairs: &Bound<'_, PyAny>) -> PyResult<PyGT> {
    let mut g1s = Vec::new();
    let mut g2s = Vec::new();
    for item in pairs.try_iter()? {
        let item = item?;
        let tup = item.cast::<PyTuple>()?;
        if tup.len() != 2 {
            return Err(PyValueError::new_err("expected (G1, G2) pairs"));
        }
        let a = tup.get_item(0)?;
        let b = tup.get_item(1)?;
        g1s.push(a.cast::<PyG1>()?.get().inner);
        g2s.push(b.cast::<PyG2>()?.get().inner);
    }
    if g1s.is_empty() {
        return Ok(PyGT { inner: Fq12::one() });
    }
    let a = G1Projective::normalize_batch(&g1s);
    let b = G2Projective::normalize_batch(&g2s);
    Ok(PyGT { inner: Bls12_381::multi_pairing(a, b).0 })
}

#[pymodule]
fn _native(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyG1>()?;
    m.add_class::<PyG2>()?;
    m.add_class::<PyGT>()?;
    m.add_function(wrap_pyfunction!(pairing, m)?)?;
    m.add_function(wrap_pyfunction!(multi_pairing, m)?)?;
    m.add("R", num_bigint::BigUint::from_bytes_le(&Fr::MODULUS.to_bytes_le()))?;
    Ok(())
}
