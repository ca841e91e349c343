//! Points of `SL_N(R)/SL_N(Z)` in exact arithmetic, the rational subspaces
//! they carry, and the block-scalar torus acting on them.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::enumeration;
use crate::rational_linalg::{
    congruence, det, gram_det, hnf, hnf_basis, in_row_space, integer_kernel, inverse, is_saturated,
    lll_gram, rank, rref, saturate, IntMatrix, RatMatrix,
};
use crate::rat::{Int, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("basis must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("matrix is not unimodular: |det| = {0}")]
    NotUnimodular(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("torus element invalid: {0}")]
    NotInTorus(String),
    #[error("subspace basis is not a saturated Hermite normal form")]
    NotCanonical,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("block {index} ({start}..{end}) is empty or out of range")]
    BadBlock { index: usize, start: usize, end: usize },
    #[error("blocks do not partition 0..{n}: coordinate {coordinate} is {problem}")]
    NotPartition { n: usize, coordinate: usize, problem: &'static str },
    #[error("generator {index} has shape {rows}x{cols}, expected {n}x{n}")]
    GeneratorShape { index: usize, rows: usize, cols: usize, n: usize },
    #[error("generator {index} does not preserve block {block}")]
    GeneratorNotBlockDiagonal { index: usize, block: usize },
    #[error("generator {index} has determinant {det}, expected 1")]
    GeneratorDeterminant { index: usize, det: String },
}

/// A unimodular lattice `basis * Z^N`; columns of `basis` are the generators.
#[derive(Clone, PartialEq, Eq)]
pub struct UnimodularLattice {
    basis: RatMatrix,
    det_sign: i8,
}

impl fmt::Debug for UnimodularLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UnimodularLattice({:?})", self.basis)
    }
}

impl UnimodularLattice {
    pub fn new(basis: RatMatrix) -> Result<Self, LatticeError> {
        if basis.rows() != basis.cols() {
            return Err(LatticeError::NotSquare { rows: basis.rows(), cols: basis.cols() });
        }
        if basis.rows() < 2 {
            return Err(LatticeError::DimensionTooSmall(basis.rows()));
        }
        let d = det(&basis);
        if !d.abs().is_one() {
            return Err(LatticeError::NotUnimodular(crate::rat::format_rat(&d.abs())));
        }
        let det_sign = if d.is_positive() { 1 } else { -1 };
        Ok(UnimodularLattice { basis, det_sign })
    }

    /// The standard lattice `Z^n`.
    pub fn standard(n: usize) -> Self {
        UnimodularLattice::new(RatMatrix::identity(n)).expect("identity is unimodular")
    }

    pub fn diagonal(entries: &[Rat]) -> Result<Self, LatticeError> {
        UnimodularLattice::new(RatMatrix::diagonal(entries))
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn det_sign(&self) -> i8 {
        self.det_sign
    }

    /// Gram matrix `basis^T basis` of the generators.
    pub fn gram(&self) -> RatMatrix {
        congruence(&self.basis.transpose(), &RatMatrix::identity(self.dim()))
    }

    /// Real coordinates of the lattice vector with integer coordinates `coords`.
    pub fn vector(&self, coords: &[Int]) -> Vec<Rat> {
        self.basis.mul_int_vec(coords)
    }

    /// Real coordinates of the rows of `w`'s integral basis.
    pub fn real_basis(&self, w: &RationalSubspace) -> Vec<Vec<Rat>> {
        w.basis.iter_rows().map(|r| self.vector(r)).collect()
    }

    /// The same lattice presented with basis `basis * u` for `u` in `GL_N(Z)`.
    pub fn change_basis(&self, u: &IntMatrix) -> Result<Self, LatticeError> {
        UnimodularLattice::new(&self.basis * &u.to_rat())
    }

    /// An LLL-reduced basis of the same lattice, and the integer matrix `u` with
    /// `reduced.basis = self.basis * u`.
    pub fn lll_reduced(&self) -> (UnimodularLattice, IntMatrix) {
        let red = lll_gram(&self.gram());
        let u = red.t.transpose();
        let lat = self.change_basis(&u).expect("LLL transform is unimodular");
        (lat, u)
    }

    /// Matrix of `g` acting in lattice coordinates, `basis^{-1} g basis`.
    pub fn in_lattice_coordinates(&self, g: &RatMatrix) -> RatMatrix {
        let inv = inverse(&self.basis).expect("basis is invertible");
        &(&inv * g) * &self.basis
    }
}

/// A Λ-rational subspace `W`, stored as the saturated Hermite normal form of
/// the integer coordinates (with respect to the lattice basis) of a basis of
/// `Λ ∩ W`. The zero subspace is not representable.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalSubspace {
    ambient: usize,
    basis: IntMatrix,
}

impl fmt::Debug for RationalSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalSubspace({:?})", self.basis)
    }
}

impl RationalSubspace {
    /// Saturation of the integer row span of `rows`; `None` for the zero space.
    pub fn from_generators(rows: &IntMatrix) -> Option<Self> {
        let basis = saturate(rows);
        (basis.rows() > 0).then(|| RationalSubspace { ambient: rows.cols(), basis })
    }

    /// Subspace spanned over Q by rational coordinate rows.
    pub fn from_rational_rows(rows: &RatMatrix) -> Option<Self> {
        let ints = IntMatrix::from_rows(
            rows.cols(),
            rows.iter_rows().map(|r| {
                let den = r.iter().fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
                r.iter().map(|x| (x * &den).to_integer()).collect()
            }),
        );
        Self::from_generators(&ints)
    }

    /// Accepts an already canonical basis, rejecting anything that is not a
    /// saturated Hermite normal form.
    pub fn from_canonical_basis(basis: IntMatrix) -> Result<Self, LatticeError> {
        if basis.rows() == 0 || basis.rows() > basis.cols() {
            return Err(LatticeError::NotCanonical);
        }
        if hnf_basis(&basis) != basis || !is_saturated(&basis) {
            return Err(LatticeError::NotCanonical);
        }
        Ok(RationalSubspace { ambient: basis.cols(), basis })
    }

    pub fn full(n: usize) -> Self {
        RationalSubspace { ambient: n, basis: IntMatrix::identity(n) }
    }

    /// Span of the standard coordinate vectors `e_i`, `i` in `coords`.
    pub fn coordinate(n: usize, coords: impl IntoIterator<Item = usize>) -> Option<Self> {
        let rows = coords.into_iter().map(|i| {
            let mut r = vec![BigInt::zero(); n];
            r[i] = BigInt::one();
            r
        });
        Self::from_generators(&IntMatrix::from_rows(n, rows))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn integral_basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// Reduced row echelon form of the basis over Q.
    pub fn echelon(&self) -> RatMatrix {
        rref(&self.basis.to_rat())
    }

    pub fn contains_vector(&self, v: &[Int]) -> bool {
        let row: Vec<Rat> = v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        in_row_space(&self.echelon(), &row)
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &RationalSubspace) -> bool {
        let e = self.echelon();
        other.basis.iter_rows().all(|r| {
            let row: Vec<Rat> = r.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            in_row_space(&e, &row)
        })
    }

    fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter_rows()
            .map(|r| r.iter().position(|x| !x.is_zero()).expect("non-zero HNF row"))
            .collect()
    }

    /// Deterministic tie-break order: smaller dimension first, then pivot
    /// columns ascending, then the flattened HNF entries lexicographically.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.dim()
            .cmp(&other.dim())
            .then_with(|| self.pivots().cmp(&other.pivots()))
            .then_with(|| self.basis.entries().cmp(other.basis.entries()))
    }
}

/// The block decomposition `R^N = ⊕ V_i` together with generators of the
/// semisimple part `M`. The torus `S` is the full block-scalar torus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    n: usize,
    blocks: Vec<Range<usize>>,
    m_generators: Vec<RatMatrix>,
}

impl Scenario {
    /// `blocks` are half-open, 0-based coordinate ranges.
    pub fn new(
        n: usize,
        blocks: Vec<Range<usize>>,
        m_generators: Vec<RatMatrix>,
    ) -> Result<Self, ScenarioError> {
        if n < 2 {
            return Err(ScenarioError::DimensionTooSmall(n));
        }
        let mut owner = vec![None; n];
        for (index, b) in blocks.iter().enumerate() {
            if b.start >= b.end || b.end > n {
                return Err(ScenarioError::BadBlock { index, start: b.start, end: b.end });
            }
            for c in b.clone() {
                if owner[c].is_some() {
                    return Err(ScenarioError::NotPartition { n, coordinate: c, problem: "covered twice" });
                }
                owner[c] = Some(index);
            }
        }
        if let Some(c) = owner.iter().position(Option::is_none) {
            return Err(ScenarioError::NotPartition { n, coordinate: c, problem: "not covered" });
        }
        for (index, g) in m_generators.iter().enumerate() {
            if g.rows() != n || g.cols() != n {
                return Err(ScenarioError::GeneratorShape { index, rows: g.rows(), cols: g.cols(), n });
            }
            for i in 0..n {
                for j in 0..n {
                    if owner[i] != owner[j] && !g[(i, j)].is_zero() {
                        return Err(ScenarioError::GeneratorNotBlockDiagonal {
                            index,
                            block: owner[j].unwrap(),
                        });
                    }
                }
            }
            let d = det(g);
            if !d.is_one() {
                return Err(ScenarioError::GeneratorDeterminant { index, det: crate::rat::format_rat(&d) });
            }
        }
        Ok(Scenario { n, blocks, m_generators })
    }

    /// `M` trivial and `S` the full diagonal torus.
    pub fn trivial(n: usize) -> Self {
        Scenario::new(n, (0..n).map(|i| i..i + 1).collect(), vec![]).expect("valid")
    }

    /// `R^4 = R ⊕ R^3`, with `M = 1 × SO(2,1)` generated by a Pythagorean
    /// rotation and a rational boost, both preserving `x² + y² - z²`.
    pub fn sl4_so21() -> Self {
        let r = |n, d| BigRational::new(BigInt::from(n), BigInt::from(d));
        let embed = |m: [[Rat; 3]; 3]| {
            RatMatrix::from_fn(4, 4, |i, j| match (i, j) {
                (0, 0) => Rat::one(),
                (0, _) | (_, 0) => Rat::zero(),
                _ => m[i - 1][j - 1].clone(),
            })
        };
        let rotation = embed([
            [r(3, 5), r(-4, 5), r(0, 1)],
            [r(4, 5), r(3, 5), r(0, 1)],
            [r(0, 1), r(0, 1), r(1, 1)],
        ]);
        let boost = embed([
            [r(5, 4), r(0, 1), r(3, 4)],
            [r(0, 1), r(1, 1), r(0, 1)],
            [r(3, 4), r(0, 1), r(5, 4)],
        ]);
        Scenario::new(4, vec![0..1, 1..4], vec![rotation, boost]).expect("valid")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    pub fn m_generators(&self) -> &[RatMatrix] {
        &self.m_generators
    }

    pub fn torus_rank(&self) -> usize {
        self.blocks.len() - 1
    }

    /// Pairs of equal-dimension blocks on which every generator of `M` has the
    /// same trace. Such blocks may be isomorphic `M`-representations, in which
    /// case the stable subspaces are not just sums of blocks. This is a
    /// heuristic check only.
    pub fn isomorphism_warnings(&self) -> Vec<(usize, usize)> {
        if self.m_generators.is_empty() {
            return vec![];
        }
        let trace = |g: &RatMatrix, b: &Range<usize>| b.clone().fold(Rat::zero(), |acc, i| acc + &g[(i, i)]);
        let mut out = vec![];
        for a in 0..self.blocks.len() {
            for b in a + 1..self.blocks.len() {
                let (ba, bb) = (&self.blocks[a], &self.blocks[b]);
                if ba.len() == bb.len()
                    && self.m_generators.iter().all(|g| trace(g, ba) == trace(g, bb))
                {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// `s ∈ S`: one positive scalar per block with `∏ s_i^{dim V_i} = 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct TorusElement {
    scalars: Vec<Rat>,
    dims: Vec<usize>,
}

impl fmt::Debug for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.scalars.iter().map(|s| s.to_string()).collect();
        write!(f, "TorusElement[{}]", parts.join(", "))
    }
}

impl TorusElement {
    pub fn new(scalars: Vec<Rat>, dims: Vec<usize>) -> Result<Self, LatticeError> {
        if scalars.len() != dims.len() {
            return Err(LatticeError::DimensionMismatch { expected: dims.len(), got: scalars.len() });
        }
        if let Some(s) = scalars.iter().find(|s| !s.is_positive()) {
            return Err(LatticeError::NotInTorus(format!("non-positive scalar {s}")));
        }
        let d = scalars
            .iter()
            .zip(&dims)
            .fold(Rat::one(), |acc, (s, &k)| acc * s.pow(k as i32));
        if !d.is_one() {
            return Err(LatticeError::NotInTorus(format!("determinant {d}")));
        }
        Ok(TorusElement { scalars, dims })
    }

    pub fn for_scenario(sc: &Scenario, scalars: Vec<Rat>) -> Result<Self, LatticeError> {
        TorusElement::new(scalars, sc.block_dims())
    }

    pub fn identity(sc: &Scenario) -> Self {
        TorusElement { scalars: vec![Rat::one(); sc.blocks.len()], dims: sc.block_dims() }
    }

    pub fn scalars(&self) -> &[Rat] {
        &self.scalars
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.dims
    }

    /// Diagonal entries of `s` acting on `R^N`, block scalar repeated per
    /// coordinate.
    pub fn diagonal(&self) -> Vec<Rat> {
        self.scalars
            .iter()
            .zip(&self.dims)
            .flat_map(|(s, &k)| std::iter::repeat_n(s.clone(), k))
            .collect()
    }

    pub fn matrix(&self) -> RatMatrix {
        RatMatrix::diagonal(&self.diagonal())
    }

    pub fn inverse(&self) -> Self {
        TorusElement { scalars: self.scalars.iter().map(|s| s.recip()).collect(), dims: self.dims.clone() }
    }

    /// `self * other` (both diagonal, so the order does not matter).
    pub fn compose(&self, other: &TorusElement) -> Self {
        assert_eq!(self.dims, other.dims);
        TorusElement {
            scalars: self.scalars.iter().zip(&other.scalars).map(|(a, b)| a * b).collect(),
            dims: self.dims.clone(),
        }
    }

    /// `s · Λ`: each coordinate row of the basis scaled by its block scalar.
    pub fn apply(&self, lat: &UnimodularLattice) -> UnimodularLattice {
        let d = self.diagonal();
        assert_eq!(d.len(), lat.dim());
        let basis = RatMatrix::from_fn(lat.dim(), lat.dim(), |i, j| &d[i] * &lat.basis[(i, j)]);
        UnimodularLattice { basis, det_sign: lat.det_sign }
    }

    pub fn apply_vector(&self, v: &[Rat]) -> Vec<Rat> {
        self.diagonal().iter().zip(v).map(|(s, x)| s * x).collect()
    }
}

/// Squared covolume `‖Λ_W‖²` of `Λ ∩ W`.
pub fn covolume_sq(lat: &UnimodularLattice, w: &RationalSubspace) -> Rat {
    assert_eq!(w.ambient(), lat.dim());
    gram_det(&lat.real_basis(w)).expect("saturated basis rows are independent")
}

/// Squared covolume of the lattice spanned by the given integer coordinate
/// rows (not saturated).
pub fn sublattice_covolume_sq(lat: &UnimodularLattice, rows: &IntMatrix) -> Rat {
    let b = hnf_basis(rows);
    let vs: Vec<Vec<Rat>> = b.iter_rows().map(|r| lat.vector(r)).collect();
    gram_det(&vs).expect("HNF rows are independent")
}

/// Squared covolume of `Λ_{W1} + Λ_{W2}` as a lattice, without saturating.
pub fn unsaturated_sum_covolume_sq(lat: &UnimodularLattice, w1: &RationalSubspace, w2: &RationalSubspace) -> Rat {
    sublattice_covolume_sq(lat, &w1.basis.vstack(&w2.basis))
}

/// `W1 + W2`, saturated.
pub fn subspace_sum(w1: &RationalSubspace, w2: &RationalSubspace) -> RationalSubspace {
    assert_eq!(w1.ambient, w2.ambient);
    RationalSubspace::from_generators(&w1.basis.vstack(&w2.basis)).expect("sum of non-zero spaces")
}

/// `W1 ∩ W2`, or `None` for the zero space.
pub fn subspace_intersect(w1: &RationalSubspace, w2: &RationalSubspace) -> Option<RationalSubspace> {
    assert_eq!(w1.ambient, w2.ambient);
    // rows (a, b) with a*H1 + b*H2 = 0; then a*H1 spans the intersection
    let stacked = w1.basis.vstack(&w2.basis);
    let k = integer_kernel(&stacked.transpose());
    if k.rows() == 0 {
        return None;
    }
    let a = k.select_cols(&(0..w1.dim()).collect::<Vec<_>>());
    RationalSubspace::from_generators(&(&a * &w1.basis))
}

/// Whether every generator of `M` maps `W` onto itself.
pub fn is_m_stable(w: &RationalSubspace, lat: &UnimodularLattice, sc: &Scenario) -> bool {
    assert_eq!(w.ambient(), lat.dim());
    assert_eq!(sc.dim(), lat.dim());
    if sc.m_generators.is_empty() {
        return true;
    }
    let e = w.echelon();
    let rows = w.basis.to_rat();
    sc.m_generators.iter().all(|g| {
        let a = lat.in_lattice_coordinates(g);
        rows.iter_rows().all(|r| in_row_space(&e, &a.mul_vec(r)))
    })
}

/// `g · Λ` for `|det g| = 1`.
pub fn apply_group(g: &RatMatrix, lat: &UnimodularLattice) -> Result<UnimodularLattice, LatticeError> {
    if g.rows() != lat.dim() || g.cols() != lat.dim() {
        return Err(LatticeError::DimensionMismatch { expected: lat.dim(), got: g.rows() });
    }
    let d = det(g);
    if !d.abs().is_one() {
        return Err(LatticeError::NotUnimodular(crate::rat::format_rat(&d.abs())));
    }
    UnimodularLattice::new(g * &lat.basis)
}

/// Exact squared length of a shortest non-zero vector.
pub fn shortest_vector_sq(lat: &UnimodularLattice) -> Rat {
    enumeration::shortest_in_gram(&lat.gram()).1
}

/// Rank of a list of integer coordinate rows over Q.
pub fn coordinate_rank(rows: &IntMatrix) -> usize {
    rank(&rows.to_rat())
}

/// Hermite normal form of integer coordinate rows (re-exported for callers that
/// only hold a lattice).
pub fn canonical_rows(rows: &IntMatrix) -> IntMatrix {
    hnf(rows).h
}
