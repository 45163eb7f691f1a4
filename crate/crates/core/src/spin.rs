//! Dense spin-space oracle for small chains.
//!
//! Basis states are bit strings with spin `i` stored in bit `i`; a set bit
//! means `σ^z_i = -1`. Hamiltonians are assembled from explicit Pauli strings.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::coefficients::{check_chain_len, grid_momentum};
use crate::integrator::{Dop853, Tolerances};
use crate::{CouplingModel, Error, Result, Schedule, C64};

pub const MAX_SPINS: usize = 10;

/// Maximum entry of `A - A^†` tolerated for constructed Hamiltonians.
pub const HERMITICITY_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// `coeff * prod_site op_site`, with at most one operator per site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    coeff: C64,
    flip: usize,
    sign_mask: usize,
}

impl PauliTerm {
    pub fn new(coeff: C64, ops: &[(usize, Pauli)]) -> Self {
        let mut term = Self {
            coeff,
            flip: 0,
            sign_mask: 0,
        };
        for &(site, op) in ops {
            let bit = 1usize << site;
            assert_eq!(
                (term.flip | term.sign_mask) & bit,
                0,
                "site {site} used twice"
            );
            match op {
                Pauli::I => {}
                Pauli::X => term.flip |= bit,
                Pauli::Y => {
                    term.flip |= bit;
                    term.sign_mask |= bit;
                    term.coeff *= C64::i();
                }
                Pauli::Z => term.sign_mask |= bit,
            }
        }
        term
    }

    /// Image of basis state `b`: `term |b> = c |b'>`.
    #[inline]
    pub fn apply(&self, b: usize) -> (usize, C64) {
        let c = if (b & self.sign_mask).count_ones() % 2 == 0 {
            self.coeff
        } else {
            -self.coeff
        };
        (b ^ self.flip, c)
    }

    /// True when the term commutes with the parity `prod_i σ^z_i`.
    pub fn preserves_parity(&self) -> bool {
        self.flip.count_ones() % 2 == 0
    }
}

fn check_spins(chain_len: usize) -> Result<()> {
    check_chain_len(chain_len)?;
    if chain_len > MAX_SPINS {
        return Err(Error::invalid(format!(
            "dense oracle supports N <= {MAX_SPINS}, got {chain_len}"
        )));
    }
    Ok(())
}

fn h0_terms(chain_len: usize, g: f64) -> Vec<PauliTerm> {
    let one = C64::new(-1.0, 0.0);
    let mut terms: Vec<PauliTerm> = (0..chain_len)
        .map(|i| PauliTerm::new(one, &[(i, Pauli::X), ((i + 1) % chain_len, Pauli::X)]))
        .collect();
    terms.extend((0..chain_len).map(|i| PauliTerm::new(one * g, &[(i, Pauli::Z)])));
    terms
}

/// `σ^x_n (prod σ^z) σ^y_{n+m} + σ^y_n (prod σ^z) σ^x_{n+m}` summed over `n`.
fn range_terms(chain_len: usize, m: usize, coeff: f64) -> Vec<PauliTerm> {
    let mut terms = Vec::with_capacity(2 * chain_len);
    for n in 0..chain_len {
        let end = (n + m) % chain_len;
        for (a, b) in [(Pauli::X, Pauli::Y), (Pauli::Y, Pauli::X)] {
            let mut ops = vec![(n, a)];
            ops.extend((1..m).map(|l| ((n + l) % chain_len, Pauli::Z)));
            ops.push((end, b));
            terms.push(PauliTerm::new(C64::new(coeff, 0.0), &ops));
        }
    }
    terms
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    chain_len: usize,
    matrix: DMatrix<C64>,
}

impl DenseOperator {
    pub fn from_terms(chain_len: usize, terms: &[PauliTerm]) -> Self {
        let dim = 1usize << chain_len;
        let mut matrix = DMatrix::zeros(dim, dim);
        for term in terms {
            for b in 0..dim {
                let (row, c) = term.apply(b);
                matrix[(row, b)] += c;
            }
        }
        Self { chain_len, matrix }
    }

    pub fn chain_len(&self) -> usize {
        self.chain_len
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// `max |A - A^†|` over all entries.
    pub fn hermiticity_error(&self) -> f64 {
        let diff = &self.matrix - self.matrix.adjoint();
        diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |[A, P]|` with `P = prod_i σ^z_i`.
    pub fn parity_commutator(&self) -> f64 {
        let dim = self.matrix.nrows();
        let mut worst: f64 = 0.0;
        for c in 0..dim {
            for r in 0..dim {
                // [A, P]_{rc} = A_{rc} (p_c - p_r)
                if parity_sign(r) != parity_sign(c) {
                    worst = worst.max(2.0 * self.matrix[(r, c)].norm());
                }
            }
        }
        worst
    }

    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut values: Vec<f64> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }
}

impl std::ops::Add for DenseOperator {
    type Output = DenseOperator;

    fn add(self, rhs: DenseOperator) -> DenseOperator {
        assert_eq!(self.chain_len, rhs.chain_len);
        DenseOperator {
            chain_len: self.chain_len,
            matrix: self.matrix + rhs.matrix,
        }
    }
}

fn parity_sign(b: usize) -> i32 {
    if b.count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    chain_len: usize,
    amplitudes: DVector<C64>,
}

impl DenseState {
    pub fn chain_len(&self) -> usize {
        self.chain_len
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &DenseState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `<P>` with `P = prod_i σ^z_i`.
    pub fn parity(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(b, a)| parity_sign(b) as f64 * a.norm_sqr())
            .sum()
    }

    /// `<self|A|self>`.
    pub fn expectation(&self, op: &DenseOperator) -> f64 {
        self.amplitudes.dotc(&(op.matrix() * &self.amplitudes)).re
    }
}

/// `H0 = -sum_i (σ^x_i σ^x_{i+1} + g σ^z_i)` with periodic boundaries.
pub fn build_h0(chain_len: usize, g: f64) -> Result<DenseOperator> {
    check_spins(chain_len)?;
    Ok(DenseOperator::from_terms(
        chain_len,
        &h0_terms(chain_len, g),
    ))
}

/// The `(m+1)`-spin operator `H1^[m]`, for `1 <= m <= N/2`.
pub fn h1_range_term(chain_len: usize, m: usize) -> Result<DenseOperator> {
    check_spins(chain_len)?;
    if m == 0 || m > chain_len / 2 {
        return Err(Error::invalid(format!(
            "range m = {m} outside [1, {}]",
            chain_len / 2
        )));
    }
    Ok(DenseOperator::from_terms(
        chain_len,
        &range_terms(chain_len, m, 1.0),
    ))
}

fn h1_terms(chain_len: usize, gdot: f64, couplings: &[f64]) -> Vec<PauliTerm> {
    let half = chain_len / 2;
    let mut terms = Vec::new();
    for (i, &h) in couplings.iter().enumerate() {
        let m = i + 1;
        let weight = if m == half { 0.5 } else { 1.0 };
        if h != 0.0 && gdot != 0.0 {
            terms.extend(range_terms(chain_len, m, -gdot * weight * h));
        }
    }
    terms
}

/// `H1 = -gdot [sum_{m<N/2} h_m H1^[m] + h_{N/2} H1^[N/2] / 2]`.
pub fn build_h1(
    chain_len: usize,
    g: f64,
    gdot: f64,
    coupling: CouplingModel,
) -> Result<DenseOperator> {
    check_spins(chain_len)?;
    let set = coupling.couplings(g, chain_len)?;
    Ok(DenseOperator::from_terms(
        chain_len,
        &h1_terms(chain_len, gdot, set.values()),
    ))
}

pub fn parity_operator(chain_len: usize) -> Result<DenseOperator> {
    check_spins(chain_len)?;
    let all: Vec<(usize, Pauli)> = (0..chain_len).map(|i| (i, Pauli::Z)).collect();
    Ok(DenseOperator::from_terms(
        chain_len,
        &[PauliTerm::new(C64::new(1.0, 0.0), &all)],
    ))
}

/// Basis states of the positive-parity sector, in increasing order.
fn even_sector(chain_len: usize) -> Vec<usize> {
    (0..1usize << chain_len)
        .filter(|b| b.count_ones() % 2 == 0)
        .collect()
}

/// Position of each full-space basis state within the even sector.
fn sector_positions(sector: &[usize], chain_len: usize) -> Vec<usize> {
    let mut pos = vec![usize::MAX; 1 << chain_len];
    for (i, &b) in sector.iter().enumerate() {
        pos[b] = i;
    }
    pos
}

/// Ground state and energy of `H0` within the positive-parity sector. The
/// sector ground level is nondegenerate, so the result is unique up to phase.
fn sector_ground(chain_len: usize, g: f64) -> (f64, DenseState) {
    let sector = even_sector(chain_len);
    let pos = sector_positions(&sector, chain_len);
    let dim = sector.len();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for term in h0_terms(chain_len, g) {
        for (col, &b) in sector.iter().enumerate() {
            let (image, c) = term.apply(b);
            h[(pos[image], col)] += c.re;
        }
    }
    let eig = SymmetricEigen::new(h.clone());
    let (idx, _) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty sector");
    let mut column: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
    let mut energy = eig.eigenvalues[idx];
    // two steps of inverse iteration to polish the eigenvector
    let shifted = &h - DMatrix::<f64>::identity(dim, dim) * energy;
    let lu = shifted.lu();
    for _ in 0..2 {
        match lu.solve(&column) {
            Some(x) if x.iter().all(|v| v.is_finite()) && x.norm() > 0.0 => column = x.normalize(),
            _ => break,
        }
    }
    energy = column.dot(&(&h * &column));
    // fix the global sign so the largest component is positive
    let pivot = column
        .iter()
        .copied()
        .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
    let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
    let mut amplitudes = DVector::zeros(1 << chain_len);
    for (i, &b) in sector.iter().enumerate() {
        amplitudes[b] = C64::new(sign * column[i], 0.0);
    }
    (
        energy,
        DenseState {
            chain_len,
            amplitudes,
        },
    )
}

/// Lowest eigenvector of `H0` with parity `+1`.
pub fn parity_ground_state(chain_len: usize, g: f64) -> Result<DenseState> {
    check_spins(chain_len)?;
    Ok(sector_ground(chain_len, g).1)
}

/// Lowest eigenvalue of `H0` in the positive-parity sector.
pub fn parity_ground_energy(chain_len: usize, g: f64) -> Result<f64> {
    check_spins(chain_len)?;
    Ok(sector_ground(chain_len, g).0)
}

/// Free-fermion ground energy `-2 sum_k sqrt(g^2 - 2g cos k + 1)` over the grid.
pub fn dispersion_ground_energy(chain_len: usize, g: f64) -> Result<f64> {
    check_chain_len(chain_len)?;
    Ok(-2.0
        * (0..chain_len / 2)
            .map(|j| (g * g - 2.0 * g * grid_momentum(j, chain_len).cos() + 1.0).sqrt())
            .sum::<f64>())
}

/// Sparse operator on the even sector, stored as `(row, col, value)` triples.
struct SectorOperator {
    entries: Vec<(usize, usize, C64)>,
}

impl SectorOperator {
    fn new(terms: &[PauliTerm], sector: &[usize], pos: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(terms.len() * sector.len());
        for term in terms {
            for (col, &b) in sector.iter().enumerate() {
                let (image, c) = term.apply(b);
                entries.push((pos[image], col, c));
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        Self { entries }
    }

    #[inline]
    fn apply_add(&self, scale: f64, y: &[C64], out: &mut [C64]) {
        for &(r, c, v) in &self.entries {
            out[r] += v * y[c] * scale;
        }
    }
}

/// Evolves the positive-parity ground state of `H0(g0)` under
/// `H0(g(t)) + H1(g(t), g'(t))` and returns `|<GS(gf)|psi(T)>|^2`.
pub fn dense_evolve_pgs(
    chain_len: usize,
    schedule: &Schedule,
    coupling: CouplingModel,
    tolerances: Tolerances,
) -> Result<f64> {
    check_spins(chain_len)?;
    coupling.validate(chain_len)?;
    let sector = even_sector(chain_len);
    let pos = sector_positions(&sector, chain_len);
    let one = C64::new(1.0, 0.0);

    let bonds: Vec<PauliTerm> = (0..chain_len)
        .map(|i| PauliTerm::new(one, &[(i, Pauli::X), ((i + 1) % chain_len, Pauli::X)]))
        .collect();
    let field: Vec<PauliTerm> = (0..chain_len)
        .map(|i| PauliTerm::new(one, &[(i, Pauli::Z)]))
        .collect();
    let bond_op = SectorOperator::new(&bonds, &sector, &pos);
    let field_op = SectorOperator::new(&field, &sector, &pos);
    let half = chain_len / 2;
    let ranges: Vec<SectorOperator> = (1..=half)
        .map(|m| {
            let weight = if m == half { 0.5 } else { 1.0 };
            SectorOperator::new(&range_terms(chain_len, m, weight), &sector, &pos)
        })
        .collect();
    let mut couplings = vec![0.0; half];
    let mut hy = vec![C64::new(0.0, 0.0); sector.len()];

    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
        let g = schedule.field_at(t);
        let rate = schedule.rate_at(t);
        hy.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        bond_op.apply_add(-1.0, y, &mut hy);
        field_op.apply_add(-g, y, &mut hy);
        if rate != 0.0 {
            coupling.fill(g, chain_len, &mut couplings);
            for (op, &h) in ranges.iter().zip(&couplings) {
                if h != 0.0 {
                    op.apply_add(-rate * h, y, &mut hy);
                }
            }
        }
        for (d, z) in dy.iter_mut().zip(&hy) {
            *d = C64::new(z.im, -z.re);
        }
    };

    let initial = parity_ground_state(chain_len, schedule.initial())?;
    let mut y: Vec<C64> = sector.iter().map(|&b| initial.amplitudes[b]).collect();
    let mut solver = Dop853::new(sector.len(), tolerances);
    solver.integrate(rhs, 0.0, schedule.duration(), &mut y)?;

    let target = parity_ground_state(chain_len, schedule.target())?;
    let overlap: C64 = sector
        .iter()
        .zip(&y)
        .map(|(&b, a)| target.amplitudes[b].conj() * a)
        .sum();
    Ok(overlap.norm_sqr())
}
