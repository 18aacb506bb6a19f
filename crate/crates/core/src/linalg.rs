//! Minimal symmetric linear algebra used by the solvers: sparse and dense
//! symmetric operators, a locked/restarted Lanczos for extremal eigenpairs,
//! a dense Householder+QL eigensolver for full spectra, and conjugate
//! gradients for SPD solves.
//!
//! Nothing here aims to be a general-purpose eigensolver API; it is exactly
//! what the synchronization methods need.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::SignedGraph;

/// A real symmetric linear operator.
pub trait SymOp {
    fn dim(&self) -> usize;
    /// y = A x. `y` is overwritten.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Sparse symmetric matrix stored as per-row adjacency plus a diagonal.
#[derive(Debug, Clone)]
pub struct SymSparse {
    n: usize,
    rows: Vec<Vec<(u32, f64)>>,
    diag: Vec<f64>,
}

impl SymSparse {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            rows: vec![Vec::new(); n],
            diag: vec![0.0; n],
        }
    }

    /// Off-diagonal entries of the measurement matrix; diagonal left at zero.
    pub fn from_graph(g: &SignedGraph) -> Self {
        let mut m = Self::zeros(g.n());
        for &(i, j, w) in g.edges() {
            m.rows[i as usize].push((j, w));
            m.rows[j as usize].push((i, w));
        }
        m
    }

    /// D^{-1/2} Z D^{-1/2} for the given positive degree vector.
    pub fn normalized_from_graph(g: &SignedGraph, inv_sqrt_deg: &[f64]) -> Self {
        let mut m = Self::zeros(g.n());
        for &(i, j, w) in g.edges() {
            let s = w * inv_sqrt_deg[i as usize] * inv_sqrt_deg[j as usize];
            m.rows[i as usize].push((j, s));
            m.rows[j as usize].push((i, s));
        }
        m
    }

    /// Adds w to entries (i, j) and (j, i).
    pub fn add_sym(&mut self, i: usize, j: usize, w: f64) {
        debug_assert_ne!(i, j);
        self.rows[i].push((j as u32, w));
        self.rows[j].push((i as u32, w));
    }

    pub fn set_diag(&mut self, i: usize, v: f64) {
        self.diag[i] = v;
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.diag[i]
    }

    /// Off-diagonal entries of row i.
    pub fn neighbors(&self, i: usize) -> &[(u32, f64)] {
        &self.rows[i]
    }

    /// Gershgorin-style bound: max_i (|d_i| + Σ_j |a_ij|) ≥ ρ(A).
    pub fn norm_bound(&self) -> f64 {
        (0..self.n)
            .map(|i| self.diag[i].abs() + self.rows[i].iter().map(|e| e.1.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// A[i] · x for a single row.
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let mut acc = self.diag[i] * x[i];
        for &(j, w) in &self.rows[i] {
            acc += w * x[j as usize];
        }
        acc
    }
}

impl SymOp for SymSparse {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            y[i] = self.row_dot(i, x);
        }
    }
}

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone)]
pub struct DenseSym {
    n: usize,
    a: Vec<f64>,
}

impl DenseSym {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![0.0; n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.a[i * n + j] = v;
                m.a[j * n + i] = v;
            }
        }
        m
    }

    /// Dense copy of a signed graph with the given diagonal value.
    pub fn from_graph(g: &SignedGraph, diag: f64) -> Self {
        let n = g.n();
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = diag;
        }
        for &(i, j, w) in g.edges() {
            m.a[i as usize * n + j as usize] = w;
            m.a[j as usize * n + i as usize] = w;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
        self.a[j * self.n + i] = v;
    }
}

impl SymOp for DenseSym {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let row = &self.a[i * self.n..(i + 1) * self.n];
            y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

/// αA + βI wrapper, used for spectral shifts.
pub struct ShiftedOp<'a, O: SymOp> {
    pub inner: &'a O,
    pub alpha: f64,
    pub beta: f64,
}

impl<O: SymOp> SymOp for ShiftedOp<'_, O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.inner.apply(x, y);
        for i in 0..x.len() {
            y[i] = self.alpha * y[i] + self.beta * x[i];
        }
    }
}

/// Gram operator V Vᵀ for a row-major n×r factor.
pub struct GramOp<'a> {
    pub factor: &'a [f64],
    pub n: usize,
    pub r: usize,
}

impl SymOp for GramOp<'_> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let r = self.r;
        let mut t = vec![0.0; r];
        for i in 0..self.n {
            let row = &self.factor[i * r..(i + 1) * r];
            let xi = x[i];
            for (tk, v) in t.iter_mut().zip(row) {
                *tk += v * xi;
            }
        }
        for i in 0..self.n {
            let row = &self.factor[i * r..(i + 1) * r];
            y[i] = row.iter().zip(&t).map(|(a, b)| a * b).sum();
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn scale_in_place(a: &mut [f64], s: f64) {
    for v in a {
        *v *= s;
    }
}

/// Flips the vector so its largest-magnitude entry is positive; ties broken
/// by lowest index. Keeps eigenvector orientation deterministic.
pub fn fix_orientation(v: &mut [f64]) {
    let mut idx = 0;
    let mut best = -1.0;
    for (i, &x) in v.iter().enumerate() {
        if x.abs() > best {
            best = x.abs();
            idx = i;
        }
    }
    if v[idx] < 0.0 {
        scale_in_place(v, -1.0);
    }
}

fn seeded_unit_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let nrm = norm(&v);
        if nrm > 1e-12 {
            let mut v = v;
            scale_in_place(&mut v, 1.0 / nrm);
            return v;
        }
    }
}

/// Orthogonalizes `v` against each row of `basis` (classical Gram-Schmidt,
/// run twice). Returns the remaining norm.
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
    }
    norm(v)
}

/// Result of an extremal-eigenpair computation.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Unit eigenvectors matching `values`.
    pub vectors: Vec<Vec<f64>>,
    /// Total operator applications.
    pub matvecs: usize,
    /// Largest residual ‖Av − λv‖ over the returned pairs.
    pub max_residual: f64,
    pub converged: bool,
}

/// Top-`r` eigenpairs (algebraically largest) of a symmetric operator.
///
/// Lanczos iteration with full reorthogonalization. Converged Ritz pairs are
/// locked and later cycles run on the orthogonal complement, which handles
/// eigenvalue multiplicities and disconnected structure; once `r` pairs are
/// locked, extra verification cycles probe the complement until its top
/// eigenvalue no longer beats the locked set.
pub fn lanczos_top(
    op: &dyn SymOp,
    r: usize,
    tol: f64,
    max_matvecs: usize,
    seed: u64,
) -> Result<EigenPairs> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::Parameter("empty operator".into()));
    }
    let r = r.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut locked: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut matvecs = 0usize;
    let mut scale_est = 1e-12_f64;
    let mut verify_rounds = 0usize;

    loop {
        if locked.len() >= r {
            // Does the complement hold anything larger than the weakest
            // locked value? Repeat until it does not.
            if locked.len() == n || verify_rounds > r + 3 || matvecs >= max_matvecs {
                break;
            }
            verify_rounds += 1;
            let probe = converge_block(
                op, &locked, 1, tol, &mut matvecs, max_matvecs, &mut scale_est, &mut rng,
            );
            let slack = 1e-9 * scale_est.max(1.0);
            let min_locked = locked.last().map(|p| p.0).unwrap_or(f64::NEG_INFINITY);
            match probe.into_iter().next() {
                Some((val, vec)) if val > min_locked + slack => {
                    let pos = locked.partition_point(|p| p.0 >= val);
                    locked.insert(pos, (val, vec));
                    locked.truncate(r);
                }
                _ => break,
            }
            continue;
        }
        if matvecs >= max_matvecs {
            break;
        }
        let need = r - locked.len();
        let pairs = converge_block(
            op, &locked, need, tol, &mut matvecs, max_matvecs, &mut scale_est, &mut rng,
        );
        if pairs.is_empty() {
            break; // complement empty or budget gone
        }
        for (val, vec) in pairs {
            let pos = locked.partition_point(|p| p.0 >= val);
            locked.insert(pos, (val, vec));
        }
    }

    if locked.is_empty() {
        return Err(Error::Convergence { residual: f64::INFINITY, iterations: matvecs });
    }
    locked.truncate(r);

    // Exact residuals and deterministic orientation for the returned pairs.
    let mut values = Vec::with_capacity(locked.len());
    let mut vectors = Vec::with_capacity(locked.len());
    let mut max_residual = 0.0_f64;
    let mut y = vec![0.0; n];
    for (_, v) in locked.iter_mut() {
        fix_orientation(v);
        op.apply(v, &mut y);
        matvecs += 1;
        let lambda = dot(&y, v);
        let resid = (0..n).map(|i| (y[i] - lambda * v[i]).powi(2)).sum::<f64>().sqrt();
        max_residual = max_residual.max(resid);
        values.push(lambda);
        vectors.push(v.clone());
    }
    // Locking order can reshuffle near-equal values; normalize to descending.
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let vectors: Vec<Vec<f64>> = order.iter().map(|&i| vectors[i].clone()).collect();

    let converged = values.len() == r && max_residual <= 100.0 * tol * scale_est.max(1.0);
    Ok(EigenPairs { values, vectors, matvecs, max_residual, converged })
}

/// Runs restarted Lanczos cycles on the orthogonal complement of `locked`
/// until the leading `need` Ritz pairs converge, the subspace proves
/// invariant, or the matvec budget runs out. Returns the pairs found (best
/// first); on budget exhaustion the last best-effort pair is included so the
/// caller still makes progress and the final residual check reports honestly.
#[allow(clippy::too_many_arguments)]
fn converge_block(
    op: &dyn SymOp,
    locked: &[(f64, Vec<f64>)],
    need: usize,
    tol: f64,
    matvecs: &mut usize,
    max_matvecs: usize,
    scale_est: &mut f64,
    rng: &mut ChaCha8Rng,
) -> Vec<(f64, Vec<f64>)> {
    let n = op.dim();
    let free = n - locked.len();
    if free == 0 {
        return Vec::new();
    }
    let locked_vecs: Vec<&[f64]> = locked.iter().map(|p| p.1.as_slice()).collect();
    let cap = (4 * need + 24).min(free);
    let mut restart: Option<Vec<f64>> = None;

    loop {
        let mut v = restart.take().unwrap_or_else(|| seeded_unit_vector(n, rng));
        if orthogonalize_refs(&mut v, &locked_vecs) < 1e-10 {
            v = seeded_unit_vector(n, rng);
            if orthogonalize_refs(&mut v, &locked_vecs) < 1e-10 {
                return Vec::new();
            }
        }
        let nrm = norm(&v);
        scale_in_place(&mut v, 1.0 / nrm);

        let mut basis: Vec<Vec<f64>> = vec![v];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut w = vec![0.0; n];

        loop {
            let k = alphas.len();
            op.apply(&basis[k], &mut w);
            *matvecs += 1;
            let alpha = dot(&w, &basis[k]);
            alphas.push(alpha);
            *scale_est = scale_est.max(alpha.abs());
            for (wi, bi) in w.iter_mut().zip(&basis[k]) {
                *wi -= alpha * bi;
            }
            if k > 0 {
                let beta_prev = betas[k - 1];
                for (wi, bi) in w.iter_mut().zip(&basis[k - 1]) {
                    *wi -= beta_prev * bi;
                }
            }
            let mut nrm = orthogonalize_refs(&mut w, &locked_vecs);
            if nrm > 0.0 {
                nrm = orthogonalize(&mut w, &basis);
            }

            let dim = alphas.len();
            let invariant = nrm < 1e-10 * scale_est.max(1.0);
            let out_of_room = dim == cap;
            let out_of_budget = *matvecs >= max_matvecs;
            if invariant || out_of_room || out_of_budget || dim % 4 == 0 {
                let (theta, s) = tridiag_eigen(&alphas, &betas);
                let mut order: Vec<usize> = (0..dim).collect();
                order.sort_by(|&a, &b| theta[b].partial_cmp(&theta[a]).unwrap());
                let beta_last = if invariant { 0.0 } else { nrm };
                let take = need.min(dim);
                let tol_abs = tol * scale_est.max(1.0);
                let converged_prefix = order
                    .iter()
                    .take(take)
                    .take_while(|&&c| (beta_last * s[(dim - 1) * dim + c]).abs() <= tol_abs)
                    .count();

                let stop_here = converged_prefix == take || invariant || out_of_budget;
                if stop_here || out_of_room {
                    let emit = if stop_here { take } else { converged_prefix.max(1) };
                    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(emit);
                    for &col in order.iter().take(emit) {
                        let mut ritz = vec![0.0; n];
                        for (row, b) in basis.iter().enumerate() {
                            let c = s[row * dim + col];
                            for (ri, bi) in ritz.iter_mut().zip(b) {
                                *ri += c * bi;
                            }
                        }
                        let rn = orthogonalize_refs(&mut ritz, &locked_vecs);
                        if rn < 1e-10 {
                            continue;
                        }
                        scale_in_place(&mut ritz, 1.0 / rn);
                        pairs.push((theta[col], ritz));
                    }
                    if stop_here {
                        return pairs;
                    }
                    // Out of room: keep converged leading pairs; if none,
                    // restart this block from the best Ritz direction.
                    if converged_prefix > 0 {
                        pairs.truncate(converged_prefix);
                        return pairs;
                    }
                    restart = pairs.into_iter().next().map(|p| p.1);
                    break;
                }
            }
            betas.push(nrm);
            let mut next = w.clone();
            scale_in_place(&mut next, 1.0 / nrm);
            basis.push(next);
        }
    }
}

/// Gram-Schmidt against borrowed rows, run twice; returns the remaining norm.
fn orthogonalize_refs(v: &mut [f64], basis: &[&[f64]]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            for (vi, bi) in v.iter_mut().zip(*b) {
                *vi -= c * bi;
            }
        }
    }
    norm(v)
}

/// Eigen-decomposition of a symmetric tridiagonal matrix given by `alphas`
/// (diagonal) and `betas` (subdiagonal). Returns eigenvalues and the dense
/// eigenvector matrix in row-major order (column c is eigenvector c).
fn tridiag_eigen(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = alphas.len();
    let mut d = alphas.to_vec();
    let mut e = vec![0.0; n];
    // tql2 reads the subdiagonal from e[1..]; it shifts internally.
    for (i, &b) in betas.iter().take(n.saturating_sub(1)).enumerate() {
        e[i + 1] = b;
    }
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tql2(&mut d, &mut e, Some(&mut z), n);
    (d, z)
}

/// Full eigen-decomposition of a dense symmetric matrix via Householder
/// tridiagonalization followed by implicit-shift QL. Eigenvalues ascending.
/// Vectors are returned only when `want_vectors` is set (columns of the
/// returned matrix, row-major).
pub fn dense_sym_eigen(m: &DenseSym, want_vectors: bool) -> (Vec<f64>, Option<Vec<f64>>) {
    let n = m.n;
    let mut a = m.a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut a, n, &mut d, &mut e, want_vectors);
    if want_vectors {
        tql2(&mut d, &mut e, Some(&mut a), n);
        // sort ascending, permuting columns
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| d[x].partial_cmp(&d[y]).unwrap());
        let mut vals = vec![0.0; n];
        let mut vecs = vec![0.0; n * n];
        for (new, &old) in order.iter().enumerate() {
            vals[new] = d[old];
            for row in 0..n {
                vecs[row * n + new] = a[row * n + old];
            }
        }
        (vals, Some(vecs))
    } else {
        tql2(&mut d, &mut e, None, n);
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        (d, None)
    }
}

/// Householder reduction to tridiagonal form (EISPACK tred2). On exit `d`
/// holds the diagonal, `e` the subdiagonal in e[1..], and `a` the
/// accumulated orthogonal transform when `vectors` is set.
fn tred2(a: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64], vectors: bool) {
    if n == 1 {
        d[0] = a[0];
        e[0] = 0.0;
        if vectors {
            a[0] = 1.0;
        }
        return;
    }
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[i * n + k].abs()).sum();
            if scale == 0.0 {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let f = a[i * n + l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                let mut f_acc = 0.0;
                for j in 0..=l {
                    if vectors {
                        a[j * n + i] = a[i * n + j] / h;
                    }
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in (j + 1)..=l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    f_acc += e[j] * a[i * n + j];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if vectors {
            if d[i] != 0.0 {
                for j in 0..i {
                    let mut g = 0.0;
                    for k in 0..i {
                        g += a[i * n + k] * a[k * n + j];
                    }
                    for k in 0..i {
                        a[k * n + j] -= g * a[k * n + i];
                    }
                }
            }
            d[i] = a[i * n + i];
            a[i * n + i] = 1.0;
            for j in 0..i {
                a[j * n + i] = 0.0;
                a[i * n + j] = 0.0;
            }
        } else {
            d[i] = a[i * n + i];
        }
    }
}

/// Implicit-shift QL on a tridiagonal matrix (EISPACK tql2 / tql1).
/// `z`, when present, accumulates eigenvectors (pass the tred2 transform or
/// the identity).
fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>, n: usize) {
    if n == 1 {
        return;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                break; // accept current values; deflation has stalled
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let sign_r = if g >= 0.0 { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(zm) = z.as_deref_mut() {
                    for k in 0..n {
                        f = zm[k * n + i + 1];
                        zm[k * n + i + 1] = s * zm[k * n + i] + c * f;
                        zm[k * n + i] = c * zm[k * n + i] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Conjugate gradients for SPD `op`, solving op·x = b from x = 0.
/// Returns (x, iterations, relative residual).
pub fn cg_solve(op: &dyn SymOp, b: &[f64], tol_rel: f64, max_iter: usize) -> (Vec<f64>, usize, f64) {
    let n = b.len();
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return (vec![0.0; n], 0, 0.0);
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = b.to_vec();
    let mut ap = vec![0.0; n];
    let mut rs_old = dot(&r, &r);
    let mut iters = 0;
    while iters < max_iter {
        op.apply(&p, &mut ap);
        iters += 1;
        let denom = dot(&p, &ap);
        if denom.abs() < 1e-300 {
            break;
        }
        let alpha = rs_old / denom;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rs_new = dot(&r, &r);
        if rs_new.sqrt() <= tol_rel * b_norm {
            return (x, iters, rs_new.sqrt() / b_norm);
        }
        let beta = rs_new / rs_old;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rs_old = rs_new;
    }
    let rel = rs_old.sqrt() / b_norm;
    (x, iters, rel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(op: &dyn SymOp, lambda: f64, v: &[f64]) -> f64 {
        let mut y = vec![0.0; v.len()];
        op.apply(v, &mut y);
        (0..v.len())
            .map(|i| (y[i] - lambda * v[i]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn dense_eigen_on_known_matrix() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let m = DenseSym::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 });
        let (vals, vecs) = dense_sym_eigen(&m, true);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        let v = vecs.unwrap();
        // eigenvector for λ=3 is (1,1)/√2 up to sign
        let top = [v[1], v[3]];
        assert!((top[0].abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
        assert!((top[0] - top[1]).abs() < 1e-10);
    }

    #[test]
    fn dense_eigen_matches_trace_and_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2, 3, 5, 17, 40] {
            let m = DenseSym::from_fn(n, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
            let (vals, vecs) = dense_sym_eigen(&m, true);
            let vecs = vecs.unwrap();
            let trace: f64 = (0..n).map(|i| m.get(i, i)).sum();
            let sum: f64 = vals.iter().sum();
            assert!((trace - sum).abs() < 1e-8 * n as f64, "trace mismatch at n={n}");
            for c in 0..n {
                let v: Vec<f64> = (0..n).map(|r| vecs[r * n + c]).collect();
                assert!(residual(&m, vals[c], &v) < 1e-8, "residual at n={n} col={c}");
            }
            // values-only path agrees
            let (vals2, _) = dense_sym_eigen(&m, false);
            for (a, b) in vals.iter().zip(&vals2) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn lanczos_agrees_with_dense_on_random_sparse() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in [6usize, 30, 120] {
            let mut m = SymSparse::zeros(n);
            let mut dense = DenseSym::zeros(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen::<f64>() < 0.3 {
                        let w = rng.gen::<f64>() * 2.0 - 1.0;
                        m.add_sym(i, j, w);
                        dense.set_sym(i, j, w);
                    }
                }
            }
            let (dvals, _) = dense_sym_eigen(&dense, false);
            let r = 3.min(n);
            let out = lanczos_top(&m, r, 1e-10, 100_000, 1).unwrap();
            assert!(out.converged);
            for (k, v) in out.values.iter().enumerate() {
                let want = dvals[n - 1 - k];
                assert!(
                    (v - want).abs() < 1e-6,
                    "n={n} k={k}: lanczos {v} vs dense {want}"
                );
            }
        }
    }

    #[test]
    fn lanczos_handles_degenerate_spectrum() {
        // rank-one plus identity: eigenvalues n-1+1 (once) and ... K_n pattern
        let n = 20;
        let mut m = SymSparse::zeros(n);
        for i in 0..n {
            for j in (i + 1)..n {
                m.add_sym(i, j, 1.0);
            }
        }
        let out = lanczos_top(&m, 3, 1e-10, 100_000, 3).unwrap();
        assert!((out.values[0] - (n as f64 - 1.0)).abs() < 1e-8);
        assert!((out.values[1] - (-1.0)).abs() < 1e-8);
        assert!((out.values[2] - (-1.0)).abs() < 1e-8);
    }

    #[test]
    fn cg_solves_spd_system() {
        let n = 25;
        // Laplacian of a path plus identity: SPD
        let mut m = SymSparse::zeros(n);
        for i in 0..n - 1 {
            m.add_sym(i, i + 1, -1.0);
        }
        for i in 0..n {
            let deg = if i == 0 || i == n - 1 { 1.0 } else { 2.0 };
            m.set_diag(i, deg + 1.0);
        }
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let (x, _, rel) = cg_solve(&m, &b, 1e-12, 10 * n);
        assert!(rel < 1e-10);
        let mut y = vec![0.0; n];
        m.apply(&x, &mut y);
        for (yi, bi) in y.iter().zip(&b) {
            assert!((yi - bi).abs() < 1e-8);
        }
    }

    #[test]
    fn gram_op_applies_vvt() {
        let factor = vec![1.0, 0.0, 0.0, 1.0, 1.0, 1.0]; // rows (1,0),(0,1),(1,1)
        let g = GramOp { factor: &factor, n: 3, r: 2 };
        let mut y = vec![0.0; 3];
        g.apply(&[1.0, 2.0, 3.0], &mut y);
        // V^T x = (4, 5); V (4,5) = (4, 5, 9)
        assert_eq!(y, vec![4.0, 5.0, 9.0]);
    }
}
