use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// `c (m x n) = a (m x k) * b (k x n) + beta * c`, with either operand
/// optionally read transposed from its row-major storage.
#[allow(clippy::too_many_arguments)]
fn gemm(m: usize, k: usize, n: usize, a: &[f64], a_t: bool, b: &[f64], b_t: bool, beta: f64, c: &mut [f64]) {
    debug_assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n);
    let (rsa, csa) = if a_t { (1, m as isize) } else { (k as isize, 1) };
    let (rsb, csb) = if b_t { (1, k as isize) } else { (n as isize, 1) };
    // SAFETY: the strides describe matrices that lie within the checked slices.
    unsafe {
        matrixmultiply::dgemm(m, k, n, 1.0, a.as_ptr(), rsa, csa, b.as_ptr(), rsb, csb, beta, c.as_mut_ptr(), n as isize, 1);
    }
}

/// Fully connected network with ReLU hidden layers and a linear output.
/// Parameters live in one flat vector: per layer, a row-major
/// `in x out` weight block followed by `out` biases.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    dims: Vec<usize>,
    params: Vec<f64>,
}

/// Activations kept from a forward pass for the backward pass.
#[derive(Clone, Debug)]
pub struct Forward {
    batch: usize,
    acts: Vec<Vec<f64>>,
}

impl Forward {
    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn output(&self) -> &[f64] {
        self.acts.last().expect("non-empty")
    }

    pub fn into_output(mut self) -> Vec<f64> {
        self.acts.pop().expect("non-empty")
    }
}

#[derive(Clone, Debug)]
pub struct Gradients {
    pub params: Vec<f64>,
    pub input: Vec<f64>,
}

fn param_count(dims: &[usize]) -> usize {
    dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

impl Mlp {
    pub fn zeros(dims: &[usize]) -> Self {
        assert!(dims.len() >= 2 && dims.iter().all(|&d| d > 0), "invalid layer dims {dims:?}");
        Self { dims: dims.to_vec(), params: vec![0.0; param_count(dims)] }
    }

    /// He-uniform weights (bound `sqrt(6 / fan_in)`), zero biases, final layer
    /// scaled by 0.01.
    pub fn new<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Self {
        let mut net = Self::zeros(dims);
        let layers = net.layers();
        let mut off = 0;
        for l in 0..layers {
            let (i, o) = (dims[l], dims[l + 1]);
            let bound = (6.0 / i as f64).sqrt();
            let scale = if l + 1 == layers { 0.01 } else { 1.0 };
            for w in &mut net.params[off..off + i * o] {
                *w = scale * rng.random_range(-bound..bound);
            }
            off += i * o + o;
        }
        net
    }

    pub fn from_params(dims: &[usize], params: Vec<f64>) -> Result<Self> {
        let mut net = Self::zeros(dims);
        if params.len() != net.params.len() {
            return Err(Error::WidthMismatch { expected: net.params.len(), got: params.len() });
        }
        net.params = params;
        Ok(net)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn layers(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().expect("non-empty")
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }

    /// Runs a row-major batch of `batch` inputs.
    pub fn forward(&self, x: &[f64], batch: usize) -> Result<Forward> {
        let din = self.input_dim();
        if x.len() != batch * din {
            return Err(Error::WidthMismatch { expected: batch * din, got: x.len() });
        }
        let mut acts = Vec::with_capacity(self.dims.len());
        acts.push(x.to_vec());
        let mut off = 0;
        for l in 0..self.layers() {
            let (i, o) = (self.dims[l], self.dims[l + 1]);
            let w = &self.params[off..off + i * o];
            let b = &self.params[off + i * o..off + i * o + o];
            let mut z = Vec::with_capacity(batch * o);
            for _ in 0..batch {
                z.extend_from_slice(b);
            }
            gemm(batch, i, o, &acts[l], false, w, false, 1.0, &mut z);
            if l + 1 < self.layers() {
                for v in &mut z {
                    *v = v.max(0.0);
                }
            }
            acts.push(z);
            off += i * o + o;
        }
        Ok(Forward { batch, acts })
    }

    pub fn predict(&self, x: &[f64], batch: usize) -> Result<Vec<f64>> {
        Ok(self.forward(x, batch)?.into_output())
    }

    fn backprop(&self, fwd: &Forward, dout: &[f64], mut param_grads: Option<&mut [f64]>) -> Vec<f64> {
        let n = fwd.batch;
        assert_eq!(dout.len(), n * self.output_dim(), "output gradient width");
        let offsets: Vec<usize> = self
            .dims
            .windows(2)
            .scan(0, |off, w| {
                let o = *off;
                *off += w[0] * w[1] + w[1];
                Some(o)
            })
            .collect();
        let mut dz = dout.to_vec();
        for l in (0..self.layers()).rev() {
            let (i, o) = (self.dims[l], self.dims[l + 1]);
            if l + 1 < self.layers() {
                for (g, &a) in dz.iter_mut().zip(&fwd.acts[l + 1]) {
                    if a <= 0.0 {
                        *g = 0.0;
                    }
                }
            }
            let off = offsets[l];
            if let Some(pg) = param_grads.as_deref_mut() {
                gemm(i, n, o, &fwd.acts[l], true, &dz, false, 0.0, &mut pg[off..off + i * o]);
                let db = &mut pg[off + i * o..off + i * o + o];
                db.fill(0.0);
                for row in dz.chunks_exact(o) {
                    for (d, g) in db.iter_mut().zip(row) {
                        *d += g;
                    }
                }
            }
            let w = &self.params[off..off + i * o];
            let mut da = vec![0.0; n * i];
            gemm(n, o, i, &dz, false, w, true, 0.0, &mut da);
            dz = da;
        }
        dz
    }

    /// Reverse-mode gradients of `sum(dout * output)` with respect to the
    /// parameters and the inputs.
    pub fn backward(&self, fwd: &Forward, dout: &[f64]) -> Gradients {
        let mut params = vec![0.0; self.params.len()];
        let input = self.backprop(fwd, dout, Some(&mut params));
        Gradients { params, input }
    }

    /// Input gradient only; skips the weight-gradient products.
    pub fn input_gradient(&self, fwd: &Forward, dout: &[f64]) -> Vec<f64> {
        self.backprop(fwd, dout, None)
    }

    /// `self <- tau * online + (1 - tau) * self`.
    pub fn soft_update_from(&mut self, online: &Mlp, tau: f64) {
        assert_eq!(self.dims, online.dims, "soft update between different architectures");
        for (t, &o) in self.params.iter_mut().zip(&online.params) {
            *t = tau * o + (1.0 - tau) * *t;
        }
    }

    pub fn to_file(&self) -> NetFile {
        NetFile { dims: self.dims.clone(), params: self.params.clone() }
    }

    pub fn from_file(f: &NetFile) -> Result<Self> {
        if f.dims.len() < 2 || f.dims.contains(&0) {
            return Err(Error::Checkpoint(format!("invalid layer dims {:?}", f.dims)));
        }
        Self::from_params(&f.dims, f.params.clone())
    }

    pub fn hash(&self) -> String {
        param_hash(&self.params)
    }
}

/// Architecture header plus flat parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetFile {
    pub dims: Vec<usize>,
    pub params: Vec<f64>,
}

/// Hex SHA-256 over the little-endian bytes of the parameters.
pub fn param_hash(params: &[f64]) -> String {
    let mut h = Sha256::new();
    for p in params {
        h.update(p.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    fn loss(net: &Mlp, x: &[f64], n: usize, c: &[f64]) -> f64 {
        net.predict(x, n).unwrap().iter().zip(c).map(|(y, c)| y * c).sum()
    }

    #[test]
    fn zero_net_outputs_zero() {
        let net = Mlp::zeros(&[3, 5, 2]);
        assert_eq!(net.predict(&[1.0, -2.0, 3.0], 1).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn linear_layer_by_hand() {
        // W = [[1, 2], [3, 4]] (in x out), b = [0.5, -1].
        let net = Mlp::from_params(&[2, 2], vec![1.0, 2.0, 3.0, 4.0, 0.5, -1.0]).unwrap();
        let y = net.predict(&[1.0, 1.0, 2.0, 0.0], 2).unwrap();
        assert_eq!(y, vec![4.5, 5.0, 2.5, 3.0]);
    }

    #[test]
    fn identical_rows_identical_outputs() {
        let net = Mlp::new(&[4, 8, 3], &mut stream(0, &[], Stream::Init));
        let x = [0.1, 0.2, -0.3, 0.4];
        let y = net.predict(&[x, x].concat(), 2).unwrap();
        assert_eq!(y[..3], y[3..]);
    }

    #[test]
    fn width_mismatch_rejected() {
        let net = Mlp::zeros(&[3, 2]);
        assert!(matches!(net.forward(&[1.0, 2.0], 1), Err(Error::WidthMismatch { expected: 3, got: 2 })));
    }

    #[test]
    fn gradients_match_finite_differences() {
        for seed in 0..5 {
            let mut rng = stream(seed, &[], Stream::Init);
            let mut net = Mlp::new(&[4, 8, 8, 2], &mut rng);
            // Lift the final layer so its gradients are not tiny.
            for p in net.params_mut().iter_mut() {
                *p += rng.random_range(-0.3..0.3);
            }
            let n = 3;
            let x: Vec<f64> = (0..n * 4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let c: Vec<f64> = (0..n * 2).map(|_| rng.random_range(-1.0..1.0)).collect();
            let g = net.backward(&net.forward(&x, n).unwrap(), &c);
            let h = 1e-5;
            for k in 0..net.params().len() {
                let mut p = net.clone();
                p.params_mut()[k] += h;
                let mut m = net.clone();
                m.params_mut()[k] -= h;
                let fd = (loss(&p, &x, n, &c) - loss(&m, &x, n, &c)) / (2.0 * h);
                let err = (fd - g.params[k]).abs() / fd.abs().max(g.params[k].abs()).max(1e-6);
                assert!(err < 1e-4, "seed {seed} param {k}: fd {fd} vs {}", g.params[k]);
            }
            for k in 0..x.len() {
                let (mut xp, mut xm) = (x.clone(), x.clone());
                xp[k] += h;
                xm[k] -= h;
                let fd = (loss(&net, &xp, n, &c) - loss(&net, &xm, n, &c)) / (2.0 * h);
                assert!((fd - g.input[k]).abs() / fd.abs().max(1e-6) < 1e-4);
            }
        }
    }

    #[test]
    fn inactive_relu_blocks_gradient() {
        // Hidden unit with negative bias and zero input weights never fires.
        let net = Mlp::from_params(&[1, 1, 1], vec![0.0, -1.0, 2.0, 0.0]).unwrap();
        let g = net.backward(&net.forward(&[3.0], 1).unwrap(), &[1.0]);
        assert_eq!(g.params[..3], [0.0, 0.0, 0.0]);
        assert_eq!(g.params[3], 1.0);
    }

    #[test]
    fn gradients_scale_linearly() {
        let net = Mlp::new(&[3, 6, 2], &mut stream(3, &[], Stream::Init));
        let f = net.forward(&[0.2, -0.1, 0.7], 1).unwrap();
        let g1 = net.backward(&f, &[1.0, -0.5]);
        let g3 = net.backward(&f, &[3.0, -1.5]);
        for (a, b) in g1.params.iter().zip(&g3.params) {
            assert!((3.0 * a - b).abs() < 1e-12);
        }
        assert_eq!(net.input_gradient(&f, &[1.0, -0.5]), g1.input);
    }

    #[test]
    fn soft_update_formula() {
        let mut t = Mlp::zeros(&[1, 1]);
        let o = Mlp::from_params(&[1, 1], vec![1.0, 1.0]).unwrap();
        t.soft_update_from(&o, 0.005);
        assert_eq!(t.params(), &[0.005, 0.005]);
        let before = o.clone();
        let mut same = o.clone();
        same.soft_update_from(&before, 0.005);
        assert_eq!(same, before);
    }

    #[test]
    fn file_round_trip_and_hash() {
        let net = Mlp::new(&[3, 4, 2], &mut stream(9, &[], Stream::Init));
        let json = serde_json::to_string(&net.to_file()).unwrap();
        let back = Mlp::from_file(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, net);
        assert_eq!(back.hash(), net.hash());
        assert_eq!(net.hash().len(), 64);
    }
}
