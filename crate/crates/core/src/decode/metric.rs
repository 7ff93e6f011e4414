use num_traits::Float;

/// `log2(1 + e^z)` without overflow for large `z`.
fn log2_one_plus_exp<F: Float>(z: F) -> F {
    let softplus = z.max(F::zero()) + (-z.abs()).exp().ln_1p();
    softplus / F::from(std::f64::consts::LN_2).expect("representable")
}

/// Fano metric of one code symbol: `log2 p(r|x) - log2 p(r) - R` for the
/// bipolar symbol `x = 1 - 2 bit`, Gaussian noise of deviation `sigma` and
/// equiprobable symbols.
pub fn fano_symbol_metric<F: Float>(bit: u8, r: F, sigma: F, rate: F) -> F {
    let x = if bit == 0 { F::one() } else { -F::one() };
    let two = F::one() + F::one();
    F::one() - log2_one_plus_exp(-two * x * r / (sigma * sigma)) - rate
}

/// Fano metric of an `n`-bit output block `v` (bit `j` for output `j`).
pub fn fano_branch_metric<F: Float>(v: u64, r: &[F], sigma: F, rate: F) -> F {
    r.iter().enumerate().fold(F::zero(), |acc, (j, &rj)| {
        acc + fano_symbol_metric(((v >> j) & 1) as u8, rj, sigma, rate)
    })
}

/// Per-step tables of a branch metric for every output block value.
#[derive(Clone, Debug)]
pub struct BranchMetrics<F> {
    n: usize,
    table: Vec<F>,
}

impl<F: Float> BranchMetrics<F> {
    fn build(r: &[F], n: usize, symbol: impl Fn(u8, F) -> F) -> Self {
        let steps = r.len() / n;
        let width = 1usize << n;
        let mut table = Vec::with_capacity(steps * width);
        for t in 0..steps {
            let block = &r[t * n..(t + 1) * n];
            let per_bit: Vec<[F; 2]> = block.iter().map(|&x| [symbol(0, x), symbol(1, x)]).collect();
            for v in 0..width {
                let sum = per_bit
                    .iter()
                    .enumerate()
                    .fold(F::zero(), |acc, (j, m)| acc + m[(v >> j) & 1]);
                table.push(sum);
            }
        }
        Self { n, table }
    }

    pub fn fano(r: &[F], n: usize, sigma: F, rate: F) -> Self {
        Self::build(r, n, |b, x| fano_symbol_metric(b, x, sigma, rate))
    }

    pub fn correlation(r: &[F], n: usize) -> Self {
        Self::build(r, n, |b, x| if b == 0 { x } else { -x })
    }

    pub fn steps(&self) -> usize {
        self.table.len() >> self.n
    }

    #[inline]
    pub fn get(&self, t: usize, v: u64) -> F {
        self.table[(t << self.n) | v as usize]
    }

    /// The same tables with the block order reversed.
    pub fn reversed(&self) -> Self {
        let width = 1usize << self.n;
        let table = self
            .table
            .chunks(width)
            .rev()
            .flat_map(|c| c.iter().copied())
            .collect();
        Self { n: self.n, table }
    }
}
