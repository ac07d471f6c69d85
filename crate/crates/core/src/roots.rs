//! Certified complex roots of integer polynomials.
//!
//! Approximations come from Aberth–Ehrlich iteration (f64 seed, then
//! multiprecision polishing). Radii are certified with Smith's inclusion
//! theorem: for distinct approximations `z_i` of the roots of a degree-`n`
//! polynomial `p` with leading coefficient `a`, every root lies in the union of
//! the discs `|z - z_i| <= n |p(z_i) / (a Π_{j≠i} (z_i - z_j))|`, and each
//! connected component made of `k` discs holds exactly `k` roots. The
//! right-hand side is evaluated in outward-rounded interval arithmetic.

use std::cmp::Ordering;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_complex::Complex64;

use crate::arith::{self, cmp, CIv, Ctx, Cx, Iv};
use crate::mahler::MahlerError;
use crate::poly::LaurentPoly;

/// Disc `{z : |z - center| <= radius}` certified to contain a root.
#[derive(Clone, Debug)]
pub struct ComplexBall {
    pub(crate) re: BigFloat,
    pub(crate) im: BigFloat,
    pub(crate) radius: BigFloat,
    /// Shared id for balls whose Smith discs overlap: the cluster holds exactly
    /// as many roots as it has members, each within its member's ball.
    pub cluster: Option<usize>,
    /// `false` when `radius >= |center|`.
    pub resolved: bool,
}

impl ComplexBall {
    pub fn center(&self) -> (f64, f64) {
        (arith::to_f64(&self.re), arith::to_f64(&self.im))
    }

    /// Upper bound on the radius.
    pub fn radius(&self) -> f64 {
        arith::to_f64_up(&self.radius)
    }

    pub fn center_decimal(&self, digits: usize) -> (String, String) {
        (arith::to_decimal(&self.re, digits, false), arith::to_decimal(&self.im, digits, false))
    }

    pub fn radius_decimal(&self, digits: usize) -> String {
        arith::to_decimal(&self.radius, digits.min(20), true)
    }

    /// Certified bounds `[inf |z|, sup |z|]` over the disc.
    pub(crate) fn modulus(&self, ctx: &Ctx) -> Iv {
        let c = ctx.cabs(&CIv { re: Iv::point(self.re.clone()), im: Iv::point(self.im.clone()) });
        let r = Iv::point(self.radius.clone());
        let lo = ctx.sub(&c, &r).lo;
        let lo = if cmp(&lo, &arith::zero()) == Ordering::Less { arith::zero() } else { lo };
        Iv { lo, hi: ctx.add(&c, &r).hi }
    }

    /// Bounds on `|z|` as f64, rounded outward.
    pub fn modulus_bounds(&self) -> (f64, f64) {
        let ctx = Ctx::new(128);
        let m = self.modulus(&ctx);
        (arith::to_f64_down(&m.lo), arith::to_f64_up(&m.hi))
    }

    /// `true` if the disc provably misses the unit circle.
    pub fn off_unit_circle(&self) -> bool {
        let ctx = Ctx::new(self.radius.precision().unwrap_or(64).max(64));
        let m = self.modulus(&ctx);
        let one = arith::one();
        cmp(&m.lo, &one) == Ordering::Greater || cmp(&m.hi, &one) == Ordering::Less
    }
}

/// Plain coefficients (lowest first) of a polynomial after dropping the monomial.
fn plain(f: &LaurentPoly) -> Vec<BigInt> {
    f.coeffs().to_vec()
}

/// Aberth–Ehrlich in f64, Gauss–Seidel sweeps. Returns `None` on non-finite data.
pub(crate) fn aberth_f64(coeffs: &[f64]) -> Option<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    if n == 0 || lead == 0.0 || coeffs.iter().any(|c| !c.is_finite()) {
        return None;
    }
    let center = -coeffs[n - 1] / (n as f64 * lead);
    let radius = (coeffs[0].abs() / lead.abs()).powf(1.0 / n as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let ang = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Complex64::new(center, 0.0) + Complex64::from_polar(radius, ang)
        })
        .collect();
    let eval = |x: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut worst = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let corr = ratio / (1.0 - ratio * s);
            if !corr.re.is_finite() || !corr.im.is_finite() {
                continue;
            }
            z[i] -= corr;
            worst = worst.max(corr.norm() / z[i].norm().max(1.0));
        }
        if worst < 4.0 * f64::EPSILON {
            break;
        }
    }
    z.iter().all(|c| c.re.is_finite() && c.im.is_finite()).then_some(z)
}

/// f64 interval with every operation rounded one ulp outward.
#[derive(Clone, Copy)]
struct Fi {
    lo: f64,
    hi: f64,
}

impl Fi {
    fn point(x: f64) -> Fi {
        Fi { lo: x, hi: x }
    }
    fn add(self, o: Fi) -> Fi {
        Fi { lo: (self.lo + o.lo).next_down(), hi: (self.hi + o.hi).next_up() }
    }
    fn sub(self, o: Fi) -> Fi {
        Fi { lo: (self.lo - o.hi).next_down(), hi: (self.hi - o.lo).next_up() }
    }
    fn mul(self, o: Fi) -> Fi {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Fi { lo: lo.next_down(), hi: hi.next_up() }
    }
    fn sqr_bounds(self) -> (f64, f64) {
        let (a, b) = (self.lo.abs(), self.hi.abs());
        let lo = if self.lo <= 0.0 && self.hi >= 0.0 { 0.0 } else { a.min(b) };
        ((lo * lo).next_down().max(0.0), (a.max(b) * a.max(b)).next_up())
    }
}

/// `[inf |x + iy|, sup |x + iy|]`.
fn fi_abs(re: Fi, im: Fi) -> (f64, f64) {
    let (rl, rh) = re.sqr_bounds();
    let (il, ih) = im.sqr_bounds();
    ((rl + il).next_down().sqrt().next_down().max(0.0), (rh + ih).next_up().sqrt().next_up())
}

/// Lower bound on `log|a| + Σ log⁺|λ|` for a polynomial with f64-exact
/// coefficients (lowest first), from Smith discs around f64 Aberth roots.
/// Every root of a cluster of `k` discs is bounded below by the smallest
/// modulus in the cluster. `None` when the data are unusable.
pub(crate) fn measure_lower_bound_f64(coeffs: &[f64]) -> Option<f64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n].abs();
    if n == 0 {
        return Some(lead.ln());
    }
    let z = aberth_f64(coeffs)?;
    let mut dist = vec![vec![(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = fi_abs(Fi::point(z[i].re).sub(Fi::point(z[j].re)), Fi::point(z[i].im).sub(Fi::point(z[j].im)));
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let mut radii = Vec::with_capacity(n);
    for i in 0..n {
        let (x, y) = (Fi::point(z[i].re), Fi::point(z[i].im));
        let (mut pr, mut pi) = (Fi::point(0.0), Fi::point(0.0));
        for &c in coeffs.iter().rev() {
            let nr = pr.mul(x).sub(pi.mul(y)).add(Fi::point(c));
            pi = pr.mul(y).add(pi.mul(x));
            pr = nr;
        }
        let num = fi_abs(pr, pi).1;
        let mut den = lead;
        for (j, d) in dist[i].iter().enumerate() {
            if j != i {
                den = (den * d.0).next_down();
            }
        }
        if den.is_nan() || den <= 0.0 || !num.is_finite() {
            return None;
        }
        radii.push(((n as f64 * num).next_up() / den).next_up());
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if dist[i][j].0 <= (radii[i] + radii[j]).next_up() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut floor = vec![f64::INFINITY; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        let m = (fi_abs(Fi::point(z[i].re), Fi::point(z[i].im)).0 - radii[i]).next_down();
        floor[r] = floor[r].min(m);
    }
    let mut total = lead.ln();
    for i in 0..n {
        let m = floor[find(&mut parent, i)];
        if m > 1.0 {
            total += m.ln();
        }
    }
    total.is_finite().then(|| total - 1e-14 * total.abs().max(1.0))
}

/// Initial approximations on a perturbed circle, used when the f64 seed fails.
fn circle_seeds(coeffs: &[BigInt]) -> Vec<Cx> {
    let n = coeffs.len() - 1;
    let lead = crate::poly::bigint_to_f64(&coeffs[n]).abs();
    let low = crate::poly::bigint_to_f64(&coeffs[0]).abs();
    let mut r = (low / lead).powf(1.0 / n as f64);
    if !r.is_finite() || r == 0.0 {
        r = 1.0;
    }
    (0..n)
        .map(|k| {
            let ang = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Cx::from_f64(r * ang.cos(), r * ang.sin())
        })
        .collect()
}

pub(crate) fn seeds(coeffs: &[BigInt]) -> Vec<Cx> {
    let cf: Vec<f64> = coeffs.iter().map(crate::poly::bigint_to_f64).collect();
    match aberth_f64(&cf) {
        Some(z) => z.into_iter().map(|c| Cx::from_f64(c.re, c.im)).collect(),
        None => circle_seeds(coeffs),
    }
}

/// Multiprecision Aberth polishing at `ctx.prec` bits.
pub(crate) fn refine(coeffs: &[BigInt], start: &[Cx], ctx: &Ctx) -> Vec<Cx> {
    let n = coeffs.len() - 1;
    let cs: Vec<Cx> = coeffs.iter().map(|c| Cx { re: arith::from_bigint(c), im: arith::zero() }).collect();
    let mut z: Vec<Cx> = start.iter().map(|c| ctx.round(c)).collect();
    let target = 2f64.powi(-(ctx.prec as i32) + 6);
    let one = Cx { re: arith::one(), im: arith::zero() };
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    for _ in 0..(60 + ctx.prec / 8) {
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut p = Cx::zero();
            let mut dp = Cx::zero();
            for c in cs.iter().rev() {
                dp = ctx.xadd(&ctx.xmul(&dp, &z[i]), &p);
                p = ctx.xadd(&ctx.xmul(&p, &z[i]), c);
            }
            if p.re.is_zero() && p.im.is_zero() {
                continue;
            }
            let Some(ratio) = ctx.xdiv(&p, &dp) else { continue };
            let mut s = Cx::zero();
            for j in 0..n {
                if j != i {
                    if let Some(inv) = ctx.xdiv(&one, &ctx.xsub(&z[i], &z[j])) {
                        s = ctx.xadd(&s, &inv);
                    }
                }
            }
            let den = ctx.xsub(&one, &ctx.xmul(&ratio, &s));
            let Some(corr) = ctx.xdiv(&ratio, &den) else { continue };
            z[i] = ctx.xsub(&z[i], &corr);
            let scale = ctx.xabs_f64(&z[i]).max(1.0);
            worst = worst.max(ctx.xabs_f64(&corr) / scale);
        }
        if worst <= target {
            break;
        }
        if worst < best * 0.5 {
            best = worst;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled > 8 {
                break;
            }
        }
    }
    z
}

/// Smith-disc certification of the approximations `z`. `Err(())` when the
/// approximations are not distinct at this precision.
pub(crate) fn certify(coeffs: &[BigInt], z: &[Cx], ctx: &Ctx) -> Result<Vec<ComplexBall>, ()> {
    let n = z.len();
    let cs: Vec<CIv> = coeffs.iter().map(|c| CIv::real(Iv::point(arith::from_bigint(c)))).collect();
    let lead_abs = Iv::point(arith::from_bigint(&num_traits::Signed::abs(&coeffs[n])));
    let pts: Vec<CIv> = z.iter().map(CIv::point).collect();
    let nn = Iv::point(BigFloat::from_word(n as u64 as astro_float::Word, 64));

    let mut dist = vec![vec![Iv::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = ctx.cabs(&ctx.csub(&pts[i], &pts[j]));
            dist[i][j] = d.clone();
            dist[j][i] = d;
        }
    }

    let mut radii = Vec::with_capacity(n);
    for i in 0..n {
        let mut p = CIv::real(Iv::zero());
        for c in cs.iter().rev() {
            p = ctx.cadd(&ctx.cmul(&p, &pts[i]), c);
        }
        let pabs = ctx.cabs(&p);
        let mut den = lead_abs.clone();
        for (j, dj) in dist[i].iter().enumerate() {
            if j != i {
                den = ctx.mul(&den, dj);
            }
        }
        let w = ctx.div(&pabs, &den).ok_or(())?;
        radii.push(ctx.mul(&nn, &w).hi);
    }

    // union-find over discs not provably disjoint
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let rsum = radii[i].add(&radii[j], ctx.prec, astro_float::RoundingMode::Up);
            if cmp(&dist[i][j].lo, &rsum) != Ordering::Greater {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();

    let mut balls = Vec::with_capacity(n);
    for i in 0..n {
        let members: Vec<usize> = (0..n).filter(|&k| roots[k] == roots[i]).collect();
        let radius = if members.len() == 1 {
            radii[i].clone()
        } else {
            members
                .iter()
                .map(|&k| {
                    if k == i {
                        radii[i].clone()
                    } else {
                        dist[i][k].hi.add(&radii[k], ctx.prec, astro_float::RoundingMode::Up)
                    }
                })
                .reduce(|a, b| if cmp(&a, &b) == Ordering::Less { b } else { a })
                .expect("nonempty cluster")
        };
        let modulus = ctx.cabs(&pts[i]);
        let resolved = cmp(&radius, &modulus.lo) == Ordering::Less;
        balls.push((
            roots[i],
            members.len() > 1,
            ComplexBall { re: z[i].re.clone(), im: z[i].im.clone(), radius, cluster: None, resolved },
        ));
    }
    balls.sort_by(|a, b| cmp(&a.2.re, &b.2.re).then_with(|| cmp(&a.2.im, &b.2.im)));
    let mut ids: Vec<usize> = Vec::new();
    Ok(balls
        .into_iter()
        .map(|(root, clustered, mut ball)| {
            if clustered {
                let id = ids.iter().position(|&r| r == root).unwrap_or_else(|| {
                    ids.push(root);
                    ids.len() - 1
                });
                ball.cluster = Some(id);
            }
            ball
        })
        .collect())
}

/// All `deg f` roots of `f` (monomial factor ignored) as certified balls at
/// `precision` bits, ordered by real then imaginary part of the center.
pub fn roots_with_radii(f: &LaurentPoly, precision: usize) -> Result<Vec<ComplexBall>, MahlerError> {
    if f.is_zero() {
        return Err(MahlerError::ZeroPolynomial);
    }
    if f.degree() == 0 {
        return Err(MahlerError::DegreeZero);
    }
    let coeffs = plain(f);
    let ctx = Ctx::new(precision.max(64));
    let mut z = seeds(&coeffs);
    // climb from double precision so each Aberth stage starts close
    let mut p = 64;
    loop {
        let step = Ctx::new(p.min(ctx.prec));
        z = refine(&coeffs, &z, &step);
        if p >= ctx.prec {
            break;
        }
        p *= 2;
    }
    certify(&coeffs, &z, &ctx).map_err(|_| MahlerError::PrecisionExhausted { bits: precision })
}
