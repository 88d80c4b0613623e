//! Drinfeld modules over finite A-fields, their torsion, and empirical checks
//! of the Weil pairing formula.
//!
//! Torsion subgroups are found as kernels of F_q-linear maps by Gaussian
//! elimination over F_q; the exhaustive field scan survives as a test oracle.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactfield::gf::MAX_FIELD_ORDER;
use crate::exactfield::{enumerate_monics, polys_of_degree, FiniteField, Gf, GfRing, Poly, Ring};
use crate::report::{Check, Status, SCHEMA};
use crate::skew::{moore_det, weil_pairing, DrinfeldMod};

/// Pairs are checked exhaustively up to this many torsion points.
pub const EXHAUSTIVE_POINTS: usize = 81;
const SAMPLED_PAIRS: usize = 2000;
pub const DEFAULT_K_MAX: usize = 6;

/// F_{q^n} with an A-field structure gamma(T).
#[derive(Clone, Debug)]
pub struct AField {
    fq: Arc<FiniteField>,
    field: Arc<FiniteField>,
    n: usize,
    gamma_t: Gf,
}

pub fn make_afield(q: u64, n: usize, gamma_t: Gf) -> Result<AField> {
    let fq = FiniteField::fq(q)?;
    let field = FiniteField::extension(&fq, n)?;
    if gamma_t.0 >= field.order() {
        return Err(Error::InvalidArgument(format!("gamma(T) = {} is not in {}", gamma_t.0, field.name())));
    }
    Ok(AField { fq, field, n, gamma_t })
}

impl AField {
    pub fn fq(&self) -> &Arc<FiniteField> {
        &self.fq
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn ring(&self) -> GfRing {
        GfRing::new(&self.field)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.fq.order() as u64
    }

    pub fn gamma_t(&self) -> Gf {
        self.gamma_t
    }

    pub fn gamma_of(&self, a: &Poly) -> Gf {
        a.eval_in(self.gamma_t, &self.field, |c| c)
    }

    /// Monic a of degree 1..=max_deg with gamma(a) = 0.
    pub fn bad_levels(&self, max_deg: usize) -> Vec<Poly> {
        enumerate_monics(&self.fq, max_deg)
            .into_iter()
            .filter(|a| a.degree().unwrap_or(0) >= 1 && self.gamma_of(a).is_zero())
            .collect()
    }

    /// phi_T = gamma(T) X + g X^q + Delta X^(q^2) with g uniform and Delta uniform nonzero.
    pub fn random_module<G: Rng>(&self, rng: &mut G) -> DrinfeldMod<GfRing> {
        let order = self.field.order();
        let g = Gf(rng.gen_range(0..order));
        let delta = Gf(rng.gen_range(1..order));
        DrinfeldMod::rank2(&self.ring(), self.gamma_t, g, delta).expect("delta is nonzero")
    }
}

/// Extensions F_{q^(nk)} built directly over F_q, with embeddings of F_{q^n}.
pub struct FieldCache {
    base: Arc<FiniteField>,
    fields: Mutex<HashMap<usize, Arc<FiniteField>>>,
    roots: Mutex<HashMap<usize, Gf>>,
}

impl FieldCache {
    pub fn new(afield: &AField) -> Self {
        FieldCache { base: afield.field.clone(), fields: Mutex::default(), roots: Mutex::default() }
    }

    pub fn extension(&self, k: usize) -> Result<Arc<FiniteField>> {
        let degree = self.base.degree_over_fq() as usize * k;
        if let Some(f) = self.fields.lock().unwrap().get(&degree) {
            return Ok(f.clone());
        }
        let fq = self.base.subfield().expect("extension of F_q").clone();
        let f = FiniteField::extension(&fq, degree)?;
        self.fields.lock().unwrap().insert(degree, f.clone());
        Ok(f)
    }

    /// The embedding F_{q^n} -> F_{q^(nk)} sending the generator to the least
    /// root of its modulus.
    pub fn embedding(&self, k: usize) -> Result<Embedding> {
        let big = self.extension(k)?;
        let degree = big.degree_over_fq() as usize;
        let cached = self.roots.lock().unwrap().get(&degree).copied();
        let root = match cached {
            Some(r) => r,
            None => {
                let modulus = Poly::from_coeffs(self.base.modulus().to_vec());
                let r = big
                    .elements()
                    .find(|&x| modulus.eval_in(x, &big, |c| c).is_zero())
                    .ok_or_else(|| Error::InvalidArgument("extension does not contain the base field".into()))?;
                self.roots.lock().unwrap().insert(degree, r);
                r
            }
        };
        Ok(Embedding { small: self.base.clone(), big, root })
    }
}

#[derive(Clone, Debug)]
pub struct Embedding {
    small: Arc<FiniteField>,
    big: Arc<FiniteField>,
    root: Gf,
}

impl Embedding {
    pub fn big(&self) -> &Arc<FiniteField> {
        &self.big
    }

    pub fn apply(&self, x: Gf) -> Gf {
        let coords = self.small.fq_coords(x);
        coords.iter().rev().fold(Gf(0), |acc, &c| self.big.add(self.big.mul(acc, self.root), c))
    }

    pub fn module(&self, phi: &DrinfeldMod<GfRing>) -> DrinfeldMod<GfRing> {
        phi.map(&GfRing::new(&self.big), |&c| self.apply(c)).expect("embedding preserves the rank")
    }
}

/// F_q-basis of the kernel of an F_q-linear map on `field`, in reduced
/// echelon order (deterministic).
pub fn linear_kernel(fq: &FiniteField, field: &FiniteField, map: impl Fn(Gf) -> Gf) -> Vec<Gf> {
    let d = field.degree_over_fq() as usize;
    let unit = |j: usize| {
        let mut v = vec![Gf(0); d];
        v[j] = Gf(1);
        field.from_fq_coords(&v)
    };
    // rows = coordinates of the image, columns = basis vectors
    let cols: Vec<Vec<Gf>> = (0..d).map(|j| field.fq_coords(map(unit(j)))).collect();
    let mut m: Vec<Vec<Gf>> = (0..d).map(|i| (0..d).map(|j| cols[j][i]).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..d {
        let Some(p) = (row..d).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = fq.inv(m[row][col]).unwrap();
        for x in m[row].iter_mut() {
            *x = fq.mul(*x, inv);
        }
        for r in 0..d {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col];
                for c in 0..d {
                    let t = fq.mul(f, m[row][c]);
                    m[r][c] = fq.sub(m[r][c], t);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Gf(0); d];
            v[f] = Gf(1);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = fq.neg(m[r][f]);
            }
            field.from_fq_coords(&v)
        })
        .collect()
}

/// All F_q-combinations of `basis`; point `i` has coordinates the base-q
/// digits of `i`.
pub fn span(fq: &FiniteField, field: &FiniteField, basis: &[Gf]) -> Vec<Gf> {
    let q = fq.order() as usize;
    let total = q.pow(basis.len() as u32);
    (0..total)
        .map(|mut i| {
            let mut acc = Gf(0);
            for &b in basis {
                let c = Gf((i % q) as u32);
                i /= q;
                acc = field.add(acc, field.mul(c, b));
            }
            acc
        })
        .collect()
}

/// The a-torsion of a module over an extension F_{q^(nk)}.
#[derive(Clone, Debug)]
pub struct TorsionSpace {
    pub module: DrinfeldMod<GfRing>,
    pub level: Poly,
    pub k: usize,
    pub field: Arc<FiniteField>,
    pub basis: Vec<Gf>,
    pub points: Vec<Gf>,
}

impl TorsionSpace {
    fn over(fq: &FiniteField, module: DrinfeldMod<GfRing>, a: &Poly, k: usize) -> Self {
        let field = module.ring().field().clone();
        let basis = linear_kernel(fq, &field, |x| module.eval(a, &x));
        let points = span(fq, &field, &basis);
        TorsionSpace { module, level: a.clone(), k, field, basis, points }
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn contains(&self, x: Gf) -> bool {
        self.module.eval(&self.level, &x).is_zero()
    }
}

fn expected_dim(phi: &DrinfeldMod<GfRing>, a: &Poly) -> usize {
    phi.rank() * a.degree().unwrap_or(0)
}

fn check_level(af: &AField, a: &Poly) -> Result<()> {
    if a.degree().unwrap_or(0) == 0 {
        return Err(Error::InvalidArgument("level must have positive degree".into()));
    }
    if af.gamma_of(a).is_zero() {
        return Err(Error::BadLevel(a.render(&af.fq, "T")));
    }
    Ok(())
}

/// The full a-torsion of `phi` (defined over F_{q^n}) in the least
/// F_{q^(nk)}, k <= k_max, containing all q^(r deg a) points.
pub fn torsion_space(
    af: &AField,
    cache: &FieldCache,
    phi: &DrinfeldMod<GfRing>,
    a: &Poly,
    k_max: usize,
) -> Result<TorsionSpace> {
    check_level(af, a)?;
    let want = expected_dim(phi, a);
    for k in 1..=k_max {
        if !fits(af, k) {
            break;
        }
        let emb = cache.embedding(k)?;
        let space = TorsionSpace::over(&af.fq, emb.module(phi), a, k);
        if space.basis.len() == want {
            return Ok(space);
        }
    }
    Err(Error::IncreaseExtension(format!("{} with k_max = {k_max}", phi.render())))
}

fn fits(af: &AField, k: usize) -> bool {
    (af.q()).checked_pow((af.n * k) as u32).is_some_and(|o| o <= MAX_FIELD_ORDER)
}

/// phi[a] and psi[a] over the least common extension where both split.
pub struct SplitLevel {
    pub phi: TorsionSpace,
    pub psi: TorsionSpace,
}

pub fn split_level(
    af: &AField,
    cache: &FieldCache,
    phi: &DrinfeldMod<GfRing>,
    a: &Poly,
    k_max: usize,
) -> Result<SplitLevel> {
    check_level(af, a)?;
    let psi = phi.determinant()?;
    for k in 1..=k_max {
        if !fits(af, k) {
            break;
        }
        let emb = cache.embedding(k)?;
        let phi_space = TorsionSpace::over(&af.fq, emb.module(phi), a, k);
        if phi_space.basis.len() != expected_dim(phi, a) {
            continue;
        }
        let psi_space = TorsionSpace::over(&af.fq, emb.module(&psi), a, k);
        if psi_space.basis.len() == expected_dim(&psi, a) {
            return Ok(SplitLevel { phi: phi_space, psi: psi_space });
        }
    }
    Err(Error::IncreaseExtension(format!("{} with k_max = {k_max}", phi.render())))
}

/// The A-submodule of a torsion space generated by `xs`.
fn a_span(space: &TorsionSpace, xs: &[Gf]) -> HashSet<u32> {
    let field = &space.field;
    let mut out: HashSet<u32> = HashSet::from([0]);
    let mut frontier = vec![Gf(0)];
    let gens: Vec<Gf> = xs.to_vec();
    // closure under + generator and phi_T
    while let Some(x) = frontier.pop() {
        let mut next: Vec<Gf> = gens.iter().map(|&g| field.add(x, g)).collect();
        next.push(space.module.eval_t(&x));
        for y in next {
            if out.insert(y.0) {
                frontier.push(y);
            }
        }
    }
    out
}

/// Checks of one module; `rng` drives the sampled checks only.
pub fn weil_checks(split: &SplitLevel, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let phi = &split.phi;
    let psi = &split.psi;
    let a = &phi.level;
    let ring = phi.module.ring();
    let field = &phi.field;
    let fq = ring.base().clone();
    let q = fq.order() as usize;
    let dim = phi.basis.len();
    let npts = phi.size();
    let w = |x: Gf, y: Gf| weil_pairing(&phi.module, a, &x, &y);

    let pairs: Vec<(usize, usize)> = if npts <= EXHAUSTIVE_POINTS {
        (0..npts).flat_map(|i| (0..npts).map(move |j| (i, j))).collect()
    } else {
        (0..SAMPLED_PAIRS).map(|_| (rng.gen_range(0..npts), rng.gen_range(0..npts))).collect()
    };
    let exhaustive = npts <= EXHAUSTIVE_POINTS;
    let scope = if exhaustive { "exhaustive" } else { "sampled" };

    let basis_table: Vec<Vec<Gf>> =
        phi.basis.iter().map(|&x| phi.basis.iter().map(|&y| w(x, y)).collect()).collect();
    let digits = |mut i: usize| {
        let mut d = Vec::with_capacity(dim);
        for _ in 0..dim {
            d.push(Gf((i % q) as u32));
            i /= q;
        }
        d
    };

    let mut off_torsion = None;
    let mut not_bilinear = None;
    for &(i, j) in &pairs {
        let v = w(phi.points[i], phi.points[j]);
        if off_torsion.is_none() && !psi.contains(v) {
            off_torsion = Some((i, j));
        }
        if not_bilinear.is_none() {
            let (di, dj) = (digits(i), digits(j));
            let mut expect = Gf(0);
            for (s, &cs) in di.iter().enumerate() {
                for (t, &ct) in dj.iter().enumerate() {
                    let c = fq.mul(cs, ct);
                    if !c.is_zero() {
                        expect = field.add(expect, field.mul(c, basis_table[s][t]));
                    }
                }
            }
            if expect != v {
                not_bilinear = Some((i, j));
            }
        }
    }
    let witness = |p: Option<(usize, usize)>| {
        p.map(|(i, j)| format!("x = {}, y = {}", field.render(phi.points[i]), field.render(phi.points[j])))
    };

    let mut checks = Vec::new();
    let mut c = Check::pass_if("pairing_in_psi_torsion", off_torsion.is_none()).with_note(scope);
    if let Some(wit) = witness(off_torsion) {
        c = c.with_note(wit);
    }
    checks.push(c);

    let alt_points: Vec<usize> = if exhaustive {
        (0..npts).collect()
    } else {
        (0..100).map(|_| rng.gen_range(0..npts)).collect()
    };
    let not_alt = alt_points.iter().find(|&&i| !w(phi.points[i], phi.points[i]).is_zero());
    let mut c = Check::pass_if("alternating", not_alt.is_none()).with_note(scope);
    if let Some(&i) = not_alt {
        c = c.with_note(format!("x = {}", field.render(phi.points[i])));
    }
    checks.push(c);

    let mut c = Check::pass_if("fq_bilinear", not_bilinear.is_none()).with_note(scope);
    if let Some(wit) = witness(not_bilinear) {
        c = c.with_note(wit);
    }
    checks.push(c);

    // an A-basis: x of full A-orbit, then y completing it
    let full = npts;
    let half = psi.size();
    let x = phi.points.iter().copied().find(|&x| a_span(phi, &[x]).len() == half);
    let pair = x.and_then(|x| {
        phi.points.iter().copied().find(|&y| a_span(phi, &[x, y]).len() == full).map(|y| (x, y))
    });
    let nondeg = match pair {
        Some((x, y)) => {
            let v = w(x, y);
            let generated = a_span(psi, &[v]).len() == half;
            Check::pass_if("nondegenerate", generated)
                .with_note(format!("w({}, {}) = {}", field.render(x), field.render(y), field.render(v)))
        }
        None => Check::new("nondegenerate", Status::Fail).with_note("no A-basis found"),
    };
    checks.push(observed(nondeg));

    if a.degree() == Some(1) && a.is_monic() {
        let bad = pairs.iter().find(|&&(i, j)| {
            let (x, y) = (phi.points[i], phi.points[j]);
            w(x, y) != moore_det(ring, &[x, y])
        });
        let mut c = Check::pass_if("moore_for_degree_one", bad.is_none()).with_note(scope);
        if let Some(wit) = witness(bad.copied()) {
            c = c.with_note(wit);
        }
        checks.push(c);
    }

    // A-semilinearity, exploratory
    let deg = a.degree().unwrap_or(0);
    let bs: Vec<Poly> = (1..deg).flat_map(|d| polys_of_degree(&fq, d)).collect();
    if bs.is_empty() {
        checks.push(observed(Check::new("a_semilinear", Status::Pass).with_note("no b with 0 < deg b < deg a")));
    } else {
        let sample: Vec<(usize, usize)> = pairs.iter().step_by((pairs.len() / 200).max(1)).copied().collect();
        let bad = bs.iter().find_map(|b| {
            sample.iter().find_map(|&(i, j)| {
                let (x, y) = (phi.points[i], phi.points[j]);
                let lhs = w(phi.module.eval(b, &x), y);
                let rhs = psi.module.eval(b, &w(x, y));
                (lhs != rhs).then(|| format!("b = {}, x = {}, y = {}", b.render(&fq, "T"), field.render(x), field.render(y)))
            })
        });
        let c = match bad {
            None => Check::new("a_semilinear", Status::Pass),
            Some(wit) => Check::new("a_semilinear", Status::Fail).with_note(wit),
        };
        checks.push(observed(c));
    }
    checks
}

#[derive(Clone, Debug, Serialize)]
pub struct ModuleResult {
    pub attempt: u64,
    pub phi_t: String,
    pub extension_degree: usize,
    pub phi_torsion_points: usize,
    pub psi_torsion_points: usize,
    pub checks: BTreeMap<String, Status>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeilLabReport {
    pub schema: u32,
    pub lab: String,
    pub q: u64,
    pub n: usize,
    pub gamma_t: String,
    pub level: String,
    pub seed: u64,
    pub trials: usize,
    pub k_max: usize,
    /// Attempts whose torsion did not split within k_max; they are redrawn.
    pub skipped_unsplit: usize,
    pub bad_levels: Vec<String>,
    pub modules: Vec<ModuleResult>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct WeilLabConfig {
    pub q: u64,
    pub n: usize,
    pub gamma_t: Gf,
    pub level: Poly,
    pub trials: usize,
    pub seed: u64,
    pub k_max: usize,
}

/// Per-attempt generator: the seed selects the key, the attempt the stream.
pub fn attempt_rng(seed: u64, attempt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt);
    rng
}

enum Attempt {
    Done(ModuleResult, Vec<Check>),
    Unsplit,
}

/// Runs the property checks on `trials` random modules that split within
/// k_max. Results depend only on the configuration.
pub fn weil_property_suite(cfg: &WeilLabConfig) -> Result<WeilLabReport> {
    let af = make_afield(cfg.q, cfg.n, cfg.gamma_t)?;
    check_level(&af, &cfg.level)?;
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let cache = FieldCache::new(&af);
    let run = |attempt: u64| -> Result<Attempt> {
        let mut rng = attempt_rng(cfg.seed, attempt);
        let phi = af.random_module(&mut rng);
        let split = match split_level(&af, &cache, &phi, &cfg.level, cfg.k_max) {
            Ok(s) => s,
            Err(Error::IncreaseExtension(_)) => return Ok(Attempt::Unsplit),
            Err(e) => return Err(e),
        };
        let checks = weil_checks(&split, &mut rng);
        let result = ModuleResult {
            attempt,
            phi_t: phi.phi_t().render(&af.ring()),
            extension_degree: split.phi.k,
            phi_torsion_points: split.phi.size(),
            psi_torsion_points: split.psi.size(),
            checks: checks.iter().map(|c| (c.name.clone(), c.status)).collect(),
        };
        Ok(Attempt::Done(result, checks))
    };

    let mut done: Vec<(ModuleResult, Vec<Check>)> = Vec::new();
    let mut skipped = 0;
    let mut next = 0u64;
    let max_attempts = 50 * cfg.trials as u64;
    while done.len() < cfg.trials {
        if next >= max_attempts {
            return Err(Error::IncreaseExtension(format!(
                "only {} of {} modules split within k_max = {}",
                done.len(),
                cfg.trials,
                cfg.k_max
            )));
        }
        let batch: Vec<u64> = (next..next + cfg.trials as u64).collect();
        next += cfg.trials as u64;
        let outcomes: Vec<Result<Attempt>> = batch.par_iter().map(|&i| run(i)).collect();
        for o in outcomes {
            if done.len() == cfg.trials {
                break;
            }
            match o? {
                Attempt::Done(r, c) => done.push((r, c)),
                Attempt::Unsplit => skipped += 1,
            }
        }
    }

    let checks = aggregate(done.iter().map(|(_, c)| c.as_slice()));
    let passed = checks.iter().all(|c| !c.failed());
    Ok(WeilLabReport {
        schema: SCHEMA,
        lab: "weil".into(),
        q: cfg.q,
        n: cfg.n,
        gamma_t: af.field.render(cfg.gamma_t),
        level: cfg.level.render(&af.fq, "T"),
        seed: cfg.seed,
        trials: cfg.trials,
        k_max: cfg.k_max,
        skipped_unsplit: skipped,
        bad_levels: af.bad_levels(2).iter().map(|a| a.render(&af.fq, "T")).collect(),
        modules: done.into_iter().map(|(r, _)| r).collect(),
        checks,
        passed,
    })
}

/// One check per name: required checks pass iff every module passes; recorded
/// ones stay recorded with a pass count.
fn aggregate<'a>(per_module: impl Iterator<Item = &'a [Check]>) -> Vec<Check> {
    let mut order: Vec<String> = Vec::new();
    let mut stats: HashMap<String, (bool, usize, usize, Option<String>)> = HashMap::new();
    for checks in per_module {
        for c in checks {
            let e = stats.entry(c.name.clone()).or_insert_with(|| {
                order.push(c.name.clone());
                (false, 0, 0, None)
            });
            e.2 += 1;
            let ok = match c.status {
                Status::Pass => true,
                Status::Recorded => c.fitted.get("outcome").is_some_and(|o| o == "pass"),
                _ => false,
            };
            if ok {
                e.1 += 1;
            } else if e.3.is_none() {
                e.3 = c.note.clone();
            }
            if c.status == Status::Recorded {
                e.0 = true;
            }
        }
    }
    order
        .into_iter()
        .map(|name| {
            let (recorded, ok, total, first_bad) = stats.remove(&name).unwrap();
            let status = if recorded {
                Status::Recorded
            } else if ok == total {
                Status::Pass
            } else {
                Status::Fail
            };
            let mut c = Check::new(name, status).with_fitted("holds", format!("{ok}/{total}"));
            if let Some(n) = first_bad {
                c = c.with_note(n);
            }
            c
        })
        .collect()
}

/// Keeps the outcome of an observation that must not decide the verdict.
fn observed(c: Check) -> Check {
    let outcome = if c.status == Status::Pass { "pass" } else { "fail" };
    c.with_fitted("outcome", outcome).recorded()
}
