use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use gl2ind::analysis::Analyzer;
use gl2ind::{CaseLabel, CheckStatus, Elem, FieldCtx, InducedElem, InductionCtx, LevelRange, LocalRingCtx, WeightCtx};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Config, ConfigError};
use crate::report::{Record, Report, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Arith,
    Hecke,
    Mainlemma,
    Truncation,
    Negative,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Arith, Suite::Hecke, Suite::Mainlemma, Suite::Truncation, Suite::Negative];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Arith => "arith",
            Suite::Hecke => "hecke",
            Suite::Mainlemma => "mainlemma",
            Suite::Truncation => "truncation",
            Suite::Negative => "negative",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Record wall-clock seconds; off by default so reports are reproducible.
    pub timing: bool,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    pub inject_failure: bool,
}

/// Per-check context shared by the suites.
struct Runner<'a> {
    config: &'a Config,
    ictx: Arc<InductionCtx>,
    timing: bool,
}

type CheckResult = Result<Record, String>;

impl Runner<'_> {
    fn check<F>(&self, name: &str, body: F) -> Record
    where
        F: FnOnce() -> CheckResult,
    {
        let start = Instant::now();
        let mut rec = match body() {
            Ok(mut r) => {
                r.name = name.to_string();
                r
            }
            Err(msg) => Record::new(name, Status::Fail).detail(msg),
        };
        if self.timing {
            rec.seconds = Some(start.elapsed().as_secs_f64());
        }
        rec
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.config.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn run_suite(&self, suite: Suite) -> Vec<Record> {
        match suite {
            Suite::Arith => self.arith(),
            Suite::Hecke => self.hecke(),
            Suite::Mainlemma => self.mainlemma(),
            Suite::Truncation => self.truncation(),
            Suite::Negative => self.negative(),
        }
    }

    fn random_ring(&self, rng: &mut ChaCha8Rng) -> gl2ind::RingElem {
        let ring = self.ictx.ring();
        let q = ring.q();
        let digits = gl2ind::DigitString((0..ring.precision()).map(|_| Elem(rng.random_range(0..q))).collect());
        ring.from_digits(&digits).expect("digit string fits the precision")
    }

    fn random_elem(&self, rng: &mut ChaCha8Rng, levels: &[usize], terms: usize) -> InducedElem {
        let ic = &self.ictx;
        let (q, kq, d) = (ic.q(), ic.k().order(), ic.weight().dim());
        let mut x = InducedElem::zero();
        for _ in 0..terms {
            let n = levels[rng.random_range(0..levels.len())];
            let mu = gl2ind::DigitString((0..n).map(|_| Elem(rng.random_range(0..q))).collect());
            let w: Vec<Elem> = (0..d).map(|_| Elem(rng.random_range(0..kq))).collect();
            x.add_term(ic.k(), &mu, Elem::ONE, &w);
        }
        x
    }

    fn arith(&self) -> Vec<Record> {
        let fields = self.ictx.fields();
        let fq = fields.fq().clone();
        let ring = self.ictx.ring().clone();
        let q = fq.order();
        let mut out = Vec::new();

        out.push(self.check("arith.field_sum", || {
            let mut rng = self.rng(1);
            let mut polys: Vec<Vec<Elem>> = (0..q as usize)
                .map(|i| {
                    let mut v = vec![Elem::ZERO; i + 1];
                    v[i] = Elem::ONE;
                    v
                })
                .collect();
            for _ in 0..50 {
                let deg = rng.random_range(0..q as usize);
                polys.push((0..=deg).map(|_| Elem(rng.random_range(0..q))).collect());
            }
            for poly in &polys {
                let brute = fq.elements().fold(Elem::ZERO, |acc, t| fq.add(acc, fq.eval_poly(poly, t)));
                let top = if poly.len() == q as usize { poly[q as usize - 1] } else { Elem::ZERO };
                let fast = fields.sum_over_fq(poly).map_err(|e| e.to_string())?;
                if brute != fq.neg(top) || fast != brute {
                    return Err(format!("sum mismatch for polynomial {poly:?}"));
                }
            }
            Ok(Record::new("", Status::Pass).dim("q", q).dim("polynomials", polys.len()))
        }));

        out.push(self.check("arith.frobenius", || {
            let mut rng = self.rng(2);
            let k = fields.k();
            for _ in 0..200 {
                let a = Elem(rng.random_range(0..k.order()));
                let b = Elem(rng.random_range(0..k.order()));
                let j = rng.random_range(0..k.degree());
                let fr = |x| k.frobenius(x, j);
                if fr(k.mul(a, b)) != k.mul(fr(a), fr(b)) || fr(k.add(a, b)) != k.add(fr(a), fr(b)) {
                    return Err(format!("Frobenius fails at {a:?}, {b:?}"));
                }
                if !a.is_zero() && k.mul(a, k.inv(a).map_err(|e| e.to_string())?) != Elem::ONE {
                    return Err(format!("inverse fails at {a:?}"));
                }
            }
            Ok(Record::new("", Status::Pass).dim("samples", 200))
        }));

        out.push(self.check("arith.teichmuller", || {
            for a in fq.elements() {
                let ta = ring.teichmuller(a);
                let mut pow = ring.one();
                for _ in 0..q {
                    pow = ring.mul(&pow, &ta);
                }
                if pow != ta {
                    return Err(format!("[{a:?}]^q != [{a:?}]"));
                }
                for b in fq.elements() {
                    if ring.mul(&ta, &ring.teichmuller(b)) != ring.teichmuller(fq.mul(a, b)) {
                        return Err(format!("[{a:?}][{b:?}] != [{a:?}{b:?}]"));
                    }
                }
            }
            Ok(Record::new("", Status::Pass).dim("pairs", q * q))
        }));

        out.push(self.check("arith.digits", || {
            let mut rng = self.rng(3);
            for _ in 0..100 {
                let a = self.random_ring(&mut rng);
                let n = rng.random_range(1..=ring.precision());
                let ds = ring.digits(&a, n).map_err(|e| e.to_string())?;
                let back = ring.from_digits(&ds).map_err(|e| e.to_string())?;
                if !ring.eq_mod(&ring.truncate(&back, n), &a) {
                    return Err("from_digits ∘ digits is not the identity".into());
                }
            }
            Ok(Record::new("", Status::Pass).dim("samples", 100))
        }));

        out.push(self.check("arith.witt_carry", || {
            if ring.precision() < 2 {
                return Err("precision below 2".into());
            }
            for a in fq.elements() {
                for b in fq.elements() {
                    let ds = ring.witt_carry(a, b, 2).map_err(|e| e.to_string())?;
                    let expect = if ring.e() == 1 {
                        ring.witt_carry_closed_form(a, b)
                    } else {
                        Elem::ZERO
                    };
                    if ds.digits() != [fq.add(a, b), expect] {
                        return Err(format!("carry mismatch at ({a:?}, {b:?}): {ds}"));
                    }
                }
            }
            Ok(Record::new("", Status::Pass).dim("pairs", q * q).dim("e", ring.e()))
        }));
        out
    }

    fn hecke(&self) -> Vec<Record> {
        let ic = &self.ictx;
        let k = ic.k();
        let mut out = Vec::new();
        let top = ic.max_level();

        out.push(self.check("hecke.equivariance", || {
            if top < 4 {
                return Err(format!("needs precision ≥ 5, have {}", ic.ring().precision()));
            }
            let mut rng = self.rng(4);
            for _ in 0..200 {
                let x = self.random_elem(&mut rng, &[1, 2, 3], 3);
                let c = self.random_ring(&mut rng);
                let lhs = ic.u_act(&c, &ic.t(&x).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                let rhs = ic.t(&ic.u_act(&c, &x).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                if lhs != rhs {
                    return Err("u·T ≠ T·u".into());
                }
            }
            Ok(Record::new("", Status::Pass).dim("samples", 200))
        }));

        out.push(self.check("hecke.decomposition", || {
            if top < 4 {
                return Err(format!("needs precision ≥ 5, have {}", ic.ring().precision()));
            }
            let mut rng = self.rng(5);
            for _ in 0..200 {
                let x = self.random_elem(&mut rng, &[1, 2, 3], 3);
                let split = ic.t_plus(&x).and_then(|a| Ok(a.add(k, &ic.t_minus(&x)?)));
                if ic.t(&x).map_err(|e| e.to_string())? != split.map_err(|e| e.to_string())? {
                    return Err("T ≠ T₊ + T₋".into());
                }
            }
            Ok(Record::new("", Status::Pass).dim("samples", 200))
        }));

        out.push(self.check("hecke.deep_trivial", || {
            let mut rng = self.rng(6);
            let levels = top.min(3);
            for n in 0..=levels {
                let pi = ic.ring().uniformizer_pow(n as u32 + 1);
                for _ in 0..50 {
                    let x = self.random_elem(&mut rng, &[n], 3);
                    let c = ic.ring().mul(&pi, &self.random_ring(&mut rng));
                    if ic.u_act(&c, &x).map_err(|e| e.to_string())? != x {
                        return Err(format!("ϖ^{} O acts nontrivially on R_{n}", n + 1));
                    }
                }
            }
            Ok(Record::new("", Status::Pass).dim("levels", levels + 1))
        }));

        out.push(self.check("hecke.t_plus_injective", || {
            let a = Analyzer::new(ic.clone());
            let levels: Vec<usize> = (1..=3).filter(|&n| n < top).collect();
            for &n in &levels {
                if !a.t_plus_injective_at(n).map_err(|e| e.to_string())? {
                    return Err(format!("T₊ not injective on R_{n}"));
                }
            }
            Ok(Record::new("", Status::Pass).dim("levels", levels.len()))
        }));

        out.push(self.check("hecke.sigma_u_invariants", || {
            let dim = ic.weight().u_invariants().dim();
            Ok(Record::new("", Status::from_bool(dim == 1)).dim("dim", dim))
        }));
        out
    }

    fn mainlemma(&self) -> Vec<Record> {
        let a = Analyzer::new(self.ictx.clone());
        let case = a.case_label();
        let start = Instant::now();
        let report = a.main_lemma();
        let elapsed = start.elapsed().as_secs_f64();
        let mut out = Vec::new();
        let stamp = |mut r: Record| {
            if self.timing {
                r.seconds = Some(elapsed);
            }
            r
        };
        let report = match report {
            Ok(r) => r,
            Err(err) => {
                out.push(stamp(Record::new("mainlemma.witness", Status::Fail).detail(err.to_string())));
                return out;
            }
        };
        let mut witness = Record::new(
            "mainlemma.witness",
            match (report.found, case) {
                (true, _) => Status::Pass,
                (false, CaseLabel::SearchOnly) => Status::Skipped,
                (false, _) => Status::Fail,
            },
        )
        .detail(format!("case {}", case.as_str()));
        for (k, v) in &report.dims {
            witness = witness.dim(k.clone(), *v);
        }
        out.push(stamp(witness));

        let explicit = match (report.explicit_candidate_in_v, report.explicit_candidate_outside_w) {
            (Some(in_v), Some(outside)) => {
                let mut r = Record::new("mainlemma.explicit_candidate", Status::from_bool(in_v && outside))
                    .dim("in_v", in_v as i64)
                    .dim("outside_w", outside as i64);
                if let Some(j0) = report.j0 {
                    r = r.dim("j0", j0);
                }
                r
            }
            _ => Record::new("mainlemma.explicit_candidate", Status::Skipped).detail("no explicit construction for this case"),
        };
        out.push(stamp(explicit));

        let cert = match &report.certificate {
            Some(c) => {
                let mut r = Record::new(
                    "mainlemma.certificate",
                    Status::from_bool(c.outside_t_plus_r1 && c.invariant_mod_t_plus_r1_prime),
                );
                for lc in c.t_plus_injective.iter().filter(|l| l.status != CheckStatus::Assumed) {
                    r = r.dim(format!("t_plus_injective_R{}", lc.level), (lc.status == CheckStatus::Pass) as i64);
                }
                r
            }
            None => Record::new("mainlemma.certificate", Status::Skipped).detail("no witness"),
        };
        out.push(stamp(cert));

        if report.certificate.is_some() {
            out.push(stamp(
                Record::new("mainlemma.t_plus_injective_higher", Status::Assumed)
                    .detail("odd levels ≥ 5 rest on the general injectivity of T₊"),
            ));
        }

        out.push(self.check("mainlemma.direct_invariance", || {
            let cands = a.invariant_candidates().map_err(|e| e.to_string())?;
            let range = LevelRange::single(2);
            for b in cands.v.basis() {
                let g = self.ictx.from_coords(&range, b).map_err(|e| e.to_string())?;
                if !a.directly_invariant(&g, &cands).map_err(|e| e.to_string())? {
                    return Err("a vector of V is not invariant modulo T₊R₁′".into());
                }
            }
            Ok(Record::new("", Status::Pass).dim("V", cands.v.dim()))
        }));
        out
    }

    fn truncation(&self) -> Vec<Record> {
        let a = Analyzer::new(self.ictx.clone());
        let expect_two = a.case_label() != CaseLabel::SearchOnly;
        let mut out = Vec::new();
        let mut dims = Vec::new();
        for n in 1..=self.config.trunc {
            out.push(self.check(&format!("truncation.n{n}"), || {
                let rep = a.truncated_l(n).map_err(|e| e.to_string())?;
                let failing: Vec<String> = rep
                    .t_minus_coinvariant_surjective
                    .iter()
                    .map(|c| ("T₋ surjective", c))
                    .chain(rep.t_plus_coinvariant_vanishing.iter().map(|c| ("T₊ vanishing", c)))
                    .filter(|(_, c)| c.status != CheckStatus::Pass)
                    .map(|(what, c)| format!("{what} on coinvariants at level {}", c.level))
                    .collect();
                let ok = failing.is_empty()
                    && rep.dim_coinvariants == 1
                    && (!expect_two || rep.dim_l_invariants >= 2);
                dims.push(rep.dim_l_invariants);
                let mut r = Record::new("", Status::from_bool(ok))
                    .dim("dim_even", rep.dim_even)
                    .dim("dim_t_image", rep.dim_t_image)
                    .dim("dim_l", rep.dim_l)
                    .dim("dim_l_invariants", rep.dim_l_invariants)
                    .dim("dim_y", rep.dim_y)
                    .dim("dim_coinvariants", rep.dim_coinvariants);
                if !failing.is_empty() {
                    r = r.detail(failing.join("; "));
                }
                Ok(r)
            }));
        }
        if dims.len() == self.config.trunc && !dims.is_empty() {
            let monotone = dims.windows(2).all(|w| w[0] <= w[1]);
            let mut r = Record::new(
                "truncation.monotone",
                if expect_two { Status::from_bool(monotone) } else { Status::Skipped },
            );
            for (i, d) in dims.iter().enumerate() {
                r = r.dim(format!("N{}", i + 1), *d);
            }
            out.push(r);
        }
        out
    }

    fn negative(&self) -> Vec<Record> {
        let p = self.config.p;
        vec![self.check(&format!("negative.qp_p{p}"), || {
            let fields = Arc::new(FieldCtx::new(p, 1, 1).map_err(|e| e.to_string())?);
            let mut r = Record::new("", Status::Pass);
            for weight in 0..p {
                let w = WeightCtx::new(fields.clone(), vec![weight], 0, Elem::ONE).map_err(|e| e.to_string())?;
                let ring = LocalRingCtx::new(fields.fq().clone(), 1, 3).map_err(|e| e.to_string())?;
                let ic = InductionCtx::new(Arc::new(w), Arc::new(ring)).map_err(|e| e.to_string())?;
                let cands = Analyzer::new(Arc::new(ic)).invariant_candidates().map_err(|e| e.to_string())?;
                r = r.dim(format!("V_r{weight}"), cands.v.dim()).dim(format!("W_r{weight}"), cands.w.dim());
                if cands.witness_exists() {
                    r.status = Status::Fail;
                    r = r.detail(format!("witness found for r = {weight}"));
                }
            }
            Ok(r)
        })]
    }
}

pub fn run(config: &Config, opts: &RunOptions) -> Result<Report, ConfigError> {
    let ictx = config.build()?;
    let runner = Runner {
        config,
        ictx,
        timing: opts.timing,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| ConfigError::new("--jobs", e.to_string()))?;
    let mut suites = config.suites.clone();
    suites.sort();
    suites.dedup();
    let mut records: Vec<Record> = pool.install(|| {
        suites
            .par_iter()
            .flat_map_iter(|&s| runner.run_suite(s))
            .collect()
    });
    if opts.inject_failure {
        records.push(Record::new("injected.failure", Status::Fail).detail("deliberate failure"));
    }
    Ok(Report::new(config.clone(), records))
}
