use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::iterate::{extended_star, gspi_lhs, gspi_rhs, plus};
use super::normal_form::NormalForm;
use super::{Theory, TheoryError, Verdict};

/// Shape of a sampled arrow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    /// Closure of the generators under base maps.
    OneStep,
    /// Arbitrary representable arrow.
    Regular,
}

/// Random arrows for an instance. Sampling is a pure function of the RNG state.
pub trait Sampler<T: Theory>: Sync {
    fn sample(&self, t: &T, rng: &mut ChaCha8Rng, dom: usize, cod: usize, kind: SampleKind) -> T::Arrow;

    /// Largest object drawn for a law instance.
    fn max_dim(&self) -> usize;
}

#[derive(Debug, Clone)]
pub struct LawConfig {
    pub samples: usize,
    pub seed: u64,
    pub jobs: usize,
    /// Also check the ω-laws when the instance has a top element.
    pub omega: bool,
}

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig {
            samples: 200,
            seed: 0,
            jobs: 1,
            omega: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawResult {
    pub law: &'static str,
    pub checked: usize,
    pub failures: usize,
    /// First failing instance with its witness.
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawReport {
    pub results: Vec<LawResult>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.failures == 0)
    }

    pub fn total_failures(&self) -> usize {
        self.results.iter().map(|r| r.failures).sum()
    }

    pub fn result(&self, law: &str) -> Option<&LawResult> {
        self.results.iter().find(|r| r.law == law)
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            let status = if r.failures == 0 { "ok" } else { "FAIL" };
            writeln!(
                f,
                "{:<34} {:>4} {:>6}/{}",
                r.law,
                status,
                r.checked - r.failures,
                r.checked
            )?;
            if let Some(c) = &r.counterexample {
                writeln!(f, "    counterexample: {c}")?;
            }
        }
        Ok(())
    }
}

struct Ctx<'a, T: Theory, S> {
    t: &'a T,
    s: &'a S,
    rng: ChaCha8Rng,
}

impl<T: Theory, S: Sampler<T>> Ctx<'_, T, S> {
    fn dim(&mut self) -> usize {
        self.rng.gen_range(1..=self.s.max_dim())
    }

    fn arrow(&mut self, m: usize, p: usize) -> T::Arrow {
        self.s.sample(self.t, &mut self.rng, m, p, SampleKind::Regular)
    }

    fn one_step(&mut self, m: usize, p: usize) -> T::Arrow {
        self.s.sample(self.t, &mut self.rng, m, p, SampleKind::OneStep)
    }

    fn base(&mut self, m: usize, p: usize) -> T::Arrow {
        let map: Vec<usize> = (0..m).map(|_| self.rng.gen_range(0..p)).collect();
        self.t.base(&map, p).expect("map in range")
    }

    fn normal_form(&mut self, m: usize, p: usize) -> NormalForm<T::Arrow> {
        let n = m + self.rng.gen_range(0..=1);
        let generator = self.one_step(n, n + p);
        NormalForm {
            generator,
            states: n,
            sources: m,
            outputs: p,
        }
    }

    fn eq(&self, what: &str, lhs: &T::Arrow, rhs: &T::Arrow, inputs: &[&T::Arrow]) -> Result<Verdict, TheoryError> {
        Ok(match self.t.compare(lhs, rhs)? {
            Verdict::Holds => Verdict::Holds,
            Verdict::Fails(w) => Verdict::Fails(self.explain(what, &w, inputs)),
        })
    }

    fn leq(&self, what: &str, lhs: &T::Arrow, rhs: &T::Arrow, inputs: &[&T::Arrow]) -> Result<Verdict, TheoryError> {
        Ok(match self.t.compare_leq(lhs, rhs)? {
            Verdict::Holds => Verdict::Holds,
            Verdict::Fails(w) => Verdict::Fails(self.explain(what, &w, inputs)),
        })
    }

    fn explain(&self, what: &str, witness: &str, inputs: &[&T::Arrow]) -> String {
        let args: Vec<String> = inputs.iter().map(|a| self.t.describe(a)).collect();
        format!("{what}: {witness}; inputs: {}", args.join(" | "))
    }
}

type LawFn<T, S> = fn(&mut Ctx<'_, T, S>) -> Result<Verdict, TheoryError>;

fn all<I: IntoIterator<Item = Result<Verdict, TheoryError>>>(vs: I) -> Result<Verdict, TheoryError> {
    for v in vs {
        if let Verdict::Fails(w) = v? {
            return Ok(Verdict::Fails(w));
        }
    }
    Ok(Verdict::Holds)
}

fn finite_laws<T: Theory, S: Sampler<T>>() -> Vec<(&'static str, LawFn<T, S>)> {
    vec![
        ("compose-associative", |c| {
            let (a, b, d, e) = (c.dim(), c.dim(), c.dim(), c.dim());
            let (f, g, h) = (c.arrow(a, b), c.arrow(b, d), c.arrow(d, e));
            let lhs = c.t.compose(&h, &c.t.compose(&g, &f)?)?;
            let rhs = c.t.compose(&c.t.compose(&h, &g)?, &f)?;
            c.eq("h.(g.f) vs (h.g).f", &lhs, &rhs, &[&f, &g, &h])
        }),
        ("compose-identity", |c| {
            let (m, p) = (c.dim(), c.dim());
            let f = c.arrow(m, p);
            all([
                c.eq("id.f vs f", &c.t.compose(&c.t.identity(p), &f)?, &f, &[&f]),
                c.eq("f.id vs f", &c.t.compose(&f, &c.t.identity(m))?, &f, &[&f]),
            ])
        }),
        ("join-associative", |c| {
            let (m, p) = (c.dim(), c.dim());
            let (f, g, h) = (c.arrow(m, p), c.arrow(m, p), c.arrow(m, p));
            let lhs = c.t.join(&f, &c.t.join(&g, &h)?)?;
            let rhs = c.t.join(&c.t.join(&f, &g)?, &h)?;
            c.eq("f+(g+h) vs (f+g)+h", &lhs, &rhs, &[&f, &g, &h])
        }),
        ("join-commutative", |c| {
            let (m, p) = (c.dim(), c.dim());
            let (f, g) = (c.arrow(m, p), c.arrow(m, p));
            c.eq("f+g vs g+f", &c.t.join(&f, &g)?, &c.t.join(&g, &f)?, &[&f, &g])
        }),
        ("join-idempotent", |c| {
            let (m, p) = (c.dim(), c.dim());
            let f = c.arrow(m, p);
            c.eq("f+f vs f", &c.t.join(&f, &f)?, &f, &[&f])
        }),
        ("join-bottom-unit", |c| {
            let (m, p) = (c.dim(), c.dim());
            let f = c.arrow(m, p);
            c.eq("f+bottom vs f", &c.t.join(&f, &c.t.bottom(m, p))?, &f, &[&f])
        }),
        ("join-upper-bound", |c| {
            let (m, p) = (c.dim(), c.dim());
            let (f, g) = (c.arrow(m, p), c.arrow(m, p));
            c.leq("f <= f+g", &f, &c.t.join(&f, &g)?, &[&f, &g])
        }),
        ("compose-left-distributive", |c| {
            let (m, n, p) = (c.dim(), c.dim(), c.dim());
            let (f1, f2, g) = (c.arrow(m, n), c.arrow(m, n), c.arrow(n, p));
            let lhs = c.t.compose(&g, &c.t.join(&f1, &f2)?)?;
            let rhs = c.t.join(&c.t.compose(&g, &f1)?, &c.t.compose(&g, &f2)?)?;
            c.eq("g.(f1+f2) vs g.f1+g.f2", &lhs, &rhs, &[&f1, &f2, &g])
        }),
        ("compose-right-distributive-base", |c| {
            let (k, m, p) = (c.dim(), c.dim(), c.dim());
            let (f1, f2, j) = (c.arrow(m, p), c.arrow(m, p), c.base(k, m));
            let lhs = c.t.compose(&c.t.join(&f1, &f2)?, &j)?;
            let rhs = c.t.join(&c.t.compose(&f1, &j)?, &c.t.compose(&f2, &j)?)?;
            c.eq("(f1+f2).j vs f1.j+f2.j", &lhs, &rhs, &[&f1, &f2, &j])
        }),
        ("compose-bottom-absorbing", |c| {
            let (m, n, p) = (c.dim(), c.dim(), c.dim());
            let g = c.arrow(n, p);
            c.eq(
                "g.bottom vs bottom",
                &c.t.compose(&g, &c.t.bottom(m, n))?,
                &c.t.bottom(m, p),
                &[&g],
            )
        }),
        ("cotuple-injection", |c| {
            let (m1, m2, p) = (c.dim(), c.dim(), c.dim());
            let (f, g) = (c.arrow(m1, p), c.arrow(m2, p));
            let fg = c.t.cotuple(&[f.clone(), g.clone()])?;
            all([
                c.eq(
                    "[f,g].in0 vs f",
                    &c.t.compose(&fg, &c.t.injection(0, &[m1, m2])?)?,
                    &f,
                    &[&f, &g],
                ),
                c.eq(
                    "[f,g].in1 vs g",
                    &c.t.compose(&fg, &c.t.injection(1, &[m1, m2])?)?,
                    &g,
                    &[&f, &g],
                ),
            ])
        }),
        ("star-unfold", |c| {
            let n = c.dim();
            let a = c.arrow(n, n);
            let s = c.t.star(&a)?;
            let rhs = c.t.join(&c.t.identity(n), &c.t.compose(&s, &a)?)?;
            c.eq("a* vs id + a*.a", &s, &rhs, &[&a])
        }),
        ("star-join-of-powers", |c| {
            let n = c.dim();
            let a = c.arrow(n, n);
            let s = c.t.star(&a)?;
            let step = c.t.join(&c.t.identity(n), &a)?;
            let mut power = step.clone();
            let mut checks = vec![c.t.star_is_join_of_powers(&a, &s)];
            for _ in 0..3 {
                checks.push(c.leq("(id+a)^k <= a*", &power, &s, &[&a]));
                power = c.t.compose(&power, &step)?;
            }
            all(checks)
        }),
        ("star-identity", |c| {
            let n = c.dim();
            let id = c.t.identity(n);
            c.eq("id* vs id", &c.t.star(&id)?, &id, &[])
        }),
        ("star-reflexive", |c| {
            let n = c.dim();
            let a = c.arrow(n, n);
            c.leq("id <= a*", &c.t.identity(n), &c.t.star(&a)?, &[&a])
        }),
        ("star-idempotent", |c| {
            let n = c.dim();
            let a = c.arrow(n, n);
            let s = c.t.star(&a)?;
            c.eq("a*.a* vs a*", &c.t.compose(&s, &s)?, &s, &[&a])
        }),
        ("extended-star", |c| {
            let (n, p) = (c.dim(), c.dim());
            let a = c.arrow(n, n + p);
            let inj = c.t.injection(1, &[n, p])?;
            let lhs = c.t.cotuple(&[extended_star(c.t, &a)?, inj.clone()])?;
            let rhs = c.t.star(&c.t.cotuple(&[a.clone(), inj])?)?;
            c.eq("[a*, in] vs [a, in]*", &lhs, &rhs, &[&a])
        }),
        ("star-pairing", |c| {
            let (n, m) = (c.dim(), c.dim());
            let p = c.rng.gen_range(0..=c.s.max_dim());
            let (f, g) = (c.arrow(n, n + m + p), c.arrow(m, n + m + p));
            c.eq(
                "[f,g]* vs pairing",
                &gspi_lhs(c.t, &f, &g)?,
                &gspi_rhs(c.t, &f, &g)?,
                &[&f, &g],
            )
        }),
        ("nf-compose", |c| {
            let (a, b, d) = (c.dim(), c.dim(), c.dim());
            let (r1, r2) = (c.normal_form(a, b), c.normal_form(b, d));
            let nf = NormalForm::compose(c.t, &r2, &r1)?.denotation(c.t)?;
            let (d1, d2) = (r1.denotation(c.t)?, r2.denotation(c.t)?);
            c.eq(
                "nf(r2.r1) vs r2.r1",
                &nf,
                &c.t.compose(&d2, &d1)?,
                &[&r1.generator, &r2.generator],
            )
        }),
        ("nf-join", |c| {
            let (m, p) = (c.dim(), c.dim());
            let (r1, r2) = (c.normal_form(m, p), c.normal_form(m, p));
            let nf = NormalForm::join(c.t, &r1, &r2)?.denotation(c.t)?;
            let direct = c.t.join(&r1.denotation(c.t)?, &r2.denotation(c.t)?)?;
            c.eq("nf(r1+r2) vs r1+r2", &nf, &direct, &[&r1.generator, &r2.generator])
        }),
        ("nf-star", |c| {
            let m = c.dim();
            let r = c.normal_form(m, m);
            let d = r.denotation(c.t)?;
            let s = c.t.star(&d)?;
            all([
                c.eq(
                    "nf(r*) vs r*",
                    &NormalForm::star(c.t, &r)?.denotation(c.t)?,
                    &s,
                    &[&r.generator],
                ),
                c.eq(
                    "nf(r+) vs r+",
                    &NormalForm::plus(c.t, &r)?.denotation(c.t)?,
                    &c.t.compose(&s, &d)?,
                    &[&r.generator],
                ),
            ])
        }),
        ("nf-cotuple", |c| {
            let (m1, m2, p) = (c.dim(), c.dim(), c.dim());
            let (r1, r2) = (c.normal_form(m1, p), c.normal_form(m2, p));
            let nf = NormalForm::cotuple(c.t, &[r1.clone(), r2.clone()])?.denotation(c.t)?;
            let direct = c.t.cotuple(&[r1.denotation(c.t)?, r2.denotation(c.t)?])?;
            c.eq("nf[r1,r2] vs [r1,r2]", &nf, &direct, &[&r1.generator, &r2.generator])
        }),
    ]
}

fn omega_laws<T: Theory, S: Sampler<T>>() -> Vec<(&'static str, LawFn<T, S>)> {
    vec![
        ("omega-fixpoint", |c| {
            let n = c.dim();
            let a = c.arrow(n, n);
            let w = c.t.omega(&a)?;
            c.eq("a^w vs a^w.a", &w, &c.t.compose(&w, &a)?, &[&a])
        }),
        ("omega-rolling", |c| {
            let (n, m) = (c.dim(), c.dim());
            let (a, b) = (c.arrow(n, m), c.arrow(m, n));
            let lhs = c.t.omega(&c.t.compose(&a, &b)?)?;
            let rhs = c.t.compose(&c.t.omega(&c.t.compose(&b, &a)?)?, &b)?;
            c.eq("(a.b)^w vs (b.a)^w.b", &lhs, &rhs, &[&a, &b])
        }),
        ("omega-power", |c| {
            let n = c.dim();
            let a = c.arrow(n, n);
            let w = c.t.omega(&a)?;
            let a2 = c.t.compose(&a, &a)?;
            let a3 = c.t.compose(&a2, &a)?;
            all([
                c.eq("(a^2)^w vs a^w", &c.t.omega(&a2)?, &w, &[&a]),
                c.eq("(a^3)^w vs a^w", &c.t.omega(&a3)?, &w, &[&a]),
            ])
        }),
        ("omega-plus", |c| {
            let n = c.dim();
            let a = c.arrow(n, n);
            c.eq("a^w vs (a+)^w", &c.t.omega(&a)?, &c.t.omega(&plus(c.t, &a)?)?, &[&a])
        }),
        ("omega-uniformity", |c| {
            let k = c.dim();
            let n = k + c.rng.gen_range(0..=1);
            // Surjective j : n -> k with section r : k -> n.
            let j_map: Vec<usize> = (0..n).map(|i| if i < k { i } else { c.rng.gen_range(0..k) }).collect();
            let j = c.t.base(&j_map, k)?;
            let r = c.t.base(&(0..k).collect::<Vec<_>>(), n)?;
            let b = c.arrow(k, k);
            let a = c.t.compose(&r, &c.t.compose(&b, &j)?)?;
            c.eq(
                "a^w vs b^w.j",
                &c.t.omega(&a)?,
                &c.t.compose(&c.t.omega(&b)?, &j)?,
                &[&b, &j],
            )
        }),
    ]
}

/// Runs every law on `config.samples` random instances. Sample `i` draws
/// from a ChaCha8 stream seeded with `config.seed` on stream `i`, so the
/// report does not depend on `config.jobs`.
pub fn check_theory_laws<T, S>(t: &T, sampler: &S, config: &LawConfig) -> LawReport
where
    T: Theory + Sync,
    S: Sampler<T>,
{
    let mut laws = finite_laws::<T, S>();
    if config.omega && t.top(1).is_some() {
        laws.extend(omega_laws::<T, S>());
    }
    let run_sample = |i: usize| -> Vec<Option<String>> {
        laws.iter()
            .enumerate()
            .map(|(k, (name, law))| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(((i as u64) << 8) | k as u64);
                let mut ctx = Ctx { t, s: sampler, rng };
                match law(&mut ctx) {
                    Ok(Verdict::Holds) => None,
                    Ok(Verdict::Fails(w)) => Some(format!("sample {i}: {w}")),
                    Err(e) => Some(format!("sample {i}: {name} raised {e}")),
                }
            })
            .collect()
    };
    let jobs = config.jobs.max(1).min(config.samples.max(1));
    let mut outcomes: Vec<Vec<Option<String>>> = vec![Vec::new(); config.samples];
    if jobs == 1 {
        for (i, o) in outcomes.iter_mut().enumerate() {
            *o = run_sample(i);
        }
    } else {
        std::thread::scope(|scope| {
            let chunks: Vec<(usize, &mut [Vec<Option<String>>])> = {
                let size = config.samples.div_ceil(jobs);
                outcomes
                    .chunks_mut(size)
                    .enumerate()
                    .map(|(c, ch)| (c * size, ch))
                    .collect()
            };
            for (start, chunk) in chunks {
                let run = &run_sample;
                scope.spawn(move || {
                    for (off, o) in chunk.iter_mut().enumerate() {
                        *o = run(start + off);
                    }
                });
            }
        });
    }
    let results = laws
        .iter()
        .enumerate()
        .map(|(k, (name, _))| {
            let failures: Vec<&String> = outcomes.iter().filter_map(|o| o[k].as_ref()).collect();
            LawResult {
                law: name,
                checked: config.samples,
                failures: failures.len(),
                counterexample: failures.first().map(|s| s.to_string()),
            }
        })
        .collect();
    LawReport { results }
}
