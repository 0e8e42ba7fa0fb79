//! Document-frequency based reference selectors.
//!
//! Every score is computed from the 2x2 contingency table of a term:
//!
//! ```text
//!              spam        legitimate
//! present      A = df_s    B = df_l
//! absent       C = N_S-A   D = N_L-B        N = N_S + N_L
//! ```
//!
//! With `H(p) = -p log2 p - (1-p) log2 (1-p)` and `g(p) = 2p(1-p)`:
//!
//! * IG   = H(P(s)) - P(t) H(P(s|t)) - P(!t) H(P(s|!t))
//! * CHI  = N (AD - BC)^2 / ((A+B)(C+D)(A+C)(B+D))
//! * GINI = g(P(s)) - P(t) g(P(s|t)) - P(!t) g(P(s|!t))   (impurity decrease)
//! * IGR  = IG / H(P(t))
//! * CFS  = 2 IG / (H(P(s)) + H(P(t)))   (symmetric uncertainty, the
//!   single-feature merit of correlation-based selection)
//!
//! Zero denominators yield a score of 0.

use std::collections::BTreeMap;

use super::{CorpusCounts, FeatureCounts, Selector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn entropy<F: Scalar>(p: F) -> F {
    let term = |q: F| if q > F::zero() { -q * q.log2() } else { F::zero() };
    term(p) + term(F::one() - p)
}

fn gini<F: Scalar>(p: F) -> F {
    F::lit(2.0) * p * (F::one() - p)
}

fn ratio<F: Scalar>(num: F, den: F) -> F {
    if den > F::zero() {
        num / den
    } else {
        F::zero()
    }
}

struct Table<F> {
    a: F,
    b: F,
    c: F,
    d: F,
    n: F,
}

impl<F: Scalar> Table<F> {
    fn new(fc: &FeatureCounts, n_spam: usize, n_legit: usize) -> Self {
        let a = F::from_count(fc.doc_freq_spam);
        let b = F::from_count(fc.doc_freq_legit);
        let c = F::from_count(n_spam.saturating_sub(fc.doc_freq_spam));
        let d = F::from_count(n_legit.saturating_sub(fc.doc_freq_legit));
        Table { a, b, c, d, n: a + b + c + d }
    }

    fn p_spam(&self) -> F {
        (self.a + self.c) / self.n
    }

    fn p_term(&self) -> F {
        (self.a + self.b) / self.n
    }

    fn split<G: Fn(F) -> F>(&self, impurity: G) -> F {
        let pt = self.p_term();
        let present = ratio(self.a, self.a + self.b);
        let absent = ratio(self.c, self.c + self.d);
        impurity(self.p_spam()) - pt * impurity(present) - (F::one() - pt) * impurity(absent)
    }

    fn information_gain(&self) -> F {
        self.split(entropy).max(F::zero())
    }

    fn chi_square(&self) -> F {
        let num = self.a * self.d - self.b * self.c;
        let den = (self.a + self.b) * (self.c + self.d) * (self.a + self.c) * (self.b + self.d);
        ratio(self.n * num * num, den)
    }
}

/// Scores every term with one of the five reference selectors.
pub fn baseline_score<F: Scalar>(method: Selector, counts: &CorpusCounts) -> Result<BTreeMap<String, F>> {
    if method == Selector::Tfdcr {
        return Err(Error::UnsupportedMethod(format!("{method} is not a baseline selector")));
    }
    if matches!(method, Selector::Ig | Selector::Igr | Selector::Cfs)
        && (counts.spam_docs() == 0 || counts.legit_docs() == 0)
    {
        return Err(Error::SingleClass);
    }
    let (ns, nl) = (counts.spam_docs(), counts.legit_docs());
    Ok(counts
        .iter()
        .map(|fc| {
            let t: Table<F> = Table::new(fc, ns, nl);
            let score = match method {
                Selector::Ig => t.information_gain(),
                Selector::Chi => t.chi_square(),
                Selector::Gini => t.split(gini).max(F::zero()),
                Selector::Igr => ratio(t.information_gain(), entropy(t.p_term())),
                Selector::Cfs => ratio(
                    F::lit(2.0) * t.information_gain(),
                    entropy(t.p_spam()) + entropy(t.p_term()),
                ),
                Selector::Tfdcr => unreachable!(),
            };
            (fc.term.clone(), score)
        })
        .collect())
}
