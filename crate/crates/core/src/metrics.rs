//! Confusion-matrix measures and ROC curves, with spam as the positive class.
//!
//! Rates whose denominator class is empty are `None` rather than zero. F1 terms
//! and MCC with a zero denominator evaluate to zero.

use crate::corpus::Class;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::ops::{Add, AddAssign};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// Spam classified as spam.
    pub true_positives: usize,
    /// Legitimate classified as legitimate.
    pub true_negatives: usize,
    /// Legitimate classified as spam.
    pub false_positives: usize,
    /// Spam classified as legitimate.
    pub false_negatives: usize,
}

impl ConfusionMatrix {
    pub fn new(tp: usize, tn: usize, fp: usize, fn_: usize) -> Self {
        ConfusionMatrix { true_positives: tp, true_negatives: tn, false_positives: fp, false_negatives: fn_ }
    }

    pub fn record(&mut self, predicted: Class, truth: Class) {
        match (predicted, truth) {
            (Class::Spam, Class::Spam) => self.true_positives += 1,
            (Class::Legitimate, Class::Legitimate) => self.true_negatives += 1,
            (Class::Spam, Class::Legitimate) => self.false_positives += 1,
            (Class::Legitimate, Class::Spam) => self.false_negatives += 1,
        }
    }

    pub fn spam_total(&self) -> usize {
        self.true_positives + self.false_negatives
    }

    pub fn legit_total(&self) -> usize {
        self.true_negatives + self.false_positives
    }

    pub fn total(&self) -> usize {
        self.spam_total() + self.legit_total()
    }

    pub fn errors(&self) -> usize {
        self.false_positives + self.false_negatives
    }

    /// The matrix seen with the class roles exchanged.
    pub fn swapped(&self) -> Self {
        ConfusionMatrix::new(self.true_negatives, self.true_positives, self.false_negatives, self.false_positives)
    }
}

impl Add for ConfusionMatrix {
    type Output = ConfusionMatrix;

    fn add(self, rhs: Self) -> Self {
        ConfusionMatrix::new(
            self.true_positives + rhs.true_positives,
            self.true_negatives + rhs.true_negatives,
            self.false_positives + rhs.false_positives,
            self.false_negatives + rhs.false_negatives,
        )
    }
}

impl AddAssign for ConfusionMatrix {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

pub fn confusion(predictions: &[Class], truths: &[Class]) -> Result<ConfusionMatrix> {
    if predictions.len() != truths.len() {
        return Err(Error::LengthMismatch { left: predictions.len(), right: truths.len() });
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &t) in predictions.iter().zip(truths) {
        cm.record(p, t);
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates<F> {
    pub accuracy: F,
    pub fpr: Option<F>,
    pub fnr: Option<F>,
}

fn ratio<F: Scalar>(num: usize, den: usize) -> Option<F> {
    (den > 0).then(|| F::from_count(num) / F::from_count(den))
}

fn non_empty(cm: &ConfusionMatrix) -> Result<()> {
    if cm.total() == 0 {
        Err(Error::EmptyMatrix)
    } else {
        Ok(())
    }
}

pub fn rates<F: Scalar>(cm: &ConfusionMatrix) -> Result<Rates<F>> {
    non_empty(cm)?;
    Ok(Rates {
        accuracy: F::from_count(cm.true_positives + cm.true_negatives) / F::from_count(cm.total()),
        fpr: ratio(cm.false_positives, cm.legit_total()),
        fnr: ratio(cm.false_negatives, cm.spam_total()),
    })
}

/// Precision and recall of one class; `None` when undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassScores<F> {
    pub precision: Option<F>,
    pub recall: Option<F>,
    pub f1: F,
}

fn class_scores<F: Scalar>(hit: usize, false_alarm: usize, miss: usize) -> ClassScores<F> {
    let precision = ratio::<F>(hit, hit + false_alarm);
    let recall = ratio::<F>(hit, hit + miss);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > F::zero() => F::lit(2.0) * p * r / (p + r),
        _ => F::zero(),
    };
    ClassScores { precision, recall, f1 }
}

pub fn spam_scores<F: Scalar>(cm: &ConfusionMatrix) -> ClassScores<F> {
    class_scores(cm.true_positives, cm.false_positives, cm.false_negatives)
}

pub fn legit_scores<F: Scalar>(cm: &ConfusionMatrix) -> ClassScores<F> {
    class_scores(cm.true_negatives, cm.false_negatives, cm.false_positives)
}

/// Micro-F1 is the spam-class F1; macro-F1 averages the F1 of both classes.
pub fn f_measures<F: Scalar>(cm: &ConfusionMatrix) -> Result<(F, F)> {
    non_empty(cm)?;
    let spam = spam_scores::<F>(cm).f1;
    let legit = legit_scores::<F>(cm).f1;
    Ok((spam, (spam + legit) / F::lit(2.0)))
}

pub fn mcc<F: Scalar>(cm: &ConfusionMatrix) -> Result<F> {
    non_empty(cm)?;
    let c = F::from_count;
    let (tp, tn, fp, fn_) = (cm.true_positives, cm.true_negatives, cm.false_positives, cm.false_negatives);
    let factors = [tp + fp, tp + fn_, tn + fp, tn + fn_];
    if factors.contains(&0) {
        return Ok(F::zero());
    }
    let num = c(tp) * c(tn) - c(fp) * c(fn_);
    let den = factors.iter().map(|&f| c(f)).fold(F::one(), |a, b| a * b).sqrt();
    Ok(num / den)
}

pub const CSV_HEADER: &str =
    "accuracy,fpr,fnr,micro_f1,macro_f1,mcc,spam_precision,spam_recall,legit_precision,legit_recall,tp,tn,fp,fn";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MetricsReport<F: Scalar> {
    pub accuracy: F,
    pub fpr: Option<F>,
    pub fnr: Option<F>,
    pub micro_f1: F,
    pub macro_f1: F,
    pub mcc: F,
    pub spam_precision: Option<F>,
    pub spam_recall: Option<F>,
    pub legit_precision: Option<F>,
    pub legit_recall: Option<F>,
    pub confusion: ConfusionMatrix,
}

impl<F: Scalar> MetricsReport<F> {
    pub fn from_confusion(cm: &ConfusionMatrix) -> Result<Self> {
        let r = rates::<F>(cm)?;
        let (micro_f1, macro_f1) = f_measures::<F>(cm)?;
        let spam = spam_scores::<F>(cm);
        let legit = legit_scores::<F>(cm);
        Ok(MetricsReport {
            accuracy: r.accuracy,
            fpr: r.fpr,
            fnr: r.fnr,
            micro_f1,
            macro_f1,
            mcc: mcc(cm)?,
            spam_precision: spam.precision,
            spam_recall: spam.recall,
            legit_precision: legit.precision,
            legit_recall: legit.recall,
            confusion: *cm,
        })
    }

    /// One CSV row in [`CSV_HEADER`] order; absent values are empty cells.
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<F>| v.map(|x| x.to_string()).unwrap_or_default();
        let cm = &self.confusion;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.accuracy,
            opt(self.fpr),
            opt(self.fnr),
            self.micro_f1,
            self.macro_f1,
            self.mcc,
            opt(self.spam_precision),
            opt(self.spam_recall),
            opt(self.legit_precision),
            opt(self.legit_recall),
            cm.true_positives,
            cm.true_negatives,
            cm.false_positives,
            cm.false_negatives
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct RocPoint<F: Scalar> {
    pub fpr: F,
    pub tpr: F,
}

/// ROC vertices from sweeping the threshold down through every distinct score.
///
/// Collinear interior points are dropped, so the result is the minimal
/// polyline from (0,0) to (1,1).
pub fn roc_points<F: Scalar>(scores: &[F], truths: &[Class]) -> Result<Vec<RocPoint<F>>> {
    if scores.len() != truths.len() {
        return Err(Error::LengthMismatch { left: scores.len(), right: truths.len() });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("scores", "must be finite"));
    }
    let positives = truths.iter().filter(|&&t| t == Class::Spam).count();
    let negatives = truths.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("finite"));

    let mut counts: Vec<(usize, usize)> = vec![(0, 0)];
    let (mut fp, mut tp) = (0usize, 0usize);
    for (k, &i) in order.iter().enumerate() {
        match truths[i] {
            Class::Spam => tp += 1,
            Class::Legitimate => fp += 1,
        }
        let group_ends = order.get(k + 1).is_none_or(|&j| scores[j] != scores[i]);
        if group_ends {
            push_reduced(&mut counts, (fp, tp));
        }
    }
    Ok(counts
        .into_iter()
        .map(|(f, t)| RocPoint { fpr: F::from_count(f) / F::from_count(negatives), tpr: F::from_count(t) / F::from_count(positives) })
        .collect())
}

fn push_reduced(points: &mut Vec<(usize, usize)>, p: (usize, usize)) {
    while points.len() >= 2 {
        let a = points[points.len() - 2];
        let b = points[points.len() - 1];
        // cross product of (b - a) and (p - a), exact in integers
        let cross = (b.0 as i128 - a.0 as i128) * (p.1 as i128 - a.1 as i128)
            - (b.1 as i128 - a.1 as i128) * (p.0 as i128 - a.0 as i128);
        if cross == 0 {
            points.pop();
        } else {
            break;
        }
    }
    points.push(p);
}

/// Trapezoidal area under a ROC polyline.
pub fn auc<F: Scalar>(points: &[RocPoint<F>]) -> F {
    points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / F::lit(2.0))
        .sum()
}

/// Two-column `fpr\ttpr` text with a header line.
pub fn roc_tsv<F: Scalar>(points: &[RocPoint<F>]) -> String {
    let mut out = String::from("fpr\ttpr\n");
    for p in points {
        let _ = writeln!(out, "{}\t{}", p.fpr, p.tpr);
    }
    out
}
