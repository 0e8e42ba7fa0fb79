//! Line-oriented model dump. Floats are written with `Display`, which prints
//! the shortest round-trip decimal, so dump -> parse -> dump is bit-exact.

use std::fmt::Write as _;

use super::{Kernel, SupportVector, SvmModel, TrainConfig};
use crate::corpus::Class;
use crate::error::{Error, Result};
use crate::features::{SpaceId, SparseVector};
use crate::scalar::{parse_scalar, Scalar};

const MAGIC: &str = "spamdrift-svm 1";

impl<F: Scalar> SvmModel<F> {
    pub fn to_text(&self) -> Result<String> {
        let mut out = String::new();
        let cfg = &self.config;
        writeln!(out, "{MAGIC}").unwrap();
        match cfg.kernel {
            Kernel::Linear => writeln!(out, "kernel linear").unwrap(),
            Kernel::Rbf { gamma } => writeln!(out, "kernel rbf {gamma}").unwrap(),
        }
        writeln!(out, "c {}", cfg.c).unwrap();
        writeln!(out, "kkt_tolerance {}", cfg.kkt_tolerance).unwrap();
        writeln!(out, "alpha_epsilon {}", cfg.alpha_epsilon).unwrap();
        writeln!(out, "max_passes {}", cfg.max_passes).unwrap();
        writeln!(out, "bias {}", self.bias).unwrap();
        match self.space {
            Some(s) => writeln!(out, "space {s}").unwrap(),
            None => writeln!(out, "space none").unwrap(),
        }
        writeln!(out, "dim {}", self.dim).unwrap();
        writeln!(out, "support {}", self.support.len()).unwrap();
        for sv in &self.support {
            if sv.id.is_empty() || sv.id.contains(['\t', '\n', '\r']) {
                return Err(Error::format("model", format!("unwritable document id {:?}", sv.id)));
            }
            let sign = if sv.y == Class::Spam { "+1" } else { "-1" };
            let entries: Vec<String> = sv.x.entries().iter().map(|(p, v)| format!("{p}:{v}")).collect();
            writeln!(out, "{}\t{sign}\t{}\t{}", sv.id, sv.alpha, entries.join(" ")).unwrap();
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let mut next = |key: &str| -> Result<(usize, String)> {
            let (idx, line) = lines
                .next()
                .ok_or_else(|| Error::format("model", format!("missing `{key}` line")))?;
            if key.is_empty() {
                return Ok((idx + 1, line.to_owned()));
            }
            let rest = line
                .strip_prefix(key)
                .and_then(|r| r.strip_prefix(' '))
                .ok_or_else(|| Error::Parse {
                    line: idx + 1,
                    message: format!("expected `{key} ...`"),
                })?;
            Ok((idx + 1, rest.to_owned()))
        };
        fn num<F: Scalar>(line: usize, text: &str) -> Result<F> {
            parse_scalar(text).ok_or_else(|| Error::Parse {
                line,
                message: format!("bad number `{text}`"),
            })
        }
        fn count(line: usize, text: &str) -> Result<usize> {
            text.trim().parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad count `{text}`"),
            })
        }

        let (_, magic) = next("")?;
        if magic != MAGIC {
            return Err(Error::format("model", format!("unknown header `{magic}`")));
        }
        let (l, kernel) = next("kernel")?;
        let kernel = match kernel.split_once(' ') {
            None if kernel == "linear" => Kernel::Linear,
            Some(("rbf", g)) => Kernel::Rbf { gamma: num(l, g)? },
            _ => return Err(Error::Parse { line: l, message: format!("unknown kernel `{kernel}`") }),
        };
        let (l, c) = next("c")?;
        let c = num(l, &c)?;
        let (l, tol) = next("kkt_tolerance")?;
        let kkt_tolerance = num(l, &tol)?;
        let (l, eps) = next("alpha_epsilon")?;
        let alpha_epsilon = num(l, &eps)?;
        let (l, passes) = next("max_passes")?;
        let max_passes = count(l, &passes)?;
        let (l, bias) = next("bias")?;
        let bias = num(l, &bias)?;
        let (_, space) = next("space")?;
        let space = if space == "none" { None } else { Some(space.parse::<SpaceId>()?) };
        let (l, dim) = next("dim")?;
        let dim = count(l, &dim)?;
        let (l, n) = next("support")?;
        let n = count(l, &n)?;

        let mut support = Vec::with_capacity(n);
        for _ in 0..n {
            let (l, line) = next("")?;
            let bad = |m: &str| Error::Parse { line: l, message: m.to_owned() };
            let mut parts = line.split('\t');
            let (Some(id), Some(sign), Some(alpha), Some(entries), None) =
                (parts.next(), parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(bad("expected id<TAB>sign<TAB>alpha<TAB>entries"));
            };
            let y = match sign {
                "+1" => Class::Spam,
                "-1" => Class::Legitimate,
                _ => return Err(bad("sign must be +1 or -1")),
            };
            let mut pairs = Vec::new();
            for pair in entries.split_whitespace() {
                let (p, v) = pair.split_once(':').ok_or_else(|| bad("expected pos:value"))?;
                let p: usize = p.parse().map_err(|_| bad("bad position"))?;
                pairs.push((p, num(l, v)?));
            }
            let mut x = SparseVector::new(pairs)?;
            if let Some(s) = space {
                x = x.with_space(s);
            }
            support.push(SupportVector { id: id.to_owned(), alpha: num(l, alpha)?, y, x });
        }
        let config = TrainConfig { c, kernel, kkt_tolerance, alpha_epsilon, max_passes };
        config.validate()?;
        Ok(SvmModel { config, bias, support, space, dim, stats: None })
    }
}
