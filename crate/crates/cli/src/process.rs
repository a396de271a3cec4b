//! Shorthand parsers for processes, jump laws and complex numbers.

use expfun::montecarlo::{JumpLaw, LevyKind, LevySpec};
use expfun::{Bernstein, Error, Result, C64};

/// `re` or `re,im`.
pub fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let mut parts = s.split(',').map(str::trim);
    let re = parts.next().unwrap_or_default();
    let re: f64 = re.parse().map_err(|_| format!("bad real part {re:?}"))?;
    let im = match parts.next() {
        Some(p) => p.parse().map_err(|_| format!("bad imaginary part {p:?}"))?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(format!("expected re[,im], got {s:?}"));
    }
    Ok(C64::new(re, im))
}

fn num(s: Option<&str>, what: &str) -> Result<f64> {
    let s = s.ok_or_else(|| Error::InvalidSpec(format!("missing {what}")))?;
    s.parse().map_err(|_| Error::InvalidSpec(format!("bad {what} {s:?}")))
}

/// `exp:<rate>`, `gamma:<shape>:<rate>`, `fixed:<size>`, `normal:<sd>`,
/// `laplace:<scale>`, `uniform:<half width>`.
pub fn parse_jump_law(s: &str) -> Result<JumpLaw> {
    let mut it = s.split(':');
    let law = match it.next().unwrap_or_default() {
        "exp" | "exponential" => JumpLaw::Exponential { rate: num(it.next(), "rate")? },
        "gamma" => JumpLaw::Gamma { shape: num(it.next(), "shape")?, rate: num(it.next(), "rate")? },
        "fixed" => JumpLaw::Fixed { size: num(it.next(), "size")? },
        "normal" => JumpLaw::Normal { sd: num(it.next(), "sd")? },
        "laplace" => JumpLaw::Laplace { scale: num(it.next(), "scale")? },
        "uniform" => JumpLaw::Uniform { half_width: num(it.next(), "half width")? },
        other => return Err(Error::InvalidSpec(format!("unknown jump law {other:?}"))),
    };
    if it.next().is_some() {
        return Err(Error::InvalidSpec(format!("trailing fields in jump law {s:?}")));
    }
    Ok(law)
}

/// `drift:<d>`, `gamma`, `brownian:<sigma2>`, `cp:<rate>:<law>`,
/// `symcp:<rate>:<law>`, `truncated:<eps>:<phi>`.
pub fn parse_process(s: &str, killing_q: f64) -> Result<LevySpec> {
    let (head, rest) = s.split_once(':').unwrap_or((s, ""));
    let kind = match head {
        "drift" => LevyKind::DriftOnly { d: num(Some(rest), "drift")? },
        "gamma" => LevyKind::GammaSubordinator,
        "brownian" => LevyKind::Brownian { sigma2: if rest.is_empty() { 1.0 } else { num(Some(rest), "sigma^2")? } },
        "cp" | "symcp" => {
            let (rate, law) = rest
                .split_once(':')
                .ok_or_else(|| Error::InvalidSpec(format!("expected {head}:<rate>:<law>, got {s:?}")))?;
            let rate = num(Some(rate), "rate")?;
            let jumps = parse_jump_law(law)?;
            if head == "cp" {
                LevyKind::CompoundPoissonSubordinator { rate, jumps, drift: 0.0 }
            } else {
                LevyKind::SymmetricCompoundPoisson { rate, jumps }
            }
        }
        "truncated" => {
            let (eps, phi) = rest
                .split_once(':')
                .ok_or_else(|| Error::InvalidSpec(format!("expected truncated:<eps>:<phi>, got {s:?}")))?;
            let spec: Bernstein = phi.parse()?;
            LevyKind::TruncatedCustomSubordinator { spec, eps: num(Some(eps), "eps")? }
        }
        other => return Err(Error::InvalidSpec(format!("unknown process {other:?}"))),
    };
    LevySpec::new(kind, killing_q)
}
