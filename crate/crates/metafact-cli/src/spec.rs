//! The synthetic-input mini-grammar: `kind:MxN[:key=val]...`
//!
//! Kinds and the keys they accept:
//!
//! ```text
//! rank_k:MxN:k=K[:seed=S]                product of standard-normal M×K and K×N factors
//! decaying_geometric:MxN:decay=D[:seed=S]   singular values D^j (j from 0), 0 < D < 1
//! decaying_polynomial:MxN:decay=D[:seed=S]  singular values j^-D (j from 1), D > 0
//! identity_like:MxN                      ones on the main diagonal
//! ```
//!
//! `seed=` is optional everywhere; when absent the run seed (`--seed`,
//! else `METAFACT_SEED`, else 0) fills in, so a single flag reseeds both
//! the input and any sketching the command does. Unknown kinds and keys
//! that do not belong to the kind are rejected rather than ignored.

use metafact::io::{SyntheticKind, SyntheticSpec};
use metafact::{Error, Result};

pub fn parse_synthetic(text: &str, fallback_seed: u64) -> Result<SyntheticSpec> {
    let bad = |msg: String| Error::InvalidSpec(format!("{msg} (in `{text}`)"));

    let mut parts = text.split(':');
    let kind_tok = parts.next().unwrap_or("");
    let dims = parts
        .next()
        .ok_or_else(|| bad("expected kind:MxN[:key=val...]".into()))?;
    let (ms, ns) = dims
        .split_once(['x', 'X'])
        .ok_or_else(|| bad(format!("dimensions `{dims}` are not of the form MxN")))?;
    let m: usize = ms.parse().map_err(|_| bad(format!("bad row count `{ms}`")))?;
    let n: usize = ns.parse().map_err(|_| bad(format!("bad column count `{ns}`")))?;

    let mut k: Option<usize> = None;
    let mut decay: Option<f64> = None;
    let mut seed: Option<u64> = None;
    for part in parts {
        let (key, val) = part
            .split_once('=')
            .ok_or_else(|| bad(format!("`{part}` is not key=val")))?;
        match key {
            "k" => k = Some(val.parse().map_err(|_| bad(format!("bad k `{val}`")))?),
            "decay" => {
                decay = Some(val.parse().map_err(|_| bad(format!("bad decay `{val}`")))?)
            }
            "seed" => seed = Some(val.parse().map_err(|_| bad(format!("bad seed `{val}`")))?),
            other => return Err(bad(format!("unknown key `{other}`"))),
        }
    }

    let no_key = |name: &str, present: bool| -> Result<()> {
        if present {
            Err(bad(format!("key `{name}` does not apply to `{kind_tok}`")))
        } else {
            Ok(())
        }
    };
    let kind = match kind_tok {
        "rank_k" => {
            no_key("decay", decay.is_some())?;
            SyntheticKind::RankK {
                k: k.ok_or_else(|| bad("rank_k needs k=".into()))?,
            }
        }
        "decaying_geometric" => {
            no_key("k", k.is_some())?;
            SyntheticKind::DecayingGeometric {
                decay: decay.ok_or_else(|| bad("decaying_geometric needs decay=".into()))?,
            }
        }
        "decaying_polynomial" => {
            no_key("k", k.is_some())?;
            SyntheticKind::DecayingPolynomial {
                decay: decay.ok_or_else(|| bad("decaying_polynomial needs decay=".into()))?,
            }
        }
        "identity_like" => {
            no_key("k", k.is_some())?;
            no_key("decay", decay.is_some())?;
            SyntheticKind::IdentityLike
        }
        other => return Err(bad(format!("unknown synthetic kind `{other}`"))),
    };

    let spec = SyntheticSpec { m, n, kind, seed: seed.unwrap_or(fallback_seed) };
    spec.validate()?;
    Ok(spec)
}
