//! Separates free-form check parameters from the fixed options of `verify`
//! and `export-plot` before clap sees the arguments.

use anyhow::{bail, Result};

const VALUED: [&str; 11] = [
    "grid", "tol", "json", "csv", "config", "axis", "samples", "range", "at", "from", "to",
];
const SWITCHES: [&str; 5] = ["expect-fail", "with-timing", "quiet", "help", "version"];
/// Arguments for clap and the `(name, value)` check parameters.
pub type Split = (Vec<String>, Vec<(String, String)>);

const TAKES_PARAMS: [&str; 2] = ["verify", "export-plot"];

/// Unknown `--name value` or `--name=value` options after a parameterised
/// subcommand become parameters; values may start with `-`.
pub fn split_params(args: Vec<String>) -> Result<Split> {
    let mut out = Vec::with_capacity(args.len());
    let mut params = Vec::new();
    let mut it = args.into_iter();
    out.extend(it.next());
    let mut in_cmd = false;
    while let Some(a) = it.next() {
        if !in_cmd {
            in_cmd = TAKES_PARAMS.contains(&a.as_str());
            out.push(a);
            continue;
        }
        let Some(body) = a.strip_prefix("--") else {
            out.push(a);
            continue;
        };
        let (name, inline) = match body.split_once('=') {
            Some((n, v)) => (n.to_string(), Some(v.to_string())),
            None => (body.to_string(), None),
        };
        if SWITCHES.contains(&name.as_str()) {
            out.push(a);
        } else if VALUED.contains(&name.as_str()) {
            out.push(a);
            if inline.is_none() {
                // values such as `-1:1` must not be mistaken for flags
                if let Some(v) = it.next() {
                    out.push(v);
                }
            }
        } else if name.is_empty() {
            bail!("a bare '--' is not supported");
        } else {
            let value = match inline {
                Some(v) => v,
                None => match it.next() {
                    Some(v) => v,
                    None => bail!("parameter --{name} needs a value"),
                },
            };
            params.push((name, value));
        }
    }
    Ok((out, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn params_are_extracted() {
        let (a, p) =
            split_params(args("ewh verify thm1 --h sin --a=-0.5 --tol 1e-6 --expect-fail")).unwrap();
        assert_eq!(a, args("ewh verify thm1 --tol 1e-6 --expect-fail"));
        assert_eq!(p, vec![("h".into(), "sin".into()), ("a".into(), "-0.5".into())]);
    }

    #[test]
    fn option_values_may_look_like_flags() {
        let (a, p) = split_params(args("ewh export-plot dkp --axis r --range -1:1 --b -2")).unwrap();
        assert_eq!(a, args("ewh export-plot dkp --axis r --range -1:1"));
        assert_eq!(p, vec![("b".into(), "-2".into())]);
    }

    #[test]
    fn scan_is_untouched() {
        let (a, p) = split_params(args("ewh scan-c --from -1 --to 2 --steps 4 --seed tanh")).unwrap();
        assert_eq!(a, args("ewh scan-c --from -1 --to 2 --steps 4 --seed tanh"));
        assert!(p.is_empty());
    }

    #[test]
    fn missing_value_is_an_error() {
        assert!(split_params(args("ewh verify thm1 --h")).is_err());
    }
}
