//! Expression trees over `eta(dz)` and `j(dz)` with their JSON form.

use std::collections::{BTreeMap, BTreeSet};

use rug::Rational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::serde_rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Const(Rational),
    /// `eta(d z)`.
    Eta(u64),
    /// The classical `j(d z)`, constant term 744.
    J(u64),
    Sum(Vec<Node>),
    Prod(Vec<Node>),
    Pow(Box<Node>, i64),
}

impl Node {
    pub fn eta_pow(d: u64, k: i64) -> Node {
        Node::Pow(Box::new(Node::Eta(d)), k)
    }

    pub fn constant(c: i64) -> Node {
        Node::Const(Rational::from(c))
    }

    /// Weight in half-integer units; `Sum` requires equal weights.
    pub fn half_weight(&self) -> Result<i64> {
        Ok(match self {
            Node::Const(_) | Node::J(_) => 0,
            Node::Eta(_) => 1,
            Node::Sum(ts) => {
                let ws = ts.iter().map(Node::half_weight).collect::<Result<BTreeSet<_>>>()?;
                match ws.len() {
                    0 => 0,
                    1 => *ws.iter().next().unwrap(),
                    _ => return Err(Error::InvalidParameter("sum of terms with different weights".into())),
                }
            }
            Node::Prod(fs) => fs.iter().map(Node::half_weight).sum::<Result<i64>>()?,
            Node::Pow(b, k) => b.half_weight()? * k,
        })
    }

    pub fn scales(&self) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        self.collect_scales(&mut out);
        out
    }

    fn collect_scales(&self, out: &mut BTreeSet<u64>) {
        match self {
            Node::Const(_) => {}
            Node::Eta(d) | Node::J(d) => {
                out.insert(*d);
            }
            Node::Sum(xs) | Node::Prod(xs) => xs.iter().for_each(|x| x.collect_scales(out)),
            Node::Pow(b, _) => b.collect_scales(out),
        }
    }

    fn to_json(&self) -> NodeJson {
        match self {
            Node::Const(c) => NodeJson::Const { value: c.clone() },
            Node::Eta(d) => NodeJson::Eta { scale: *d },
            Node::J(d) => NodeJson::J { scale: *d },
            Node::Sum(ts) => NodeJson::Sum {
                terms: ts.iter().map(Node::to_json).collect(),
            },
            Node::Prod(fs) => NodeJson::Prod {
                factors: fs.iter().map(Node::to_json).collect(),
            },
            Node::Pow(b, k) => NodeJson::Pow {
                base: Box::new(b.to_json()),
                exp: *k,
            },
        }
    }

    fn from_json(j: NodeJson) -> Result<Node> {
        Ok(match j {
            NodeJson::Const { value } => Node::Const(value),
            NodeJson::Eta { scale } | NodeJson::J { scale } if scale == 0 => {
                return Err(Error::InvalidParameter("scale must be positive".into()))
            }
            NodeJson::Eta { scale } => Node::Eta(scale),
            NodeJson::J { scale } => Node::J(scale),
            NodeJson::Sum { terms } => Node::Sum(terms.into_iter().map(Node::from_json).collect::<Result<_>>()?),
            NodeJson::Prod { factors } => Node::Prod(factors.into_iter().map(Node::from_json).collect::<Result<_>>()?),
            NodeJson::Pow { base, exp } => Node::Pow(Box::new(Node::from_json(*base)?), exp),
        })
    }
}

/// A weakly holomorphic function on `Gamma_0(N)`, optionally carrying
/// hand-supplied principal parts keyed by cusp label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModFuncExpr {
    level: u64,
    node: Node,
    manual: BTreeMap<String, BTreeMap<Rational, Rational>>,
}

impl ModFuncExpr {
    pub fn new(level: u64, node: Node) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidParameter("level must be positive".into()));
        }
        for d in node.scales() {
            if d == 0 || level % d != 0 {
                return Err(Error::BadScale { scale: d, level });
            }
        }
        if node.half_weight()? != 0 {
            return Err(Error::InvalidParameter("expression does not have weight 0".into()));
        }
        Ok(ModFuncExpr {
            level,
            node,
            manual: BTreeMap::new(),
        })
    }

    /// `J = j - 744` on `Gamma_0(N)`.
    pub fn j_minus_744(level: u64) -> Result<Self> {
        ModFuncExpr::new(level, Node::Sum(vec![Node::J(1), Node::constant(-744)]))
    }

    /// `(eta(z) / eta(Nz))^{24/(N-1)}` for `N - 1 | 24`.
    pub fn hauptmodul(n: u64) -> Result<Self> {
        if n < 2 || 24 % (n - 1) != 0 {
            return Err(Error::InvalidParameter(format!("no eta-quotient Hauptmodul at level {n}")));
        }
        let k = 24 / (n as i64 - 1);
        ModFuncExpr::new(n, Node::Prod(vec![Node::eta_pow(1, k), Node::eta_pow(n, -k)]))
    }

    /// `builtin:J`, `builtin:j`, `builtin:hauptmodul-N`; `level` overrides the natural level.
    pub fn builtin(name: &str, level: Option<u64>) -> Result<Self> {
        let name = name.strip_prefix("builtin:").unwrap_or(name);
        let base = match name {
            "J" => ModFuncExpr::j_minus_744(1)?,
            "j" => ModFuncExpr::new(1, Node::J(1))?,
            _ => match name.strip_prefix("hauptmodul-").and_then(|n| n.parse().ok()) {
                Some(n) => ModFuncExpr::hauptmodul(n)?,
                None => return Err(Error::Parse(format!("unknown builtin {name:?}"))),
            },
        };
        match level {
            Some(l) => base.at_level(l),
            None => Ok(base),
        }
    }

    /// The same function viewed on `Gamma_0(M)`, `N | M`.
    pub fn at_level(&self, level: u64) -> Result<Self> {
        if level == 0 || level % self.level != 0 {
            return Err(Error::InvalidParameter(format!(
                "level {level} is not a multiple of {}",
                self.level
            )));
        }
        if level != self.level && !self.manual.is_empty() {
            return Err(Error::InvalidParameter("manual principal parts are tied to their level".into()));
        }
        ModFuncExpr::new(level, self.node.clone())
    }

    /// Supply the principal part at a cusp by hand (`n <= 0` terms).
    pub fn with_principal_part(mut self, cusp: &str, terms: BTreeMap<Rational, Rational>) -> Result<Self> {
        if terms.keys().any(|n| n.cmp0().is_gt()) {
            return Err(Error::InvalidParameter("principal parts hold n <= 0 only".into()));
        }
        self.manual.insert(cusp.to_string(), terms);
        Ok(self)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn manual_part(&self, cusp: &str) -> Option<&BTreeMap<Rational, Rational>> {
        self.manual.get(cusp)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.starts_with("builtin:") {
            return ModFuncExpr::builtin(text, None);
        }
        let doc: DocJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut f = match doc.expr {
            ExprJson::Alias(name) => ModFuncExpr::builtin(&name, Some(doc.level))?,
            ExprJson::Tree(t) => ModFuncExpr::new(doc.level, Node::from_json(t)?)?,
        };
        for (cusp, terms) in doc.principal_parts {
            let map = terms.into_iter().map(|t| (t.0, t.1)).collect();
            f = f.with_principal_part(&cusp, map)?;
        }
        Ok(f)
    }

    /// Canonical JSON; two equal expressions render identically.
    pub fn to_json(&self) -> String {
        let doc = DocJson {
            level: self.level,
            expr: ExprJson::Tree(self.node.to_json()),
            principal_parts: self
                .manual
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|(n, c)| Term(n.clone(), c.clone())).collect()))
                .collect(),
        };
        serde_json::to_string(&doc).expect("expression serializes")
    }

    /// Hex SHA-256 of the canonical JSON.
    pub fn f_id(&self) -> String {
        Sha256::digest(self.to_json().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
enum NodeJson {
    Const {
        #[serde(with = "serde_rational")]
        value: Rational,
    },
    Eta {
        #[serde(default = "one")]
        scale: u64,
    },
    J {
        #[serde(default = "one")]
        scale: u64,
    },
    Sum {
        terms: Vec<NodeJson>,
    },
    Prod {
        factors: Vec<NodeJson>,
    },
    Pow {
        base: Box<NodeJson>,
        exp: i64,
    },
}

fn one() -> u64 {
    1
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExprJson {
    Alias(String),
    Tree(NodeJson),
}

#[derive(Serialize, Deserialize)]
struct Term(#[serde(with = "serde_rational")] Rational, #[serde(with = "serde_rational")] Rational);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocJson {
    level: u64,
    expr: ExprJson,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    principal_parts: BTreeMap<String, Vec<Term>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ModFuncExpr::new(4, Node::Eta(3)).is_err());
        assert!(matches!(
            ModFuncExpr::new(4, Node::eta_pow(3, 0)),
            Err(Error::BadScale { scale: 3, level: 4 })
        ));
        assert!(ModFuncExpr::new(4, Node::eta_pow(2, 24)).is_err());
        assert!(ModFuncExpr::new(
            4,
            Node::Sum(vec![Node::eta_pow(1, 2), Node::constant(1)])
        )
        .is_err());
        assert!(ModFuncExpr::hauptmodul(5).is_ok());
        assert!(ModFuncExpr::hauptmodul(6).is_err());
        assert!(ModFuncExpr::j_minus_744(1).unwrap().at_level(6).is_ok());
        assert!(ModFuncExpr::hauptmodul(2).unwrap().at_level(3).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = ModFuncExpr::hauptmodul(3).unwrap();
        let text = f.to_json();
        assert_eq!(ModFuncExpr::parse(&text).unwrap(), f);
        let j = ModFuncExpr::parse(r#"{"level": 1, "expr": "builtin:J"}"#).unwrap();
        assert_eq!(j, ModFuncExpr::builtin("builtin:J", None).unwrap());
        assert_eq!(ModFuncExpr::parse("builtin:J").unwrap().f_id(), j.f_id());
        let tree = r#"{"level": 2, "expr": {"op": "sum", "terms": [
            {"op": "pow", "base": {"op": "eta"}, "exp": 24},
            {"op": "prod", "factors": [{"op": "const", "value": "-3/2"}, {"op": "eta", "scale": 2}, {"op": "eta", "scale": 2}, {"op": "pow", "base": {"op": "eta", "scale": 1}, "exp": 22}]}
        ]}, "principal_parts": {"inf": [["0", "5"]]}}"#;
        // weight 12 overall, so rejected
        assert!(ModFuncExpr::parse(tree).is_err());
        let ok = r#"{"level": 2, "expr": {"op": "prod", "factors": [{"op": "j", "scale": 2}, {"op": "const", "value": "1/3"}]},
            "principal_parts": {"inf": [["-2", "1/3"]]}}"#;
        let f = ModFuncExpr::parse(ok).unwrap();
        assert_eq!(ModFuncExpr::parse(&f.to_json()).unwrap(), f);
        assert_eq!(f.manual_part("inf").unwrap()[&Rational::from(-2)], Rational::from((1, 3)));
        assert!(ModFuncExpr::parse(r#"{"level": 1, "expr": {"op": "eta", "scale": 0}}"#).is_err());
        assert!(ModFuncExpr::parse(r#"{"level": 1, "expr": "builtin:nope"}"#).is_err());
    }

    #[test]
    fn f_id_distinguishes() {
        let a = ModFuncExpr::j_minus_744(1).unwrap();
        let b = ModFuncExpr::j_minus_744(2).unwrap();
        assert_ne!(a.f_id(), b.f_id());
        assert_eq!(a.f_id().len(), 64);
    }
}
