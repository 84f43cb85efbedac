use std::collections::BTreeMap;
use std::path::Path;

use super::ast::{Formula, LinExpr};
use super::parser::{parse_defs, MacroDef};
use crate::error::{Error, Result};

const STDLIB: &str = include_str!("../../data/stdlib.prd");

/// Named predicate macros.
#[derive(Clone, Debug, Default)]
pub struct Library {
    defs: BTreeMap<String, MacroDef>,
    order: Vec<String>,
}

impl Library {
    pub fn new() -> Self {
        Self::default()
    }

    /// The shipped predicate library.
    pub fn stdlib() -> Self {
        Library::parse(STDLIB).expect("shipped library is well formed")
    }

    pub fn stdlib_source() -> &'static str {
        STDLIB
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lib = Library::new();
        lib.extend(text)?;
        Ok(lib)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Library::parse(&std::fs::read_to_string(path)?)
    }

    /// Adds the definitions of `text`; later definitions replace earlier
    /// ones with the same name.
    pub fn extend(&mut self, text: &str) -> Result<()> {
        for def in parse_defs(text)? {
            let fv = def.body.free_vars();
            if let Some(v) = fv.iter().find(|v| !def.params.contains(v)) {
                return Err(Error::UnboundVariable {
                    var: v.clone(),
                    context: format!("definition of {}", def.name),
                });
            }
            if !self.defs.contains_key(&def.name) {
                self.order.push(def.name.clone());
            }
            self.defs.insert(def.name.clone(), def);
        }
        self.check()
    }

    /// Every call resolves with the right arity and no macro reaches itself.
    fn check(&self) -> Result<()> {
        for def in self.defs.values() {
            let mut err = None;
            def.body.visit(&mut |f| {
                if let Formula::Call { name, args, .. } = f {
                    if err.is_some() {
                        return;
                    }
                    err = match self.defs.get(name) {
                        None => Some(Error::UnknownMacro(name.clone())),
                        Some(d) if d.params.len() != args.len() => Some(Error::MacroArity {
                            name: name.clone(),
                            expected: d.params.len(),
                            found: args.len(),
                        }),
                        _ => None,
                    };
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        // three-colour depth-first search over the call graph
        let mut colour: BTreeMap<&str, u8> = BTreeMap::new();
        fn dfs<'a>(lib: &'a Library, name: &'a str, colour: &mut BTreeMap<&'a str, u8>) -> Result<()> {
            match colour.get(name) {
                Some(1) => return Err(Error::RecursiveMacro(name.to_string())),
                Some(2) => return Ok(()),
                _ => {}
            }
            colour.insert(name, 1);
            let mut callees = Vec::new();
            lib.defs[name].body.visit(&mut |f| {
                if let Formula::Call { name, .. } = f {
                    callees.push(name.clone());
                }
            });
            for c in &callees {
                let key = lib.defs.get_key_value(c.as_str()).expect("checked above").0;
                dfs(lib, key, colour)?;
            }
            colour.insert(name, 2);
            Ok(())
        }
        for name in self.defs.keys() {
            dfs(self, name, &mut colour)?;
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&MacroDef> {
        self.defs.get(name)
    }

    /// Names in definition order.
    pub fn names(&self) -> &[String] {
        &self.order
    }

    /// Replaces every macro call by its body. Bound variables of inserted
    /// bodies get fresh names so arguments are never captured.
    pub fn expand(&self, f: &Formula) -> Result<Formula> {
        let mut counter = 0usize;
        self.expand_with(f, &mut counter, 0)
    }

    fn expand_with(&self, f: &Formula, counter: &mut usize, depth: usize) -> Result<Formula> {
        Ok(match f {
            Formula::Call { name, args, .. } => {
                let def = self.defs.get(name).ok_or_else(|| Error::UnknownMacro(name.clone()))?;
                if def.params.len() != args.len() {
                    return Err(Error::MacroArity {
                        name: name.clone(),
                        expected: def.params.len(),
                        found: args.len(),
                    });
                }
                if depth > 256 {
                    return Err(Error::RecursiveMacro(name.clone()));
                }
                let body = freshen(&def.body, counter);
                let map: BTreeMap<String, LinExpr> = def.params.iter().cloned().zip(args.iter().cloned()).collect();
                self.expand_with(&body.map_exprs(&map), counter, depth + 1)?
            }
            Formula::Not(a) => Formula::not(self.expand_with(a, counter, depth)?),
            Formula::Bin(op, a, b) => Formula::bin(
                *op,
                self.expand_with(a, counter, depth)?,
                self.expand_with(b, counter, depth)?,
            ),
            Formula::Quant(q, v, body) => Formula::quant(*q, v, self.expand_with(body, counter, depth)?),
            other => other.clone(),
        })
    }
}

/// Renames every bound variable to `name#n` with a fresh `n`.
fn freshen(f: &Formula, counter: &mut usize) -> Formula {
    match f {
        Formula::Quant(q, v, body) => {
            *counter += 1;
            let base = v.split('#').next().unwrap_or(v);
            let fresh = format!("{base}#{counter}");
            let mut map = BTreeMap::new();
            map.insert(v.clone(), LinExpr::var(&fresh));
            Formula::quant(*q, &fresh, freshen(&body.map_exprs(&map), counter))
        }
        Formula::Not(a) => Formula::not(freshen(a, counter)),
        Formula::Bin(op, a, b) => Formula::bin(*op, freshen(a, counter), freshen(b, counter)),
        other => other.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse;
    use super::*;

    #[test]
    fn stdlib_loads_every_predicate() {
        let lib = Library::stdlib();
        for name in [
            "In", "Subs", "FactorEq", "Pal", "Occurs", "Border", "Closed", "UCF", "MaxPal", "Rich", "UniquePref",
            "UniqueSuff", "Priv", "Priv'", "RtSp", "MinRt", "UnrepSuf", "MinUnrepSuf", "Trap", "Unbal",
        ] {
            assert!(lib.get(name).is_some(), "{name}");
        }
    }

    #[test]
    fn border_expands_to_interval_and_factor_eq() {
        let lib = Library::stdlib();
        let got = lib.expand(&parse("$Border(i,m,n)").unwrap()).unwrap();
        let want = lib
            .expand(&parse("(m >= 1 & m <= n) & $FactorEq(i,i+n-m,m)").unwrap())
            .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn arguments_are_not_captured() {
        let lib = Library::parse("def Q(n) := Ek k < n;").unwrap();
        let f = lib.expand(&parse("$Q(k)").unwrap()).unwrap();
        let fv: Vec<String> = f.free_vars().into_iter().collect();
        assert_eq!(fv, vec!["k".to_string()]);
    }

    #[test]
    fn library_errors() {
        assert!(matches!(Library::parse("def F(i) := i < j;"), Err(Error::UnboundVariable { .. })));
        assert!(matches!(Library::parse("def F(i) := $G(i);"), Err(Error::UnknownMacro(_))));
        assert!(matches!(
            Library::parse("def F(i) := i=0; def G(i) := $F(i,i);"),
            Err(Error::MacroArity { .. })
        ));
        assert!(matches!(
            Library::parse("def F(i) := $G(i); def G(i) := $F(i);"),
            Err(Error::UnknownMacro(_)) | Err(Error::RecursiveMacro(_))
        ));
    }
}
