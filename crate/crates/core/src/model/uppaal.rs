//! Import of a single-template UPPAAL XML subset. The accepted subset is
//! listed in `docs/uppaal-subset.md`; anything outside it is rejected.

use std::collections::{BTreeMap, BTreeSet};

use roxmltree::{Document, Node};

use super::parse::parse_constraint_expr;
use super::types::{Action, ClockConstraint, Location, Switch, TimedAutomaton};
use super::ModelError;

fn unsupported(what: &str) -> ModelError {
    ModelError::Unsupported(what.to_string())
}

fn strip_comments(src: &str) -> String {
    let mut out = String::new();
    let mut rest = src;
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix("//") {
            rest = r.find('\n').map(|i| &r[i..]).unwrap_or("");
        } else if let Some(r) = rest.strip_prefix("/*") {
            rest = r.find("*/").map(|i| &r[i + 2..]).unwrap_or("");
        } else {
            let c = rest.chars().next().unwrap();
            out.push(c);
            rest = &rest[c.len_utf8()..];
        }
    }
    out
}

fn declarations(src: &str, clocks: &mut Vec<String>) -> Result<(), ModelError> {
    for stmt in strip_comments(src).split(';') {
        let stmt = stmt.trim();
        if stmt.is_empty() {
            continue;
        }
        let (head, rest) = stmt.split_once(char::is_whitespace).unwrap_or((stmt, ""));
        match head {
            "clock" => {
                for name in rest.split(',') {
                    let name = name.trim();
                    if name.is_empty() || name.contains(['[', '=']) {
                        return Err(unsupported("clock arrays or initializers"));
                    }
                    clocks.push(name.to_string());
                }
            }
            "int" => return Err(unsupported("integer variables")),
            "bool" => return Err(unsupported("boolean variables")),
            "const" => return Err(unsupported("constants")),
            "chan" | "urgent" | "broadcast" => return Err(unsupported("synchronization channels")),
            other => return Err(unsupported(&format!("declaration '{other}'"))),
        }
    }
    Ok(())
}

fn child<'a>(n: Node<'a, 'a>, tag: &str) -> Option<Node<'a, 'a>> {
    n.children().find(|c| c.has_tag_name(tag))
}

fn text_of(n: Node<'_, '_>) -> String {
    n.text().unwrap_or("").trim().to_string()
}

fn expr(src: &str, what: &str) -> Result<ClockConstraint, ModelError> {
    parse_constraint_expr(src).map_err(|e| ModelError::Xml(format!("{what} '{src}': {e}")))
}

/// Reads one automaton from UPPAAL XML.
pub fn import_uppaal(xml: &str) -> Result<TimedAutomaton, ModelError> {
    let doc = Document::parse(xml).map_err(|e| ModelError::Xml(e.to_string()))?;
    let root = doc.root_element();
    if !root.has_tag_name("nta") {
        return Err(ModelError::Xml("root element must be <nta>".into()));
    }
    let mut clocks = Vec::new();
    if let Some(d) = child(root, "declaration") {
        declarations(&text_of(d), &mut clocks)?;
    }
    let templates: Vec<_> = root.children().filter(|c| c.has_tag_name("template")).collect();
    let template = match templates.as_slice() {
        [t] => *t,
        [] => return Err(ModelError::Xml("no template".into())),
        _ => return Err(unsupported("multiple templates")),
    };
    if child(template, "parameter").is_some_and(|p| !text_of(p).is_empty()) {
        return Err(unsupported("template parameters"));
    }
    if child(template, "branchpoint").is_some() {
        return Err(unsupported("branchpoints"));
    }
    if let Some(d) = child(template, "declaration") {
        declarations(&text_of(d), &mut clocks)?;
    }
    let name = child(template, "name").map(text_of).unwrap_or_else(|| "uppaal".into());

    let mut ids: BTreeMap<String, String> = BTreeMap::new();
    let mut locations = Vec::new();
    for loc in template.children().filter(|c| c.has_tag_name("location")) {
        let xml_id = loc.attribute("id").ok_or_else(|| ModelError::Xml("location without id".into()))?;
        if child(loc, "committed").is_some() {
            return Err(unsupported("committed locations"));
        }
        if child(loc, "urgent").is_some() {
            return Err(unsupported("urgent locations"));
        }
        let id = child(loc, "name").map(text_of).filter(|s| !s.is_empty()).unwrap_or_else(|| xml_id.to_string());
        let mut invariant = ClockConstraint::truth();
        for label in loc.children().filter(|c| c.has_tag_name("label")) {
            match label.attribute("kind") {
                Some("invariant") => invariant = expr(&text_of(label), "invariant")?,
                Some("comments") => {}
                Some(other) => return Err(unsupported(&format!("location label '{other}'"))),
                None => return Err(ModelError::Xml("label without kind".into())),
            }
        }
        ids.insert(xml_id.to_string(), id.clone());
        locations.push(Location { id, invariant });
    }
    let init_ref = child(template, "init")
        .and_then(|n| n.attribute("ref"))
        .ok_or_else(|| ModelError::Xml("missing <init>".into()))?;
    let resolve = |r: Option<&str>| -> Result<String, ModelError> {
        let r = r.ok_or_else(|| ModelError::Xml("missing location reference".into()))?;
        ids.get(r).cloned().ok_or_else(|| ModelError::Xml(format!("unknown location '{r}'")))
    };
    let initial = resolve(Some(init_ref))?;

    let clock_set: BTreeSet<&str> = clocks.iter().map(String::as_str).collect();
    let mut alphabet = BTreeSet::new();
    let mut switches = Vec::new();
    for tr in template.children().filter(|c| c.has_tag_name("transition")) {
        let source = resolve(child(tr, "source").and_then(|n| n.attribute("ref")))?;
        let target = resolve(child(tr, "target").and_then(|n| n.attribute("ref")))?;
        let mut guard = ClockConstraint::truth();
        let mut action = Action::Tau;
        let mut resets = BTreeSet::new();
        for label in tr.children().filter(|c| c.has_tag_name("label")) {
            let body = text_of(label);
            match label.attribute("kind") {
                Some("guard") => guard = expr(&body, "guard")?,
                Some("synchronisation") => {
                    if body.contains(['!', '?']) {
                        return Err(unsupported("synchronization channels"));
                    }
                    if !body.is_empty() {
                        alphabet.insert(body.clone());
                        action = Action::Visible(body);
                    }
                }
                Some("assignment") => {
                    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                        let (lhs, rhs) = part
                            .split_once(":=")
                            .or_else(|| part.split_once('='))
                            .ok_or_else(|| unsupported("assignments other than clock resets"))?;
                        let lhs = lhs.trim();
                        if !clock_set.contains(lhs) || rhs.trim() != "0" {
                            return Err(unsupported("assignments other than clock resets"));
                        }
                        resets.insert(lhs.to_string());
                    }
                }
                Some("comments") => {}
                Some(other) => return Err(unsupported(&format!("transition label '{other}'"))),
                None => return Err(ModelError::Xml("label without kind".into())),
            }
        }
        switches.push(Switch {
            source,
            target,
            guard,
            action,
            resets,
        });
    }
    Ok(TimedAutomaton {
        name,
        clocks,
        alphabet,
        locations,
        initial,
        switches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::types::{Atom, Relation};

    #[test]
    fn minimal_template() {
        let ta = import_uppaal(
            r#"<nta><template><name>T</name><location id="id0"><name>only</name></location><init ref="id0"/></template></nta>"#,
        )
        .unwrap();
        assert_eq!(ta.locations.len(), 1);
        assert!(ta.locations[0].invariant.is_true());
        assert_eq!(ta.initial, "only");
    }

    #[test]
    fn integer_variables_are_rejected() {
        let err = import_uppaal(
            r#"<nta><declaration>int n;</declaration><template><name>T</name>
               <location id="a"/><init ref="a"/>
               <transition><source ref="a"/><target ref="a"/><label kind="guard">n &gt; 0</label></transition>
               </template></nta>"#,
        )
        .unwrap_err();
        assert_eq!(err, ModelError::Unsupported("integer variables".into()));
    }

    #[test]
    fn channels_and_urgency_are_rejected() {
        let chan = r#"<nta><template><name>T</name><location id="a"/><init ref="a"/>
            <transition><source ref="a"/><target ref="a"/><label kind="synchronisation">go!</label></transition>
            </template></nta>"#;
        assert_eq!(import_uppaal(chan).unwrap_err(), ModelError::Unsupported("synchronization channels".into()));
        let urgent = r#"<nta><template><name>T</name><location id="a"><urgent/></location><init ref="a"/></template></nta>"#;
        assert_eq!(import_uppaal(urgent).unwrap_err(), ModelError::Unsupported("urgent locations".into()));
        let params = r#"<nta><template><name>T</name><parameter>int p</parameter><location id="a"/><init ref="a"/></template></nta>"#;
        assert_eq!(import_uppaal(params).unwrap_err(), ModelError::Unsupported("template parameters".into()));
    }

    #[test]
    fn guards_resets_and_actions() {
        let ta = import_uppaal(
            r#"<nta><declaration>clock x;</declaration><template><name>T</name>
               <location id="a"><label kind="invariant">x &lt;= 3</label></location><location id="b"/><init ref="a"/>
               <transition><source ref="a"/><target ref="b"/><label kind="guard">x &gt;= 1 &amp;&amp; x &lt; 3</label>
               <label kind="synchronisation">go</label><label kind="assignment">x := 0</label></transition>
               </template></nta>"#,
        )
        .unwrap();
        let s = &ta.switches[0];
        assert_eq!(s.guard.atoms, vec![Atom::new("x", Relation::Ge, 1), Atom::new("x", Relation::Lt, 3)]);
        assert_eq!(s.action, Action::visible("go"));
        assert!(s.resets.contains("x"));
        assert!(ta.alphabet.contains("go"));
    }
}
