use std::fmt::Write;

use super::ZoneHistoryGraph;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// One node per state labeled `location | zone | history`, one edge per
/// transition labeled with its action; cut transitions are dashed.
pub(crate) fn render(g: &ZoneHistoryGraph) -> String {
    let names = g.clocks.display_names();
    let mut out = String::from("digraph zhg {\n  node [shape=box];\n");
    for (i, s) in g.states.iter().enumerate() {
        let label = format!(
            "{} | {} | {}",
            g.location_label(s.location),
            s.zone.to_conjunction(&names),
            s.history.render(&names)
        );
        let _ = writeln!(out, "  s{i} [label=\"{}\"];", escape(&label));
    }
    for e in &g.edges {
        let style = if e.cut { ", style=dashed" } else { "" };
        let _ = writeln!(out, "  s{} -> s{} [label=\"{}\"{style}];", e.source, e.target, e.action);
    }
    out.push_str("}\n");
    out
}
