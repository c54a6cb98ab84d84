//! Minimal robots.txt support: `User-agent` groups with `Allow` and
//! `Disallow` path prefixes. The longest matching rule wins; on a tie
//! `Allow` wins. `*` and `$` patterns are not supported and are matched as
//! plain prefixes up to the first wildcard.

/// `(allow, prefix)` pairs.
type Rules = Vec<(bool, String)>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Robots {
    rules: Rules,
}

impl Robots {
    pub fn allow_all() -> Self {
        Self::default()
    }

    /// Rules of the group naming `agent`, else the `*` group.
    pub fn parse(text: &str, agent: &str) -> Self {
        let agent = agent.to_ascii_lowercase();
        let mut groups: Vec<(Vec<String>, Rules)> = Vec::new();
        let mut in_agents = false;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            let Some((key, value)) = line.split_once(':') else {
                continue;
            };
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            match key.as_str() {
                "user-agent" => {
                    if !in_agents {
                        groups.push((Vec::new(), Vec::new()));
                        in_agents = true;
                    }
                    if let Some(group) = groups.last_mut() {
                        group.0.push(value.to_ascii_lowercase());
                    }
                }
                "allow" | "disallow" => {
                    in_agents = false;
                    let Some(group) = groups.last_mut() else {
                        continue;
                    };
                    let prefix = value.split(['*', '$']).next().unwrap_or("");
                    // an empty Disallow allows everything
                    if !prefix.is_empty() {
                        group.1.push((key == "allow", prefix.to_string()));
                    }
                }
                _ => in_agents = false,
            }
        }
        let pick = |pred: &dyn Fn(&str) -> bool| {
            groups
                .iter()
                .filter(|(agents, _)| agents.iter().any(|a| pred(a)))
                .flat_map(|(_, rules)| rules.clone())
                .collect::<Vec<_>>()
        };
        let specific = pick(&|a| a != "*" && agent.contains(a));
        let rules = if specific.is_empty() {
            pick(&|a| a == "*")
        } else {
            specific
        };
        Robots { rules }
    }

    pub fn allows(&self, path: &str) -> bool {
        self.rules
            .iter()
            .filter(|(_, prefix)| path.starts_with(prefix.as_str()))
            .max_by_key(|(allow, prefix)| (prefix.len(), *allow))
            .is_none_or(|(allow, _)| *allow)
    }
}
