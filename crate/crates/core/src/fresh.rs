use std::collections::HashSet;

/// Hands out deterministic, counter-suffixed names that avoid every name
/// registered so far.
#[derive(Debug, Default, Clone)]
pub(crate) struct NameSupply {
    taken: HashSet<String>,
}

impl NameSupply {
    pub(crate) fn new<'a>(taken: impl IntoIterator<Item = &'a str>) -> Self {
        NameSupply { taken: taken.into_iter().map(str::to_string).collect() }
    }

    pub(crate) fn reserve(&mut self, name: &str) {
        self.taken.insert(name.to_string());
    }

    /// `{prefix}{k}` for the smallest `k` not yet taken.
    pub(crate) fn fresh(&mut self, prefix: &str) -> String {
        let mut k = 0usize;
        loop {
            let candidate = format!("{prefix}{k}");
            if self.taken.insert(candidate.clone()) {
                return candidate;
            }
            k += 1;
        }
    }
}
