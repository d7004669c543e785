use serde::{Deserialize, Serialize};

/// Three-valued outcome of a certified check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Any failure dominates; otherwise any inconclusive result dominates.
    pub fn combine(self, other: Verdict) -> Verdict {
        self.max(other)
    }

    pub fn all<I: IntoIterator<Item = Verdict>>(items: I) -> Verdict {
        items.into_iter().fold(Verdict::Pass, Verdict::combine)
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combination_order() {
        use Verdict::*;
        assert_eq!(Verdict::all([]), Pass);
        assert_eq!(Verdict::all([Pass, Inconclusive]), Inconclusive);
        assert_eq!(Verdict::all([Inconclusive, Fail, Pass]), Fail);
    }
}
