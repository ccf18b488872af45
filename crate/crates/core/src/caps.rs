//! Size limits for the exhaustive computations.

/// Overridable through the environment variables named in [`Caps::from_env`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest group order `enumerate_group` will build.
    pub group_order: usize,
    /// Largest number of conjugacy classes a character table is computed for.
    pub class_count: usize,
    /// Largest number of pair evaluations for brute-force fiber counts.
    pub pair_evaluations: u128,
    /// Largest number of dominant weights enumerated at once.
    pub weights: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            group_order: 10_000,
            class_count: 64,
            pair_evaluations: 100_000_000,
            weights: 10_000_000,
        }
    }
}

pub const ENV_GROUP_ORDER: &str = "COMMFIBER_GROUP_CAP";
pub const ENV_CLASS_COUNT: &str = "COMMFIBER_CLASS_CAP";
pub const ENV_PAIR_EVALUATIONS: &str = "COMMFIBER_PAIR_CAP";
pub const ENV_WEIGHTS: &str = "COMMFIBER_WEIGHT_CAP";

impl Caps {
    /// Defaults, overridden by `COMMFIBER_GROUP_CAP`, `COMMFIBER_CLASS_CAP`,
    /// `COMMFIBER_PAIR_CAP` and `COMMFIBER_WEIGHT_CAP` when set to integers.
    pub fn from_env() -> Self {
        let mut caps = Caps::default();
        let read = |name: &str| std::env::var(name).ok().and_then(|v| v.trim().parse::<u128>().ok());
        if let Some(v) = read(ENV_GROUP_ORDER) {
            caps.group_order = v as usize;
        }
        if let Some(v) = read(ENV_CLASS_COUNT) {
            caps.class_count = v as usize;
        }
        if let Some(v) = read(ENV_PAIR_EVALUATIONS) {
            caps.pair_evaluations = v;
        }
        if let Some(v) = read(ENV_WEIGHTS) {
            caps.weights = v;
        }
        caps
    }
}
