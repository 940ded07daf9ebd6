//! Data-parallel helpers with a sequential fallback.
//!
//! Results are always collected in input order, so both paths produce
//! identical output.

/// How per-item work in the build and batch-query loops is scheduled.
/// Defaults to `Parallel` when the `parallel` feature is enabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

impl Execution {
    /// Every mode compiled into this build.
    pub fn available() -> Vec<Execution> {
        vec![
            Execution::Sequential,
            #[cfg(feature = "parallel")]
            Execution::Parallel,
        ]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Execution::Sequential => "sequential",
            #[cfg(feature = "parallel")]
            Execution::Parallel => "parallel",
        }
    }
}

pub(crate) fn map<T, U, F>(exec: Execution, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match exec {
        Execution::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
    }
}
