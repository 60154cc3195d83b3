//! Semi-classical expansions of weighted sums of coadjoint-orbit measures.
//!
//! The crate computes the distributions `Θ_k = k^r Σ_λ m(λ,k) β_{λ/k}` for a
//! catalog of torus and SU(2) models, builds their asymptotic Laurent series
//! in `1/k` from Duistermaat–Heckman distributions twisted by the `Â` germ and
//! the Duflo operator `j^{1/2}(i∂/k)`, and checks both against exact sums.
//! Restriction to the maximal torus of SU(2) is verified as exact identities.

pub mod asymptotics;
pub mod dist_calc;
pub mod exact_series;
pub mod functoriality;
pub mod group_orbits;
pub mod models;
pub mod par;
pub mod poly;
pub mod quasipoly;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Series(#[from] exact_series::SeriesError),
    #[error(transparent)]
    QuasiPoly(#[from] quasipoly::QpError),
    #[error(transparent)]
    Dist(#[from] dist_calc::DistError),
    #[error(transparent)]
    Group(#[from] group_orbits::GroupError),
    #[error(transparent)]
    Model(#[from] models::ModelError),
    #[error(transparent)]
    Asymptotics(#[from] asymptotics::AsymError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
