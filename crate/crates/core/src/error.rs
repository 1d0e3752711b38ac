use core::fmt;

/// Every failure the engine can report. `code()` gives a stable machine-readable tag.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    OverlappingHoles,
    ProbeOverlapsHole,
    BadSlope,
    NonIntegerIndex,
    NonIncreasingIndices,
    UnpairableConfiguration,
    WrongOrientation,
    InsufficientNodes,
    DegenerateDirection,
    IllConditioned {
        estimate: f64,
    },
    ExtrapolationTolerance {
        estimate: f64,
    },
    ZeroDenominator,
    CoincidentPoints,
    SingularDenominator,
    CenterSingularity,
    /// Total positive charge does not exceed the negative one, so the block widths are undefined.
    ChargeNotPositive,
    CutsIntersect,
    WindowTooSmall,
    HoleTooLarge,
    RegionTooLarge,
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::OverlappingHoles => "overlapping_holes",
            Error::ProbeOverlapsHole => "probe_overlaps_hole",
            Error::BadSlope => "bad_slope",
            Error::NonIntegerIndex => "non_integer_index",
            Error::NonIncreasingIndices => "non_increasing_indices",
            Error::UnpairableConfiguration => "unpairable_configuration",
            Error::WrongOrientation => "wrong_orientation",
            Error::InsufficientNodes => "insufficient_nodes",
            Error::DegenerateDirection => "degenerate_direction",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::ExtrapolationTolerance { .. } => "extrapolation_tolerance",
            Error::ZeroDenominator => "zero_denominator",
            Error::CoincidentPoints => "coincident_points",
            Error::SingularDenominator => "singular_denominator",
            Error::CenterSingularity => "center_singularity",
            Error::ChargeNotPositive => "charge_not_positive",
            Error::CutsIntersect => "cuts_intersect",
            Error::WindowTooSmall => "window_too_small",
            Error::HoleTooLarge => "hole_too_large",
            Error::RegionTooLarge => "region_too_large",
        }
    }

    /// Whether the failure comes from the input rather than from numerics.
    pub fn is_config(&self) -> bool {
        !matches!(
            self,
            Error::IllConditioned { .. }
                | Error::ExtrapolationTolerance { .. }
                | Error::ZeroDenominator
                | Error::SingularDenominator
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OverlappingHoles => write!(f, "holes overlap"),
            Error::ProbeOverlapsHole => write!(f, "probe overlaps a hole or another probe"),
            Error::BadSlope => write!(f, "slope q must satisfy 3 | 1 - q"),
            Error::NonIntegerIndex => write!(f, "q * index is not an integer"),
            Error::NonIncreasingIndices => write!(f, "multihole indices must be strictly increasing"),
            Error::UnpairableConfiguration => {
                write!(f, "monomers cannot be paired into vertex-sharing pairs")
            }
            Error::WrongOrientation => write!(f, "monomer has the wrong orientation"),
            Error::InsufficientNodes => write!(f, "not enough nodes for the requested order"),
            Error::DegenerateDirection => write!(f, "direction (0,0) is degenerate"),
            Error::IllConditioned { estimate } => {
                write!(f, "extrapolation ill-conditioned (error estimate {estimate:e})")
            }
            Error::ExtrapolationTolerance { estimate } => {
                write!(f, "extrapolated entries too inaccurate (error estimate {estimate:e})")
            }
            Error::ZeroDenominator => write!(f, "correlation of the conditioning system vanishes"),
            Error::CoincidentPoints => write!(f, "two points coincide"),
            Error::SingularDenominator => write!(f, "limit matrix is singular"),
            Error::CenterSingularity => write!(f, "point lies on a helicoid axis"),
            Error::ChargeNotPositive => write!(f, "total positive charge must exceed negative charge"),
            Error::CutsIntersect => write!(f, "cuts intersect"),
            Error::WindowTooSmall => write!(f, "window does not contain all holes"),
            Error::HoleTooLarge => write!(f, "hole does not fit in the torus"),
            Error::RegionTooLarge => write!(f, "region too large for this method"),
        }
    }
}
