//! Closed vocabulary of anchor strings attached to report records. Each anchor is
//! a short quotation locating the statement a check exercises.

pub const COORDINATES_AT_INFINITY: &str = "coordinates at infinity";
pub const SCALAR_CURVATURES: &str = "s and s* are respectively the scalar curvature";
pub const FUNDAMENTAL_FORM: &str = "whose fundamental two form";
pub const STAR_SCALAR: &str = "the star-scalar curvature";
pub const STRUCTURE_IDENTITY: &str = "related by the following identity";
pub const HERMITIAN_SCALAR: &str = "the Hermitian scalar curvature";
pub const HERMITIAN_CONNECTIONS: &str = "distinguished a real affine line";
pub const WEDGE_IDENTITY: &str = "Using the identity";
pub const ANTI_INVARIANT: &str = "component of the curvature operator";
pub const FOUR_D_IDENTITIES: &str = "the following identities";
pub const EINSTEIN_RELATION: &str = "The following relation holds";
pub const ADAPTED_BASIS: &str = "One can infact choose";
pub const SPINOR_BUNDLE: &str = "the canonical spinor bundle";
pub const CONNECTION_FORMULA: &str = "computed according to the formula";
pub const CLIFFORD_ACTION: &str = "Clifford action of";
pub const VACUUM_EIGENSPACE: &str = "is a −mi eigenspace";
pub const OMEGA_02_EIGENVALUE: &str = "c=2 when m=2";
pub const DIRAC_EQUATION: &str = "solves the Dirac equation";
pub const NORM_EQUALITY: &str = "pointwise equality of norms";
pub const ADM_SPHERE: &str = "Euclidean coordinate sphere of radius";
pub const COORDINATE_INDEPENDENCE: &str = "independent of the choice of coordinates";
pub const THETA_POTENTIAL: &str = "for any 1-form θ";
pub const THETA_MASS: &str = "the ADM mass is given by";
pub const MASS_FORMULA: &str = "has the mass given by";
pub const BLAIR: &str = "total Hermitian scalar curvature is";
pub const PENROSE: &str = "the mass of the manifold then satisfies";

pub const ALL: &[&str] = &[
    COORDINATES_AT_INFINITY,
    SCALAR_CURVATURES,
    FUNDAMENTAL_FORM,
    STAR_SCALAR,
    STRUCTURE_IDENTITY,
    HERMITIAN_SCALAR,
    HERMITIAN_CONNECTIONS,
    WEDGE_IDENTITY,
    ANTI_INVARIANT,
    FOUR_D_IDENTITIES,
    EINSTEIN_RELATION,
    ADAPTED_BASIS,
    SPINOR_BUNDLE,
    CONNECTION_FORMULA,
    CLIFFORD_ACTION,
    VACUUM_EIGENSPACE,
    OMEGA_02_EIGENVALUE,
    DIRAC_EQUATION,
    NORM_EQUALITY,
    ADM_SPHERE,
    COORDINATE_INDEPENDENCE,
    THETA_POTENTIAL,
    THETA_MASS,
    MASS_FORMULA,
    BLAIR,
    PENROSE,
];
