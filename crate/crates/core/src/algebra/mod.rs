//! Angle-space flexibility test for meshes with a quadrilateral centre.
//!
//! Every central vertex ties its four face angles to the dihedrals of the
//! two central edges through it. With `t_i` the cosine of the dihedral at
//! edge `i`, squaring gives a biquadratic relation between consecutive
//! `t`'s ([`lemma`]). Eliminating the two odd-edge cosines leaves two
//! polynomials in `(t1, t3)` ([`elimination`]); the mesh flexes exactly when
//! their resultant in `t3` vanishes identically, which [`certificate`]
//! decides from integer samples of `t1`.

pub mod certificate;
pub mod elimination;
pub mod families;
pub mod lemma;
pub mod poly;
pub mod realize;
pub mod resultant;
pub mod scalar;

pub use certificate::{flex_certificate, FlexCertificate};
pub use families::{family_angles, FamilyKind, Flip, HalfTan};
pub use realize::realize_mesh;
