//! Robot geometry models: a point robot living directly in the workspace,
//! and a serial kinematic chain whose links are capsules.

use serde::{Deserialize, Serialize};

use super::geom::{Capsule, Isometry, Vec3};
use super::Configuration;

/// One revolute joint of a serial chain.
///
/// The joint rotates its frame about `axis` by the joint coordinate; `link`
/// is the capsule carried by that rotated frame; `offset` then translates to
/// the next joint frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSpec {
    pub axis: Vec3,
    pub offset: Vec3,
    pub link: Capsule,
    pub limits: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SerialChain {
    pub base: Vec3,
    pub joints: Vec<JointSpec>,
}

/// Geometry model used by collision queries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RobotModel {
    /// Zero-size robot: a configuration is itself a workspace point.
    Point,
    /// Serial chain with one capsule per joint.
    SerialChain(SerialChain),
}

impl RobotModel {
    pub fn serial_chain(base: Vec3, joints: Vec<JointSpec>) -> Self {
        assert!(!joints.is_empty(), "serial chain needs at least one joint");
        for j in &joints {
            assert!(j.link.radius > 0.0, "capsule radius must be positive");
            assert!(j.limits.0 < j.limits.1, "joint limits must be ordered");
        }
        RobotModel::SerialChain(SerialChain { base, joints })
    }

    /// Configuration-space dimension the model expects.
    pub fn dof(&self) -> Option<usize> {
        match self {
            RobotModel::Point => None, // determined by the scenario space
            RobotModel::SerialChain(c) => Some(c.joints.len()),
        }
    }

    pub fn within_limits(&self, q: &Configuration) -> bool {
        match self {
            RobotModel::Point => true,
            RobotModel::SerialChain(c) => c
                .joints
                .iter()
                .zip(q.coords())
                .all(|(j, &v)| v >= j.limits.0 && v <= j.limits.1),
        }
    }
}

/// Poses every link capsule of a serial chain in the world frame.
///
/// Panics when called on the point model (contract violation) or when the
/// configuration dimension does not match the joint count.
pub fn forward_kinematics(q: &Configuration, model: &RobotModel) -> Vec<Capsule> {
    let chain = match model {
        RobotModel::SerialChain(c) => c,
        RobotModel::Point => panic!("forward kinematics requires a serial-chain model"),
    };
    assert!(
        q.dim() == chain.joints.len(),
        "configuration has {} coordinates for a {}-joint chain",
        q.dim(),
        chain.joints.len()
    );

    let mut t = Isometry::translation(chain.base);
    let mut capsules = Vec::with_capacity(chain.joints.len());
    for (joint, &angle) in chain.joints.iter().zip(q.coords()) {
        t = t.compose(&Isometry::rotation(joint.axis, angle));
        capsules.push(joint.link.transformed(&t));
        t = t.compose(&Isometry::translation(joint.offset));
    }
    capsules
}
