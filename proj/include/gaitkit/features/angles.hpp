#pragma once

#include "gaitkit/core/model.hpp"
#include "gaitkit/core/table.hpp"

namespace gaitkit::features {

/// Sagittal-plane segment and joint angles in degrees, channels in the
/// canonical joint_angles order. Segment angles are atan2(dx, dz) of the
/// proximal minus distal marker (forward lean positive); the foot angle is
/// atan2(dz, dx) of toe minus heel (toe up positive); knee = thigh - shank.
/// The trunk uses the central shoulder/hip markers when mapped, else the mean
/// of both sides. Missing coordinates propagate as missing angles.
/// Errors: MarkerMissing.
TimeSeriesTable joint_angles_from_motion(const TimeSeriesTable& motion, const MarkerSet& markers);

}  // namespace gaitkit::features
