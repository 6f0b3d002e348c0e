#pragma once

namespace vizcomp {

/// Recognition thresholds, tuned for a working volume of roughly one meter.
struct Thresholds {
  double linkDistance = 0.15;        // meters, make threshold for integrated links
  double hysteresis = 1.25;          // break threshold = hysteresis * linkDistance
  double juxtaposeDistance = 0.30;   // meters
  double superimposeAngle = 45.0;    // degrees, minimum normal angle
  double hostClientRatio = 2.5;      // minimum host/client diagonal ratio for nesting
  double spreadFactor = 1.5;         // pcp pair gap / default gap that activates a region
  double pullDistance = 0.20;        // meters, decomposition pull
  double binStepFraction = 0.5;      // partition bin step as a fraction of axis length

  double link_break() const { return hysteresis * linkDistance; }

  bool valid() const {
    return linkDistance > 0 && hysteresis > 1 && juxtaposeDistance > 0 && superimposeAngle > 0 &&
           hostClientRatio > 0 && spreadFactor > 0 && pullDistance > 0 && binStepFraction > 0;
  }

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

}  // namespace vizcomp
