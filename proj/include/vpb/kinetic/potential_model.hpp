#pragma once

namespace vpb::kinetic {

enum class PotentialClass { hard, soft };

// Kernel B = C |v - v*|^gamma |cos theta| with Grad cutoff amplitude C.
struct PotentialModel {
  double gamma = 1.0;
  double angular_amplitude = 1.0;
  PotentialClass classification = PotentialClass::hard;

  static PotentialModel make(double gamma, double angular_amplitude = 1.0);
  bool hard() const { return classification == PotentialClass::hard; }
};

}  // namespace vpb::kinetic
