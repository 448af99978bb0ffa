#pragma once

#include "mcot/distance.hpp"
#include "mcot/flow.hpp"

#include "json.hpp"

#include <string>

namespace mcot {

/// Raw kernel file contents before validation.
struct KernelFile {
  Matrix kernel;
  std::vector<std::string> labels;
};

/// {"kernel": [[...], ...], "labels": [...]}; labels optional.
/// Throws Io when unreadable, Parse when malformed.
KernelFile read_kernel_file(const std::string& path);

/// {"values": [...]} or a bare JSON array.
Density read_density_file(const std::string& path);

/// {"a": .., "b": .., "p": [...], "normalize_p": bool}. Missing a, b default
/// to 1 and a missing p to the constant density 1.
struct ParamsFile {
  double a = 1.0;
  double b = 1.0;
  Vector p;
  bool normalize_p = false;
};
ParamsFile read_params_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& contents);

nlohmann::json to_json(const Vector& v);

nlohmann::json distance_report(const DistanceEstimate& est);
nlohmann::json l1_report(const L1Bounds& bounds);

/// Header "t,mu_1,...,mu_N,h". The source column holds the rate of the
/// interval starting at the node and is empty on the final node.
std::string path_csv(const DiscretePath& path);

/// Header "t,rho_1,...,rho_N,entropy,grad_norm_sq,min_state,mass".
std::string trajectory_csv(const FlowTrajectory& traj);

nlohmann::json decay_report(const DecayReport& report, double spectral_gap);

}  // namespace mcot
