#include "mcot/io.hpp"

#include "mcot/error.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace mcot {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, path + ": " + e.what());
  }
}

Vector to_vector(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::Parse, what + " must be a non-empty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::Parse, what + " must contain only numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

KernelFile read_kernel_file(const std::string& path) {
  const json doc = parse_file(path);
  if (!doc.is_object() || !doc.contains("kernel")) throw Error(ErrorCode::Parse, path + ": missing \"kernel\"");
  const json& rows = doc["kernel"];
  if (!rows.is_array() || rows.empty()) throw Error(ErrorCode::Parse, path + ": \"kernel\" must be a 2-D array");
  KernelFile out;
  const std::size_t n = rows.size();
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector row = to_vector(rows[i], "kernel row");
    if (i == 0) {
      m = static_cast<std::size_t>(row.size());
      out.kernel.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    } else if (static_cast<std::size_t>(row.size()) != m) {
      throw Error(ErrorCode::Parse, path + ": kernel rows have different lengths");
    }
    out.kernel.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  if (doc.contains("labels")) {
    try {
      out.labels = doc["labels"].get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Parse, path + ": labels must be strings");
    }
  }
  return out;
}

Density read_density_file(const std::string& path) {
  const json doc = parse_file(path);
  if (doc.is_array()) return Density(to_vector(doc, path));
  if (!doc.is_object() || !doc.contains("values")) throw Error(ErrorCode::Parse, path + ": missing \"values\"");
  return Density(to_vector(doc["values"], path + " values"));
}

ParamsFile read_params_file(const std::string& path) {
  const json doc = parse_file(path);
  if (!doc.is_object()) throw Error(ErrorCode::Parse, path + ": expected an object");
  ParamsFile out;
  try {
    if (doc.contains("a")) out.a = doc["a"].get<double>();
    if (doc.contains("b")) out.b = doc["b"].get<double>();
    if (doc.contains("normalize_p")) out.normalize_p = doc["normalize_p"].get<bool>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, path + ": " + e.what());
  }
  if (doc.contains("p")) out.p = to_vector(doc["p"], path + " p");
  return out;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

json to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json distance_report(const DistanceEstimate& est) {
  json measures = json::array();
  for (const auto& m : est.path.measures) measures.push_back(to_json(m.values));
  json trace = json::array();
  for (const auto& [iter, value] : est.optimizer_trace) trace.push_back({iter, value});
  return {
      {"upper_bound", est.upper_bound},
      {"lower_bound", est.lower_bound},
      {"n_steps", est.n_steps},
      {"restarts_used", est.restarts_used},
      {"best_restart", est.best_restart},
      {"converged", est.converged},
      {"min_interior", est.min_interior},
      {"path", {{"times", est.path.times}, {"measures", measures}, {"sources", est.path.sources}}},
      {"trace", trace},
  };
}

json l1_report(const L1Bounds& bounds) {
  return {{"c", bounds.c},
          {"C", bounds.C},
          {"l1_distance", bounds.l1_distance},
          {"samples", bounds.samples},
          {"lower_holds", bounds.lower_holds},
          {"upper_holds", bounds.upper_holds}};
}

std::string path_csv(const DiscretePath& path) {
  std::ostringstream os;
  const int n = path.measures.empty() ? 0 : path.measures.front().size();
  os << "t";
  for (int x = 1; x <= n; ++x) os << ",mu_" << x;
  os << ",h\n";
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    os << fmt(path.times[k]);
    for (int x = 0; x < n; ++x) os << ',' << fmt(path.measures[k](x));
    os << ',';
    if (k < path.sources.size()) os << fmt(path.sources[k]);
    os << '\n';
  }
  return os.str();
}

std::string trajectory_csv(const FlowTrajectory& traj) {
  std::ostringstream os;
  const int n = traj.states.empty() ? 0 : traj.states.front().size();
  os << "t";
  for (int x = 1; x <= n; ++x) os << ",rho_" << x;
  os << ",entropy,grad_norm_sq,min_state,mass\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << fmt(traj.times[k]);
    for (int x = 0; x < n; ++x) os << ',' << fmt(traj.states[k](x));
    os << ',' << fmt(traj.entropy[k]) << ',' << fmt(traj.grad_norm_sq[k]) << ',' << fmt(traj.min_state[k]) << ','
       << fmt(traj.mass[k]) << '\n';
  }
  return os.str();
}

json decay_report(const DecayReport& report, double spectral_gap) {
  return {{"fitted_rate", report.fitted_rate},
          {"r_squared", report.r_squared},
          {"l2_rate", report.l2_rate},
          {"l2_r_squared", report.l2_r_squared},
          {"loja_constant", report.loja_constant},
          {"loja_constant_kind", "sampled estimate"},
          {"l2_distance_final", report.l2_distance_final},
          {"samples_used", report.samples_used},
          {"spectral_gap", spectral_gap}};
}

}  // namespace mcot
