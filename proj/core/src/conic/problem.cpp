#include "socnav/conic/problem.hpp"

#include <nlohmann/json.hpp>
#include <stdexcept>

namespace socnav::conic {

void SocpProblem::validate() const {
  const Eigen::Index d = dim();
  if (d <= 0) throw std::invalid_argument("SocpProblem: empty decision vector");
  if (!objective.allFinite())
    throw std::invalid_argument("SocpProblem: non-finite objective");
  for (std::size_t i = 0; i < cones.size(); ++i) {
    const auto& k = cones[i];
    if (k.c.size() != d)
      throw std::invalid_argument("SocpProblem: cone " + std::to_string(i) +
                                  " has wrong c dimension");
    if (k.rows() > 0 && (k.A.cols() != d || k.b.size() != k.rows()))
      throw std::invalid_argument("SocpProblem: cone " + std::to_string(i) +
                                  " has inconsistent A/b dimensions");
    if (!k.c.allFinite() || !std::isfinite(k.d0) ||
        (k.rows() > 0 && (!k.A.allFinite() || !k.b.allFinite())))
      throw std::invalid_argument("SocpProblem: cone " + std::to_string(i) +
                                  " has non-finite data");
  }
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::MaxIters: return "MaxIters";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

std::string to_json(const SocpProblem& p, int indent) {
  nlohmann::json j;
  j["objective"] = std::vector<double>(p.objective.data(),
                                       p.objective.data() + p.objective.size());
  if (!p.variable_names.empty()) j["variable_names"] = p.variable_names;
  j["cones"] = nlohmann::json::array();
  for (const auto& k : p.cones) {
    nlohmann::json jc;
    jc["rows"] = k.rows();
    // row-major A
    std::vector<double> a;
    a.reserve(static_cast<std::size_t>(k.rows() * k.dim()));
    for (Eigen::Index r = 0; r < k.rows(); ++r)
      for (Eigen::Index c = 0; c < k.A.cols(); ++c) a.push_back(k.A(r, c));
    jc["A"] = a;
    jc["b"] = std::vector<double>(k.b.data(), k.b.data() + k.b.size());
    jc["c"] = std::vector<double>(k.c.data(), k.c.data() + k.c.size());
    jc["d0"] = k.d0;
    j["cones"].push_back(jc);
  }
  return j.dump(indent);
}

}  // namespace socnav::conic
