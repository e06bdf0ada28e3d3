#include "invloc/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace invloc {

Norm Norm::of(double p) {
  if (std::isnan(p) || p < 1.0) {
    std::ostringstream msg;
    msg << "norm parameter p must satisfy p >= 1 (got " << p << ")";
    throw std::invalid_argument(msg.str());
  }
  return Norm{p};
}

std::vector<double> Instance::weights() const {
  std::vector<double> w;
  w.reserve(sites.size());
  for (const ClientSite& s : sites) w.push_back(s.weight);
  return w;
}

namespace {

bool bad(double v) { return !std::isfinite(v); }

void check_field(std::vector<std::string>& out, std::size_t site_index,
                 const char* name, double v, bool nonnegative) {
  if (bad(v) || (nonnegative && v < 0.0)) {
    std::ostringstream msg;
    msg << "site " << (site_index + 1) << ": " << name << " must be "
        << (nonnegative ? "finite and >= 0" : "finite") << " (got " << v
        << ")";
    out.push_back(msg.str());
  }
}

}  // namespace

std::vector<std::string> validate_instance(const Instance& inst) {
  std::vector<std::string> out;
  if (inst.sites.empty())
    out.push_back("instance must contain at least one site");
  if (std::isnan(inst.norm.p) || inst.norm.p < 1.0) {
    std::ostringstream msg;
    msg << "norm: p must be >= 1 (got " << inst.norm.p << ")";
    out.push_back(msg.str());
  }
  for (std::size_t i = 0; i < inst.sites.size(); ++i) {
    const ClientSite& s = inst.sites[i];
    check_field(out, i, "location x", s.location.x, false);
    check_field(out, i, "location y", s.location.y, false);
    check_field(out, i, "weight", s.weight, true);
    check_field(out, i, "u_minus", s.u_minus, true);
    check_field(out, i, "u_plus", s.u_plus, true);
    check_field(out, i, "c_minus", s.c_minus, true);
    check_field(out, i, "c_plus", s.c_plus, true);
  }
  return out;
}

double weight_change(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("weight_change: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace invloc
