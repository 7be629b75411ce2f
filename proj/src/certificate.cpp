#include "osgap/certificate.hpp"

#include <cmath>
#include <cstdio>

namespace osgap {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void mix(std::uint64_t& h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  h ^= 0xff;  // field separator
  h *= kFnvPrime;
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(Direction d) { return d == Direction::Upper ? "upper" : "lower"; }
std::string to_string(StepKind k) { return k == StepKind::Numeric ? "numeric" : "structural"; }

std::string digest_hex(std::uint64_t d) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d));
  return buf;
}

std::uint64_t NormCertificate::compute_digest() const {
  std::uint64_t h = kFnvOffset;
  mix(h, norm_name_);
  mix(h, to_string(direction_));
  mix(h, exact(value_));
  mix(h, exact(tolerance_));
  for (const auto& s : steps_) {
    // each step folds in the running digest, so the chain fixes order and count
    mix(h, digest_hex(h));
    mix(h, s.name);
    mix(h, s.inputs);
    mix(h, s.anchor);
    mix(h, exact(s.residual));
    mix(h, exact(s.tolerance));
    mix(h, to_string(s.kind));
  }
  mix(h, std::to_string(steps_.size()));
  return h;
}

bool NormCertificate::valid() const {
  if (steps_.empty() || !std::isfinite(value_)) return false;
  for (const auto& s : steps_)
    if (!s.passed()) return false;
  return compute_digest() == digest_;
}

NormCertificate NormCertificate::restore(std::string norm_name, Direction direction, double value,
                                         double tolerance, std::vector<ProvenanceStep> steps,
                                         std::uint64_t digest) {
  NormCertificate c;
  c.norm_name_ = std::move(norm_name);
  c.direction_ = direction;
  c.value_ = value;
  c.tolerance_ = tolerance;
  c.steps_ = std::move(steps);
  c.digest_ = digest;
  return c;
}

CertificateBuilder::CertificateBuilder(std::string norm_name, Direction direction) {
  cert_.norm_name_ = std::move(norm_name);
  cert_.direction_ = direction;
}

CertificateBuilder& CertificateBuilder::check(std::string name, std::string inputs, double residual,
                                              double tolerance, std::string anchor) {
  if (std::isnan(residual)) residual = INFINITY;
  cert_.steps_.push_back({std::move(name), std::move(inputs), std::move(anchor), residual, tolerance,
                          StepKind::Numeric});
  return *this;
}

CertificateBuilder& CertificateBuilder::structural(std::string name, std::string justification,
                                                   std::string anchor) {
  cert_.steps_.push_back(
      {std::move(name), std::move(justification), std::move(anchor), 0.0, 0.0, StepKind::Structural});
  return *this;
}

NormCertificate CertificateBuilder::seal(double value, double tolerance) {
  std::string failed;
  for (const auto& s : cert_.steps_)
    if (!s.passed()) failed += "\n  " + s.name + " [" + s.inputs + "]: residual " + exact(s.residual) +
                               " > tolerance " + exact(s.tolerance);
  if (!failed.empty())
    throw CertificationError("certificate '" + cert_.norm_name_ + "' not issued; failed steps:" + failed);
  if (cert_.steps_.empty()) throw CertificationError("certificate has no provenance");
  cert_.value_ = value;
  cert_.tolerance_ = tolerance;
  cert_.digest_ = cert_.compute_digest();
  return cert_;
}

}  // namespace osgap
