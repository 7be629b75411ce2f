#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace osgap {

enum class Direction { Upper, Lower };
enum class StepKind { Numeric, Structural };

std::string to_string(Direction d);
std::string to_string(StepKind k);

/// One verified fact a bound depends on. Numeric steps pass when
/// residual <= tolerance; structural steps record an argument that is not
/// re-verified numerically and always carry residual 0.
struct ProvenanceStep {
  std::string name;
  std::string inputs;
  std::string anchor;
  double residual = 0.0;
  double tolerance = 0.0;
  StepKind kind = StepKind::Numeric;

  bool passed() const { return residual <= tolerance; }
};

class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A bound on a named norm together with the ordered facts it rests on. The
/// steps are sealed into a chained digest; dropping, reordering or editing a
/// step makes valid() false.
class NormCertificate {
 public:
  const std::string& norm_name() const { return norm_name_; }
  Direction direction() const { return direction_; }
  double value() const { return value_; }
  double tolerance() const { return tolerance_; }
  std::span<const ProvenanceStep> provenance() const { return steps_; }
  std::uint64_t digest() const { return digest_; }

  bool valid() const;

  /// Reassembles a certificate from stored parts (e.g. after parsing). The
  /// result is only valid() if the parts are exactly what was sealed.
  static NormCertificate restore(std::string norm_name, Direction direction, double value,
                                 double tolerance, std::vector<ProvenanceStep> steps,
                                 std::uint64_t digest);

 private:
  friend class CertificateBuilder;
  std::string norm_name_;
  Direction direction_ = Direction::Upper;
  double value_ = 0.0;
  double tolerance_ = 0.0;
  std::vector<ProvenanceStep> steps_;
  std::uint64_t digest_ = 0;

  std::uint64_t compute_digest() const;
};

class CertificateBuilder {
 public:
  CertificateBuilder(std::string norm_name, Direction direction);

  CertificateBuilder& check(std::string name, std::string inputs, double residual, double tolerance,
                            std::string anchor = {});
  CertificateBuilder& structural(std::string name, std::string justification, std::string anchor = {});

  const std::vector<ProvenanceStep>& steps() const { return cert_.steps_; }

  /// Throws CertificationError naming every failed step.
  NormCertificate seal(double value, double tolerance);

 private:
  NormCertificate cert_;
};

std::string digest_hex(std::uint64_t d);

}  // namespace osgap
