#pragma once

#include <stdexcept>
#include <string>

namespace affcorr {

// Base class for all geometric failure modes. Every error carries a stable
// machine-readable code ("degenerate-plane", ...) that the CLI reuses as the
// sidecar reason string.
class Error : public std::runtime_error {
 public:
  Error(const char* code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  const char* code() const noexcept { return code_; }

 private:
  const char* code_;
};

struct DegeneratePlane : Error {
  explicit DegeneratePlane(const std::string& what)
      : Error("degenerate-plane", what) {}
};

struct PointAtInfinity : Error {
  explicit PointAtInfinity(const std::string& what)
      : Error("point-at-infinity", what) {}
};

struct DegenerateDenominator : Error {
  explicit DegenerateDenominator(const std::string& what)
      : Error("degenerate-denominator", what) {}
};

struct ZeroTranslation : Error {
  explicit ZeroTranslation(const std::string& what)
      : Error("zero-translation", what) {}
};

struct RayParallelToPlane : Error {
  explicit RayParallelToPlane(const std::string& what)
      : Error("ray-parallel-to-plane", what) {}
};

struct NegativeDepth : Error {
  explicit NegativeDepth(const std::string& what)
      : Error("negative-depth", what) {}
};

struct UninformativeTranslation : Error {
  explicit UninformativeTranslation(const std::string& what)
      : Error("uninformative-translation", what) {}
};

struct IllConditioned : Error {
  explicit IllConditioned(const std::string& what)
      : Error("ill-conditioned", what) {}
};

struct PlaneBehindCamera : Error {
  explicit PlaneBehindCamera(const std::string& what)
      : Error("plane-behind-camera", what) {}
};

struct ExhaustedRejection : Error {
  explicit ExhaustedRejection(const std::string& what)
      : Error("exhausted-rejection", what) {}
};

struct InvalidConfig : Error {
  explicit InvalidConfig(const std::string& what)
      : Error("invalid-config", what) {}
};

// Raised while decoding a record line; the code doubles as the sidecar reason
// ("parse-error", "missing-field", "non-finite", "invalid-rotation", ...).
class RecordError : public Error {
 public:
  RecordError(const char* code, const std::string& what) : Error(code, what) {}
};

}  // namespace affcorr
