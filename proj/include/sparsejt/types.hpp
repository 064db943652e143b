// Common numeric aliases and the error type shared by all sparsejt modules.

#ifndef SPARSEJT_TYPES_HPP
#define SPARSEJT_TYPES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace sparsejt {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  CapacityTooSmall,
  RankDeficient,
  SingularSystem,
  NotStationary,
  EmptySupport,
  ZeroVector,
  ConfigError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// (pi * sqrt(3) / 2): high-resolution distortion constant of a Gaussian source.
inline constexpr double kQuantConst = 2.7206990463513265;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace sparsejt

#endif  // SPARSEJT_TYPES_HPP
