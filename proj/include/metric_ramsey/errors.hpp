// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace mr {

enum class Err {
  // metric construction / queries
  AsymmetricMatrix,
  NegativeDistance,
  ZeroOffDiagonal,
  NonzeroDiagonal,
  TriangleViolation,
  DisconnectedGraph,
  NotBijection,
  SizeMismatch,
  InstanceTooLarge,
  ZeroWeight,
  // trees
  LabelMonotonicityViolation,
  DegenerateVertex,
  InvalidK,
  InvalidH,
  // composition
  DegenerateComposition,
  InvalidBeta,
  // extraction pipeline
  QTooSmall,
  AllZero,
  NotDecomposable,
  TTooSmall,
  InvalidParameters,
  DistortionPreconditionFailed,
  AlphaTooSmall,
  AlphaAtMostTwo,
  SeparationTooSmall,
  GuaranteeViolation,
  // graphs & bounds
  NotRegular,
  SubsetTooSmall,
  TOutOfRange,
  OutOfRange,
  StateSpaceTooLarge,
  // generators
  DTooLarge,
  InfeasibleDegree,
  RejectionLimit,
  RetryLimitExceeded,
  // io
  BadFormat,
};

inline const char* to_string(Err e) {
  switch (e) {
    case Err::AsymmetricMatrix: return "AsymmetricMatrix";
    case Err::NegativeDistance: return "NegativeDistance";
    case Err::ZeroOffDiagonal: return "ZeroOffDiagonal";
    case Err::NonzeroDiagonal: return "NonzeroDiagonal";
    case Err::TriangleViolation: return "TriangleViolation";
    case Err::DisconnectedGraph: return "DisconnectedGraph";
    case Err::NotBijection: return "NotBijection";
    case Err::SizeMismatch: return "SizeMismatch";
    case Err::InstanceTooLarge: return "InstanceTooLarge";
    case Err::ZeroWeight: return "ZeroWeight";
    case Err::LabelMonotonicityViolation: return "LabelMonotonicityViolation";
    case Err::DegenerateVertex: return "DegenerateVertex";
    case Err::InvalidK: return "InvalidK";
    case Err::InvalidH: return "InvalidH";
    case Err::DegenerateComposition: return "DegenerateComposition";
    case Err::InvalidBeta: return "InvalidBeta";
    case Err::QTooSmall: return "QTooSmall";
    case Err::AllZero: return "AllZero";
    case Err::NotDecomposable: return "NotDecomposable";
    case Err::TTooSmall: return "TTooSmall";
    case Err::InvalidParameters: return "InvalidParameters";
    case Err::DistortionPreconditionFailed: return "DistortionPreconditionFailed";
    case Err::AlphaTooSmall: return "AlphaTooSmall";
    case Err::AlphaAtMostTwo: return "AlphaAtMostTwo";
    case Err::SeparationTooSmall: return "SeparationTooSmall";
    case Err::GuaranteeViolation: return "GuaranteeViolation";
    case Err::NotRegular: return "NotRegular";
    case Err::SubsetTooSmall: return "SubsetTooSmall";
    case Err::TOutOfRange: return "TOutOfRange";
    case Err::OutOfRange: return "OutOfRange";
    case Err::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case Err::DTooLarge: return "DTooLarge";
    case Err::InfeasibleDegree: return "InfeasibleDegree";
    case Err::RejectionLimit: return "RejectionLimit";
    case Err::RetryLimitExceeded: return "RetryLimitExceeded";
    case Err::BadFormat: return "BadFormat";
  }
  return "UnknownError";
}

/// Domain error: carries the error code plus a human-readable detail
/// (witness triples, offending parameters, ...). The code name is always
/// part of what() so CLI messages can be matched on it.
class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& detail) { throw Error(code, detail); }

inline void require(bool cond, Err code, const std::string& detail) {
  if (!cond) fail(code, detail);
}

}  // namespace mr
