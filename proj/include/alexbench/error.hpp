#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace alexbench {

enum class ErrorCode {
  // data_ingest
  BadMagic,
  Truncated,
  DimensionOverflow,
  LabelOutOfRange,
  ShapeMismatch,
  InsufficientClassCount,
  // model
  UnsupportedArchitecture,
  EmptyPool,
  EmptyBatch,
  DimensionMismatch,
  // explainer
  BadGrid,
  SingularSystem,
  // strategies
  BatchTooLarge,
  MissingSurrogate,
  NoCentroids,
  TooFewPoints,
  // harness
  PoolExhausted,
  CorruptCheckpoint,
  InvalidConfig,
  // output / io
  IoError,
  // cli
  UnknownFlag,
  InvalidValue,
  MissingConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace alexbench
