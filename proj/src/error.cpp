#include "alexbench/error.hpp"

namespace alexbench {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InsufficientClassCount: return "InsufficientClassCount";
    case ErrorCode::UnsupportedArchitecture: return "UnsupportedArchitecture";
    case ErrorCode::EmptyPool: return "EmptyPool";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BadGrid: return "BadGrid";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::BatchTooLarge: return "BatchTooLarge";
    case ErrorCode::MissingSurrogate: return "MissingSurrogate";
    case ErrorCode::NoCentroids: return "NoCentroids";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::PoolExhausted: return "PoolExhausted";
    case ErrorCode::CorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnknownFlag: return "UnknownFlag";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::MissingConfig: return "MissingConfig";
  }
  return "Unknown";
}

}  // namespace alexbench
