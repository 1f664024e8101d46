#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lv {

enum class Errc {
  NotFound,
  UnsupportedFormat,
  CorruptData,
  ZeroDimension,
  KernelTooLarge,
  ImageTooSmall,
  InvalidParams,
  IndivisibleCellSize,
  EmptyDataset,
  SingleClassDataset,
  NonConvergence,
  TooFewSamples,
  DimensionMismatch,
  NonFiniteWeights,
  EmptyBatch,
  NonFiniteGradient,
  EmptyMatrix,
  TooFewPerClass,
  SingleClassLabels,
  DefectTooLargeForPatch,
  IoError,
  MissingFile,
  BadLabel,
  BadManifest,
  UnknownName,
};

constexpr std::string_view errc_name(Errc e) {
  switch (e) {
    case Errc::NotFound: return "NotFound";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::CorruptData: return "CorruptData";
    case Errc::ZeroDimension: return "ZeroDimension";
    case Errc::KernelTooLarge: return "KernelTooLarge";
    case Errc::ImageTooSmall: return "ImageTooSmall";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::IndivisibleCellSize: return "IndivisibleCellSize";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::SingleClassDataset: return "SingleClassDataset";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonFiniteWeights: return "NonFiniteWeights";
    case Errc::EmptyBatch: return "EmptyBatch";
    case Errc::NonFiniteGradient: return "NonFiniteGradient";
    case Errc::EmptyMatrix: return "EmptyMatrix";
    case Errc::TooFewPerClass: return "TooFewPerClass";
    case Errc::SingleClassLabels: return "SingleClassLabels";
    case Errc::DefectTooLargeForPatch: return "DefectTooLargeForPatch";
    case Errc::IoError: return "IoError";
    case Errc::MissingFile: return "MissingFile";
    case Errc::BadLabel: return "BadLabel";
    case Errc::BadManifest: return "BadManifest";
    case Errc::UnknownName: return "UnknownName";
  }
  return "Unknown";
}

/// Every failure in the library is reported through this exception; `code()`
/// identifies the failure class, `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& detail) { throw Error(code, detail); }

}  // namespace lv
