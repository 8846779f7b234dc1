#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace latentseal {

enum class ErrorKind {
  InvalidArgument,
  Divergence,
  LengthMismatch,
  InvalidKey,
  EntropyFailure,
  InvalidPublicKey,
  InvalidPoint,
  AuthFailure,
  MTooLarge,
  ShapeMismatch,
  NonFiniteLoss,
  EmptyBatch,
  DimMismatch,
  WindowTooLarge,
  BadHeader,
  Format,
  IoError,
  ConnectionError,
  FrameTooLarge,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Divergence: return "Divergence";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::InvalidKey: return "InvalidKey";
    case ErrorKind::EntropyFailure: return "EntropyFailure";
    case ErrorKind::InvalidPublicKey: return "InvalidPublicKey";
    case ErrorKind::InvalidPoint: return "InvalidPoint";
    case ErrorKind::AuthFailure: return "AuthFailure";
    case ErrorKind::MTooLarge: return "MTooLarge";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::EmptyBatch: return "EmptyBatch";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::WindowTooLarge: return "WindowTooLarge";
    case ErrorKind::BadHeader: return "BadHeader";
    case ErrorKind::Format: return "Format";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConnectionError: return "ConnectionError";
    case ErrorKind::FrameTooLarge: return "FrameTooLarge";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace latentseal
